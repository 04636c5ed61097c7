use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{CoupledBasis, HalfInt};
use crate::error::{Error, Result};
use crate::sparse::SparseOp;

/// Label `(J_T, λ)` of an extremal state `|J_T, −J_T, λ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExtremalLabel {
    pub total: HalfInt,
    pub lambda: HalfInt,
}

/// Amplitudes `χ` of a ladder operator acting on every extremal state.
///
/// `amplitude(from, to)` is the coefficient of `|J_T', −J_T + 1, λ'⟩` in
/// `Ĵ⁺ |J_T, −J_T, λ⟩`. Only `|J_T' − J_T| ≤ 1` entries are stored; the
/// largest modulus seen outside that window is kept in
/// [`TransitionTable::max_forbidden`].
#[derive(Clone, Debug, Default)]
pub struct TransitionTable {
    amplitudes: BTreeMap<(ExtremalLabel, ExtremalLabel), C64>,
    initial: Vec<ExtremalLabel>,
    max_forbidden: f64,
}

pub fn transition_table(op: &SparseOp, basis: &CoupledBasis) -> Result<TransitionTable> {
    if op.basis() != basis.id() || op.dim() != basis.dim() {
        return Err(Error::BasisMismatch(format!(
            "operator on {} but basis is {}",
            op.basis(),
            basis.id()
        )));
    }
    let adj = op.adjoint();
    let mut table = TransitionTable::default();
    for col in basis.extremal_indices() {
        let s = basis.state(col);
        let from = ExtremalLabel {
            total: s.total,
            lambda: s.lambda,
        };
        table.initial.push(from);
        // Column `col` of op is row `col` of its adjoint.
        for (row, v) in adj.row(col) {
            let amp = v.conj();
            let t = basis.state(row);
            let to = ExtremalLabel {
                total: t.total,
                lambda: t.lambda,
            };
            if (t.total.twice() - s.total.twice()).abs() <= 2 {
                *table.amplitudes.entry((from, to)).or_default() += amp;
            } else {
                table.max_forbidden = table.max_forbidden.max(amp.norm());
            }
        }
    }
    Ok(table)
}

impl TransitionTable {
    pub fn amplitude(&self, from: ExtremalLabel, to: ExtremalLabel) -> C64 {
        self.amplitudes
            .get(&(from, to))
            .copied()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ExtremalLabel, ExtremalLabel, C64)> + '_ {
        self.amplitudes.iter().map(|(&(f, t), &v)| (f, t, v))
    }

    /// Extremal initial states, in basis order.
    pub fn initial_labels(&self) -> &[ExtremalLabel] {
        &self.initial
    }

    pub fn max_forbidden(&self) -> f64 {
        self.max_forbidden
    }

    /// `Σ_{λ'} |χ|²` from `from` into every final state of total spin `to_total`.
    pub fn summed_rate(&self, from: ExtremalLabel, to_total: HalfInt) -> f64 {
        self.amplitudes
            .range((from, ExtremalLabel { total: HalfInt::from_twice(i32::MIN), lambda: HalfInt::from_twice(i32::MIN) })..)
            .take_while(|((f, _), _)| *f == from)
            .filter(|((_, t), _)| t.total == to_total)
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Largest modulus among `Δ = ±1` entries. Used to scale tolerances.
    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
