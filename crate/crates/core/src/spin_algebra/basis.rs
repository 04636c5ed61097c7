use std::collections::HashMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{clebsch_gordan, HalfInt};
use crate::error::{Error, Result};
use crate::sparse::{BasisId, SparseOp};

/// Default cap on coupled-basis dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 20_000;

/// `|(j_A j_B) λ, j_β; J_T, μ⟩`, with λ the intermediate `j_AB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisState {
    pub lambda: HalfInt,
    pub total: HalfInt,
    pub mu: HalfInt,
}

impl BasisState {
    pub fn new(lambda: HalfInt, total: HalfInt, mu: HalfInt) -> Self {
        Self { lambda, total, mu }
    }

    /// Whether this is the lowest-weight state `μ = −J_T` of its multiplet.
    pub fn is_extremal(&self) -> bool {
        self.mu == -self.total
    }
}

/// Coupled basis for three fixed subsystem spins, ordered by `J_T`, then
/// `λ`, then `μ`.
#[derive(Clone, Debug)]
pub struct CoupledBasis {
    j_a: HalfInt,
    j_b: HalfInt,
    j_beta: HalfInt,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

pub fn build_coupled_basis(j_a: HalfInt, j_b: HalfInt, j_beta: HalfInt) -> Result<CoupledBasis> {
    CoupledBasis::with_cap(j_a, j_b, j_beta, DEFAULT_DIMENSION_CAP)
}

impl CoupledBasis {
    pub fn with_cap(j_a: HalfInt, j_b: HalfInt, j_beta: HalfInt, cap: usize) -> Result<Self> {
        for (name, j) in [("j_A", j_a), ("j_B", j_b), ("j_beta", j_beta)] {
            if j.twice() < 0 {
                return Err(Error::Input(format!("{name} = {j} must be non-negative")));
            }
        }
        let dim = j_a.multiplicity() as u128 * j_b.multiplicity() as u128 * j_beta.multiplicity() as u128;
        if dim > cap as u128 {
            return Err(Error::Resource {
                what: "coupled basis",
                dim: dim.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dim as usize);
        for lambda in HalfInt::triangle_range(j_a, j_b) {
            for total in HalfInt::triangle_range(lambda, j_beta) {
                for mu in total.projections() {
                    states.push(BasisState::new(lambda, total, mu));
                }
            }
        }
        states.sort_by_key(|s| (s.total, s.lambda, s.mu));
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Self {
            j_a,
            j_b,
            j_beta,
            states,
            index,
        })
    }

    pub fn j_a(&self) -> HalfInt {
        self.j_a
    }

    pub fn j_b(&self) -> HalfInt {
        self.j_b
    }

    pub fn j_beta(&self) -> HalfInt {
        self.j_beta
    }

    pub fn id(&self) -> BasisId {
        BasisId::Coupled {
            twice_a: self.j_a.twice() as u32,
            twice_b: self.j_b.twice() as u32,
            twice_beta: self.j_beta.twice() as u32,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Indices of the extremal states `|J_T, −J_T, λ⟩`, in basis order.
    pub fn extremal_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.states[i].is_extremal()).collect()
    }

    /// Distinct total-spin values in increasing order.
    pub fn totals(&self) -> Vec<HalfInt> {
        let mut t: Vec<HalfInt> = self.states.iter().map(|s| s.total).collect();
        t.dedup();
        t
    }

    /// Number of λ labels carrying a given total spin.
    pub fn degeneracy(&self, total: HalfInt) -> usize {
        self.states
            .iter()
            .filter(|s| s.total == total && s.is_extremal())
            .count()
    }

    pub fn product_dim(&self) -> usize {
        self.j_a.multiplicity() * self.j_b.multiplicity() * self.j_beta.multiplicity()
    }

    /// Index of the product state `|m_A⟩|m_B⟩|m_β⟩`, with projections running
    /// from `−j` upward within each factor.
    pub fn product_index(&self, m_a: HalfInt, m_b: HalfInt, m_beta: HalfInt) -> usize {
        let ia = ((m_a + self.j_a).twice() / 2) as usize;
        let ib = ((m_b + self.j_b).twice() / 2) as usize;
        let ic = ((m_beta + self.j_beta).twice() / 2) as usize;
        (ia * self.j_b.multiplicity() + ib) * self.j_beta.multiplicity() + ic
    }

    /// Change of basis `U[product, coupled]` built from the two CG layers
    /// `(j_A ⊗ j_B → λ) ⊗ j_β → J_T`. Real orthogonal.
    pub fn coupling_unitary(&self) -> SparseOp {
        let mut trip = Vec::new();
        for (col, s) in self.states.iter().enumerate() {
            for m_a in self.j_a.projections() {
                for m_b in self.j_b.projections() {
                    let m_ab = m_a + m_b;
                    let m_beta = s.mu - m_ab;
                    if !m_beta.is_projection_of(self.j_beta) || !m_ab.is_projection_of(s.lambda) {
                        continue;
                    }
                    let c1 = clebsch_gordan(self.j_a, m_a, self.j_b, m_b, s.lambda, m_ab);
                    let c2 = clebsch_gordan(s.lambda, m_ab, self.j_beta, m_beta, s.total, s.mu);
                    let v = c1 * c2;
                    if v != 0.0 {
                        trip.push((self.product_index(m_a, m_b, m_beta), col, C64::new(v, 0.0)));
                    }
                }
            }
        }
        SparseOp::from_triplets(BasisId::Plain(self.dim()), self.dim(), trip)
            .expect("product and coupled bases share a dimension")
    }

    /// `Σ_x c_x j_x^±` assembled directly in the product basis.
    pub fn product_collective_operator(&self, coeffs: [C64; 3], sense: Sense) -> SparseOp {
        let js = [self.j_a, self.j_b, self.j_beta];
        let mut trip = Vec::new();
        for m_a in self.j_a.projections() {
            for m_b in self.j_b.projections() {
                for m_c in self.j_beta.projections() {
                    let ms = [m_a, m_b, m_c];
                    let col = self.product_index(m_a, m_b, m_c);
                    for x in 0..3 {
                        let (new_m, amp) = ladder(js[x], ms[x], sense);
                        if amp == 0.0 {
                            continue;
                        }
                        let mut out = ms;
                        out[x] = new_m;
                        let row = self.product_index(out[0], out[1], out[2]);
                        trip.push((row, col, coeffs[x] * amp));
                    }
                }
            }
        }
        SparseOp::from_triplets(BasisId::Plain(self.dim()), self.dim(), trip)
            .expect("ladder keeps indices in range")
    }
}

/// Raising or lowering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Raise,
    Lower,
}

impl Sense {
    pub fn flip(self) -> Self {
        match self {
            Sense::Raise => Sense::Lower,
            Sense::Lower => Sense::Raise,
        }
    }
}

/// `j^± |j m⟩ = √(j(j+1) − m(m±1)) |j m±1⟩`; returns the new projection and
/// the (possibly zero) amplitude.
pub fn ladder(j: HalfInt, m: HalfInt, sense: Sense) -> (HalfInt, f64) {
    let (jv, mv) = (j.value(), m.value());
    match sense {
        Sense::Raise => {
            if m.twice() >= j.twice() {
                (m, 0.0)
            } else {
                (m + HalfInt::ONE, (jv * (jv + 1.0) - mv * (mv + 1.0)).sqrt())
            }
        }
        Sense::Lower => {
            if m.twice() <= -j.twice() {
                (m, 0.0)
            } else {
                (m - HalfInt::ONE, (jv * (jv + 1.0) - mv * (mv - 1.0)).sqrt())
            }
        }
    }
}
