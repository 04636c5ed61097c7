//! Block-diagonal representation of ρ for graded models.
//!
//! With a charge `q` that every jump shifts by a constant, the blocks
//! `ρ_{ij}` with `q_i = q_j` evolve among themselves. Only those are kept.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::integrator::OdeState;
use super::lindblad::{charge_shift, LindbladModel, ScaledJump};
use crate::error::{Error, Result};

/// One dense block per charge sector.
#[derive(Clone, Debug, PartialEq)]
pub(super) struct Blocks(pub Vec<DMatrix<C64>>);

impl OdeState for Blocks {
    fn zeros_like(&self) -> Self {
        Blocks(self.0.iter().map(|b| DMatrix::zeros(b.nrows(), b.ncols())).collect())
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, x) in self.0.iter_mut().zip(&x.0) {
            s.axpy(a, x);
        }
    }

    fn copy_from(&mut self, other: &Self) {
        for (s, o) in self.0.iter_mut().zip(&other.0) {
            s.copy_from(o);
        }
    }

    fn set_scaled(&mut self, a: f64, x: &Self) {
        for (s, x) in self.0.iter_mut().zip(&x.0) {
            s.set_scaled(a, x);
        }
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, rtol: f64, atol: f64) -> f64 {
        let mut n = 0usize;
        let mut s = 0.0;
        for ((e, a), b) in err.0.iter().zip(&y0.0).zip(&y1.0) {
            n += e.len();
            for ((e, a), b) in e.iter().zip(a.iter()).zip(b.iter()) {
                let sc = atol + rtol * a.norm().max(b.norm());
                s += e.norm_sqr() / (sc * sc);
            }
        }
        (s / n.max(1) as f64).sqrt()
    }
}

/// Rectangular CSR matrix.
#[derive(Clone, Debug)]
struct Csr {
    nrows: usize,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<C64>,
}

impl Csr {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let mut ptr = vec![0];
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    idx.push(c);
                    val.push(v);
                }
            }
            ptr.push(idx.len());
        }
        Self {
            nrows: m.nrows(),
            ptr,
            idx,
            val,
        }
    }
}

/// A block of an operator, stored dense or sparse by fill.
#[derive(Clone, Debug)]
enum BlockOp {
    Dense(DMatrix<C64>, DMatrix<C64>),
    Sparse(Csr),
}

impl BlockOp {
    fn new(m: DMatrix<C64>) -> Self {
        let nnz = m.iter().filter(|v| **v != C64::new(0.0, 0.0)).count();
        if (nnz as f64) < 0.25 * m.len() as f64 {
            BlockOp::Sparse(Csr::from_dense(&m))
        } else {
            let a = m.adjoint();
            BlockOp::Dense(m, a)
        }
    }

    /// `out = A·m`, or `out += A·m` when `accumulate`.
    fn left_into(&self, m: &DMatrix<C64>, out: &mut DMatrix<C64>, accumulate: bool) {
        match self {
            BlockOp::Dense(a, _) => {
                let beta = if accumulate { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                out.gemm(C64::new(1.0, 0.0), a, m, beta);
            }
            BlockOp::Sparse(a) => {
                if !accumulate {
                    out.fill(C64::new(0.0, 0.0));
                }
                let k = m.ncols();
                let (mr, or) = (m.nrows(), a.nrows);
                let ms = m.as_slice();
                let os = out.as_mut_slice();
                for j in 0..k {
                    let mc = &ms[j * mr..(j + 1) * mr];
                    let oc = &mut os[j * or..(j + 1) * or];
                    for r in 0..or {
                        let mut acc = C64::new(0.0, 0.0);
                        for p in a.ptr[r]..a.ptr[r + 1] {
                            acc += a.val[p] * mc[a.idx[p]];
                        }
                        oc[r] += acc;
                    }
                }
            }
        }
    }

    /// `out += m·A†`.
    fn right_adjoint_acc(&self, m: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        match self {
            BlockOp::Dense(_, ad) => out.gemm(C64::new(1.0, 0.0), m, ad, C64::new(1.0, 0.0)),
            BlockOp::Sparse(a) => {
                let k = m.nrows();
                let ms = m.as_slice();
                let os = out.as_mut_slice();
                // (m A†)[:, r] = Σ_c m[:, c] conj(A[r, c])
                for r in 0..a.nrows {
                    for p in a.ptr[r]..a.ptr[r + 1] {
                        let w = a.val[p].conj();
                        let c = a.idx[p];
                        let src = &ms[c * k..(c + 1) * k];
                        let dst = &mut os[r * k..(r + 1) * k];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += w * s;
                        }
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum BlockJump {
    /// Per-sector diagonal of `√γ L`.
    Diagonal(Vec<Vec<C64>>),
    /// `(source, target, √γ L_block)`.
    Shift(Vec<(usize, usize, BlockOp)>),
}

/// A graded model split into sector blocks.
#[derive(Clone, Debug)]
pub(super) struct BlockedModel {
    /// Basis indices of each sector, in increasing charge.
    pub sectors: Vec<Vec<usize>>,
    /// `(sector, offset)` of every basis index.
    pub position: Vec<(usize, usize)>,
    g: Vec<BlockOp>,
    jumps: Vec<BlockJump>,
}

impl BlockedModel {
    pub fn new(model: &LindbladModel) -> Result<Self> {
        let q = model
            .grading
            .as_ref()
            .ok_or_else(|| Error::Input("model has no grading".into()))?;
        let mut by_charge: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, &c) in q.iter().enumerate() {
            by_charge.entry(c).or_default().push(i);
        }
        let charges: Vec<i32> = by_charge.keys().copied().collect();
        let sectors: Vec<Vec<usize>> = by_charge.into_values().collect();
        let mut position = vec![(0, 0); q.len()];
        for (s, idx) in sectors.iter().enumerate() {
            for (k, &i) in idx.iter().enumerate() {
                position[i] = (s, k);
            }
        }
        let sector_of = |c: i32| charges.binary_search(&c).ok();

        let mut g: Vec<DMatrix<C64>> = sectors.iter().map(|s| DMatrix::zeros(s.len(), s.len())).collect();
        for (r, c, v) in model.effective.entries() {
            let (sr, kr) = position[r];
            let (sc, kc) = position[c];
            if sr != sc {
                return Err(Error::Numerical("effective operator mixes sectors".into()));
            }
            g[sr][(kr, kc)] += v;
        }
        let g = g.into_iter().map(BlockOp::new).collect();

        let mut jumps = Vec::with_capacity(model.scaled.len());
        for sj in &model.scaled {
            jumps.push(match sj {
                ScaledJump::Diagonal(d) => BlockJump::Diagonal(
                    sectors.iter().map(|idx| idx.iter().map(|&i| d[i]).collect()).collect(),
                ),
                ScaledJump::General(op) => {
                    let mut blocks = Vec::new();
                    let shift = charge_shift(op, q)?;
                    for (src, idx) in sectors.iter().enumerate() {
                        let Some(shift) = shift else { break };
                        let Some(dst) = sector_of(charges[src] + shift) else {
                            continue;
                        };
                        let mut m = DMatrix::zeros(sectors[dst].len(), idx.len());
                        let mut any = false;
                        for &r in &sectors[dst] {
                            for (c, v) in op.row(r) {
                                let (sc, kc) = position[c];
                                if sc == src {
                                    m[(position[r].1, kc)] += v;
                                    any = true;
                                }
                            }
                        }
                        if any {
                            blocks.push((src, dst, BlockOp::new(m)));
                        }
                    }
                    BlockJump::Shift(blocks)
                }
            });
        }
        Ok(Self {
            sectors,
            position,
            g,
            jumps,
        })
    }

    /// Number of stored complex entries.
    pub fn block_len(&self) -> usize {
        self.sectors.iter().map(|s| s.len() * s.len()).sum()
    }

    pub fn zeros(&self) -> Blocks {
        Blocks(self.sectors.iter().map(|s| DMatrix::zeros(s.len(), s.len())).collect())
    }

    /// Splits a dense ρ; fails if it has weight outside the blocks.
    pub fn split(&self, rho: &DMatrix<C64>) -> Result<Blocks> {
        let mut out = self.zeros();
        let scale = rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for c in 0..rho.ncols() {
            let (sc, kc) = self.position[c];
            for r in 0..rho.nrows() {
                let (sr, kr) = self.position[r];
                let v = rho[(r, c)];
                if sr == sc {
                    out.0[sr][(kr, kc)] = v;
                } else if v.norm() > 1e-14 * scale.max(1e-300) {
                    return Err(Error::Input("state has coherences between grading sectors".into()));
                }
            }
        }
        Ok(out)
    }

    pub fn join(&self, b: &Blocks) -> DMatrix<C64> {
        let n = self.position.len();
        let mut out = DMatrix::zeros(n, n);
        for (s, idx) in self.sectors.iter().enumerate() {
            for (kc, &c) in idx.iter().enumerate() {
                for (kr, &r) in idx.iter().enumerate() {
                    out[(r, c)] = b.0[s][(kr, kc)];
                }
            }
        }
        out
    }

    /// Scratch buffers for [`rhs_into`](Self::rhs_into).
    pub fn scratch(&self) -> Vec<DMatrix<C64>> {
        let mut v = Vec::new();
        for j in &self.jumps {
            if let BlockJump::Shift(blocks) = j {
                for (src, dst, _) in blocks {
                    v.push(DMatrix::zeros(self.sectors[*dst].len(), self.sectors[*src].len()));
                }
            }
        }
        v
    }

    pub fn rhs_into(&self, rho: &Blocks, out: &mut Blocks, scratch: &mut [DMatrix<C64>]) {
        for s in 0..self.sectors.len() {
            let o = &mut out.0[s];
            self.g[s].left_into(&rho.0[s], o, false);
            self.g[s].right_adjoint_acc(&rho.0[s], o);
            o.neg_mut();
        }
        let mut k = 0;
        for j in &self.jumps {
            match j {
                BlockJump::Diagonal(d) => {
                    for (s, ds) in d.iter().enumerate() {
                        let r = &rho.0[s];
                        let o = &mut out.0[s];
                        let n = ds.len();
                        for c in 0..n {
                            let dc = ds[c].conj();
                            for rr in 0..n {
                                o[(rr, c)] += ds[rr] * r[(rr, c)] * dc;
                            }
                        }
                    }
                }
                BlockJump::Shift(blocks) => {
                    for (src, dst, m) in blocks {
                        let t = &mut scratch[k];
                        k += 1;
                        m.left_into(&rho.0[*src], t, false);
                        m.right_adjoint_acc(t, &mut out.0[*dst]);
                    }
                }
            }
        }
    }
}

/// Steady state `L(ρ) = 0`, `Tr ρ = 1` of a graded model, solved directly
/// on the block entries. Fails if the steady state is not unique.
pub(super) fn steady_blocks(bm: &BlockedModel, max_unknowns: usize) -> Result<Blocks> {
    let n = bm.block_len();
    if n > max_unknowns {
        return Err(Error::Resource {
            what: "steady-state unknowns",
            dim: n,
            cap: max_unknowns,
        });
    }
    // column k of the superoperator is L(E_k)
    let mut offsets = Vec::with_capacity(bm.sectors.len());
    let mut acc = 0;
    for s in &bm.sectors {
        offsets.push(acc);
        acc += s.len() * s.len();
    }
    let flat = |b: &Blocks, col: &mut [C64]| {
        for (s, m) in b.0.iter().enumerate() {
            col[offsets[s]..offsets[s] + m.len()].copy_from_slice(m.as_slice());
        }
    };
    let mut sup = DMatrix::<C64>::zeros(n, n);
    let mut unit = bm.zeros();
    let mut out = bm.zeros();
    let mut scratch = bm.scratch();
    for (s, sec) in bm.sectors.iter().enumerate() {
        let d = sec.len();
        for k in 0..d * d {
            unit.0[s].as_mut_slice()[k] = C64::new(1.0, 0.0);
            bm.rhs_into(&unit, &mut out, &mut scratch);
            unit.0[s].as_mut_slice()[k] = C64::new(0.0, 0.0);
            flat(&out, sup.column_mut(offsets[s] + k).as_mut_slice());
        }
    }
    // the diagonal rows are linearly dependent (trace is conserved); replace
    // the first with the normalisation condition
    let mut rhs = nalgebra::DVector::<C64>::zeros(n);
    sup.row_mut(0).fill(C64::new(0.0, 0.0));
    for (s, sec) in bm.sectors.iter().enumerate() {
        for k in 0..sec.len() {
            sup[(0, offsets[s] + k * sec.len() + k)] = C64::new(1.0, 0.0);
        }
    }
    rhs[0] = C64::new(1.0, 0.0);
    let check = sup.clone();
    let x = sup
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("steady state is not unique (singular Liouvillian)".into()))?;
    let resid = (&check * &x - &rhs).norm();
    if !resid.is_finite() || resid > 1e-8 {
        return Err(Error::Numerical(format!(
            "steady-state solve is ill-conditioned (residual {resid:.2e})"
        )));
    }
    let mut b = bm.zeros();
    for (s, m) in b.0.iter_mut().enumerate() {
        let len = m.len();
        m.as_mut_slice().copy_from_slice(&x.as_slice()[offsets[s]..offsets[s] + len]);
    }
    Ok(b)
}
