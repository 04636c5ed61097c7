use serde::Serialize;

use super::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::spin_algebra::{CoupledBasis, HalfInt};

/// Observables diagonal in the coupled basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasuredObservable {
    /// `J_T²`; outcomes labelled by `J_T`.
    TotalSpinSquared,
    /// `J_Tᶻ`; outcomes labelled by `μ`.
    TotalSpinZ,
}

fn outcome_of(basis: &CoupledBasis, i: usize, obs: MeasuredObservable) -> HalfInt {
    let s = basis.state(i);
    match obs {
        MeasuredObservable::TotalSpinSquared => s.total,
        MeasuredObservable::TotalSpinZ => s.mu,
    }
}

/// Born probability of `keep` and the renormalised post-measurement state.
pub fn projective_measure(
    rho: &DensityMatrix,
    basis: &CoupledBasis,
    observable: MeasuredObservable,
    keep: HalfInt,
) -> Result<(f64, DensityMatrix)> {
    rho.check_basis(basis.id(), basis.dim())?;
    let idx: Vec<usize> = (0..basis.dim())
        .filter(|&i| outcome_of(basis, i, observable) == keep)
        .collect();
    let p: f64 = idx.iter().map(|&i| rho.matrix()[(i, i)].re).sum();
    if idx.is_empty() || p <= 1e-14 {
        return Err(Error::ZeroProbability(format!("{observable:?} = {keep}")));
    }
    rho.project_onto(&idx)
}

/// Probabilities of every outcome with non-empty eigenspace, in increasing
/// outcome order.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    basis: &CoupledBasis,
    observable: MeasuredObservable,
) -> Result<Vec<(HalfInt, f64)>> {
    rho.check_basis(basis.id(), basis.dim())?;
    let mut out: Vec<(HalfInt, f64)> = Vec::new();
    for i in 0..basis.dim() {
        let o = outcome_of(basis, i, observable);
        let p = rho.matrix()[(i, i)].re;
        match out.iter_mut().find(|(k, _)| *k == o) {
            Some(e) => e.1 += p,
            None => out.push((o, p)),
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}
