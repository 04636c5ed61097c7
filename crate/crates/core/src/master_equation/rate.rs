//! Secular (rate-equation) limit of the pump dynamics.
//!
//! When lowering is much faster than raising, every raise is immediately
//! followed by a cascade of lowering jumps back to the extremal state of the
//! new multiplet. The dynamics then reduce to a classical master equation on
//! the populations `P(J_T, λ)` of the extremal states `|J_T, −J_T, λ⟩`, with
//! rates `Λ_i |χ|²` taken from the transition tables.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::integrator::{integrate, StepPolicy};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::spin_algebra::{ExtremalLabel, HalfInt, TransitionTable};

#[derive(Clone, Debug)]
pub struct RateModel {
    labels: Vec<ExtremalLabel>,
    index: HashMap<ExtremalLabel, usize>,
    // dp/dt = generator · p
    generator: DMatrix<f64>,
}

impl RateModel {
    /// Builds the generator from `(rate, table)` channels over the given
    /// extremal labels.
    pub fn from_tables(labels: Vec<ExtremalLabel>, channels: &[(f64, &TransitionTable)]) -> Result<Self> {
        let index: HashMap<ExtremalLabel, usize> =
            labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let n = labels.len();
        let mut generator = DMatrix::zeros(n, n);
        for &(rate, table) in channels {
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::Input(format!("negative or non-finite rate {rate}")));
            }
            for (from, to, amp) in table.iter() {
                let (Some(&i), Some(&f)) = (index.get(&from), index.get(&to)) else {
                    return Err(Error::BasisMismatch(format!(
                        "transition {from:?} -> {to:?} leaves the label set"
                    )));
                };
                let r = rate * amp.norm_sqr();
                if i != f {
                    generator[(f, i)] += r;
                    generator[(i, i)] -= r;
                }
            }
        }
        Ok(Self {
            labels,
            index,
            generator,
        })
    }

    /// Builds a model from an explicit list of `(from, to, rate)` transitions.
    pub fn from_rates(labels: Vec<ExtremalLabel>, rates: &[(usize, usize, f64)]) -> Result<Self> {
        let n = labels.len();
        let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let mut generator = DMatrix::zeros(n, n);
        for &(i, f, r) in rates {
            if r < 0.0 || !r.is_finite() {
                return Err(Error::Input(format!("negative or non-finite rate {r}")));
            }
            if i >= n || f >= n {
                return Err(Error::Input(format!("transition {i} -> {f} outside {n} states")));
            }
            if i != f {
                generator[(f, i)] += r;
                generator[(i, i)] -= r;
            }
        }
        Ok(Self {
            labels,
            index,
            generator,
        })
    }

    pub fn labels(&self) -> &[ExtremalLabel] {
        &self.labels
    }

    pub fn index_of(&self, l: &ExtremalLabel) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Distinct total spins, increasing.
    pub fn totals(&self) -> Vec<HalfInt> {
        let mut t: Vec<HalfInt> = self.labels.iter().map(|l| l.total).collect();
        t.sort();
        t.dedup();
        t
    }

    /// Populations summed over λ for each total spin, in [`Self::totals`] order.
    pub fn sector_populations(&self, p: &[f64]) -> Vec<(HalfInt, f64)> {
        self.totals()
            .into_iter()
            .map(|tot| {
                let s = self
                    .labels
                    .iter()
                    .zip(p)
                    .filter(|(l, _)| l.total == tot)
                    .map(|(_, v)| v)
                    .sum();
                (tot, s)
            })
            .collect()
    }

    /// Largest component of `generator · p`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let v = &self.generator * DVector::from_column_slice(p);
        v.amax()
    }

    /// Normalised null vector of the generator.
    pub fn steady_state(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut a = self.generator.clone();
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numerical("rate generator has no unique steady state".into()))?;
        if sol.iter().any(|&p| !p.is_finite() || p < -1e-9) || self.residual(sol.as_slice()) > 1e-9 * self.generator.amax().max(1.0) {
            return Err(Error::Numerical("rate generator has no unique steady state".into()));
        }
        let mut p: Vec<f64> = sol.iter().map(|&p| p.max(0.0)).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        Ok(p)
    }
}

/// Trajectory plus the final population vector.
#[derive(Clone, Debug)]
pub struct RateEvolution {
    pub trajectory: Trajectory,
    pub final_populations: Vec<f64>,
}

/// Column name used for the population of total spin `j`.
pub fn sector_name(j: HalfInt) -> String {
    format!("P_J{j}")
}

/// Integrates the classical master equation and records sector populations
/// `P_J<j>` at `n_samples` uniform times in `(0, t_final]` (plus `t = 0`).
pub fn rate_equation_evolve(
    model: &RateModel,
    p0: &[f64],
    t_final: f64,
    n_samples: usize,
) -> Result<RateEvolution> {
    if p0.len() != model.dim() {
        return Err(Error::BasisMismatch(format!(
            "{} populations for {} extremal states",
            p0.len(),
            model.dim()
        )));
    }
    if p0.iter().any(|&p| p < 0.0) || (p0.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Input("initial populations must be non-negative and sum to 1".into()));
    }
    let totals = model.totals();
    let mut traj = Trajectory::new(totals.iter().map(|&j| sector_name(j)).collect());
    let sectors = |p: &[f64]| model.sector_populations(p).into_iter().map(|(_, v)| v).collect();
    traj.push(0.0, sectors(p0))?;
    if t_final <= 0.0 {
        return Ok(RateEvolution {
            trajectory: traj,
            final_populations: p0.to_vec(),
        });
    }
    let n = n_samples.max(1);
    let times: Vec<f64> = (1..=n).map(|k| t_final * k as f64 / n as f64).collect();
    let w = &model.generator;
    let (p, _) = integrate(
        |_, y: &Vec<f64>, dy: &mut Vec<f64>| {
            let v = w * DVector::from_column_slice(y);
            dy.copy_from_slice(v.as_slice());
        },
        0.0,
        &p0.to_vec(),
        &times,
        StepPolicy::adaptive(1e-10, 1e-13),
        |t, y| traj.push(t, sectors(y)),
    )?;
    Ok(RateEvolution {
        trajectory: traj,
        final_populations: p,
    })
}
