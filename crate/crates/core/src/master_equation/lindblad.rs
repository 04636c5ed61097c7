use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::blocked::{steady_blocks, BlockedModel, Blocks};
use super::density::DensityMatrix;
use super::integrator::{integrate, IntegratorStats, StepPolicy};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::sparse::{BasisId, SparseOp};

#[derive(Clone, Debug)]
pub struct Jump {
    pub label: String,
    pub rate: f64,
    pub op: SparseOp,
}

/// Jump-only Lindbladian (plus an optional Hamiltonian):
/// `ρ̇ = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k† L_k, ρ})`.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub(super) basis: BasisId,
    pub(super) dim: usize,
    jumps: Vec<Jump>,
    hamiltonian: Option<SparseOp>,
    // √γ L for each jump; diagonal jumps keep only their diagonal
    pub(super) scaled: Vec<ScaledJump>,
    // G = ½ Σ γ L†L + iH, so that ρ̇ = Σ γ LρL† − Gρ − ρG†
    pub(super) effective: SparseOp,
    // conserved charge per basis state; every jump shifts it by a constant
    pub(super) grading: Option<Vec<i32>>,
}

#[derive(Clone, Debug)]
pub(super) enum ScaledJump {
    Diagonal(Vec<C64>),
    General(SparseOp),
}

impl LindbladModel {
    pub fn new(basis: BasisId, dim: usize) -> Self {
        Self {
            basis,
            dim,
            jumps: Vec::new(),
            hamiltonian: None,
            scaled: Vec::new(),
            effective: SparseOp::from_triplets(basis, dim, std::iter::empty()).expect("empty"),
            grading: None,
        }
    }

    /// Declares an integer charge per basis state (e.g. `2μ`) such that each
    /// jump changes it by a fixed amount and the Hamiltonian conserves it.
    /// States that start block-diagonal in the charge then stay so, and
    /// [`evolve`] and [`steady_state`](super::steady_state) work block by
    /// block.
    pub fn set_grading(&mut self, charges: Vec<i32>) -> Result<()> {
        if charges.len() != self.dim {
            return Err(Error::BasisMismatch(format!(
                "{} charges for dimension {}",
                charges.len(),
                self.dim
            )));
        }
        for j in &self.jumps {
            charge_shift(&j.op, &charges).map_err(|e| relabel(e, &j.label))?;
        }
        if let Some(h) = &self.hamiltonian {
            if charge_shift(h, &charges)?.unwrap_or(0) != 0 {
                return Err(Error::Input("the Hamiltonian does not conserve the grading".into()));
            }
        }
        self.grading = Some(charges);
        Ok(())
    }

    pub fn with_grading(mut self, charges: Vec<i32>) -> Result<Self> {
        self.set_grading(charges)?;
        Ok(self)
    }

    pub fn grading(&self) -> Option<&[i32]> {
        self.grading.as_deref()
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn hamiltonian(&self) -> Option<&SparseOp> {
        self.hamiltonian.as_ref()
    }

    fn check(&self, op: &SparseOp) -> Result<()> {
        if op.basis() != self.basis || op.dim() != self.dim {
            return Err(Error::BasisMismatch(format!(
                "operator on {} (dim {}) added to model on {} (dim {})",
                op.basis(),
                op.dim(),
                self.basis,
                self.dim
            )));
        }
        Ok(())
    }

    pub fn add_jump(&mut self, label: impl Into<String>, rate: f64, op: SparseOp) -> Result<()> {
        let label: String = label.into();
        self.check(&op)?;
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::Input(format!("jump rate must be non-negative, got {rate}")));
        }
        if let Some(q) = &self.grading {
            charge_shift(&op, q).map_err(|e| relabel(e, &label))?;
        }
        let ltl = op.adjoint().matmul(&op)?;
        self.effective = self.effective.add(&ltl.scaled(C64::new(0.5 * rate, 0.0)))?;
        let s = rate.sqrt();
        let is_diagonal = op.entries().all(|(r, c, _)| r == c);
        self.scaled.push(if is_diagonal {
            let mut d = vec![C64::new(0.0, 0.0); self.dim];
            for (r, _, v) in op.entries() {
                d[r] = v * s;
            }
            ScaledJump::Diagonal(d)
        } else {
            ScaledJump::General(op.scaled(C64::new(s, 0.0)))
        });
        self.jumps.push(Jump {
            label,
            rate,
            op,
        });
        Ok(())
    }

    pub fn with_jump(mut self, label: impl Into<String>, rate: f64, op: SparseOp) -> Result<Self> {
        self.add_jump(label, rate, op)?;
        Ok(self)
    }

    pub fn set_hamiltonian(&mut self, h: SparseOp) -> Result<()> {
        self.check(&h)?;
        if let Some(q) = &self.grading {
            if charge_shift(&h, q)?.unwrap_or(0) != 0 {
                return Err(Error::Input("the Hamiltonian does not conserve the grading".into()));
            }
        }
        if let Some(old) = self.hamiltonian.take() {
            self.effective = self.effective.add(&old.scaled(C64::new(0.0, -1.0)))?;
        }
        self.effective = self.effective.add(&h.scaled(C64::new(0.0, 1.0)))?;
        self.hamiltonian = Some(h);
        Ok(())
    }

    /// `U L U†` for every jump (and `U H U†`).
    pub fn conjugated(&self, u: &SparseOp) -> Result<Self> {
        self.check(u)?;
        let ud = u.adjoint();
        let mut out = LindbladModel::new(self.basis, self.dim);
        for j in &self.jumps {
            out.add_jump(j.label.clone(), j.rate, u.matmul(&j.op)?.matmul(&ud)?)?;
        }
        if let Some(h) = &self.hamiltonian {
            out.set_hamiltonian(u.matmul(h)?.matmul(&ud)?)?;
        }
        if let Some(q) = &self.grading {
            if charge_shift(u, q).ok().flatten().unwrap_or(0) == 0 {
                out.set_grading(q.clone())?;
            }
        }
        Ok(out)
    }

    /// Writes `dρ/dt` into `out`; `scratch` must be `dim × dim`.
    pub(crate) fn rhs_into(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, scratch: &mut DMatrix<C64>) {
        let n = self.dim;
        // −Gρ − ρG†; ρ is not assumed exactly Hermitian
        self.effective.mul_dense_into(rho, out, false);
        self.effective.mul_dense_adjoint_into(rho, out);
        out.neg_mut();
        for jump in &self.scaled {
            match jump {
                ScaledJump::Diagonal(d) => {
                    let r = rho.as_slice();
                    let o = out.as_mut_slice();
                    for j in 0..n {
                        let dj = d[j].conj();
                        if dj == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for i in 0..n {
                            o[j * n + i] += d[i] * r[j * n + i] * dj;
                        }
                    }
                }
                ScaledJump::General(l) => {
                    l.mul_dense_into(rho, scratch, false);
                    l.mul_dense_adjoint_into(scratch, out);
                }
            }
        }
    }
}

/// The constant charge change of `op`, or `None` for the zero operator.
pub(super) fn charge_shift(op: &SparseOp, q: &[i32]) -> Result<Option<i32>> {
    let mut shift = None;
    for (r, c, _) in op.entries() {
        let d = q[r] - q[c];
        match shift {
            None => shift = Some(d),
            Some(s) if s != d => {
                return Err(Error::Input(format!(
                    "operator changes the grading by both {s} and {d}"
                )))
            }
            _ => {}
        }
    }
    Ok(shift)
}

fn relabel(e: Error, label: &str) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("jump '{label}': {m}")),
        e => e,
    }
}

/// `dρ/dt` for a model and state on the same basis.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<DMatrix<C64>> {
    rho.check_basis(model.basis, model.dim)?;
    let mut out = DMatrix::zeros(model.dim, model.dim);
    let mut scratch = DMatrix::zeros(model.dim, model.dim);
    model.rhs_into(rho.matrix(), &mut out, &mut scratch);
    Ok(out)
}

/// What to record along a trajectory.
#[derive(Clone, Debug)]
pub enum Observable {
    /// `Σ_{i ∈ set} ρ_ii`.
    Population { name: String, indices: Vec<usize> },
    /// `Re Tr(ρ O)`.
    Expectation { name: String, op: SparseOp },
}

impl Observable {
    pub fn name(&self) -> &str {
        match self {
            Observable::Population { name, .. } | Observable::Expectation { name, .. } => name,
        }
    }

    pub fn evaluate(&self, rho: &DMatrix<C64>) -> f64 {
        match self {
            Observable::Population { indices, .. } => indices.iter().map(|&i| rho[(i, i)].re).sum(),
            Observable::Expectation { op, .. } => op
                .entries()
                .map(|(r, c, v)| v * rho[(c, r)])
                .sum::<C64>()
                .re,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub policy: StepPolicy,
    /// Samples on a uniform grid over `(0, t_final]`; `t = 0` is always
    /// recorded too.
    pub n_samples: usize,
    /// Diagonalise ρ at every sample to monitor positivity.
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            policy: StepPolicy::default(),
            n_samples: 20,
            check_positivity: true,
        }
    }
}

/// Invariant monitors collected at every sample point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Monitors {
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    /// `+∞` when positivity was not checked.
    pub min_eigenvalue: f64,
    pub stats: IntegratorStats,
}

impl Monitors {
    pub const EIGENVALUE_FLOOR: f64 = -1e-9;

    pub fn positivity_violated(&self) -> bool {
        self.min_eigenvalue < Self::EIGENVALUE_FLOOR
    }
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub trajectory: Trajectory,
    pub final_state: DensityMatrix,
    pub monitors: Monitors,
}

pub fn evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    opts: &EvolveOptions,
    observables: &[Observable],
) -> Result<Evolution> {
    rho0.check_basis(model.basis, model.dim)?;
    if !(t_final > 0.0) {
        return Err(Error::Input(format!("t_final must be positive, got {t_final}")));
    }
    let n_samples = opts.n_samples.max(1);
    let times: Vec<f64> = (1..=n_samples)
        .map(|k| t_final * k as f64 / n_samples as f64)
        .collect();
    let names: Vec<String> = observables.iter().map(|o| o.name().to_string()).collect();
    let mut traj = Trajectory::new(names);
    let trace0 = rho0.trace().re;
    let mut monitors = Monitors {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };

    let record = |t: f64,
                  rho: &DMatrix<C64>,
                  min_eig: &dyn Fn() -> f64,
                  traj: &mut Trajectory,
                  monitors: &mut Monitors|
     -> Result<()> {
        let state = DensityMatrix::from_matrix(model.basis, rho.clone())?;
        monitors.max_trace_drift = monitors.max_trace_drift.max((state.trace().re - trace0).abs());
        monitors.max_hermiticity_error = monitors.max_hermiticity_error.max(state.hermiticity_error());
        if opts.check_positivity {
            monitors.min_eigenvalue = monitors.min_eigenvalue.min(min_eig());
        }
        traj.push(t, observables.iter().map(|o| o.evaluate(rho)).collect())
    };
    record(0.0, rho0.matrix(), &|| rho0.min_eigenvalue(), &mut traj, &mut monitors)?;

    let blocked = match model.grading {
        Some(_) => {
            let bm = BlockedModel::new(model)?;
            match bm.split(rho0.matrix()) {
                Ok(b) => Some((bm, b)),
                Err(_) => {
                    log::debug!("initial state is not block-diagonal in the grading; using dense evolution");
                    None
                }
            }
        }
        None => None,
    };

    let (rho, stats) = if let Some((bm, b0)) = blocked {
        let mut scratch = bm.scratch();
        let block_min = |b: &Blocks| {
            b.0.iter()
                .filter(|m| m.nrows() > 0)
                .map(|m| hermitian_min_eigenvalue(m))
                .fold(f64::INFINITY, f64::min)
        };
        let (b, stats) = integrate(
            |_, y: &Blocks, dy: &mut Blocks| bm.rhs_into(y, dy, &mut scratch),
            0.0,
            &b0,
            &times,
            opts.policy,
            |t, y| record(t, &bm.join(y), &|| block_min(y), &mut traj, &mut monitors),
        )?;
        (bm.join(&b), stats)
    } else {
        let mut scratch = DMatrix::zeros(model.dim, model.dim);
        integrate(
            |_, y: &DMatrix<C64>, dy: &mut DMatrix<C64>| model.rhs_into(y, dy, &mut scratch),
            0.0,
            rho0.matrix(),
            &times,
            opts.policy,
            |t, y| {
                let min = || hermitian_min_eigenvalue(y);
                record(t, y, &min, &mut traj, &mut monitors)
            },
        )?
    };
    monitors.stats = stats;
    if monitors.positivity_violated() {
        log::warn!(
            "density matrix eigenvalue {:.3e} below the floor {:.0e}",
            monitors.min_eigenvalue,
            Monitors::EIGENVALUE_FLOOR
        );
    }
    Ok(Evolution {
        trajectory: traj,
        final_state: DensityMatrix::from_matrix(model.basis, rho)?,
        monitors,
    })
}

fn hermitian_min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// The unique steady state of `model`, found by a direct linear solve.
///
/// Uses the model's grading when present, so the number of unknowns is
/// `Σ_s n_s²` over charge sectors rather than `dim²`.
pub fn steady_state(model: &LindbladModel) -> Result<DensityMatrix> {
    const MAX_UNKNOWNS: usize = 4096;
    let graded;
    let m = if model.grading.is_some() {
        model
    } else {
        graded = model.clone().with_grading(vec![0; model.dim])?;
        &graded
    };
    let bm = BlockedModel::new(m)?;
    let b = steady_blocks(&bm, MAX_UNKNOWNS)?;
    let mut rho = bm.join(&b);
    // symmetrise away solver roundoff
    rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::from_matrix(model.basis, rho)
}
