//! Explicit `2^N` computational-basis simulation: noisy simplified-scheme
//! pumping, phase encoding, and entanglement/fidelity diagnostics.
//!
//! Qubit `k` is bit `N−1−k` of the basis index, so `|q₀q₁…⟩` reads left to
//! right. `|1⟩` is spin up (`Iᶻ = +½`), `|0⟩` spin down; `σ⁺ = |1⟩⟨0|`.
//! Subgroup A is qubits `0..N/2`, B the rest.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::master_equation::{evolve, DensityMatrix, EvolveOptions, LindbladModel};
use crate::pump_protocols::{PumpConfig, Scheme};
use crate::sparse::{BasisId, SparseOp};
use crate::spin_algebra::{clebsch_gordan, HalfInt, Sense};

/// Largest register for state vectors.
pub const PURE_STATE_CAP: usize = 14;
/// Largest register for density-matrix evolution.
pub const DENSITY_CAP: usize = 10;

fn check_size(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::Resource {
            what: "qubits",
            dim: n,
            cap,
        });
    }
    Ok(())
}

#[inline]
fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[inline]
fn mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Normalised state vector over `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Normalises `amplitudes`; errors on a zero vector or wrong length.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_cap(n_qubits, amplitudes, PURE_STATE_CAP)
    }

    /// As [`PureState::new`] with a caller-chosen qubit cap.
    pub fn with_cap(n_qubits: usize, amplitudes: Vec<C64>, cap: usize) -> Result<Self> {
        check_size(n_qubits, cap)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Input(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Input("state vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            n_qubits,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut a = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        *a.get_mut(index)
            .ok_or_else(|| Error::Input(format!("index {index} outside {n_qubits} qubits")))? = C64::new(1.0, 0.0);
        Self::new(n_qubits, a)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn basis(&self) -> BasisId {
        BasisId::Qubits(self.n_qubits)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::BasisMismatch(format!(
                "{} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self.basis(), &self.amplitudes).expect("normalised state")
    }

    /// Relabels qubits: qubit `k` of the result is qubit `order[k]` of
    /// `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<PureState> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::Input(format!("{order:?} is not a permutation of {n} qubits")));
        }
        let mut out = vec![C64::new(0.0, 0.0); 1 << n];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let mut j = 0;
            for (k, &q) in order.iter().enumerate() {
                if bit(i, q, n) == 1 {
                    j |= mask(k, n);
                }
            }
            out[j] = a;
        }
        Ok(PureState {
            n_qubits: n,
            amplitudes: out,
        })
    }

    pub fn apply(&self, op: &SparseOp) -> Result<PureState> {
        if op.basis() != self.basis() {
            return Err(Error::BasisMismatch(format!("operator on {} applied to {}", op.basis(), self.basis())));
        }
        PureState::new(self.n_qubits, op.apply(&self.amplitudes))
    }
}

/// `Σ_n c_n σ_n^±`.
pub fn build_qubit_operators(n: usize, coeffs: &[C64], sense: Sense) -> Result<SparseOp> {
    check_size(n, PURE_STATE_CAP)?;
    if coeffs.len() != n {
        return Err(Error::Input(format!("{} coefficients for {n} qubits", coeffs.len())));
    }
    let mut trip = Vec::with_capacity(n << (n - 1));
    for idx in 0..1usize << n {
        for (q, &c) in coeffs.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let b = bit(idx, q, n);
            match sense {
                // σ⁺ |…0…⟩ = |…1…⟩
                Sense::Raise if b == 0 => trip.push((idx | mask(q, n), idx, c)),
                Sense::Lower if b == 1 => trip.push((idx & !mask(q, n), idx, c)),
                _ => {}
            }
        }
    }
    SparseOp::from_triplets(BasisId::Qubits(n), 1 << n, trip)
}

/// `Iᶻ` on qubit `k`.
pub fn qubit_iz(n: usize, k: usize) -> Result<SparseOp> {
    check_size(n, PURE_STATE_CAP)?;
    if k >= n {
        return Err(Error::Input(format!("qubit {k} outside {n}")));
    }
    let d: Vec<C64> = (0..1usize << n)
        .map(|i| C64::new(bit(i, k, n) as f64 - 0.5, 0.0))
        .collect();
    Ok(SparseOp::diagonal(BasisId::Qubits(n), &d))
}

/// `Ĵ²` of the collective spin of `qubits`.
pub fn collective_spin_squared(n: usize, qubits: &[usize]) -> Result<SparseOp> {
    let coeff: Vec<C64> = (0..n)
        .map(|q| C64::new(if qubits.contains(&q) { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let up = build_qubit_operators(n, &coeff, Sense::Raise)?;
    let down = build_qubit_operators(n, &coeff, Sense::Lower)?;
    let jz: Vec<C64> = (0..1usize << n)
        .map(|i| C64::new(qubits.iter().map(|&q| bit(i, q, n) as f64 - 0.5).sum(), 0.0))
        .collect();
    let jz2: Vec<C64> = jz.iter().map(|z| z * z + z).collect();
    // J² = J⁻J⁺ + Jz² + Jz
    down.matmul(&up)?.add(&SparseOp::diagonal(BasisId::Qubits(n), &jz2))
}

/// Number of excited qubits per basis state; conserved up to a fixed shift
/// by every pump and dephasing jump.
pub fn excitation_grading(n: usize) -> Vec<i32> {
    (0..1usize << n).map(|i| i.count_ones() as i32).collect()
}

/// Symmetric Dicke state of `n` qubits with `k` excitations.
fn dicke(n: usize, k: usize) -> Vec<(usize, f64)> {
    let states: Vec<usize> = (0..1usize << n).filter(|i| i.count_ones() as usize == k).collect();
    let a = 1.0 / (states.len() as f64).sqrt();
    states.into_iter().map(|i| (i, a)).collect()
}

/// `|J, μ, j_A, j_B⟩` with A the first `n_a` qubits and `j_A = n_a/2`,
/// `j_B = (n − n_a)/2` maximal.
pub fn coupled_qubit_state(n: usize, n_a: usize, j: HalfInt, mu: HalfInt) -> Result<PureState> {
    check_size(n, PURE_STATE_CAP)?;
    if n_a == 0 || n_a >= n {
        return Err(Error::Input(format!("subgroup A must hold 1..{n} qubits, got {n_a}")));
    }
    let n_b = n - n_a;
    let ja = HalfInt::from_twice(n_a as i32);
    let jb = HalfInt::from_twice(n_b as i32);
    if !HalfInt::triangle(ja, jb, j) || !mu.is_projection_of(j) {
        return Err(Error::Input(format!("|J={j}, μ={mu}⟩ not reachable with j_A={ja}, j_B={jb}")));
    }
    let mut amp = vec![C64::new(0.0, 0.0); 1 << n];
    for ma in ja.projections() {
        let mb = mu - ma;
        if !mb.is_projection_of(jb) {
            continue;
        }
        let cg = clebsch_gordan(ja, ma, jb, mb, j, mu);
        if cg == 0.0 {
            continue;
        }
        let ka = ((ma + ja).twice() / 2) as usize;
        let kb = ((mb + jb).twice() / 2) as usize;
        for (ia, aa) in dicke(n_a, ka) {
            for (ib, ab) in dicke(n_b, kb) {
                amp[(ia << n_b) | ib] += C64::new(cg * aa * ab, 0.0);
            }
        }
    }
    PureState::new(n, amp)
}

/// `|J, −J, N/4, N/4⟩`.
pub fn scs_state(n: usize, j: HalfInt) -> Result<PureState> {
    if n % 2 != 0 {
        return Err(Error::Input(format!("qubit count must be even, got {n}")));
    }
    coupled_qubit_state(n, n / 2, j, -j)
}

/// Dephasing rate and calibration-error amplitude for one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseConfig {
    /// Pure dephasing rate γ per qubit.
    pub gamma: f64,
    /// Calibration errors `η_n` are uniform in `[−η, η]`.
    pub eta: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn ideal() -> Self {
        Self {
            gamma: 0.0,
            eta: 0.0,
            seed: 0,
        }
    }

    /// One `η_n` per qubit, deterministic in the seed.
    pub fn eta_samples(&self, n: usize) -> Vec<f64> {
        if self.eta == 0.0 {
            return vec![0.0; n];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..n).map(|_| rng.random_range(-self.eta..=self.eta)).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() || !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::Input(format!(
                "noise needs γ ≥ 0 and η ≥ 0 (got {}, {})",
                self.gamma, self.eta
            )));
        }
        Ok(())
    }
}

/// Simplified-scheme pump on `n` qubits: `Ξ_A⁻ + Ξ_B⁻` at `Λ_h`,
/// `c_A Ξ_A⁺ + c_B Ξ_B⁺` at `Λ_i` (with `(c_A, c_B)` from the config,
/// `(1, −1)` by default), and `√(2γ) Iᶻ_n` on every qubit.
pub fn noisy_pump_model(n: usize, cfg: &PumpConfig, noise: &NoiseConfig) -> Result<LindbladModel> {
    check_size(n, DENSITY_CAP)?;
    noise.validate()?;
    if n % 2 != 0 {
        return Err(Error::Input(format!("qubit count must be even, got {n}")));
    }
    let half = HalfInt::from_twice((n / 2) as i32);
    if cfg.scheme != Scheme::Simplified || cfg.j_a != half || cfg.j_b != half {
        return Err(Error::Input(format!(
            "the qubit register needs the simplified scheme with j_A = j_B = {half}"
        )));
    }
    cfg.validate()?;
    let eta = noise.eta_samples(n);
    let [c_a, c_b, _] = cfg.raise_coefficients[0];
    let lower: Vec<C64> = eta.iter().map(|e| C64::new(1.0 + e, 0.0)).collect();
    let raise: Vec<C64> = eta
        .iter()
        .enumerate()
        .map(|(q, e)| (if q < n / 2 { c_a } else { c_b }) * (1.0 + e))
        .collect();
    let mut model = LindbladModel::new(BasisId::Qubits(n), 1 << n).with_grading(excitation_grading(n))?;
    model.add_jump("lower", cfg.lambda_h, build_qubit_operators(n, &lower, Sense::Lower)?)?;
    model.add_jump("raise", cfg.lambda_i, build_qubit_operators(n, &raise, Sense::Raise)?)?;
    if noise.gamma > 0.0 {
        for q in 0..n {
            model.add_jump(format!("dephase{q}"), 2.0 * noise.gamma, qubit_iz(n, q)?)?;
        }
    }
    Ok(model)
}

/// All qubits down.
pub fn polarized_register(n: usize) -> Result<DensityMatrix> {
    check_size(n, DENSITY_CAP)?;
    Ok(DensityMatrix::basis_state(BasisId::Qubits(n), 1 << n, 0))
}

fn n_qubits_of(rho: &DensityMatrix) -> Result<usize> {
    match rho.basis() {
        BasisId::Qubits(n) if rho.dim() == 1 << n => Ok(n),
        b => Err(Error::BasisMismatch(format!("expected a qubit register, got {b}"))),
    }
}

fn trace_norm_hermitian(m: DMatrix<C64>) -> f64 {
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

/// `log₂ ‖ρ^{T_P}‖₁` for the qubit set `partition`.
pub fn log_negativity(rho: &DensityMatrix, partition: &[usize]) -> Result<f64> {
    let n = n_qubits_of(rho)?;
    if partition.is_empty() || partition.len() >= n || partition.iter().any(|&q| q >= n) {
        return Err(Error::Input(format!("partition {partition:?} is not a proper subset of {n} qubits")));
    }
    let pmask: usize = partition.iter().map(|&q| mask(q, n)).fold(0, |a, b| a | b);
    let m = rho.matrix();
    let d = 1usize << n;
    // swap the partition bits between row and column
    let pt = DMatrix::from_fn(d, d, |i, j| {
        let ii = (i & !pmask) | (j & pmask);
        let jj = (j & !pmask) | (i & pmask);
        m[(ii, jj)]
    });
    Ok(trace_norm_hermitian(pt).max(1.0).log2())
}

/// Reduced state on `keep` (in the order given).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = n_qubits_of(rho)?;
    if keep.is_empty() || keep.iter().any(|&q| q >= n) {
        return Err(Error::Input(format!("cannot keep qubits {keep:?} of {n}")));
    }
    let k = keep.len();
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose = |a: usize, b: usize| {
        let mut idx = 0;
        for (p, &q) in keep.iter().enumerate() {
            idx |= ((a >> (k - 1 - p)) & 1) << (n - 1 - q);
        }
        for (p, &q) in rest.iter().enumerate() {
            idx |= ((b >> (rest.len() - 1 - p)) & 1) << (n - 1 - q);
        }
        idx
    };
    let m = rho.matrix();
    let out = DMatrix::from_fn(1 << k, 1 << k, |a, b| {
        (0..1usize << rest.len()).map(|e| m[(compose(a, e), compose(b, e))]).sum()
    });
    DensityMatrix::from_matrix(BasisId::Qubits(k), out)
}

/// Logarithmic negativity between qubit `a` and qubit `b` after tracing
/// out the rest.
pub fn pair_entanglement(rho: &DensityMatrix, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Err(Error::Input("pair needs two distinct qubits".into()));
    }
    log_negativity(&partial_trace(rho, &[a, b])?, &[0])
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn state_fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.basis() != target.basis() {
        return Err(Error::BasisMismatch(format!("{} vs {}", rho.basis(), target.basis())));
    }
    Ok(rho.fidelity_with_pure(target.amplitudes())?.clamp(0.0, 1.0))
}

/// `U = Π_n exp(i θ_n Iᶻ_n)`.
pub fn phase_unitary(thetas: &[f64]) -> Result<SparseOp> {
    let n = thetas.len();
    check_size(n, PURE_STATE_CAP)?;
    let d: Vec<C64> = (0..1usize << n)
        .map(|i| {
            let phase: f64 = thetas
                .iter()
                .enumerate()
                .map(|(q, t)| t * (bit(i, q, n) as f64 - 0.5))
                .sum();
            C64::from_polar(1.0, phase)
        })
        .collect();
    Ok(SparseOp::diagonal(BasisId::Qubits(n), &d))
}

/// The phase unitary and the model with every jump replaced by `U L U†`.
pub fn phase_encode(thetas: &[f64], model: &LindbladModel) -> Result<(SparseOp, LindbladModel)> {
    let u = phase_unitary(thetas)?;
    let encoded = model.conjugated(&u)?;
    Ok((u, encoded))
}

/// Diagnostics of the state conditioned on one `j_Aᶻ + j_Bᶻ` outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeDiagnostics {
    /// `J` such that the outcome is `μ = −J`.
    pub outcome: HalfInt,
    pub probability: f64,
    /// `E(A|B)` of the conditional state.
    pub log_neg_ab: f64,
    /// Logarithmic negativity between qubit 0 (A) and qubit N/2 (B).
    pub pair_log_neg: f64,
    /// Fidelity with `|J, −J, N/4, N/4⟩`.
    pub fidelity: f64,
}

/// Measures `j_Aᶻ + j_Bᶻ` and reports outcomes `μ = 0, −1, …, −j_max`.
/// Outcomes with probability below `1e-12` report zeros for the
/// conditional quantities.
pub fn analyze_outcomes(rho: &DensityMatrix, j_max: usize) -> Result<Vec<OutcomeDiagnostics>> {
    let n = n_qubits_of(rho)?;
    let mut out = Vec::new();
    for j in 0..=j_max.min(n / 2) {
        let k = n / 2 - j;
        let keep: Vec<usize> = (0..1usize << n).filter(|i| i.count_ones() as usize == k).collect();
        let p: f64 = keep.iter().map(|&i| rho.matrix()[(i, i)].re).sum();
        let jj = HalfInt::integer(j as i32);
        if p < 1e-12 {
            out.push(OutcomeDiagnostics {
                outcome: jj,
                probability: p.max(0.0),
                log_neg_ab: 0.0,
                pair_log_neg: 0.0,
                fidelity: 0.0,
            });
            continue;
        }
        let (_, cond) = rho.project_onto(&keep)?;
        let a: Vec<usize> = (0..n / 2).collect();
        out.push(OutcomeDiagnostics {
            outcome: jj,
            probability: p,
            log_neg_ab: log_negativity(&cond, &a)?,
            pair_log_neg: pair_entanglement(&cond, 0, n / 2)?,
            fidelity: state_fidelity(&cond, &scs_state(n, jj)?)?,
        });
    }
    Ok(out)
}

/// `Σ_J ⟨J,−J,N/4,N/4|ρ|J,−J,N/4,N/4⟩`.
pub fn extremal_population(rho: &DensityMatrix) -> Result<f64> {
    let n = n_qubits_of(rho)?;
    let mut total = 0.0;
    for j in 0..=n / 2 {
        total += state_fidelity(rho, &scs_state(n, HalfInt::integer(j as i32))?)?;
    }
    Ok(total)
}

/// Settling time after the pump: `10/Λ_h`, long enough for the lowering
/// drive alone to empty every non-extremal `|J, μ > −J⟩` state.
pub fn default_settle_time(cfg: &PumpConfig) -> f64 {
    10.0 / cfg.lambda_h
}

/// Pump from the polarized register for `t_pump`, then run `t_settle`
/// with the raising drive switched off (dephasing stays on), and
/// analyse the outcomes `J ≤ 2`.
pub fn noise_run(
    n: usize,
    cfg: &PumpConfig,
    noise: &NoiseConfig,
    t_pump: f64,
    t_settle: f64,
) -> Result<(DensityMatrix, Vec<OutcomeDiagnostics>)> {
    let pump = noisy_pump_model(n, cfg, noise)?;
    let settle = noisy_pump_model(
        n,
        &PumpConfig {
            lambda_i: 0.0,
            ..cfg.clone()
        },
        noise,
    )?;
    let rho = pump_then_settle(&pump, &settle, &polarized_register(n)?, t_pump, t_settle)?;
    let diag = analyze_outcomes(&rho, 2)?;
    Ok((rho, diag))
}

/// Evolves under `pump` for `t_pump`, then under `settle` for `t_settle`.
pub fn pump_then_settle(
    pump: &LindbladModel,
    settle: &LindbladModel,
    rho0: &DensityMatrix,
    t_pump: f64,
    t_settle: f64,
) -> Result<DensityMatrix> {
    let opts = EvolveOptions {
        n_samples: 1,
        check_positivity: false,
        ..Default::default()
    };
    pump_then_settle_with(pump, settle, rho0, t_pump, t_settle, &opts)
}

pub fn pump_then_settle_with(
    pump: &LindbladModel,
    settle: &LindbladModel,
    rho0: &DensityMatrix,
    t_pump: f64,
    t_settle: f64,
    opts: &EvolveOptions,
) -> Result<DensityMatrix> {
    if !(t_pump >= 0.0) || !(t_settle >= 0.0) {
        return Err(Error::Input(format!("times must be non-negative (got {t_pump}, {t_settle})")));
    }
    let mut rho = rho0.clone();
    if t_pump > 0.0 {
        rho = evolve(pump, &rho, t_pump, opts, &[])?.final_state;
    }
    if t_settle > 0.0 {
        rho = evolve(settle, &rho, t_settle, opts, &[])?.final_state;
    }
    Ok(rho)
}

/// Row of the noise scan CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub gamma_over_lambda_i: f64,
    pub eta: f64,
    pub seed: u64,
    pub diag: OutcomeDiagnostics,
}

pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], w: &mut W) -> std::io::Result<()> {
    use crate::export::fmt_f64;
    writeln!(
        w,
        "gamma_over_lambda_i,eta,seed,outcome_2J,probability,log_neg_AB,pair_log_neg,fidelity"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.gamma_over_lambda_i),
            fmt_f64(r.eta),
            r.seed,
            r.diag.outcome.twice(),
            fmt_f64(r.diag.probability),
            fmt_f64(r.diag.log_neg_ab),
            fmt_f64(r.diag.pair_log_neg),
            fmt_f64(r.diag.fidelity)
        )?;
    }
    Ok(())
}

/// Column vector of a pure state, for dense checks.
pub fn to_dvector(psi: &PureState) -> DVector<C64> {
    DVector::from_column_slice(psi.amplitudes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_lowering_entries() {
        let op = build_qubit_operators(2, &[C64::new(1.0, 0.0); 2], Sense::Lower).unwrap();
        assert_eq!(op.nnz(), 4);
        assert!(op.entries().all(|(_, _, v)| v == C64::new(1.0, 0.0)));
    }

    #[test]
    fn bell_and_product_negativity() {
        let s = 1.0 / 2f64.sqrt();
        let bell = PureState::new(2, vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]).unwrap();
        assert!((log_negativity(&bell.density(), &[0]).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::basis_state(3, 5).unwrap();
        assert!(log_negativity(&prod.density(), &[0, 2]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mixed_state_fidelity() {
        let rho = DensityMatrix::maximally_mixed(BasisId::Qubits(2), 4);
        let psi = PureState::new(2, vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.5, 0.5), C64::new(0.1, -0.4)]).unwrap();
        assert!((state_fidelity(&rho, &psi).unwrap() - 0.25).abs() < 1e-12);
        assert!((state_fidelity(&psi.density(), &psi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_state_of_two_qubits() {
        let s = scs_state(2, HalfInt::ZERO).unwrap();
        let a = s.amplitudes();
        // (|01⟩ − |10⟩)/√2 up to a global phase
        assert!(a[0].norm() < 1e-15 && a[3].norm() < 1e-15);
        assert!((a[1] + a[2]).norm() < 1e-15);
        assert!((a[1].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eta_sampling_is_seeded() {
        let a = NoiseConfig { gamma: 0.0, eta: 0.1, seed: 9 };
        assert_eq!(a.eta_samples(8), a.eta_samples(8));
        assert!(a.eta_samples(8).iter().all(|e| e.abs() <= 0.1));
        assert_ne!(a.eta_samples(8), NoiseConfig { seed: 10, ..a }.eta_samples(8));
    }

    #[test]
    fn size_caps() {
        assert!(build_qubit_operators(15, &[C64::new(1.0, 0.0); 15], Sense::Raise).is_err());
        assert!(polarized_register(11).is_err());
    }
}
