//! The two pumping scenarios, their analytic steady states and the
//! pump / measure / repump cycle.
//!
//! Rates are in units of `Λ_i`; times in units of `1/Λ_i`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::master_equation::{
    evolve, projective_measure, rate_equation_evolve, DensityMatrix, EvolveOptions, LindbladModel,
    MeasuredObservable, Observable, RateModel,
};
use crate::spin_algebra::{
    build_coupled_basis, clebsch_gordan, collective_operator, total_ladder, transition_table,
    BasisState, CoupledBasis, ExtremalLabel, HalfInt, Sense,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Targets A, B and a spin-`J` ancilla β; two inhomogeneous raising
    /// channels plus homogeneous `J_T⁻`.
    General,
    /// No ancilla; `j_A⁻ + j_B⁻` and `j_A⁺ − j_B⁺`.
    Simplified,
}

/// Raising-channel coefficient triples `(c_A, c_B, c_β)` of `Ĵ₁⁺` and `Ĵ₂⁺`.
pub fn default_general_coefficients() -> [[C64; 3]; 2] {
    let w = |k: f64| C64::from_polar(1.0, 2.0 * PI * k / 3.0);
    let one = C64::new(1.0, 0.0);
    [[w(1.0), w(2.0), one], [w(2.0), w(4.0), one]]
}

pub fn default_simplified_coefficients() -> [C64; 3] {
    [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PumpConfig {
    pub scheme: Scheme,
    pub j_a: HalfInt,
    pub j_b: HalfInt,
    /// Ancilla spin; zero for the simplified scheme.
    pub j_beta: HalfInt,
    pub lambda_h: f64,
    pub lambda_i: f64,
    /// One `(c_A, c_B, c_β)` triple per raising channel.
    pub raise_coefficients: Vec<[C64; 3]>,
}

impl PumpConfig {
    pub fn general(j_a: HalfInt, j_b: HalfInt, j_beta: HalfInt, lambda_h: f64, lambda_i: f64) -> Self {
        Self {
            scheme: Scheme::General,
            j_a,
            j_b,
            j_beta,
            lambda_h,
            lambda_i,
            raise_coefficients: default_general_coefficients().to_vec(),
        }
    }

    pub fn simplified(j_a: HalfInt, j_b: HalfInt, lambda_h: f64, lambda_i: f64) -> Self {
        Self {
            scheme: Scheme::Simplified,
            j_a,
            j_b,
            j_beta: HalfInt::ZERO,
            lambda_h,
            lambda_i,
            raise_coefficients: vec![default_simplified_coefficients()],
        }
    }

    /// Simplified scheme for `n` spin-½ qubits split evenly between A and B.
    pub fn simplified_qubits(n: usize, lambda_h: f64, lambda_i: f64) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::Input(format!("qubit count must be even and positive, got {n}")));
        }
        let j = HalfInt::from_twice((n / 2) as i32);
        Ok(Self::simplified(j, j, lambda_h, lambda_i))
    }

    pub fn with_coefficients(mut self, coeffs: Vec<[C64; 3]>) -> Self {
        self.raise_coefficients = coeffs;
        self
    }

    /// `j_A + j_B + j_β`.
    pub fn spin_sum(&self) -> f64 {
        (self.j_a + self.j_b + self.j_beta).value()
    }

    /// Errors on invalid rates; returns warnings (currently the
    /// `Λ_h/Λ_i ≫ (j_A + j_B + j_β)²` heuristic).
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.lambda_h > 0.0) || !(self.lambda_i >= 0.0) || !self.lambda_h.is_finite() || !self.lambda_i.is_finite() {
            return Err(Error::Input(format!(
                "rates must satisfy Λ_h > 0, Λ_i ≥ 0 (got {}, {})",
                self.lambda_h, self.lambda_i
            )));
        }
        if self.raise_coefficients.is_empty() {
            return Err(Error::Input("at least one raising channel is required".into()));
        }
        if self.scheme == Scheme::Simplified && self.j_beta != HalfInt::ZERO {
            return Err(Error::Input("the simplified scheme has no ancilla (j_beta must be 0)".into()));
        }
        let mut warnings = Vec::new();
        let s2 = self.spin_sum().powi(2);
        if self.lambda_i > 0.0 && self.lambda_h / self.lambda_i < s2 {
            warnings.push(format!(
                "Λ_h/Λ_i = {:.3} is below (j_A + j_B + j_β)² = {s2}; lowering may not dominate raising",
                self.lambda_h / self.lambda_i
            ));
        }
        Ok(warnings)
    }

    pub fn basis(&self) -> Result<CoupledBasis> {
        build_coupled_basis(self.j_a, self.j_b, self.j_beta)
    }
}

/// A pump model together with the basis it lives on.
#[derive(Clone, Debug)]
pub struct PumpSetup {
    pub basis: CoupledBasis,
    pub model: LindbladModel,
    pub warnings: Vec<String>,
}

impl PumpSetup {
    /// All spins down: `|J_T = j_A+j_B+j_β, μ = −J_T, λ = j_A+j_B⟩`.
    pub fn polarized_state(&self) -> DensityMatrix {
        let b = &self.basis;
        let lam = b.j_a() + b.j_b();
        let tot = lam + b.j_beta();
        let i = b
            .index_of(&BasisState::new(lam, tot, -tot))
            .expect("stretched state is in the basis");
        DensityMatrix::basis_state(b.id(), b.dim(), i)
    }

    /// Population of each total-spin sector, named `P_J<j>`.
    pub fn sector_observables(&self) -> Vec<Observable> {
        self.basis
            .totals()
            .into_iter()
            .map(|j| Observable::Population {
                name: crate::master_equation::sector_name(j),
                indices: (0..self.basis.dim())
                    .filter(|&i| self.basis.state(i).total == j)
                    .collect(),
            })
            .collect()
    }

    /// Population of the extremal states `|J, −J, λ⟩` of each sector, named
    /// `X_J<j>`.
    pub fn extremal_observables(&self) -> Vec<Observable> {
        self.basis
            .totals()
            .into_iter()
            .map(|j| Observable::Population {
                name: format!("X_J{j}"),
                indices: (0..self.basis.dim())
                    .filter(|&i| {
                        let s = self.basis.state(i);
                        s.total == j && s.is_extremal()
                    })
                    .collect(),
            })
            .collect()
    }
}

pub fn build_general_model(cfg: &PumpConfig) -> Result<PumpSetup> {
    if cfg.scheme != Scheme::General {
        return Err(Error::Input("build_general_model needs scheme = general".into()));
    }
    build_model(cfg)
}

pub fn build_simplified_model(cfg: &PumpConfig) -> Result<PumpSetup> {
    if cfg.scheme != Scheme::Simplified {
        return Err(Error::Input("build_simplified_model needs scheme = simplified".into()));
    }
    build_model(cfg)
}

/// `L₀ = √Λ_h J_T⁻` (homogeneous over the target groups and, in the general
/// scheme, the ancilla) plus `L_m = √Λ_i Ĵ_m⁺` for each raising channel.
pub fn build_model(cfg: &PumpConfig) -> Result<PumpSetup> {
    let warnings = cfg.validate()?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let basis = cfg.basis()?;
    let mut model = LindbladModel::new(basis.id(), basis.dim());
    model.set_grading(basis.states().iter().map(|s| s.mu.twice()).collect())?;
    model.add_jump("lower", cfg.lambda_h, total_ladder(&basis, Sense::Lower))?;
    for (k, c) in cfg.raise_coefficients.iter().enumerate() {
        let op = collective_operator(&basis, c[0], c[1], c[2], Sense::Raise);
        model.add_jump(format!("raise{}", k + 1), cfg.lambda_i, op)?;
    }
    Ok(PumpSetup {
        basis,
        model,
        warnings,
    })
}

/// Secular rate model on the extremal states, rates `Λ_i |χ|²`.
pub fn build_rate_model(cfg: &PumpConfig) -> Result<(CoupledBasis, RateModel)> {
    cfg.validate()?;
    let basis = cfg.basis()?;
    let tables = cfg
        .raise_coefficients
        .iter()
        .map(|c| transition_table(&collective_operator(&basis, c[0], c[1], c[2], Sense::Raise), &basis))
        .collect::<Result<Vec<_>>>()?;
    let channels: Vec<(f64, &_)> = tables.iter().map(|t| (cfg.lambda_i, t)).collect();
    let labels = tables[0].initial_labels().to_vec();
    let model = RateModel::from_tables(labels, &channels)?;
    Ok((basis, model))
}

/// Populations with all weight on the fully polarized extremal state.
pub fn polarized_populations(basis: &CoupledBasis, model: &RateModel) -> Vec<f64> {
    let lam = basis.j_a() + basis.j_b();
    let label = ExtremalLabel {
        total: lam + basis.j_beta(),
        lambda: lam,
    };
    let mut p = vec![0.0; model.dim()];
    p[model.index_of(&label).expect("polarized label present")] = 1.0;
    p
}

/// Per-state weight ratio `w(J)/w(J+1) = (J+1)(2J+1)`, starting from 1 at
/// the smallest total spin (0 or ½).
fn extremal_weights(j_max: HalfInt) -> Vec<(HalfInt, f64)> {
    let mut j = HalfInt::from_twice(j_max.twice() % 2);
    let mut w = 1.0;
    let mut out = Vec::new();
    while j <= j_max {
        out.push((j, w));
        let jv = j.value();
        w /= (jv + 1.0) * (2.0 * jv + 1.0);
        j = j + HalfInt::ONE;
    }
    out
}

/// `g(k) = (2k+1) Π_{i<k} (2i² + 3i + 1)⁻¹`.
pub fn g_weight(k: usize) -> f64 {
    let mut g = (2 * k + 1) as f64;
    for i in 0..k {
        let i = i as f64;
        g /= 2.0 * i * i + 3.0 * i + 1.0;
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticSteadyState {
    pub scheme: Scheme,
    /// `(J, P(J))` normalised over `J ≤ J_max`.
    pub populations: Vec<(HalfInt, f64)>,
    /// Population of the lowest total spin.
    pub ground: f64,
    /// `(3 + ln NI)/(2NI)` for the simplified scheme, `3/(j_A+j_B+j_β)`
    /// for the general one; `None` when it cannot be formed from `J_max`.
    pub pump_time: Option<f64>,
    /// `(j_A + j_B + j_β)⁻²`.
    pub repump_time: f64,
}

/// Default cutoff for the analytic sums.
pub fn default_j_max(cfg: &PumpConfig) -> HalfInt {
    let full = cfg.j_a + cfg.j_b + cfg.j_beta;
    let cap = HalfInt::from_twice(24 + full.twice() % 2);
    full.min(cap)
}

/// Analytic steady state with `2J+1`-fold λ degeneracy for the general
/// scheme (giving `[Σ_k g(k)]⁻¹` on the singlet) and none for the
/// simplified one (`P(J) = (2J² + 3J + 1) P(J+1)`).
///
/// `spin_sum` is `j_A + j_B + j_β` (`NI` for the simplified scheme), used
/// for the timescales.
pub fn analytic_steady_state(scheme: Scheme, j_max: HalfInt, spin_sum: f64) -> AnalyticSteadyState {
    let weights = extremal_weights(j_max);
    let raw: Vec<(HalfInt, f64)> = weights
        .into_iter()
        .map(|(j, w)| match scheme {
            Scheme::General => (j, (j.twice() + 1) as f64 * w),
            Scheme::Simplified => (j, w),
        })
        .collect();
    let z: f64 = raw.iter().map(|(_, w)| w).sum();
    let populations: Vec<(HalfInt, f64)> = raw.into_iter().map(|(j, w)| (j, w / z)).collect();
    let pump_time = match scheme {
        Scheme::Simplified => pump_time_estimate(spin_sum),
        Scheme::General => (spin_sum > 0.0).then(|| 3.0 / spin_sum),
    };
    AnalyticSteadyState {
        scheme,
        ground: populations[0].1,
        populations,
        pump_time,
        repump_time: repump_timescale(spin_sum),
    }
}

/// Steady state of the rate equations using the basis' actual λ
/// degeneracies instead of `2J + 1`. Returns `(J, P(J))`.
pub fn degeneracy_aware_steady_state(basis: &CoupledBasis) -> Vec<(HalfInt, f64)> {
    let totals = basis.totals();
    let j_max = *totals.last().expect("non-empty basis");
    let raw: Vec<(HalfInt, f64)> = extremal_weights(j_max)
        .into_iter()
        .filter(|(j, _)| totals.contains(j))
        .map(|(j, w)| (j, basis.degeneracy(j) as f64 * w))
        .collect();
    let z: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(j, w)| (j, w / z)).collect()
}

/// Per-label analytic populations on a rate model: uniform within each
/// total-spin sector with the `(J+1)(2J+1)` weight ratio between sectors.
pub fn analytic_label_populations(model: &RateModel) -> Vec<f64> {
    let totals = model.totals();
    let j_max = *totals.last().expect("non-empty model");
    let weights = extremal_weights(j_max);
    let w_of = |j: HalfInt| weights.iter().find(|(k, _)| *k == j).map(|e| e.1).unwrap_or(0.0);
    let raw: Vec<f64> = model.labels().iter().map(|l| w_of(l.total)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Simplified-scheme pump time `(3 + ln NI)/(2NI)`, with `NI = j_A + j_B`.
pub fn pump_time_estimate(n_times_i: f64) -> Option<f64> {
    (n_times_i > 0.0).then(|| (3.0 + n_times_i.ln()) / (2.0 * n_times_i))
}

/// `(j_A + j_B + j_β)⁻²`.
pub fn repump_timescale(spin_sum: f64) -> f64 {
    if spin_sum > 0.0 {
        spin_sum.powi(-2)
    } else {
        f64::INFINITY
    }
}

/// How each cycle's state is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EvolveMode {
    /// Full Lindblad evolution in the coupled basis.
    Lindblad,
    /// Secular rate equations on the extremal states.
    Rate,
    /// Every cycle starts from the analytic steady state.
    IdealSteadyState,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleRecord {
    pub cycle_index: usize,
    /// The measured outcome recorded (the lowest total spin).
    pub outcome: HalfInt,
    /// Probability of that outcome in this cycle.
    pub probability: f64,
    /// Probability that no cycle so far produced it.
    pub cumulative_failure: f64,
}

#[derive(Clone, Debug)]
pub struct CycleOptions {
    pub n_cycles: usize,
    pub mode: EvolveMode,
    /// First pump; defaults to the analytic pump time.
    pub pump_time: Option<f64>,
    /// Later pumps; defaults to 10× the analytic repump timescale.
    pub repump_time: Option<f64>,
    pub evolve: EvolveOptions,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            n_cycles: 30,
            mode: EvolveMode::Rate,
            pump_time: None,
            repump_time: None,
            evolve: EvolveOptions {
                n_samples: 4,
                check_positivity: false,
                ..Default::default()
            },
        }
    }
}

/// Pump, measure `J_T²`, and on failure repump the renormalised
/// non-target state, `n_cycles` times. Times are in units of `1/Λ_i` when
/// `Λ_i = 1`; they scale as `1/Λ_i` otherwise.
pub fn pump_measure_cycle(cfg: &PumpConfig, opts: &CycleOptions) -> Result<Vec<CycleRecord>> {
    if opts.n_cycles == 0 {
        return Err(Error::Input("n_cycles must be at least 1".into()));
    }
    let j_max = default_j_max(cfg);
    let analytic = analytic_steady_state(cfg.scheme, j_max, cfg.spin_sum());
    let ground = HalfInt::from_twice((cfg.j_a + cfg.j_b + cfg.j_beta).twice() % 2);
    let li = cfg.lambda_i.max(f64::MIN_POSITIVE);
    let t_pump = opts.pump_time.or(analytic.pump_time.map(|t| t / li)).ok_or_else(|| {
        Error::Input("no pump time given and none can be estimated".into())
    })?;
    let t_repump = opts.repump_time.unwrap_or(10.0 * analytic.repump_time / li);

    let mut records = Vec::with_capacity(opts.n_cycles);
    let mut failure = 1.0;
    let mut push = |k: usize, p: f64, records: &mut Vec<CycleRecord>| {
        failure *= 1.0 - p;
        records.push(CycleRecord {
            cycle_index: k + 1,
            outcome: ground,
            probability: p,
            cumulative_failure: failure,
        });
    };

    match opts.mode {
        EvolveMode::IdealSteadyState => {
            let basis = cfg.basis()?;
            let p = match cfg.scheme {
                Scheme::General => analytic.ground,
                Scheme::Simplified => degeneracy_aware_steady_state(&basis)[0].1,
            };
            for k in 0..opts.n_cycles {
                push(k, p, &mut records);
            }
        }
        EvolveMode::Rate => {
            let (basis, model) = build_rate_model(cfg)?;
            let mut p = polarized_populations(&basis, &model);
            for k in 0..opts.n_cycles {
                let t = if k == 0 { t_pump } else { t_repump };
                p = rate_equation_evolve(&model, &p, t, 1)?.final_populations;
                let hit: f64 = model
                    .labels()
                    .iter()
                    .zip(&p)
                    .filter(|(l, _)| l.total == ground)
                    .map(|(_, v)| v)
                    .sum();
                push(k, hit, &mut records);
                if hit >= 1.0 - 1e-15 {
                    break;
                }
                for (l, v) in model.labels().iter().zip(p.iter_mut()) {
                    *v = if l.total == ground { 0.0 } else { v.max(0.0) / (1.0 - hit) };
                }
            }
        }
        EvolveMode::Lindblad => {
            let setup = build_model(cfg)?;
            let mut rho = setup.polarized_state();
            for k in 0..opts.n_cycles {
                let t = if k == 0 { t_pump } else { t_repump };
                rho = evolve(&setup.model, &rho, t, &opts.evolve, &[])?.final_state;
                let keep: Vec<usize> = (0..setup.basis.dim())
                    .filter(|&i| setup.basis.state(i).total != ground)
                    .collect();
                let hit = 1.0 - keep.iter().map(|&i| rho.matrix()[(i, i)].re).sum::<f64>();
                push(k, hit, &mut records);
                match rho.project_onto(&keep) {
                    Ok((_, post)) => rho = post,
                    Err(Error::ZeroProbability(_)) => break,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(records)
}

/// `Σ p_k |J_k, −J_k, λ_k⟩⟨…|` for rate-model populations.
pub fn extremal_mixture(basis: &CoupledBasis, model: &RateModel, p: &[f64]) -> Result<DensityMatrix> {
    if p.len() != model.dim() {
        return Err(Error::BasisMismatch(format!("{} populations for {} labels", p.len(), model.dim())));
    }
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for (l, &v) in model.labels().iter().zip(p) {
        let i = basis
            .index_of(&BasisState::new(l.lambda, l.total, -l.total))
            .ok_or_else(|| Error::BasisMismatch(format!("label {l:?} not in basis")))?;
        m[(i, i)] = C64::new(v, 0.0);
    }
    DensityMatrix::from_matrix(basis.id(), m)
}

/// `(J_T, Σ_{states in sector} ρ_ii)` in increasing `J_T`.
pub fn sector_populations(basis: &CoupledBasis, rho: &DensityMatrix) -> Result<Vec<(HalfInt, f64)>> {
    crate::master_equation::outcome_distribution(rho, basis, MeasuredObservable::TotalSpinSquared)
}

/// CSV with columns `cycle,outcome_2J,probability,cumulative_failure`.
pub fn write_cycles_csv<W: std::io::Write>(records: &[CycleRecord], w: &mut W) -> std::io::Result<()> {
    use crate::export::fmt_f64;
    writeln!(w, "cycle,outcome_2J,probability,cumulative_failure")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{}",
            r.cycle_index,
            r.outcome.twice(),
            fmt_f64(r.probability),
            fmt_f64(r.cumulative_failure)
        )?;
    }
    Ok(())
}

/// Reduced state of the target groups A+B, in the `(λ, m_λ)` basis, for a
/// coupled-basis density matrix. Index of `(λ, m)` follows
/// [`target_state_index`].
pub fn target_reduced_state(basis: &CoupledBasis, rho: &DensityMatrix) -> Result<DMatrix<C64>> {
    rho.ensure_basis(basis)?;
    let labels = target_labels(basis);
    let d = labels.len();
    // ⟨λ m_λ; m_β | J μ λ⟩ = CG(λ m_λ j_β m_β | J μ)
    let mut out = DMatrix::zeros(d, d);
    let jb = basis.j_beta();
    for m_beta in jb.projections() {
        // vector components |λ m⟩⊗|m_β⟩ ← coupled index
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
        for (i, s) in basis.states().iter().enumerate() {
            let m = s.mu - m_beta;
            if !m.is_projection_of(s.lambda) {
                continue;
            }
            let c = clebsch_gordan(s.lambda, m, jb, m_beta, s.total, s.mu);
            if c != 0.0 {
                let r = target_state_index(&labels, s.lambda, m).expect("label exists");
                rows[r].push((i, c));
            }
        }
        for a in 0..d {
            for b in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for &(i, ci) in &rows[a] {
                    for &(j, cj) in &rows[b] {
                        acc += rho.matrix()[(i, j)] * (ci * cj);
                    }
                }
                out[(a, b)] += acc;
            }
        }
    }
    Ok(out)
}

/// `(λ, m_λ)` labels of the A+B subsystem in increasing order.
pub fn target_labels(basis: &CoupledBasis) -> Vec<(HalfInt, HalfInt)> {
    HalfInt::triangle_range(basis.j_a(), basis.j_b())
        .flat_map(|l| l.projections().map(move |m| (l, m)))
        .collect()
}

pub fn target_state_index(labels: &[(HalfInt, HalfInt)], lambda: HalfInt, m: HalfInt) -> Option<usize> {
    labels.iter().position(|&(l, mm)| l == lambda && mm == m)
}

/// `|S_ABβ⟩ = Σ_μ (−1)^{J−μ} |J, μ⟩_AB ⊗ |J, −μ⟩_β` expressed in the
/// coupled basis (`λ = J = j_β`, `J_T = 0`), up to a global phase.
pub fn ancilla_singlet(basis: &CoupledBasis) -> Result<Vec<C64>> {
    let j = basis.j_beta();
    let idx = basis
        .index_of(&BasisState::new(j, HalfInt::ZERO, HalfInt::ZERO))
        .ok_or_else(|| Error::Input(format!("no singlet with λ = j_β = {j} in this basis")))?;
    let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
    v[idx] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Lowering with `j_A⁻ + j_B⁻` only (the ancilla is left alone), used to
/// rotate the A+B part of the singlet into `|J, −J⟩`.
pub fn target_lowering_model(basis: &CoupledBasis, lambda_h: f64) -> Result<LindbladModel> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    LindbladModel::new(basis.id(), basis.dim()).with_jump(
        "target-lower",
        lambda_h,
        collective_operator(basis, one, one, zero, Sense::Lower),
    )
}

/// Outcome probabilities of a `J_Tᶻ` (equivalently `j_Aᶻ + j_Bᶻ` for the
/// simplified scheme) measurement.
pub fn z_outcomes(basis: &CoupledBasis, rho: &DensityMatrix) -> Result<Vec<(HalfInt, f64)>> {
    crate::master_equation::outcome_distribution(rho, basis, MeasuredObservable::TotalSpinZ)
}

/// Singlet probability and post-measurement state for a `J_T²` measurement.
pub fn measure_singlet(basis: &CoupledBasis, rho: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    projective_measure(rho, basis, MeasuredObservable::TotalSpinSquared, HalfInt::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values() {
        let expect = [1.0, 3.0, 5.0 / 6.0, 7.0 / 90.0, 9.0 / 2520.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((g_weight(k) - e).abs() < 1e-15, "g({k})");
        }
        let s: f64 = (0..=12).map(g_weight).sum();
        assert!((1.0 / s - 0.2035).abs() < 5e-5, "{}", 1.0 / s);
    }

    #[test]
    fn analytic_matches_g() {
        let a = analytic_steady_state(Scheme::General, HalfInt::integer(12), 15.0);
        let s: f64 = (0..=12).map(g_weight).sum();
        assert!((a.ground - 1.0 / s).abs() < 1e-14);
        assert!((a.pump_time.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn simplified_recursion() {
        let a = analytic_steady_state(Scheme::Simplified, HalfInt::integer(3), 20.0);
        let expect = [90.0, 90.0, 15.0, 1.0].map(|x| x / 196.0);
        for ((_, p), e) in a.populations.iter().zip(expect) {
            assert!((p - e).abs() < 1e-15);
        }
        let two = analytic_steady_state(Scheme::Simplified, HalfInt::ONE, 1.0);
        assert!((two.populations[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pump_time_limit() {
        assert!(pump_time_estimate(1e12).unwrap() < 1e-10);
        assert!((pump_time_estimate(20.0).unwrap() - (3.0 + 20f64.ln()) / 40.0).abs() < 1e-15);
        assert!(pump_time_estimate(0.0).is_none());
    }

    #[test]
    fn invalid_rates_rejected() {
        let cfg = PumpConfig::general(HalfInt::ONE, HalfInt::ONE, HalfInt::ONE, 0.0, 1.0);
        assert!(cfg.validate().is_err());
        let cfg = PumpConfig::general(HalfInt::ONE, HalfInt::ONE, HalfInt::ONE, 2.0, 1.0);
        assert_eq!(cfg.validate().unwrap().len(), 1);
    }

    #[test]
    fn one_cycle_failure_is_complement() {
        let cfg = PumpConfig::general(HalfInt::integer(5), HalfInt::integer(5), HalfInt::integer(5), 5000.0, 1.0);
        let opts = CycleOptions {
            n_cycles: 1,
            mode: EvolveMode::IdealSteadyState,
            ..Default::default()
        };
        let r = pump_measure_cycle(&cfg, &opts).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].cumulative_failure - (1.0 - r[0].probability)).abs() < 1e-15);
    }
}
