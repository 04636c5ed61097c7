//! Feasibility arithmetic for cavity-assisted Raman pumping of atoms in an
//! optical lattice.
//!
//! Rates are angular frequencies (rad/s) internally. The `*_hz` helpers
//! and [`CavityParamsHz`] use `ω/2π` in Hz.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;

pub fn to_angular(hz: f64) -> f64 {
    TAU * hz
}

pub fn to_hz(angular: f64) -> f64 {
    angular / TAU
}

/// Raman branch. `Plus` drives `Ĵ⁺` (raising, `Λ_i`), `Minus` drives `Ĵ⁻`
/// (lowering, `Λ_h`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CavityParams {
    pub gamma_atom: f64,
    pub purcell: f64,
    pub g: f64,
    pub kappa: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub gamma_spin: f64,
    pub n_atoms: usize,
}

/// [`CavityParams`] with every frequency given as `ω/2π` in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParamsHz {
    pub gamma_atom_hz: f64,
    pub purcell: f64,
    pub g_hz: f64,
    pub kappa_hz: f64,
    pub delta_plus_hz: f64,
    pub delta_minus_hz: f64,
    pub omega_plus_hz: f64,
    pub omega_minus_hz: f64,
    pub gamma_spin_hz: f64,
    pub n_atoms: usize,
}

impl CavityParamsHz {
    pub fn to_angular(&self) -> Result<CavityParams> {
        CavityParams {
            gamma_atom: to_angular(self.gamma_atom_hz),
            purcell: self.purcell,
            g: to_angular(self.g_hz),
            kappa: to_angular(self.kappa_hz),
            delta_plus: to_angular(self.delta_plus_hz),
            delta_minus: to_angular(self.delta_minus_hz),
            omega_plus: to_angular(self.omega_plus_hz),
            omega_minus: to_angular(self.omega_minus_hz),
            gamma_spin: to_angular(self.gamma_spin_hz),
            n_atoms: self.n_atoms,
        }
        .validated()
    }
}

impl CavityParams {
    /// Cs in a Fabry–Perot cavity: `Γ/2π = 2.6 MHz`, `P = 80`,
    /// `g/2π = 45 MHz`, `κ/2π = 20 MHz`, `Δ/2π = 150 MHz` on both
    /// branches, `Ω₋/2π = 40 MHz`, `γ/2π = 25 Hz`. `Ω₊` is set so that
    /// the single-atom raising rate is `Λ_i/2π = 1 MHz`.
    pub fn cesium(n_atoms: usize) -> Self {
        let gamma_atom = to_angular(2.6e6);
        let purcell = 80.0;
        let delta = to_angular(150e6);
        let omega_plus = delta * (to_angular(1e6) / (purcell * gamma_atom)).sqrt();
        Self {
            gamma_atom,
            purcell,
            g: to_angular(45e6),
            kappa: to_angular(20e6),
            delta_plus: delta,
            delta_minus: delta,
            omega_plus,
            omega_minus: to_angular(40e6),
            gamma_spin: to_angular(25.0),
            n_atoms,
        }
    }

    pub fn to_hz(&self) -> CavityParamsHz {
        CavityParamsHz {
            gamma_atom_hz: to_hz(self.gamma_atom),
            purcell: self.purcell,
            g_hz: to_hz(self.g),
            kappa_hz: to_hz(self.kappa),
            delta_plus_hz: to_hz(self.delta_plus),
            delta_minus_hz: to_hz(self.delta_minus),
            omega_plus_hz: to_hz(self.omega_plus),
            omega_minus_hz: to_hz(self.omega_minus),
            gamma_spin_hz: to_hz(self.gamma_spin),
            n_atoms: self.n_atoms,
        }
    }

    pub fn validated(self) -> Result<Self> {
        let vals = [
            ("Gamma", self.gamma_atom),
            ("purcell", self.purcell),
            ("g", self.g),
            ("kappa", self.kappa),
            ("Delta_plus", self.delta_plus.abs()),
            ("Delta_minus", self.delta_minus.abs()),
            ("Omega_plus", self.omega_plus),
            ("Omega_minus", self.omega_minus),
            ("gamma_spin", self.gamma_spin),
        ];
        for (name, v) in vals {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Input(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.n_atoms == 0 {
            return Err(Error::Input("n_atoms must be positive".into()));
        }
        Ok(self)
    }

    fn branch(&self, b: Branch) -> (f64, f64) {
        match b {
            Branch::Plus => (self.omega_plus, self.delta_plus),
            Branch::Minus => (self.omega_minus, self.delta_minus),
        }
    }

    /// `g², Ω±² ≤ Δ±²/10` on both branches.
    pub fn large_detuning_valid(&self) -> bool {
        [Branch::Plus, Branch::Minus].iter().all(|&b| {
            let (o, d) = self.branch(b);
            let lim = d * d / 10.0;
            self.g * self.g <= lim && o * o <= lim
        })
    }
}

/// Single-atom Raman rate `P Γ Ω² / Δ²`.
pub fn raman_rate(p: &CavityParams, branch: Branch) -> Result<f64> {
    let (omega, delta) = p.branch(branch);
    if delta == 0.0 {
        return Err(Error::Input(format!("{branch:?} detuning is zero")));
    }
    Ok(p.purcell * p.gamma_atom * omega * omega / (delta * delta))
}

/// `e^{−2πi n cos θ (a/λ_c)}` per lattice column `n`.
pub fn laser_coefficients(theta: f64, columns: &[i64], lattice_over_wavelength: f64) -> Vec<C64> {
    let k = theta.cos() * lattice_over_wavelength;
    columns
        .iter()
        .map(|&n| {
            // the phase only matters modulo 2π; reduce before multiplying
            let turns = (n as f64 * k).rem_euclid(1.0);
            C64::from_polar(1.0, -TAU * turns)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Group {
    A,
    B,
    Ancilla,
}

/// Column `n ≡ 2 (mod 3)` is A, `n ≡ 1` is B and `n ≡ 0` the ancilla.
/// With `cos θ = 1/3` this reproduces `Ĵ₁⁺` and with `cos θ = 2/3` it
/// reproduces `Ĵ₂⁺`.
pub fn column_group(n: i64) -> Group {
    match n.rem_euclid(3) {
        2 => Group::A,
        1 => Group::B,
        _ => Group::Ancilla,
    }
}

/// `(c_A, c_B, c_β)` realised by a laser at angle `theta` under
/// [`column_group`], if every column of each group carries the same phase
/// over `columns` consecutive columns.
pub fn group_coefficients(theta: f64, lattice_over_wavelength: f64, columns: usize) -> Option<[C64; 3]> {
    let cols: Vec<i64> = (0..columns.max(3) as i64).collect();
    let c = laser_coefficients(theta, &cols, lattice_over_wavelength);
    let mut out: [Option<C64>; 3] = [None; 3];
    for (&n, v) in cols.iter().zip(c) {
        let slot = match column_group(n) {
            Group::A => 0,
            Group::B => 1,
            Group::Ancilla => 2,
        };
        match out[slot] {
            None => out[slot] = Some(v),
            Some(prev) if (prev - v).norm() < 1e-9 => {}
            Some(_) => return None,
        }
    }
    Some([out[0]?, out[1]?, out[2]?])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

/// One inequality at one regime endpoint; `ratio = lhs / rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clause {
    pub name: String,
    pub regime: String,
    pub lhs_hz: f64,
    pub rhs_hz: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub n_atoms: usize,
    pub factor: f64,
    pub lambda_h_hz: f64,
    pub lambda_i_initial_hz: f64,
    pub lambda_i_final_hz: f64,
    pub large_detuning_valid: bool,
    pub clauses: Vec<Clause>,
    pub notes: Vec<String>,
}

impl FeasibilityReport {
    pub fn worst(&self) -> Verdict {
        self.clauses.iter().map(|c| c.verdict).max_by_key(|v| *v as u8).unwrap_or(Verdict::Pass)
    }
}

/// Rates entering the check; `None` fields come from the parameters
/// (`Λ_h` from the minus branch, `Λ_i` from the plus branch, final
/// `Λ_i` = initial/N²).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateOverrides {
    pub lambda_h_hz: Option<f64>,
    pub lambda_i_initial_hz: Option<f64>,
    pub lambda_i_final_hz: Option<f64>,
}

/// `a ≪ b` with factor `f`: pass when `a·f ≤ b`, warn when `a < b`,
/// fail otherwise.
fn much_less(ratio: f64, factor: f64) -> Verdict {
    if ratio * factor <= 1.0 {
        Verdict::Pass
    } else if ratio < 1.0 {
        Verdict::Warn
    } else {
        Verdict::Fail
    }
}

fn less(ratio: f64) -> Verdict {
    if ratio < 1.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Checks `Λ_i⟨Ĵ₁⁻Ĵ₁⁺⟩ ≪ Λ_h⟨Ĵ_T⁺Ĵ_T⁻⟩ < κ` near the polarized state
/// (`⟨Ĵ_T⁺Ĵ_T⁻⟩ ~ N`, `⟨Ĵ₁⁻Ĵ₁⁺⟩ ~ N`, initial `Λ_i`) and near the
/// singlet (`~1`, `~N²/4`, final `Λ_i`), and `γ ≪ Λ_i` at both ends of
/// the ramp.
pub fn feasibility_check(p: &CavityParams, rates: &RateOverrides, factor: f64) -> Result<FeasibilityReport> {
    let p = p.validated()?;
    if !(factor >= 1.0) {
        return Err(Error::Input(format!("'≪' factor must be ≥ 1, got {factor}")));
    }
    let n = p.n_atoms as f64;
    let lh = rates.lambda_h_hz.map_or_else(|| raman_rate(&p, Branch::Minus).map(to_hz), Ok)?;
    let li0 = rates
        .lambda_i_initial_hz
        .map_or_else(|| raman_rate(&p, Branch::Plus).map(to_hz), Ok)?;
    let li1 = rates.lambda_i_final_hz.unwrap_or(li0 / (n * n));
    for (name, v) in [("Lambda_h", lh), ("Lambda_i initial", li0), ("Lambda_i final", li1)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Input(format!("{name} must be positive, got {v} Hz")));
        }
    }
    let kappa = to_hz(p.kappa);
    let gamma = to_hz(p.gamma_spin);
    let mut clauses = Vec::new();
    let mut push = |name: &str, regime: &str, lhs: f64, rhs: f64, verdict: fn(f64, f64) -> Verdict| {
        let ratio = lhs / rhs;
        clauses.push(Clause {
            name: name.into(),
            regime: regime.into(),
            lhs_hz: lhs,
            rhs_hz: rhs,
            ratio,
            verdict: verdict(ratio, factor),
        });
    };
    for (regime, jt, j1, li) in [("polarized", n, n, li0), ("singlet", 1.0, n * n / 4.0, li1)] {
        push("Lambda_i<J1-J1+> << Lambda_h<JT+JT->", regime, li * j1, lh * jt, much_less);
        push("Lambda_h<JT+JT-> < kappa", regime, lh * jt, kappa, |r, _| less(r));
    }
    push("gamma << Lambda_i", "ramp start", gamma, li0, much_less);
    push("gamma << Lambda_i", "ramp end", gamma, li1, much_less);

    let mut notes = Vec::new();
    if !p.large_detuning_valid() {
        notes.push("large-detuning condition g², Ω² ≤ Δ²/10 is violated".to_string());
    }
    notes.push(format!(
        "gamma/Lambda_i at the ramp end is {:.3}; the γ ≪ Λ_i requirement is quoted as satisfiable for N ~ O(100)",
        gamma / li1
    ));
    Ok(FeasibilityReport {
        n_atoms: p.n_atoms,
        factor,
        lambda_h_hz: lh,
        lambda_i_initial_hz: li0,
        lambda_i_final_hz: li1,
        large_detuning_valid: p.large_detuning_valid(),
        clauses,
        notes,
    })
}

/// Geometric ramp from `initial` to `initial/N²` in `steps` points.
pub fn ramp_schedule(n: usize, initial: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || n < 2 || !(initial > 0.0) || !initial.is_finite() {
        return Err(Error::Input(format!(
            "ramp needs steps ≥ 2, N ≥ 2 and a positive start (got {steps}, {n}, {initial})"
        )));
    }
    let fin = initial / (n * n) as f64;
    let ratio = (fin / initial).ln();
    let mut out: Vec<f64> = (0..steps)
        .map(|k| initial * (ratio * k as f64 / (steps - 1) as f64).exp())
        .collect();
    out[0] = initial;
    out[steps - 1] = fin;
    Ok(out)
}

pub fn write_schedule_csv<W: std::io::Write>(schedule_hz: &[f64], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "step,lambda_i_hz")?;
    for (k, v) in schedule_hz.iter().enumerate() {
        writeln!(w, "{k},{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// `θ` with `cos θ = c`.
pub fn angle_for_cosine(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}
