//! Telecloning `1 → N/2` with the resource `|J, −J, N/4, N/4⟩`: a Bell
//! measurement on the input and one port qubit of A, then the same Pauli
//! correction on every receiver in B.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::qubit_register::{scs_state, PureState};
use crate::spin_algebra::{clebsch_gordan, HalfInt};

/// Input state `cos(θ/2)|0⟩ + sin(θ/2) e^{iφ}|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    /// `φ` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::Input(format!("θ = {theta} outside [0, π] or φ = {phi} not finite")));
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(std::f64::consts::TAU),
        })
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [
            C64::new((self.theta / 2.0).cos(), 0.0),
            C64::from_polar((self.theta / 2.0).sin(), self.phi),
        ]
    }
}

/// One Bell outcome `(b₁ b₂)`, encoded as `2 b₁ + b₂`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TelecloneOutcome {
    pub bell_outcome: u8,
    pub probability: f64,
    pub clone_fidelities: Vec<f64>,
}

impl TelecloneOutcome {
    pub fn mean_clone_fidelity(&self) -> f64 {
        self.clone_fidelities.iter().sum::<f64>() / self.clone_fidelities.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TelecloneResult {
    pub input: BlochPoint,
    pub outcomes: Vec<TelecloneOutcome>,
    /// Outcome-weighted mean of the per-clone fidelities.
    pub mean_fidelity: f64,
}

/// `|J, −J, n/4, n/4⟩`.
pub fn resource_state(n: usize, j: HalfInt) -> Result<PureState> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Input(format!("telecloning resource needs an even qubit count, got {n}")));
    }
    if j.twice() < 0 || j.twice() % 2 != 0 || j.twice() as usize > n {
        return Err(Error::Input(format!("J = {j} is not reachable with j_A = j_B = {}/4", n)));
    }
    scs_state(n, j)
}

/// `F₀ = (2N+2)/(3N)` and the equatorial maximum
/// `F_J^max = ((3J+4)N² + 4(J+1)N − 4J(J+1)(J+2)) / (2(2J+3)N²)`.
pub fn fidelity_formulas(n: usize, j: HalfInt) -> Result<(f64, f64)> {
    if n == 0 || n % 2 != 0 || j.twice() < 0 {
        return Err(Error::Input(format!("need even N > 0 and J ≥ 0 (got N = {n}, J = {j})")));
    }
    let nn = n as f64;
    let jj = j.value();
    let f0 = (2.0 * nn + 2.0) / (3.0 * nn);
    let fmax = ((3.0 * jj + 4.0) * nn * nn + 4.0 * (jj + 1.0) * nn - 4.0 * jj * (jj + 1.0) * (jj + 2.0))
        / (2.0 * (2.0 * jj + 3.0) * nn * nn);
    Ok((f0, fmax))
}

type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Bell state `(|0 b₂⟩ + (−1)^{b₁} |1 b̄₂⟩)/√2` as amplitudes over `|x p⟩`.
fn bell_state(outcome: u8) -> [C64; 4] {
    let (b1, b2) = ((outcome >> 1) & 1, outcome & 1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [ZERO; 4];
    v[b2 as usize] = C64::new(s, 0.0);
    v[2 | (1 - b2 as usize)] = C64::new(if b1 == 1 { -s } else { s }, 0.0);
    v
}

/// Receiver correction for outcome `(b₁ b₂)`: `Z^{b₁} X^{b₂}` composed
/// with `Y`, which undoes the A–B anti-alignment of the resource.
fn correction(outcome: u8) -> Mat2 {
    let x: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
    let z: Mat2 = [[ONE, ZERO], [ZERO, -ONE]];
    let y: Mat2 = [[ZERO, -C64::i()], [C64::i(), ZERO]];
    let mut c: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
    if outcome & 2 != 0 {
        c = matmul2(&c, &z);
    }
    if outcome & 1 != 0 {
        c = matmul2(&c, &x);
    }
    matmul2(&c, &y)
}

/// `⟨φ|C ρ C†|φ⟩ / p` for an unnormalised receiver state `ρ`.
fn clone_fidelity(rho: &Mat2, corr: &Mat2, target: &[C64; 2], prob: f64) -> f64 {
    let adj = [[corr[0][0].conj(), corr[1][0].conj()], [corr[0][1].conj(), corr[1][1].conj()]];
    let cr = matmul2(&matmul2(corr, rho), &adj);
    let mut f = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            f += target[i].conj() * cr[i][j] * target[j];
        }
    }
    (f.re / prob).clamp(0.0, 1.0)
}

/// `teleclone_simulate_with_port` with qubit 0 as the port.
pub fn teleclone_simulate(resource: &PureState, input: BlochPoint) -> Result<TelecloneResult> {
    teleclone_simulate_with_port(resource, input, 0)
}

/// Runs the protocol with `port ∈ A`; every outcome and every receiver
/// in B is reported.
pub fn teleclone_simulate_with_port(resource: &PureState, input: BlochPoint, port: usize) -> Result<TelecloneResult> {
    let n = resource.n_qubits();
    if n < 2 || n % 2 != 0 {
        return Err(Error::Input(format!("resource must have an even qubit count, got {n}")));
    }
    if port >= n / 2 {
        return Err(Error::Input(format!("port {port} is not in A (qubits 0..{})", n / 2)));
    }
    let psi = resource.amplitudes();
    let inp = input.amplitudes();
    let m = n - 1;
    let port_mask = 1usize << (n - 1 - port);
    // resource index with the port bit removed
    let squeeze = |idx: usize| {
        let hi = (idx >> (n - port)) << (n - 1 - port);
        hi | (idx & (port_mask - 1))
    };

    let mut outcomes = Vec::with_capacity(4);
    let mut mean = 0.0;
    for k in 0..4u8 {
        let bell = bell_state(k);
        let mut rest = vec![ZERO; 1 << m];
        for (idx, &a) in psi.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let p = usize::from(idx & port_mask != 0);
            let r = squeeze(idx);
            for (x, &ix) in inp.iter().enumerate() {
                rest[r] += bell[2 * x + p].conj() * ix * a;
            }
        }
        let prob: f64 = rest.iter().map(|a| a.norm_sqr()).sum();
        let corr = correction(k);
        let mut fids = Vec::with_capacity(n / 2);
        for recv in n / 2..n {
            if prob < 1e-300 {
                fids.push(0.0);
                continue;
            }
            // receiver position inside the (n−1)-qubit remainder
            let q = recv - 1;
            let bitm = 1usize << (m - 1 - q);
            let mut rho: Mat2 = [[ZERO; 2]; 2];
            for (i, &a) in rest.iter().enumerate() {
                if i & bitm == 0 {
                    let b = rest[i | bitm];
                    rho[0][0] += a * a.conj();
                    rho[0][1] += a * b.conj();
                    rho[1][0] += b * a.conj();
                    rho[1][1] += b * b.conj();
                }
            }
            fids.push(clone_fidelity(&rho, &corr, &inp, prob));
        }
        let out = TelecloneOutcome {
            bell_outcome: k,
            probability: prob,
            clone_fidelities: fids,
        };
        mean += prob * out.mean_clone_fidelity();
        outcomes.push(out);
    }
    Ok(TelecloneResult {
        input,
        outcomes,
        mean_fidelity: mean,
    })
}

/// Largest `N` accepted by the Dicke-basis simulation.
pub const SYMMETRIC_CAP: usize = 2000;

/// The same protocol as [`teleclone_simulate`], carried out in the Dicke
/// bases of A and B. The resource is symmetric within each group, so the
/// cost is polynomial in `N` and 40-qubit registers are reachable.
pub fn teleclone_symmetric(n: usize, j: HalfInt, input: BlochPoint) -> Result<TelecloneResult> {
    if n < 2 || n % 2 != 0 || n > SYMMETRIC_CAP {
        return Err(Error::Input(format!("need an even N in 2..={SYMMETRIC_CAP}, got {n}")));
    }
    let na = n / 2;
    let jg = HalfInt::from_twice(na as i32);
    if j.twice() < 0 || j.twice() % 2 != 0 || j.twice() as usize > n {
        return Err(Error::Input(format!("J = {j} is not reachable with j_A = j_B = {n}/4")));
    }
    // resource amplitudes on |D_kA⟩|D_kB⟩
    let mu = -j;
    let c = |ka: usize, kb: usize| -> f64 {
        let ma = HalfInt::from_twice(2 * ka as i32 - na as i32);
        let mb = HalfInt::from_twice(2 * kb as i32 - na as i32);
        if ma + mb != mu {
            return 0.0;
        }
        clebsch_gordan(jg, ma, jg, mb, j, mu)
    };
    let coeff: Vec<Vec<f64>> = (0..=na).map(|ka| (0..=na).map(|kb| c(ka, kb)).collect()).collect();
    let inp = input.amplitudes();
    let nf = na as f64;
    let mut outcomes = Vec::with_capacity(4);
    let mut mean = 0.0;
    for k in 0..4u8 {
        let bell = bell_state(k);
        let corr = correction(k);
        let mut prob = 0.0;
        let mut rho: Mat2 = [[ZERO; 2]; 2];
        // A' = A without the port holds na − 1 qubits
        for kr in 0..na {
            let v: Vec<C64> = (0..=na)
                .map(|kb| {
                    let up = coeff[kr + 1][kb] * ((kr + 1) as f64 / nf).sqrt();
                    let down = coeff[kr][kb] * ((na - kr) as f64 / nf).sqrt();
                    (0..2)
                        .map(|x| inp[x] * (bell[2 * x].conj() * down + bell[2 * x + 1].conj() * up))
                        .sum()
                })
                .collect();
            for (kb, a) in v.iter().enumerate() {
                let w = a.norm_sqr();
                prob += w;
                rho[0][0] += w * (na - kb) as f64 / nf;
                rho[1][1] += w * kb as f64 / nf;
                if kb < na {
                    rho[0][1] += a * v[kb + 1].conj() * (((kb + 1) * (na - kb)) as f64).sqrt() / nf;
                }
            }
        }
        rho[1][0] = rho[0][1].conj();
        let f = if prob < 1e-300 { 0.0 } else { clone_fidelity(&rho, &corr, &inp, prob) };
        mean += prob * f;
        outcomes.push(TelecloneOutcome {
            bell_outcome: k,
            probability: prob,
            clone_fidelities: vec![f; na],
        });
    }
    Ok(TelecloneResult {
        input,
        outcomes,
        mean_fidelity: mean,
    })
}

/// Sphere-averaged fidelity from the Dicke-basis simulation.
pub fn average_fidelity_symmetric(n: usize, j: HalfInt) -> Result<f64> {
    bloch_average(|p| Ok(teleclone_symmetric(n, j, p)?.mean_fidelity))
}

/// Uniform average over the Bloch sphere: Gauss–Legendre in `cos θ`. The
/// `φ` direction uses a 16-point trapezoid rule unless sampled values
/// are `φ`-independent to `1e-9`, in which case `φ = 0` is used.
pub fn bloch_average<F>(mut f: F) -> Result<f64>
where
    F: FnMut(BlochPoint) -> Result<f64>,
{
    bloch_average_with(NonZeroUsize::new(64).expect("nonzero"), &mut f)
}

pub fn bloch_average_with<F>(nodes: NonZeroUsize, f: &mut F) -> Result<f64>
where
    F: FnMut(BlochPoint) -> Result<f64>,
{
    let mut phi_free = true;
    'probe: for theta in [0.4, 1.3, 2.2] {
        let f0 = f(BlochPoint::new(theta, 0.0)?)?;
        for phi in [0.7, 2.9, 4.4] {
            if (f(BlochPoint::new(theta, phi)?)? - f0).abs() > 1e-9 {
                phi_free = false;
                break 'probe;
            }
        }
    }
    let n_phi = if phi_free { 1 } else { 16 };
    let quad = GaussLegendre::new(nodes);
    let mut err = None;
    let total = quad.integrate(-1.0, 1.0, |x| {
        let theta = x.clamp(-1.0, 1.0).acos();
        let mut s = 0.0;
        for k in 0..n_phi {
            let phi = std::f64::consts::TAU * k as f64 / n_phi as f64;
            match BlochPoint::new(theta, phi).and_then(&mut *f) {
                Ok(v) => s += v,
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        }
        s / n_phi as f64
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total / 2.0),
    }
}

/// Sphere-averaged telecloning fidelity for one resource.
pub fn average_fidelity(resource: &PureState) -> Result<f64> {
    bloch_average(|p| Ok(teleclone_simulate(resource, p)?.mean_fidelity))
}

pub fn write_curve_csv<W: std::io::Write>(n: usize, j: HalfInt, rows: &[TelecloneResult], w: &mut W) -> std::io::Result<()> {
    write!(w, "theta,phi,J,N,mean_fidelity")?;
    for k in 0..4 {
        write!(w, ",p_{0}{1},F_{0}{1}", k >> 1, k & 1)?;
    }
    writeln!(w)?;
    for r in rows {
        write!(
            w,
            "{},{},{},{},{}",
            fmt_f64(r.input.theta),
            fmt_f64(r.input.phi),
            j,
            n,
            fmt_f64(r.mean_fidelity)
        )?;
        for o in &r.outcomes {
            write!(w, ",{},{}", fmt_f64(o.probability), fmt_f64(o.mean_clone_fidelity()))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `N,J,F0,FJmax` rows.
pub fn write_formula_csv<W: std::io::Write>(rows: &[(usize, HalfInt)], w: &mut W) -> Result<()> {
    writeln!(w, "N,J,F0,FJmax")?;
    for &(n, j) in rows {
        let (f0, fm) = fidelity_formulas(n, j)?;
        writeln!(w, "{n},{j},{},{}", fmt_f64(f0), fmt_f64(fm))?;
    }
    Ok(())
}
