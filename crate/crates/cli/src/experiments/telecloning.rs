//! Telecloning fidelity curves and Bloch-sphere averages.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use scs_core::export::fmt_f64;
use scs_core::spin_algebra::HalfInt;
use scs_core::telecloning::{
    average_fidelity, average_fidelity_symmetric, fidelity_formulas, resource_state, teleclone_simulate,
    teleclone_symmetric, BlochPoint, TelecloneResult,
};

use crate::config::Config;
use crate::error::{CliError, InModule};
use crate::output::Artifacts;
use crate::params::{Kind, Param};

const METHOD: Kind = Kind::Choice(&["symmetric", "full"]);

pub const FIG2A: &[Param] = &[
    Param::new("N", Kind::Int, "40", "qubit count (N/2 clones)"),
    Param::new("J", Kind::Ints, "0..3", "total spins of the resource states"),
    Param::new("theta_points", Kind::Int, "41", "polar angles on [0, pi]; odd counts include pi/2"),
    Param::new("phi", Kind::Float, "0", "azimuth of the input state"),
    Param::new("method", METHOD, "symmetric", "Dicke-basis or full state-vector simulation"),
];

pub const FIG2B: &[Param] = &[
    Param::new("N", Kind::Ints, "4,8,12,16,20,24,28,32,36,40", "qubit counts"),
    Param::new("J", Kind::Ints, "0..3", "total spins; entries above N/2 are skipped"),
    Param::new("method", METHOD, "symmetric", "Dicke-basis or full state-vector simulation"),
];

fn integer_spin(j: i64) -> Result<HalfInt, CliError> {
    i32::try_from(j)
        .ok()
        .filter(|&j| j >= 0)
        .map(HalfInt::integer)
        .ok_or_else(|| CliError::Config(format!("--J entries must be non-negative integers, got {j}")))
}

fn simulate(method: &str, n: usize, j: HalfInt, p: BlochPoint) -> Result<TelecloneResult, CliError> {
    match method {
        "full" => teleclone_simulate(&resource_state(n, j).in_module("telecloning")?, p).in_module("telecloning"),
        _ => teleclone_symmetric(n, j, p).in_module("telecloning"),
    }
}

pub fn fig2a(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let n = cfg.count("N")?;
    let js = cfg.ints("J").into_iter().map(integer_spin).collect::<Result<Vec<_>, _>>()?;
    let points = cfg.count("theta_points")?;
    if points < 2 {
        return Err(CliError::Config("--theta_points must be at least 2".into()));
    }
    let phi = cfg.float("phi");
    let method = cfg.choice("method");
    let formulas = js
        .iter()
        .map(|&j| fidelity_formulas(n, j))
        .collect::<scs_core::Result<Vec<_>>>()
        .in_module("telecloning")?;
    // i/(points−1) = 1/2 exactly at the midpoint, so θ = π/2 is on the grid
    let thetas: Vec<f64> = (0..points).map(|i| PI * (i as f64 / (points - 1) as f64)).collect();
    let jobs: Vec<(usize, f64)> = (0..js.len()).flat_map(|k| thetas.iter().map(move |&t| (k, t))).collect();
    let results = jobs
        .par_iter()
        .map(|&(k, theta)| {
            let p = BlochPoint::new(theta, phi).in_module("telecloning")?;
            simulate(method, n, js[k], p)
        })
        .collect::<Result<Vec<_>, _>>()?;

    art.csv("fig2a.csv", |w| {
        write!(w, "N,J,theta,phi,mean_fidelity")?;
        for k in 0..4 {
            write!(w, ",p_{0}{1},F_{0}{1}", k >> 1, k & 1)?;
        }
        writeln!(w, ",F0,FJmax")?;
        for (&(k, _), r) in jobs.iter().zip(&results) {
            write!(
                w,
                "{n},{},{},{},{}",
                js[k],
                fmt_f64(r.input.theta),
                fmt_f64(r.input.phi),
                fmt_f64(r.mean_fidelity)
            )?;
            for o in &r.outcomes {
                write!(w, ",{},{}", fmt_f64(o.probability), fmt_f64(o.mean_clone_fidelity()))?;
            }
            writeln!(w, ",{},{}", fmt_f64(formulas[k].0), fmt_f64(formulas[k].1))?;
        }
        Ok(())
    })?;

    let mut s = format!("1 -> {} telecloning\n", n / 2);
    for (k, j) in js.iter().enumerate() {
        let curve: Vec<f64> = jobs
            .iter()
            .zip(&results)
            .filter(|(job, _)| job.0 == k)
            .map(|(_, r)| r.mean_fidelity)
            .collect();
        let equator = (points % 2 == 1).then(|| curve[(points - 1) / 2]);
        let _ = writeln!(
            s,
            "J = {j}: F(0) = {:.4}, F(pi/2) = {}, F_J^max = {:.4}",
            curve[0],
            equator.map_or("-".to_string(), |f| format!("{f:.4}")),
            formulas[k].1
        );
    }
    Ok(s.trim_end().to_string())
}

pub fn fig2b(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let ns = cfg.counts("N")?;
    let js = cfg.ints("J").into_iter().map(integer_spin).collect::<Result<Vec<_>, _>>()?;
    let method = cfg.choice("method");
    let jobs: Vec<(usize, HalfInt)> = ns
        .iter()
        .flat_map(|&n| js.iter().filter(move |j| j.twice() as usize <= n).map(move |&j| (n, j)))
        .collect();
    let skipped = ns.len() * js.len() - jobs.len();
    let rows = jobs
        .par_iter()
        .map(|&(n, j)| {
            let avg = match method {
                "full" => average_fidelity(&resource_state(n, j).in_module("telecloning")?),
                _ => average_fidelity_symmetric(n, j),
            }
            .in_module("telecloning")?;
            let (f0, fmax) = fidelity_formulas(n, j).in_module("telecloning")?;
            Ok((n, j, avg, f0, fmax))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    art.csv("fig2b.csv", |w| {
        writeln!(w, "N,J,bloch_average,F0,FJmax")?;
        for (n, j, avg, f0, fmax) in &rows {
            writeln!(w, "{n},{j},{},{},{}", fmt_f64(*avg), fmt_f64(*f0), fmt_f64(*fmax))?;
        }
        Ok(())
    })?;

    let mut s = String::new();
    for (n, j, avg, f0, _) in &rows {
        let _ = writeln!(s, "N = {n:>3}, J = {j}: average {avg:.4} (F0 = {f0:.4})");
    }
    if skipped > 0 {
        let _ = writeln!(s, "skipped {skipped} (N, J) pairs with J > N/2");
    }
    Ok(s.trim_end().to_string())
}
