//! Dephasing and calibration-error scans on the qubit register.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use scs_core::export::fmt_f64;
use scs_core::pump_protocols::PumpConfig;
use scs_core::qubit_register::{default_settle_time, noise_run, write_scan_csv, NoiseConfig, OutcomeDiagnostics, ScanRow};

use crate::config::Config;
use crate::error::{CliError, InModule};
use crate::output::Artifacts;
use crate::params::{Kind, Param};

pub const FIG3: &[Param] = &[
    Param::new("N", Kind::Int, "8", "qubit count"),
    Param::new("ratio", Kind::Float, "100", "Lambda_h/Lambda_i"),
    Param::new("t_pump", Kind::Float, "0.75", "pump time, 1/Lambda_i"),
    Param::new("t_settle", Kind::OptFloat, "auto", "settling time with the raising drive off; auto = 10/Lambda_h"),
    Param::new("gamma", Kind::Floats, "0,0.01,0.03,0.1", "dephasing rates gamma/Lambda_i (eta = 0)"),
    Param::new("eta", Kind::Floats, "0,0.05,0.1", "calibration error amplitudes (gamma = 0)"),
    Param::new("trials", Kind::Int, "20", "random draws per nonzero eta; trial k uses seed + k"),
];

/// A run is fixed by `(γ, η, seed)`; the seed only matters when `η > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Key(u64, u64, u64);

impl Key {
    fn new(gamma: f64, eta: f64, seed: u64) -> Self {
        Key(gamma.to_bits(), eta.to_bits(), if eta == 0.0 { 0 } else { seed })
    }
}

struct Stat {
    mean: f64,
    sd: f64,
}

fn stat(xs: &[f64]) -> Stat {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Stat { mean, sd: var.sqrt() }
}

fn write_summary(w: &mut Vec<u8>, scan: &str, rows: &[ScanRow], gamma: f64, eta: f64) -> std::io::Result<()> {
    let mut outcomes: Vec<i32> = rows.iter().map(|r| r.diag.outcome.twice()).collect();
    outcomes.sort();
    outcomes.dedup();
    for o in outcomes {
        let d: Vec<&OutcomeDiagnostics> = rows.iter().filter(|r| r.diag.outcome.twice() == o).map(|r| &r.diag).collect();
        write!(w, "{scan},{},{},{o},{}", fmt_f64(gamma), fmt_f64(eta), d.len())?;
        let fields: [fn(&OutcomeDiagnostics) -> f64; 4] =
            [|x| x.probability, |x| x.log_neg_ab, |x| x.pair_log_neg, |x| x.fidelity];
        for f in fields {
            let s = stat(&d.iter().map(|x| f(x)).collect::<Vec<_>>());
            write!(w, ",{},{}", fmt_f64(s.mean), fmt_f64(s.sd))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn fig3(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let n = cfg.count("N")?;
    let ratio = cfg.float("ratio");
    let t_pump = cfg.float("t_pump");
    let trials = cfg.count("trials")?;
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let pc = PumpConfig::simplified_qubits(n, ratio, 1.0).in_module("pump_protocols")?;
    let t_settle = cfg.opt_float("t_settle").unwrap_or_else(|| default_settle_time(&pc));
    let gammas = cfg.floats("gamma");
    let etas = cfg.floats("eta");
    if gammas.iter().chain(&etas).any(|&x| x < 0.0) {
        return Err(CliError::Config("--gamma and --eta entries must be non-negative".into()));
    }

    let seeds = |eta: f64| -> Vec<u64> {
        if eta == 0.0 {
            vec![cfg.seed]
        } else {
            (0..trials as u64).map(|k| cfg.seed.wrapping_add(k)).collect()
        }
    };
    let mut keys: Vec<(f64, f64, u64)> = gammas.iter().map(|&g| (g, 0.0, cfg.seed)).collect();
    for &eta in &etas {
        keys.extend(seeds(eta).into_iter().map(|s| (0.0, eta, s)));
    }
    let mut seen = HashSet::new();
    let unique: Vec<(f64, f64, u64)> = keys.into_iter().filter(|k| seen.insert(Key::new(k.0, k.1, k.2))).collect();
    log::info!("fig3: {} register runs at N = {n}", unique.len());
    let results = unique
        .par_iter()
        .map(|&(gamma, eta, seed)| {
            let noise = NoiseConfig { gamma, eta, seed };
            let (_, diag) = noise_run(n, &pc, &noise, t_pump, t_settle).in_module("qubit_register")?;
            log::info!("fig3: done gamma = {gamma}, eta = {eta}, seed = {seed}");
            Ok((Key::new(gamma, eta, seed), diag))
        })
        .collect::<Result<HashMap<_, _>, CliError>>()?;

    let rows = |gamma: f64, eta: f64, seed: u64| -> Vec<ScanRow> {
        results[&Key::new(gamma, eta, seed)]
            .iter()
            .map(|&diag| ScanRow {
                gamma_over_lambda_i: gamma,
                eta,
                seed,
                diag,
            })
            .collect()
    };
    let gamma_rows: Vec<Vec<ScanRow>> = gammas.iter().map(|&g| rows(g, 0.0, cfg.seed)).collect();
    let eta_rows: Vec<Vec<ScanRow>> = etas
        .iter()
        .map(|&e| seeds(e).into_iter().flat_map(|s| rows(0.0, e, s)).collect())
        .collect();

    art.csv("fig3_gamma.csv", |w| write_scan_csv(&gamma_rows.concat(), w))?;
    art.csv("fig3_eta.csv", |w| write_scan_csv(&eta_rows.concat(), w))?;
    art.csv("fig3_summary.csv", |w| {
        write!(w, "scan,gamma_over_lambda_i,eta,outcome_2J,runs")?;
        for f in ["probability", "log_neg_AB", "pair_log_neg", "fidelity"] {
            write!(w, ",{f}_mean,{f}_sd")?;
        }
        writeln!(w)?;
        for (g, r) in gammas.iter().zip(&gamma_rows) {
            write_summary(w, "gamma", r, *g, 0.0)?;
        }
        for (e, r) in etas.iter().zip(&eta_rows) {
            write_summary(w, "eta", r, 0.0, *e)?;
        }
        Ok(())
    })?;

    let mut s = format!("N = {n}, Lambda_h/Lambda_i = {ratio}, t_pump = {t_pump}, settle = {t_settle}\n");
    let _ = writeln!(s, "{:>6} {:>6} {:>3} {:>8} {:>8} {:>8}", "gamma", "eta", "J", "p", "E(A|B)", "fidelity");
    let mut line = |g: f64, e: f64, r: &[ScanRow]| {
        for o in [0, 2, 4] {
            let d: Vec<&ScanRow> = r.iter().filter(|x| x.diag.outcome.twice() == o).collect();
            if d.is_empty() {
                continue;
            }
            let m = |f: fn(&ScanRow) -> f64| d.iter().map(|x| f(x)).sum::<f64>() / d.len() as f64;
            let _ = writeln!(
                s,
                "{g:>6} {e:>6} {:>3} {:>8.4} {:>8.4} {:>8.4}",
                o / 2,
                m(|x| x.diag.probability),
                m(|x| x.diag.log_neg_ab),
                m(|x| x.diag.fidelity)
            );
        }
    };
    for (g, r) in gammas.iter().zip(&gamma_rows) {
        line(*g, 0.0, r);
    }
    for (e, r) in etas.iter().zip(&eta_rows) {
        line(0.0, *e, r);
    }
    Ok(s.trim_end().to_string())
}
