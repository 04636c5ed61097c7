//! Steady-state tables, pump/repump trajectories and measurement cycles.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use scs_core::export::fmt_f64;
use scs_core::master_equation::{evolve, rate_equation_evolve, EvolveOptions, Trajectory};
use scs_core::pump_protocols::{
    analytic_steady_state, build_model, build_rate_model, default_j_max, degeneracy_aware_steady_state,
    polarized_populations, pump_measure_cycle, write_cycles_csv, CycleOptions, EvolveMode, PumpConfig, Scheme,
};
use scs_core::spin_algebra::HalfInt;

use super::{spin, SCHEME};
use crate::config::Config;
use crate::error::{CliError, InModule};
use crate::output::Artifacts;
use crate::params::{Kind, Param};

const MODE: Kind = Kind::Choice(&["rate", "lindblad"]);

pub const STEADY: &[Param] = &[
    Param::new("jA", Kind::Float, "5", "spin of group A"),
    Param::new("jB", Kind::Float, "5", "spin of group B"),
    Param::new("jbeta", Kind::Float, "5", "ancilla spin; must be 0 for the simplified scheme"),
    Param::new("scheme", SCHEME, "general", "pumping scheme"),
];

pub const FIG1A: &[Param] = &[
    Param::new("jA", Kind::Float, "5", "spin of group A"),
    Param::new("jB", Kind::Float, "5", "spin of group B"),
    Param::new("jbeta", Kind::Float, "5", "ancilla spin"),
    Param::new("ratio", Kind::Float, "5000", "Lambda_h/Lambda_i (Lindblad mode only)"),
    Param::new("t_project", Kind::Float, "0.4", "pump time before the measurement, 1/Lambda_i"),
    Param::new("project_J", Kind::Float, "1", "total spin kept by the measurement"),
    Param::new("t_repump", Kind::Float, "0.4", "repump time after the measurement, 1/Lambda_i"),
    Param::new("samples", Kind::Int, "200", "samples per phase"),
    Param::new("mode", MODE, "rate", "rate equations or full Lindblad evolution"),
];

pub const FIG1B: &[Param] = &[
    Param::new("N", Kind::Ints, "40", "qubit counts"),
    Param::new("ratio", Kind::Floats, "1000,4000,16000", "Lambda_h/Lambda_i values (Lindblad mode only)"),
    Param::new("t_final", Kind::Float, "1", "pump time, 1/Lambda_i"),
    Param::new("samples", Kind::Int, "100", "samples per curve"),
    Param::new("mode", MODE, "rate", "rate equations (Lambda_h/Lambda_i -> inf) or full Lindblad evolution"),
];

pub const CYCLES: &[Param] = &[
    Param::new("jA", Kind::Float, "5", "spin of group A"),
    Param::new("jB", Kind::Float, "5", "spin of group B"),
    Param::new("jbeta", Kind::Float, "5", "ancilla spin; must be 0 for the simplified scheme"),
    Param::new("scheme", SCHEME, "general", "pumping scheme"),
    Param::new("ratio", Kind::Float, "5000", "Lambda_h/Lambda_i (Lindblad mode only)"),
    Param::new("n_cycles", Kind::Int, "30", "measure/repump cycles"),
    Param::new("mode", Kind::Choice(&["ideal", "rate", "lindblad"]), "ideal", "how each cycle's state is produced"),
    Param::new("pump_time", Kind::OptFloat, "auto", "first pump, 1/Lambda_i"),
    Param::new("repump_time", Kind::OptFloat, "auto", "later pumps, 1/Lambda_i"),
];

fn pump_config(cfg: &Config, ratio: f64) -> Result<PumpConfig, CliError> {
    let (ja, jb, jbeta) = (spin(cfg, "jA")?, spin(cfg, "jB")?, spin(cfg, "jbeta")?);
    let scheme = match cfg.experiment.as_str() {
        "fig1a" => "general",
        _ => cfg.choice("scheme"),
    };
    if !(ratio > 0.0) {
        return Err(CliError::Config(format!("--ratio must be positive, got {ratio}")));
    }
    match scheme {
        "general" => Ok(PumpConfig::general(ja, jb, jbeta, ratio, 1.0)),
        _ if jbeta != HalfInt::ZERO => {
            Err(CliError::Config("the simplified scheme has no ancilla; pass --jbeta 0".into()))
        }
        _ => Ok(PumpConfig::simplified(ja, jb, ratio, 1.0)),
    }
}

fn samples(cfg: &Config) -> Result<usize, CliError> {
    match cfg.count("samples")? {
        0 => Err(CliError::Config("--samples must be at least 1".into())),
        n => Ok(n),
    }
}

fn non_negative(cfg: &Config, name: &str) -> Result<f64, CliError> {
    let t = cfg.float(name);
    if t >= 0.0 {
        Ok(t)
    } else {
        Err(CliError::Config(format!("--{name} must be non-negative, got {t}")))
    }
}

pub fn steady(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let pc = pump_config(cfg, 1.0)?;
    let analytic = analytic_steady_state(pc.scheme, default_j_max(&pc), pc.spin_sum());
    let basis = pc.basis().in_module("spin_algebra")?;
    let degenerate = degeneracy_aware_steady_state(&basis);
    let (_, rm) = build_rate_model(&pc).in_module("pump_protocols")?;
    let rate = rm.sector_populations(&rm.steady_state().in_module("master_equation")?);

    let mut totals: Vec<HalfInt> = analytic.populations.iter().map(|x| x.0).collect();
    totals.extend(rate.iter().map(|x| x.0));
    totals.sort();
    totals.dedup();
    let look = |v: &[(HalfInt, f64)], j: HalfInt| v.iter().find(|x| x.0 == j).map(|x| x.1);
    let cell = |x: Option<f64>| x.map_or(String::new(), fmt_f64);

    art.csv("steady.csv", |w| {
        writeln!(w, "J,population,degeneracy_aware_population,rate_model_population")?;
        for &j in &totals {
            writeln!(
                w,
                "{j},{},{},{}",
                cell(look(&analytic.populations, j)),
                cell(look(&degenerate, j)),
                cell(look(&rate, j))
            )?;
        }
        Ok(())
    })?;

    let mut s = format!("{:>4}  {:>10}  {:>10}  {:>10}\n", "J", "analytic", "degeneracy", "rate model");
    for &j in totals.iter().take(6) {
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            s,
            "{:>4}  {:>10}  {:>10}  {:>10}",
            j.to_string(),
            f(look(&analytic.populations, j)),
            f(look(&degenerate, j)),
            f(look(&rate, j))
        );
    }
    let _ = write!(s, "lowest-spin population {:.4}", analytic.ground);
    Ok(s)
}

fn write_trajectory(w: &mut Vec<u8>, phase: &str, offset: f64, tr: &Trajectory) -> std::io::Result<()> {
    for i in 0..tr.len() {
        let (t, row) = tr.row(i);
        write!(w, "{phase},{}", fmt_f64(t + offset))?;
        for v in row {
            write!(w, ",{}", fmt_f64(*v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn fig1a(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let pc = pump_config(cfg, cfg.float("ratio"))?;
    let (tp, tr) = (non_negative(cfg, "t_project")?, non_negative(cfg, "t_repump")?);
    let target = spin(cfg, "project_J")?;
    let n = samples(cfg)?;
    let zero = |j: HalfInt| scs_core::Error::ZeroProbability(format!("J = {j}"));

    let (pump, repump, prob) = match cfg.choice("mode") {
        "rate" => {
            let (basis, rm) = build_rate_model(&pc).in_module("pump_protocols")?;
            let pump = rate_equation_evolve(&rm, &polarized_populations(&basis, &rm), tp, n).in_module("master_equation")?;
            let mut p: Vec<f64> = rm
                .labels()
                .iter()
                .zip(&pump.final_populations)
                .map(|(l, &v)| if l.total == target { v.max(0.0) } else { 0.0 })
                .collect();
            let prob: f64 = p.iter().sum();
            if !(prob > 0.0) {
                return Err(zero(target)).in_module("master_equation");
            }
            p.iter_mut().for_each(|v| *v /= prob);
            let repump = rate_equation_evolve(&rm, &p, tr, n).in_module("master_equation")?;
            (pump.trajectory, repump.trajectory, prob)
        }
        _ => {
            let setup = build_model(&pc).in_module("pump_protocols")?;
            let obs = setup.sector_observables();
            let opts = EvolveOptions {
                n_samples: n,
                check_positivity: false,
                ..Default::default()
            };
            let pump = evolve(&setup.model, &setup.polarized_state(), tp, &opts, &obs).in_module("master_equation")?;
            let keep: Vec<usize> = (0..setup.basis.dim()).filter(|&i| setup.basis.state(i).total == target).collect();
            let (prob, post) = pump.final_state.project_onto(&keep).in_module("master_equation")?;
            let repump = evolve(&setup.model, &post, tr, &opts, &obs).in_module("master_equation")?;
            (pump.trajectory, repump.trajectory, prob)
        }
    };

    art.csv("fig1a.csv", |w| {
        writeln!(w, "phase,t,{}", pump.names().join(","))?;
        write_trajectory(w, "pump", 0.0, &pump)?;
        write_trajectory(w, "repump", tp, &repump)
    })?;

    let analytic = analytic_steady_state(pc.scheme, default_j_max(&pc), pc.spin_sum());
    let ground = pump.names()[0].clone();
    Ok(format!(
        "{ground} at t = {tp}: {:.4} (analytic steady state {:.4})\n\
         measured J = {target} with probability {prob:.4}\n\
         {ground} after repumping for {tr}: {:.4}",
        pump.last(&ground).unwrap_or(f64::NAN),
        analytic.ground,
        repump.last(&ground).unwrap_or(f64::NAN),
    ))
}

struct Curve {
    n: usize,
    ratio: Option<f64>,
    totals: Vec<HalfInt>,
    trajectory: Trajectory,
}

fn fig1b_curve(n: usize, ratio: Option<f64>, t: f64, samples: usize) -> Result<Curve, CliError> {
    match ratio {
        None => {
            let pc = PumpConfig::simplified_qubits(n, 1.0, 1.0).in_module("pump_protocols")?;
            let (basis, rm) = build_rate_model(&pc).in_module("pump_protocols")?;
            let ev = rate_equation_evolve(&rm, &polarized_populations(&basis, &rm), t, samples)
                .in_module("master_equation")?;
            Ok(Curve {
                n,
                ratio,
                totals: rm.totals(),
                trajectory: ev.trajectory,
            })
        }
        Some(r) => {
            let pc = PumpConfig::simplified_qubits(n, r, 1.0).in_module("pump_protocols")?;
            let setup = build_model(&pc).in_module("pump_protocols")?;
            let opts = EvolveOptions {
                n_samples: samples,
                check_positivity: false,
                ..Default::default()
            };
            let ev = evolve(&setup.model, &setup.polarized_state(), t, &opts, &setup.sector_observables())
                .in_module("master_equation")?;
            Ok(Curve {
                n,
                ratio,
                totals: setup.basis.totals(),
                trajectory: ev.trajectory,
            })
        }
    }
}

pub fn fig1b(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let ns = cfg.counts("N")?;
    let t = non_negative(cfg, "t_final")?;
    let n_samples = samples(cfg)?;
    let ratios: Vec<Option<f64>> = match cfg.choice("mode") {
        "rate" => vec![None],
        _ => cfg.floats("ratio").into_iter().map(Some).collect(),
    };
    let jobs: Vec<(usize, Option<f64>)> = ns.iter().flat_map(|&n| ratios.iter().map(move |&r| (n, r))).collect();
    let curves = jobs
        .par_iter()
        .map(|&(n, r)| fig1b_curve(n, r, t, n_samples))
        .collect::<Result<Vec<_>, _>>()?;

    art.csv("fig1b.csv", |w| {
        writeln!(w, "N,ratio,t,J,population")?;
        for c in &curves {
            let ratio = c.ratio.map_or("inf".to_string(), fmt_f64);
            for i in 0..c.trajectory.len() {
                let (t, row) = c.trajectory.row(i);
                for (j, p) in c.totals.iter().zip(row) {
                    writeln!(w, "{},{ratio},{},{j},{}", c.n, fmt_f64(t), fmt_f64(*p))?;
                }
            }
        }
        Ok(())
    })?;

    let mut s = String::new();
    for c in &curves {
        let last = c.trajectory.len() - 1;
        let (_, row) = c.trajectory.row(last);
        let shown: Vec<String> = row.iter().take(3).map(|p| format!("{p:.4}")).collect();
        let ratio = c.ratio.map_or("inf".to_string(), |r| r.to_string());
        let _ = writeln!(s, "N = {}, ratio {ratio}: P(J = 0, 1, 2) at t = {t} is {}", c.n, shown.join(", "));
    }
    Ok(s.trim_end().to_string())
}

pub fn cycles(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let pc = pump_config(cfg, cfg.float("ratio"))?;
    let mode = match cfg.choice("mode") {
        "ideal" => EvolveMode::IdealSteadyState,
        "rate" => EvolveMode::Rate,
        _ => EvolveMode::Lindblad,
    };
    let opts = CycleOptions {
        n_cycles: cfg.count("n_cycles")?,
        mode,
        pump_time: cfg.opt_float("pump_time"),
        repump_time: cfg.opt_float("repump_time"),
        ..Default::default()
    };
    let records = pump_measure_cycle(&pc, &opts).in_module("pump_protocols")?;
    art.csv("cycles.csv", |w| write_cycles_csv(&records, w))?;
    let last = records.last().expect("at least one cycle");
    let mut s = format!(
        "first cycle succeeds with p = {:.4}; failure after {} cycles: {:.3e}",
        records[0].probability, last.cycle_index, last.cumulative_failure
    );
    if pc.scheme == Scheme::General && mode == EvolveMode::IdealSteadyState {
        let p0 = analytic_steady_state(pc.scheme, default_j_max(&pc), pc.spin_sum()).ground;
        let _ = write!(s, " ((1 - {p0:.4})^{} = {:.3e})", last.cycle_index, (1.0 - p0).powi(last.cycle_index as i32));
    }
    Ok(s)
}
