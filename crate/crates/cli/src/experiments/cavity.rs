//! Cavity-QED rate arithmetic, feasibility and laser patterns.

use std::fmt::Write as _;
use std::io::Write;

use scs_core::cavity_planner::{
    angle_for_cosine, column_group, feasibility_check, group_coefficients, laser_coefficients, ramp_schedule,
    raman_rate, to_hz, write_schedule_csv, Branch, CavityParams, RateOverrides,
};
use scs_core::export::fmt_f64;
use serde_json::Map;

use crate::config::Config;
use crate::error::{CliError, InModule};
use crate::output::Artifacts;
use crate::params::{Kind, Param};

pub const CAVITY: &[Param] = &[
    Param::new("N", Kind::Int, "100", "atom count"),
    Param::new("factor", Kind::Float, "10", "margin required by each '<<' clause"),
    Param::new("gamma_atom_hz", Kind::OptFloat, "auto", "excited-state linewidth; auto = Cs preset"),
    Param::new("purcell", Kind::OptFloat, "auto", "Purcell factor"),
    Param::new("g_hz", Kind::OptFloat, "auto", "atom-cavity coupling"),
    Param::new("kappa_hz", Kind::OptFloat, "auto", "cavity linewidth"),
    Param::new("delta_plus_hz", Kind::OptFloat, "auto", "detuning of the raising branch"),
    Param::new("delta_minus_hz", Kind::OptFloat, "auto", "detuning of the lowering branch"),
    Param::new("omega_plus_hz", Kind::OptFloat, "auto", "Rabi frequency of the raising branch"),
    Param::new("omega_minus_hz", Kind::OptFloat, "auto", "Rabi frequency of the lowering branch"),
    Param::new("gamma_spin_hz", Kind::OptFloat, "auto", "spin dephasing rate"),
    Param::new("lambda_h_hz", Kind::OptFloat, "auto", "override for Lambda_h"),
    Param::new("lambda_i_initial_hz", Kind::OptFloat, "auto", "override for the initial Lambda_i"),
    Param::new("lambda_i_final_hz", Kind::OptFloat, "auto", "override for the final Lambda_i; auto = initial/N^2"),
    Param::new("ramp_steps", Kind::Int, "20", "points of the Lambda_i ramp"),
    Param::new("cos_theta", Kind::Floats, "0,1/3,2/3", "pump-laser angles as cos(theta)"),
    Param::new("lattice_over_wavelength", Kind::Float, "1", "lattice constant over cavity wavelength"),
    Param::new("columns", Kind::Int, "9", "lattice columns in the laser-pattern table"),
];

fn params(cfg: &Config) -> Result<CavityParams, CliError> {
    let mut p = CavityParams::cesium(cfg.count("N")?).to_hz();
    let set = |field: &mut f64, name: &str| {
        if let Some(v) = cfg.opt_float(name) {
            *field = v;
        }
    };
    set(&mut p.gamma_atom_hz, "gamma_atom_hz");
    set(&mut p.purcell, "purcell");
    set(&mut p.g_hz, "g_hz");
    set(&mut p.kappa_hz, "kappa_hz");
    set(&mut p.delta_plus_hz, "delta_plus_hz");
    set(&mut p.delta_minus_hz, "delta_minus_hz");
    set(&mut p.omega_plus_hz, "omega_plus_hz");
    set(&mut p.omega_minus_hz, "omega_minus_hz");
    set(&mut p.gamma_spin_hz, "gamma_spin_hz");
    p.to_angular().in_module("cavity_planner")
}

pub fn cavity(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let p = params(cfg)?;
    let overrides = RateOverrides {
        lambda_h_hz: cfg.opt_float("lambda_h_hz"),
        lambda_i_initial_hz: cfg.opt_float("lambda_i_initial_hz"),
        lambda_i_final_hz: cfg.opt_float("lambda_i_final_hz"),
    };
    let report = feasibility_check(&p, &overrides, cfg.float("factor")).in_module("cavity_planner")?;
    let ramp = ramp_schedule(p.n_atoms, report.lambda_i_initial_hz, cfg.count("ramp_steps")?).in_module("cavity_planner")?;
    let raman_h = to_hz(raman_rate(&p, Branch::Minus).in_module("cavity_planner")?);
    let raman_i = to_hz(raman_rate(&p, Branch::Plus).in_module("cavity_planner")?);
    let cosines = cfg.floats("cos_theta");
    if cosines.iter().any(|c| c.abs() > 1.0) {
        return Err(CliError::Config("--cos_theta entries must lie in [-1, 1]".into()));
    }
    let a = cfg.float("lattice_over_wavelength");
    let columns: Vec<i64> = (0..cfg.int("columns").max(0)).collect();

    let mut fields = Map::new();
    fields.insert("parameters_hz".into(), serde_json::to_value(p.to_hz()).expect("serialises"));
    fields.insert(
        "raman_rates_hz".into(),
        serde_json::json!({"lambda_h": raman_h, "lambda_i": raman_i}),
    );
    fields.insert("report".into(), serde_json::to_value(&report).expect("serialises"));
    art.json("cavity_report.json", fields)?;
    art.csv("cavity_ramp.csv", |w| write_schedule_csv(&ramp, w))?;
    art.csv("cavity_lasers.csv", |w| {
        writeln!(w, "cos_theta,column,group,re,im")?;
        for &c in &cosines {
            let coeffs = laser_coefficients(angle_for_cosine(c), &columns, a);
            for (&n, z) in columns.iter().zip(coeffs) {
                writeln!(w, "{},{n},{:?},{},{}", fmt_f64(c), column_group(n), fmt_f64(z.re), fmt_f64(z.im))?;
            }
        }
        Ok(())
    })?;

    let mut s = format!(
        "Lambda_h/2pi = {:.4} MHz, Lambda_i/2pi = {:.4} MHz -> {:.4} Hz over the ramp\n",
        report.lambda_h_hz / 1e6,
        report.lambda_i_initial_hz / 1e6,
        report.lambda_i_final_hz
    );
    for c in &report.clauses {
        let _ = writeln!(s, "{:<40} {:<10} ratio {:>10.4e}  {:?}", c.name, c.regime, c.ratio, c.verdict);
    }
    for note in &report.notes {
        let _ = writeln!(s, "note: {note}");
    }
    for &c in &cosines {
        let pattern = match group_coefficients(angle_for_cosine(c), a, columns.len()) {
            Some(g) => g.iter().map(|z| format!("{:+.3}{:+.3}i", z.re, z.im)).collect::<Vec<_>>().join(", "),
            None => "not uniform within the groups".into(),
        };
        let _ = writeln!(s, "cos(theta) = {c:.4}: (c_A, c_B, c_beta) = {pattern}");
    }
    Ok(s.trim_end().to_string())
}
