use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use scs_core::cavity_planner::*;
use scs_core::pump_protocols::default_general_coefficients;

#[test]
fn cesium_raman_rate() {
    let p = CavityParams::cesium(100);
    let l = to_hz(raman_rate(&p, Branch::Minus).unwrap());
    assert!((l / 1e6 - 14.8).abs() < 0.05, "{l}");
    let mut q = p;
    q.omega_minus = 0.0;
    assert_eq!(raman_rate(&q, Branch::Minus).unwrap(), 0.0);
    q.omega_minus = 2.0 * p.omega_minus;
    let r = raman_rate(&q, Branch::Minus).unwrap() / raman_rate(&p, Branch::Minus).unwrap();
    assert!((r - 4.0).abs() < 1e-12);
    for s in [0.5, 2.0, 8.0] {
        let mut q = p;
        q.omega_plus *= s;
        q.delta_plus *= s;
        assert_eq!(raman_rate(&q, Branch::Plus).unwrap(), raman_rate(&p, Branch::Plus).unwrap());
    }
}

#[test]
fn hz_round_trip() {
    let p = CavityParams::cesium(40);
    let back = p.to_hz().to_angular().unwrap();
    assert!((back.g - p.g).abs() < 1e-6 && back.n_atoms == 40);
    assert!(p.large_detuning_valid());
    let good = r#"{"gamma_atom_hz":2.6e6,"purcell":80,"g_hz":4.5e7,"kappa_hz":2e7,"delta_plus_hz":1.5e8,"delta_minus_hz":1.5e8,"omega_plus_hz":1e7,"omega_minus_hz":4e7,"gamma_spin_hz":25,"n_atoms":100}"#;
    let parsed: CavityParamsHz = serde_json::from_str(good).unwrap();
    assert_eq!(parsed.n_atoms, 100);
    let extra = good.replace("}", r#","extra":1}"#);
    assert!(serde_json::from_str::<CavityParamsHz>(&extra).is_err());
}

#[test]
fn laser_phase_patterns() {
    let cols: Vec<i64> = (0..9).collect();
    assert!(laser_coefficients(FRAC_PI_2, &cols, 1.0).iter().all(|c| (c - C64::new(1.0, 0.0)).norm() < 1e-12));
    let c = laser_coefficients(angle_for_cosine(1.0 / 3.0), &cols, 1.0);
    for (n, z) in c.iter().enumerate() {
        let expect = C64::from_polar(1.0, -TAU * (n % 3) as f64 / 3.0);
        assert!((z - expect).norm() < 1e-12, "column {n}");
    }
    let defaults = default_general_coefficients();
    for (cos, want) in [(1.0 / 3.0, defaults[0]), (2.0 / 3.0, defaults[1])] {
        let got = group_coefficients(angle_for_cosine(cos), 1.0, 12).unwrap();
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).norm() < 1e-12, "cos θ = {cos}");
        }
    }
    assert_eq!(column_group(2), Group::A);
    assert_eq!(column_group(4), Group::B);
    assert_eq!(column_group(-3), Group::Ancilla);
}

#[test]
fn cesium_feasibility_report() {
    let p = CavityParams::cesium(100);
    let r = feasibility_check(&p, &RateOverrides::default(), 10.0).unwrap();
    assert!((r.lambda_i_initial_hz - 1e6).abs() < 1e-6);
    assert!((r.lambda_i_final_hz - 100.0).abs() < 1e-9);
    let end = r.clauses.iter().find(|c| c.name.starts_with("gamma") && c.regime == "ramp end").unwrap();
    assert!((end.ratio - 0.25).abs() < 1e-12);
    assert_eq!(end.verdict, Verdict::Warn);
    let start = r.clauses.iter().find(|c| c.name.starts_with("gamma") && c.regime == "ramp start").unwrap();
    assert_eq!(start.verdict, Verdict::Pass);
    assert_eq!(r.clauses.len(), 6);
}

#[test]
fn kappa_clause_fails_when_cavity_is_too_lossy() {
    let mut p = CavityParams::cesium(10);
    let lh = raman_rate(&p, Branch::Minus).unwrap();
    p.kappa = 0.5 * lh * 10.0;
    let r = feasibility_check(&p, &RateOverrides::default(), 10.0).unwrap();
    let c = r
        .clauses
        .iter()
        .find(|c| c.name.ends_with("< kappa") && c.regime == "polarized")
        .unwrap();
    assert_eq!(c.verdict, Verdict::Fail);
    assert_eq!(r.worst(), Verdict::Fail);
}

#[test]
fn dephasing_clause_is_monotone() {
    let mut p = CavityParams::cesium(100);
    p.gamma_spin = 0.0;
    let r = feasibility_check(&p, &RateOverrides::default(), 10.0).unwrap();
    assert!(r.clauses.iter().filter(|c| c.name.starts_with("gamma")).all(|c| c.verdict == Verdict::Pass));
    let mut prev = Verdict::Pass;
    for hz in [0.0, 1.0, 10.0, 25.0, 99.0, 150.0, 1e4, 1e7] {
        p.gamma_spin = to_angular(hz);
        let r = feasibility_check(&p, &RateOverrides::default(), 10.0).unwrap();
        let worst = r
            .clauses
            .iter()
            .filter(|c| c.name.starts_with("gamma"))
            .map(|c| c.verdict as u8)
            .max()
            .unwrap();
        assert!(worst >= prev as u8, "γ/2π = {hz}");
        prev = match worst {
            0 => Verdict::Pass,
            1 => Verdict::Warn,
            _ => Verdict::Fail,
        };
    }
    assert_eq!(prev, Verdict::Fail);
}

#[test]
fn overrides_and_validation() {
    let p = CavityParams::cesium(100);
    let o = RateOverrides {
        lambda_h_hz: Some(15e6),
        lambda_i_initial_hz: Some(2e6),
        lambda_i_final_hz: None,
    };
    let r = feasibility_check(&p, &o, 10.0).unwrap();
    assert_eq!(r.lambda_h_hz, 15e6);
    assert!((r.lambda_i_final_hz - 200.0).abs() < 1e-9);
    assert!(feasibility_check(&p, &o, 0.5).is_err());
    let mut bad = p;
    bad.kappa = -1.0;
    assert!(feasibility_check(&bad, &o, 10.0).is_err());
}

#[test]
fn ramp_schedule_shape() {
    let r = ramp_schedule(100, 1e6, 11).unwrap();
    assert_eq!(r[0], 1e6);
    assert_eq!(r[10], 100.0);
    assert!(r.windows(2).all(|w| w[1] < w[0]));
    // geometric: constant ratio
    let q: Vec<f64> = r.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(q.iter().all(|x| (x - q[0]).abs() < 1e-12));
    assert!(ramp_schedule(100, 1e6, 1).is_err());
    let mut buf = Vec::new();
    write_schedule_csv(&r, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("step,lambda_i_hz\n0,"));
}
