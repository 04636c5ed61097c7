use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scs_core::master_equation::*;
use scs_core::pump_protocols::{build_model, z_outcomes, PumpConfig};
use scs_core::qubit_register::*;
use scs_core::sparse::{BasisId, SparseOp};
use scs_core::spin_algebra::{HalfInt, Sense};

fn ones(n: usize) -> Vec<C64> {
    vec![C64::new(1.0, 0.0); n]
}

fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = 1 << n;
    let a = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    DensityMatrix::from_matrix(BasisId::Qubits(n), rho / tr).unwrap()
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let a = DMatrix::from_fn(d, d, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    a.qr().q()
}

/// `U_A ⊗ U_B` with `U_A` on the first `k` qubits.
fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ra, rb) = (a.nrows(), b.nrows());
    DMatrix::from_fn(ra * rb, ra * rb, |i, j| a[(i / rb, j / rb)] * b[(i % rb, j % rb)])
}

#[test]
fn homogeneous_operators_conserve_total_and_group_spins() {
    for n in [2usize, 4, 6, 8] {
        let all: Vec<usize> = (0..n).collect();
        let j2 = collective_spin_squared(n, &all).unwrap();
        let ja2 = collective_spin_squared(n, &all[..n / 2]).unwrap();
        let jb2 = collective_spin_squared(n, &all[n / 2..]).unwrap();
        for sense in [Sense::Raise, Sense::Lower] {
            let op = build_qubit_operators(n, &ones(n), sense).unwrap();
            assert!(op.commutator(&j2).unwrap().norm() < 1e-10, "N={n}");
            assert!(op.commutator(&ja2).unwrap().norm() < 1e-10);
            assert!(op.commutator(&jb2).unwrap().norm() < 1e-10);
        }
    }
}

#[test]
fn collective_spin_squared_spectrum() {
    // two qubits: singlet 0, triplet 2
    let j2 = collective_spin_squared(2, &[0, 1]).unwrap().to_dense();
    let mut ev: Vec<f64> = j2.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip([0.0, 2.0, 2.0, 2.0]) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn extremal_states_have_the_right_quantum_numbers() {
    for n in [2usize, 4, 6, 8] {
        let all: Vec<usize> = (0..n).collect();
        let j2 = collective_spin_squared(n, &all).unwrap();
        let ja2 = collective_spin_squared(n, &all[..n / 2]).unwrap();
        for j in 0..=n / 2 {
            let psi = scs_state(n, HalfInt::integer(j as i32)).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let jj = (j * (j + 1)) as f64;
            let v = j2.apply(psi.amplitudes());
            let err: f64 = v.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b * jj).norm()).sum();
            assert!(err < 1e-10, "N={n} J={j}");
            let ja = n as f64 / 4.0;
            let v = ja2.apply(psi.amplitudes());
            let err: f64 = v.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b * (ja * (ja + 1.0))).norm()).sum();
            assert!(err < 1e-10);
            // lowering annihilates an extremal state
            let low = build_qubit_operators(n, &ones(n), Sense::Lower).unwrap().apply(psi.amplitudes());
            assert!(low.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-20);
        }
    }
}

#[test]
fn zero_eta_gives_homogeneous_jumps_and_seeds_repeat() {
    let cfg = PumpConfig::simplified_qubits(6, 100.0, 1.0).unwrap();
    let m = noisy_pump_model(6, &cfg, &NoiseConfig { gamma: 0.0, eta: 0.0, seed: 3 }).unwrap();
    assert_eq!(m.jumps().len(), 2);
    let lower = build_qubit_operators(6, &ones(6), Sense::Lower).unwrap();
    assert_eq!(m.jumps()[0].op.max_abs_diff(&lower).unwrap(), 0.0);
    let noisy = NoiseConfig { gamma: 0.02, eta: 0.1, seed: 11 };
    let a = noisy_pump_model(6, &cfg, &noisy).unwrap();
    let b = noisy_pump_model(6, &cfg, &noisy).unwrap();
    assert_eq!(a.jumps().len(), 8);
    for (x, y) in a.jumps().iter().zip(b.jumps()) {
        assert_eq!(x.op.max_abs_diff(&y.op).unwrap(), 0.0);
    }
    assert!(a.jumps()[0].op.max_abs_diff(&lower).unwrap() > 0.0);
}

#[test]
fn model_rejects_bad_inputs() {
    let cfg = PumpConfig::simplified_qubits(4, 100.0, 1.0).unwrap();
    assert!(noisy_pump_model(6, &cfg, &NoiseConfig::ideal()).is_err());
    assert!(noisy_pump_model(4, &cfg, &NoiseConfig { gamma: -1.0, eta: 0.0, seed: 0 }).is_err());
    let big = PumpConfig::simplified_qubits(12, 100.0, 1.0).unwrap();
    assert!(matches!(
        noisy_pump_model(12, &big, &NoiseConfig::ideal()),
        Err(scs_core::error::Error::Resource { .. })
    ));
}

#[test]
fn dephasing_preserves_populations() {
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut model = LindbladModel::new(BasisId::Qubits(n), 1 << n);
    for q in 0..n {
        model.add_jump(format!("z{q}"), 0.3 + q as f64, qubit_iz(n, q).unwrap()).unwrap();
    }
    let rho0 = random_density(n, &mut rng);
    let opts = EvolveOptions {
        n_samples: 1,
        ..Default::default()
    };
    let rho = evolve(&model, &rho0, 2.0, &opts, &[]).unwrap().final_state;
    for (a, b) in rho.populations().iter().zip(rho0.populations()) {
        assert!((a - b).abs() < 1e-12);
    }
    // coherences decay: |01⟩⟨10| differs on two qubits
    assert!(rho.matrix()[(1, 2)].norm() < rho0.matrix()[(1, 2)].norm());
}

#[test]
fn log_negativity_reference_values() {
    let s8 = scs_state(8, HalfInt::ZERO).unwrap().density();
    assert!((log_negativity(&s8, &[0, 1, 2, 3]).unwrap() - 5f64.log2()).abs() < 1e-9);
    // mixed separable state
    let mixed = DensityMatrix::maximally_mixed(BasisId::Qubits(3), 8);
    assert!(log_negativity(&mixed, &[1]).unwrap().abs() < 1e-12);
    assert!(log_negativity(&s8, &[]).is_err());
    assert!(log_negativity(&s8, &(0..8).collect::<Vec<_>>()).is_err());
}

#[test]
fn log_negativity_is_local_unitary_invariant() {
    let n = 4;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = if seed % 2 == 0 {
            scs_state(n, HalfInt::integer((seed % 3) as i32)).unwrap().density()
        } else {
            random_density(n, &mut rng)
        };
        let u = kron(&random_unitary(4, &mut rng), &random_unitary(4, &mut rng));
        let rotated = DensityMatrix::from_matrix(BasisId::Qubits(n), &u * rho.matrix() * u.adjoint()).unwrap();
        let a = log_negativity(&rho, &[0, 1]).unwrap();
        let b = log_negativity(&rotated, &[0, 1]).unwrap();
        assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn pair_entanglement_is_symmetric() {
    let s = scs_state(4, HalfInt::ZERO).unwrap().density();
    let base = pair_entanglement(&s, 0, 2).unwrap();
    assert!(base > 0.0);
    for (a, b) in [(0, 3), (1, 2), (1, 3), (2, 0), (3, 1)] {
        assert!((pair_entanglement(&s, a, b).unwrap() - base).abs() < 1e-12);
    }
    let prod = PureState::basis_state(4, 0b0110).unwrap().density();
    assert!(pair_entanglement(&prod, 0, 3).unwrap().abs() < 1e-12);
}

#[test]
fn partial_trace_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = random_density(3, &mut rng);
    let r = partial_trace(&rho, &[2, 0]).unwrap();
    let m = rho.matrix();
    for a in 0..4usize {
        for b in 0..4usize {
            let (q2a, q0a, q2b, q0b) = (a >> 1, a & 1, b >> 1, b & 1);
            let mut s = C64::new(0.0, 0.0);
            for q1 in 0..2 {
                s += m[((q0a << 2) | (q1 << 1) | q2a, (q0b << 2) | (q1 << 1) | q2b)];
            }
            assert!((r.matrix()[(a, b)] - s).norm() < 1e-14);
        }
    }
}

#[test]
fn state_fidelity_edges() {
    let a = PureState::basis_state(2, 1).unwrap();
    let b = PureState::basis_state(2, 2).unwrap();
    assert!(state_fidelity(&a.density(), &b).unwrap().abs() < 1e-15);
    assert!(state_fidelity(&a.density(), &PureState::basis_state(3, 1).unwrap()).is_err());
}

#[test]
fn noiseless_register_matches_coupled_basis() {
    let n = 8;
    let cfg = PumpConfig::simplified_qubits(n, 100.0, 1.0).unwrap();
    let settle = default_settle_time(&cfg);
    let (rho, diag) = noise_run(n, &cfg, &NoiseConfig::ideal(), 0.75, settle).unwrap();
    // same protocol in the |J, μ, j_A, j_B⟩ basis
    let setup = build_model(&cfg).unwrap();
    let off = build_model(&PumpConfig { lambda_i: 0.0, ..cfg.clone() }).unwrap();
    let r = pump_then_settle(&setup.model, &off.model, &setup.polarized_state(), 0.75, settle).unwrap();
    let z = z_outcomes(&setup.basis, &r).unwrap();
    for d in &diag {
        let p = z.iter().find(|(mu, _)| *mu == -d.outcome).map_or(0.0, |x| x.1);
        assert!((d.probability - p).abs() < 0.02, "J={}: {} vs {p}", d.outcome, d.probability);
        assert!(d.fidelity >= 0.99, "J={}: {}", d.outcome, d.fidelity);
    }
    assert!((diag[0].log_neg_ab - 5f64.log2()).abs() < 1e-6);
    assert!((extremal_population(&rho).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn fidelity_falls_with_dephasing() {
    let n = 4;
    let cfg = PumpConfig::simplified_qubits(n, 100.0, 1.0).unwrap();
    let mut prev: Option<Vec<OutcomeDiagnostics>> = None;
    for g in [0.0, 0.01, 0.03, 0.1] {
        let noise = NoiseConfig { gamma: g, eta: 0.0, seed: 0 };
        let (_, d) = noise_run(n, &cfg, &noise, 1.5, default_settle_time(&cfg)).unwrap();
        if let Some(p) = &prev {
            for (a, b) in p.iter().zip(&d) {
                assert!(b.fidelity <= a.fidelity + 1e-9, "γ={g} J={}", b.outcome);
                assert!(b.log_neg_ab <= a.log_neg_ab + 1e-9, "γ={g} J={}", b.outcome);
            }
        }
        prev = Some(d);
    }
}

#[test]
fn leakage_scales_with_gamma_over_lambda_i() {
    let gamma = 0.01;
    let mut leak = Vec::new();
    for n in [4usize, 6, 8] {
        let cfg = PumpConfig::simplified_qubits(n, 100.0, 1.0).unwrap();
        // t_p ∝ 1/N, equal to 0.75 at N = 8
        let tp = 6.0 / n as f64;
        let (rho, _) = noise_run(n, &cfg, &NoiseConfig { gamma, eta: 0.0, seed: 0 }, tp, default_settle_time(&cfg)).unwrap();
        leak.push((1.0 - extremal_population(&rho).unwrap()) / gamma);
    }
    let max = leak.iter().cloned().fold(f64::MIN, f64::max);
    let min = leak.iter().cloned().fold(f64::MAX, f64::min);
    assert!(min > 0.0 && max / min <= 2.0, "{leak:?}");
}

#[test]
fn phase_encoding_rotates_the_target() {
    let n = 4;
    let cfg = PumpConfig::simplified_qubits(n, 100.0, 1.0).unwrap();
    let pump = noisy_pump_model(n, &cfg, &NoiseConfig::ideal()).unwrap();
    let settle = noisy_pump_model(n, &PumpConfig { lambda_i: 0.0, ..cfg.clone() }, &NoiseConfig::ideal()).unwrap();

    let (u0, same) = phase_encode(&[0.0; 4], &pump).unwrap();
    assert_eq!(u0.max_abs_diff(&SparseOp::identity(BasisId::Qubits(n), 1 << n)).unwrap(), 0.0);
    for (a, b) in same.jumps().iter().zip(pump.jumps()) {
        assert!(a.op.max_abs_diff(&b.op).unwrap() < 1e-15);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let thetas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let (u, enc_pump) = phase_encode(&thetas, &pump).unwrap();
    let (_, enc_settle) = phase_encode(&thetas, &settle).unwrap();
    let rho0 = polarized_register(n).unwrap();
    // one shared step sequence, so the two runs differ only by rounding
    let opts = EvolveOptions {
        policy: StepPolicy::Fixed { h: 1e-3 },
        n_samples: 1,
        check_positivity: false,
    };
    let plain = pump_then_settle_with(&pump, &settle, &rho0, 20.0, 0.2, &opts).unwrap();
    let enc = pump_then_settle_with(&enc_pump, &enc_settle, &rho0, 20.0, 0.2, &opts).unwrap();
    let a = analyze_outcomes(&plain, 2).unwrap();
    let all: Vec<usize> = (0..1 << n).collect();
    for d in &a {
        let k = n / 2 - (d.outcome.twice() / 2) as usize;
        let keep: Vec<usize> = all.iter().copied().filter(|i| i.count_ones() as usize == k).collect();
        let (p, cond) = enc.project_onto(&keep).unwrap();
        assert!((p - d.probability).abs() < 1e-9);
        let target = scs_state(n, d.outcome).unwrap().apply(&u).unwrap();
        assert!(state_fidelity(&cond, &target).unwrap() >= 1.0 - 1e-8, "J={}", d.outcome);
        let part: Vec<usize> = (0..n / 2).collect();
        assert!((log_negativity(&cond, &part).unwrap() - d.log_neg_ab).abs() < 1e-10);
    }
}

#[test]
fn scan_csv_layout() {
    let row = ScanRow {
        gamma_over_lambda_i: 0.01,
        eta: 0.0,
        seed: 4,
        diag: OutcomeDiagnostics {
            outcome: HalfInt::integer(1),
            probability: 0.5,
            log_neg_ab: 1.0,
            pair_log_neg: 0.2,
            fidelity: 0.9,
        },
    };
    let mut buf = Vec::new();
    write_scan_csv(&[row], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma_over_lambda_i,eta,seed,outcome_2J,probability,log_neg_AB,pair_log_neg,fidelity"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 8);
    assert_eq!(fields[2], "4");
    assert_eq!(fields[3], "2");
}
