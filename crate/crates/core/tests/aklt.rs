use num_complex::Complex64 as C64;
use scs_core::aklt::*;
use scs_core::qubit_register::{collective_spin_squared, PureState};
use scs_core::spin_algebra::HalfInt;
use scs_core::telecloning::resource_state;

fn overlap(a: &PureState, b: &PureState) -> f64 {
    a.overlap(b).unwrap().norm()
}

#[test]
fn cluster_is_the_four_qubit_singlet() {
    let a = aklt4();
    // resource qubits are (A, A, B, B); chain position k holds resource qubit order[k]
    let mut order = [0usize; 4];
    for (r, &pos) in CLUSTER_A.iter().chain(&CLUSTER_B).enumerate() {
        order[pos] = r;
    }
    let r = resource_state(4, HalfInt::ZERO).unwrap().permute_qubits(&order).unwrap();
    assert!((overlap(&a, &r) - 1.0).abs() < 1e-12);
    let ja = collective_spin_squared(4, &CLUSTER_A).unwrap().apply(a.amplitudes());
    let e: C64 = a.amplitudes().iter().zip(&ja).map(|(x, y)| x.conj() * y).sum();
    assert!((e.re - 2.0).abs() < 1e-12);
    let j2 = collective_spin_squared(4, &[0, 1, 2, 3]).unwrap();
    let v = j2.apply(a.amplitudes());
    let e: C64 = a.amplitudes().iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
    assert!(e.norm() < 1e-12);
    let twice = valence_bond_state(4, &[(0, 1), (2, 3)], &[(1, 2), (1, 2)]).unwrap();
    assert!((overlap(&twice, &a) - 1.0).abs() < 1e-14);
}

#[test]
fn merging_two_clusters() {
    let two = ChainState::cluster().append_cluster().unwrap();
    let branches = parity_measure(&two, (3, 4)).unwrap();
    assert_eq!(branches.len(), 2);
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let trip = branches.iter().find(|b| b.outcome == ParityOutcome::Triplet).unwrap();
    let sing = branches.iter().find(|b| b.outcome == ParityOutcome::Singlet).unwrap();
    assert!((trip.probability - 0.75).abs() < 1e-10);
    assert!((overlap(&trip.post_state.state, &aklt_chain(8).unwrap()) - 1.0).abs() < 1e-10);
    // P₂₃P₆₇|S⟩₁₂|S⟩₃₆|S⟩₇₈|S⟩₄₅ (1-indexed)
    let expect = valence_bond_state(8, &[(0, 1), (2, 5), (6, 7), (3, 4)], &[(1, 2), (5, 6)]).unwrap();
    assert!((overlap(&sing.post_state.state, &expect) - 1.0).abs() < 1e-10);
    let six = sing.post_state.remove_singlet_pair(3, 4).unwrap();
    assert!((six.state.norm() - 1.0).abs() < 1e-12);
    assert!((overlap(&six.state, &aklt_chain(6).unwrap()) - 1.0).abs() < 1e-10);
}

#[test]
fn singlet_pair_is_certain() {
    let s = ChainState {
        state: valence_bond_state(4, &[(1, 2), (0, 3)], &[]).unwrap(),
        history: vec![],
    };
    let b = parity_measure(&s, (1, 2)).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].outcome, ParityOutcome::Singlet);
    assert!((b[0].probability - 1.0).abs() < 1e-12);
    assert!(parity_measure(&s, (1, 1)).is_err());
}

#[test]
fn exact_born_probabilities_validate_the_markov_model() {
    for seed in 0..12 {
        let g = grow_chain(3, seed).unwrap();
        assert!(g.steps.iter().all(|s| s.exact));
        for s in &g.steps {
            assert!((s.triplet_probability - TRIPLET_PROBABILITY).abs() < 1e-9);
        }
        // the explicit chain is always an AKLT chain of the reported length
        let st = g.final_state.unwrap();
        assert_eq!(st.n_qubits(), g.final_length);
        assert!((overlap(&st.state, &aklt_chain(g.final_length).unwrap()) - 1.0).abs() < 1e-9);
    }
    let long = grow_chain(10, 1).unwrap();
    assert!(long.steps[..3].iter().all(|s| s.exact));
    assert!(long.steps[3..].iter().all(|s| !s.exact));
    assert!(long.final_state.is_none());
}

#[test]
fn growth_statistics() {
    let (rows, summary) = monte_carlo(20, 10_000, 7, 0).unwrap();
    assert_eq!(rows.len(), 10_000);
    assert!((summary.mean_growth_per_merge - 3.5).abs() < 0.1, "{}", summary.mean_growth_per_merge);
    // binomial variance: 20 · 4 · 3/16
    assert!((summary.variance_length / 15.0 - 1.0).abs() < 0.1);
    let dist = length_distribution(1);
    assert_eq!(dist, vec![(6, 0.25), (8, 0.75)]);
}

#[test]
fn monte_carlo_is_deterministic_across_thread_counts() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| monte_carlo(6, 300, 99, DEFAULT_CHAIN_CAP).unwrap())
    };
    let (a, sa) = run(1);
    let (b, sb) = run(3);
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    assert_eq!(grow_chain(25, 5).unwrap().steps, grow_chain(25, 5).unwrap().steps);
}

#[test]
fn csv_layout() {
    let (rows, _) = monte_carlo(2, 3, 1, 0).unwrap();
    let mut buf = Vec::new();
    write_trials_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("trial,merges,final_length\n0,2,"));
    assert_eq!(text.lines().count(), 4);
}
