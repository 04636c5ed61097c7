//! Four-qubit AKLT clusters and chain growth by pair-parity measurements.
//!
//! Qubit labels are 0-indexed here; the merged pair of two clusters
//! `{0..3}` and `{4..7}` is `(3, 4)`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::qubit_register::PureState;

/// Largest chain kept as an explicit state vector.
pub const DEFAULT_CHAIN_CAP: usize = 16;

/// Triplet probability of a merge, used once the exact cap is exceeded.
pub const TRIPLET_PROBABILITY: f64 = 0.75;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
fn mask(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i >= n || j >= n {
        return Err(Error::Input(format!("pair ({i}, {j}) invalid for {n} qubits")));
    }
    Ok(())
}

/// Replaces the `(i, j)` part of `amps` by its singlet component.
fn project_singlet(amps: &mut [C64], n: usize, i: usize, j: usize) {
    let (mi, mj) = (mask(i, n), mask(j, n));
    for idx in 0..amps.len() {
        let (bi, bj) = (idx & mi != 0, idx & mj != 0);
        if bi == bj {
            amps[idx] = ZERO;
        } else if bi {
            // |…1_i…0_j…⟩ is handled with its partner
            continue;
        } else {
            let a01 = amps[idx];
            let a10 = amps[(idx | mi) & !mj];
            let s = 0.5 * (a01 - a10);
            amps[idx] = s;
            amps[(idx | mi) & !mj] = -s;
        }
    }
}

/// Applies the triplet projector `P_ij = 1 − |S⟩⟨S|_ij`.
fn project_triplet(amps: &mut [C64], n: usize, i: usize, j: usize) {
    let mut s = amps.to_vec();
    project_singlet(&mut s, n, i, j);
    for (a, b) in amps.iter_mut().zip(s) {
        *a -= b;
    }
}

/// `Π P_{pq} Π |S⟩_{ab}` over `n` qubits, normalised.
pub fn valence_bond_state(n: usize, singlets: &[(usize, usize)], triplet_projections: &[(usize, usize)]) -> Result<PureState> {
    if n > DEFAULT_CHAIN_CAP {
        return Err(Error::Resource {
            what: "chain qubits",
            dim: n,
            cap: DEFAULT_CHAIN_CAP,
        });
    }
    let mut used = vec![false; n];
    for &(a, b) in singlets {
        check_pair(n, a, b)?;
        if used[a] || used[b] {
            return Err(Error::Input(format!("qubit of bond ({a}, {b}) already bonded")));
        }
        used[a] = true;
        used[b] = true;
    }
    if used.iter().any(|u| !u) {
        return Err(Error::Input("every qubit must sit in one singlet bond".into()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 1 << n];
    // expand the product of singlets bond by bond
    for idx in 0..1usize << n {
        let mut a = 1.0;
        for &(p, q) in singlets {
            let (bp, bq) = (idx & mask(p, n) != 0, idx & mask(q, n) != 0);
            a *= match (bp, bq) {
                (false, true) => s,
                (true, false) => -s,
                _ => 0.0,
            };
            if a == 0.0 {
                break;
            }
        }
        amps[idx] = C64::new(a, 0.0);
    }
    for &(p, q) in triplet_projections {
        check_pair(n, p, q)?;
        project_triplet(&mut amps, n, p, q);
    }
    PureState::with_cap(n, amps, DEFAULT_CHAIN_CAP)
}

/// Chain positions of the cluster's subgroups: A is the two ends, B the
/// middle pair, so each singlet bond straddles A|B.
pub const CLUSTER_A: [usize; 2] = [0, 3];
pub const CLUSTER_B: [usize; 2] = [1, 2];

/// `P₂₃|S⟩₁₂|S⟩₃₄` (1-indexed).
pub fn aklt4() -> PureState {
    valence_bond_state(4, &[(0, 1), (2, 3)], &[(1, 2)]).expect("fixed construction")
}

/// Open chain `P₂₃P₄₅…|S⟩₁₂|S⟩₃₄…` on `n` (even) qubits.
pub fn aklt_chain(n: usize) -> Result<PureState> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Input(format!("AKLT chain needs an even qubit count, got {n}")));
    }
    let bonds: Vec<_> = (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
    let proj: Vec<_> = (1..n / 2).map(|k| (2 * k - 1, 2 * k)).collect();
    valence_bond_state(n, &bonds, &proj)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityOutcome {
    Singlet,
    Triplet,
}

/// Explicit chain with the history of merges that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainState {
    pub state: PureState,
    pub history: Vec<String>,
}

impl ChainState {
    pub fn cluster() -> Self {
        Self {
            state: aklt4(),
            history: vec!["aklt4".into()],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    /// Appends a fresh four-qubit cluster on the right.
    pub fn append_cluster(&self) -> Result<ChainState> {
        let n = self.n_qubits() + 4;
        if n > DEFAULT_CHAIN_CAP {
            return Err(Error::Resource {
                what: "chain qubits",
                dim: n,
                cap: DEFAULT_CHAIN_CAP,
            });
        }
        let c = aklt4();
        let mut amps = Vec::with_capacity(1 << n);
        for a in self.state.amplitudes() {
            for b in c.amplitudes() {
                amps.push(a * b);
            }
        }
        let mut history = self.history.clone();
        history.push("append aklt4".into());
        Ok(ChainState {
            state: PureState::with_cap(n, amps, DEFAULT_CHAIN_CAP)?,
            history,
        })
    }

    /// Contracts the pair `(i, j)` with `⟨S|`, dropping both qubits. Exact
    /// when the pair is in a singlet product with the rest.
    pub fn remove_singlet_pair(&self, i: usize, j: usize) -> Result<ChainState> {
        let n = self.n_qubits();
        check_pair(n, i, j)?;
        let (mi, mj) = (mask(i, n), mask(j, n));
        let keep: Vec<usize> = (0..n).filter(|&q| q != i && q != j).collect();
        let m = n - 2;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = vec![ZERO; 1 << m];
        for (r, o) in out.iter_mut().enumerate() {
            let mut idx = 0;
            for (p, &q) in keep.iter().enumerate() {
                if r & (1 << (m - 1 - p)) != 0 {
                    idx |= mask(q, n);
                }
            }
            let a = self.state.amplitudes();
            *o = s * (a[idx | mj] - a[idx | mi]);
        }
        let mut history = self.history.clone();
        history.push(format!("detach singlet ({i}, {j})"));
        Ok(ChainState {
            state: PureState::with_cap(m, out, DEFAULT_CHAIN_CAP)?,
            history,
        })
    }
}

/// One branch of a pair-parity measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityBranch {
    pub outcome: ParityOutcome,
    pub probability: f64,
    pub post_state: ChainState,
}

/// Born-rule projection of `(i, j)` onto its singlet and triplet
/// subspaces; branches of zero probability are omitted.
pub fn parity_measure(state: &ChainState, pair: (usize, usize)) -> Result<Vec<ParityBranch>> {
    let n = state.n_qubits();
    check_pair(n, pair.0, pair.1)?;
    let mut s = state.state.amplitudes().to_vec();
    project_singlet(&mut s, n, pair.0, pair.1);
    let t: Vec<C64> = state.state.amplitudes().iter().zip(&s).map(|(a, b)| a - b).collect();
    let mut out = Vec::with_capacity(2);
    for (outcome, amps) in [(ParityOutcome::Singlet, s), (ParityOutcome::Triplet, t)] {
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-15 {
            continue;
        }
        let mut history = state.history.clone();
        history.push(format!("{outcome:?} on ({}, {})", pair.0, pair.1).to_lowercase());
        out.push(ParityBranch {
            outcome,
            probability: p,
            post_state: ChainState {
                state: PureState::with_cap(n, amps, DEFAULT_CHAIN_CAP)?,
                history,
            },
        });
    }
    Ok(out)
}

/// One merge of a growth run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeStep {
    pub merge: usize,
    pub outcome: ParityOutcome,
    /// Triplet probability used for the draw (Born value while exact).
    pub triplet_probability: f64,
    pub exact: bool,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Growth {
    pub steps: Vec<MergeStep>,
    pub final_length: usize,
    /// Explicit chain, if the run never left the exact regime.
    #[serde(skip)]
    pub final_state: Option<ChainState>,
}

/// Merges `n_merges` fresh clusters onto a starting cluster. Each merge
/// measures the parity of (last chain qubit, first cluster qubit): a
/// triplet keeps all qubits (+4), a singlet detaches the pair (+2), which
/// is counted as lost. Explicit states are used while the chain plus the
/// new cluster fit in `exact_cap` qubits; afterwards the two-outcome
/// Markov model takes over.
pub fn grow_chain_with_cap(n_merges: usize, seed: u64, exact_cap: usize) -> Result<Growth> {
    if n_merges == 0 {
        return Err(Error::Input("need at least one merge".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain = Some(ChainState::cluster()).filter(|_| exact_cap >= 8);
    let mut length = 4;
    let mut steps = Vec::with_capacity(n_merges);
    for merge in 1..=n_merges {
        let u: f64 = rng.random();
        let exact_next = chain.as_ref().is_some_and(|c| c.n_qubits() + 4 <= exact_cap.min(DEFAULT_CHAIN_CAP));
        let (outcome, p_t) = if exact_next {
            let joined = chain.take().expect("exact chain").append_cluster()?;
            let left = joined.n_qubits() - 5;
            let branches = parity_measure(&joined, (left, left + 1))?;
            let p_t = branches
                .iter()
                .find(|b| b.outcome == ParityOutcome::Triplet)
                .map_or(0.0, |b| b.probability);
            let outcome = if u < p_t { ParityOutcome::Triplet } else { ParityOutcome::Singlet };
            let b = branches
                .into_iter()
                .find(|b| b.outcome == outcome)
                .ok_or_else(|| Error::Numerical("drew a zero-probability branch".into()))?;
            chain = Some(match outcome {
                ParityOutcome::Triplet => b.post_state,
                ParityOutcome::Singlet => b.post_state.remove_singlet_pair(left, left + 1)?,
            });
            (outcome, p_t)
        } else {
            chain = None;
            let outcome = if u < TRIPLET_PROBABILITY {
                ParityOutcome::Triplet
            } else {
                ParityOutcome::Singlet
            };
            (outcome, TRIPLET_PROBABILITY)
        };
        length += match outcome {
            ParityOutcome::Triplet => 4,
            ParityOutcome::Singlet => 2,
        };
        steps.push(MergeStep {
            merge,
            outcome,
            triplet_probability: p_t,
            exact: exact_next,
            length,
        });
    }
    Ok(Growth {
        steps,
        final_length: length,
        final_state: chain,
    })
}

pub fn grow_chain(n_merges: usize, seed: u64) -> Result<Growth> {
    grow_chain_with_cap(n_merges, seed, DEFAULT_CHAIN_CAP)
}

/// Exact length distribution after `n_merges`: `4 + 2n + 2T` with
/// `T ~ Binomial(n, 3/4)`.
pub fn length_distribution(n_merges: usize) -> Vec<(usize, f64)> {
    let p = TRIPLET_PROBABILITY;
    let mut out = Vec::with_capacity(n_merges + 1);
    let mut binom = 1.0f64;
    for t in 0..=n_merges {
        if t > 0 {
            binom *= (n_merges - t + 1) as f64 / t as f64;
        }
        let prob = binom * p.powi(t as i32) * (1.0 - p).powi((n_merges - t) as i32);
        out.push((4 + 2 * n_merges + 2 * t, prob));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub merges: usize,
    pub final_length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSummary {
    pub trials: usize,
    pub merges: usize,
    pub seed: u64,
    pub mean_length: f64,
    pub variance_length: f64,
    pub mean_growth_per_merge: f64,
    pub variance_growth_per_merge: f64,
    pub histogram: Vec<(usize, usize)>,
}

/// Independent trials; trial `k` draws from stream `k` of the seed, so
/// results do not depend on scheduling.
pub fn monte_carlo(n_merges: usize, trials: usize, seed: u64, exact_cap: usize) -> Result<(Vec<TrialResult>, GrowthSummary)> {
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    let rows: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let g = grow_chain_with_cap(n_merges, trial_seed(seed, trial), exact_cap)?;
            Ok(TrialResult {
                trial,
                merges: n_merges,
                final_length: g.final_length,
            })
        })
        .collect::<Result<_>>()?;
    let lens: Vec<f64> = rows.iter().map(|r| r.final_length as f64).collect();
    let mean = lens.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        lens.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    let mut hist = std::collections::BTreeMap::new();
    for r in &rows {
        *hist.entry(r.final_length).or_insert(0usize) += 1;
    }
    let m = n_merges as f64;
    let summary = GrowthSummary {
        trials,
        merges: n_merges,
        seed,
        mean_length: mean,
        variance_length: var,
        mean_growth_per_merge: (mean - 4.0) / m,
        variance_growth_per_merge: var / (m * m),
        histogram: hist.into_iter().collect(),
    };
    Ok((rows, summary))
}

/// Seed of trial `k`: first output of stream `k` of `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng.random()
}

pub fn write_trials_csv<W: std::io::Write>(rows: &[TrialResult], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "trial,merges,final_length")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.trial, r.merges, r.final_length)?;
    }
    Ok(())
}

pub fn write_distribution_csv<W: std::io::Write>(dist: &[(usize, f64)], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "length,probability")?;
    for (l, p) in dist {
        writeln!(w, "{l},{}", fmt_f64(*p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singlet_pair_amplitudes() {
        let s = valence_bond_state(2, &[(0, 1)], &[]).unwrap();
        let a = s.amplitudes();
        assert!((a[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[2].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn projectors_resolve_identity() {
        let psi = PureState::new(3, (0..8).map(|k| C64::new(k as f64 - 2.5, 0.3 * k as f64)).collect()).unwrap();
        let mut s = psi.amplitudes().to_vec();
        let mut t = s.clone();
        project_singlet(&mut s, 3, 0, 2);
        project_triplet(&mut t, 3, 0, 2);
        for ((a, b), c) in s.iter().zip(&t).zip(psi.amplitudes()) {
            assert!((a + b - c).norm() < 1e-14);
        }
        let mut s2 = s.clone();
        project_singlet(&mut s2, 3, 0, 2);
        assert!(s.iter().zip(&s2).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn one_merge_distribution() {
        let d = length_distribution(1);
        assert_eq!(d, vec![(6, 0.25), (8, 0.75)]);
        let total: f64 = length_distribution(7).iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seeded_growth_repeats() {
        assert_eq!(grow_chain(6, 42).unwrap().steps, grow_chain(6, 42).unwrap().steps);
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
    }
}
