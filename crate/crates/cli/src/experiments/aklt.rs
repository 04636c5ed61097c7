//! AKLT chain growth by parity measurements.

use scs_core::aklt::{length_distribution, monte_carlo, write_distribution_csv, write_trials_csv, DEFAULT_CHAIN_CAP};
use serde_json::{Map, Value};

use crate::config::Config;
use crate::error::{CliError, InModule};
use crate::output::Artifacts;
use crate::params::{Kind, Param};

pub const FIG4: &[Param] = &[
    Param::new("merges", Kind::Int, "10", "parity-measurement merges per trial"),
    Param::new("trials", Kind::Int, "10000", "Monte Carlo trials"),
    Param::new("exact_cap", Kind::Int, "16", "longest chain simulated as an explicit state"),
];

pub fn fig4(cfg: &Config, art: &mut Artifacts) -> Result<String, CliError> {
    let merges = cfg.count("merges")?;
    let trials = cfg.count("trials")?;
    let cap = cfg.count("exact_cap")?;
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    if cap > DEFAULT_CHAIN_CAP {
        log::warn!("exact_cap {cap} exceeds {DEFAULT_CHAIN_CAP}; explicit states may not fit");
    }
    let (rows, summary) = monte_carlo(merges, trials, cfg.seed, cap).in_module("aklt")?;
    let dist = length_distribution(merges);

    art.csv("fig4_trials.csv", |w| write_trials_csv(&rows, w))?;
    art.csv("fig4_distribution.csv", |w| write_distribution_csv(&dist, w))?;
    let mut fields = Map::new();
    fields.insert("summary".into(), serde_json::to_value(&summary).expect("summary serialises"));
    fields.insert(
        "distribution".into(),
        Value::Array(dist.iter().map(|&(l, p)| serde_json::json!({"length": l, "probability": p})).collect()),
    );
    art.json("fig4_summary.json", fields)?;

    Ok(format!(
        "{trials} trials of {merges} merges: mean length {:.3} (variance {:.3}), growth {:.4} per merge",
        summary.mean_length, summary.variance_length, summary.mean_growth_per_merge
    ))
}
