//! Named experiments: a parameter schema plus a run function each.

mod aklt;
mod cavity;
mod noise;
mod pump;
mod telecloning;

use scs_core::spin_algebra::HalfInt;

use crate::config::Config;
use crate::error::CliError;
use crate::output::Artifacts;
use crate::params::{Kind, Param};

pub(crate) const SCHEME: Kind = Kind::Choice(&["general", "simplified"]);

/// Runs an experiment, writes its artifacts and returns a short text
/// summary for stdout.
pub type RunFn = fn(&Config, &mut Artifacts) -> Result<String, CliError>;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
    pub run: RunFn,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "steady",
        about: "analytic and rate-model steady-state populations",
        params: pump::STEADY,
        run: pump::steady,
    },
    Experiment {
        name: "fig1a",
        about: "general-scheme pump, projective measurement and repump",
        params: pump::FIG1A,
        run: pump::fig1a,
    },
    Experiment {
        name: "fig1b",
        about: "simplified-scheme sector populations versus time",
        params: pump::FIG1B,
        run: pump::fig1b,
    },
    Experiment {
        name: "cycles",
        about: "pump/measure/repump success statistics",
        params: pump::CYCLES,
        run: pump::cycles,
    },
    Experiment {
        name: "fig2a",
        about: "telecloning fidelity versus the polar angle of the input",
        params: telecloning::FIG2A,
        run: telecloning::fig2a,
    },
    Experiment {
        name: "fig2b",
        about: "Bloch-averaged telecloning fidelity versus N",
        params: telecloning::FIG2B,
        run: telecloning::fig2b,
    },
    Experiment {
        name: "fig3",
        about: "dephasing and calibration-error scans on an N-qubit register",
        params: noise::FIG3,
        run: noise::fig3,
    },
    Experiment {
        name: "fig4",
        about: "AKLT chain growth by parity measurements",
        params: aklt::FIG4,
        run: aklt::fig4,
    },
    Experiment {
        name: "cavity",
        about: "Raman rates, feasibility report and laser phase patterns",
        params: cavity::CAVITY,
        run: cavity::cavity,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

/// A spin parameter: a non-negative multiple of ½.
pub(crate) fn spin(cfg: &Config, name: &str) -> Result<HalfInt, CliError> {
    let x = cfg.float(name);
    HalfInt::try_from_f64(x)
        .ok()
        .filter(|j| j.twice() >= 0)
        .ok_or_else(|| CliError::Config(format!("--{name} must be a non-negative multiple of 1/2, got {x}")))
}
