//! The `scs` command line: named experiments with reproducible
//! configuration and CSV/JSON export.
//!
//! An experiment is chosen by a positional name, `--experiment` or the
//! `experiment` key of a `--config` JSON file. Parameters come from
//! defaults, then the file, then flags. Exit status is 0 on success, 2 for
//! configuration errors and 3 for numerical failures.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod params;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Arg, Command};

pub use config::{Config, ConfigFile, Overrides};
pub use error::CliError;
use experiments::{Experiment, EXPERIMENTS};
use output::Artifacts;

/// Environment variable that sets the worker-thread count.
pub const THREADS_ENV: &str = "SCS_THREADS";

/// What a successful invocation produced.
#[derive(Debug)]
pub enum Outcome {
    Help(String),
    Ran { summary: String, files: Vec<PathBuf> },
}

pub fn usage() -> String {
    let mut s = String::from(
        "usage: scs <EXPERIMENT> [--config PATH] [--seed INT] [--out DIR] [--<param> VALUE ...]\n\
         \x20      scs --experiment <EXPERIMENT> ...\n\nexperiments:\n",
    );
    for e in EXPERIMENTS {
        let _ = writeln!(s, "  {:<8} {}", e.name, e.about);
    }
    s.push_str("\nrun `scs <EXPERIMENT> --help` for its parameters");
    s
}

fn command(exp: &Experiment) -> Command {
    let mut cmd = Command::new("scs")
        .version(env!("CARGO_PKG_VERSION"))
        .about(exp.about)
        .override_usage(format!("scs {} [OPTIONS]", exp.name))
        .arg(Arg::new("name").value_name("EXPERIMENT").index(1).help("experiment to run"))
        .arg(Arg::new("experiment").long("experiment").value_name("NAME").help("experiment to run"))
        .arg(Arg::new("config").long("config").value_name("PATH").help("flat JSON config file"))
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_name("INT")
                .allow_hyphen_values(true)
                .help("random seed [default: 1]"),
        )
        .arg(Arg::new("out").long("out").value_name("DIR").help("output directory [default: out]"));
    for p in exp.params {
        cmd = cmd.arg(
            Arg::new(p.name)
                .long(p.name)
                .value_name(p.kind.value_name())
                .allow_hyphen_values(true)
                .help(config::describe(p)),
        );
    }
    cmd
}

#[derive(Default)]
struct Scan {
    positional: Option<String>,
    flag: Option<String>,
    config: Option<String>,
    help: bool,
}

/// Finds the experiment name and config path before the full parse, since
/// the accepted flags depend on the experiment.
fn prescan(args: &[String]) -> Scan {
    let mut s = Scan::default();
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--" {
            if s.positional.is_none() {
                s.positional = args.get(i + 1).cloned();
            }
            break;
        }
        if matches!(a.as_str(), "-h" | "--help" | "-V" | "--version") {
            s.help = true;
        } else if let Some(flag) = a.strip_prefix("--") {
            let (name, value) = match flag.split_once('=') {
                Some((n, v)) => (n, Some(v.to_string())),
                None => {
                    i += 1;
                    (flag, args.get(i).cloned())
                }
            };
            match name {
                "experiment" => s.flag = value,
                "config" => s.config = value,
                _ => {}
            }
        } else if s.positional.is_none() {
            s.positional = Some(a.clone());
        }
        i += 1;
    }
    s
}

fn pick_experiment(scan: &Scan, file: Option<&ConfigFile>) -> Result<Option<&'static Experiment>, CliError> {
    let from_args = match (&scan.positional, &scan.flag) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!("experiment given twice: '{a}' and '{b}'")));
        }
        (a, b) => a.clone().or_else(|| b.clone()),
    };
    let name = match from_args {
        Some(n) => Some(n),
        None => file.map(|f| f.experiment()).transpose()?.flatten(),
    };
    match name {
        None => Ok(None),
        Some(n) => experiments::find(&n).map(Some).ok_or_else(|| CliError::Usage {
            message: format!("unknown experiment '{n}'"),
            usage: usage(),
        }),
    }
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

/// Result of parsing the command line.
pub enum Resolved {
    /// Help or version text was requested.
    Help(String),
    Run(&'static Experiment, Config),
}

/// Resolves the configuration for `args` (program name first) without
/// running anything.
pub fn resolve<I, T>(args: I) -> Result<Resolved, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<String> = args
        .into_iter()
        .map(|a| {
            a.into()
                .into_string()
                .map_err(|a| CliError::Config(format!("argument {a:?} is not valid UTF-8")))
        })
        .collect::<Result<_, _>>()?;
    let scan = prescan(&args);
    let file = scan.config.as_deref().map(|p| ConfigFile::load(Path::new(p))).transpose()?;
    let Some(exp) = pick_experiment(&scan, file.as_ref())? else {
        if scan.help {
            return Ok(Resolved::Help(usage()));
        }
        return Err(CliError::Usage {
            message: "no experiment given".into(),
            usage: usage(),
        });
    };
    let matches = match command(exp).try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            return Ok(Resolved::Help(e.to_string()));
        }
        Err(e) => {
            let text = e.to_string();
            return Err(CliError::Config(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    let get = |id: &str| matches.get_one::<String>(id).cloned();
    let flags = Overrides {
        seed: get("seed"),
        out: get("out"),
        params: exp.params.iter().filter_map(|p| get(p.name).map(|v| (p.name.to_string(), v))).collect(),
    };
    Ok(Resolved::Run(exp, Config::resolve(exp, file.as_ref(), &flags)?))
}

/// Runs one experiment from a resolved configuration.
pub fn run_experiment(exp: &Experiment, cfg: &Config) -> Result<Outcome, CliError> {
    let mut art = Artifacts::new(cfg);
    let summary = match thread_count()? {
        None => (exp.run)(cfg, &mut art)?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?
            .install(|| (exp.run)(cfg, &mut art))?,
    };
    Ok(Outcome::Ran {
        summary,
        files: art.written().to_vec(),
    })
}

/// Parses `args` (program name first) and runs the experiment.
pub fn try_run<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match resolve(args)? {
        Resolved::Help(text) => Ok(Outcome::Help(text)),
        Resolved::Run(exp, cfg) => {
            log::info!("running {} with seed {}", exp.name, cfg.seed);
            run_experiment(exp, &cfg)
        }
    }
}

/// [`try_run`] with reporting; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match try_run(args) {
        Ok(Outcome::Help(text)) => {
            println!("{}", text.trim_end());
            0
        }
        Ok(Outcome::Ran { summary, files }) => {
            println!("{summary}");
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
