use thiserror::Error;

/// Failure of a CLI run; each variant maps to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unknown experiment or missing name; the usage text is attached.
    #[error("{message}\n\n{usage}")]
    Usage { message: String, usage: String },

    /// Bad flag, config key, value or output location.
    #[error("configuration error: {0}")]
    Config(String),

    /// A simulation failed; `module` names the library module.
    #[error("numerical failure in {module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: scs_core::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } | CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

/// Attaches the library module to a core error. Rejected inputs are
/// configuration errors; everything else is numerical.
pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> InModule<T> for scs_core::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|e| match e {
            scs_core::Error::Input(m) => CliError::Config(format!("{module}: {m}")),
            e @ scs_core::Error::Resource { .. } => CliError::Config(format!("{module}: {e}")),
            source => CliError::Numerical { module, source },
        })
    }
}
