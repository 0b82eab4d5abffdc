use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Evaluation at a point where the model is singular (e.g. zero link distance).
    #[error("singular evaluation: {0}")]
    Singular(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge on [{lower}, {upper}]: achieved error {achieved:e}, requested {requested:e}")]
    NonConvergence {
        lower: f64,
        upper: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("config syntax error: {0}")]
    ConfigSyntax(String),

    #[error("config error at `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            detail: detail.into(),
        }
    }

    /// Short machine-greppable code for CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } | Error::ConfigSyntax(_) | Error::Config { .. } => "E_CONFIG",
            Error::Singular(_) | Error::NonConvergence { .. } => "E_NUMERIC",
            Error::Io { .. } => "E_IO",
        }
    }

    /// Process exit status: 2 config, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "E_CONFIG" => 2,
            "E_NUMERIC" => 3,
            _ => 4,
        }
    }
}
