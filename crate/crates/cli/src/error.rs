use std::fmt;
use std::process::ExitCode;

use serde::Serialize;

pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_CHECK_FAILED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(oneobs::Error),
    /// Reading inputs failed.
    Input(String),
    /// Writing the report failed.
    Output(String),
    /// The report was written but at least one check failed.
    ChecksFailed(usize),
}

impl From<oneobs::Error> for CliError {
    fn from(e: oneobs::Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} verification check(s) failed"),
        }
    }
}

#[derive(Serialize)]
struct Reason<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_alpha: Option<f64>,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use oneobs::Error as E;
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Output(_) => EXIT_IO,
            CliError::ChecksFailed(_) => EXIT_CHECK_FAILED,
            CliError::Core(e) => match e {
                E::Config(_) | E::Format(_) | E::Data(_) => EXIT_USAGE,
                E::Domain(_)
                | E::Assumption(_)
                | E::RootNotFound(_)
                | E::Unattainable { .. }
                | E::InfeasibleAlpha { .. } => EXIT_INFEASIBLE,
            },
        }
    }

    fn tag(&self) -> &'static str {
        use oneobs::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Output(_) => "output",
            CliError::ChecksFailed(_) => "verification-failed",
            CliError::Core(e) => match e {
                E::Domain(_) => "domain",
                E::Config(_) => "config",
                E::Format(_) => "format",
                E::Data(_) => "data",
                E::Assumption(_) => "assumption",
                E::RootNotFound(_) => "root-not-found",
                E::Unattainable { .. } => "unattainable",
                E::InfeasibleAlpha { .. } => "infeasible-alpha",
            },
        }
    }

    /// One-line JSON object describing the failure, for stderr.
    pub fn reason_json(&self) -> String {
        let (alpha, min_alpha) = match self {
            CliError::Core(oneobs::Error::InfeasibleAlpha { alpha, min_alpha }) => (Some(*alpha), Some(*min_alpha)),
            _ => (None, None),
        };
        let message = match self {
            CliError::Core(oneobs::Error::InfeasibleAlpha { min_alpha, .. }) => {
                format!("alpha ≤ 1 − K² = {}", round_sig(*min_alpha))
            }
            other => other.to_string(),
        };
        let reason = Reason { error: self.tag(), message, alpha, min_alpha };
        serde_json::to_string(&reason).expect("reason serializes")
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

/// Rounds to 12 significant digits so `0.36000000000000004` prints as `0.36`.
fn round_sig(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

pub type CliResult<T> = Result<T, CliError>;
