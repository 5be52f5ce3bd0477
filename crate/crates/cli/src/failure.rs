use spectra_core::Error;

/// Ways a command can end unsuccessfully, each with its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Solver(String),
    Violated(usize),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Violated(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Config(m) => format!("configuration error: {m}"),
            Failure::Solver(m) => format!("solver failure: {m}"),
            Failure::Violated(count) => format!("{count} bound report(s) not satisfied"),
        }
    }

    /// Classifies a core error, prefixing the offending field.
    pub fn from_core(field: &str, e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } | Error::RankDeficient { .. } | Error::NonFinite(_) => Failure::Solver(e.to_string()),
            _ => Failure::Config(format!("{field}: {e}")),
        }
    }
}
