use bimodal_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("config: {0}")]
    Config(String),

    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Bad input maps to 2; everything else is an internal failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                CoreError::Infeasible { .. }
                | CoreError::InvalidParameter(_)
                | CoreError::UnknownName(_)
                | CoreError::DimensionMismatch { .. },
            )
            | CliError::Config(_) => EXIT_INPUT,
            CliError::Core(CoreError::NotSquare { .. }) | CliError::Io(..) | CliError::Output(_) => EXIT_INTERNAL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_errors_exit_with_two() {
        let infeasible = CliError::from(CoreError::Infeasible {
            what: "detuning".into(),
            requested: 3.0,
            lower: 0.0,
            upper: 2.7,
        });
        assert_eq!(infeasible.exit_code(), EXIT_INPUT);
        assert!(infeasible.to_string().contains("[0, 2.7]"));
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_INPUT);
        assert_eq!(CliError::Output("x".into()).exit_code(), EXIT_INTERNAL);
    }
}
