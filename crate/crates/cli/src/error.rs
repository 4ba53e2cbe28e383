use std::fmt;

use onhold::{CorpusError, DictionaryError, EvalError, ModelError, NgramError};

/// Bad input from the user: missing files, malformed data, bad flags.
pub const EXIT_INPUT: u8 = 2;
/// Something that should not happen whatever the input.
pub const EXIT_INTERNAL: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    pub fn internal(message: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::input(e)
    }
}

impl From<DictionaryError> for CliError {
    fn from(e: DictionaryError) -> Self {
        CliError::input(e)
    }
}

impl From<NgramError> for CliError {
    fn from(e: NgramError) -> Self {
        CliError::input(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonFiniteLoss { .. } | ModelError::LengthMismatch { .. } => CliError::internal(e),
            _ => CliError::input(e),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Model(m) => m.into(),
            EvalError::Ngram(n) => n.into(),
            EvalError::LengthMismatch(..) => CliError::internal(e),
            _ => CliError::input(e),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::internal(format!("cannot serialize report: {e}"))
    }
}
