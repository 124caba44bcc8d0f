use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config { line: Option<usize>, message: String },
    BlowUp(mdpc::Error),
    Io(std::io::Error),
    Numerics(mdpc::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { line: Some(l), message } => {
                write!(f, "config error (line {l}): {message}")
            }
            CliError::Config { line: None, message } => write!(f, "config error: {message}"),
            CliError::BlowUp(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            line: None,
            message: message.into(),
        }
    }

    pub fn config_at(line: usize, message: impl Into<String>) -> Self {
        CliError::Config {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Numerics(_) => 2,
            CliError::BlowUp(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<mdpc::Error> for CliError {
    fn from(e: mdpc::Error) -> Self {
        match e {
            mdpc::Error::BlowUp { .. } | mdpc::Error::AllUnstable { .. } => CliError::BlowUp(e),
            other => CliError::Numerics(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
