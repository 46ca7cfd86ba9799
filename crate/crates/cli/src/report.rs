use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}", render_input_error(path, *line, message, context.as_deref()))]
    Input {
        path: PathBuf,
        line: Option<usize>,
        message: String,
        context: Option<String>,
    },
    #[error("{0}")]
    Failed(String),
}

fn render_input_error(path: &Path, line: Option<usize>, message: &str, context: Option<&str>) -> String {
    let mut s = match line {
        Some(l) => format!("{}:{l}: {message}", path.display()),
        None => format!("{}: {message}", path.display()),
    };
    if let (Some(l), Some(text)) = (line, context) {
        let _ = write!(s, "\n{l:>5} | {text}");
    }
    s
}

/// A file that was read, with its contents and SHA-256 digest.
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub digest: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<Input, CliError> {
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let digest = Sha256::digest(&bytes).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        let text = String::from_utf8(bytes).map_err(|_| CliError::Input {
            path: path.to_path_buf(),
            line: None,
            message: "file is not valid UTF-8".into(),
            context: None,
        })?;
        Ok(Input {
            path: path.to_path_buf(),
            text,
            digest,
        })
    }

    /// Wrap a parse error, quoting the offending line when known.
    pub fn error(&self, line: Option<usize>, message: impl ToString) -> CliError {
        CliError::Input {
            path: self.path.clone(),
            line,
            message: message.to_string(),
            context: line.and_then(|l| self.text.lines().nth(l.wrapping_sub(1))).map(str::to_owned),
        }
    }
}

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Result of one subcommand before formatting.
pub struct Outcome {
    pub verdict: bool,
    pub text: String,
    pub result: serde_json::Value,
    pub dot: Option<String>,
}

impl Outcome {
    pub fn new(verdict: bool, text: String, result: impl Serialize) -> Outcome {
        Outcome {
            verdict,
            text,
            result: serde_json::to_value(result).expect("reports serialize"),
            dot: None,
        }
    }

    pub fn with_dot(mut self, dot: String) -> Outcome {
        self.dot = Some(dot);
        self
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub command: &'a [String],
    pub inputs: Vec<InputDigest>,
    pub verdict: bool,
    pub result: &'a serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<f64>,
}
