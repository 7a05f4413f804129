use std::path::{Path, PathBuf};

use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Parse,
    Domain,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Parse => 2,
            Kind::Domain => 3,
            Kind::Io => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Parse => "parse",
            Kind::Domain => "domain",
            Kind::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
    pub path: Option<PathBuf>,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Parse,
            message: message.into(),
            path: None,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self {
            kind: Kind::Io,
            message: err.to_string(),
            path: Some(path.to_path_buf()),
        }
    }

    pub fn at(mut self, path: &Path) -> Self {
        self.path = Some(path.to_path_buf());
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut err = json!({
            "kind": self.kind.name(),
            "code": self.kind.exit_code(),
            "message": self.message,
        });
        if let Some(p) = &self.path {
            err["path"] = json!(p.display().to_string());
        }
        json!({ "error": err })
    }
}

impl From<halo_core::Error> for CliError {
    fn from(e: halo_core::Error) -> Self {
        use halo_core::Error::*;
        let kind = match e {
            ParseScalar { .. } | Geometry(_) | Table(_) => Kind::Parse,
            _ => Kind::Domain,
        };
        Self {
            kind,
            message: e.to_string(),
            path: None,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
