//! Dataset manifest: one `name url sha256 format [notes]` line per dataset.

use std::collections::HashSet;

use serde::Serialize;
use spp_core::formats::FormatTag;
use thiserror::Error;

/// The manifest shipped with the binary.
pub const BUILTIN: &str = include_str!("../datasets.manifest");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetEntry {
    pub name: String,
    pub url: String,
    /// Lowercase hex digest of the downloaded file, when known.
    pub sha256: Option<String>,
    pub format: FormatTag,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetManifest {
    pub entries: Vec<DatasetEntry>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("manifest line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

impl DatasetManifest {
    pub fn parse(text: &str) -> Result<Self, ManifestError> {
        let mut entries = Vec::new();
        let mut names = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let err = |message: String| ManifestError { line: i + 1, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 4 {
                return Err(err("expected `name url sha256 format [notes]`".into()));
            }
            let sha256 = match toks[2] {
                "-" => None,
                h if h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()) => Some(h.to_ascii_lowercase()),
                h => return Err(err(format!("checksum `{h}` is not 64 hex digits or `-`"))),
            };
            let format = FormatTag::from_name(toks[3]).ok_or_else(|| err(format!("unknown format `{}`", toks[3])))?;
            if !names.insert(toks[0]) {
                return Err(err(format!("dataset `{}` listed twice", toks[0])));
            }
            entries.push(DatasetEntry {
                name: toks[0].to_string(),
                url: toks[1].to_string(),
                sha256,
                format,
                notes: toks[4..].join(" "),
            });
        }
        Ok(Self { entries })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in manifest is valid")
    }

    pub fn get(&self, name: &str) -> Option<&DatasetEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }
}
