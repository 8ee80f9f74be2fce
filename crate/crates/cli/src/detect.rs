//! Format detection from the file head, plus a scan for the MARKOV suffix
//! sections.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use spp_core::formats::{parse_shape_filename, FormatTag};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("cannot read input: {0}")]
    Io(#[from] io::Error),
    #[error("no known format header found")]
    Unknown,
    #[error("ambiguous format, candidates: {}", names(.0))]
    Ambiguous(Vec<FormatTag>),
}

fn names(tags: &[FormatTag]) -> String {
    tags.iter().map(|t| t.name()).collect::<Vec<_>>().join(", ")
}

/// Comment and blank lines of every supported format.
fn is_filler(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#') || t.starts_with('\\') || t == "c" || t.starts_with("c ")
}

/// Detects the format of a stream. Only the first meaningful line is needed,
/// except for MARKOV files, which are scanned to the end for a
/// `MAX-POTENTIALS` or `PROJECTIONS` section.
pub fn detect_reader<R: BufRead>(mut reader: R) -> Result<FormatTag, DetectError> {
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(DetectError::Unknown);
        }
        if !is_filler(&line) {
            break;
        }
    }
    let head = line.trim();
    let first = head.split_whitespace().next().unwrap_or("");
    let tag = match first {
        "MARKOV" => return markov_kind(reader),
        "MULTICUT" => FormatTag::Multicut,
        "ASYMMETRIC" if head.split_whitespace().eq(["ASYMMETRIC", "MULTIWAY", "CUT"]) => FormatTag::Amwc,
        "p" => FormatTag::Gm,
        "gm" => FormatTag::Mgm,
        "H" | "APP" | "DISAPP" | "MOVE" | "DIV" | "CONFSET" => FormatTag::CellTracking,
        _ if ["minimize", "minimum", "min"].contains(&first.to_ascii_lowercase().as_str()) => FormatTag::Lp,
        _ => return Err(DetectError::Unknown),
    };
    Ok(tag)
}

fn markov_kind<R: BufRead>(reader: R) -> Result<FormatTag, DetectError> {
    let (mut bottleneck, mut projections) = (false, false);
    for line in reader.lines() {
        for tok in line?.split_whitespace() {
            bottleneck |= tok == "MAX-POTENTIALS";
            projections |= tok == "PROJECTIONS";
        }
    }
    match (bottleneck, projections) {
        (false, false) => Ok(FormatTag::Mrf),
        (true, false) => Ok(FormatTag::BottleneckMrf),
        (false, true) => Ok(FormatTag::Tomography),
        (true, true) => Err(DetectError::Ambiguous(vec![FormatTag::BottleneckMrf, FormatTag::Tomography])),
    }
}

pub fn detect_text(text: &str) -> Result<FormatTag, DetectError> {
    detect_reader(text.as_bytes())
}

/// Detects the format of a file. LP files whose name follows the shape
/// matching scheme are reported as shape matching.
pub fn detect_path(path: &Path) -> Result<FormatTag, DetectError> {
    let tag = detect_reader(BufReader::new(File::open(path)?))?;
    if tag == FormatTag::Lp && parse_shape_filename(&path.to_string_lossy()).is_ok() {
        return Ok(FormatTag::ShapeMatching);
    }
    Ok(tag)
}
