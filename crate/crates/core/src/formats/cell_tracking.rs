//! Cell tracking files: `H`, `APP`, `DISAPP`, `MOVE`, `DIV` and `CONFSET`
//! records, with `#` comments.

use std::fmt::Write as _;
use std::io::BufRead;

use super::number::{format_f64, parse_f64};
use super::reader::LineReader;
use super::{FormatTag, ParseError, Position};
use crate::model::{Boundary, CellTrackingInstance, Detection, Division, Move, RecordRef};

pub fn parse_cell_tracking(text: &str) -> Result<CellTrackingInstance, ParseError> {
    read_cell_tracking(text.as_bytes())
}

fn uint<R: BufRead>(lines: &LineReader<R>, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| lines.error_token(tok, format!("expected {what}, found `{tok}`")))
}

fn cost<R: BufRead>(lines: &LineReader<R>, tok: &str) -> Result<f64, ParseError> {
    parse_f64(tok).ok_or_else(|| lines.error_token(tok, format!("expected cost, found `{tok}`")))
}

fn arity<R: BufRead>(lines: &LineReader<R>, toks: &[&str], shape: &str) -> Result<(), ParseError> {
    let expected = shape.split_ascii_whitespace().count();
    if toks.len() != expected {
        return Err(lines.error_line(format!("expected `{shape}`, found {} tokens", toks.len())));
    }
    Ok(())
}

#[derive(Default)]
struct Records {
    detections: Vec<(Detection, Position)>,
    appearances: Vec<(Boundary, Position)>,
    disappearances: Vec<(Boundary, Position)>,
    moves: Vec<(Move, Position)>,
    divisions: Vec<(Division, Position)>,
    exclusions: Vec<(Vec<usize>, Position)>,
}

pub fn read_cell_tracking<R: BufRead>(reader: R) -> Result<CellTrackingInstance, ParseError> {
    let mut lines = LineReader::new(reader, FormatTag::CellTracking);
    let mut r = Records::default();
    while lines.next_line()?.is_some() {
        let line = lines.current();
        let content = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_ascii_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let at = lines.line_position();
        match toks[0] {
            "H" => {
                arity(&lines, &toks, "H t i c")?;
                let frame = uint(&lines, toks[1], "frame")?;
                let id = uint(&lines, toks[2], "detection id")?;
                r.detections.push((Detection { frame, id, cost: cost(&lines, toks[3])? }, at));
            }
            "APP" | "DISAPP" => {
                arity(&lines, &toks, "APP t i c")?;
                let frame = uint(&lines, toks[1], "frame")?;
                let detection = uint(&lines, toks[2], "detection id")?;
                let b = Boundary { frame, detection, cost: cost(&lines, toks[3])? };
                if toks[0] == "APP" {
                    r.appearances.push((b, at));
                } else {
                    r.disappearances.push((b, at));
                }
            }
            "MOVE" => {
                arity(&lines, &toks, "MOVE id i j c")?;
                let id = uint(&lines, toks[1], "move id")?;
                let from = uint(&lines, toks[2], "detection id")?;
                let to = uint(&lines, toks[3], "detection id")?;
                r.moves.push((Move { id, from, to, cost: cost(&lines, toks[4])? }, at));
            }
            "DIV" => {
                arity(&lines, &toks, "DIV id i j k c")?;
                let id = uint(&lines, toks[1], "division id")?;
                let parent = uint(&lines, toks[2], "detection id")?;
                let a = uint(&lines, toks[3], "detection id")?;
                let b = uint(&lines, toks[4], "detection id")?;
                r.divisions.push((Division { id, parent, children: [a, b], cost: cost(&lines, toks[5])? }, at));
            }
            "CONFSET" => {
                let rest = content.trim_start().strip_prefix("CONFSET").unwrap_or("");
                let (lhs, rhs) = rest
                    .split_once("<=")
                    .ok_or_else(|| lines.error_line("expected `CONFSET i1 + ... + il <= 1`"))?;
                if rhs.trim() != "1" {
                    return Err(lines.error_line(format!("exclusion right-hand side must be 1, found `{}`", rhs.trim())));
                }
                let members = lhs
                    .split('+')
                    .map(|s| {
                        let s = s.trim();
                        s.parse::<usize>().map_err(|_| lines.error_line(format!("expected detection id, found `{s}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                r.exclusions.push((members, at));
            }
            other => return Err(lines.error_token(toks[0], format!("unknown record `{other}`"))),
        }
    }

    let located = |rr: RecordRef| match rr {
        RecordRef::Detection(i) => r.detections[i].1,
        RecordRef::Appearance(i) => r.appearances[i].1,
        RecordRef::Disappearance(i) => r.disappearances[i].1,
        RecordRef::Move(i) => r.moves[i].1,
        RecordRef::Division(i) => r.divisions[i].1,
        RecordRef::Exclusion(i) => r.exclusions[i].1,
    };
    CellTrackingInstance::new_located(
        r.detections.iter().map(|x| x.0).collect(),
        r.appearances.iter().map(|x| x.0).collect(),
        r.disappearances.iter().map(|x| x.0).collect(),
        r.moves.iter().map(|x| x.0).collect(),
        r.divisions.iter().map(|x| x.0).collect(),
        r.exclusions.iter().map(|x| x.0.clone()).collect(),
    )
    .map_err(|(rr, e)| lines.error_at(located(rr), e.to_string()))
}

pub fn write_cell_tracking(instance: &CellTrackingInstance) -> String {
    let mut out = String::new();
    for d in instance.detections() {
        let _ = writeln!(out, "H {} {} {}", d.frame, d.id, format_f64(d.cost));
    }
    for b in instance.appearances() {
        let _ = writeln!(out, "APP {} {} {}", b.frame, b.detection, format_f64(b.cost));
    }
    for b in instance.disappearances() {
        let _ = writeln!(out, "DISAPP {} {} {}", b.frame, b.detection, format_f64(b.cost));
    }
    for m in instance.moves() {
        let _ = writeln!(out, "MOVE {} {} {} {}", m.id, m.from, m.to, format_f64(m.cost));
    }
    for d in instance.divisions() {
        let [a, b] = d.children;
        let _ = writeln!(out, "DIV {} {} {a} {b} {}", d.id, d.parent, format_f64(d.cost));
    }
    for set in instance.exclusions() {
        let ids: Vec<String> = set.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "CONFSET {} <= 1", ids.join(" + "));
    }
    out
}
