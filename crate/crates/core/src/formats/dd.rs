//! dd-format graph matching files and their `gm p k` multi-graph extension.
//!
//! Lines whose first token is `c` are comments. Assignment ids are kept as
//! written; `e` lines may precede the `a` lines they reference.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use super::number::{format_f64, parse_f64};
use super::reader::LineReader;
use super::{FormatTag, ParseError, Position};
use crate::model::{Assignment, GmInstance, MgmInstance};

struct Header {
    left: usize,
    right: usize,
    assignments: usize,
    edges: usize,
    at: Position,
}

/// Incremental parser for one dd body.
#[derive(Default)]
struct GmBody {
    header: Option<Header>,
    assignments: Vec<Assignment>,
    ids: HashMap<usize, Position>,
    quadratic: Vec<(usize, usize, f64, Position)>,
}

fn fields<R: BufRead>(lines: &LineReader<R>, toks: &[&str], n: usize, shape: &str) -> Result<(), ParseError> {
    if toks.len() != n {
        return Err(lines.error_line(format!("expected `{shape}`, found {} tokens", toks.len())));
    }
    Ok(())
}

fn index<R: BufRead>(lines: &LineReader<R>, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| lines.error_token(tok, format!("expected {what}, found `{tok}`")))
}

fn cost<R: BufRead>(lines: &LineReader<R>, tok: &str) -> Result<f64, ParseError> {
    match parse_f64(tok) {
        Some(c) if c.is_finite() => Ok(c),
        _ => Err(lines.error_token(tok, format!("expected finite cost, found `{tok}`"))),
    }
}

impl GmBody {
    /// Consumes one non-comment line of the current reader.
    fn feed<R: BufRead>(&mut self, lines: &LineReader<R>, toks: &[&str]) -> Result<(), ParseError> {
        match toks[0] {
            "p" => {
                fields(lines, toks, 5, "p N0 N1 A E")?;
                if self.header.is_some() {
                    return Err(lines.error_line("second `p` line"));
                }
                self.header = Some(Header {
                    left: index(lines, toks[1], "left size")?,
                    right: index(lines, toks[2], "right size")?,
                    assignments: index(lines, toks[3], "assignment count")?,
                    edges: index(lines, toks[4], "quadratic term count")?,
                    at: lines.line_position(),
                });
            }
            "a" => {
                fields(lines, toks, 5, "a id i j cost")?;
                let header = self.header.as_ref().ok_or_else(|| lines.error_line("`a` line before the `p` line"))?;
                let id = index(lines, toks[1], "assignment id")?;
                let left = index(lines, toks[2], "left node")?;
                let right = index(lines, toks[3], "right node")?;
                if left >= header.left {
                    return Err(lines.error_token(toks[2], format!("left node {left} out of range (N0 = {})", header.left)));
                }
                if right >= header.right {
                    return Err(lines.error_token(toks[3], format!("right node {right} out of range (N1 = {})", header.right)));
                }
                let cost = cost(lines, toks[4])?;
                if self.ids.insert(id, lines.line_position()).is_some() {
                    return Err(lines.error_line(format!("duplicate assignment id {id}")));
                }
                self.assignments.push(Assignment { id, left, right, cost });
            }
            "e" => {
                fields(lines, toks, 4, "e a a' cost")?;
                if self.header.is_none() {
                    return Err(lines.error_line("`e` line before the `p` line"));
                }
                let a = index(lines, toks[1], "assignment id")?;
                let b = index(lines, toks[2], "assignment id")?;
                if a == b {
                    return Err(lines.error_line(format!("quadratic term pairs assignment {a} with itself")));
                }
                let d = cost(lines, toks[3])?;
                self.quadratic.push((a, b, d, lines.line_position()));
            }
            other => return Err(lines.error_line(format!("unknown record `{other}`"))),
        }
        Ok(())
    }

    fn finish<R: BufRead>(self, lines: &LineReader<R>, end: Position) -> Result<GmInstance, ParseError> {
        let header = self.header.ok_or_else(|| lines.error_at(end, "missing `p N0 N1 A E` line"))?;
        if self.assignments.len() != header.assignments {
            return Err(lines.error_at(
                header.at,
                format!("declares {} assignments, found {}", header.assignments, self.assignments.len()),
            ));
        }
        if self.quadratic.len() != header.edges {
            return Err(lines.error_at(
                header.at,
                format!("declares {} quadratic terms, found {}", header.edges, self.quadratic.len()),
            ));
        }
        for &(a, b, _, at) in &self.quadratic {
            for id in [a, b] {
                if !self.ids.contains_key(&id) {
                    return Err(lines.error_at(at, format!("unknown assignment id {id}")));
                }
            }
        }
        let mut pairs = HashMap::new();
        for a in &self.assignments {
            if let Some(prev) = pairs.insert((a.left, a.right), a.id) {
                return Err(lines.error_at(
                    self.ids[&a.id],
                    format!("assignments {prev} and {} both map {} to {}", a.id, a.left, a.right),
                ));
            }
        }
        let quadratic = self.quadratic.into_iter().map(|(a, b, d, _)| (a, b, d)).collect();
        GmInstance::new(header.left, header.right, self.assignments, quadratic)
            .map_err(|e| lines.error_at(header.at, e.to_string()))
    }
}

fn is_comment(toks: &[&str]) -> bool {
    toks.first() == Some(&"c")
}

pub fn parse_gm(text: &str) -> Result<GmInstance, ParseError> {
    read_gm(text.as_bytes())
}

pub fn read_gm<R: BufRead>(reader: R) -> Result<GmInstance, ParseError> {
    let mut lines = LineReader::new(reader, FormatTag::Gm);
    let mut body = GmBody::default();
    while lines.next_line()?.is_some() {
        let toks: Vec<&str> = lines.current().split_ascii_whitespace().collect();
        if toks.is_empty() || is_comment(&toks) {
            continue;
        }
        body.feed(&lines, &toks)?;
    }
    let end = lines.end_position();
    body.finish(&lines, end)
}

type OpenBlock = ((usize, usize), Position, GmBody);

fn close_block<R: BufRead>(
    lines: &LineReader<R>,
    block: Option<OpenBlock>,
    end: Position,
    sizes: &mut HashMap<usize, (usize, Position)>,
    problems: &mut BTreeMap<(usize, usize), GmInstance>,
) -> Result<(), ParseError> {
    let Some(((p, k), at, body)) = block else { return Ok(()) };
    let gm = body.finish(lines, end).map_err(|mut e| {
        e.message = format!("in block `gm {p} {k}`: {}", e.message);
        e
    })?;
    for (set, size) in [(p, gm.left_size()), (k, gm.right_size())] {
        match sizes.get(&set) {
            Some(&(known, known_at)) if known != size => {
                return Err(lines.error_at(
                    at,
                    format!(
                        "point set {set} has {size} points in block `gm {p} {k}` but {known} in the block at line {}",
                        known_at.line
                    ),
                ));
            }
            Some(_) => {}
            None => {
                sizes.insert(set, (size, at));
            }
        }
    }
    problems.insert((p, k), gm);
    Ok(())
}

pub fn parse_mgm(text: &str) -> Result<MgmInstance, ParseError> {
    read_mgm(text.as_bytes())
}

pub fn read_mgm<R: BufRead>(reader: R) -> Result<MgmInstance, ParseError> {
    let mut lines = LineReader::new(reader, FormatTag::Mgm);
    let mut problems = BTreeMap::new();
    let mut sizes: HashMap<usize, (usize, Position)> = HashMap::new();
    let mut current: Option<OpenBlock> = None;

    while lines.next_line()?.is_some() {
        let toks: Vec<&str> = lines.current().split_ascii_whitespace().collect();
        if toks.is_empty() || is_comment(&toks) {
            continue;
        }
        if toks[0] == "gm" {
            let at = lines.line_position();
            close_block(&lines, current.take(), at, &mut sizes, &mut problems)?;
            fields(&lines, &toks, 3, "gm p k")?;
            let p = index(&lines, toks[1], "graph index")?;
            let k = index(&lines, toks[2], "graph index")?;
            if p >= k {
                return Err(lines.error_line(format!("block `gm {p} {k}` must satisfy p < k")));
            }
            if problems.contains_key(&(p, k)) {
                return Err(lines.error_line(format!("duplicate block `gm {p} {k}`")));
            }
            current = Some(((p, k), at, GmBody::default()));
            continue;
        }
        let Some((pair, _, body)) = current.as_mut() else {
            return Err(lines.error_line("expected `gm p k` block header"));
        };
        let pair = *pair;
        body.feed(&lines, &toks).map_err(|mut e| {
            e.message = format!("in block `gm {} {}`: {}", pair.0, pair.1, e.message);
            e
        })?;
    }
    let end = lines.end_position();
    close_block(&lines, current.take(), end, &mut sizes, &mut problems)?;
    MgmInstance::from_problems(problems).map_err(|e| lines.error_at(end, e.to_string()))
}

fn write_gm_body(out: &mut String, gm: &GmInstance) {
    let _ = writeln!(out, "p {} {} {} {}", gm.left_size(), gm.right_size(), gm.assignments().len(), gm.quadratic().len());
    for a in gm.assignments() {
        let _ = writeln!(out, "a {} {} {} {}", a.id, a.left, a.right, format_f64(a.cost));
    }
    for q in gm.quadratic() {
        let a = gm.assignments()[q.first].id;
        let b = gm.assignments()[q.second].id;
        let _ = writeln!(out, "e {a} {b} {}", format_f64(q.cost));
    }
}

pub fn write_gm(gm: &GmInstance) -> String {
    let mut out = String::new();
    write_gm_body(&mut out, gm);
    out
}

pub fn write_mgm(mgm: &MgmInstance) -> String {
    let mut out = String::new();
    for (&(p, k), gm) in mgm.problems() {
        let _ = writeln!(out, "gm {p} {k}");
        write_gm_body(&mut out, gm);
    }
    out
}
