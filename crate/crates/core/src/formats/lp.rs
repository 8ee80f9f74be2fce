//! LP files restricted to binary programs.
//!
//! Sections are `Minimize`, `Subject To`, `Bounds`, `Binaries`, `End`, each
//! header on its own line (case-insensitive, usual aliases accepted).
//! Expressions may span lines. Bounds that merely restate `0 <= x <= 1` are
//! dropped; bounds fixing a variable become `bnd_<name>` equality rows.
//! Lines starting with `\` are comments.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use super::number::format_f64;
use super::reader::LineReader;
use super::{FormatTag, ParseError, Position};
use crate::model::{IlpBuilder, IlpInstance, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<Result<Section, &'static str>> {
    let words: Vec<String> = line.split_ascii_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    let key = words.join(" ");
    let section = match key.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Ok(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." | "st." => Ok(Section::Constraints),
        "bounds" | "bound" => Ok(Section::Bounds),
        "binaries" | "binary" | "bin" => Ok(Section::Binaries),
        "end" => Ok(Section::End),
        "maximize" | "maximise" | "maximum" | "max" => Err("maximization objectives are not supported"),
        "general" | "generals" | "gen" | "integer" | "integers" | "semi-continuous" | "semis" | "semi" => {
            Err("only binary variables are supported")
        }
        _ => return None,
    };
    Some(section)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Rel(Relation),
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || "_!\"#$%&()/,;?@'{}|~[]".contains(c)
}

fn is_name_char(c: char) -> bool {
    is_name_start(c) || c.is_ascii_digit() || c == '.'
}

/// Splits one line into tokens with their positions.
fn lex<R: BufRead>(lines: &LineReader<R>, out: &mut Vec<(Tok, Position)>) -> Result<(), ParseError> {
    let line = lines.current();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let at = lines.position_at(i);
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            ':' => (Tok::Colon, 1),
            '<' | '>' | '=' => {
                let next = bytes.get(i + 1).map(|&b| b as char);
                let two = matches!((c, next), ('<', Some('=')) | ('>', Some('=')) | ('=', Some('<')) | ('=', Some('>')));
                let rel = match (c, if two { next } else { None }) {
                    ('<', _) | ('=', Some('<')) => Relation::Le,
                    ('>', _) | ('=', Some('>')) => Relation::Ge,
                    _ => Relation::Eq,
                };
                (Tok::Rel(rel), if two { 2 } else { 1 })
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &line[i..j];
                let value = text
                    .parse::<f64>()
                    .map_err(|_| lines.error_at(at, format!("malformed number `{text}`")))?;
                (Tok::Num(value), j - i)
            }
            c if is_name_start(c) => {
                let end = line[i..].find(|ch: char| !is_name_char(ch)).map_or(line.len(), |n| i + n);
                (Tok::Name(line[i..end].to_string()), end - i)
            }
            other => return Err(lines.error_at(at, format!("unexpected character `{other}`"))),
        };
        out.push((tok, at));
        i += len;
    }
    Ok(())
}

struct Expr {
    terms: Vec<(String, f64, Position)>,
    constant: f64,
}

/// Parses `[+|-] [coef] name ...` up to the end of `toks`.
fn parse_expr(format: FormatTag, toks: &[(Tok, Position)], end: Position) -> Result<Expr, ParseError> {
    // -0.0 is the additive identity, so a lone `-0` keeps its sign.
    let mut expr = Expr { terms: Vec::new(), constant: -0.0 };
    let mut i = 0;
    let mut first = true;
    while i < toks.len() {
        let mut sign = 1.0;
        let mut signed = false;
        while let Some((Tok::Plus | Tok::Minus, _)) = toks.get(i) {
            if toks[i].0 == Tok::Minus {
                sign = -sign;
            }
            signed = true;
            i += 1;
        }
        let at = toks.get(i).map_or(end, |t| t.1);
        if !first && !signed {
            return Err(ParseError::new(format, at, "expected `+` or `-` between terms"));
        }
        first = false;
        match toks.get(i) {
            Some((Tok::Num(c), _)) => {
                i += 1;
                if let Some((Tok::Name(name), at)) = toks.get(i) {
                    expr.terms.push((name.clone(), sign * c, *at));
                    i += 1;
                } else {
                    expr.constant += sign * c;
                }
            }
            Some((Tok::Name(name), at)) => {
                expr.terms.push((name.clone(), sign, *at));
                i += 1;
            }
            Some((tok, at)) => return Err(ParseError::new(format, *at, format!("unexpected {tok:?} in expression"))),
            None => return Err(ParseError::new(format, end, "expression ends after a sign")),
        }
    }
    Ok(expr)
}

/// Strips a leading `name:` label.
fn split_label(toks: &[(Tok, Position)]) -> (Option<String>, &[(Tok, Position)]) {
    match toks {
        [(Tok::Name(id), _), (Tok::Colon, _), rest @ ..] => (Some(id.clone()), rest),
        _ => (None, toks),
    }
}

/// Index one past the right-hand side if `toks` holds a complete row.
fn row_end(toks: &[(Tok, Position)]) -> Option<usize> {
    let r = toks.iter().position(|t| matches!(t.0, Tok::Rel(_)))?;
    let mut i = r + 1;
    while let Some((Tok::Plus | Tok::Minus, _)) = toks.get(i) {
        i += 1;
    }
    match toks.get(i) {
        Some((Tok::Num(_), _)) => Some(i + 1),
        Some((Tok::Name(n), _)) if is_infinity(n) => Some(i + 1),
        _ if i < toks.len() => Some(i + 1),
        _ => None,
    }
}

fn is_infinity(name: &str) -> bool {
    matches!(name.to_ascii_lowercase().as_str(), "inf" | "infinity")
}

struct Row {
    id: String,
    at: Position,
    expr: Expr,
    relation: Relation,
    rhs: f64,
}

fn parse_row(format: FormatTag, toks: &[(Tok, Position)], auto_id: usize) -> Result<Row, ParseError> {
    let at = toks[0].1;
    let (label, body) = split_label(toks);
    let r = body.iter().position(|t| matches!(t.0, Tok::Rel(_))).unwrap_or(body.len());
    let Tok::Rel(relation) = body[r].0 else { unreachable!("row_end found a relation") };
    let expr = parse_expr(format, &body[..r], body[r].1)?;
    let rhs_expr = parse_expr(format, &body[r + 1..], body[r].1)?;
    if let Some((_, _, at)) = rhs_expr.terms.first() {
        return Err(ParseError::new(format, *at, "right-hand side must be a constant"));
    }
    Ok(Row {
        id: label.unwrap_or_else(|| format!("R{auto_id}")),
        at,
        rhs: if expr.constant == 0.0 { rhs_expr.constant } else { rhs_expr.constant - expr.constant },
        expr: Expr { constant: 0.0, ..expr },
        relation,
    })
}

/// Interval `[lo, hi]` stated by a bounds line, for one variable.
fn parse_bound(format: FormatTag, toks: &[(Tok, Position)]) -> Result<(String, f64, f64, Position), ParseError> {
    let num = |toks: &[(Tok, Position)]| -> Option<f64> {
        let (sign, rest) = match toks {
            [(Tok::Minus, _), rest @ ..] => (-1.0, rest),
            [(Tok::Plus, _), rest @ ..] => (1.0, rest),
            _ => (1.0, toks),
        };
        match rest {
            [(Tok::Num(v), _)] => Some(sign * v),
            [(Tok::Name(n), _)] if is_infinity(n) => Some(sign * f64::INFINITY),
            _ => None,
        }
    };
    let at = toks.first().map(|t| t.1).unwrap_or_default();
    let bad = || ParseError::new(format, at, "malformed bound");
    let rels: Vec<usize> = toks.iter().enumerate().filter(|(_, t)| matches!(t.0, Tok::Rel(_))).map(|(i, _)| i).collect();
    match (toks, rels.as_slice()) {
        ([(Tok::Name(n), p), (Tok::Name(kw), _)], []) if kw.eq_ignore_ascii_case("free") => {
            Ok((n.clone(), f64::NEG_INFINITY, f64::INFINITY, *p))
        }
        (_, &[r]) => {
            let Tok::Rel(rel) = toks[r].0 else { unreachable!() };
            if let [(Tok::Name(n), p)] = &toks[..r] {
                if !is_infinity(n) {
                    let v = num(&toks[r + 1..]).ok_or_else(bad)?;
                    return Ok(match rel {
                        Relation::Le => (n.clone(), f64::NEG_INFINITY, v, *p),
                        Relation::Ge => (n.clone(), v, f64::INFINITY, *p),
                        Relation::Eq => (n.clone(), v, v, *p),
                    });
                }
            }
            if let [(Tok::Name(n), p)] = &toks[r + 1..] {
                let v = num(&toks[..r]).ok_or_else(bad)?;
                return Ok(match rel {
                    Relation::Le => (n.clone(), v, f64::INFINITY, *p),
                    Relation::Ge => (n.clone(), f64::NEG_INFINITY, v, *p),
                    Relation::Eq => (n.clone(), v, v, *p),
                });
            }
            Err(bad())
        }
        (_, &[r1, r2]) => {
            let (Tok::Rel(a), Tok::Rel(b)) = (&toks[r1].0, &toks[r2].0) else { unreachable!() };
            let [(Tok::Name(n), p)] = &toks[r1 + 1..r2] else { return Err(bad()) };
            let lo = num(&toks[..r1]).ok_or_else(bad)?;
            let hi = num(&toks[r2 + 1..]).ok_or_else(bad)?;
            match (a, b) {
                (Relation::Le, Relation::Le) => Ok((n.clone(), lo, hi, *p)),
                (Relation::Ge, Relation::Ge) => Ok((n.clone(), hi, lo, *p)),
                _ => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}

pub fn parse_lp(text: &str) -> Result<IlpInstance, ParseError> {
    read_lp(text.as_bytes())
}

pub fn read_lp<R: BufRead>(reader: R) -> Result<IlpInstance, ParseError> {
    let format = FormatTag::Lp;
    let mut lines = LineReader::new(reader, format);
    let mut section: Option<Section> = None;
    let mut pending: Vec<(Tok, Position)> = Vec::new();
    let mut objective: Option<Expr> = None;
    let mut rows: Vec<Row> = Vec::new();
    let mut row_ids = HashSet::new();
    let mut fixings: Vec<(String, f64, Position)> = Vec::new();
    let mut binaries: Vec<(String, Position)> = Vec::new();
    let mut declared = HashSet::new();

    while lines.next_line()?.is_some() {
        let line = lines.current();
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        if let Some(next) = section_of(trimmed) {
            let next = next.map_err(|m| lines.error_line(m))?;
            let allowed = match section {
                None => next == Section::Objective,
                Some(cur) => next > cur && (cur != Section::Objective || next == Section::Constraints),
            };
            if !allowed {
                return Err(lines.error_line(format!("section `{trimmed}` out of order")));
            }
            // Close the open statement of the section being left.
            match section {
                Some(Section::Objective) => {
                    let (_, body) = split_label(&pending);
                    let expr = parse_expr(format, body, lines.line_position())?;
                    if expr.constant != 0.0 {
                        let at = pending.first().map_or(lines.line_position(), |t| t.1);
                        return Err(lines.error_at(at, "objective constants are not supported"));
                    }
                    objective = Some(expr);
                    pending.clear();
                }
                Some(Section::Constraints) if !pending.is_empty() => {
                    return Err(lines.error_at(pending[0].1, "incomplete constraint"));
                }
                _ => {}
            }
            section = Some(next);
            continue;
        }
        match section {
            None => return Err(lines.error_line("expected `Minimize` section")),
            Some(Section::Objective) => lex(&lines, &mut pending)?,
            Some(Section::Constraints) => {
                lex(&lines, &mut pending)?;
                while let Some(end) = row_end(&pending) {
                    let row = parse_row(format, &pending[..end], rows.len() + 1)?;
                    if !row_ids.insert(row.id.clone()) {
                        return Err(lines.error_at(row.at, format!("duplicate constraint id `{}`", row.id)));
                    }
                    rows.push(row);
                    pending.drain(..end);
                }
            }
            Some(Section::Bounds) => {
                let mut toks = Vec::new();
                lex(&lines, &mut toks)?;
                let (name, lo, hi, at) = parse_bound(format, &toks)?;
                let (lo, hi) = (lo.max(0.0), hi.min(1.0));
                if lo > hi || lo > 0.0 && lo < 1.0 || hi > 0.0 && hi < 1.0 {
                    return Err(lines.error_at(at, format!("bound on `{name}` is incompatible with a binary variable")));
                }
                if lo == hi {
                    fixings.push((name, lo, at));
                }
            }
            Some(Section::Binaries) => {
                for name in line.split_ascii_whitespace() {
                    let at = lines.position_of(name);
                    if !declared.insert(name.to_string()) {
                        return Err(lines.error_at(at, format!("variable `{name}` listed twice")));
                    }
                    binaries.push((name.to_string(), at));
                }
            }
            Some(Section::End) => return Err(lines.error_line("content after `End`")),
        }
    }
    if section != Some(Section::End) {
        return Err(lines.error_at(lines.end_position(), "missing `End`"));
    }

    let mut builder = IlpBuilder::new();
    for (name, at) in &binaries {
        builder.add_variable(name.as_str()).map_err(|e| lines.error_at(*at, e.to_string()))?;
    }
    let lookup = |name: &str, at: Position| {
        builder
            .variable(name)
            .ok_or_else(|| lines.error_at(at, format!("variable `{name}` is not declared under Binaries")))
    };
    let objective = objective.unwrap_or(Expr { terms: Vec::new(), constant: 0.0 });
    let objective_terms = objective
        .terms
        .iter()
        .map(|(n, c, at)| lookup(n, *at).map(|v| (v, *c, *at)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut resolved_rows = Vec::with_capacity(rows.len() + fixings.len());
    for row in &rows {
        let terms = row.expr.terms.iter().map(|(n, c, at)| lookup(n, *at).map(|v| (v, *c))).collect::<Result<Vec<_>, _>>()?;
        resolved_rows.push((row.id.clone(), terms, row.relation, row.rhs, row.at));
    }
    let mut fixed: HashMap<String, f64> = HashMap::new();
    for (name, value, at) in fixings {
        let v = lookup(&name, at)?;
        if let Some(prev) = fixed.insert(name.clone(), value) {
            if prev != value {
                return Err(lines.error_at(at, format!("conflicting bounds on `{name}`")));
            }
            continue;
        }
        resolved_rows.push((format!("bnd_{name}"), vec![(v, 1.0)], Relation::Eq, value, at));
    }
    for (v, c, at) in objective_terms {
        builder.add_objective_term(v, c).map_err(|e| lines.error_at(at, e.to_string()))?;
    }
    for (id, terms, relation, rhs, at) in resolved_rows {
        builder.add_constraint(id, terms, relation, rhs).map_err(|e| lines.error_at(at, e.to_string()))?;
    }
    Ok(builder.build())
}

/// Lines are wrapped before they exceed this many bytes.
const WRAP: usize = 200;

fn write_expr(out: &mut String, ilp: &IlpInstance, terms: &[(usize, f64)], line_start: usize) -> usize {
    let mut line_start = line_start;
    for (k, &(var, coef)) in terms.iter().enumerate() {
        if out.len() - line_start > WRAP {
            out.push_str("\n   ");
            line_start = out.len() - 3;
        }
        let negative = coef.is_sign_negative();
        let magnitude = coef.abs();
        if k == 0 {
            if negative {
                out.push_str(" -");
            }
        } else {
            out.push_str(if negative { " -" } else { " +" });
        }
        if magnitude != 1.0 {
            out.push(' ');
            out.push_str(&format_f64(magnitude));
        }
        out.push(' ');
        out.push_str(&ilp.variables()[var]);
    }
    if terms.is_empty() {
        out.push_str(" 0");
    }
    line_start
}

pub fn write_lp(ilp: &IlpInstance) -> String {
    let mut out = String::from("Minimize\n obj:");
    write_expr(&mut out, ilp, ilp.objective(), 0);
    out.push_str("\nSubject To\n");
    for c in ilp.constraints() {
        let start = out.len();
        let _ = write!(out, " {}:", c.id);
        write_expr(&mut out, ilp, &c.terms, start);
        let _ = writeln!(out, " {} {}", c.relation, format_f64(c.rhs));
    }
    out.push_str("Bounds\nBinaries\n");
    for name in ilp.variables() {
        let _ = writeln!(out, " {name}");
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "Minimize\n 2 x + y\nSubject to\nc1: x + y <= 1\nBounds\nBinaries\nx\ny\nEnd";

    #[test]
    fn skeleton_example() {
        let ilp = parse_lp(EXAMPLE).unwrap();
        assert_eq!(ilp.variables(), &["x".to_string(), "y".to_string()]);
        assert_eq!(ilp.objective(), &[(0, 2.0), (1, 1.0)]);
        assert_eq!(ilp.constraints().len(), 1);
        let c = &ilp.constraints()[0];
        assert_eq!((c.id.as_str(), c.relation, c.rhs), ("c1", Relation::Le, 1.0));
        assert_eq!(parse_lp(&write_lp(&ilp)).unwrap(), ilp);
    }

    #[test]
    fn repeated_terms_merge() {
        let ilp = parse_lp("Minimize\n x + x\nSubject To\nBinaries\n x\nEnd\n").unwrap();
        assert_eq!(ilp.objective(), &[(0, 2.0)]);
    }

    #[test]
    fn undeclared_variable() {
        let text = "Minimize\n x\nSubject To\n c1: x + z >= 1\nBinaries\n x\nEnd\n";
        let err = parse_lp(text).unwrap_err();
        assert_eq!((err.line, err.column), (4, 10));
        assert!(err.message.contains("`z`"));
    }

    #[test]
    fn multiline_rows_labels_and_signs() {
        let text = "\\ comment\nMINIMIZE\n obj: - 1.5e1 a\n  - b\nSUBJECT TO\n r: a\n + -2 b\n >= -3\n a - b = 0 R9: a + b =< 1\nbounds\n 0 <= a <= 1\n b >= 0\nbinary\n a b\nend\n";
        let ilp = parse_lp(text).unwrap();
        assert_eq!(ilp.objective(), &[(0, -15.0), (1, -1.0)]);
        let c = ilp.constraints();
        assert_eq!(c.len(), 3);
        assert_eq!((c[0].id.as_str(), c[0].terms.clone(), c[0].rhs), ("r", vec![(0, 1.0), (1, -2.0)], -3.0));
        assert_eq!(c[1].id, "R2");
        assert_eq!((c[2].id.as_str(), c[2].relation), ("R9", Relation::Le));
        assert_eq!(parse_lp(&write_lp(&ilp)).unwrap(), ilp);
    }

    #[test]
    fn fixing_bounds_become_rows() {
        let text = "Minimize\n x + y\nSubject To\nBounds\n x = 1\n y <= 0\nBinaries\n x y\nEnd\n";
        let ilp = parse_lp(text).unwrap();
        let ids: Vec<&str> = ilp.constraints().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["bnd_x", "bnd_y"]);
        assert!(parse_lp("Minimize\n x\nSubject To\nBounds\n x <= 0.5\nBinaries\n x\nEnd\n").is_err());
    }

    #[test]
    fn structural_errors() {
        assert!(parse_lp("Subject To\nMinimize\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n x\nSubject To\nBinaries\n x\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n x\nSubject To\nGenerals\n x\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n x\nSubject To\n c: x <=\nBinaries\n x\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n x y\nSubject To\nBinaries\n x y\nEnd\n").is_err());
        assert!(parse_lp("Minimize\n x\nSubject To\nBinaries\n x\n").is_err());
        let dup = "Minimize\n x\nSubject To\n c: x <= 1\n c: x >= 0\nBinaries\n x\nEnd\n";
        assert_eq!(parse_lp(dup).unwrap_err().line, 5);
    }

    #[test]
    fn writer_shapes() {
        let mut b = IlpBuilder::new();
        let x = b.add_variable("x").unwrap();
        let y = b.add_variable("y").unwrap();
        b.add_objective_term(x, -1.0).unwrap();
        b.add_objective_term(y, 0.25).unwrap();
        b.add_constraint("empty", [], Relation::Le, 1.0).unwrap();
        b.add_constraint("c", [(x, 1.0), (y, -1.0)], Relation::Eq, 0.0).unwrap();
        let ilp = b.build();
        let text = write_lp(&ilp);
        assert_eq!(
            text,
            "Minimize\n obj: - x + 0.25 y\nSubject To\n empty: 0 <= 1\n c: x - y = 0\nBounds\nBinaries\n x\n y\nEnd\n"
        );
        assert_eq!(parse_lp(&text).unwrap(), ilp);
    }

    #[test]
    fn long_rows_wrap() {
        let mut b = IlpBuilder::new();
        let vars: Vec<usize> = (0..200).map(|i| b.add_variable(format!("mu_{i}")).unwrap()).collect();
        b.add_constraint("simplex_0", vars.iter().map(|&v| (v, 1.0)), Relation::Eq, 1.0).unwrap();
        let ilp = b.build();
        let text = write_lp(&ilp);
        assert!(text.lines().all(|l| l.len() < WRAP + 40));
        assert_eq!(parse_lp(&text).unwrap(), ilp);
    }
}
