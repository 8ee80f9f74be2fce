//! UAI `MARKOV` files and the bottleneck and tomography extensions.
//!
//! Node indices in scope lines are 0-based. Pairwise tables are row-major
//! over the labels of the first scope node; a scope written as `2 j i` with
//! `j > i` is transposed into `(i, j)` orientation on load.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use super::number::{format_f64, parse_f64};
use super::reader::TokenReader;
use super::{FormatTag, ParseError, Position};
use crate::model::{BottleneckMrfInstance, MrfEdge, MrfInstance, Projection, TomographyInstance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UaiOptions {
    /// Accept unary and pairwise scopes in any order and default missing
    /// unary tables to zero.
    pub lenient: bool,
}

enum Scope {
    Unary(usize),
    Pair(usize, usize),
}

/// Reads `|V|`, cardinalities, scopes and tables following a preamble.
fn read_body<R: BufRead>(tr: &mut TokenReader<R>, opts: UaiOptions) -> Result<(MrfInstance, Position), ParseError> {
    let (start, n) = tr.expect_usize("node count")?;
    let mut cards = Vec::with_capacity(n);
    for v in 0..n {
        let (at, k) = tr.expect_usize("label count")?;
        if k == 0 {
            return Err(tr.error(at, format!("node {v} has no labels")));
        }
        cards.push(k);
    }
    let (count_at, f) = tr.expect_usize("number of potentials")?;

    let mut scopes = Vec::with_capacity(f);
    let mut has_unary = vec![false; n];
    let mut edges_seen = HashSet::new();
    let mut seen_pair = false;
    for _ in 0..f {
        let (at, arity) = tr.expect_usize("scope arity")?;
        match arity {
            1 => {
                let (node_at, v) = tr.expect_usize("node index")?;
                if v >= n {
                    return Err(tr.error(node_at, format!("node {v} out of range (|V| = {n})")));
                }
                if seen_pair && !opts.lenient {
                    return Err(tr.error(at, "unary scope after a pairwise scope"));
                }
                if std::mem::replace(&mut has_unary[v], true) {
                    return Err(tr.error(at, format!("second unary scope for node {v}")));
                }
                scopes.push((at, Scope::Unary(v)));
            }
            2 => {
                let (i_at, i) = tr.expect_usize("node index")?;
                let (j_at, j) = tr.expect_usize("node index")?;
                for (p, x) in [(i_at, i), (j_at, j)] {
                    if x >= n {
                        return Err(tr.error(p, format!("node {x} out of range (|V| = {n})")));
                    }
                }
                if i == j {
                    return Err(tr.error(at, format!("self-loop on node {i}")));
                }
                if !edges_seen.insert((i.min(j), i.max(j))) {
                    return Err(tr.error(at, format!("duplicate edge ({}, {})", i.min(j), i.max(j))));
                }
                seen_pair = true;
                scopes.push((at, Scope::Pair(i, j)));
            }
            _ => return Err(tr.error(at, format!("scope arity {arity}, expected 1 or 2"))),
        }
    }
    let unary_count = has_unary.iter().filter(|&&b| b).count();
    if unary_count != n && !opts.lenient {
        return Err(tr.error(
            count_at,
            format!("expected one unary scope per node ({n}), found {unary_count}"),
        ));
    }

    let mut unaries: Vec<Vec<f64>> = cards.iter().map(|&k| vec![0.0; k]).collect();
    let mut edges = Vec::with_capacity(f - unary_count);
    for (_, scope) in &scopes {
        let expected = match *scope {
            Scope::Unary(v) => cards[v],
            Scope::Pair(i, j) => cards[i] * cards[j],
        };
        let (table_at, declared) = tr.expect_usize("table size")?;
        if declared != expected {
            return Err(tr.error(table_at, format!("table declares {declared} entries, expected {expected}")));
        }
        let mut values = Vec::with_capacity(declared);
        let tr_format = tr.format();
        for read in 0..declared {
            let end = tr.end_position();
            let Some((at, tok)) = tr.next_token()? else {
                return Err(ParseError::new(
                    tr.format(),
                    table_at,
                    format!("table declares {declared} entries but only {read} are listed (input ends at line {})", end.line),
                ));
            };
            match parse_f64(tok) {
                Some(x) => values.push(x),
                None => {
                    return Err(ParseError::new(tr_format, at, format!("expected table entry, found `{tok}`")))
                }
            }
        }
        match *scope {
            Scope::Unary(v) => unaries[v] = values,
            Scope::Pair(i, j) if i < j => edges.push(MrfEdge { u: i, v: j, table: values }),
            Scope::Pair(i, j) => {
                let (ki, kj) = (cards[i], cards[j]);
                let mut table = vec![0.0; values.len()];
                for a in 0..ki {
                    for b in 0..kj {
                        table[b * ki + a] = values[a * kj + b];
                    }
                }
                edges.push(MrfEdge { u: j, v: i, table });
            }
        }
    }
    let mrf = MrfInstance::new(unaries, edges).map_err(|e| tr.error(start, e.to_string()))?;
    Ok((mrf, start))
}

pub fn parse_uai_mrf(text: &str) -> Result<MrfInstance, ParseError> {
    read_uai_mrf(text.as_bytes(), UaiOptions::default())
}

pub fn read_uai_mrf<R: BufRead>(reader: R, opts: UaiOptions) -> Result<MrfInstance, ParseError> {
    let mut tr = TokenReader::new(reader, FormatTag::Mrf);
    tr.expect_keyword("MARKOV")?;
    let (mrf, _) = read_body(&mut tr, opts)?;
    tr.expect_end()?;
    Ok(mrf)
}

pub fn parse_bottleneck_mrf(text: &str) -> Result<BottleneckMrfInstance, ParseError> {
    read_bottleneck_mrf(text.as_bytes(), UaiOptions::default())
}

pub fn read_bottleneck_mrf<R: BufRead>(reader: R, opts: UaiOptions) -> Result<BottleneckMrfInstance, ParseError> {
    let mut tr = TokenReader::new(reader, FormatTag::BottleneckMrf);
    tr.expect_keyword("MARKOV")?;
    let (theta, _) = read_body(&mut tr, opts)?;
    tr.expect_keyword("MAX-POTENTIALS")?;
    // Some writers repeat the preamble after the separator.
    if tr.peek_is("MARKOV")? {
        tr.next_token()?;
    }
    let (psi, psi_at) = read_body(&mut tr, opts)?;
    tr.expect_end()?;
    BottleneckMrfInstance::new(theta, psi)
        .map_err(|e| tr.error(psi_at, format!("bottleneck block shape mismatch: {e}")))
}

pub fn parse_tomography(text: &str) -> Result<TomographyInstance, ParseError> {
    read_tomography(text.as_bytes(), UaiOptions::default())
}

pub fn read_tomography<R: BufRead>(reader: R, opts: UaiOptions) -> Result<TomographyInstance, ParseError> {
    let mut tr = TokenReader::new(reader, FormatTag::Tomography);
    tr.expect_keyword("MARKOV")?;
    let (base, _) = read_body(&mut tr, opts)?;
    let header = tr.expect_keyword("PROJECTIONS")?;

    let n = base.node_count();
    let k = base.label_counts().first().copied().unwrap_or(0);
    if let Some(v) = base.label_counts().iter().position(|&c| c != k) {
        return Err(tr.error(
            header,
            format!("tomography needs uniform label counts; node {v} has {} labels, node 0 has {k}", base.label_counts()[v]),
        ));
    }
    let mut projections = Vec::new();
    // A projection may span lines; gather its text up to the closing ')'.
    let mut pending = String::new();
    let mut pending_at = None;
    while let Some((at, tok)) = tr.next_token()? {
        pending_at.get_or_insert(at);
        pending.push_str(tok);
        pending.push(' ');
        if tok.ends_with(')') {
            let at = pending_at.take().unwrap_or(at);
            let projection = parse_projection(&pending).map_err(|m| tr.error(at, m))?;
            for &v in &projection.nodes {
                if v >= n {
                    return Err(tr.error(at, format!("node {v} out of range (|V| = {n})")));
                }
            }
            let expected = (k.max(1) - 1) * projection.nodes.len() + 1;
            if projection.costs.len() != expected {
                return Err(tr.error(
                    at,
                    format!(
                        "cost vector has {} entries, expected (K-1)*{}+1 = {expected}",
                        projection.costs.len(),
                        projection.nodes.len()
                    ),
                ));
            }
            let mut distinct = HashSet::new();
            if let Some(v) = projection.nodes.iter().find(|v| !distinct.insert(**v)) {
                return Err(tr.error(at, format!("node {v} repeated in projection")));
            }
            projections.push((at, projection));
            pending.clear();
        }
    }
    if let Some(at) = pending_at {
        return Err(tr.error(at, "unterminated projection, expected `= (...)`"));
    }
    let first = projections.first().map(|(at, _)| *at).unwrap_or_default();
    TomographyInstance::new(base, projections.into_iter().map(|(_, p)| p).collect())
        .map_err(|e| tr.error(first, e.to_string()))
}

fn parse_projection(text: &str) -> Result<Projection, String> {
    let (lhs, rhs) = text.split_once('=').ok_or("expected `=` in projection")?;
    let nodes = lhs
        .split('+')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("expected node index, found `{}`", s.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    let inner = rhs
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or("expected cost vector in parentheses")?;
    let costs = inner
        .split(',')
        .map(|s| parse_f64(s.trim()).ok_or_else(|| format!("expected cost, found `{}`", s.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Projection { nodes, costs })
}

fn write_values(out: &mut String, values: &[f64]) {
    let _ = writeln!(out, "{}", values.len());
    let mut first = true;
    for &x in values {
        if !first {
            out.push(' ');
        }
        first = false;
        out.push_str(&format_f64(x));
    }
    out.push('\n');
}

fn write_body(out: &mut String, mrf: &MrfInstance) {
    let _ = writeln!(out, "{}", mrf.node_count());
    let cards: Vec<String> = mrf.label_counts().iter().map(|k| k.to_string()).collect();
    let _ = writeln!(out, "{}", cards.join(" "));
    let _ = writeln!(out, "{}", mrf.node_count() + mrf.edges().len());
    for v in 0..mrf.node_count() {
        let _ = writeln!(out, "1 {v}");
    }
    for e in mrf.edges() {
        let _ = writeln!(out, "2 {} {}", e.u, e.v);
    }
    out.push('\n');
    for unary in mrf.unaries() {
        write_values(out, unary);
    }
    if !mrf.edges().is_empty() {
        out.push('\n');
        for e in mrf.edges() {
            write_values(out, &e.table);
        }
    }
}

pub fn write_uai_mrf(mrf: &MrfInstance) -> String {
    let mut out = String::from("MARKOV\n");
    write_body(&mut out, mrf);
    out
}

pub fn write_bottleneck_mrf(instance: &BottleneckMrfInstance) -> String {
    let mut out = write_uai_mrf(instance.base());
    out.push_str("\nMAX-POTENTIALS\n");
    write_body(&mut out, instance.bottleneck());
    out
}

pub fn write_tomography(instance: &TomographyInstance) -> String {
    let mut out = write_uai_mrf(instance.base());
    out.push_str("\nPROJECTIONS\n");
    for p in instance.projections() {
        let nodes: Vec<String> = p.nodes.iter().map(|v| v.to_string()).collect();
        let costs: Vec<String> = p.costs.iter().map(|&c| format_f64(c)).collect();
        let _ = writeln!(out, "{} = ({})", nodes.join(" + "), costs.join(","));
    }
    out
}
