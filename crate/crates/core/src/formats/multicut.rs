//! `MULTICUT` and `ASYMMETRIC MULTIWAY CUT` files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use super::number::{format_f64, parse_f64};
use super::reader::LineReader;
use super::{FormatTag, ParseError};
use crate::model::{AmwcInstance, MulticutInstance, WeightedEdge};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MulticutOptions {
    /// Sum the costs of repeated edges instead of rejecting them.
    pub merge_duplicates: bool,
}

/// Accumulates `i j c` edge lines, rejecting self-loops and duplicates at
/// the offending line.
struct EdgeCollector {
    edges: Vec<WeightedEdge>,
    slot: HashMap<(usize, usize), usize>,
    merge: bool,
}

impl EdgeCollector {
    fn new(merge: bool) -> Self {
        Self { edges: Vec::new(), slot: HashMap::new(), merge }
    }

    fn push<R: BufRead>(&mut self, lines: &LineReader<R>, line: &str) -> Result<(), ParseError> {
        let toks: Vec<&str> = line.split_ascii_whitespace().collect();
        if toks.len() != 3 {
            return Err(lines.error_line(format!("expected `i j cost`, found {} tokens", toks.len())));
        }
        let node = |t: &str| t.parse::<usize>().map_err(|_| lines.error_token(t, format!("expected node index, found `{t}`")));
        let u = node(toks[0])?;
        let v = node(toks[1])?;
        let cost = parse_f64(toks[2]).ok_or_else(|| lines.error_token(toks[2], format!("expected cost, found `{}`", toks[2])))?;
        if u == v {
            return Err(lines.error_line(format!("self-loop on node {u}")));
        }
        let edge = WeightedEdge { u, v, cost };
        match self.slot.get(&edge.key()) {
            Some(&i) if self.merge => self.edges[i].cost += cost,
            Some(_) => {
                let (a, b) = edge.key();
                return Err(lines.error_line(format!("duplicate edge ({a}, {b})")));
            }
            None => {
                self.slot.insert(edge.key(), self.edges.len());
                self.edges.push(edge);
            }
        }
        Ok(())
    }
}

pub fn parse_multicut(text: &str) -> Result<MulticutInstance, ParseError> {
    read_multicut(text.as_bytes(), MulticutOptions::default())
}

pub fn read_multicut<R: BufRead>(reader: R, opts: MulticutOptions) -> Result<MulticutInstance, ParseError> {
    let mut lines = LineReader::new(reader, FormatTag::Multicut);
    let mut header = false;
    let mut edges = EdgeCollector::new(opts.merge_duplicates);
    while lines.next_line()?.is_some() {
        let trimmed = lines.current().trim();
        if trimmed.is_empty() {
            continue;
        }
        if !header {
            if trimmed != "MULTICUT" {
                return Err(lines.error_line(format!("expected `MULTICUT` header, found `{trimmed}`")));
            }
            header = true;
            continue;
        }
        let line = lines.current();
        edges.push(&lines, line)?;
    }
    if !header {
        return Err(lines.error_at(lines.end_position(), "missing `MULTICUT` header"));
    }
    let at = lines.end_position();
    MulticutInstance::from_edges(edges.edges).map_err(|e| lines.error_at(at, e.to_string()))
}

pub fn write_multicut(instance: &MulticutInstance) -> String {
    let mut out = String::from("MULTICUT\n");
    write_edges(&mut out, instance.edges());
    out
}

fn write_edges(out: &mut String, edges: &[WeightedEdge]) {
    for e in edges {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, format_f64(e.cost));
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum AmwcSection {
    Header,
    Partitionable,
    NodeCosts,
    EdgeCosts,
}

pub fn parse_amwc(text: &str) -> Result<AmwcInstance, ParseError> {
    read_amwc(text.as_bytes())
}

pub fn read_amwc<R: BufRead>(reader: R) -> Result<AmwcInstance, ParseError> {
    let mut lines = LineReader::new(reader, FormatTag::Amwc);
    let mut section: Option<AmwcSection> = None;
    let mut partitionable = Vec::new();
    let mut partitionable_at = Vec::new();
    let mut node_costs: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut edges = EdgeCollector::new(false);
    while lines.next_line()?.is_some() {
        let line = lines.current();
        let words: Vec<&str> = line.split_ascii_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let heading = match words.join(" ").as_str() {
            "ASYMMETRIC MULTIWAY CUT" => Some(AmwcSection::Header),
            "PARTITIONABLE CLASSES" => Some(AmwcSection::Partitionable),
            "NODE COSTS" => Some(AmwcSection::NodeCosts),
            "EDGE COSTS" => Some(AmwcSection::EdgeCosts),
            _ => None,
        };
        if let Some(next) = heading {
            let expected = match section {
                None => AmwcSection::Header,
                Some(AmwcSection::Header) => AmwcSection::Partitionable,
                Some(AmwcSection::Partitionable) => AmwcSection::NodeCosts,
                Some(AmwcSection::NodeCosts) | Some(AmwcSection::EdgeCosts) => AmwcSection::EdgeCosts,
            };
            if next != expected || section == Some(AmwcSection::EdgeCosts) {
                return Err(lines.error_line(format!("unexpected section `{}`, expected {expected:?}", words.join(" "))));
            }
            section = Some(next);
            continue;
        }
        match section {
            None => return Err(lines.error_line("expected `ASYMMETRIC MULTIWAY CUT` header")),
            Some(AmwcSection::Header) => {
                return Err(lines.error_line("expected `PARTITIONABLE CLASSES` section"));
            }
            Some(AmwcSection::Partitionable) => {
                for w in words {
                    let class = w.parse::<usize>().map_err(|_| lines.error_token(w, format!("expected class index, found `{w}`")))?;
                    partitionable.push(class);
                    partitionable_at.push(lines.position_of(w));
                }
            }
            Some(AmwcSection::NodeCosts) => {
                let row = words
                    .iter()
                    .map(|w| parse_f64(w).ok_or_else(|| lines.error_token(w, format!("expected cost, found `{w}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let k = *width.get_or_insert(row.len());
                if row.len() != k {
                    return Err(lines.error_line(format!("node cost row has {} entries, previous rows have {k}", row.len())));
                }
                node_costs.push(row);
            }
            Some(AmwcSection::EdgeCosts) => {
                let line = lines.current();
                edges.push(&lines, line)?;
            }
        }
    }
    if section != Some(AmwcSection::EdgeCosts) {
        let missing = match section {
            None => "ASYMMETRIC MULTIWAY CUT",
            Some(AmwcSection::Header) => "PARTITIONABLE CLASSES",
            Some(AmwcSection::Partitionable) => "NODE COSTS",
            _ => "EDGE COSTS",
        };
        return Err(lines.error_at(lines.end_position(), format!("missing `{missing}` section")));
    }
    let k = width.unwrap_or(0);
    if let Some(i) = partitionable.iter().position(|&c| c >= k) {
        return Err(lines.error_at(partitionable_at[i], format!("partitionable class {} out of range (K = {k})", partitionable[i])));
    }
    let node_count = node_costs.len();
    if let Some(e) = edges.edges.iter().find(|e| e.u.max(e.v) >= node_count) {
        return Err(lines.error_at(lines.end_position(), format!("edge ({}, {}) references a node without costs (|V| = {node_count})", e.u, e.v)));
    }
    let at = lines.end_position();
    AmwcInstance::new(k, partitionable, node_costs, edges.edges).map_err(|e| lines.error_at(at, e.to_string()))
}

pub fn write_amwc(instance: &AmwcInstance) -> String {
    let mut out = String::from("ASYMMETRIC MULTIWAY CUT\nPARTITIONABLE CLASSES\n");
    let classes: Vec<String> = instance.partitionable().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "{}", classes.join(" "));
    out.push_str("\nNODE COSTS\n");
    for row in instance.node_costs() {
        let costs: Vec<String> = row.iter().map(|&c| format_f64(c)).collect();
        let _ = writeln!(out, "{}", costs.join(" "));
    }
    out.push_str("\nEDGE COSTS\n");
    write_edges(&mut out, instance.edges());
    out
}
