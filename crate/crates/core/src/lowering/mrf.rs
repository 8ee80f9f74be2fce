//! Local polytope and compact Potts lowerings of pairwise MRFs, and the
//! tomography extension.

use crate::model::{MrfInstance, Relation, TomographyInstance};

use super::{LoweredModel, LoweringError, ModelBuilder, Target, VarRole};

/// Objective coefficient for a potential entry. `+inf` forbids the entry
/// through a `forbid_` row instead.
fn charge(m: &mut ModelBuilder, var: usize, name: &str, cost: f64, context: impl Fn() -> String) -> Result<(), LoweringError> {
    if cost == f64::INFINITY {
        m.row(format!("forbid_{name}"), vec![(var, 1.0)], Relation::Eq, 0.0);
        Ok(())
    } else if cost.is_finite() {
        m.cost(var, cost);
        Ok(())
    } else {
        Err(LoweringError::UnsupportedCost { context: context(), value: cost })
    }
}

/// `mu_v_l` variables and `simplex_v` rows; returns the variable per node
/// and label.
fn node_layer(m: &mut ModelBuilder, mrf: &MrfInstance) -> Result<Vec<Vec<usize>>, LoweringError> {
    let mut vars = Vec::with_capacity(mrf.node_count());
    for (v, unary) in mrf.unaries().iter().enumerate() {
        let mut row = Vec::with_capacity(unary.len());
        for (l, &cost) in unary.iter().enumerate() {
            let name = format!("mu_{v}_{l}");
            let var = m.var(name.clone(), VarRole::NodeLabel { node: v, label: l });
            charge(m, var, &name, cost, || format!("label {l} of node {v}"))?;
            row.push(var);
        }
        m.row(format!("simplex_{v}"), row.iter().map(|&x| (x, 1.0)).collect(), Relation::Eq, 1.0);
        vars.push(row);
    }
    Ok(vars)
}

fn local_polytope(m: &mut ModelBuilder, mrf: &MrfInstance) -> Result<Vec<Vec<usize>>, LoweringError> {
    let nodes = node_layer(m, mrf)?;
    for (e, edge) in mrf.edges().iter().enumerate() {
        let (u, v) = (edge.u, edge.v);
        let (ku, kv) = (nodes[u].len(), nodes[v].len());
        let mut pair = vec![0; ku * kv];
        for a in 0..ku {
            for b in 0..kv {
                let name = format!("mu_{u}_{v}_{a}_{b}");
                let var = m.var(name.clone(), VarRole::EdgeLabels { edge: e, u, v, label_u: a, label_v: b });
                charge(m, var, &name, edge.table[a * kv + b], || format!("labels ({a}, {b}) of edge ({u}, {v})"))?;
                pair[a * kv + b] = var;
            }
        }
        for a in 0..ku {
            let mut terms: Vec<(usize, f64)> = (0..kv).map(|b| (pair[a * kv + b], 1.0)).collect();
            terms.push((nodes[u][a], -1.0));
            m.row(format!("marg_{e}_0_{a}"), terms, Relation::Eq, 0.0);
        }
        for b in 0..kv {
            let mut terms: Vec<(usize, f64)> = (0..ku).map(|a| (pair[a * kv + b], 1.0)).collect();
            terms.push((nodes[v][b], -1.0));
            m.row(format!("marg_{e}_1_{b}"), terms, Relation::Eq, 0.0);
        }
    }
    Ok(nodes)
}

/// Local polytope with one binary per node label and per edge label pair.
/// Integral feasible points are exactly the labelings.
pub fn lower_mrf_local_polytope(mrf: &MrfInstance) -> Result<LoweredModel, LoweringError> {
    let mut m = ModelBuilder::new();
    local_polytope(&mut m, mrf)?;
    Ok(m.finish(true, Target::Labeling { node_count: mrf.node_count() }))
}

/// Weight `λ` of a Potts table `λ·[a ≠ b]`, compared exactly.
fn potts_weight(ku: usize, kv: usize, table: &[f64]) -> Result<f64, String> {
    let mut weight = None;
    for a in 0..ku {
        for b in 0..kv {
            let x = table[a * kv + b];
            if a == b {
                if x != 0.0 {
                    return Err(format!("diagonal entry ({a}, {a}) is {x}, expected 0"));
                }
            } else if *weight.get_or_insert(x) != x {
                return Err(format!("off-diagonal entries {} and {x} differ", weight.unwrap_or(x)));
            }
        }
    }
    let weight = weight.unwrap_or(0.0);
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(format!("weight {weight} is not finite and non-negative"));
    }
    Ok(weight)
}

/// Node indicators plus per-label disagreement binaries `d_uv(l)` for every
/// edge with a positive Potts weight. An edge costs `λ/2 · Σ_l d_uv(l)`,
/// which is `λ` exactly when the labels differ.
pub fn lower_mrf_potts_compact(mrf: &MrfInstance) -> Result<LoweredModel, LoweringError> {
    let weights = mrf
        .edges()
        .iter()
        .map(|e| {
            let (ku, kv) = (mrf.label_counts()[e.u], mrf.label_counts()[e.v]);
            potts_weight(ku, kv, &e.table).map_err(|reason| LoweringError::NotPotts { u: e.u, v: e.v, reason })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = ModelBuilder::new();
    let nodes = node_layer(&mut m, mrf)?;
    for (e, (edge, &weight)) in mrf.edges().iter().zip(&weights).enumerate() {
        if weight == 0.0 {
            continue;
        }
        let (u, v) = (edge.u, edge.v);
        for l in 0..nodes[u].len().max(nodes[v].len()) {
            let d = m.var(format!("d_{u}_{v}_{l}"), VarRole::PottsDisagreement { edge: e, u, v, label: l });
            m.cost(d, weight / 2.0);
            let (mu, mv) = (nodes[u].get(l).copied(), nodes[v].get(l).copied());
            for (suffix, plus, minus) in [("a", mu, mv), ("b", mv, mu)] {
                // d ≥ plus − minus; trivial when `plus` does not exist.
                let Some(plus) = plus else { continue };
                let mut terms = vec![(plus, 1.0)];
                if let Some(minus) = minus {
                    terms.push((minus, -1.0));
                }
                terms.push((d, -1.0));
                m.row(format!("potts_{u}_{v}_{l}_{suffix}"), terms, Relation::Le, 0.0);
            }
        }
    }
    Ok(m.finish(true, Target::Labeling { node_count: mrf.node_count() }))
}

/// Local polytope of the base MRF plus `Σ_{v ∈ P_i} Σ_l l·μ_v(l) = p_i` per
/// projection. Only hard projections (one finite entry, equal to 0) lower.
pub fn lower_tomography(instance: &TomographyInstance) -> Result<LoweredModel, LoweringError> {
    let targets = instance
        .projections()
        .iter()
        .enumerate()
        .map(|(i, p)| p.hard_target().ok_or(LoweringError::GeneralProjection { projection: i }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = ModelBuilder::new();
    let nodes = local_polytope(&mut m, instance.base())?;
    for (i, (p, target)) in instance.projections().iter().zip(targets).enumerate() {
        let terms = p
            .nodes
            .iter()
            .flat_map(|&v| nodes[v].iter().enumerate().skip(1).map(|(l, &x)| (x, l as f64)))
            .collect();
        m.row(format!("proj_{i}"), terms, Relation::Eq, target as f64);
    }
    Ok(m.finish(true, Target::Labeling { node_count: instance.base().node_count() }))
}
