//! Graph matching with linearized quadratic terms, and multi-graph matching
//! with cycle consistency rows.

use std::collections::{BTreeMap, HashMap};

use crate::model::{GmInstance, MgmInstance, Relation};

use super::{LoweredModel, ModelBuilder, Target, VarRole};

/// Assignment binaries, uniqueness rows and product binaries of one pairwise
/// problem. Returns the variable per assignment position.
fn gm_block(m: &mut ModelBuilder, gm: &GmInstance, pair: Option<(usize, usize)>) -> Vec<usize> {
    let tag = pair.map(|(p, k)| format!("{p}_{k}_")).unwrap_or_default();
    let x: Vec<usize> = gm
        .assignments()
        .iter()
        .map(|a| {
            let var = m.var(format!("x_{tag}{}", a.id), VarRole::Assignment { pair, id: a.id });
            m.cost(var, a.cost);
            var
        })
        .collect();
    let mut by_left: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    let mut by_right: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for (a, &var) in gm.assignments().iter().zip(&x) {
        by_left.entry(a.left).or_default().push((var, 1.0));
        by_right.entry(a.right).or_default().push((var, 1.0));
    }
    for (kind, groups) in [("row", by_left), ("col", by_right)] {
        for (node, terms) in groups.into_iter().filter(|(_, t)| t.len() > 1) {
            m.row(format!("{kind}_{tag}{node}"), terms, Relation::Le, 1.0);
        }
    }
    for ((i, j), cost) in gm.merged_quadratic() {
        if cost == 0.0 {
            continue;
        }
        let (a, b) = (gm.assignments()[i].id, gm.assignments()[j].id);
        let z = m.var(format!("z_{tag}{a}_{b}"), VarRole::Product { pair, first: a, second: b });
        m.cost(z, cost);
        let id = format!("prod_{tag}{a}_{b}");
        m.row(format!("{id}_1"), vec![(z, 1.0), (x[i], -1.0)], Relation::Le, 0.0);
        m.row(format!("{id}_2"), vec![(z, 1.0), (x[j], -1.0)], Relation::Le, 0.0);
        m.row(format!("{id}_3"), vec![(x[i], 1.0), (x[j], 1.0), (z, -1.0)], Relation::Le, 1.0);
    }
    x
}

/// One binary per listed assignment, at most one active assignment per
/// point, and `z = x_a · x_b` per nonzero quadratic pair via the three
/// standard product inequalities.
pub fn lower_gm(gm: &GmInstance) -> LoweredModel {
    let mut m = ModelBuilder::new();
    gm_block(&mut m, gm, None);
    m.finish(true, Target::Matching)
}

/// Variable of assignment `(left, right)` in one pairwise block.
type PairVars = HashMap<(usize, usize), usize>;

/// Union of the pairwise models plus cycle consistency for every triple
/// `p < k < l`. Any two active matches among the three pairs force the third
/// one: `x^pk_ij + x^kl_jm − x^pl_im ≤ 1` and its two rotations. When the
/// forced variable does not exist the two premises exclude each other.
pub fn lower_mgm(mgm: &MgmInstance) -> LoweredModel {
    let mut m = ModelBuilder::new();
    let mut blocks: BTreeMap<(usize, usize), PairVars> = BTreeMap::new();
    for (&(p, k), gm) in mgm.problems() {
        let x = gm_block(&mut m, gm, Some((p, k)));
        blocks.insert((p, k), gm.assignments().iter().zip(x).map(|(a, var)| ((a.left, a.right), var)).collect());
    }
    let empty = PairVars::new();
    let n = mgm.graph_count();
    for p in 0..n {
        for k in p + 1..n {
            for l in k + 1..n {
                let pk = blocks.get(&(p, k)).unwrap_or(&empty);
                let kl = blocks.get(&(k, l)).unwrap_or(&empty);
                let pl = blocks.get(&(p, l)).unwrap_or(&empty);
                transitivity(&mut m, (p, k, l), pk, kl, pl);
            }
        }
    }
    let pairs = mgm.problems().keys().copied().collect();
    m.finish(true, Target::MultiMatching { pairs })
}

fn transitivity(m: &mut ModelBuilder, (p, k, l): (usize, usize, usize), pk: &PairVars, kl: &PairVars, pl: &PairVars) {
    let sorted = |vars: &PairVars| {
        let mut v: Vec<((usize, usize), usize)> = vars.iter().map(|(&key, &var)| (key, var)).collect();
        v.sort_unstable();
        v
    };
    let (pk_s, kl_s, pl_s) = (sorted(pk), sorted(kl), sorted(pl));
    let mut emit = |(i, j, q): (usize, usize, usize), form: u8, a: usize, b: usize, target: Option<usize>| {
        let mut terms = vec![(a, 1.0), (b, 1.0)];
        if let Some(t) = target {
            terms.push((t, -1.0));
        }
        m.row(format!("trans_{p}_{k}_{l}_{i}_{j}_{q}_{form}"), terms, Relation::Le, 1.0);
    };
    // (i, j, q) with i in p, j in k, q in l throughout.
    for &((i, j), a) in &pk_s {
        for &((j2, q), b) in &kl_s {
            if j2 == j {
                emit((i, j, q), 1, a, b, pl.get(&(i, q)).copied());
            }
        }
    }
    for &((i, q), a) in &pl_s {
        for &((j, q2), b) in &kl_s {
            if q2 == q {
                emit((i, j, q), 2, a, b, pk.get(&(i, j)).copied());
            }
        }
    }
    for &((i, j), a) in &pk_s {
        for &((i2, q), b) in &pl_s {
            if i2 == i {
                emit((i, j, q), 3, a, b, kl.get(&(j, q)).copied());
            }
        }
    }
}
