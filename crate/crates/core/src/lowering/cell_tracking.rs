//! Cell tracking as a flow-conserving selection of detections and links.

use crate::model::{CellTrackingInstance, Relation};

use super::{LoweredModel, ModelBuilder, Target, VarRole};

/// One binary per record. Every active detection has exactly one source
/// (move in, division in, appearance) unless it lies in the first frame,
/// and exactly one sink unless it lies in the last frame; in those frames
/// appearance and disappearance are bounded by the detection instead.
pub fn lower_cell_tracking(instance: &CellTrackingInstance) -> LoweredModel {
    let mut m = ModelBuilder::new();
    let det: Vec<usize> = instance
        .detections()
        .iter()
        .map(|d| {
            let var = m.var(format!("det_{}", d.id), VarRole::Detection { id: d.id });
            m.cost(var, d.cost);
            var
        })
        .collect();
    let app: Vec<usize> = instance
        .appearances()
        .iter()
        .map(|b| {
            let var = m.var(format!("app_{}", b.detection), VarRole::Appearance { detection: b.detection });
            m.cost(var, b.cost);
            var
        })
        .collect();
    let disapp: Vec<usize> = instance
        .disappearances()
        .iter()
        .map(|b| {
            let var = m.var(format!("disapp_{}", b.detection), VarRole::Disappearance { detection: b.detection });
            m.cost(var, b.cost);
            var
        })
        .collect();
    let moves: Vec<usize> = instance
        .moves()
        .iter()
        .map(|mv| {
            let var = m.var(format!("move_{}", mv.id), VarRole::Move { id: mv.id });
            m.cost(var, mv.cost);
            var
        })
        .collect();
    let divs: Vec<usize> = instance
        .divisions()
        .iter()
        .map(|d| {
            let var = m.var(format!("div_{}", d.id), VarRole::Division { id: d.id });
            m.cost(var, d.cost);
            var
        })
        .collect();

    for ((d, flow), &x) in instance.detections().iter().zip(instance.flow()).zip(&det) {
        let id = d.id;
        if flow.constrained_in {
            let mut terms: Vec<(usize, f64)> = flow.moves_in.iter().map(|&p| (moves[p], 1.0)).collect();
            terms.extend(flow.divisions_in.iter().map(|&p| (divs[p], 1.0)));
            terms.extend(flow.appearance.map(|p| (app[p], 1.0)));
            terms.push((x, -1.0));
            m.row(format!("in_{id}"), terms, Relation::Eq, 0.0);
        } else if let Some(p) = flow.appearance {
            m.row(format!("app_link_{id}"), vec![(app[p], 1.0), (x, -1.0)], Relation::Le, 0.0);
        }
        if flow.constrained_out {
            let mut terms: Vec<(usize, f64)> = flow.moves_out.iter().map(|&p| (moves[p], 1.0)).collect();
            terms.extend(flow.divisions_out.iter().map(|&p| (divs[p], 1.0)));
            terms.extend(flow.disappearance.map(|p| (disapp[p], 1.0)));
            terms.push((x, -1.0));
            m.row(format!("out_{id}"), terms, Relation::Eq, 0.0);
        } else if let Some(p) = flow.disappearance {
            m.row(format!("disapp_link_{id}"), vec![(disapp[p], 1.0), (x, -1.0)], Relation::Le, 0.0);
        }
    }
    for (k, set) in instance.exclusions().iter().enumerate() {
        let terms = set
            .iter()
            .map(|&id| (det[instance.detection_position(id).expect("validated exclusion member")], 1.0))
            .collect();
        m.row(format!("confset_{k}"), terms, Relation::Le, 1.0);
    }
    m.finish(true, Target::CellTracking)
}
