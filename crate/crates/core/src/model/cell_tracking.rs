//! Cell lineage tracking with mutually exclusive detection hypotheses.
//!
//! Flow structure follows the usual lineage reading: an active detection has
//! exactly one source (a move in, a division in, or an appearance) unless it
//! lies in the first frame, and exactly one sink (a move out, a division out,
//! or a disappearance) unless it lies in the last frame. In the boundary frames
//! an appearance (resp. disappearance) may only be active together with its
//! detection.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub frame: usize,
    pub id: usize,
    pub cost: f64,
}

/// Appearance or disappearance of a detection; keyed by the detection id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boundary {
    pub frame: usize,
    pub detection: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Division {
    pub id: usize,
    pub parent: usize,
    pub children: [usize; 2],
    pub cost: f64,
}

/// Per-detection incidence, all entries are positions into the record lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionFlow {
    pub moves_in: Vec<usize>,
    pub moves_out: Vec<usize>,
    pub divisions_in: Vec<usize>,
    pub divisions_out: Vec<usize>,
    pub appearance: Option<usize>,
    pub disappearance: Option<usize>,
    /// Whether the incoming equality applies (detection is not in the first frame).
    pub constrained_in: bool,
    /// Whether the outgoing equality applies (detection is not in the last frame).
    pub constrained_out: bool,
}

#[derive(Debug, Clone)]
pub struct CellTrackingInstance {
    detections: Vec<Detection>,
    appearances: Vec<Boundary>,
    disappearances: Vec<Boundary>,
    moves: Vec<Move>,
    divisions: Vec<Division>,
    exclusions: Vec<Vec<usize>>,
    detection_pos: HashMap<usize, usize>,
    move_pos: HashMap<usize, usize>,
    division_pos: HashMap<usize, usize>,
    flow: Vec<DetectionFlow>,
}

impl PartialEq for CellTrackingInstance {
    fn eq(&self, other: &Self) -> bool {
        self.detections == other.detections
            && self.appearances == other.appearances
            && self.disappearances == other.disappearances
            && self.moves == other.moves
            && self.divisions == other.divisions
            && self.exclusions == other.exclusions
    }
}

/// Which record of the instance an error refers to, so parsers can point at
/// the offending line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordRef {
    Detection(usize),
    Appearance(usize),
    Disappearance(usize),
    Move(usize),
    Division(usize),
    Exclusion(usize),
}

impl CellTrackingInstance {
    pub fn new(
        detections: Vec<Detection>,
        appearances: Vec<Boundary>,
        disappearances: Vec<Boundary>,
        moves: Vec<Move>,
        divisions: Vec<Division>,
        exclusions: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        Self::new_located(detections, appearances, disappearances, moves, divisions, exclusions)
            .map_err(|(_, e)| e)
    }

    /// Like [`CellTrackingInstance::new`], but reports which record failed.
    pub fn new_located(
        detections: Vec<Detection>,
        appearances: Vec<Boundary>,
        disappearances: Vec<Boundary>,
        moves: Vec<Move>,
        divisions: Vec<Division>,
        exclusions: Vec<Vec<usize>>,
    ) -> Result<Self, (RecordRef, ModelError)> {
        let mut detection_pos = HashMap::with_capacity(detections.len());
        for (pos, d) in detections.iter().enumerate() {
            if detection_pos.insert(d.id, pos).is_some() {
                return Err((RecordRef::Detection(pos), ModelError::DuplicateDetection(d.id)));
            }
            check_cost(d.cost, || format!("detection {}", d.id)).map_err(|e| (RecordRef::Detection(pos), e))?;
        }
        let first_frame = detections.iter().map(|d| d.frame).min().unwrap_or(0);
        let last_frame = detections.iter().map(|d| d.frame).max().unwrap_or(0);
        let mut flow: Vec<DetectionFlow> = detections
            .iter()
            .map(|d| DetectionFlow {
                constrained_in: d.frame > first_frame,
                constrained_out: d.frame < last_frame,
                ..DetectionFlow::default()
            })
            .collect();
        let find = |id: usize, context: &dyn Fn() -> String| {
            detection_pos
                .get(&id)
                .copied()
                .ok_or_else(|| ModelError::UnknownDetection { context: context(), id })
        };

        for (kind, list) in [("appearance", &appearances), ("disappearance", &disappearances)] {
            for (pos, b) in list.iter().enumerate() {
                let at = if kind == "appearance" { RecordRef::Appearance(pos) } else { RecordRef::Disappearance(pos) };
                let det = find(b.detection, &|| kind.to_string()).map_err(|e| (at, e))?;
                if detections[det].frame != b.frame {
                    return Err((
                        at,
                        ModelError::FrameMismatch {
                            context: format!("{kind} of detection {}", b.detection),
                            reason: format!("frame {} but the detection is in frame {}", b.frame, detections[det].frame),
                        },
                    ));
                }
                check_cost(b.cost, || format!("{kind} of detection {}", b.detection)).map_err(|e| (at, e))?;
                let slot = if kind == "appearance" { &mut flow[det].appearance } else { &mut flow[det].disappearance };
                if slot.replace(pos).is_some() {
                    return Err((at, ModelError::DuplicateRecord { kind, id: b.detection }));
                }
            }
        }

        let mut move_pos = HashMap::with_capacity(moves.len());
        for (pos, m) in moves.iter().enumerate() {
            let at = RecordRef::Move(pos);
            if move_pos.insert(m.id, pos).is_some() {
                return Err((at, ModelError::DuplicateRecord { kind: "move", id: m.id }));
            }
            let from = find(m.from, &|| format!("move {}", m.id)).map_err(|e| (at, e))?;
            let to = find(m.to, &|| format!("move {}", m.id)).map_err(|e| (at, e))?;
            if detections[from].frame + 1 != detections[to].frame {
                return Err((
                    at,
                    ModelError::FrameMismatch {
                        context: format!("move {}", m.id),
                        reason: format!(
                            "links frame {} to frame {}, expected consecutive frames",
                            detections[from].frame, detections[to].frame
                        ),
                    },
                ));
            }
            check_cost(m.cost, || format!("move {}", m.id)).map_err(|e| (at, e))?;
            flow[from].moves_out.push(pos);
            flow[to].moves_in.push(pos);
        }

        let mut division_pos = HashMap::with_capacity(divisions.len());
        for (pos, d) in divisions.iter().enumerate() {
            let at = RecordRef::Division(pos);
            if division_pos.insert(d.id, pos).is_some() {
                return Err((at, ModelError::DuplicateRecord { kind: "division", id: d.id }));
            }
            if d.children[0] == d.children[1] {
                return Err((
                    at,
                    ModelError::DegenerateDivision { id: d.id, reason: format!("child {} repeated", d.children[0]) },
                ));
            }
            let parent = find(d.parent, &|| format!("division {}", d.id)).map_err(|e| (at, e))?;
            for child in d.children {
                let c = find(child, &|| format!("division {}", d.id)).map_err(|e| (at, e))?;
                if c == parent {
                    return Err((
                        at,
                        ModelError::DegenerateDivision { id: d.id, reason: "parent is also a child".into() },
                    ));
                }
                if detections[parent].frame + 1 != detections[c].frame {
                    return Err((
                        at,
                        ModelError::FrameMismatch {
                            context: format!("division {}", d.id),
                            reason: format!(
                                "parent in frame {} but child {child} in frame {}",
                                detections[parent].frame, detections[c].frame
                            ),
                        },
                    ));
                }
                flow[c].divisions_in.push(pos);
            }
            check_cost(d.cost, || format!("division {}", d.id)).map_err(|e| (at, e))?;
            flow[parent].divisions_out.push(pos);
        }

        for (pos, set) in exclusions.iter().enumerate() {
            let at = RecordRef::Exclusion(pos);
            let mut frame = None;
            let mut seen = HashSet::new();
            for &id in set {
                let det = find(id, &|| format!("exclusion set {pos}")).map_err(|e| (at, e))?;
                if !seen.insert(id) {
                    return Err((at, ModelError::DuplicateRecord { kind: "exclusion member", id }));
                }
                let f = detections[det].frame;
                if *frame.get_or_insert(f) != f {
                    return Err((
                        at,
                        ModelError::FrameMismatch {
                            context: format!("exclusion set {pos}"),
                            reason: "members span several frames".into(),
                        },
                    ));
                }
            }
        }

        Ok(Self {
            detections,
            appearances,
            disappearances,
            moves,
            divisions,
            exclusions,
            detection_pos,
            move_pos,
            division_pos,
            flow,
        })
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn appearances(&self) -> &[Boundary] {
        &self.appearances
    }

    pub fn disappearances(&self) -> &[Boundary] {
        &self.disappearances
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn divisions(&self) -> &[Division] {
        &self.divisions
    }

    pub fn exclusions(&self) -> &[Vec<usize>] {
        &self.exclusions
    }

    pub fn flow(&self) -> &[DetectionFlow] {
        &self.flow
    }

    pub fn detection_position(&self, id: usize) -> Option<usize> {
        self.detection_pos.get(&id).copied()
    }

    pub fn move_position(&self, id: usize) -> Option<usize> {
        self.move_pos.get(&id).copied()
    }

    pub fn division_position(&self, id: usize) -> Option<usize> {
        self.division_pos.get(&id).copied()
    }

    pub fn frame_count(&self) -> usize {
        match (self.detections.iter().map(|d| d.frame).min(), self.detections.iter().map(|d| d.frame).max()) {
            (Some(lo), Some(hi)) => hi - lo + 1,
            _ => 0,
        }
    }

    /// Number of binary decisions: detections, appearances, disappearances,
    /// moves and divisions.
    pub fn decision_count(&self) -> usize {
        self.detections.len()
            + self.appearances.len()
            + self.disappearances.len()
            + self.moves.len()
            + self.divisions.len()
    }
}

fn check_cost(cost: f64, context: impl Fn() -> String) -> Result<(), ModelError> {
    if cost.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { context: context(), value: cost })
    }
}

/// Active record ids per kind. Appearances and disappearances are identified
/// by their detection id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CellTrackingSolution {
    pub detections: BTreeSet<usize>,
    pub appearances: BTreeSet<usize>,
    pub disappearances: BTreeSet<usize>,
    pub moves: BTreeSet<usize>,
    pub divisions: BTreeSet<usize>,
}
