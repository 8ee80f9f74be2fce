//! Binary integer linear programs.
//!
//! `min Σ c_i x_i` over `x ∈ {0,1}^n` subject to a mix of `≤`, `≥` and `=`
//! rows. Terms are kept in first-appearance order with repeated variables
//! merged, so that a file round-trips term by term.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One row `Σ a_j x_j {≤,≥,=} b`. Terms reference variables by index.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub id: String,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LinearConstraint {
    /// True when every coefficient and the right hand side are integers.
    pub fn is_integral(&self) -> bool {
        self.rhs.fract() == 0.0 && self.terms.iter().all(|(_, a)| a.fract() == 0.0)
    }

    /// Left-hand side value under a 0/1 assignment.
    pub fn activity(&self, x: &[bool]) -> f64 {
        self.terms.iter().filter(|(v, _)| x[*v]).map(|(_, a)| a).sum()
    }

    pub fn is_satisfied(&self, x: &[bool], tol: f64) -> bool {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs + tol,
            Relation::Ge => lhs >= self.rhs - tol,
            Relation::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IlpInstance {
    variables: Vec<String>,
    index: HashMap<String, usize>,
    objective: Vec<(usize, f64)>,
    constraints: Vec<LinearConstraint>,
}

impl PartialEq for IlpInstance {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.objective == other.objective
            && self.constraints == other.constraints
    }
}

impl IlpInstance {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Dense objective vector indexed by variable.
    pub fn objective_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.variables.len()];
        for &(var, coef) in &self.objective {
            dense[var] += coef;
        }
        dense
    }

    /// Builds a dense binary assignment from `(name, value)` pairs.
    ///
    /// Every variable must be given exactly once with value 0 or 1.
    pub fn assignment_from_pairs<'a, I>(&self, pairs: I) -> Result<Vec<bool>, ModelError>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut values: Vec<Option<bool>> = vec![None; self.variables.len()];
        for (name, value) in pairs {
            let var = self.variable_index(name).ok_or_else(|| ModelError::UnknownVariable {
                context: "assignment".into(),
                name: name.to_string(),
            })?;
            let bit = if value == 0.0 {
                false
            } else if value == 1.0 {
                true
            } else {
                return Err(ModelError::NonBinary { name: name.to_string(), value });
            };
            if values[var].replace(bit).is_some() {
                return Err(ModelError::DuplicateVariable(name.to_string()));
            }
        }
        values
            .into_iter()
            .enumerate()
            .map(|(var, v)| {
                v.ok_or_else(|| ModelError::UnknownVariable {
                    context: "assignment is missing a value".into(),
                    name: self.variables[var].clone(),
                })
            })
            .collect()
    }

    /// Objective value of a 0/1 assignment.
    pub fn objective_value(&self, x: &[bool]) -> f64 {
        self.objective.iter().filter(|(v, _)| x[*v]).map(|(_, c)| c).sum()
    }

    /// Index of the first constraint violated by more than `tol`.
    pub fn first_violation(&self, x: &[bool], tol: f64) -> Option<usize> {
        self.constraints.iter().position(|c| !c.is_satisfied(x, tol))
    }
}

/// Incremental constructor for [`IlpInstance`].
#[derive(Debug, Default)]
pub struct IlpBuilder {
    variables: Vec<String>,
    index: HashMap<String, usize>,
    objective: Vec<(usize, f64)>,
    objective_slot: HashMap<usize, usize>,
    constraints: Vec<LinearConstraint>,
    constraint_ids: HashSet<String>,
}

impl IlpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> Result<usize, ModelError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        let var = self.variables.len();
        self.index.insert(name.clone(), var);
        self.variables.push(name);
        Ok(var)
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    /// Adds `coef · x_var` to the objective, merging with an earlier term.
    pub fn add_objective_term(&mut self, var: usize, coef: f64) -> Result<(), ModelError> {
        self.check_var(var, "objective")?;
        check_finite(coef, "objective")?;
        match self.objective_slot.get(&var) {
            Some(&slot) => self.objective[slot].1 += coef,
            None => {
                self.objective_slot.insert(var, self.objective.len());
                self.objective.push((var, coef));
            }
        }
        Ok(())
    }

    pub fn add_constraint<I>(
        &mut self,
        id: impl Into<String>,
        terms: I,
        relation: Relation,
        rhs: f64,
    ) -> Result<(), ModelError>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let id = id.into();
        if self.constraint_ids.contains(&id) {
            return Err(ModelError::DuplicateConstraintId(id));
        }
        check_finite(rhs, &id)?;
        let mut merged: Vec<(usize, f64)> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (var, coef) in terms {
            self.check_var(var, &id)?;
            check_finite(coef, &id)?;
            match slot.get(&var) {
                Some(&s) => merged[s].1 += coef,
                None => {
                    slot.insert(var, merged.len());
                    merged.push((var, coef));
                }
            }
        }
        self.constraint_ids.insert(id.clone());
        self.constraints.push(LinearConstraint { id, terms: merged, relation, rhs });
        Ok(())
    }

    pub fn build(self) -> IlpInstance {
        IlpInstance {
            variables: self.variables,
            index: self.index,
            objective: self.objective,
            constraints: self.constraints,
        }
    }

    fn check_var(&self, var: usize, context: &str) -> Result<(), ModelError> {
        if var < self.variables.len() {
            Ok(())
        } else {
            Err(ModelError::UnknownVariable { context: context.to_string(), name: format!("#{var}") })
        }
    }
}

fn check_finite(value: f64, context: &str) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { context: context.to_string(), value })
    }
}
