use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstrId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs: f64 = self.terms.iter().map(|&(v, c)| c * values[v.0]).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs + tol,
            Relation::Ge => lhs >= self.rhs - tol,
            Relation::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// A minimisation MILP over continuous and binary columns.
///
/// Variables and constraints carry unique names. Removed constraints leave a
/// hole so that existing [`ConstrId`]s stay valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    vars: Vec<Variable>,
    objective: Vec<f64>,
    constraints: Vec<Option<Constraint>>,
    var_names: HashMap<String, VarId>,
    constr_names: HashMap<String, ConstrId>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> Result<VarId, SolverError> {
        let name = name.into();
        if self.var_names.contains_key(&name) {
            return Err(SolverError::DuplicateName(name));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            VarKind::Continuous => (lower, upper),
        };
        if lower > upper {
            return Err(SolverError::InvalidBounds(name));
        }
        let id = VarId(self.vars.len());
        self.var_names.insert(name.clone(), id);
        self.vars.push(Variable { name, kind, lower, upper });
        self.objective.push(cost);
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<ConstrId, SolverError> {
        let name = name.into();
        if self.constr_names.contains_key(&name) {
            return Err(SolverError::DuplicateName(name));
        }
        if let Some(&(v, _)) = terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(SolverError::UnknownVariable(format!("#{} in {name}", v.0)));
        }
        let id = ConstrId(self.constraints.len());
        self.constr_names.insert(name.clone(), id);
        self.constraints.push(Some(Constraint { name, terms, relation, rhs }));
        Ok(id)
    }

    /// Drops a constraint; returns it if it was still present.
    pub fn remove_constraint(&mut self, id: ConstrId) -> Option<Constraint> {
        let removed = self.constraints.get_mut(id.0)?.take()?;
        self.constr_names.remove(&removed.name);
        Some(removed)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    pub fn constraint_id(&self, name: &str) -> Option<ConstrId> {
        self.constr_names.get(name).copied()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn cost(&self, id: VarId) -> f64 {
        self.objective[id.0]
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_cost(&mut self, id: VarId, cost: f64) {
        self.objective[id.0] = cost;
    }

    pub fn constraint(&self, id: ConstrId) -> Option<&Constraint> {
        self.constraints.get(id.0).and_then(Option::as_ref)
    }

    pub fn constraints(&self) -> impl Iterator<Item = (ConstrId, &Constraint)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (ConstrId(i), c)))
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constr_names.len()
    }

    pub fn num_binary(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.num_vars() - self.num_binary()
    }

    /// Pins a binary column to `value`.
    pub fn fix(&mut self, id: VarId, value: bool) -> Result<(), SolverError> {
        let var = &mut self.vars[id.0];
        if var.kind != VarKind::Binary {
            return Err(SolverError::NotBinary(var.name.clone()));
        }
        let v = if value { 1.0 } else { 0.0 };
        var.lower = v;
        var.upper = v;
        Ok(())
    }

    /// Turns a binary column into a continuous one on `[0, 1]`.
    pub fn relax(&mut self, id: VarId) -> Result<(), SolverError> {
        let var = &mut self.vars[id.0];
        if var.kind != VarKind::Binary {
            return Err(SolverError::NotBinary(var.name.clone()));
        }
        var.kind = VarKind::Continuous;
        Ok(())
    }

    /// Linear objective value of a full assignment.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Names of constraints violated by `values` beyond `tol`, including
    /// column bounds.
    pub fn violated(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out: Vec<String> = self
            .constraints()
            .filter(|(_, c)| !c.is_satisfied(values, tol))
            .map(|(_, c)| c.name.clone())
            .collect();
        for (v, &val) in self.vars.iter().zip(values) {
            if val < v.lower - tol || val > v.upper + tol {
                out.push(format!("bounds of {}", v.name));
            }
        }
        out
    }
}

/// Returns a copy of `model` with each named binary fixed to its value.
pub fn fix_binaries(model: &MilpModel, assignments: &[(&str, bool)]) -> Result<MilpModel, SolverError> {
    let mut out = model.clone();
    for &(name, value) in assignments {
        let id = out
            .var_id(name)
            .ok_or_else(|| SolverError::UnknownVariable(name.to_string()))?;
        out.fix(id, value)?;
    }
    Ok(out)
}

/// Returns a copy of `model` with the named binaries relaxed to `[0, 1]`.
pub fn relax_binaries(model: &MilpModel, names: &[&str]) -> Result<MilpModel, SolverError> {
    let mut out = model.clone();
    for &name in names {
        let id = out
            .var_id(name)
            .ok_or_else(|| SolverError::UnknownVariable(name.to_string()))?;
        out.relax(id)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY, 1.0).unwrap();
        let y = m.add_var("y[1]", VarKind::Binary, 0.0, 1.0, 2.0).unwrap();
        let z = m.add_var("y[2]", VarKind::Binary, 0.0, 1.0, 3.0).unwrap();
        m.add_constraint("c", vec![(x, 1.0), (y, 4.0), (z, 4.0)], Relation::Ge, 3.0).unwrap();
        m
    }

    #[test]
    fn names_are_unique() {
        let mut m = small();
        assert!(matches!(
            m.add_var("x", VarKind::Continuous, 0.0, 1.0, 0.0),
            Err(SolverError::DuplicateName(_))
        ));
        assert!(m.add_constraint("c", vec![], Relation::Le, 0.0).is_err());
        assert!(m.add_constraint("d", vec![(VarId(9), 1.0)], Relation::Le, 0.0).is_err());
    }

    #[test]
    fn binary_bounds_are_clamped() {
        let mut m = MilpModel::new();
        let b = m.add_var("b", VarKind::Binary, -3.0, 7.0, 0.0).unwrap();
        assert_eq!((m.var(b).lower, m.var(b).upper), (0.0, 1.0));
    }

    #[test]
    fn fix_and_relax() {
        let m = small();
        assert_eq!(fix_binaries(&m, &[]).unwrap(), m);
        assert_eq!(relax_binaries(&m, &[]).unwrap(), m);

        let fixed = fix_binaries(&m, &[("y[1]", true)]).unwrap();
        let y = fixed.var(fixed.var_id("y[1]").unwrap());
        assert_eq!((y.lower, y.upper, y.kind), (1.0, 1.0, VarKind::Binary));
        assert!(matches!(
            fix_binaries(&m, &[("nope", true)]),
            Err(SolverError::UnknownVariable(_))
        ));
        assert!(matches!(fix_binaries(&m, &[("x", true)]), Err(SolverError::NotBinary(_))));

        let relaxed = relax_binaries(&m, &["y[2]"]).unwrap();
        assert_eq!(relaxed.num_binary(), 1);
        assert_eq!(relaxed.num_constraints(), m.num_constraints());
        assert!(relax_binaries(&m, &["zz"]).is_err());
    }

    #[test]
    fn fix_and_relax_commute_on_disjoint_names() {
        let m = small();
        let a = relax_binaries(&fix_binaries(&m, &[("y[1]", false)]).unwrap(), &["y[2]"]).unwrap();
        let b = fix_binaries(&relax_binaries(&m, &["y[2]"]).unwrap(), &[("y[1]", false)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn removal_keeps_ids() {
        let mut m = small();
        let x = m.var_id("x").unwrap();
        let d = m.add_constraint("d", vec![(x, 1.0)], Relation::Le, 10.0).unwrap();
        let c = m.constraint_id("c").unwrap();
        assert!(m.remove_constraint(c).is_some());
        assert!(m.remove_constraint(c).is_none());
        assert_eq!(m.num_constraints(), 1);
        assert_eq!(m.constraint(d).unwrap().name, "d");
        // the freed name can be reused
        m.add_constraint("c", vec![], Relation::Le, 1.0).unwrap();
    }

    #[test]
    fn evaluates_assignments() {
        let m = small();
        assert_eq!(m.evaluate(&[3.0, 0.0, 0.0]), 3.0);
        assert!(m.violated(&[3.0, 0.0, 0.0], 1e-9).is_empty());
        assert_eq!(m.violated(&[1.0, 0.0, 0.0], 1e-9), vec!["c".to_string()]);
        assert_eq!(m.violated(&[3.0, 2.0, 0.0], 1e-9), vec!["bounds of y[1]".to_string()]);
    }
}
