//! A small solver-agnostic integer program representation.
//!
//! Models here are feasibility problems with exact integer data. A backend
//! only has to declare variables, declare constraints and solve; whatever it
//! returns is rounded and re-checked against the model with integer
//! arithmetic before it is handed out as an [`Assignment`].

mod highs_backend;
mod lp_format;

use std::fmt;
use std::time::Duration;

pub use highs_backend::HighsBackend;
pub use lp_format::write_lp;

/// Environment variable naming the backend adapter to use.
pub const BACKEND_ENV: &str = "MFD_MILP_BACKEND";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef(u32);

impl VarRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer { lower: i64, upper: i64 },
    FreeInteger,
}

impl VarKind {
    pub fn bounds(self) -> (Option<i64>, Option<i64>) {
        match self {
            VarKind::Binary => (Some(0), Some(1)),
            VarKind::Integer { lower, upper } => (Some(lower), Some(upper)),
            VarKind::FreeInteger => (None, None),
        }
    }

    fn admits(self, value: i64) -> bool {
        let (lo, hi) = self.bounds();
        lo.map_or(true, |l| value >= l) && hi.map_or(true, |h| value <= h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub kind: VarKind,
    pub name: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, VarRef)>,
    pub relation: Relation,
    pub rhs: i64,
    pub tag: String,
}

impl LinearConstraint {
    pub fn new(tag: impl Into<String>, terms: Vec<(i64, VarRef)>, relation: Relation, rhs: i64) -> Self {
        LinearConstraint { terms, relation, rhs, tag: tag.into() }
    }

    pub fn lhs(&self, assignment: &Assignment) -> i64 {
        self.terms.iter().map(|&(c, v)| c * assignment.value(v)).sum()
    }

    pub fn is_satisfied(&self, assignment: &Assignment) -> bool {
        self.relation.holds(self.lhs(assignment), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MilpError {
    #[error("malformed bounds for '{name}': lower {lower} > upper {upper}")]
    MalformedBounds { name: String, lower: i64, upper: i64 },
    #[error("constraint '{tag}' references a variable not declared in this model")]
    UnknownVariable { tag: String },
    #[error("MILP backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("MILP backend failed: {0}")]
    BackendFailure(String),
    #[error("backend returned an assignment that violates the model after rounding: {0}")]
    RejectedAssignment(String),
}

/// A feasibility-only integer program.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MilpModel {
    variables: Vec<Variable>,
    constraints: Vec<LinearConstraint>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, kind: VarKind, name: impl Into<String>) -> Result<VarRef, MilpError> {
        let name = name.into();
        if let VarKind::Integer { lower, upper } = kind {
            if lower > upper {
                return Err(MilpError::MalformedBounds { name, lower, upper });
            }
        }
        let id = VarRef(self.variables.len() as u32);
        self.variables.push(Variable { kind, name });
        Ok(id)
    }

    pub fn binary(&mut self, name: impl Into<String>) -> VarRef {
        self.add_variable(VarKind::Binary, name).expect("binary bounds are well formed")
    }

    /// Integer variable in `[lower, upper]`; callers guarantee `lower <= upper`.
    pub fn integer(&mut self, lower: i64, upper: i64, name: impl Into<String>) -> VarRef {
        self.add_variable(VarKind::Integer { lower, upper }, name).expect("caller checked bounds")
    }

    pub fn add_constraint(&mut self, constraint: LinearConstraint) -> Result<(), MilpError> {
        if constraint.terms.iter().any(|(_, v)| v.index() >= self.variables.len()) {
            return Err(MilpError::UnknownVariable { tag: constraint.tag });
        }
        self.constraints.push(constraint);
        Ok(())
    }

    /// Adds a constraint built from handles of this model.
    pub fn constrain(&mut self, tag: impl Into<String>, terms: Vec<(i64, VarRef)>, relation: Relation, rhs: i64) {
        self.add_constraint(LinearConstraint::new(tag, terms, relation, rhs))
            .expect("formulation only uses its own handles");
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, var: VarRef) -> &Variable {
        &self.variables[var.index()]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Exact re-evaluation of an assignment: every bound and every constraint.
    pub fn violations(&self, assignment: &Assignment) -> Vec<String> {
        let mut out = Vec::new();
        if assignment.values.len() != self.variables.len() {
            out.push(format!("{} values for {} variables", assignment.values.len(), self.variables.len()));
            return out;
        }
        for (var, &value) in self.variables.iter().zip(&assignment.values) {
            if !var.kind.admits(value) {
                out.push(format!("{} = {value} outside its bounds {:?}", var.name, var.kind));
            }
        }
        for c in &self.constraints {
            let lhs = c.lhs(assignment);
            if !c.relation.holds(lhs, c.rhs) {
                out.push(format!("{}: {lhs} {} {} fails", c.tag, c.relation.symbol(), c.rhs));
            }
        }
        out
    }
}

/// Integer values for every variable of one model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<i64>,
}

impl Assignment {
    pub fn from_values(values: Vec<i64>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, var: VarRef) -> i64 {
        self.values[var.index()]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveLimits {
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { time_limit: Some(Duration::from_secs(60)), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Feasible(Assignment),
    Infeasible,
    BudgetExceeded { diagnostics: String },
}

impl fmt::Display for SolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveOutcome::Feasible(_) => f.write_str("feasible"),
            SolveOutcome::Infeasible => f.write_str("infeasible"),
            SolveOutcome::BudgetExceeded { .. } => f.write_str("budget exceeded"),
        }
    }
}

/// What a backend reports before rounding and verification.
#[derive(Clone, Debug, PartialEq)]
pub enum RawOutcome {
    Feasible(Vec<f64>),
    Infeasible,
    LimitReached(String),
}

/// One solve in progress on some MILP engine.
pub trait BackendSession {
    fn declare_variable(&mut self, kind: VarKind);
    fn declare_constraint(&mut self, terms: &[(i64, usize)], relation: Relation, rhs: i64);
    fn solve(self: Box<Self>, limits: &SolveLimits) -> Result<RawOutcome, MilpError>;
}

pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn open(&self) -> Box<dyn BackendSession>;
}

/// Picks the backend named by [`BACKEND_ENV`], defaulting to HiGHS.
pub fn backend_from_env() -> Result<Box<dyn Backend>, MilpError> {
    match std::env::var(BACKEND_ENV) {
        Err(_) => Ok(Box::new(HighsBackend)),
        Ok(name) => backend_by_name(&name),
    }
}

pub fn backend_by_name(name: &str) -> Result<Box<dyn Backend>, MilpError> {
    match name.trim().to_ascii_lowercase().as_str() {
        "" | "highs" => Ok(Box::new(HighsBackend)),
        other => Err(MilpError::BackendUnavailable(format!("no adapter named '{other}' (available: highs)"))),
    }
}

/// Solves a feasibility model and verifies any returned witness exactly.
pub fn solve_feasibility(
    backend: &dyn Backend,
    model: &MilpModel,
    limits: &SolveLimits,
) -> Result<SolveOutcome, MilpError> {
    let mut session = backend.open();
    for var in &model.variables {
        session.declare_variable(var.kind);
    }
    let mut terms = Vec::new();
    for c in &model.constraints {
        terms.clear();
        terms.extend(c.terms.iter().map(|&(coef, v)| (coef, v.index())));
        session.declare_constraint(&terms, c.relation, c.rhs);
    }
    match session.solve(limits)? {
        RawOutcome::Infeasible => Ok(SolveOutcome::Infeasible),
        RawOutcome::LimitReached(diagnostics) => Ok(SolveOutcome::BudgetExceeded { diagnostics }),
        RawOutcome::Feasible(raw) => {
            let values = raw.iter().map(|x| x.round() as i64).collect();
            let assignment = Assignment::from_values(values);
            let violations = model.violations(&assignment);
            if violations.is_empty() {
                Ok(SolveOutcome::Feasible(assignment))
            } else {
                Err(MilpError::RejectedAssignment(violations.join("; ")))
            }
        }
    }
}
