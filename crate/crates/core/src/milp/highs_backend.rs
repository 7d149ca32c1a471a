use std::num::NonZeroU32;

use highs::{Col, HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};

use super::{Backend, BackendSession, MilpError, RawOutcome, Relation, SolveLimits, VarKind};

/// Bit of the aggregator rule in HiGHS's `presolve_rule_off` mask.
const PRESOLVE_AGGREGATOR: i32 = 1 << 12;

/// Adapter for the HiGHS MIP solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct HighsBackend;

impl Backend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn open(&self) -> Box<dyn BackendSession> {
        Box::new(HighsSession { problem: RowProblem::default(), cols: Vec::new(), kinds: Vec::new() })
    }
}

struct HighsSession {
    problem: RowProblem,
    cols: Vec<Col>,
    kinds: Vec<VarKind>,
}

impl BackendSession for HighsSession {
    fn declare_variable(&mut self, kind: VarKind) {
        let col = match kind {
            VarKind::Binary => self.problem.add_integer_column(0.0, 0.0..=1.0),
            VarKind::Integer { lower, upper } => self.problem.add_integer_column(0.0, lower as f64..=upper as f64),
            VarKind::FreeInteger => self.problem.add_integer_column::<f64, _>(0.0, ..),
        };
        self.cols.push(col);
        self.kinds.push(kind);
    }

    fn declare_constraint(&mut self, terms: &[(i64, usize)], relation: Relation, rhs: i64) {
        let row: Vec<(Col, f64)> = terms.iter().map(|&(c, v)| (self.cols[v], c as f64)).collect();
        let rhs = rhs as f64;
        match relation {
            Relation::Le => self.problem.add_row(..=rhs, row),
            Relation::Eq => self.problem.add_row(rhs..=rhs, row),
            Relation::Ge => self.problem.add_row(rhs.., row),
        }
    }

    fn solve(self: Box<Self>, limits: &SolveLimits) -> Result<RawOutcome, MilpError> {
        let HighsSession { problem, kinds, .. } = *self;
        if kinds.is_empty() {
            return Ok(RawOutcome::Feasible(Vec::new()));
        }
        let mut model = problem.optimise(Sense::Minimise);
        model.make_quiet();
        model.set_threads(NonZeroU32::new(1).expect("nonzero"));
        model.set_option("random_seed", (limits.seed % i32::MAX as u64) as i32);
        // the presolve aggregator reports some feasible paths-or-cycles
        // models infeasible; the other rules are kept
        model.set_option("presolve_rule_off", PRESOLVE_AGGREGATOR);
        if let Some(limit) = limits.time_limit {
            model.set_option("time_limit", limit.as_secs_f64().max(1e-3));
        }
        let solved =
            model.try_solve().map_err(|status| MilpError::BackendFailure(format!("HiGHS run returned {status:?}")))?;
        let status = solved.status();
        match status {
            HighsModelStatus::Optimal => Ok(RawOutcome::Feasible(solved.get_solution().columns().to_vec())),
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => Ok(RawOutcome::Infeasible),
            HighsModelStatus::ModelEmpty => Ok(RawOutcome::Feasible(kinds.iter().map(|k| resting_value(*k)).collect())),
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit => {
                if solved.primal_solution_status() == HighsSolutionStatus::Feasible {
                    Ok(RawOutcome::Feasible(solved.get_solution().columns().to_vec()))
                } else {
                    Ok(RawOutcome::LimitReached(format!("HiGHS stopped with {status:?}")))
                }
            }
            other => Err(MilpError::BackendFailure(format!("HiGHS model status {other:?}"))),
        }
    }
}

/// A value inside the bounds, used when HiGHS reports an empty model.
fn resting_value(kind: VarKind) -> f64 {
    match kind.bounds() {
        (Some(lo), _) => lo as f64,
        (None, Some(hi)) => hi.min(0) as f64,
        (None, None) => 0.0,
    }
}
