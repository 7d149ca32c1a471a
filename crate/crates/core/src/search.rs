//! Outer minimization over `k` and the constraint-generation loop for the
//! trail model.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::formulations::{
    build_model, check_identities, extract_decomposition, Decomposition, ExtractError, Formulation, FormulationError,
    ModelHandles, VariantSpec,
};
use crate::graph::{check_walk_connectivity, violating_components, Component, EdgeId, EdgeSelection, FlowNetwork};
use crate::milp::{solve_feasibility, Assignment, Backend, MilpError, SolveLimits, SolveOutcome};
use crate::verify::verify_decomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    Linear,
    #[default]
    Doubling,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Linear => "linear",
            Strategy::Doubling => "doubling",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Strategy::Linear),
            "doubling" => Ok(Strategy::Doubling),
            other => Err(format!("unknown strategy '{other}' (expected linear or doubling)")),
        }
    }
}

/// Wall-clock limits. `None` means unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub per_probe: Option<Duration>,
    pub total: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { per_probe: Some(Duration::from_secs(60)), total: Some(Duration::from_secs(600)) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: Budget,
    pub seed: u64,
    /// Maximum number of solve rounds of one constraint-generation run.
    pub cg_iteration_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: Budget::default(), seed: 0, cg_iteration_cap: 1000 }
    }
}

/// A component added during constraint generation, with the element
/// selection that exhibited it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddedComponent {
    pub round: usize,
    /// 1-based element index.
    pub element: usize,
    pub selection: EdgeSelection,
    pub component: Component,
}

/// A verified solver witness at some `k`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub decomposition: Decomposition,
    pub assignment: Assignment,
    pub handles: ModelHandles,
}

#[derive(Clone, Debug)]
pub enum FixedKOutcome {
    Feasible(Box<Witness>),
    Infeasible,
    BudgetExceeded { diagnostics: String },
}

#[derive(Clone, Debug)]
pub struct FixedKRun {
    pub k: usize,
    pub outcome: FixedKOutcome,
    /// Solver calls made (1 unless constraint generation iterated).
    pub rounds: usize,
    pub added: Vec<AddedComponent>,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
    BudgetExceeded,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Probe {
    pub k: usize,
    pub verdict: Verdict,
    pub elapsed: Duration,
    pub rounds: usize,
    pub added: Vec<AddedComponent>,
    pub witness: Option<Box<Witness>>,
}

impl Probe {
    /// Number of components added by constraint generation in this probe.
    pub fn cg_iterations(&self) -> usize {
        self.added.len()
    }
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Found {
        k_star: usize,
        decomposition: Decomposition,
    },
    /// No decomposition with at most `m` elements.
    InfeasibleUpToM,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub variant: VariantSpec,
    pub strategy: Strategy,
    pub probes: Vec<Probe>,
    /// `None` only in the partial report of an aborted search.
    pub result: Option<SearchResult>,
    pub total_time: Duration,
}

impl SearchReport {
    pub fn k_star(&self) -> Option<usize> {
        match &self.result {
            Some(SearchResult::Found { k_star, .. }) => Some(*k_star),
            _ => None,
        }
    }

    pub fn probed_ks(&self) -> Vec<usize> {
        self.probes.iter().map(|p| p.k).collect()
    }

    /// The witness recorded at `k_star`.
    pub fn witness(&self) -> Option<&Witness> {
        let k = self.k_star()?;
        self.probes.iter().rev().find(|p| p.k == k).and_then(|p| p.witness.as_deref())
    }

    pub fn total_cg_iterations(&self) -> usize {
        self.probes.iter().map(Probe::cg_iterations).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("k = {k} outside [1, {m}]")]
    KOutOfRange { k: usize, m: usize },
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Milp(#[from] MilpError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("solver witness failed verification: {}", .0.join("; "))]
    Unsound(Vec<String>),
    #[error("constraint generation produced component with edges {edges:?} a second time")]
    RepeatedComponent { edges: Vec<EdgeId> },
    #[error("constraint generation hit the iteration cap of {cap}")]
    IterationCap { cap: usize },
    #[error("budget exhausted after {} probes", .0.probes.len())]
    BudgetExhausted(Box<SearchReport>),
}

fn remaining(deadline: Option<Instant>) -> Option<Duration> {
    deadline.map(|d| d.saturating_duration_since(Instant::now()))
}

fn selection_of(handles: &ModelHandles, a: &Assignment, i: usize) -> EdgeSelection {
    EdgeSelection::from_multiplicities(handles.x[i].iter().map(|&x| a.value(x).max(0) as u64).collect())
}

fn finish_witness(
    network: &FlowNetwork,
    k: usize,
    variant: VariantSpec,
    assignment: Assignment,
    handles: ModelHandles,
) -> Result<Box<Witness>, SearchError> {
    let mut problems = check_identities(network, &handles, &assignment);
    let decomposition = extract_decomposition(&assignment, &handles, network)?;
    if let Err(violations) = verify_decomposition(network, &decomposition, variant.problem(), Some(k)) {
        problems.extend(violations.iter().map(ToString::to_string));
    }
    if !problems.is_empty() {
        return Err(SearchError::Unsound(problems));
    }
    Ok(Box::new(Witness { decomposition, assignment, handles }))
}

/// Decides whether a decomposition with the variant's cardinality exists at
/// this `k`. `time_limit` bounds the whole call, including every
/// constraint-generation round.
pub fn solve_fixed_k(
    backend: &dyn Backend,
    network: &FlowNetwork,
    k: usize,
    variant: VariantSpec,
    time_limit: Option<Duration>,
    options: &SearchOptions,
) -> Result<FixedKRun, SearchError> {
    let m = network.edge_count();
    if k == 0 || k > m {
        return Err(SearchError::KOutOfRange { k, m });
    }
    let start = Instant::now();
    let deadline = time_limit.map(|t| start + t);
    let mut components: Vec<Component> = Vec::new();
    let mut keys: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut added = Vec::new();
    let mut rounds = 0;
    loop {
        if rounds >= options.cg_iteration_cap {
            return Err(SearchError::IterationCap { cap: options.cg_iteration_cap });
        }
        rounds += 1;
        let (model, handles) = build_model(network, k, variant, &components)?;
        let limits = SolveLimits { time_limit: remaining(deadline), seed: options.seed };
        let run = |outcome| FixedKRun { k, outcome, rounds, added: Vec::new(), elapsed: start.elapsed() };
        let assignment = match solve_feasibility(backend, &model, &limits)? {
            SolveOutcome::Infeasible => return Ok(FixedKRun { added, ..run(FixedKOutcome::Infeasible) }),
            SolveOutcome::BudgetExceeded { diagnostics } => {
                return Ok(FixedKRun { added, ..run(FixedKOutcome::BudgetExceeded { diagnostics }) })
            }
            SolveOutcome::Feasible(a) => a,
        };
        if variant.formulation != Formulation::TrailsCg {
            let witness = finish_witness(network, k, variant, assignment, handles)?;
            return Ok(run(FixedKOutcome::Feasible(witness)));
        }

        let mut fresh = Vec::new();
        for i in 0..k {
            let selection = selection_of(&handles, &assignment, i);
            let cert = check_walk_connectivity(network, &selection)
                .map_err(|e| SearchError::Unsound(vec![format!("element {}: {e}", i + 1)]))?;
            if cert.is_ok() {
                continue;
            }
            let mut found = violating_components(network, &selection)
                .map_err(|e| SearchError::Unsound(vec![format!("element {}: {e}", i + 1)]))?;
            if found.is_empty() {
                if let crate::graph::SccCertificate::Violating(c) = cert {
                    found.push(c);
                }
            }
            for component in found {
                if keys.contains(&component.edges) {
                    if fresh.iter().any(|a: &AddedComponent| a.component.edges == component.edges) {
                        continue;
                    }
                    return Err(SearchError::RepeatedComponent { edges: component.edges });
                }
                keys.insert(component.edges.clone());
                fresh.push(AddedComponent { round: rounds, element: i + 1, selection: selection.clone(), component });
            }
        }
        if fresh.is_empty() {
            let witness = finish_witness(network, k, variant, assignment, handles)?;
            return Ok(FixedKRun { added, ..run(FixedKOutcome::Feasible(witness)) });
        }
        components.extend(fresh.iter().map(|a| a.component.clone()));
        added.extend(fresh);
        if remaining(deadline) == Some(Duration::ZERO) {
            let diagnostics = format!("time limit reached after {rounds} constraint-generation rounds");
            return Ok(FixedKRun { added, ..run(FixedKOutcome::BudgetExceeded { diagnostics }) });
        }
    }
}

struct Searcher<'a> {
    backend: &'a dyn Backend,
    network: &'a FlowNetwork,
    variant: VariantSpec,
    options: &'a SearchOptions,
    deadline: Option<Instant>,
    report: SearchReport,
    started: Instant,
}

impl Searcher<'_> {
    /// Probes `k`; `Ok(true)` when feasible.
    fn probe(&mut self, k: usize) -> Result<bool, SearchError> {
        let left = remaining(self.deadline);
        if left == Some(Duration::ZERO) {
            return Err(self.abort());
        }
        let limit = match (self.options.budget.per_probe, left) {
            (Some(p), Some(l)) => Some(p.min(l)),
            (p, l) => p.or(l),
        };
        let run = solve_fixed_k(self.backend, self.network, k, self.variant, limit, self.options)?;
        let (verdict, witness) = match run.outcome {
            FixedKOutcome::Feasible(w) => (Verdict::Feasible, Some(w)),
            FixedKOutcome::Infeasible => (Verdict::Infeasible, None),
            FixedKOutcome::BudgetExceeded { .. } => (Verdict::BudgetExceeded, None),
        };
        self.report.probes.push(Probe {
            k,
            verdict,
            elapsed: run.elapsed,
            rounds: run.rounds,
            added: run.added,
            witness,
        });
        match verdict {
            Verdict::Feasible => Ok(true),
            Verdict::Infeasible => Ok(false),
            Verdict::BudgetExceeded => Err(self.abort()),
        }
    }

    fn abort(&mut self) -> SearchError {
        let mut partial = self.snapshot();
        partial.result = None;
        SearchError::BudgetExhausted(Box::new(partial))
    }

    fn snapshot(&self) -> SearchReport {
        SearchReport { total_time: self.started.elapsed(), ..self.report.clone() }
    }

    fn found(mut self, k_star: usize) -> SearchReport {
        let decomposition = self
            .report
            .probes
            .iter()
            .rev()
            .find(|p| p.k == k_star)
            .and_then(|p| p.witness.as_ref())
            .map(|w| w.decomposition.clone())
            .expect("feasible probe carries a witness");
        self.report.result = Some(SearchResult::Found { k_star, decomposition });
        self.snapshot()
    }

    fn infeasible(mut self) -> SearchReport {
        self.report.result = Some(SearchResult::InfeasibleUpToM);
        self.snapshot()
    }
}

/// Finds the smallest feasible `k` in `[1, m]`, relying on feasibility
/// being monotone in `k`.
pub fn min_k(
    backend: &dyn Backend,
    network: &FlowNetwork,
    variant: VariantSpec,
    strategy: Strategy,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let m = network.edge_count();
    let mut s = Searcher {
        backend,
        network,
        variant,
        options,
        deadline: options.budget.total.map(|t| started + t),
        report: SearchReport { variant, strategy, probes: Vec::new(), result: None, total_time: Duration::ZERO },
        started,
    };
    match strategy {
        Strategy::Linear => {
            for k in 1..=m {
                if s.probe(k)? {
                    return Ok(s.found(k));
                }
            }
            Ok(s.infeasible())
        }
        Strategy::Doubling => {
            let mut lo = 0;
            let mut k = 1;
            let hi = loop {
                if s.probe(k)? {
                    break k;
                }
                if k == m {
                    return Ok(s.infeasible());
                }
                lo = k;
                k = (2 * k).min(m);
            };
            // feasible at hi, infeasible at lo
            let mut hi = hi;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if s.probe(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(s.found(hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::ElementKind;
    use crate::graph::fixtures;
    use crate::milp::HighsBackend;

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn fig2_fixed_k() {
        let net = fixtures::fig2();
        let pc = solve_fixed_k(&HighsBackend, &net, 2, VariantSpec::at_most(Formulation::PathsOrCycles), None, &opts())
            .unwrap();
        match pc.outcome {
            FixedKOutcome::Feasible(w) => assert_eq!(w.decomposition.size(), 2),
            other => panic!("{other:?}"),
        }
        let cg =
            solve_fixed_k(&HighsBackend, &net, 5, VariantSpec::at_most(Formulation::TrailsCg), None, &opts()).unwrap();
        assert!(matches!(cg.outcome, FixedKOutcome::Infeasible));
        let walk =
            solve_fixed_k(&HighsBackend, &net, 1, VariantSpec::at_most(Formulation::Walks), None, &opts()).unwrap();
        match walk.outcome {
            FixedKOutcome::Feasible(w) => {
                assert_eq!(w.decomposition.elements.len(), 1);
                assert_eq!(w.decomposition.elements[0].kind, ElementKind::Walk);
                assert_eq!(w.decomposition.elements[0].weight, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fig2_min_k() {
        let net = fixtures::fig2();
        for strategy in [Strategy::Linear, Strategy::Doubling] {
            let walks =
                min_k(&HighsBackend, &net, VariantSpec::at_most(Formulation::Walks), strategy, &opts()).unwrap();
            assert_eq!(walks.k_star(), Some(1));
            assert_eq!(walks.probed_ks(), vec![1]);
        }
        let trails =
            min_k(&HighsBackend, &net, VariantSpec::at_most(Formulation::TrailsCg), Strategy::Linear, &opts()).unwrap();
        assert!(matches!(trails.result, Some(SearchResult::InfeasibleUpToM)));
        assert_eq!(trails.probed_ks(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn doubling_schedule_for_five() {
        let net = fixtures::five_routes();
        let r =
            min_k(&HighsBackend, &net, VariantSpec::at_most(Formulation::Walks), Strategy::Doubling, &opts()).unwrap();
        assert_eq!(r.k_star(), Some(5));
        assert_eq!(r.probed_ks(), vec![1, 2, 4, 8, 6, 5]);
    }

    #[test]
    fn k_range_checked() {
        let net = fixtures::fig2();
        let v = VariantSpec::at_most(Formulation::Walks);
        assert!(matches!(
            solve_fixed_k(&HighsBackend, &net, 0, v, None, &opts()),
            Err(SearchError::KOutOfRange { .. })
        ));
        assert!(matches!(
            solve_fixed_k(&HighsBackend, &net, 6, v, None, &opts()),
            Err(SearchError::KOutOfRange { .. })
        ));
    }

    #[test]
    fn side_cycle_generates_components() {
        let net = fixtures::path_with_side_cycle();
        let run =
            solve_fixed_k(&HighsBackend, &net, 1, VariantSpec::at_most(Formulation::TrailsCg), None, &opts()).unwrap();
        assert!(matches!(run.outcome, FixedKOutcome::Feasible(_)));
        let mut seen = HashSet::new();
        for a in &run.added {
            assert!(seen.insert(a.component.edges.clone()));
        }
    }
}
