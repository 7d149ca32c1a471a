use std::time::Instant;

use anyhow::{bail, Context};
use mfd::milp::{Backend, MilpError};
use mfd::search::{FixedKOutcome, SearchError, SearchOptions, SearchResult, Strategy};
use mfd::{min_k, solve_fixed_k, verify_decomposition, Decomposition, FlowNetwork, Formulation, VariantSpec};

use crate::input::{backend, parallel_map, read_instances, search_options};
use crate::record::{InstanceRecord, KStar, ProbeRecord, ResultFile};
use crate::{DecomposeArgs, EXIT_BACKEND, EXIT_ERROR, EXIT_INFEASIBLE};

/// What to solve for one instance.
#[derive(Clone, Copy, Debug)]
pub struct Task {
    pub formulation: Formulation,
    pub strategy: Strategy,
    /// Fixed-k mode with `exactly_k` cardinality.
    pub exactly_k: Option<usize>,
}

/// A solved (or failed) instance; `backend_missing` marks records whose
/// error came from the MILP adapter itself.
pub struct Solved {
    pub record: InstanceRecord,
    pub backend_missing: bool,
}

pub fn run(args: &DecomposeArgs) -> anyhow::Result<u8> {
    let backend = match backend() {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return Ok(EXIT_BACKEND);
        }
    };
    if args.exactly_k == Some(0) {
        bail!("--exactly-k must be at least 1");
    }
    let instances = read_instances(&args.input)?;
    if instances.is_empty() {
        bail!("{} holds no instances", args.input.display());
    }
    let options = search_options(&args.solve);
    let task = Task { formulation: args.variant, strategy: args.solve.strategy, exactly_k: args.exactly_k };
    let solved = parallel_map(&instances, args.solve.jobs, |inst| match &inst.network {
        Ok(net) => solve_instance(backend.as_ref(), net, task, &options),
        Err(msg) => Solved { record: error_record(&inst.name, task, msg.clone()), backend_missing: false },
    });

    for s in &solved {
        let r = &s.record;
        match &r.error {
            Some(e) => eprintln!("{}: {}: {e}", r.name, r.status),
            None => eprintln!("{}: {} k*={}", r.name, r.status, describe_k(r.k_star.as_ref())),
        }
    }
    let code = if solved.iter().any(|s| s.backend_missing) {
        EXIT_BACKEND
    } else if solved.iter().any(|s| s.record.status == "error" || s.record.status == "budget_exceeded") {
        EXIT_ERROR
    } else if args.fail_on_infeasible && solved.iter().any(|s| s.record.status == "infeasible") {
        EXIT_INFEASIBLE
    } else {
        0
    };
    let file = ResultFile::new(solved.into_iter().map(|s| s.record).collect());
    let text = serde_json::to_string_pretty(&file)? + "\n";
    match &args.json {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn describe_k(k: Option<&KStar>) -> String {
    match k {
        Some(KStar::Value(k)) => k.to_string(),
        Some(KStar::Label(l)) => l.clone(),
        None => "?".into(),
    }
}

fn mode(task: Task) -> &'static str {
    if task.exactly_k.is_some() {
        "exactly_k"
    } else {
        "min"
    }
}

pub fn error_record(name: &str, task: Task, message: String) -> InstanceRecord {
    let mut rec = InstanceRecord::blank(name, task.formulation.flag(), mode(task));
    rec.k = task.exactly_k;
    rec.status = "error".into();
    rec.error = Some(message);
    rec
}

fn fail(mut rec: InstanceRecord, err: &SearchError) -> Solved {
    let backend_missing = matches!(err, SearchError::Milp(MilpError::BackendUnavailable(_)));
    rec.status = "error".into();
    rec.error = Some(err.to_string());
    Solved { record: rec, backend_missing }
}

/// Re-checks a witness before it is written out.
fn accept(rec: &mut InstanceRecord, network: &FlowNetwork, dec: &Decomposition, k: usize) {
    match verify_decomposition(network, dec, dec.problem, Some(k)) {
        Ok(()) => rec.set_elements(dec),
        Err(violations) => {
            rec.status = "error".into();
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            rec.error = Some(format!("witness failed verification: {}", text.join("; ")));
        }
    }
}

pub fn solve_instance(backend: &dyn Backend, network: &FlowNetwork, task: Task, options: &SearchOptions) -> Solved {
    let started = Instant::now();
    let mut rec = InstanceRecord::blank(network.name(), task.formulation.flag(), mode(task));
    rec.k = task.exactly_k;
    if let Some(k) = task.exactly_k {
        let variant = VariantSpec::exactly(task.formulation);
        let limit = match (options.budget.per_probe, options.budget.total) {
            (Some(p), Some(t)) => Some(p.min(t)),
            (p, t) => p.or(t),
        };
        let run = match solve_fixed_k(backend, network, k, variant, limit, options) {
            Ok(run) => run,
            Err(e) => return fail(rec, &e),
        };
        rec.probes.push(ProbeRecord {
            k,
            verdict: match &run.outcome {
                FixedKOutcome::Feasible(_) => "feasible",
                FixedKOutcome::Infeasible => "infeasible",
                FixedKOutcome::BudgetExceeded { .. } => "budget_exceeded",
            }
            .into(),
            seconds: run.elapsed.as_secs_f64(),
            cg_iterations: run.added.len(),
            rounds: run.rounds,
        });
        match run.outcome {
            FixedKOutcome::Feasible(w) => {
                rec.status = "feasible".into();
                rec.k_star = Some(KStar::Value(k));
                accept(&mut rec, network, &w.decomposition, k);
            }
            FixedKOutcome::Infeasible => {
                rec.status = "infeasible".into();
                rec.k_star = Some(KStar::infeasible());
            }
            FixedKOutcome::BudgetExceeded { diagnostics } => {
                rec.status = "budget_exceeded".into();
                rec.error = Some(diagnostics);
            }
        }
    } else {
        let variant = VariantSpec::at_most(task.formulation);
        match min_k(backend, network, variant, task.strategy, options) {
            Ok(report) => {
                rec.probes = report.probes.iter().map(ProbeRecord::from).collect();
                match &report.result {
                    Some(SearchResult::Found { k_star, decomposition }) => {
                        rec.status = "feasible".into();
                        rec.k_star = Some(KStar::Value(*k_star));
                        accept(&mut rec, network, decomposition, *k_star);
                    }
                    Some(SearchResult::InfeasibleUpToM) => {
                        rec.status = "infeasible".into();
                        rec.k_star = Some(KStar::infeasible());
                    }
                    None => unreachable!("completed searches carry a result"),
                }
            }
            Err(SearchError::BudgetExhausted(partial)) => {
                rec.probes = partial.probes.iter().map(ProbeRecord::from).collect();
                rec.status = "budget_exceeded".into();
                rec.error = Some(format!("time budget exhausted after {} probes", partial.probes.len()));
            }
            Err(e) => return fail(rec, &e),
        }
    }
    rec.timings.total_seconds = started.elapsed().as_secs_f64();
    Solved { record: rec, backend_missing: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mfd::graph::fixtures;
    use mfd::milp::HighsBackend;

    fn task(formulation: Formulation) -> Task {
        Task { formulation, strategy: Strategy::Doubling, exactly_k: None }
    }

    #[test]
    fn fig2_records() {
        let net = fixtures::fig2();
        let opts = SearchOptions::default();
        let walk = solve_instance(&HighsBackend, &net, task(Formulation::Walks), &opts).record;
        assert_eq!(walk.k_star, Some(KStar::Value(1)));
        assert_eq!(walk.elements.len(), 1);
        assert_eq!(walk.elements[0].weight, 1);
        let cg = solve_instance(&HighsBackend, &net, task(Formulation::TrailsCg), &opts).record;
        assert_eq!(cg.status, "infeasible");
        assert_eq!(cg.k_star, Some(KStar::infeasible()));
        let pc = solve_instance(&HighsBackend, &net, task(Formulation::PathsOrCycles), &opts).record;
        assert_eq!(pc.k_star, Some(KStar::Value(2)));
    }

    #[test]
    fn exactly_k_mode() {
        let net = fixtures::fig2();
        let opts = SearchOptions::default();
        let t = Task { exactly_k: Some(1), ..task(Formulation::Walks) };
        let rec = solve_instance(&HighsBackend, &net, t, &opts).record;
        assert_eq!(rec.mode, "exactly_k");
        assert_eq!(rec.cardinality, "exactly_k");
        assert_eq!(rec.status, "feasible");
        assert_eq!(rec.elements.len(), 1);
        // every element must leave s over (s,a), which carries one unit
        let t = Task { exactly_k: Some(2), ..t };
        assert_eq!(solve_instance(&HighsBackend, &net, t, &opts).record.status, "infeasible");
        let t = Task { exactly_k: Some(9), ..t };
        assert_eq!(solve_instance(&HighsBackend, &net, t, &opts).record.status, "error");
    }
}
