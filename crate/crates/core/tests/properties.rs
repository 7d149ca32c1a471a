use std::collections::VecDeque;

use mfd::graph::{
    check_walk_connectivity, generate_instance, generate_instance_with, parse_graph_file, reachable_from,
    serialize_graph_file, strongly_connected_components, violating_components, EdgeSelection, GeneratorConfig,
};
use mfd::milp::HighsBackend;
use mfd::search::{FixedKOutcome, SearchOptions, Strategy};
use mfd::verify::greedy_width_baseline;
use mfd::*;
use proptest::prelude::*;

fn problem() -> impl prop::strategy::Strategy<Value = ProblemKind> {
    prop::sample::select(ProblemKind::ALL.to_vec())
}

fn small_config() -> GeneratorConfig {
    GeneratorConfig { max_weight: 3, ..GeneratorConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn graph_file_round_trip(n in 2usize..12, k in 1usize..5, p in problem(), seed in any::<u64>()) {
        let inst = generate_instance(n, k, p, seed).unwrap();
        let text = serialize_graph_file([&inst.network]);
        let back = parse_graph_file(&text).unwrap();
        prop_assert_eq!(back, vec![inst.network]);
    }

    #[test]
    fn generated_instances_are_valid(n in 2usize..14, k in 1usize..6, p in problem(), seed in any::<u64>()) {
        let inst = generate_instance(n, k, p, seed).unwrap();
        prop_assert!(inst.network.validate().is_empty());
        prop_assert_eq!(inst.decomposition.size(), k);
        prop_assert_eq!(verify_decomposition(&inst.network, &inst.decomposition, p, Some(k)), Ok(()));
    }

    #[test]
    fn scc_partition_matches_mutual_reachability(
        n in 1usize..9,
        raw in prop::collection::vec((0usize..9, 0usize..9), 0..20),
    ) {
        let arcs: Vec<(usize, usize)> = raw.into_iter().filter(|&(u, v)| u < n && v < n).collect();
        let nodes: Vec<usize> = (0..n).collect();
        let comps = strongly_connected_components(&nodes, &arcs);
        let mut comp_of = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                prop_assert_eq!(comp_of[v], usize::MAX, "node in two components");
                comp_of[v] = i;
            }
        }
        prop_assert!(comp_of.iter().all(|&c| c != usize::MAX));
        let reach: Vec<Vec<bool>> = (0..n).map(|s| bfs(n, &arcs, s)).collect();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(comp_of[u] == comp_of[v], reach[u][v] && reach[v][u]);
            }
        }
    }

    #[test]
    fn connectivity_check_agrees_with_bfs(
        n in 4usize..10,
        k in 2usize..5,
        seed in any::<u64>(),
        mask in any::<u32>(),
    ) {
        // a path plus any subset of cycles is a balanced selection
        let inst = generate_instance(n, k, ProblemKind::PathsOrCycles, seed).unwrap();
        let net = &inst.network;
        let mut sel = vec![0u64; net.edge_count()];
        for (i, el) in inst.decomposition.elements.iter().enumerate() {
            if i == 0 || (el.kind == ElementKind::Cycle && mask & (1 << i) != 0) {
                for (slot, &x) in sel.iter_mut().zip(el.multiplicity.as_slice()) {
                    *slot += x;
                }
            }
        }
        let sel = EdgeSelection::from_multiplicities(sel);
        let reach = reachable_from(net, &sel, net.source());
        let connected = sel.selected_edges().all(|e| reach[net.edge(e).tail]);
        prop_assert_eq!(check_walk_connectivity(net, &sel).unwrap().is_ok(), connected);
        prop_assert_eq!(violating_components(net, &sel).unwrap().is_empty(), connected);
    }

    #[test]
    fn oracle_bounded_by_planted_size(n in 3usize..7, k in 1usize..4, p in problem(), seed in any::<u64>()) {
        let inst = generate_instance_with(&small_config(), n, k, p, seed).unwrap();
        let limits = OracleLimits::default();
        prop_assume!(limits.admits(&inst.network));
        match brute_force_min(&inst.network, p, &limits) {
            OracleResult::Min(found) => prop_assert!(found <= k),
            other => prop_assert!(false, "oracle returned {other:?} for a planted decomposition"),
        }
        if let OracleResult::Min(trails) = brute_force_min(&inst.network, ProblemKind::Trails, &limits) {
            let OracleResult::Min(walks) = brute_force_min(&inst.network, ProblemKind::Walks, &limits) else {
                return Err(TestCaseError::fail("walks infeasible"));
            };
            prop_assert!(walks <= trails);
        }
    }

    #[test]
    fn greedy_verifies_and_is_no_better_than_minimum(n in 2usize..7, k in 1usize..4, p in problem(), seed in any::<u64>()) {
        let inst = generate_instance_with(&small_config(), n, k, p, seed).unwrap();
        let dec = greedy_width_baseline(&inst.network);
        prop_assert_eq!(verify_decomposition(&inst.network, &dec, ProblemKind::Walks, None), Ok(()));
        if let OracleResult::Min(min) = brute_force_min(&inst.network, ProblemKind::Walks, &OracleLimits::default()) {
            prop_assert!(dec.size() >= min);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn solver_witnesses_verify_and_feasibility_is_monotone(
        n in 3usize..7,
        k in 1usize..4,
        p in problem(),
        seed in any::<u64>(),
    ) {
        let inst = generate_instance_with(&small_config(), n, k, p, seed).unwrap();
        let net = &inst.network;
        // beyond the oracle limits, trail infeasibility proofs get slow
        prop_assume!(OracleLimits::default().admits(net));
        let opts = SearchOptions::default();
        // proofs of trail infeasibility near k = m can take minutes
        let trails_feasible = matches!(brute_force_min(net, ProblemKind::Trails, &OracleLimits::default()), OracleResult::Min(_));
        for f in Formulation::ALL {
            if f.problem() == ProblemKind::Trails && !trails_feasible {
                continue;
            }
            let report = min_k(&HighsBackend, net, VariantSpec::at_most(f), Strategy::Doubling, &opts).unwrap();
            if f.problem() == p {
                prop_assert!(report.k_star().is_some_and(|found| found <= k), "{f}: planted size {k} missed");
            }
            let Some(k_star) = report.k_star() else { continue };
            let dec = &report.witness().unwrap().decomposition;
            prop_assert_eq!(verify_decomposition(net, dec, f.problem(), Some(k_star)), Ok(()));
            if k_star < net.edge_count() {
                let run = solve_fixed_k(&HighsBackend, net, k_star + 1, VariantSpec::at_most(f), None, &opts).unwrap();
                prop_assert!(matches!(run.outcome, FixedKOutcome::Feasible(_)), "{f}: k*+1 infeasible");
            }
        }
    }
}

fn bfs(n: usize, arcs: &[(usize, usize)], start: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in arcs {
            if a == u && !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen
}
