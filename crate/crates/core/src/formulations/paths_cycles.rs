use super::{add_binary_superposition, add_interior_balance, Cardinality, Formulation, FormulationError, ModelHandles};
use crate::graph::FlowNetwork;
use crate::milp::{MilpModel, Relation};

/// Paths-or-cycles model: each element is one s-t path or one cycle.
///
/// Besides flow balance, every node gets an out-degree bound of one per
/// element; position labels `d` in `[1, n]` must increase along selected
/// edges except into a node flagged as the start of a cycle, and an element
/// may leave `s` or flag a cycle start, not both.
pub fn build_fdpc(
    network: &FlowNetwork,
    k: usize,
    cardinality: Cardinality,
) -> Result<(MilpModel, ModelHandles), FormulationError> {
    if k == 0 {
        return Err(FormulationError::InvalidK);
    }
    let n = network.node_count() as i64;
    let (s, t) = (network.source(), network.sink());
    let mut model = MilpModel::new();
    let mut h = ModelHandles::new(Formulation::PathsOrCycles, cardinality, k);
    add_binary_superposition(&mut model, network, &mut h);

    for i in 0..k {
        let mut cs = Vec::with_capacity(network.node_count());
        for v in 0..network.node_count() {
            let name = format!("c[{v},{}]", i + 1);
            // neither terminal can start a cycle
            cs.push(if v == s || v == t { model.integer(0, 0, name) } else { model.binary(name) });
        }
        h.c.push(cs);
        h.d.push((0..network.node_count()).map(|v| model.integer(1, n, format!("d[{v},{}]", i + 1))).collect());
    }

    for i in 0..k {
        let x = &h.x[i];
        add_interior_balance(&mut model, network, x, i);

        for v in (0..network.node_count()).filter(|&v| !network.out_edges(v).is_empty()) {
            let terms = network.out_edges(v).iter().map(|&e| (1, x[e])).collect();
            model.constrain(format!("outdeg[{v},{}]", i + 1), terms, Relation::Le, 1);
        }

        for (e, edge) in network.edges().iter().enumerate() {
            let (du, dv, cv) = (h.d[i][edge.tail], h.d[i][edge.head], h.c[i][edge.head]);
            // d_v >= d_u + 1 + (n-1)(x - 1 - c_v)
            model.constrain(
                format!("seq[{},{},{}]", edge.tail, edge.head, i + 1),
                vec![(1, dv), (-1, du), (-(n - 1), x[e]), (n - 1, cv)],
                Relation::Ge,
                2 - n,
            );
        }

        let mut couple: Vec<_> = network.out_edges(s).iter().map(|&e| (1, x[e])).collect();
        couple.extend(h.c[i].iter().map(|&c| (1, c)));
        let rel = match cardinality {
            Cardinality::AtMostK => Relation::Le,
            Cardinality::ExactlyK => Relation::Eq,
        };
        model.constrain(format!("one_kind[{}]", i + 1), couple, rel, 1);
    }
    Ok((model, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use crate::milp::{solve_feasibility, HighsBackend, SolveLimits, SolveOutcome};

    fn outcome(net: &FlowNetwork, k: usize, card: Cardinality) -> SolveOutcome {
        let (model, _) = build_fdpc(net, k, card).unwrap();
        solve_feasibility(&HighsBackend, &model, &SolveLimits::default()).unwrap()
    }

    #[test]
    fn fig2_counts_at_k2() {
        let net = fixtures::fig2();
        let (model, h) = build_fdpc(&net, 2, Cardinality::AtMostK).unwrap();
        let count = |rows: &Vec<Vec<_>>| rows.iter().map(Vec::len).sum::<usize>();
        assert_eq!((count(&h.x), count(&h.pi), h.w.len(), count(&h.c), count(&h.d)), (10, 10, 2, 10, 10));
        assert_eq!(model.num_variables(), 2 * (2 * 5 + 2 * 5 + 1));
        assert_eq!(model.num_constraints(), 5 + 2 * (2 * 5 - 2 + 4 * 5));
    }

    #[test]
    fn fig2_needs_two() {
        let net = fixtures::fig2();
        assert_eq!(outcome(&net, 1, Cardinality::AtMostK), SolveOutcome::Infeasible);
        assert!(matches!(outcome(&net, 2, Cardinality::AtMostK), SolveOutcome::Feasible(_)));
        assert!(matches!(outcome(&net, 2, Cardinality::ExactlyK), SolveOutcome::Feasible(_)));
    }

    #[test]
    fn three_unit_paths_through_a_hub() {
        // s->{2,3,4}, all reaching t=5 through node 3
        let edges = [(0, 2, 1), (0, 3, 1), (0, 4, 1), (1, 5, 1), (2, 3, 1), (3, 1, 1), (3, 5, 2), (4, 3, 1)];
        let net = FlowNetwork::new("hub", 6, edges.iter().map(|&(u, v, f)| crate::graph::Edge::new(u, v, f)).collect())
            .unwrap();
        assert_eq!(outcome(&net, 2, Cardinality::AtMostK), SolveOutcome::Infeasible);
        assert!(matches!(outcome(&net, 3, Cardinality::AtMostK), SolveOutcome::Feasible(_)));
    }

    #[test]
    fn single_edge_weight() {
        let net = FlowNetwork::new("one", 2, vec![crate::graph::Edge::new(0, 1, 7)]).unwrap();
        let (model, h) = build_fdpc(&net, 1, Cardinality::ExactlyK).unwrap();
        match solve_feasibility(&HighsBackend, &model, &SolveLimits::default()).unwrap() {
            SolveOutcome::Feasible(a) => assert_eq!(a.value(h.w[0]), 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_k_rejected() {
        assert_eq!(build_fdpc(&fixtures::fig2(), 0, Cardinality::AtMostK).unwrap_err(), FormulationError::InvalidK);
    }
}
