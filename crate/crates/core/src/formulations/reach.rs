use super::{
    add_binary_superposition, add_interior_balance, add_terminal_rows, edge_label, weight_cap, Cardinality,
    Formulation, FormulationError, ModelHandles,
};
use crate::graph::FlowNetwork;
use crate::milp::{MilpModel, Relation, VarRef};

/// How edge usage is counted in the reachability model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XMode {
    /// `x` in {0, 1}: trails.
    Binary,
    /// `x` in [0, f_uv]: walks.
    Integer,
}

/// Number of bits used to expand a weight bounded by `cap`.
pub(crate) fn bit_count(cap: u64) -> usize {
    (u64::BITS - cap.max(1).leading_zeros()) as usize
}

/// Reachability model for trails (binary `x`) or walks (integer `x`).
///
/// Each selected node other than `s` picks one selected in-edge `y` whose
/// tail has a strictly smaller label `d`; unselected nodes get label 0.
/// The product `y * (d_v - d_u)` is `phi`, linearized with bound `n`.
/// In integer mode the weight is expanded into bits `zeta` and the flow
/// rows use `phi4 = x * zeta` with bound `f_uv`.
pub fn build_walk_reach(
    network: &FlowNetwork,
    k: usize,
    mode: XMode,
    cardinality: Cardinality,
) -> Result<(MilpModel, ModelHandles), FormulationError> {
    if k == 0 {
        return Err(FormulationError::InvalidK);
    }
    let formulation = match mode {
        XMode::Binary => Formulation::TrailsReach,
        XMode::Integer => Formulation::Walks,
    };
    let n = network.node_count() as i64;
    let m = network.edge_count();
    let s = network.source();
    let mut model = MilpModel::new();
    let mut h = ModelHandles::new(formulation, cardinality, k);

    match mode {
        XMode::Binary => add_binary_superposition(&mut model, network, &mut h),
        XMode::Integer => add_bit_superposition(&mut model, network, &mut h),
    }

    for i in 0..k {
        let mut ys = Vec::with_capacity(m);
        let mut phis = Vec::with_capacity(m);
        for e in 0..m {
            let label = edge_label(network, e);
            ys.push(model.binary(format!("y[{label},{}]", i + 1)));
            phis.push(model.integer(-n, n, format!("phi[{label},{}]", i + 1)));
        }
        h.y.push(ys);
        h.phi.push(phis);
        h.d.push((0..network.node_count()).map(|v| model.integer(0, n, format!("d[{v},{}]", i + 1))).collect());
    }

    for i in 0..k {
        let (x, y, phi, d) = (&h.x[i], &h.y[i], &h.phi[i], &h.d[i]);
        add_terminal_rows(&mut model, network, x, i, cardinality);
        add_interior_balance(&mut model, network, x, i);
        model.constrain(format!("d_src[{}]", i + 1), vec![(1, d[s])], Relation::Eq, 1);

        for v in (0..network.node_count()).filter(|&v| v != s) {
            let ins = network.in_edges(v);
            let tag = format!("{v},{}", i + 1);
            // no selected in-edge forces label 0
            let mut terms: Vec<(i64, VarRef)> = ins.iter().map(|&e| (-n, x[e])).collect();
            terms.push((1, d[v]));
            model.constrain(format!("d_zero[{tag}]"), terms, Relation::Le, 0);

            let big_m = match mode {
                XMode::Binary => m as i64,
                XMode::Integer => ins.iter().map(|&e| network.edge(e).flow as i64).sum(),
            };
            let mut terms: Vec<(i64, VarRef)> = ins.iter().map(|&e| (1, x[e])).collect();
            terms.extend(ins.iter().map(|&e| (-big_m, y[e])));
            model.constrain(format!("tree_in[{tag}]"), terms, Relation::Le, 0);

            model.constrain(format!("tree_one[{tag}]"), ins.iter().map(|&e| (1, y[e])).collect(), Relation::Le, 1);

            let mut terms: Vec<(i64, VarRef)> = ins.iter().map(|&e| (1, phi[e])).collect();
            terms.extend(ins.iter().map(|&e| (-1, y[e])));
            model.constrain(format!("tree_up[{tag}]"), terms, Relation::Ge, 0);
        }

        for (e, edge) in network.edges().iter().enumerate() {
            let tag = format!("{},{}", edge_label(network, e), i + 1);
            let (du, dv) = (d[edge.tail], d[edge.head]);
            model.constrain(format!("y_le_x[{tag}]"), vec![(1, x[e]), (-1, y[e])], Relation::Ge, 0);
            model.constrain(format!("phi_le_ny[{tag}]"), vec![(1, phi[e]), (-n, y[e])], Relation::Le, 0);
            model.constrain(format!("phi_ge_ny[{tag}]"), vec![(1, phi[e]), (n, y[e])], Relation::Ge, 0);
            // phi <= d_v - d_u + (1 - y) n
            model.constrain(
                format!("phi_le_d[{tag}]"),
                vec![(1, phi[e]), (-1, dv), (1, du), (n, y[e])],
                Relation::Le,
                n,
            );
            // phi >= d_v - d_u - (1 - y) n
            model.constrain(
                format!("phi_ge_d[{tag}]"),
                vec![(1, phi[e]), (-1, dv), (1, du), (-n, y[e])],
                Relation::Ge,
                -n,
            );
        }
    }
    Ok((model, h))
}

fn add_bit_superposition(model: &mut MilpModel, network: &FlowNetwork, h: &mut ModelHandles) {
    let k = h.k;
    let cap = weight_cap(network);
    let bits = bit_count(cap);
    for i in 0..k {
        let w = model.integer(1, cap as i64, format!("w[{}]", i + 1));
        h.w.push(w);
        let zeta: Vec<VarRef> = (0..bits).map(|j| model.binary(format!("zeta[{},{j}]", i + 1))).collect();
        let mut expand: Vec<(i64, VarRef)> = zeta.iter().enumerate().map(|(j, &z)| (1i64 << j, z)).collect();
        expand.push((-1, w));
        model.constrain(format!("w_bits[{}]", i + 1), expand, Relation::Eq, 0);
        h.zeta.push(zeta);

        let mut xs = Vec::with_capacity(network.edge_count());
        let mut prods = Vec::with_capacity(network.edge_count());
        for (e, edge) in network.edges().iter().enumerate() {
            let label = edge_label(network, e);
            let f = edge.flow as i64;
            xs.push(model.integer(0, f, format!("x[{label},{}]", i + 1)));
            prods.push((0..bits).map(|j| model.integer(0, f, format!("phi4[{label},{},{j}]", i + 1))).collect());
        }
        h.x.push(xs);
        h.phi4.push(prods);
    }
    for (e, edge) in network.edges().iter().enumerate() {
        let f = edge.flow as i64;
        let label = edge_label(network, e);
        let mut flow = Vec::with_capacity(k * bits);
        for i in 0..k {
            for j in 0..bits {
                let (p, z, x) = (h.phi4[i][e][j], h.zeta[i][j], h.x[i][e]);
                flow.push((1i64 << j, p));
                let tag = format!("{label},{},{j}", i + 1);
                model.constrain(format!("phi4_le_fz[{tag}]"), vec![(1, p), (-f, z)], Relation::Le, 0);
                model.constrain(format!("phi4_le_x[{tag}]"), vec![(1, p), (-1, x)], Relation::Le, 0);
                // phi4 >= x - (1 - zeta) f
                model.constrain(format!("phi4_ge[{tag}]"), vec![(1, p), (-1, x), (-f, z)], Relation::Ge, -f);
            }
        }
        model.constrain(format!("flow[{label}]"), flow, Relation::Eq, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixtures, Edge};
    use crate::milp::{solve_feasibility, HighsBackend, SolveLimits, SolveOutcome};

    fn solve(model: &MilpModel) -> SolveOutcome {
        solve_feasibility(&HighsBackend, model, &SolveLimits::default()).unwrap()
    }

    #[test]
    fn bits() {
        assert_eq!(bit_count(1), 1);
        assert_eq!(bit_count(2), 2);
        assert_eq!(bit_count(7), 3);
        assert_eq!(bit_count(8), 4);
    }

    #[test]
    fn counts() {
        let net = fixtures::fig2();
        let (n, m) = (5usize, 5usize);
        for k in 1..=3 {
            let (model, _) = build_walk_reach(&net, k, XMode::Binary, Cardinality::AtMostK).unwrap();
            assert_eq!(model.num_variables(), k * (4 * m + n + 1));
            let per = 1 + (n - 2) + 4 * m + m + 4 * (n - 1) + 1;
            assert_eq!(model.num_constraints(), m + 3 * m * k + per * k);
            let (exact, _) = build_walk_reach(&net, k, XMode::Binary, Cardinality::ExactlyK).unwrap();
            assert_eq!(exact.num_constraints(), model.num_constraints() + k);

            let b = bit_count(2);
            let (int, h) = build_walk_reach(&net, k, XMode::Integer, Cardinality::AtMostK).unwrap();
            assert_eq!(int.num_variables(), k * (3 * m + n + 1 + b + m * b));
            assert_eq!(int.num_constraints(), k + m + 3 * m * k * b + per * k);
            assert!(h.pi.is_empty());
            assert_eq!(h.zeta[0].len(), b);
        }
    }

    #[test]
    fn fig2_single_walk() {
        let net = fixtures::fig2();
        let (model, h) = build_walk_reach(&net, 1, XMode::Integer, Cardinality::AtMostK).unwrap();
        match solve(&model) {
            SolveOutcome::Feasible(a) => {
                assert_eq!(a.value(h.w[0]), 1);
                let x: Vec<i64> = h.x[0].iter().map(|&v| a.value(v)).collect();
                assert_eq!(x, vec![1, 2, 2, 2, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fig2_no_trails() {
        let net = fixtures::fig2();
        let (model, _) = build_walk_reach(&net, 5, XMode::Binary, Cardinality::AtMostK).unwrap();
        assert_eq!(solve(&model), SolveOutcome::Infeasible);
    }

    #[test]
    fn single_edge_trail() {
        let net = FlowNetwork::new("one", 2, vec![Edge::new(0, 1, 3)]).unwrap();
        let (model, h) = build_walk_reach(&net, 1, XMode::Binary, Cardinality::AtMostK).unwrap();
        match solve(&model) {
            SolveOutcome::Feasible(a) => {
                assert_eq!(a.value(h.d[0][0]), 1);
                assert!(a.value(h.d[0][1]) >= 1);
                assert_eq!(a.value(h.y[0][0]), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detached_cycle_rejected() {
        // one trail cannot cover s->x->t and the b<->c cycle without the return edge
        let net = fixtures::path_with_side_cycle();
        let (mut model, h) = build_walk_reach(&net, 1, XMode::Binary, Cardinality::AtMostK).unwrap();
        model.constrain("pin", vec![(1, h.x[0][5])], Relation::Eq, 0);
        let relaxed_rows: Vec<_> =
            model.constraints().iter().filter(|c| !c.tag.starts_with("flow[")).cloned().collect();
        let mut relaxed = MilpModel::new();
        for v in model.variables() {
            relaxed.add_variable(v.kind, v.name.clone()).unwrap();
        }
        for c in relaxed_rows {
            relaxed.add_constraint(c).unwrap();
        }
        for (e, v) in [(0, 1), (1, 1), (3, 1), (4, 1)] {
            relaxed.constrain("pin", vec![(1, h.x[0][e])], Relation::Eq, v);
        }
        assert_eq!(solve(&relaxed), SolveOutcome::Infeasible);
    }
}
