use super::{
    add_binary_superposition, add_interior_balance, add_terminal_rows, Cardinality, Formulation, FormulationError,
    ModelHandles,
};
use crate::graph::{Component, FlowNetwork};
use crate::milp::{MilpModel, Relation};

/// Trail model restricted to the components found so far.
///
/// For every component `C` and element `i`, a binary `beta` encodes "all of
/// `E(C)` is selected", and then some escape edge of `C` must be selected
/// as well (big-M with `M = |C|`, the edge count of `C`).
pub fn build_fdt_cg(
    network: &FlowNetwork,
    k: usize,
    components: &[Component],
    cardinality: Cardinality,
) -> Result<(MilpModel, ModelHandles), FormulationError> {
    if k == 0 {
        return Err(FormulationError::InvalidK);
    }
    let m = network.edge_count();
    for (index, comp) in components.iter().enumerate() {
        if let Some(&edge) = comp.edges.iter().chain(&comp.escape_edges).find(|&&e| e >= m) {
            return Err(FormulationError::UnknownComponentEdge { index, edge, edge_count: m });
        }
    }
    let mut model = MilpModel::new();
    let mut h = ModelHandles::new(Formulation::TrailsCg, cardinality, k);
    add_binary_superposition(&mut model, network, &mut h);
    for i in 0..k {
        add_terminal_rows(&mut model, network, &h.x[i], i, cardinality);
        add_interior_balance(&mut model, network, &h.x[i], i);
    }

    for (ci, comp) in components.iter().enumerate() {
        let size = comp.size() as i64;
        let mut betas = Vec::with_capacity(k);
        for i in 0..k {
            let beta = model.binary(format!("beta[{},{}]", ci + 1, i + 1));
            betas.push(beta);
            let x = &h.x[i];
            let mut inner: Vec<_> = comp.edges.iter().map(|&e| (1, x[e])).collect();
            inner.push((-size, beta));
            // sum_E(C) x >= |C| - M(1 - beta)
            model.constrain(format!("cover_lo[{},{}]", ci + 1, i + 1), inner.clone(), Relation::Ge, 0);
            // sum_E(C) x - |C| + 1 - M beta <= 0
            model.constrain(format!("cover_hi[{},{}]", ci + 1, i + 1), inner, Relation::Le, size - 1);
            let mut escape: Vec<_> = comp.escape_edges.iter().map(|&e| (1, x[e])).collect();
            escape.push((-1, beta));
            model.constrain(format!("escape[{},{}]", ci + 1, i + 1), escape, Relation::Ge, 0);
        }
        h.beta.push(betas);
    }
    h.components = components.to_vec();
    Ok((model, h))
}
