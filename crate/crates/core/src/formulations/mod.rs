//! Integer programs for the three decomposition problems at a fixed `k`,
//! and the translation from solver assignments back to weighted elements.
//!
//! Element indices are 0-based in code; names carry the 1-based index.

mod decomposition;
mod extract;
mod paths_cycles;
mod reach;
mod trails_cg;

pub use decomposition::{Cardinality, Decomposition, Element, ElementKind, Formulation, ProblemKind, VariantSpec};
pub(crate) use extract::euler_walk;
pub use extract::{check_identities, extract_decomposition, ExtractError};
pub use paths_cycles::build_fdpc;
pub use reach::{build_walk_reach, XMode};
pub use trails_cg::build_fdt_cg;

use crate::graph::{Component, FlowNetwork};
use crate::milp::{MilpModel, Relation, VarRef};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulationError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("component {index} references edge {edge}, but the network has {edge_count} edges")]
    UnknownComponentEdge { index: usize, edge: usize, edge_count: usize },
}

/// Variable handles of one built model, indexed `[element][edge]`,
/// `[element][node]` or `[element][bit]` unless noted.
#[derive(Clone, Debug, Default)]
pub struct ModelHandles {
    pub formulation: Option<Formulation>,
    pub cardinality: Cardinality,
    pub k: usize,
    pub x: Vec<Vec<VarRef>>,
    pub w: Vec<VarRef>,
    /// `x * w` products; empty for integer walks.
    pub pi: Vec<Vec<VarRef>>,
    /// Start-of-cycle indicators (paths or cycles).
    pub c: Vec<Vec<VarRef>>,
    /// Position labels (paths or cycles, reachability).
    pub d: Vec<Vec<VarRef>>,
    /// Indexed `[component][element]`.
    pub beta: Vec<Vec<VarRef>>,
    /// The components the `beta` rows were imposed for.
    pub components: Vec<Component>,
    pub y: Vec<Vec<VarRef>>,
    pub phi: Vec<Vec<VarRef>>,
    pub zeta: Vec<Vec<VarRef>>,
    /// Indexed `[element][edge][bit]`.
    pub phi4: Vec<Vec<Vec<VarRef>>>,
}

impl ModelHandles {
    fn new(formulation: Formulation, cardinality: Cardinality, k: usize) -> Self {
        ModelHandles { formulation: Some(formulation), cardinality, k, ..Default::default() }
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation.expect("handles come from a builder")
    }
}

/// Builds the model for any variant. `components` is only read by the
/// constraint-generation trail model.
pub fn build_model(
    network: &FlowNetwork,
    k: usize,
    variant: VariantSpec,
    components: &[Component],
) -> Result<(MilpModel, ModelHandles), FormulationError> {
    match variant.formulation {
        Formulation::PathsOrCycles => build_fdpc(network, k, variant.cardinality),
        Formulation::TrailsCg => build_fdt_cg(network, k, components, variant.cardinality),
        Formulation::TrailsReach => build_walk_reach(network, k, XMode::Binary, variant.cardinality),
        Formulation::Walks => build_walk_reach(network, k, XMode::Integer, variant.cardinality),
    }
}

/// Upper bound on any element weight.
pub fn weight_cap(network: &FlowNetwork) -> u64 {
    network.max_flow()
}

fn edge_label(network: &FlowNetwork, e: usize) -> String {
    let edge = network.edge(e);
    format!("{},{}", edge.tail, edge.head)
}

/// Declares binary `x`, weights `w` and products `pi` for all elements, with
/// the big-M product rows (M = f_uv above, the weight cap below) and the superposition rows.
fn add_binary_superposition(model: &mut MilpModel, network: &FlowNetwork, handles: &mut ModelHandles) {
    let k = handles.k;
    let cap = weight_cap(network) as i64;
    for i in 0..k {
        handles.w.push(model.integer(1, cap, format!("w[{}]", i + 1)));
        let mut xs = Vec::with_capacity(network.edge_count());
        let mut pis = Vec::with_capacity(network.edge_count());
        for (e, edge) in network.edges().iter().enumerate() {
            let label = edge_label(network, e);
            xs.push(model.binary(format!("x[{label},{}]", i + 1)));
            pis.push(model.integer(0, edge.flow as i64, format!("pi[{label},{}]", i + 1)));
        }
        handles.x.push(xs);
        handles.pi.push(pis);
    }
    for (e, edge) in network.edges().iter().enumerate() {
        let f = edge.flow as i64;
        let tag = edge_label(network, e);
        model.constrain(format!("flow[{tag}]"), (0..k).map(|i| (1, handles.pi[i][e])).collect(), Relation::Eq, f);
        for i in 0..k {
            let (x, pi, w) = (handles.x[i][e], handles.pi[i][e], handles.w[i]);
            model.constrain(format!("pi_le_fx[{tag},{}]", i + 1), vec![(1, pi), (-f, x)], Relation::Le, 0);
            model.constrain(format!("pi_le_w[{tag},{}]", i + 1), vec![(1, pi), (-1, w)], Relation::Le, 0);
            // pi >= w - (1 - x) cap; f alone is too small once w > f
            model.constrain(format!("pi_ge[{tag},{}]", i + 1), vec![(1, pi), (-1, w), (-cap, x)], Relation::Ge, -cap);
        }
    }
}

/// Source and sink rows for element `i`: weak (s emits at most one unit)
/// or full (one unit out of s and one into t).
fn add_terminal_rows(model: &mut MilpModel, network: &FlowNetwork, x: &[VarRef], i: usize, cardinality: Cardinality) {
    let (s, t) = (network.source(), network.sink());
    let s_terms: Vec<(i64, VarRef)> = network.out_edges(s).iter().map(|&e| (1, x[e])).collect();
    match cardinality {
        Cardinality::AtMostK => model.constrain(format!("src[{}]", i + 1), s_terms, Relation::Le, 1),
        Cardinality::ExactlyK => {
            model.constrain(format!("src[{}]", i + 1), s_terms, Relation::Eq, 1);
            let t_terms = network.in_edges(t).iter().map(|&e| (1, x[e])).collect();
            model.constrain(format!("sink[{}]", i + 1), t_terms, Relation::Eq, 1);
        }
    }
}

fn add_interior_balance(model: &mut MilpModel, network: &FlowNetwork, x: &[VarRef], i: usize) {
    for v in (0..network.node_count()).filter(|&v| network.is_interior(v)) {
        let mut terms: Vec<(i64, VarRef)> = network.in_edges(v).iter().map(|&e| (1, x[e])).collect();
        terms.extend(network.out_edges(v).iter().map(|&e| (-1, x[e])));
        model.constrain(format!("bal[{v},{}]", i + 1), terms, Relation::Eq, 0);
    }
}
