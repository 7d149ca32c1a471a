//! Independent checks of decompositions, an exhaustive minimum for tiny
//! instances, and a greedy widest-walk baseline.

mod greedy;
mod oracle;

use std::fmt;

pub use greedy::greedy_width_baseline;
pub use oracle::{brute_force_min, OracleLimits, OracleResult};

use crate::formulations::{Decomposition, ElementKind, ProblemKind};
use crate::graph::{reachable_from, violating_components, EdgeSelection, FlowNetwork, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionViolation {
    Superposition {
        tail: NodeId,
        head: NodeId,
        got: u64,
        expected: u64,
    },
    /// Something wrong with one element (1-based index).
    Element {
        element: usize,
        message: String,
    },
    TooManyElements {
        size: usize,
        k: usize,
    },
}

impl fmt::Display for DecompositionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionViolation::Superposition { tail, head, got, expected } => {
                write!(f, "edge ({tail},{head}): {got} ≠ {expected}")
            }
            DecompositionViolation::Element { element, message } => write!(f, "element {element}: {message}"),
            DecompositionViolation::TooManyElements { size, k } => write!(f, "{size} elements exceed k = {k}"),
        }
    }
}

fn allowed(problem: ProblemKind, kind: ElementKind) -> bool {
    match problem {
        ProblemKind::PathsOrCycles => matches!(kind, ElementKind::Path | ElementKind::Cycle),
        ProblemKind::Trails => matches!(kind, ElementKind::Path | ElementKind::Trail),
        ProblemKind::Walks => kind != ElementKind::Cycle,
    }
}

/// Checks one element's node sequence as the given kind; returns the first problem.
fn check_shape(network: &FlowNetwork, kind: ElementKind, nodes: &[NodeId], sel: &EdgeSelection) -> Option<String> {
    let (s, t) = (network.source(), network.sink());
    if nodes.len() < 2 {
        return Some("fewer than two nodes".into());
    }
    let mut seen = vec![false; network.node_count()];
    match kind {
        ElementKind::Cycle => {
            if nodes.first() != nodes.last() {
                return Some("cycle does not return to its first node".into());
            }
            for &v in &nodes[..nodes.len() - 1] {
                if std::mem::replace(&mut seen[v], true) {
                    return Some(format!("node {v} repeated in cycle"));
                }
            }
            None
        }
        _ if nodes[0] != s => Some(format!("starts at node {} instead of the source", nodes[0])),
        _ if *nodes.last().unwrap() != t => Some(format!("ends at node {} instead of the sink", nodes.last().unwrap())),
        ElementKind::Path => {
            for &v in nodes {
                if std::mem::replace(&mut seen[v], true) {
                    return Some(format!("node {v} repeated in path"));
                }
            }
            None
        }
        ElementKind::Trail => {
            if let Some(e) = sel.selected_edges().find(|&e| sel.get(e) > 1) {
                let edge = network.edge(e);
                return Some(format!("edge repeated: ({},{}) used {} times", edge.tail, edge.head, sel.get(e)));
            }
            lemma_conditions(network, sel, true)
        }
        ElementKind::Walk => lemma_conditions(network, sel, false),
    }
}

/// Balance at every node plus, for trails, no isolated component and, for
/// walks, reachability of every touched node from the source.
fn lemma_conditions(network: &FlowNetwork, sel: &EdgeSelection, trail: bool) -> Option<String> {
    let (s, t) = (network.source(), network.sink());
    for v in 0..network.node_count() {
        let inflow: u64 = network.in_edges(v).iter().map(|&e| sel.get(e)).sum();
        let outflow: u64 = network.out_edges(v).iter().map(|&e| sel.get(e)).sum();
        let expected = if v == s {
            (0, 1)
        } else if v == t {
            (1, 0)
        } else {
            (inflow, inflow)
        };
        if (inflow, outflow) != expected {
            return Some(format!("node {v} has {inflow} in and {outflow} out"));
        }
    }
    if trail {
        match violating_components(network, sel) {
            Ok(comps) if comps.is_empty() => None,
            Ok(comps) => Some(format!("component {:?} has no selected escape edge", comps[0].nodes)),
            Err(e) => Some(e.to_string()),
        }
    } else {
        let reach = reachable_from(network, sel, s);
        sel.selected_edges()
            .map(|e| network.edge(e).tail)
            .find(|&v| !reach[v])
            .map(|v| format!("node {v} not reachable from the source"))
    }
}

/// Checks superposition, per-element structure for `problem`, positive
/// weights and, when `k` is given, the element count.
pub fn verify_decomposition(
    network: &FlowNetwork,
    decomposition: &Decomposition,
    problem: ProblemKind,
    k: Option<usize>,
) -> Result<(), Vec<DecompositionViolation>> {
    let mut out = Vec::new();
    let m = network.edge_count();
    let mut total = vec![0u64; m];
    for (idx, el) in decomposition.elements.iter().enumerate() {
        let element = idx + 1;
        let mut bad = |message: String| out.push(DecompositionViolation::Element { element, message });
        if el.weight == 0 {
            bad("weight must be at least 1".into());
        }
        if !allowed(problem, el.kind) {
            bad(format!("a {} is not allowed for {problem}", el.kind));
        }
        let Some(sel) = EdgeSelection::from_node_sequence(network, &el.nodes) else {
            bad("node sequence uses a pair that is not a network edge".into());
            continue;
        };
        if el.multiplicity.len() != m || sel != el.multiplicity {
            bad("node sequence does not match the edge multiplicities".into());
        }
        // a walk offered as a trail is checked under trail rules too
        let shape =
            if problem == ProblemKind::Trails && el.kind == ElementKind::Walk { ElementKind::Trail } else { el.kind };
        if let Some(message) = check_shape(network, shape, &el.nodes, &sel) {
            bad(message);
        }
        for (e, slot) in total.iter_mut().enumerate() {
            *slot += el.weight * sel.get(e);
        }
    }
    for (e, edge) in network.edges().iter().enumerate() {
        if total[e] != edge.flow {
            out.push(DecompositionViolation::Superposition {
                tail: edge.tail,
                head: edge.head,
                got: total[e],
                expected: edge.flow,
            });
        }
    }
    if let Some(k) = k {
        if decomposition.size() > k {
            out.push(DecompositionViolation::TooManyElements { size: decomposition.size(), k });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::Element;
    use crate::graph::fixtures;

    fn element(net: &FlowNetwork, kind: ElementKind, nodes: Vec<NodeId>, weight: u64) -> Element {
        let multiplicity = EdgeSelection::from_node_sequence(net, &nodes).unwrap();
        Element { kind, nodes, multiplicity, weight }
    }

    #[test]
    fn fig2_paths_or_cycles_ok() {
        let net = fixtures::fig2();
        let dec = Decomposition::new(
            ProblemKind::PathsOrCycles,
            vec![
                element(&net, ElementKind::Path, vec![0, 1, 4], 1),
                element(&net, ElementKind::Cycle, vec![1, 2, 3, 1], 2),
            ],
        );
        assert_eq!(verify_decomposition(&net, &dec, ProblemKind::PathsOrCycles, Some(2)), Ok(()));
        assert!(verify_decomposition(&net, &dec, ProblemKind::PathsOrCycles, Some(1)).is_err());
        assert!(verify_decomposition(&net, &dec, ProblemKind::Walks, None).is_err());
    }

    #[test]
    fn fig2_walk_ok() {
        let net = fixtures::fig2();
        let walk = element(&net, ElementKind::Walk, vec![0, 1, 2, 3, 1, 2, 3, 1, 4], 1);
        let dec = Decomposition::new(ProblemKind::Walks, vec![walk.clone()]);
        assert_eq!(verify_decomposition(&net, &dec, ProblemKind::Walks, Some(1)), Ok(()));
        let as_trail = Element { kind: ElementKind::Trail, ..walk };
        let errs = verify_decomposition(
            &net,
            &Decomposition::new(ProblemKind::Trails, vec![as_trail]),
            ProblemKind::Trails,
            None,
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| e.to_string().contains("edge repeated")), "{errs:?}");
        let errs = verify_decomposition(&net, &dec, ProblemKind::Trails, None).unwrap_err();
        assert!(errs.iter().any(|e| e.to_string().contains("edge repeated")), "{errs:?}");
    }

    #[test]
    fn wrong_weight_reported_per_edge() {
        let net = fixtures::fig2();
        let dec = Decomposition::new(
            ProblemKind::PathsOrCycles,
            vec![
                element(&net, ElementKind::Path, vec![0, 1, 4], 2),
                element(&net, ElementKind::Cycle, vec![1, 2, 3, 1], 2),
            ],
        );
        let errs = verify_decomposition(&net, &dec, ProblemKind::PathsOrCycles, None).unwrap_err();
        let text: Vec<String> = errs.iter().map(ToString::to_string).collect();
        assert!(text.contains(&"edge (0,1): 2 ≠ 1".to_string()), "{text:?}");
    }

    #[test]
    fn shape_errors() {
        let net = fixtures::fig2();
        let bad_path = element(&net, ElementKind::Path, vec![0, 1, 2, 3, 1, 4], 1);
        assert!(check_shape(&net, ElementKind::Path, &bad_path.nodes, &bad_path.multiplicity).is_some());
        let not_closed = [1, 2, 3];
        let sel = EdgeSelection::from_node_sequence(&net, &not_closed).unwrap();
        assert!(check_shape(&net, ElementKind::Cycle, &not_closed, &sel).is_some());
        let net2 = fixtures::path_with_side_cycle();
        // the trail s,x,b,c,b,x,t is valid
        let trail = [0, 1, 3, 4, 3, 1, 2];
        let sel = EdgeSelection::from_node_sequence(&net2, &trail).unwrap();
        assert_eq!(check_shape(&net2, ElementKind::Trail, &trail, &sel), None);
    }

    #[test]
    fn bogus_pair_and_zero_weight() {
        let net = fixtures::fig2();
        let mut el = element(&net, ElementKind::Path, vec![0, 1, 4], 1);
        el.nodes = vec![0, 4];
        el.weight = 0;
        let errs =
            verify_decomposition(&net, &Decomposition::new(ProblemKind::Walks, vec![el]), ProblemKind::Walks, None)
                .unwrap_err();
        assert!(errs.len() >= 2);
    }
}
