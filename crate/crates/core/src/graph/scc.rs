use std::collections::{BTreeSet, VecDeque};

use super::{EdgeId, EdgeSelection, FlowNetwork, NodeId};

/// Partitions `nodes` into strongly connected components of the digraph
/// formed by `arcs`. Arcs whose endpoints are not in `nodes` are ignored.
///
/// Iterative Tarjan; components come out in reverse topological order of
/// the condensation, each sorted ascending.
pub fn strongly_connected_components(nodes: &[NodeId], arcs: &[(NodeId, NodeId)]) -> Vec<Vec<NodeId>> {
    let max = nodes.iter().copied().max().map_or(0, |m| m + 1);
    let mut local = vec![usize::MAX; max];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let n = nodes.len();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in arcs {
        if u < max && v < max && local[u] != usize::MAX && local[v] != usize::MAX {
            adj[local[u]].push(local[v]);
        }
    }

    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut components = Vec::new();
    // (node, next neighbour position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(nodes[w]);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// A strongly connected set of selected edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    /// Node set `C`, ascending.
    pub nodes: Vec<NodeId>,
    /// Selected edges with both ends in `C`, ascending. `|C|` is their count.
    pub edges: Vec<EdgeId>,
    /// Network edges leaving a node of `C` that are not in `edges`.
    pub escape_edges: Vec<EdgeId>,
}

impl Component {
    pub fn from_nodes(network: &FlowNetwork, nodes: Vec<NodeId>, selection: &EdgeSelection) -> Self {
        let inside: BTreeSet<NodeId> = nodes.iter().copied().collect();
        let edges: Vec<EdgeId> = selection
            .selected_edges()
            .filter(|&e| {
                let edge = network.edge(e);
                inside.contains(&edge.tail) && inside.contains(&edge.head)
            })
            .collect();
        let escape_edges = nodes
            .iter()
            .flat_map(|&v| network.out_edges(v).iter().copied())
            .filter(|e| edges.binary_search(e).is_err())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Component { nodes, edges, escape_edges }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SccCertificate {
    Ok,
    /// A component of the selected edges that no selected edge leaves.
    Violating(Component),
}

impl SccCertificate {
    pub fn is_ok(&self) -> bool {
        matches!(self, SccCertificate::Ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("selection is not a pseudo-flow: {reason}")]
pub struct NotPseudoFlow {
    pub reason: String,
}

fn check_pseudo_flow(network: &FlowNetwork, selection: &EdgeSelection) -> Result<(), NotPseudoFlow> {
    if selection.len() != network.edge_count() {
        return Err(NotPseudoFlow {
            reason: format!("{} multiplicities for {} edges", selection.len(), network.edge_count()),
        });
    }
    let s_out: u64 = network.out_edges(network.source()).iter().map(|&e| selection.get(e)).sum();
    if s_out > 1 {
        return Err(NotPseudoFlow { reason: format!("{s_out} units leave the source") });
    }
    for v in (0..network.node_count()).filter(|&v| network.is_interior(v)) {
        let inflow: u64 = network.in_edges(v).iter().map(|&e| selection.get(e)).sum();
        let outflow: u64 = network.out_edges(v).iter().map(|&e| selection.get(e)).sum();
        if inflow != outflow {
            return Err(NotPseudoFlow { reason: format!("node {v} has {inflow} in, {outflow} out") });
        }
    }
    Ok(())
}

/// Nodes reachable from `start` over edges with positive multiplicity.
pub fn reachable_from(network: &FlowNetwork, selection: &EdgeSelection, start: NodeId) -> Vec<bool> {
    let mut seen = vec![false; network.node_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &e in network.out_edges(u) {
            let v = network.edge(e).head;
            if selection.get(e) > 0 && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

fn touched_nodes(network: &FlowNetwork, selection: &EdgeSelection) -> Vec<NodeId> {
    let mut touched = BTreeSet::new();
    for e in selection.selected_edges() {
        touched.insert(network.edge(e).tail);
        touched.insert(network.edge(e).head);
    }
    touched.into_iter().collect()
}

/// Every strongly connected component of the selected edges (other than
/// `{t}`) that no selected edge leaves.
pub fn violating_components(network: &FlowNetwork, selection: &EdgeSelection) -> Result<Vec<Component>, NotPseudoFlow> {
    check_pseudo_flow(network, selection)?;
    Ok(sink_components(network, selection))
}

fn sink_components(network: &FlowNetwork, selection: &EdgeSelection) -> Vec<Component> {
    let nodes = touched_nodes(network, selection);
    let arcs: Vec<(NodeId, NodeId)> =
        selection.selected_edges().map(|e| (network.edge(e).tail, network.edge(e).head)).collect();
    let comps = strongly_connected_components(&nodes, &arcs);
    let mut comp_of = vec![usize::MAX; network.node_count()];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }
    let mut leaves = vec![false; comps.len()];
    for &(u, v) in &arcs {
        if comp_of[u] != comp_of[v] {
            leaves[comp_of[u]] = true;
        }
    }
    comps
        .into_iter()
        .enumerate()
        .filter(|(i, comp)| !leaves[*i] && comp.as_slice() != [network.sink()])
        .map(|(_, comp)| Component::from_nodes(network, comp, selection))
        .collect()
}

/// Decides whether the selected edges can be ordered into one s-t walk
/// (given they already balance), by checking that the selected subgraph
/// plus an arc `(t, s)` is strongly connected on the touched nodes.
pub fn check_walk_connectivity(
    network: &FlowNetwork,
    selection: &EdgeSelection,
) -> Result<SccCertificate, NotPseudoFlow> {
    check_pseudo_flow(network, selection)?;
    if selection.is_empty() {
        return Ok(SccCertificate::Ok);
    }
    let (s, t) = (network.source(), network.sink());
    let mut nodes = touched_nodes(network, selection);
    for v in [s, t] {
        if let Err(pos) = nodes.binary_search(&v) {
            nodes.insert(pos, v);
        }
    }
    let mut arcs: Vec<(NodeId, NodeId)> =
        selection.selected_edges().map(|e| (network.edge(e).tail, network.edge(e).head)).collect();
    arcs.push((t, s));
    let comps = strongly_connected_components(&nodes, &arcs);
    if comps.len() == 1 {
        return Ok(SccCertificate::Ok);
    }
    let mut violators = sink_components(network, selection);
    if violators.is_empty() {
        // Unreachable for balanced selections; report the part cut off from s.
        let comp = comps.into_iter().find(|c| !c.contains(&s)).expect("more than one component");
        return Ok(SccCertificate::Violating(Component::from_nodes(network, comp, selection)));
    }
    Ok(SccCertificate::Violating(violators.swap_remove(0)))
}
