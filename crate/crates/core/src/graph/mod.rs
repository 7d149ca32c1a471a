//! Flow networks: the data model, the text format, validation and the
//! connectivity utilities used by the trail formulations.

mod format;
mod generate;
mod scc;

use std::collections::VecDeque;
use std::fmt;

pub use format::{parse_graph_file, serialize_graph_file, serialize_network, ParseError};
pub(crate) use generate::canonical_cycle;
pub use generate::{generate_instance, generate_instance_with, GeneratedInstance, GeneratorConfig};
pub use scc::{
    check_walk_connectivity, reachable_from, strongly_connected_components, violating_components, Component,
    SccCertificate,
};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: NodeId,
    pub head: NodeId,
    pub flow: u64,
}

impl Edge {
    pub fn new(tail: NodeId, head: NodeId, flow: u64) -> Self {
        Edge { tail, head, flow }
    }
}

/// A problem found while checking a candidate network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoNodes,
    NoEdges,
    NodeOutOfRange { edge: EdgeId, node: NodeId },
    SelfLoop { edge: EdgeId, node: NodeId },
    ParallelEdge { first: EdgeId, second: EdgeId, tail: NodeId, head: NodeId },
    ZeroFlow { edge: EdgeId },
    NoSource,
    SourceNotUnique { nodes: Vec<NodeId> },
    NoSink,
    SinkNotUnique { nodes: Vec<NodeId> },
    Conservation { node: NodeId, inflow: u64, outflow: u64 },
    Disconnected { unreached: Vec<NodeId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoNodes => write!(f, "network has no nodes"),
            Violation::NoEdges => write!(f, "network has no edges"),
            Violation::NodeOutOfRange { edge, node } => {
                write!(f, "edge {edge} references node {node} outside the node range")
            }
            Violation::SelfLoop { edge, node } => write!(f, "edge {edge} is a self-loop at node {node}"),
            Violation::ParallelEdge { first, second, tail, head } => {
                write!(f, "edges {first} and {second} both connect ({tail},{head})")
            }
            Violation::ZeroFlow { edge } => write!(f, "edge {edge} has zero flow"),
            Violation::NoSource => write!(f, "no source (node with in-degree 0)"),
            Violation::SourceNotUnique { nodes } => write!(f, "source not unique: {nodes:?}"),
            Violation::NoSink => write!(f, "no sink (node with out-degree 0)"),
            Violation::SinkNotUnique { nodes } => write!(f, "sink not unique: {nodes:?}"),
            Violation::Conservation { node, inflow, outflow } => {
                write!(f, "conservation violated at node {node}: inflow {inflow} != outflow {outflow}")
            }
            Violation::Disconnected { unreached } => {
                write!(f, "network is not weakly connected; unreached nodes {unreached:?}")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid flow network '{name}': {}", display_violations(.violations))]
pub struct InvalidNetwork {
    pub name: String,
    pub violations: Vec<Violation>,
}

fn display_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Checks every flow-network invariant and lists all violations found.
pub fn validate(node_count: usize, edges: &[Edge]) -> Vec<Violation> {
    let mut violations = Vec::new();
    if node_count == 0 {
        violations.push(Violation::NoNodes);
        return violations;
    }
    if edges.is_empty() {
        violations.push(Violation::NoEdges);
    }
    let mut structural_ok = true;
    let mut seen = std::collections::HashMap::new();
    for (id, e) in edges.iter().enumerate() {
        for node in [e.tail, e.head] {
            if node >= node_count {
                violations.push(Violation::NodeOutOfRange { edge: id, node });
                structural_ok = false;
            }
        }
        if e.tail == e.head {
            violations.push(Violation::SelfLoop { edge: id, node: e.tail });
        }
        if e.flow == 0 {
            violations.push(Violation::ZeroFlow { edge: id });
        }
        if let Some(&first) = seen.get(&(e.tail, e.head)) {
            violations.push(Violation::ParallelEdge { first, second: id, tail: e.tail, head: e.head });
        } else {
            seen.insert((e.tail, e.head), id);
        }
    }
    if !structural_ok {
        return violations;
    }

    let mut inflow = vec![0u64; node_count];
    let mut outflow = vec![0u64; node_count];
    let mut indeg = vec![0usize; node_count];
    let mut outdeg = vec![0usize; node_count];
    for e in edges {
        outflow[e.tail] += e.flow;
        inflow[e.head] += e.flow;
        outdeg[e.tail] += 1;
        indeg[e.head] += 1;
    }
    let sources: Vec<NodeId> = (0..node_count).filter(|&v| indeg[v] == 0).collect();
    let sinks: Vec<NodeId> = (0..node_count).filter(|&v| outdeg[v] == 0).collect();
    match sources.len() {
        0 => violations.push(Violation::NoSource),
        1 => {}
        _ => violations.push(Violation::SourceNotUnique { nodes: sources.clone() }),
    }
    match sinks.len() {
        0 => violations.push(Violation::NoSink),
        1 => {}
        _ => violations.push(Violation::SinkNotUnique { nodes: sinks.clone() }),
    }
    for v in 0..node_count {
        if sources.contains(&v) || sinks.contains(&v) {
            continue;
        }
        if inflow[v] != outflow[v] {
            violations.push(Violation::Conservation { node: v, inflow: inflow[v], outflow: outflow[v] });
        }
    }

    let mut undirected = vec![Vec::new(); node_count];
    for e in edges {
        undirected[e.tail].push(e.head);
        undirected[e.head].push(e.tail);
    }
    let mut seen = vec![false; node_count];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &undirected[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    let unreached: Vec<NodeId> = (0..node_count).filter(|&v| !seen[v]).collect();
    if !unreached.is_empty() {
        violations.push(Violation::Disconnected { unreached });
    }
    violations
}

/// A directed graph with a unique source and sink and a positive integer
/// flow on every edge satisfying conservation at interior nodes.
///
/// Values can only be built through [`FlowNetwork::new`], which rejects
/// anything violating those invariants, so every `FlowNetwork` is valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    name: String,
    node_count: usize,
    edges: Vec<Edge>,
    source: NodeId,
    sink: NodeId,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl FlowNetwork {
    pub fn new(name: impl Into<String>, node_count: usize, edges: Vec<Edge>) -> Result<Self, InvalidNetwork> {
        let name = name.into();
        let violations = validate(node_count, &edges);
        if !violations.is_empty() {
            return Err(InvalidNetwork { name, violations });
        }
        let mut out_edges = vec![Vec::new(); node_count];
        let mut in_edges = vec![Vec::new(); node_count];
        for (id, e) in edges.iter().enumerate() {
            out_edges[e.tail].push(id);
            in_edges[e.head].push(id);
        }
        let source = (0..node_count).find(|&v| in_edges[v].is_empty()).expect("validated");
        let sink = (0..node_count).find(|&v| out_edges[v].is_empty()).expect("validated");
        Ok(FlowNetwork { name, node_count, edges, source, sink, out_edges, in_edges })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        &self.in_edges[node]
    }

    pub fn find_edge(&self, tail: NodeId, head: NodeId) -> Option<EdgeId> {
        self.out_edges.get(tail)?.iter().copied().find(|&e| self.edges[e].head == head)
    }

    /// Largest edge flow; the natural upper bound for any element weight.
    pub fn max_flow(&self) -> u64 {
        self.edges.iter().map(|e| e.flow).max().unwrap_or(0)
    }

    pub fn total_flow_volume(&self) -> u64 {
        self.edges.iter().map(|e| e.flow).sum()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self.node_count, &self.edges)
    }

    pub fn is_interior(&self, node: NodeId) -> bool {
        node != self.source && node != self.sink
    }
}

/// Per-edge multiplicities `W(u,v)` of one decomposition element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSelection(Vec<u64>);

impl EdgeSelection {
    pub fn zeros(edge_count: usize) -> Self {
        EdgeSelection(vec![0; edge_count])
    }

    pub fn from_multiplicities(values: Vec<u64>) -> Self {
        EdgeSelection(values)
    }

    /// Counts how often each edge occurs in a node sequence. Returns `None`
    /// when two consecutive nodes are not joined by a network edge.
    pub fn from_node_sequence(network: &FlowNetwork, nodes: &[NodeId]) -> Option<Self> {
        let mut sel = EdgeSelection::zeros(network.edge_count());
        for pair in nodes.windows(2) {
            let e = network.find_edge(pair[0], pair[1])?;
            sel.0[e] += 1;
        }
        Some(sel)
    }

    pub fn get(&self, edge: EdgeId) -> u64 {
        self.0[edge]
    }

    pub fn set(&mut self, edge: EdgeId, value: u64) {
        self.0[edge] = value;
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    pub fn selected_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.0.iter().enumerate().filter(|(_, &m)| m > 0).map(|(e, _)| e)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&m| m <= 1)
    }
}

/// Small hand-built networks used across the test suites.
pub mod fixtures {
    use super::*;

    /// Nodes 0..4 stand for s, a, d, c, t.
    pub fn fig2() -> FlowNetwork {
        FlowNetwork::new(
            "fig2",
            5,
            vec![Edge::new(0, 1, 1), Edge::new(1, 2, 2), Edge::new(2, 3, 2), Edge::new(3, 1, 2), Edge::new(1, 4, 1)],
        )
        .unwrap()
    }

    /// s -> x -> t with a 2-cycle b <-> c hanging off x.
    /// Nodes: s=0, x=1, t=2, b=3, c=4.
    pub fn path_with_side_cycle() -> FlowNetwork {
        FlowNetwork::new(
            "side-cycle",
            5,
            vec![
                Edge::new(0, 1, 1),
                Edge::new(1, 2, 1),
                Edge::new(1, 3, 1),
                Edge::new(3, 4, 1),
                Edge::new(4, 3, 1),
                Edge::new(3, 1, 1),
            ],
        )
        .unwrap()
    }

    /// Five parallel s-t routes with weights 1..=5; every decomposition
    /// needs five elements. Nodes: s=0, t=5, route hubs 1..=4.
    pub fn five_routes() -> FlowNetwork {
        let mut edges = vec![Edge::new(0, 5, 1)];
        for hub in 1..=4 {
            edges.push(Edge::new(0, hub, hub as u64 + 1));
            edges.push(Edge::new(hub, 5, hub as u64 + 1));
        }
        FlowNetwork::new("five-routes", 6, edges).unwrap()
    }

    /// Minimum sizes 4 (paths or cycles), 3 (trails) and 2 (walks).
    pub fn strict_ordering() -> FlowNetwork {
        let edges = [(0, 1, 1), (0, 2, 3), (1, 2, 1), (1, 3, 2), (1, 4, 1), (2, 1, 1), (2, 3, 3), (3, 1, 2), (3, 4, 3)];
        FlowNetwork::new("strict-ordering", 5, edges.iter().map(|&(u, v, f)| Edge::new(u, v, f)).collect()).unwrap()
    }
}
