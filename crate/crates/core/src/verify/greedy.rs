use std::collections::VecDeque;

use crate::formulations::{euler_walk, Decomposition, Element, ElementKind, ProblemKind};
use crate::graph::{EdgeId, EdgeSelection, FlowNetwork, NodeId};

/// Widest-walk greedy decomposition into walks.
///
/// Each round takes a maximum-bottleneck s-t path in the residual with
/// weight `b`. If subtracting it would cut positive residual off from the
/// source, cycles of the cut-off part through nodes already on the walk are
/// folded into it until the residual is reachable again, lowering `b` when
/// no such cycle fits. Every round removes at least `b` units of volume.
pub fn greedy_width_baseline(network: &FlowNetwork) -> Decomposition {
    let mut residual: Vec<u64> = network.edges().iter().map(|e| e.flow).collect();
    let mut elements = Vec::new();
    while residual.iter().any(|&r| r > 0) {
        let (path, bottleneck) = widest_path(network, &residual).expect("residual flow keeps an s-t path");
        let (x, weight) =
            (1..=bottleneck).rev().find_map(|b| absorb(network, &residual, &path, b)).expect("weight 1 always fits");
        for (r, &k) in residual.iter_mut().zip(&x) {
            *r -= weight * k;
        }
        let multiplicity = EdgeSelection::from_multiplicities(x);
        let nodes = euler_walk(network, &multiplicity).expect("absorbed walk is traversable");
        let kind = if multiplicity.is_binary() { ElementKind::Trail } else { ElementKind::Walk };
        let kind = if kind == ElementKind::Trail && is_simple(&nodes) { ElementKind::Path } else { kind };
        elements.push(Element { kind, nodes, multiplicity, weight });
    }
    Decomposition::new(ProblemKind::Walks, elements)
}

fn is_simple(nodes: &[NodeId]) -> bool {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|p| p[0] != p[1])
}

/// Max-bottleneck path from s to t over positive residual edges.
fn widest_path(network: &FlowNetwork, residual: &[u64]) -> Option<(Vec<EdgeId>, u64)> {
    let n = network.node_count();
    let (s, t) = (network.source(), network.sink());
    let mut width = vec![0u64; n];
    let mut via: Vec<Option<EdgeId>> = vec![None; n];
    let mut done = vec![false; n];
    width[s] = u64::MAX;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&v| !done[v] && width[v] > 0).max_by_key(|&v| (width[v], std::cmp::Reverse(v)))
        else {
            break;
        };
        done[u] = true;
        for &e in network.out_edges(u) {
            let v = network.edge(e).head;
            let w = width[u].min(residual[e]);
            if !done[v] && w > width[v] {
                width[v] = w;
                via[v] = Some(e);
            }
        }
    }
    if width[t] == 0 {
        return None;
    }
    let mut path = Vec::new();
    let mut v = t;
    while let Some(e) = via[v] {
        path.push(e);
        v = network.edge(e).tail;
    }
    path.reverse();
    Some((path, width[t]))
}

/// Tries to build a walk of weight `b` around `path`; `None` if the cut-off
/// residual cannot be folded in at this weight.
fn absorb(network: &FlowNetwork, residual: &[u64], path: &[EdgeId], b: u64) -> Option<(Vec<u64>, u64)> {
    let m = network.edge_count();
    let mut x = vec![0u64; m];
    let mut left = residual.to_vec();
    for &e in path {
        x[e] += 1;
        left[e] -= b;
    }
    loop {
        let reach = reachable(network, &left);
        let cut_off: Vec<bool> = (0..m).map(|e| left[e] > 0 && !reach[network.edge(e).tail]).collect();
        if !cut_off.iter().any(|&c| c) {
            return Some((x, b));
        }
        let mut on_walk = vec![false; network.node_count()];
        for e in (0..m).filter(|&e| x[e] > 0) {
            on_walk[network.edge(e).tail] = true;
            on_walk[network.edge(e).head] = true;
        }
        let usable: Vec<bool> = (0..m).map(|e| cut_off[e] && left[e] >= b).collect();
        let cycle =
            (0..network.node_count()).filter(|&v| on_walk[v]).find_map(|v| cycle_through(network, &usable, v))?;
        for e in cycle {
            x[e] += 1;
            left[e] -= b;
        }
    }
}

fn reachable(network: &FlowNetwork, residual: &[u64]) -> Vec<bool> {
    let mut seen = vec![false; network.node_count()];
    seen[network.source()] = true;
    let mut queue = VecDeque::from([network.source()]);
    while let Some(u) = queue.pop_front() {
        for &e in network.out_edges(u) {
            let v = network.edge(e).head;
            if residual[e] > 0 && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// A simple cycle through `start` over usable edges, by BFS back to `start`.
fn cycle_through(network: &FlowNetwork, usable: &[bool], start: NodeId) -> Option<Vec<EdgeId>> {
    let mut via: Vec<Option<EdgeId>> = vec![None; network.node_count()];
    let mut queue = VecDeque::from([start]);
    let mut seen = vec![false; network.node_count()];
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &e in network.out_edges(u) {
            if !usable[e] {
                continue;
            }
            let v = network.edge(e).head;
            if v == start {
                let mut cycle = vec![e];
                let mut cur = u;
                while cur != start {
                    let back = via[cur].expect("bfs tree edge");
                    cycle.push(back);
                    cur = network.edge(back).tail;
                }
                cycle.reverse();
                return Some(cycle);
            }
            if !seen[v] {
                seen[v] = true;
                via[v] = Some(e);
                queue.push_back(v);
            }
        }
    }
    None
}
