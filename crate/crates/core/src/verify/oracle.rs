use std::collections::{HashMap, HashSet, VecDeque};

use crate::formulations::ProblemKind;
use crate::graph::{FlowNetwork, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_flow: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_nodes: 6, max_edges: 9, max_flow: 6 }
    }
}

impl OracleLimits {
    pub fn admits(&self, network: &FlowNetwork) -> bool {
        network.node_count() <= self.max_nodes
            && network.edge_count() <= self.max_edges
            && network.max_flow() <= self.max_flow
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Min(usize),
    /// No decomposition with at most `m` elements exists.
    Infeasible,
    TooLarge,
}

type Vector = Vec<u64>;

/// Exact minimum decomposition size by exhaustive search.
///
/// All valid elements are listed up front as edge-multiplicity vectors
/// (a walk never uses an edge more often than its flow). The search then
/// deepens `k`; each level covers the positive edge with the smallest
/// residual by some element and weight, largest weights first, and
/// remembers residuals that already failed with as many elements left.
pub fn brute_force_min(network: &FlowNetwork, problem: ProblemKind, limits: &OracleLimits) -> OracleResult {
    if !limits.admits(network) {
        return OracleResult::TooLarge;
    }
    let candidates = match problem {
        ProblemKind::PathsOrCycles => paths_and_cycles(network),
        ProblemKind::Trails => walk_vectors(network, true),
        ProblemKind::Walks => walk_vectors(network, false),
    };
    let residual: Vector = network.edges().iter().map(|e| e.flow).collect();
    let s_edges = network.out_edges(network.source()).len();
    let t_edges = network.in_edges(network.sink()).len();
    let lower = s_edges.max(t_edges).max(1);
    let mut search = Search { candidates: &candidates, failed: HashMap::new() };
    for k in lower..=network.edge_count() {
        if search.cover(&residual, k) {
            return OracleResult::Min(k);
        }
    }
    OracleResult::Infeasible
}

struct Search<'a> {
    candidates: &'a [Vector],
    /// Residual -> largest element budget known to fail.
    failed: HashMap<Vector, usize>,
}

impl Search<'_> {
    fn cover(&mut self, residual: &Vector, left: usize) -> bool {
        let Some(target) = (0..residual.len()).filter(|&e| residual[e] > 0).min_by_key(|&e| residual[e]) else {
            return true;
        };
        if left == 0 || self.failed.get(residual).is_some_and(|&f| f >= left) {
            return false;
        }
        for cand in self.candidates {
            if cand[target] == 0 {
                continue;
            }
            let max_w = cand.iter().zip(residual).filter(|(&x, _)| x > 0).map(|(&x, &r)| r / x).min().unwrap_or(0);
            for w in (1..=max_w).rev() {
                let next: Vector = residual.iter().zip(cand).map(|(&r, &x)| r - w * x).collect();
                if self.cover(&next, left - 1) {
                    return true;
                }
            }
        }
        let entry = self.failed.entry(residual.clone()).or_insert(0);
        *entry = (*entry).max(left);
        false
    }
}

/// Simple s-t paths and simple cycles, as 0/1 vectors.
fn paths_and_cycles(network: &FlowNetwork) -> Vec<Vector> {
    let m = network.edge_count();
    let mut out = HashSet::new();
    // paths and cycles by DFS over simple node sequences
    for start in 0..network.node_count() {
        let mut on_path = vec![false; network.node_count()];
        let mut used = vec![0u64; m];
        on_path[start] = true;
        simple_dfs(network, start, start, &mut on_path, &mut used, &mut out);
    }
    let mut v: Vec<Vector> = out.into_iter().collect();
    v.sort();
    v
}

fn simple_dfs(
    network: &FlowNetwork,
    start: NodeId,
    u: NodeId,
    on_path: &mut [bool],
    used: &mut Vector,
    out: &mut HashSet<Vector>,
) {
    let (s, t) = (network.source(), network.sink());
    for &e in network.out_edges(u) {
        let v = network.edge(e).head;
        used[e] = 1;
        if v == start {
            // closing a cycle; only interior nodes can be on one
            out.insert(used.clone());
        } else if start == s && v == t {
            out.insert(used.clone());
        } else if !on_path[v] && v != t {
            on_path[v] = true;
            simple_dfs(network, start, v, on_path, used, out);
            on_path[v] = false;
        }
        used[e] = 0;
    }
}

/// Multiplicity vectors of single s-t walks (`binary`: trails), each entry
/// at most the edge's flow.
fn walk_vectors(network: &FlowNetwork, binary: bool) -> Vec<Vector> {
    let m = network.edge_count();
    let n = network.node_count();
    let (s, t) = (network.source(), network.sink());
    let caps: Vector = network.edges().iter().map(|e| if binary { 1 } else { e.flow }).collect();
    // Assign edges in an order that completes nodes early.
    let order = edge_order(network);
    // last position in `order` touching each node
    let mut done_at = vec![0usize; n];
    for (pos, &e) in order.iter().enumerate() {
        let edge = network.edge(e);
        done_at[edge.tail] = pos;
        done_at[edge.head] = pos;
    }
    let mut completes: Vec<Vec<NodeId>> = vec![Vec::new(); m];
    for v in 0..n {
        completes[done_at[v]].push(v);
    }
    let mut out = Vec::new();
    let mut x = vec![0u64; m];
    let mut net_in = vec![0i64; n];
    let mut in_room = vec![0i64; n];
    let mut out_room = vec![0i64; n];
    for (e, edge) in network.edges().iter().enumerate() {
        in_room[edge.head] += caps[e] as i64;
        out_room[edge.tail] += caps[e] as i64;
    }
    let want = |v: NodeId| -> i64 {
        if v == s {
            -1
        } else if v == t {
            1
        } else {
            0
        }
    };
    struct Ctx<'a> {
        network: &'a FlowNetwork,
        order: &'a [usize],
        caps: &'a [u64],
        completes: &'a [Vec<NodeId>],
    }
    fn rec(
        ctx: &Ctx<'_>,
        pos: usize,
        x: &mut Vector,
        net_in: &mut [i64],
        in_room: &mut [i64],
        out_room: &mut [i64],
        want: &dyn Fn(NodeId) -> i64,
        out: &mut Vec<Vector>,
    ) {
        if pos == ctx.order.len() {
            if connected_from_source(ctx.network, x) {
                out.push(x.clone());
            }
            return;
        }
        let e = ctx.order[pos];
        let edge = ctx.network.edge(e);
        let (u, v) = (edge.tail, edge.head);
        out_room[u] -= ctx.caps[e] as i64;
        in_room[v] -= ctx.caps[e] as i64;
        for val in 0..=ctx.caps[e] {
            x[e] = val;
            net_in[u] -= val as i64;
            net_in[v] += val as i64;
            // every node must still be able to reach its target balance
            let feasible = [u, v].iter().all(|&w| {
                let gap = want(w) - net_in[w];
                -out_room[w] <= gap && gap <= in_room[w]
            }) && ctx.completes[pos].iter().all(|&w| net_in[w] == want(w));
            if feasible {
                rec(ctx, pos + 1, x, net_in, in_room, out_room, want, out);
            }
            net_in[u] += val as i64;
            net_in[v] -= val as i64;
        }
        x[e] = 0;
        out_room[u] += ctx.caps[e] as i64;
        in_room[v] += ctx.caps[e] as i64;
    }
    let ctx = Ctx { network, order: &order, caps: &caps, completes: &completes };
    rec(&ctx, 0, &mut x, &mut net_in, &mut in_room, &mut out_room, &want, &mut out);
    out
}

/// Edges in breadth-first order from the source.
fn edge_order(network: &FlowNetwork) -> Vec<usize> {
    let mut seen = vec![false; network.node_count()];
    let mut order = Vec::with_capacity(network.edge_count());
    let mut queue = VecDeque::from([network.source()]);
    seen[network.source()] = true;
    let mut taken = vec![false; network.edge_count()];
    while let Some(u) = queue.pop_front() {
        for &e in network.out_edges(u).iter().chain(network.in_edges(u)) {
            if !taken[e] {
                taken[e] = true;
                order.push(e);
            }
            let edge = network.edge(e);
            for w in [edge.tail, edge.head] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn connected_from_source(network: &FlowNetwork, x: &[u64]) -> bool {
    let mut seen = vec![false; network.node_count()];
    seen[network.source()] = true;
    let mut queue = VecDeque::from([network.source()]);
    while let Some(u) = queue.pop_front() {
        for &e in network.out_edges(u) {
            let v = network.edge(e).head;
            if x[e] > 0 && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    network.edges().iter().zip(x).all(|(edge, &val)| val == 0 || seen[edge.tail])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixtures, Edge};

    #[test]
    fn fig2_minima() {
        let net = fixtures::fig2();
        let lim = OracleLimits::default();
        assert_eq!(brute_force_min(&net, ProblemKind::PathsOrCycles, &lim), OracleResult::Min(2));
        assert_eq!(brute_force_min(&net, ProblemKind::Trails, &lim), OracleResult::Infeasible);
        assert_eq!(brute_force_min(&net, ProblemKind::Walks, &lim), OracleResult::Min(1));
    }

    #[test]
    fn fig2_candidate_lists() {
        let net = fixtures::fig2();
        assert_eq!(paths_and_cycles(&net), vec![vec![0, 1, 1, 1, 0], vec![1, 0, 0, 0, 1]]);
        assert_eq!(walk_vectors(&net, true), vec![vec![1, 0, 0, 0, 1], vec![1, 1, 1, 1, 1]]);
        let walks = walk_vectors(&net, false);
        assert_eq!(walks, vec![vec![1, 0, 0, 0, 1], vec![1, 1, 1, 1, 1], vec![1, 2, 2, 2, 1]]);
    }

    #[test]
    fn too_large() {
        let net = FlowNetwork::new("big", 2, vec![Edge::new(0, 1, 7)]).unwrap();
        assert_eq!(brute_force_min(&net, ProblemKind::Walks, &OracleLimits::default()), OracleResult::TooLarge);
    }

    #[test]
    fn side_cycle_network() {
        let net = fixtures::path_with_side_cycle();
        let lim = OracleLimits::default();
        assert_eq!(brute_force_min(&net, ProblemKind::Trails, &lim), OracleResult::Min(1));
        assert_eq!(brute_force_min(&net, ProblemKind::Walks, &lim), OracleResult::Min(1));
        assert_eq!(brute_force_min(&net, ProblemKind::PathsOrCycles, &lim), OracleResult::Min(3));
    }
}
