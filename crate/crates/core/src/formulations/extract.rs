use super::{Cardinality, Decomposition, Element, ElementKind, Formulation, ModelHandles};
use crate::graph::canonical_cycle;
use crate::graph::{EdgeSelection, FlowNetwork, NodeId};
use crate::milp::Assignment;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("element {element}: {reason}")]
pub struct ExtractError {
    /// 1-based element index.
    pub element: usize,
    pub reason: String,
}

/// Turns a satisfying assignment into weighted elements. Elements whose
/// edge variables are all zero are dropped.
pub fn extract_decomposition(
    assignment: &Assignment,
    handles: &ModelHandles,
    network: &FlowNetwork,
) -> Result<Decomposition, ExtractError> {
    let formulation = handles.formulation();
    let mut elements = Vec::new();
    for i in 0..handles.k {
        let err = |reason: String| ExtractError { element: i + 1, reason };
        let mut values = Vec::with_capacity(network.edge_count());
        for &x in &handles.x[i] {
            let v = assignment.value(x);
            if v < 0 {
                return Err(err(format!("negative edge value {v}")));
            }
            values.push(v as u64);
        }
        let multiplicity = EdgeSelection::from_multiplicities(values);
        if multiplicity.is_empty() {
            continue;
        }
        let weight = assignment.value(handles.w[i]);
        if weight < 1 {
            return Err(err(format!("weight {weight} below 1")));
        }
        let (kind, nodes) = match formulation {
            Formulation::PathsOrCycles => path_or_cycle(network, &multiplicity).map_err(err)?,
            Formulation::TrailsCg | Formulation::TrailsReach => {
                (ElementKind::Trail, euler_walk(network, &multiplicity).map_err(err)?)
            }
            Formulation::Walks => (ElementKind::Walk, euler_walk(network, &multiplicity).map_err(err)?),
        };
        elements.push(Element { kind, nodes, multiplicity, weight: weight as u64 });
    }
    Ok(Decomposition::new(formulation.problem(), elements))
}

fn single_out(network: &FlowNetwork, sel: &EdgeSelection, v: NodeId) -> Result<Option<NodeId>, String> {
    let mut outs = network.out_edges(v).iter().filter(|&&e| sel.get(e) > 0);
    let first = outs.next();
    if outs.next().is_some() {
        return Err(format!("node {v} has more than one selected out-edge"));
    }
    Ok(first.map(|&e| network.edge(e).head))
}

fn path_or_cycle(network: &FlowNetwork, sel: &EdgeSelection) -> Result<(ElementKind, Vec<NodeId>), String> {
    if !sel.is_binary() {
        return Err("edge used more than once".into());
    }
    let s = network.source();
    let from_source = network.out_edges(s).iter().any(|&e| sel.get(e) > 0);
    let start = if from_source {
        s
    } else {
        sel.selected_edges().map(|e| network.edge(e).tail).min().expect("nonempty selection")
    };
    let mut nodes = vec![start];
    let mut seen = vec![false; network.node_count()];
    seen[start] = true;
    let mut cur = start;
    while let Some(next) = single_out(network, sel, cur)? {
        nodes.push(next);
        if next == start {
            break;
        }
        if seen[next] {
            return Err(format!("node {next} visited twice"));
        }
        seen[next] = true;
        cur = next;
    }
    if nodes.len() - 1 != sel.total() as usize {
        return Err("selected edges do not form a single path or cycle".into());
    }
    if from_source {
        if *nodes.last().unwrap() != network.sink() {
            return Err("path does not end at the sink".into());
        }
        Ok((ElementKind::Path, nodes))
    } else {
        if nodes.first() != nodes.last() || nodes.len() < 2 {
            return Err("selected edges do not close a cycle".into());
        }
        Ok((ElementKind::Cycle, canonical_cycle(nodes)))
    }
}

/// Hierholzer traversal from `s` using every multiplicity exactly.
pub(crate) fn euler_walk(network: &FlowNetwork, sel: &EdgeSelection) -> Result<Vec<NodeId>, String> {
    let mut remaining: Vec<u64> = sel.as_slice().to_vec();
    let mut cursor = vec![0usize; network.node_count()];
    let mut stack = vec![network.source()];
    let mut walk = Vec::with_capacity(sel.total() as usize + 1);
    while let Some(&u) = stack.last() {
        let outs = network.out_edges(u);
        while cursor[u] < outs.len() && remaining[outs[cursor[u]]] == 0 {
            cursor[u] += 1;
        }
        if cursor[u] < outs.len() {
            let e = outs[cursor[u]];
            remaining[e] -= 1;
            stack.push(network.edge(e).head);
        } else {
            walk.push(u);
            stack.pop();
        }
    }
    walk.reverse();
    if walk.len() != sel.total() as usize + 1 || remaining.iter().any(|&r| r > 0) {
        return Err("selected edges are not traversable as one walk from the source".into());
    }
    if *walk.last().unwrap() != network.sink() {
        return Err("walk does not end at the sink".into());
    }
    Ok(walk)
}

/// Exact checks of the product and expansion identities behind a feasible
/// assignment, plus the per-element out-degree and coupling rows for the
/// paths-or-cycles model. Returns one message per failure.
pub fn check_identities(network: &FlowNetwork, handles: &ModelHandles, a: &Assignment) -> Vec<String> {
    let mut out = Vec::new();
    let k = handles.k;
    let val = |v| a.value(v);
    for (e, edge) in network.edges().iter().enumerate() {
        let f = edge.flow as i64;
        if !handles.pi.is_empty() {
            let mut sum = 0;
            for i in 0..k {
                let (x, w, pi) = (val(handles.x[i][e]), val(handles.w[i]), val(handles.pi[i][e]));
                if pi != x * w {
                    out.push(format!("pi[{e},{}] = {pi} but x*w = {}", i + 1, x * w));
                }
                sum += pi;
            }
            if sum != f {
                out.push(format!("edge {e}: sum of pi {sum} != flow {f}"));
            }
        }
        if !handles.phi4.is_empty() {
            let mut sum = 0;
            for i in 0..k {
                for (j, &p) in handles.phi4[i][e].iter().enumerate() {
                    let expect = val(handles.x[i][e]) * val(handles.zeta[i][j]);
                    if val(p) != expect {
                        out.push(format!("phi4[{e},{},{j}] = {} but x*zeta = {expect}", i + 1, val(p)));
                    }
                    sum += val(p) << j;
                }
            }
            if sum != f {
                out.push(format!("edge {e}: bit-weighted sum {sum} != flow {f}"));
            }
        }
        for i in 0..handles.phi.len() {
            let expect = val(handles.y[i][e]) * (val(handles.d[i][edge.head]) - val(handles.d[i][edge.tail]));
            if val(handles.phi[i][e]) != expect {
                out.push(format!("phi[{e},{}] = {} but y*(d_v-d_u) = {expect}", i + 1, val(handles.phi[i][e])));
            }
        }
    }
    for (i, zeta) in handles.zeta.iter().enumerate() {
        let expanded: i64 = zeta.iter().enumerate().map(|(j, &z)| val(z) << j).sum();
        if expanded != val(handles.w[i]) {
            out.push(format!("w[{}] = {} but bits give {expanded}", i + 1, val(handles.w[i])));
        }
    }
    if handles.formulation == Some(Formulation::PathsOrCycles) {
        let s = network.source();
        for i in 0..k {
            for v in 0..network.node_count() {
                let deg: i64 = network.out_edges(v).iter().map(|&e| val(handles.x[i][e])).sum();
                if deg > 1 {
                    out.push(format!("element {}: node {v} has out-degree {deg}", i + 1));
                }
            }
            let lhs: i64 = network.out_edges(s).iter().map(|&e| val(handles.x[i][e])).sum::<i64>()
                + handles.c[i].iter().map(|&c| val(c)).sum::<i64>();
            let ok = match handles.cardinality {
                Cardinality::AtMostK => lhs <= 1,
                Cardinality::ExactlyK => lhs == 1,
            };
            if !ok {
                out.push(format!("element {}: source edges plus cycle starts = {lhs}", i + 1));
            }
        }
    }
    out
}
