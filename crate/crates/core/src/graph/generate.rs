use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, EdgeSelection, FlowNetwork, InvalidNetwork, NodeId};
use crate::formulations::{Decomposition, Element, ElementKind, ProblemKind};

/// Knobs for [`generate_instance_with`]. Defaults draw weights from `[1, 10]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub min_weight: u64,
    pub max_weight: u64,
    /// Chance of each cycle splice into an s-t element, and of a
    /// paths-or-cycles element being a cycle.
    pub cycle_probability: f64,
    pub max_cycles_per_element: usize,
    /// Nodes on a spliced cycle besides the node it returns to.
    pub max_cycle_nodes: usize,
    /// Walks only: how many times a spliced cycle may be traversed.
    pub max_cycle_repeats: usize,
    /// Chance that an interior node not assigned to an element joins its base path anyway.
    pub extra_node_probability: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            min_weight: 1,
            max_weight: 10,
            cycle_probability: 0.5,
            max_cycles_per_element: 2,
            max_cycle_nodes: 3,
            max_cycle_repeats: 2,
            extra_node_probability: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub network: FlowNetwork,
    /// The elements whose superposition defines the network's flow.
    pub decomposition: Decomposition,
}

pub fn generate_instance(
    node_count: usize,
    element_count: usize,
    problem: ProblemKind,
    seed: u64,
) -> Result<GeneratedInstance, InvalidNetwork> {
    generate_instance_with(&GeneratorConfig::default(), node_count, element_count, problem, seed)
}

/// Builds a flow network by superposing `element_count` random weighted
/// elements of the requested kind on nodes `0..node_count` (source 0, sink
/// `node_count - 1`). Every interior node is visited by some s-t element.
pub fn generate_instance_with(
    config: &GeneratorConfig,
    node_count: usize,
    element_count: usize,
    problem: ProblemKind,
    seed: u64,
) -> Result<GeneratedInstance, InvalidNetwork> {
    assert!(node_count >= 2, "need at least a source and a sink");
    assert!(element_count >= 1, "need at least one element");
    assert!(config.min_weight >= 1 && config.min_weight <= config.max_weight);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, t) = (0, node_count - 1);
    let interior: Vec<NodeId> = (1..node_count - 1).collect();

    let mut is_cycle = vec![false; element_count];
    if problem == ProblemKind::PathsOrCycles && interior.len() >= 2 {
        for flag in is_cycle.iter_mut().skip(1) {
            *flag = rng.gen_bool(config.cycle_probability);
        }
    }
    let path_slots: Vec<usize> = (0..element_count).filter(|&i| !is_cycle[i]).collect();
    let cycle_slots: Vec<usize> = (0..element_count).filter(|&i| is_cycle[i]).collect();

    let mut assigned: Vec<Vec<NodeId>> = vec![Vec::new(); element_count];
    let mut order = interior.clone();
    order.shuffle(&mut rng);
    for (j, v) in order.into_iter().enumerate() {
        assigned[path_slots[j % path_slots.len()]].push(v);
    }

    let mut sequences: Vec<(ElementKind, Vec<NodeId>, u64)> = Vec::with_capacity(element_count);
    let mut used_interior: Vec<NodeId> = Vec::new();
    for &i in &path_slots {
        let mut base = assigned[i].clone();
        for &v in &interior {
            if !base.contains(&v) && rng.gen_bool(config.extra_node_probability) {
                base.push(v);
            }
        }
        base.shuffle(&mut rng);
        let mut seq = Vec::with_capacity(base.len() + 2);
        seq.push(s);
        seq.extend(&base);
        seq.push(t);
        let kind = match problem {
            ProblemKind::PathsOrCycles => ElementKind::Path,
            ProblemKind::Trails => {
                splice_cycles(config, &mut rng, &mut seq, &interior, false);
                ElementKind::Trail
            }
            ProblemKind::Walks => {
                splice_cycles(config, &mut rng, &mut seq, &interior, true);
                ElementKind::Walk
            }
        };
        for &v in &seq[1..seq.len() - 1] {
            if !used_interior.contains(&v) {
                used_interior.push(v);
            }
        }
        let weight = rng.gen_range(config.min_weight..=config.max_weight);
        sequences.push((kind, seq, weight));
    }
    for _ in &cycle_slots {
        let weight = rng.gen_range(config.min_weight..=config.max_weight);
        match random_cycle(config, &mut rng, &used_interior, &interior) {
            Some(cycle) => sequences.push((ElementKind::Cycle, canonical_cycle(cycle), weight)),
            None => sequences.push((ElementKind::Path, vec![s, t], weight)),
        }
    }

    let mut flows: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for (_, seq, weight) in &sequences {
        for pair in seq.windows(2) {
            *flows.entry((pair[0], pair[1])).or_default() += weight;
        }
    }
    let edges: Vec<Edge> = flows.into_iter().map(|((u, v), f)| Edge::new(u, v, f)).collect();
    let name = format!("gen-n{node_count}-k{element_count}-{}-s{seed}", problem.label());
    let network = FlowNetwork::new(name, node_count, edges)?;

    let elements = sequences
        .into_iter()
        .map(|(kind, nodes, weight)| {
            let multiplicity =
                EdgeSelection::from_node_sequence(&network, &nodes).expect("edges exist by construction");
            Element { kind, nodes, multiplicity, weight }
        })
        .collect();
    Ok(GeneratedInstance { network, decomposition: Decomposition::new(problem, elements) })
}

/// Splices closed detours `v -> a1 -> ... -> v` into an s-t node sequence at
/// random interior positions. Without repeats every added edge is new to
/// the sequence, so trails stay trails.
fn splice_cycles(
    config: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
    seq: &mut Vec<NodeId>,
    interior: &[NodeId],
    allow_repeats: bool,
) {
    if interior.len() < 2 || config.max_cycle_nodes == 0 {
        return;
    }
    for _ in 0..config.max_cycles_per_element {
        if seq.len() < 3 || !rng.gen_bool(config.cycle_probability) {
            continue;
        }
        for _attempt in 0..8 {
            let pos = rng.gen_range(1..seq.len() - 1);
            let anchor = seq[pos];
            let others: Vec<NodeId> = interior.iter().copied().filter(|&v| v != anchor).collect();
            let len = rng.gen_range(1..=config.max_cycle_nodes.min(others.len()));
            let detour: Vec<NodeId> = others.choose_multiple(rng, len).copied().collect();
            let mut lap = detour.clone();
            lap.push(anchor);
            if !allow_repeats {
                let used: HashSet<(NodeId, NodeId)> = seq.windows(2).map(|p| (p[0], p[1])).collect();
                let mut prev = anchor;
                let fresh = lap.iter().all(|&v| {
                    let ok = !used.contains(&(prev, v));
                    prev = v;
                    ok
                });
                if !fresh {
                    continue;
                }
            }
            let repeats = if allow_repeats { rng.gen_range(1..=config.max_cycle_repeats.max(1)) } else { 1 };
            let insertion: Vec<NodeId> = std::iter::repeat(lap).take(repeats).flatten().collect();
            seq.splice(pos + 1..pos + 1, insertion);
            break;
        }
    }
}

fn random_cycle(
    config: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
    used_interior: &[NodeId],
    interior: &[NodeId],
) -> Option<Vec<NodeId>> {
    let &anchor = used_interior.choose(rng)?;
    let others: Vec<NodeId> = interior.iter().copied().filter(|&v| v != anchor).collect();
    if others.is_empty() {
        return None;
    }
    let len = rng.gen_range(1..=config.max_cycle_nodes.max(1).min(others.len()));
    let mut cycle = vec![anchor];
    cycle.extend(others.choose_multiple(rng, len));
    cycle.push(anchor);
    Some(cycle)
}

/// Rotates a closed node sequence so it starts (and ends) at its smallest node.
pub(crate) fn canonical_cycle(cycle: Vec<NodeId>) -> Vec<NodeId> {
    let body = &cycle[..cycle.len() - 1];
    let start = body.iter().enumerate().min_by_key(|(_, &v)| v).map_or(0, |(i, _)| i);
    let mut out: Vec<NodeId> = body[start..].iter().chain(&body[..start]).copied().collect();
    out.push(out[0]);
    out
}
