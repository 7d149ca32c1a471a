//! The versioned JSON result format shared by `decompose`, `gen` and `verify`.

use anyhow::{bail, Context};
use mfd::graph::{EdgeSelection, FlowNetwork};
use mfd::search::Probe;
use mfd::{Decomposition, Element, ElementKind, ProblemKind};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema: u32,
    pub instances: Vec<InstanceRecord>,
}

impl ResultFile {
    pub fn new(instances: Vec<InstanceRecord>) -> Self {
        ResultFile { schema: SCHEMA_VERSION, instances }
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let file: ResultFile = serde_json::from_str(text).context("malformed result JSON")?;
        if file.schema != SCHEMA_VERSION {
            bail!("unsupported schema version {} (expected {SCHEMA_VERSION})", file.schema);
        }
        Ok(file)
    }
}

/// `k_star` is a number, the string `"infeasible"`, or null when unknown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KStar {
    Value(usize),
    Label(String),
}

impl KStar {
    pub fn infeasible() -> Self {
        KStar::Label("infeasible".into())
    }

    pub fn value(&self) -> Option<usize> {
        match self {
            KStar::Value(k) => Some(*k),
            KStar::Label(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub kind: String,
    pub nodes: Vec<usize>,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub k: usize,
    pub verdict: String,
    pub seconds: f64,
    /// Components added by constraint generation.
    pub cg_iterations: usize,
    /// Solver calls made for this `k`.
    pub rounds: usize,
}

impl From<&Probe> for ProbeRecord {
    fn from(p: &Probe) -> Self {
        ProbeRecord {
            k: p.k,
            verdict: p.verdict.label().into(),
            seconds: p.elapsed.as_secs_f64(),
            cg_iterations: p.cg_iterations(),
            rounds: p.rounds,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    /// Command-line variant name (`pc`, `trail-cg`, ...).
    pub variant: String,
    /// `at_most_k` or `exactly_k`.
    pub cardinality: String,
    /// `min`, `exactly_k` or `generated`.
    pub mode: String,
    /// The requested `k` in `exactly_k` mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// `feasible`, `infeasible`, `budget_exceeded`, `error` or `generated`.
    pub status: String,
    pub k_star: Option<KStar>,
    #[serde(default)]
    pub elements: Vec<ElementRecord>,
    #[serde(default)]
    pub probes: Vec<ProbeRecord>,
    #[serde(default)]
    pub timings: Timings,
    #[serde(default)]
    pub error: Option<String>,
}

impl InstanceRecord {
    pub fn blank(name: &str, variant: &str, mode: &str) -> Self {
        InstanceRecord {
            name: name.to_string(),
            variant: variant.to_string(),
            cardinality: if mode == "exactly_k" { "exactly_k" } else { "at_most_k" }.into(),
            mode: mode.to_string(),
            k: None,
            status: String::new(),
            k_star: None,
            elements: Vec::new(),
            probes: Vec::new(),
            timings: Timings::default(),
            error: None,
        }
    }

    pub fn set_elements(&mut self, decomposition: &Decomposition) {
        self.elements = decomposition
            .elements
            .iter()
            .map(|e| ElementRecord { kind: e.kind.label().into(), nodes: e.nodes.clone(), weight: e.weight })
            .collect();
    }

    /// Rebuilds a decomposition over `network`. Node pairs that are not
    /// edges leave an all-zero multiplicity for the verifier to report.
    pub fn decomposition(&self, network: &FlowNetwork, problem: ProblemKind) -> anyhow::Result<Decomposition> {
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, rec) in self.elements.iter().enumerate() {
            let kind: ElementKind = rec.kind.parse().map_err(|e: String| anyhow::anyhow!("element {}: {e}", i + 1))?;
            let multiplicity = EdgeSelection::from_node_sequence(network, &rec.nodes)
                .unwrap_or_else(|| EdgeSelection::zeros(network.edge_count()));
            elements.push(Element { kind, nodes: rec.nodes.clone(), multiplicity, weight: rec.weight });
        }
        Ok(Decomposition::new(problem, elements))
    }
}
