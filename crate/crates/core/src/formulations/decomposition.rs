use std::fmt;
use std::str::FromStr;

use crate::graph::{EdgeSelection, NodeId};

/// The three decomposition problems: which kind of element is allowed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    /// s-t paths or cycles.
    PathsOrCycles,
    /// s-t trails (no repeated edge).
    Trails,
    /// s-t walks.
    Walks,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [ProblemKind::PathsOrCycles, ProblemKind::Trails, ProblemKind::Walks];

    pub fn label(self) -> &'static str {
        match self {
            ProblemKind::PathsOrCycles => "paths-or-cycles",
            ProblemKind::Trails => "trails",
            ProblemKind::Walks => "walks",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pc" | "paths-or-cycles" => Ok(ProblemKind::PathsOrCycles),
            "trail" | "trails" | "trail-cg" | "trail-reach" => Ok(ProblemKind::Trails),
            "walk" | "walks" => Ok(ProblemKind::Walks),
            other => Err(format!("unknown problem '{other}'")),
        }
    }
}

/// Which integer program is used to solve a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    PathsOrCycles,
    /// Trails by constraint generation over violating components.
    TrailsCg,
    /// Trails by the reachability encoding with binary edge variables.
    TrailsReach,
    /// Walks by the reachability encoding with integer edge variables.
    Walks,
}

impl Formulation {
    pub const ALL: [Formulation; 4] =
        [Formulation::PathsOrCycles, Formulation::TrailsCg, Formulation::TrailsReach, Formulation::Walks];

    pub fn problem(self) -> ProblemKind {
        match self {
            Formulation::PathsOrCycles => ProblemKind::PathsOrCycles,
            Formulation::TrailsCg | Formulation::TrailsReach => ProblemKind::Trails,
            Formulation::Walks => ProblemKind::Walks,
        }
    }

    /// Short name used on the command line.
    pub fn flag(self) -> &'static str {
        match self {
            Formulation::PathsOrCycles => "pc",
            Formulation::TrailsCg => "trail-cg",
            Formulation::TrailsReach => "trail-reach",
            Formulation::Walks => "walk",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.flag() == s)
            .ok_or_else(|| format!("unknown variant '{s}' (expected pc, trail-cg, trail-reach or walk)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Cardinality {
    #[default]
    AtMostK,
    ExactlyK,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VariantSpec {
    pub formulation: Formulation,
    pub cardinality: Cardinality,
}

impl VariantSpec {
    pub fn at_most(formulation: Formulation) -> Self {
        VariantSpec { formulation, cardinality: Cardinality::AtMostK }
    }

    pub fn exactly(formulation: Formulation) -> Self {
        VariantSpec { formulation, cardinality: Cardinality::ExactlyK }
    }

    pub fn problem(&self) -> ProblemKind {
        self.formulation.problem()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Path,
    Cycle,
    Trail,
    Walk,
}

impl ElementKind {
    pub fn label(self) -> &'static str {
        match self {
            ElementKind::Path => "path",
            ElementKind::Cycle => "cycle",
            ElementKind::Trail => "trail",
            ElementKind::Walk => "walk",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(ElementKind::Path),
            "cycle" => Ok(ElementKind::Cycle),
            "trail" => Ok(ElementKind::Trail),
            "walk" => Ok(ElementKind::Walk),
            other => Err(format!("unknown element kind '{other}'")),
        }
    }
}

/// One weighted element of a decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub nodes: Vec<NodeId>,
    pub multiplicity: EdgeSelection,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub problem: ProblemKind,
    pub elements: Vec<Element>,
}

impl Decomposition {
    pub fn new(problem: ProblemKind, elements: Vec<Element>) -> Self {
        Decomposition { problem, elements }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn count_kind(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }
}
