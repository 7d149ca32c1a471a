//! Exact minimum flow decomposition on directed graphs with cycles.
//!
//! Networks come from [`graph`]; [`formulations`] builds feasibility integer
//! programs for a fixed number of elements, [`search`] minimizes that
//! number, and [`verify`] checks the results independently.

pub mod formulations;
pub mod graph;
pub mod milp;
pub mod search;
pub mod verify;

pub use formulations::{Cardinality, Decomposition, Element, ElementKind, Formulation, ProblemKind, VariantSpec};
pub use graph::{Edge, EdgeSelection, FlowNetwork};
pub use search::{min_k, solve_fixed_k, SearchOptions, SearchReport, SearchResult, Strategy};
pub use verify::{brute_force_min, verify_decomposition, OracleLimits, OracleResult};
