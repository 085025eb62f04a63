//! Knowledge-guided detection of building elements in 3D point clouds.
//!
//! The crate couples a small forward-chaining rule engine with a set of 3D
//! processing routines (ground projection, Hough line detection, plane
//! fitting, slab sweeps). Rules select and parameterize the processing steps
//! through registered built-ins; detection results flow back into a
//! knowledge base of classes, individuals and property assertions, where
//! further rules annotate them semantically (walls, ground, panels, gate
//! counters).
//!
//! Module map:
//!
//! * [`pointcloud`] — cloud representation, XYZ/PLY I/O, bounds, cropping
//! * [`geometry`] — grids, Hough lines, plane fits, boxes, topology predicates
//! * [`knowledge`] — class taxonomy, individuals, assertions, pattern queries
//! * [`rules`] — rule DSL parser, safety validation, fixpoint evaluator
//! * [`builtins`] — processing built-ins bridging rules and geometry
//! * [`pipeline`] — the specific/generic detection workflows and scoring
//! * [`scenegen`] — synthetic indoor scene generator with ground truth

pub mod builtins;
pub mod geometry;
pub mod knowledge;
pub mod pipeline;
pub mod pointcloud;
pub mod rules;
pub mod scenegen;

/// Rule files shipped with the crate, usable as `--rules builtin:<name>`
/// from the CLI or directly in tests.
pub mod shipped {
    /// Generic-knowledge rule set: geometry, topology, semantic and
    /// refinement stages for scenes without prior object positions.
    pub const GENERIC_RULES: &str = include_str!("../rules/generic.wrl");
    /// Specific-knowledge rule set: detection driven by known prior
    /// positions of individuals already present in the knowledge base.
    pub const SPECIFIC_RULES: &str = include_str!("../rules/specific.wrl");
}
// TODO(scaffold): modules and rule files are being filled in bottom-up.
