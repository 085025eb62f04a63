//! Numeric 3D processing invoked by the rule layer.
//!
//! Everything here is a pure function of its inputs: ground projection,
//! Hough line detection, slab segmentation, plane fitting, oriented boxes
//! and the topology predicates between them. Callers (the processing
//! built-ins) sort results canonically before inserting them into the
//! knowledge base, so evaluation order never leaks into run output.

mod boxes;
mod grid;
mod hough;
mod plane;
mod segmentation;
mod topology;

pub use boxes::{
    box_descriptors, box_iou, oriented_box_from_points, BoundingBox, Descriptors, Orientation,
    SizeClass, MIN_HALF_EXTENT,
};
pub use grid::{project_to_ground, OccupancyGrid2D};
pub use hough::{hough_lines, HoughParams, LineSegment2D};
pub use plane::{fit_plane, PlaneFit};
pub use segmentation::{back_z_projection, sweep_horizontal_slab};
pub use topology::{box_distance, is_connected, is_parallel, is_perpendicular};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("operation requires a non-empty point set")]
    EmptyInput,
    #[error("operation requires at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("direction vector must be non-zero and horizontal")]
    ZeroDirection,
}

pub(crate) fn invalid(msg: impl Into<String>) -> GeometryError {
    GeometryError::InvalidParameter(msg.into())
}
