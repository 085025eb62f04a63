//! Spatial predicates between oriented boxes: perpendicularity,
//! parallelism and connectedness.
//!
//! All boxes share the global up axis, so the distance between two solid
//! boxes decomposes exactly into a vertical interval gap and a planar
//! rectangle-rectangle distance.

use super::boxes::BoundingBox;

fn normal_angle_deg(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let na = a.dominant_plane_normal();
    let nb = b.dominant_plane_normal();
    let d = na.dot(&nb).abs().clamp(0.0, 1.0);
    d.acos().to_degrees()
}

/// True iff the dominant-plane normals are within `angle_tol` degrees of 90°.
pub fn is_perpendicular(a: &BoundingBox, b: &BoundingBox, angle_tol: f64) -> bool {
    (90.0 - normal_angle_deg(a, b)).abs() <= angle_tol
}

/// True iff the dominant-plane normals are within `angle_tol` degrees of 0°
/// (or 180°; normals are compared up to sign).
pub fn is_parallel(a: &BoundingBox, b: &BoundingBox, angle_tol: f64) -> bool {
    normal_angle_deg(a, b) <= angle_tol
}

/// True iff the minimum distance between the two solid boxes is at most
/// `gap_tol`.
pub fn is_connected(a: &BoundingBox, b: &BoundingBox, gap_tol: f64) -> bool {
    box_distance(a, b) <= gap_tol
}

/// Minimum distance between two solid oriented boxes (0 when they touch or
/// interpenetrate).
pub fn box_distance(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let za = (a.base_elevation(), a.center().z + a.half_extents()[2]);
    let zb = (b.base_elevation(), b.center().z + b.half_extents()[2]);
    let dz = (za.0.max(zb.0) - za.1.min(zb.1)).max(0.0);
    let dxy = rect_distance(&footprint(a), &footprint(b));
    (dz * dz + dxy * dxy).sqrt()
}

struct Rect2 {
    corners: [[f64; 2]; 4],
    center: [f64; 2],
    axes: [[f64; 2]; 2],
    half: [f64; 2],
}

fn footprint(b: &BoundingBox) -> Rect2 {
    let c = b.center();
    let u = b.axis_u();
    let v = b.axis_v();
    let [hu, hv, _] = b.half_extents();
    let mk = |su: f64, sv: f64| {
        [
            c.x + su * hu * u.x + sv * hv * v.x,
            c.y + su * hu * u.y + sv * hv * v.y,
        ]
    };
    Rect2 {
        corners: [mk(1.0, 1.0), mk(-1.0, 1.0), mk(-1.0, -1.0), mk(1.0, -1.0)],
        center: [c.x, c.y],
        axes: [[u.x, u.y], [v.x, v.y]],
        half: [hu, hv],
    }
}

fn projection_radius(r: &Rect2, axis: &[f64; 2]) -> f64 {
    r.axes
        .iter()
        .zip(r.half)
        .map(|(ax, h)| (axis[0] * ax[0] + axis[1] * ax[1]).abs() * h)
        .sum()
}

fn rects_overlap(a: &Rect2, b: &Rect2) -> bool {
    // Separating-axis test over the four rectangle axes.
    let d = [b.center[0] - a.center[0], b.center[1] - a.center[1]];
    for axis in a.axes.iter().chain(b.axes.iter()) {
        let dist = (d[0] * axis[0] + d[1] * axis[1]).abs();
        if dist > projection_radius(a, axis) + projection_radius(b, axis) {
            return false;
        }
    }
    true
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn rect_distance(a: &Rect2, b: &Rect2) -> f64 {
    if rects_overlap(a, b) {
        return 0.0;
    }
    // Disjoint convex polygons: the minimum is attained between a vertex of
    // one and an edge of the other.
    let mut best = f64::INFINITY;
    for (r, s) in [(a, b), (b, a)] {
        for &p in &r.corners {
            for i in 0..4 {
                let d = point_segment_distance(p, s.corners[i], s.corners[(i + 1) % 4]);
                best = best.min(d);
            }
        }
    }
    best
}
