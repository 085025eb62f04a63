//! Oriented bounding boxes and the descriptors derived from them.
//!
//! Boxes carry an orthonormal right-handed frame whose `w` axis is always
//! the global up direction `(0, 0, 1)`; only the horizontal `u` axis varies.
//! The 8 corners are derivable as `c ± hu·u ± hv·v ± hw·w`.

use nalgebra::{Point3, Unit, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::plane::PlaneFit;
use super::GeometryError;

/// Smallest allowed half-extent; planar point sets would otherwise produce
/// zero-volume boxes.
pub const MIN_HALF_EXTENT: f64 = 0.005;

/// Box orientation class from the dominant plane (the face spanned by the
/// two largest extents).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Vertical,
    Horizontal,
    Oblique,
}

impl Orientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Orientation::Vertical => "Vertical",
            Orientation::Horizontal => "Horizontal",
            Orientation::Oblique => "Oblique",
        }
    }
}

/// Size class on the largest horizontal extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SizeClass {
    Big,
    Small,
}

impl SizeClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SizeClass::Big => "Big",
            SizeClass::Small => "Small",
        }
    }
}

/// Scalar descriptors of a detected box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptors {
    pub orientation: Orientation,
    pub height: f64,
    pub size: SizeClass,
    pub planarity_rms: f64,
}

/// An oriented box: center, horizontal `u` axis, derived `v = w × u`,
/// global-up `w`, and positive half-extents `(hu, hv, hw)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxRepr", into = "BoxRepr")]
pub struct BoundingBox {
    center: Point3<f64>,
    u: Unit<Vector3<f64>>,
    half_extents: [f64; 3],
}

impl BoundingBox {
    /// Build a box from a center, a horizontal direction for the `u` axis
    /// (given in the ground plane) and half-extents `(hu, hv, hw)`.
    pub fn new(
        center: Point3<f64>,
        direction: Vector2<f64>,
        half_extents: [f64; 3],
    ) -> Result<BoundingBox, GeometryError> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(super::invalid("box center must be finite"));
        }
        let norm = direction.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        for &h in &half_extents {
            if !h.is_finite() || h <= 0.0 {
                return Err(super::invalid("half-extents must be positive"));
            }
        }
        let u = Unit::new_normalize(Vector3::new(direction.x, direction.y, 0.0));
        Ok(BoundingBox {
            center,
            u,
            half_extents,
        })
    }

    /// Axis-aligned box spanning the given world intervals.
    pub fn axis_aligned(min: Point3<f64>, max: Point3<f64>) -> Result<BoundingBox, GeometryError> {
        let he = [
            (max.x - min.x) / 2.0,
            (max.y - min.y) / 2.0,
            (max.z - min.z) / 2.0,
        ];
        BoundingBox::new(
            nalgebra::center(&min, &max),
            Vector2::new(1.0, 0.0),
            he.map(|h| h.max(MIN_HALF_EXTENT)),
        )
    }

    pub fn center(&self) -> Point3<f64> {
        self.center
    }

    pub fn axis_u(&self) -> Unit<Vector3<f64>> {
        self.u
    }

    /// Horizontal normal of `u` chosen so that `(u, v, w)` is right-handed.
    pub fn axis_v(&self) -> Unit<Vector3<f64>> {
        Unit::new_unchecked(Vector3::z().cross(&self.u))
    }

    pub fn axis_w(&self) -> Unit<Vector3<f64>> {
        Unit::new_unchecked(Vector3::z())
    }

    pub fn half_extents(&self) -> [f64; 3] {
        self.half_extents
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_extents[2]
    }

    pub fn base_elevation(&self) -> f64 {
        self.center.z - self.half_extents[2]
    }

    /// Coordinates of `p` in the box frame `(u, v, w)` relative to the center.
    pub fn to_local(&self, p: &Point3<f64>) -> Vector3<f64> {
        let d = p - self.center;
        Vector3::new(d.dot(&self.u), d.dot(&self.axis_v()), d.z)
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        self.contains_with_margin(p, 0.0)
    }

    pub fn contains_with_margin(&self, p: &Point3<f64>, margin: f64) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= self.half_extents[0] + margin
            && l.y.abs() <= self.half_extents[1] + margin
            && l.z.abs() <= self.half_extents[2] + margin
    }

    /// The 8 corners, in the fixed order of sign triples
    /// `(-,-,-),(+,-,-),(-,+,-),(+,+,-),(-,-,+),(+,-,+),(-,+,+),(+,+,+)`.
    pub fn corners(&self) -> [Point3<f64>; 8] {
        let v = self.axis_v();
        let [hu, hv, hw] = self.half_extents;
        let du = self.u.into_inner() * hu;
        let dv = v.into_inner() * hv;
        let dw = Vector3::z() * hw;
        let mut out = [self.center; 8];
        for (i, c) in out.iter_mut().enumerate() {
            let su = if i & 1 == 0 { -1.0 } else { 1.0 };
            let sv = if i & 2 == 0 { -1.0 } else { 1.0 };
            let sw = if i & 4 == 0 { -1.0 } else { 1.0 };
            *c += du * su + dv * sv + dw * sw;
        }
        out
    }

    /// Unit normal of the dominant plane: the axis of the smallest
    /// half-extent.
    pub fn dominant_plane_normal(&self) -> Unit<Vector3<f64>> {
        let [hu, hv, hw] = self.half_extents;
        if hw < hu && hw < hv {
            self.axis_w()
        } else if hu <= hv {
            self.u
        } else {
            self.axis_v()
        }
    }

    /// Angle of the `u` axis in the ground plane, folded into `[0, π)`.
    pub fn u_angle(&self) -> f64 {
        let a = self.u.y.atan2(self.u.x);
        let a = if a < 0.0 {
            a + std::f64::consts::PI
        } else {
            a
        };
        if a >= std::f64::consts::PI {
            a - std::f64::consts::PI
        } else {
            a
        }
    }

    /// The box rigidly moved by a rotation about the z axis (radians)
    /// followed by a translation.
    pub fn transformed(&self, rot_z: f64, translation: Vector3<f64>) -> BoundingBox {
        let (s, c) = rot_z.sin_cos();
        let rot = |v: Vector3<f64>| Vector3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z);
        let center = Point3::from(rot(self.center.coords) + translation);
        let u = rot(self.u.into_inner());
        BoundingBox {
            center,
            u: Unit::new_normalize(u),
            half_extents: self.half_extents,
        }
    }

    /// Bit-exact key over all defining fields, for interning.
    pub fn bits_key(&self) -> [u64; 8] {
        [
            self.center.x.to_bits(),
            self.center.y.to_bits(),
            self.center.z.to_bits(),
            self.u.x.to_bits(),
            self.u.y.to_bits(),
            self.half_extents[0].to_bits(),
            self.half_extents[1].to_bits(),
            self.half_extents[2].to_bits(),
        ]
    }
}

/// Serialized form: frame plus the 8 corners, emitted redundantly for
/// human inspection and ignored on load.
#[derive(Serialize, Deserialize)]
struct BoxRepr {
    center: [f64; 3],
    axis_u: [f64; 3],
    axis_v: [f64; 3],
    half_extents: [f64; 3],
    #[serde(default)]
    corners: Option<Vec<[f64; 3]>>,
}

impl From<BoundingBox> for BoxRepr {
    fn from(b: BoundingBox) -> BoxRepr {
        let v = b.axis_v();
        BoxRepr {
            center: [b.center.x, b.center.y, b.center.z],
            axis_u: [b.u.x, b.u.y, b.u.z],
            axis_v: [v.x, v.y, v.z],
            half_extents: b.half_extents,
            corners: Some(b.corners().iter().map(|c| [c.x, c.y, c.z]).collect()),
        }
    }
}

impl TryFrom<BoxRepr> for BoundingBox {
    type Error = String;

    fn try_from(r: BoxRepr) -> Result<BoundingBox, String> {
        if r.axis_u[2].abs() > 1e-9 {
            return Err("box axis_u must be horizontal".into());
        }
        for v in r.center.iter().chain(&r.axis_u).chain(&r.half_extents) {
            if !v.is_finite() {
                return Err("box fields must be finite".into());
            }
        }
        let u = Vector3::new(r.axis_u[0], r.axis_u[1], r.axis_u[2]);
        if (u.norm() - 1.0).abs() > 1e-9 {
            return Err("box axis_u must be a unit vector".into());
        }
        if r.half_extents.iter().any(|&h| h <= 0.0) {
            return Err("box half-extents must be positive".into());
        }
        // Keep the stored bits as-is (no renormalization) so save/load
        // round-trips are bit-exact.
        Ok(BoundingBox {
            center: Point3::new(r.center[0], r.center[1], r.center[2]),
            u: Unit::new_unchecked(u),
            half_extents: r.half_extents,
        })
    }
}

/// Tight oriented box around `points` with `u` along `direction`; extents
/// below [`MIN_HALF_EXTENT`] are clamped.
pub fn oriented_box_from_points(
    points: &[Point3<f64>],
    direction: Vector2<f64>,
) -> Result<BoundingBox, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let norm = direction.norm();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(GeometryError::ZeroDirection);
    }
    let u = Vector3::new(direction.x / norm, direction.y / norm, 0.0);
    let v = Vector3::z().cross(&u);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        let c = p.coords;
        for (i, axis) in [u, v, Vector3::z()].iter().enumerate() {
            let t = c.dot(axis);
            lo[i] = lo[i].min(t);
            hi[i] = hi[i].max(t);
        }
    }
    let mid = [
        (lo[0] + hi[0]) / 2.0,
        (lo[1] + hi[1]) / 2.0,
        (lo[2] + hi[2]) / 2.0,
    ];
    let center = Point3::from(u * mid[0] + v * mid[1] + Vector3::z() * mid[2]);
    let he = [
        ((hi[0] - lo[0]) / 2.0).max(MIN_HALF_EXTENT),
        ((hi[1] - lo[1]) / 2.0).max(MIN_HALF_EXTENT),
        ((hi[2] - lo[2]) / 2.0).max(MIN_HALF_EXTENT),
    ];
    BoundingBox::new(center, direction, he)
}

/// Classify a box into descriptors.
///
/// Vertical iff the smallest half-extent is horizontal (`hu` or `hv`),
/// horizontal iff it is `hw`, oblique on exact ties. `Big` iff the largest
/// horizontal extent reaches `big_threshold`. Planarity is copied from the
/// source fit when one exists.
pub fn box_descriptors(
    bbox: &BoundingBox,
    source_fit: Option<&PlaneFit>,
    big_threshold: f64,
) -> Descriptors {
    let [hu, hv, hw] = bbox.half_extents();
    let min_horiz = hu.min(hv);
    let orientation = if hw < min_horiz {
        Orientation::Horizontal
    } else if min_horiz < hw {
        Orientation::Vertical
    } else {
        Orientation::Oblique
    };
    let size = if 2.0 * hu.max(hv) >= big_threshold {
        SizeClass::Big
    } else {
        SizeClass::Small
    };
    Descriptors {
        orientation,
        height: bbox.height(),
        size,
        planarity_rms: source_fit.map_or(0.0, |f| f.rms_residual),
    }
}

/// Exact volume IoU of two boxes sharing the global up axis: z-interval
/// overlap times the area of the intersection of the two footprint
/// rectangles (convex polygon clipping).
pub fn box_iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let za = (a.base_elevation(), a.center().z + a.half_extents()[2]);
    let zb = (b.base_elevation(), b.center().z + b.half_extents()[2]);
    let dz = (za.1.min(zb.1) - za.0.max(zb.0)).max(0.0);
    if dz == 0.0 {
        return 0.0;
    }
    let area = footprint_intersection_area(a, b);
    if area == 0.0 {
        return 0.0;
    }
    let inter = area * dz;
    let vol = |x: &BoundingBox| {
        let [hu, hv, hw] = x.half_extents();
        8.0 * hu * hv * hw
    };
    inter / (vol(a) + vol(b) - inter)
}

fn footprint_corners(b: &BoundingBox) -> [[f64; 2]; 4] {
    let c = b.center();
    let u = b.axis_u();
    let v = b.axis_v();
    let [hu, hv, _] = b.half_extents();
    // Counter-clockwise.
    let mk = |su: f64, sv: f64| {
        [
            c.x + su * hu * u.x + sv * hv * v.x,
            c.y + su * hu * u.y + sv * hv * v.y,
        ]
    };
    [mk(1.0, 1.0), mk(-1.0, 1.0), mk(-1.0, -1.0), mk(1.0, -1.0)]
}

fn footprint_intersection_area(a: &BoundingBox, b: &BoundingBox) -> f64 {
    // Sutherland-Hodgman: clip footprint of `a` by each edge of `b`.
    let mut poly: Vec<[f64; 2]> = footprint_corners(a).to_vec();
    let clip = footprint_corners(b);
    for i in 0..4 {
        if poly.is_empty() {
            return 0.0;
        }
        let p0 = clip[i];
        let p1 = clip[(i + 1) % 4];
        let edge = [p1[0] - p0[0], p1[1] - p0[1]];
        let inside = |q: &[f64; 2]| edge[0] * (q[1] - p0[1]) - edge[1] * (q[0] - p0[0]) >= 0.0;
        let mut next = Vec::with_capacity(poly.len() + 2);
        for j in 0..poly.len() {
            let cur = poly[j];
            let prev = poly[(j + poly.len() - 1) % poly.len()];
            let cur_in = inside(&cur);
            let prev_in = inside(&prev);
            if cur_in != prev_in {
                // Edge crossing: intersect segment prev->cur with the clip line.
                let dx = cur[0] - prev[0];
                let dy = cur[1] - prev[1];
                let denom = edge[0] * dy - edge[1] * dx;
                if denom.abs() > 1e-15 {
                    let t = (edge[0] * (p0[1] - prev[1]) - edge[1] * (p0[0] - prev[0])) / denom;
                    next.push([prev[0] + t * dx, prev[1] + t * dy]);
                }
            }
            if cur_in {
                next.push(cur);
            }
        }
        poly = next;
    }
    if poly.len() < 3 {
        return 0.0;
    }
    // Shoelace.
    let mut area = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        area += p[0] * q[1] - q[0] * p[1];
    }
    area.abs() / 2.0
}
