//! Total-least-squares plane fitting with inlier gating.
//!
//! The fit direction is the smallest-eigenvector of the point covariance;
//! no RANSAC, since candidates arrive pre-segmented. Deterministic by
//! construction.

use nalgebra::{Matrix3, Point3, Unit, Vector3};

use super::GeometryError;

const SIGN_EPS: f64 = 1e-6;

/// A fitted plane `n·p = d` with its supporting inliers.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFit {
    /// Unit normal, sign-normalized: `n.z >= 0`, and for horizontal normals
    /// the first nonzero of `(n.x, n.y)` is positive.
    pub normal: Unit<Vector3<f64>>,
    /// Offset such that `n·p = d` for on-plane points.
    pub offset: f64,
    /// Indices of points within `dist_threshold` of the plane.
    pub inliers: Vec<usize>,
    /// Root-mean-square residual over the inliers, meters.
    pub rms_residual: f64,
    /// The gating threshold the fit was computed with.
    pub dist_threshold: f64,
}

impl PlaneFit {
    pub fn residual(&self, p: &Point3<f64>) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }
}

/// Fit a plane through `points`; `None` when the points are degenerate
/// (collinear / coincident) or when fewer than `min_inlier_fraction` of them
/// lie within `dist_threshold` of the fitted plane.
pub fn fit_plane(
    points: &[Point3<f64>],
    dist_threshold: f64,
    min_inlier_fraction: f64,
) -> Result<Option<PlaneFit>, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if dist_threshold <= 0.0 {
        return Err(super::invalid("dist_threshold must be positive"));
    }

    let n = points.len() as f64;
    let centroid: Vector3<f64> = points.iter().map(|p| p.coords).sum::<Vector3<f64>>() / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p.coords - centroid;
        cov += d * d.transpose();
    }
    cov /= n;

    let eig = cov.symmetric_eigen();
    // Order eigenpairs ascending by eigenvalue.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lam1 = eig.eigenvalues[order[1]];
    let lam2 = eig.eigenvalues[order[2]];
    if lam2 <= 0.0 || lam1 <= 1e-10 * lam2 {
        // All points coincident or collinear: the plane is underdetermined.
        return Ok(None);
    }

    let mut normal: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    normal.normalize_mut();
    if normal.z < -SIGN_EPS {
        normal = -normal;
    } else if normal.z.abs() <= SIGN_EPS {
        let flip = if normal.x.abs() > 1e-12 {
            normal.x < 0.0
        } else {
            normal.y < 0.0
        };
        if flip {
            normal = -normal;
        }
    }
    let offset = normal.dot(&centroid);

    let mut inliers = Vec::new();
    let mut sq_sum = 0.0;
    for (i, p) in points.iter().enumerate() {
        let r = normal.dot(&p.coords) - offset;
        if r.abs() <= dist_threshold {
            inliers.push(i);
            sq_sum += r * r;
        }
    }
    if (inliers.len() as f64) < min_inlier_fraction * n {
        return Ok(None);
    }
    let rms_residual = (sq_sum / inliers.len() as f64).sqrt();
    Ok(Some(PlaneFit {
        normal: Unit::new_unchecked(normal),
        offset,
        inliers,
        rms_residual,
        dist_threshold,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent eigen-decomposition oracle: classical Jacobi rotations on
    /// the 3x3 covariance, no shared code with the implementation path.
    fn jacobi_smallest_eigenvector(points: &[Point3<f64>]) -> (Vector3<f64>, f64) {
        let n = points.len() as f64;
        let mut c = [0.0f64; 3];
        for p in points {
            for i in 0..3 {
                c[i] += p[i];
            }
        }
        for ci in &mut c {
            *ci /= n;
        }
        let mut a = [[0.0f64; 3]; 3];
        for p in points {
            let d = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] += d[i] * d[j] / n;
                }
            }
        }
        let mut v = [[0.0f64; 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..3 {
                for q in (p + 1)..3 {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..3 {
                for q in (p + 1)..3 {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let cos = 1.0 / (t * t + 1.0).sqrt();
                    let sin = t * cos;
                    for k in 0..3 {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = cos * akp - sin * akq;
                        a[k][q] = sin * akp + cos * akq;
                    }
                    for k in 0..3 {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = cos * apk - sin * aqk;
                        a[q][k] = sin * apk + cos * aqk;
                    }
                    for row in &mut v {
                        let vp = row[p];
                        let vq = row[q];
                        row[p] = cos * vp - sin * vq;
                        row[q] = sin * vp + cos * vq;
                    }
                }
            }
        }
        let mut min_i = 0;
        for i in 1..3 {
            if a[i][i] < a[min_i][min_i] {
                min_i = i;
            }
        }
        let nvec = Vector3::new(v[0][min_i], v[1][min_i], v[2][min_i]).normalize();
        let d = nvec.x * c[0] + nvec.y * c[1] + nvec.z * c[2];
        (nvec, d)
    }

    fn noisy_plane_x2(n: usize, sigma: f64, seed: u64) -> Vec<Point3<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let y = rng.gen_range(0.0..8.0);
                let z = rng.gen_range(0.0..5.0);
                let noise: f64 = {
                    // Box-Muller keeps the test free of extra deps.
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    (-2.0 * u1.ln()).sqrt() * u2.cos()
                };
                Point3::new(2.0 + sigma * noise, y, z)
            })
            .collect()
    }

    #[test]
    fn exact_horizontal_plane() {
        let pts: Vec<Point3<f64>> = (0..100)
            .map(|i| Point3::new((i % 10) as f64, (i / 10) as f64, 0.0))
            .collect();
        let fit = fit_plane(&pts, 0.02, 0.8).unwrap().unwrap();
        assert!((fit.normal.z - 1.0).abs() < 1e-12);
        assert!(fit.offset.abs() < 1e-12);
        assert_eq!(fit.rms_residual, 0.0);
        assert_eq!(fit.inliers.len(), pts.len());
    }

    #[test]
    fn noisy_vertical_plane_matches_oracle() {
        let pts = noisy_plane_x2(10_000, 0.005, 11);
        let fit = fit_plane(&pts, 0.02, 0.8).unwrap().unwrap();
        // Accuracy against ground truth.
        let angle = fit.normal.dot(&Vector3::x()).abs().clamp(0.0, 1.0).acos();
        assert!(angle.to_degrees() < 1.0, "angle {}", angle.to_degrees());
        assert!((fit.offset - 2.0).abs() < 0.01, "offset {}", fit.offset);
        // Agreement with the independent Jacobi oracle.
        let (on, od) = jacobi_smallest_eigenvector(&pts);
        let dot = fit.normal.dot(&on).abs();
        assert!(dot > 1.0 - 1e-6, "normal disagreement: dot {dot}");
        assert!((fit.offset.abs() - od.abs()).abs() < 1e-6);
    }

    #[test]
    fn uniform_cube_has_no_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point3<f64>> = (0..5_000)
            .map(|_| Point3::new(rng.gen(), rng.gen(), rng.gen()))
            .collect();
        // Oracle: count inliers of the oracle's best-fit plane by hand.
        let (on, od) = jacobi_smallest_eigenvector(&pts);
        let inl = pts
            .iter()
            .filter(|p| (on.dot(&p.coords) - od).abs() <= 0.02)
            .count();
        assert!((inl as f64) < 0.8 * pts.len() as f64);
        assert!(fit_plane(&pts, 0.02, 0.8).unwrap().is_none());
    }

    #[test]
    fn too_few_points_is_an_error() {
        let pts = [Point3::origin(), Point3::new(1.0, 0.0, 0.0)];
        assert!(matches!(
            fit_plane(&pts, 0.02, 0.8),
            Err(GeometryError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts: Vec<Point3<f64>> = (0..50)
            .map(|i| Point3::new(i as f64 * 0.1, i as f64 * 0.2, 0.5))
            .collect();
        assert!(fit_plane(&pts, 0.02, 0.8).unwrap().is_none());
    }

    #[test]
    fn sign_convention_prefers_up_then_positive_x() {
        let pts: Vec<Point3<f64>> = (0..100)
            .map(|i| Point3::new((i % 10) as f64, (i / 10) as f64, 3.0))
            .collect();
        let fit = fit_plane(&pts, 0.02, 0.8).unwrap().unwrap();
        assert!(fit.normal.z > 0.0);
        let pts: Vec<Point3<f64>> = (0..100)
            .map(|i| Point3::new(2.0, (i % 10) as f64, (i / 10) as f64))
            .collect();
        let fit = fit_plane(&pts, 0.02, 0.8).unwrap().unwrap();
        assert!(fit.normal.x > 0.0);
        assert!((fit.offset - 2.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rigid_motion_preserves_residuals(
            seed in 0u64..1000,
            yaw in 0.0..std::f64::consts::TAU,
            pitch in -1.0..1.0f64,
            tx in -10.0..10.0f64, ty in -10.0..10.0f64, tz in -10.0..10.0f64,
        ) {
            let pts = noisy_plane_x2(500, 0.004, seed);
            let rot = nalgebra::Rotation3::from_euler_angles(0.0, pitch, yaw);
            let t = Vector3::new(tx, ty, tz);
            let moved: Vec<Point3<f64>> = pts.iter().map(|p| rot * p + t).collect();
            let f1 = fit_plane(&pts, 0.02, 0.8).unwrap().unwrap();
            let f2 = fit_plane(&moved, 0.02, 0.8).unwrap().unwrap();
            prop_assert!((f1.rms_residual - f2.rms_residual).abs() < 1e-9);
            // Normal maps by the same rotation, up to the sign convention.
            let mapped = rot * f1.normal.into_inner();
            prop_assert!(mapped.dot(&f2.normal).abs() > 1.0 - 1e-9);
            prop_assert_eq!(f1.inliers.len(), f2.inliers.len());
        }
    }
}
