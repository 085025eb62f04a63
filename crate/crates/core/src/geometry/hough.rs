//! Hough line detection over occupancy grids.
//!
//! Occupied cells vote once each (counts capped at 1, so walls win by
//! extent rather than by scan density) into a `(ρ, θ)` accumulator. Peaks
//! survive non-maximum suppression over their 8-neighborhood (θ wraps with
//! mirrored ρ), are traced along their line into maximal segments with a
//! gap tolerance of two cells, and come back sorted by votes descending,
//! ties broken by `(ρ, θ)`.

use super::grid::OccupancyGrid2D;
use super::GeometryError;

/// Detection parameters; the ρ bin width is `rho_res` meters, θ bins are
/// `~theta_res` radians over `[0, π)`.
#[derive(Debug, Clone, Copy)]
pub struct HoughParams {
    pub rho_res: f64,
    pub theta_res: f64,
    pub min_votes: u32,
    pub min_length: f64,
}

/// A traced line segment with its Hough parameters in the world frame
/// (`x·cosθ + y·sinθ = ρ`, θ in `[0, π)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSegment2D {
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub rho: f64,
    pub theta: f64,
    pub votes: u32,
}

impl LineSegment2D {
    pub fn length(&self) -> f64 {
        let dx = self.p1[0] - self.p0[0];
        let dy = self.p1[1] - self.p0[1];
        (dx * dx + dy * dy).sqrt()
    }

    /// Unit direction along the segment.
    pub fn direction(&self) -> [f64; 2] {
        let len = self.length();
        [
            (self.p1[0] - self.p0[0]) / len,
            (self.p1[1] - self.p0[1]) / len,
        ]
    }
}

struct Accumulator {
    n_theta: usize,
    n_rho: usize,
    theta_width: f64,
    rho_half_span: f64,
    rho_res: f64,
    votes: Vec<u32>,
}

impl Accumulator {
    fn theta(&self, k: usize) -> f64 {
        k as f64 * self.theta_width
    }

    fn rho_center(&self, b: usize) -> f64 {
        -self.rho_half_span + (b as f64 + 0.5) * self.rho_res
    }

    fn rho_bin(&self, rho: f64) -> usize {
        let b = ((rho + self.rho_half_span) / self.rho_res).floor() as isize;
        b.clamp(0, self.n_rho as isize - 1) as usize
    }

    fn at(&self, k: usize, b: usize) -> u32 {
        self.votes[k * self.n_rho + b]
    }

    /// Neighbor across the θ seam: θ = -1 maps to the last θ bin with ρ
    /// mirrored (the same physical line).
    fn wrap(&self, k: isize, b: isize) -> Option<(usize, usize)> {
        if b < 0 || b >= self.n_rho as isize {
            return None;
        }
        let (k, b) = if k < 0 {
            (self.n_theta as isize - 1, self.n_rho as isize - 1 - b)
        } else if k >= self.n_theta as isize {
            (0, self.n_rho as isize - 1 - b)
        } else {
            (k, b)
        };
        Some((k as usize, b as usize))
    }
}

fn build_accumulator(
    cells: &[[f64; 2]],
    half_diag: f64,
    params: &HoughParams,
) -> Accumulator {
    let n_theta = ((std::f64::consts::PI / params.theta_res).round() as usize).max(1);
    let theta_width = std::f64::consts::PI / n_theta as f64;
    let n_rho = ((2.0 * half_diag / params.rho_res).ceil() as usize).max(1);
    let rho_half_span = n_rho as f64 * params.rho_res / 2.0;
    let mut acc = Accumulator {
        n_theta,
        n_rho,
        theta_width,
        rho_half_span,
        rho_res: params.rho_res,
        votes: vec![0; n_theta * n_rho],
    };
    let trig: Vec<(f64, f64)> = (0..n_theta).map(|k| acc.theta(k).sin_cos()).collect();
    for c in cells {
        for (k, &(s, co)) in trig.iter().enumerate() {
            let rho = c[0] * co + c[1] * s;
            let b = acc.rho_bin(rho);
            acc.votes[k * acc.n_rho + b] += 1;
        }
    }
    acc
}

/// Detect line segments in a grid. May return an empty list.
pub fn hough_lines(
    grid: &OccupancyGrid2D,
    params: &HoughParams,
) -> Result<Vec<LineSegment2D>, GeometryError> {
    if params.rho_res <= 0.0 || params.theta_res <= 0.0 {
        return Err(super::invalid("hough resolutions must be positive"));
    }
    if params.min_votes < 1 {
        return Err(super::invalid("min_votes must be at least 1"));
    }
    let cell = grid.cell_size();
    let (nx, ny) = grid.dims();
    let center = [
        grid.origin()[0] + nx as f64 * cell / 2.0,
        grid.origin()[1] + ny as f64 * cell / 2.0,
    ];
    // Occupied cell centers relative to the grid center, so the ρ span stays
    // tight regardless of where the scene sits in world coordinates.
    let cells: Vec<[f64; 2]> = grid
        .occupied_cells()
        .map(|(i, j, _)| {
            let c = grid.cell_center(i, j);
            [c[0] - center[0], c[1] - center[1]]
        })
        .collect();
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let half_diag = cells
        .iter()
        .map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt())
        .fold(0.0f64, f64::max)
        + cell;
    let acc = build_accumulator(&cells, half_diag, params);

    let mut segments = Vec::new();
    for k in 0..acc.n_theta {
        for b in 0..acc.n_rho {
            let v = acc.at(k, b);
            if v < params.min_votes || !is_peak(&acc, k, b) {
                continue;
            }
            trace_peak(&acc, &cells, center, cell, params, k, b, &mut segments);
        }
    }
    segments.sort_by(|a, b| {
        b.votes
            .cmp(&a.votes)
            .then(a.rho.total_cmp(&b.rho))
            .then(a.theta.total_cmp(&b.theta))
    });
    Ok(segments)
}

fn is_peak(acc: &Accumulator, k: usize, b: usize) -> bool {
    let v = acc.at(k, b);
    for dk in -1isize..=1 {
        for db in -1isize..=1 {
            if dk == 0 && db == 0 {
                continue;
            }
            if let Some((nk, nb)) = acc.wrap(k as isize + dk, b as isize + db) {
                if nk == k && nb == b {
                    continue;
                }
                let nv = acc.at(nk, nb);
                // Equal-vote plateaus keep only the lexicographically first cell.
                if nv > v || (nv == v && (nk, nb) < (k, b)) {
                    return false;
                }
            }
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn trace_peak(
    acc: &Accumulator,
    cells: &[[f64; 2]],
    center: [f64; 2],
    cell: f64,
    params: &HoughParams,
    k: usize,
    b: usize,
    out: &mut Vec<LineSegment2D>,
) {
    let theta = acc.theta(k);
    let bin_center = acc.rho_center(b);
    let (s, co) = theta.sin_cos();
    // A line straddling a bin edge splits its votes over two adjacent bins;
    // refine ρ to the mean over nearby supporting cells before tracing.
    let mut rho_sum = 0.0;
    let mut rho_n = 0usize;
    for c in cells {
        let rho = c[0] * co + c[1] * s;
        if (rho - bin_center).abs() <= acc.rho_res {
            rho_sum += rho;
            rho_n += 1;
        }
    }
    if rho_n == 0 {
        return;
    }
    let rho_local = rho_sum / rho_n as f64;
    // Along-line parameters of cells within one cell size of the line.
    let mut ts: Vec<f64> = cells
        .iter()
        .filter(|c| (c[0] * co + c[1] * s - rho_local).abs() <= cell)
        .map(|c| -c[0] * s + c[1] * co)
        .collect();
    if ts.is_empty() {
        return;
    }
    ts.sort_by(f64::total_cmp);
    let gap_tol = 2.0 * cell;
    let rho_world = rho_local + center[0] * co + center[1] * s;
    let mut run_start = 0usize;
    for i in 1..=ts.len() {
        let run_ends = i == ts.len() || ts[i] - ts[i - 1] > gap_tol;
        if !run_ends {
            continue;
        }
        let (t0, t1) = (ts[run_start], ts[i - 1]);
        let n_cells = (i - run_start) as u32;
        run_start = i;
        if t1 - t0 < params.min_length {
            continue;
        }
        let endpoint = |t: f64| {
            [
                rho_local * co - t * s + center[0],
                rho_local * s + t * co + center[1],
            ]
        };
        out.push(LineSegment2D {
            p0: endpoint(t0),
            p1: endpoint(t1),
            rho: rho_world,
            theta,
            votes: n_cells,
        });
    }
}
