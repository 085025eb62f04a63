//! 2D occupancy grids from ground-plane projection.

use std::io::Write;

use crate::pointcloud::{cloud_bounds, PointCloud};

use super::GeometryError;

/// Counts of projected points over a regular XY grid. Cell `(i, j)` covers
/// `[x0 + i·s, x0 + (i+1)·s) × [y0 + j·s, y0 + (j+1)·s)`; points landing on
/// the top edge of the last cell are kept in it.
#[derive(Debug, Clone)]
pub struct OccupancyGrid2D {
    origin: [f64; 2],
    cell_size: f64,
    nx: usize,
    ny: usize,
    counts: Vec<u32>,
}

impl OccupancyGrid2D {
    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[j * self.nx + i]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Center of cell `(i, j)` in world coordinates.
    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.cell_size,
            self.origin[1] + (j as f64 + 0.5) * self.cell_size,
        ]
    }

    /// All cells with a nonzero count, row-major order.
    pub fn occupied_cells(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.ny).flat_map(move |j| {
            (0..self.nx).filter_map(move |i| {
                let c = self.count(i, j);
                (c > 0).then_some((i, j, c))
            })
        })
    }

    /// Dump as an ASCII PGM image for inspection (origin bottom-left, so the
    /// image is flipped vertically to match the usual raster order).
    pub fn write_pgm<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let max = self.counts.iter().copied().max().unwrap_or(0).max(1);
        writeln!(w, "P2")?;
        writeln!(w, "{} {}", self.nx, self.ny)?;
        writeln!(w, "255")?;
        for j in (0..self.ny).rev() {
            let row: Vec<String> = (0..self.nx)
                .map(|i| ((self.count(i, j) as u64 * 255) / max as u64).to_string())
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Project points onto the ground plane, counting per cell. Points outside
/// `z_range` (when given, inclusive) are skipped; the grid always covers the
/// full XY bounds of the cloud.
pub fn project_to_ground(
    cloud: &PointCloud,
    cell_size: f64,
    z_range: Option<(f64, f64)>,
) -> Result<OccupancyGrid2D, GeometryError> {
    if cell_size <= 0.0 || !cell_size.is_finite() {
        return Err(super::invalid("cell_size must be positive"));
    }
    if cloud.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let bounds = cloud_bounds(cloud).expect("non-empty cloud");
    let origin = [bounds.min.x, bounds.min.y];
    let span_x = bounds.max.x - bounds.min.x;
    let span_y = bounds.max.y - bounds.min.y;
    let nx = ((span_x / cell_size).ceil() as usize).max(1);
    let ny = ((span_y / cell_size).ceil() as usize).max(1);
    let mut counts = vec![0u32; nx * ny];
    for p in cloud.iter() {
        if let Some((zmin, zmax)) = z_range {
            if p.z < zmin || p.z > zmax {
                continue;
            }
        }
        let i = (((p.x - origin[0]) / cell_size).floor() as usize).min(nx - 1);
        let j = (((p.y - origin[1]) / cell_size).floor() as usize).min(ny - 1);
        counts[j * nx + i] += 1;
    }
    Ok(OccupancyGrid2D {
        origin,
        cell_size,
        nx,
        ny,
        counts,
    })
}
