//! Point cloud representation and file I/O.
//!
//! Clouds are ordered lists of 3D points in meters (scene frame, +z up),
//! optionally carrying per-point intensities in `[0, 1]`. Two ASCII formats
//! are supported: `xyz` (one `x y z [intensity]` line per point, `#`
//! comments) and PLY 1.0 (ASCII, `vertex` element only).

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::Point3;
use thiserror::Error;

use crate::geometry::BoundingBox;

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("operation requires a non-empty cloud")]
    EmptyCloud,
    #[error("intensity count {intensities} does not match point count {points}")]
    IntensityLength { points: usize, intensities: usize },
}

fn parse_err(line: usize, message: impl Into<String>) -> CloudError {
    CloudError::Parse {
        line,
        message: message.into(),
    }
}

/// Supported on-disk cloud formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    XyzAscii,
    PlyAscii,
}

impl CloudFormat {
    /// Guess a format from a file extension (`.ply` is PLY, everything else
    /// is treated as xyz-ascii).
    pub fn from_path(path: &Path) -> CloudFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => CloudFormat::PlyAscii,
            _ => CloudFormat::XyzAscii,
        }
    }
}

/// An ordered set of 3D surface samples.
///
/// Iteration order is stable (file order). The cloud is immutable after
/// construction; detection code only ever reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point3<f64>>,
    intensities: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3<f64>>) -> PointCloud {
        PointCloud {
            points,
            intensities: None,
        }
    }

    pub fn with_intensities(
        points: Vec<Point3<f64>>,
        intensities: Vec<f64>,
    ) -> Result<PointCloud, CloudError> {
        if intensities.len() != points.len() {
            return Err(CloudError::IntensityLength {
                points: points.len(),
                intensities: intensities.len(),
            });
        }
        Ok(PointCloud {
            points,
            intensities: Some(intensities),
        })
    }

    pub fn empty() -> PointCloud {
        PointCloud::new(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3<f64>] {
        &self.points
    }

    pub fn intensities(&self) -> Option<&[f64]> {
        self.intensities.as_deref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point3<f64>> {
        self.points.iter()
    }

    /// Sub-cloud of the given point indices, preserving order and
    /// intensities.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            intensities: self
                .intensities
                .as_ref()
                .map(|ints| indices.iter().map(|&i| ints[i]).collect()),
        }
    }
}

/// Axis-aligned bounding box with `min.c <= max.c` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// True when `self` lies entirely inside `other`.
    pub fn contained_in(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] >= other.min[i] && self.max[i] <= other.max[i])
    }
}

impl fmt::Display for Aabb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.3} {:.3} {:.3}] .. [{:.3} {:.3} {:.3}]",
            self.min.x, self.min.y, self.min.z, self.max.x, self.max.y, self.max.z
        )
    }
}

/// Tight axis-aligned bounds of a non-empty cloud.
pub fn cloud_bounds(cloud: &PointCloud) -> Result<Aabb, CloudError> {
    let mut iter = cloud.iter();
    let first = iter.next().ok_or(CloudError::EmptyCloud)?;
    let mut min = *first;
    let mut max = *first;
    for p in iter {
        for i in 0..3 {
            if p[i] < min[i] {
                min[i] = p[i];
            }
            if p[i] > max[i] {
                max[i] = p[i];
            }
        }
    }
    Ok(Aabb { min, max })
}

/// Points of `cloud` inside `bbox` expanded by `margin` along each of its
/// axes. Order (and intensities, when present) are preserved. May return an
/// empty cloud.
pub fn crop_to_box(cloud: &PointCloud, bbox: &BoundingBox, margin: f64) -> PointCloud {
    let keep: Vec<usize> = cloud
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| bbox.contains_with_margin(p, margin))
        .map(|(i, _)| i)
        .collect();
    cloud.select(&keep)
}

/// Load a cloud from disk, preserving file order.
pub fn load_cloud(path: &Path, format: CloudFormat) -> Result<PointCloud, CloudError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    match format {
        CloudFormat::XyzAscii => read_xyz(reader),
        CloudFormat::PlyAscii => read_ply(reader),
    }
}

/// Write a cloud to disk at fixed (6-decimal) precision.
pub fn save_cloud(cloud: &PointCloud, path: &Path, format: CloudFormat) -> Result<(), CloudError> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    match format {
        CloudFormat::XyzAscii => write_xyz(cloud, &mut writer),
        CloudFormat::PlyAscii => write_ply(cloud, &mut writer),
    }
}

fn parse_coord(tok: &str, line: usize) -> Result<f64, CloudError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse number `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite coordinate `{tok}`")));
    }
    Ok(v)
}

fn read_xyz<R: BufRead>(reader: R) -> Result<PointCloud, CloudError> {
    let mut points = Vec::new();
    let mut intensities = Vec::new();
    let mut arity: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(parse_err(
                lineno,
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        match arity {
            None => arity = Some(fields.len()),
            Some(a) if a != fields.len() => {
                return Err(parse_err(
                    lineno,
                    format!("inconsistent field count: {} after {}", fields.len(), a),
                ));
            }
            _ => {}
        }
        let x = parse_coord(fields[0], lineno)?;
        let y = parse_coord(fields[1], lineno)?;
        let z = parse_coord(fields[2], lineno)?;
        points.push(Point3::new(x, y, z));
        if fields.len() == 4 {
            let i = parse_coord(fields[3], lineno)?;
            if !(0.0..=1.0).contains(&i) {
                return Err(parse_err(lineno, format!("intensity {i} outside [0, 1]")));
            }
            intensities.push(i);
        }
    }
    if intensities.is_empty() {
        Ok(PointCloud::new(points))
    } else {
        PointCloud::with_intensities(points, intensities)
    }
}

fn write_xyz<W: Write>(cloud: &PointCloud, w: &mut W) -> Result<(), CloudError> {
    for (i, p) in cloud.points().iter().enumerate() {
        match cloud.intensities() {
            Some(ints) => writeln!(w, "{:.6} {:.6} {:.6} {:.6}", p.x, p.y, p.z, ints[i])?,
            None => writeln!(w, "{:.6} {:.6} {:.6}", p.x, p.y, p.z)?,
        }
    }
    Ok(())
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
}

fn read_ply<R: BufRead>(reader: R) -> Result<PointCloud, CloudError> {
    let mut lines = reader.lines().enumerate();
    let next_line = |lines: &mut dyn Iterator<Item = (usize, std::io::Result<String>)>| {
        lines.next().map(|(idx, l)| (idx + 1, l))
    };

    let (n, magic) = next_line(&mut lines).ok_or_else(|| parse_err(1, "empty PLY file"))?;
    let mut lineno = n;
    if magic?.trim() != "ply" {
        return Err(parse_err(lineno, "missing `ply` magic line"));
    }

    let mut elements: Vec<PlyElement> = Vec::new();
    let mut format_seen = false;
    loop {
        let (n, line) = next_line(&mut lines)
            .ok_or_else(|| parse_err(lineno, "unexpected end of header"))?;
        lineno = n;
        let line = line?;
        let line = line.trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("format") => {
                let rest: Vec<&str> = toks.collect();
                if rest != ["ascii", "1.0"] {
                    return Err(parse_err(lineno, "only `format ascii 1.0` is supported"));
                }
                format_seen = true;
            }
            Some("comment") | Some("obj_info") => {}
            Some("element") => {
                let name = toks
                    .next()
                    .ok_or_else(|| parse_err(lineno, "element without name"))?;
                let count: usize = toks
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "element without count"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(lineno, "property before any element"))?;
                let prop_name = line
                    .split_whitespace()
                    .last()
                    .ok_or_else(|| parse_err(lineno, "property without name"))?;
                el.properties.push(prop_name.to_string());
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(parse_err(lineno, format!("unknown header keyword `{other}`")));
            }
            None => {}
        }
    }
    if !format_seen {
        return Err(parse_err(lineno, "header missing `format` line"));
    }

    let mut points = Vec::new();
    let mut intensities = Vec::new();
    for el in &elements {
        if el.name != "vertex" {
            // Skip rows of non-vertex elements (faces etc.).
            for _ in 0..el.count {
                let (n, line) = next_line(&mut lines)
                    .ok_or_else(|| parse_err(lineno, "unexpected end of file"))?;
                lineno = n;
                line?;
            }
            continue;
        }
        let ix = el.properties.iter().position(|p| p == "x");
        let iy = el.properties.iter().position(|p| p == "y");
        let iz = el.properties.iter().position(|p| p == "z");
        let (ix, iy, iz) = match (ix, iy, iz) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(parse_err(lineno, "vertex element lacks x/y/z properties")),
        };
        let ii = el.properties.iter().position(|p| p == "intensity");
        points.reserve(el.count);
        for _ in 0..el.count {
            let (n, line) = next_line(&mut lines)
                .ok_or_else(|| parse_err(lineno, "unexpected end of vertex data"))?;
            lineno = n;
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < el.properties.len() {
                return Err(parse_err(
                    lineno,
                    format!(
                        "expected {} vertex fields, found {}",
                        el.properties.len(),
                        fields.len()
                    ),
                ));
            }
            let x = parse_coord(fields[ix], lineno)?;
            let y = parse_coord(fields[iy], lineno)?;
            let z = parse_coord(fields[iz], lineno)?;
            points.push(Point3::new(x, y, z));
            if let Some(ii) = ii {
                intensities.push(parse_coord(fields[ii], lineno)?);
            }
        }
    }
    if intensities.is_empty() {
        Ok(PointCloud::new(points))
    } else {
        PointCloud::with_intensities(points, intensities)
    }
}

fn write_ply<W: Write>(cloud: &PointCloud, w: &mut W) -> Result<(), CloudError> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    writeln!(w, "property double x")?;
    writeln!(w, "property double y")?;
    writeln!(w, "property double z")?;
    if cloud.intensities().is_some() {
        writeln!(w, "property double intensity")?;
    }
    writeln!(w, "end_header")?;
    write_xyz(cloud, w)
}
