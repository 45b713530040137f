//! Text point-cloud ingestion: whitespace `x y z` files and ascii PLY.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use super::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Xyz,
    PlyAscii,
}

impl CloudFormat {
    /// Guess from the file extension, defaulting to xyz.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ply") => CloudFormat::PlyAscii,
            _ => CloudFormat::Xyz,
        }
    }
}

impl FromStr for CloudFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xyz" => Ok(CloudFormat::Xyz),
            "ply-ascii" | "ply" => Ok(CloudFormat::PlyAscii),
            other => Err(Error::Config(format!("unknown cloud format `{other}`"))),
        }
    }
}

impl fmt::Display for CloudFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CloudFormat::Xyz => "xyz",
            CloudFormat::PlyAscii => "ply-ascii",
        })
    }
}

pub fn load_pointcloud(path: impl AsRef<Path>, format: CloudFormat) -> Result<PointCloud> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut cloud = parse_pointcloud(&text, format)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        cloud.set_id(stem);
    }
    Ok(cloud)
}

pub fn parse_pointcloud(text: &str, format: CloudFormat) -> Result<PointCloud> {
    let points = match format {
        CloudFormat::Xyz => parse_xyz(text)?,
        CloudFormat::PlyAscii => parse_ply_ascii(text)?,
    };
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    PointCloud::new(points)
}

fn parse_coord(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite coordinate `{tok}`")));
    }
    Ok(v)
}

fn parse_xyz(text: &str) -> Result<Vec<Point3>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 coordinates, found {}", toks.len()),
            ));
        }
        points.push([
            parse_coord(toks[0], line_no)?,
            parse_coord(toks[1], line_no)?,
            parse_coord(toks[2], line_no)?,
        ]);
    }
    Ok(points)
}

fn parse_ply_ascii(text: &str) -> Result<Vec<Point3>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    match lines.next() {
        Some((_, "ply")) => {}
        Some((n, _)) => return Err(Error::parse(n, "missing `ply` magic")),
        None => return Err(Error::EmptyCloud),
    }

    let mut vertex_count: Option<usize> = None;
    let mut in_vertex = false;
    let mut props: Vec<String> = Vec::new();
    let mut saw_end = false;
    for (n, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            ["comment", ..] | ["obj_info", ..] => continue,
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(Error::parse(n, format!("unsupported PLY format `{other}`")))
            }
            ["element", "vertex", count] => {
                if vertex_count.is_some() {
                    return Err(Error::parse(n, "duplicate vertex element"));
                }
                vertex_count = Some(
                    count
                        .parse()
                        .map_err(|_| Error::parse(n, format!("bad vertex count `{count}`")))?,
                );
                in_vertex = true;
            }
            ["element", ..] => {
                if vertex_count.is_none() {
                    return Err(Error::parse(n, "vertex element must come first"));
                }
                in_vertex = false;
            }
            ["property", "list", ..] if in_vertex => {
                return Err(Error::parse(
                    n,
                    "list properties on vertices are not supported",
                ))
            }
            ["property", _ty, name] => {
                if in_vertex {
                    props.push((*name).to_string());
                }
            }
            ["property", ..] => {}
            ["end_header"] => {
                saw_end = true;
                break;
            }
            _ => return Err(Error::parse(n, format!("unexpected header line `{line}`"))),
        }
    }
    if !saw_end {
        return Err(Error::parse(text.lines().count(), "missing end_header"));
    }
    let count = vertex_count.ok_or_else(|| Error::parse(1, "no vertex element"))?;
    let col = |axis: &str| {
        props
            .iter()
            .position(|p| p == axis)
            .ok_or_else(|| Error::parse(1, format!("vertex has no `{axis}` property")))
    };
    let (cx, cy, cz) = (col("x")?, col("y")?, col("z")?);

    let mut points = Vec::with_capacity(count);
    let mut last_line = 0;
    for (n, line) in lines {
        last_line = n;
        if points.len() == count {
            break;
        }
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != props.len() {
            return Err(Error::parse(
                n,
                format!("expected {} values, found {}", props.len(), toks.len()),
            ));
        }
        points.push([
            parse_coord(toks[cx], n)?,
            parse_coord(toks[cy], n)?,
            parse_coord(toks[cz], n)?,
        ]);
    }
    if points.len() < count {
        return Err(Error::parse(
            last_line + 1,
            format!("header declares {count} vertices, found {}", points.len()),
        ));
    }
    Ok(points)
}

/// Write `x y z` rows preceded by `#` metadata lines.
pub fn write_xyz<W: Write>(
    out: &mut W,
    cloud: &PointCloud,
    header: &[String],
) -> std::io::Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    for p in cloud.points() {
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    Ok(())
}

pub fn write_ply_ascii<W: Write>(out: &mut W, cloud: &PointCloud) -> std::io::Result<()> {
    writeln!(out, "ply\nformat ascii 1.0")?;
    writeln!(out, "element vertex {}", cloud.len())?;
    writeln!(
        out,
        "property double x\nproperty double y\nproperty double z\nend_header"
    )?;
    for p in cloud.points() {
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    Ok(())
}
