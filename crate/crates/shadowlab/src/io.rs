//! CSV and JSON formats.
//!
//! A trajectory CSV starts with one `#` line holding a JSON header
//! `{"spec": .., "model": .., "seed": ..}`, then the column line `k,x` or
//! `k,x,y`, then one row per point. Numbers are written with 17 significant
//! digits so that reading them back is exact.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shadowlab_core::pseudo::{ErrorModel, Pseudotrajectory};
use shadowlab_core::scaling::ScalingRow;
use shadowlab_core::{MapSpec, Point, Point2};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FormatError + '_ {
    move |source| FormatError::Io { path: path.display().to_string(), source }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json { path: path.display().to_string(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| FormatError::Json { path: path.display().to_string(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_spec(path: &Path) -> Result<MapSpec, FormatError> {
    read_json(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub spec: Option<MapSpec>,
    pub model: ErrorModel,
    pub seed: Option<u64>,
}

/// Scientific notation with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    spec: Option<&MapSpec>,
    traj: &Pseudotrajectory,
) -> std::io::Result<()> {
    let header = TrajectoryHeader { spec: spec.cloned(), model: traj.model, seed: traj.seed };
    writeln!(out, "# {}", serde_json::to_string(&header).map_err(std::io::Error::other)?)?;
    let planar = traj.dim() == 2;
    writeln!(out, "{}", if planar { "k,x,y" } else { "k,x" })?;
    for (k, p) in traj.points.iter().enumerate() {
        match p {
            Point::One(x) => writeln!(out, "{k},{}", num(*x))?,
            Point::Two(q) => writeln!(out, "{k},{},{}", num(q.x), num(q.y))?,
        }
    }
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<(TrajectoryHeader, Pseudotrajectory), FormatError> {
    let csv = |line: usize, msg: String| FormatError::Csv { line, msg };
    let mut lines = BufReader::new(input).lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String), FormatError> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(csv(i + 1, e.to_string())),
            None => Err(csv(0, format!("missing {what}"))),
        }
    };
    let (n, first) = next("header")?;
    let json = first.strip_prefix('#').ok_or_else(|| csv(n, "expected a '#' header line".into()))?;
    let header: TrajectoryHeader = serde_json::from_str(json.trim()).map_err(|e| csv(n, e.to_string()))?;
    let (n, cols) = next("column line")?;
    let dim = match cols.trim() {
        "k,x" => 1,
        "k,x,y" => 2,
        other => return Err(csv(n, format!("unknown columns {other:?}"))),
    };
    let mut points = Vec::new();
    for (i, line) in lines {
        let line = line.map_err(|e| csv(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 1 {
            return Err(csv(i + 1, format!("expected {} fields", dim + 1)));
        }
        let k: usize = fields[0].parse().map_err(|_| csv(i + 1, format!("bad index {:?}", fields[0])))?;
        if k != points.len() {
            return Err(csv(i + 1, format!("index {k} out of sequence")));
        }
        let mut vals = [0.0; 2];
        for (v, f) in vals.iter_mut().zip(&fields[1..]) {
            *v = f.parse().map_err(|_| csv(i + 1, format!("bad number {f:?}")))?;
        }
        points.push(if dim == 1 { Point::One(vals[0]) } else { Point::Two(Point2::new(vals[0], vals[1])) });
    }
    let mut traj = Pseudotrajectory::from_points(points, header.model).map_err(|e| csv(0, e.to_string()))?;
    traj.seed = header.seed;
    Ok((header, traj))
}

pub fn write_scaling_csv<W: Write>(mut out: W, rows: &[ScalingRow]) -> std::io::Result<()> {
    writeln!(out, "eps,d_max,success_rate")?;
    for r in rows {
        writeln!(out, "{},{},{}", num(r.eps), num(r.d_max), num(r.success_rate))?;
    }
    Ok(())
}

pub fn read_scaling_csv<R: Read>(input: R) -> Result<Vec<ScalingRow>, FormatError> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| FormatError::Csv { line: i + 1, msg: e.to_string() })?;
        if i == 0 {
            if line.trim() != "eps,d_max,success_rate" {
                return Err(FormatError::Csv { line: 1, msg: format!("unexpected header {line:?}") });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match vals.as_deref() {
            Ok([eps, d_max, success_rate]) => {
                rows.push(ScalingRow { eps: *eps, d_max: *d_max, success_rate: *success_rate })
            }
            _ => return Err(FormatError::Csv { line: i + 1, msg: "expected eps,d_max,success_rate".into() }),
        }
    }
    Ok(rows)
}
