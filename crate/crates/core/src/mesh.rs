//! `EDGEMESH v1` text format: intersection points plus point adjacency.
//!
//! ```text
//! EDGEMESH n <dim> V <points> E <pairs>
//! <dim reals per point line>
//! <two point indices per adjacency line>
//! ```
//! Reals are written in shortest round-trip form, so parsing reproduces them exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("EDGEMESH line {line}: {msg}")]
pub struct MeshParseError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMesh<T> {
    pub dim: usize,
    pub points: Vec<Vec<T>>,
    pub adjacency: Vec<(usize, usize)>,
}

impl<T: Real> EdgeMesh<T> {
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "EDGEMESH n {} V {} E {}\n",
            self.dim,
            self.points.len(),
            self.adjacency.len()
        );
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        for (a, b) in &self.adjacency {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, MeshParseError> {
        let err = |line: usize, msg: String| MeshParseError { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let count = |i: usize| -> Result<usize, MeshParseError> {
            h.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(1, format!("bad header {header:?}")))
        };
        if h.len() != 7 || h[0] != "EDGEMESH" || h[1] != "n" || h[3] != "V" || h[5] != "E" {
            return Err(err(1, format!("bad header {header:?}")));
        }
        let (dim, nv, ne) = (count(2)?, count(4)?, count(6)?);
        let mut points = Vec::with_capacity(nv);
        let mut adjacency = Vec::with_capacity(ne);
        for _ in 0..nv {
            let (no, l) = lines
                .next()
                .ok_or_else(|| err(0, "missing point lines".into()))?;
            let p: Vec<T> = parse_row(l).map_err(|m| err(no, m))?;
            if p.len() != dim {
                return Err(err(
                    no,
                    format!("expected {dim} coordinates, got {}", p.len()),
                ));
            }
            points.push(p);
        }
        for _ in 0..ne {
            let (no, l) = lines
                .next()
                .ok_or_else(|| err(0, "missing adjacency lines".into()))?;
            let pair: Vec<usize> = parse_row(l).map_err(|m| err(no, m))?;
            match pair.as_slice() {
                &[a, b] if a < nv && b < nv => adjacency.push((a, b)),
                _ => return Err(err(no, format!("bad adjacency pair {l:?}"))),
            }
        }
        if let Some((no, l)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(err(no, format!("trailing content {l:?}")));
        }
        Ok(Self {
            dim,
            points,
            adjacency,
        })
    }
}

fn parse_row<X: FromStr>(line: &str) -> Result<Vec<X>, String> {
    line.split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("cannot parse {t:?}")))
        .collect()
}
