//! Terrain representation, validation and I/O.

use serde::Deserialize;
use thiserror::Error;

use crate::geom::{orientation, Line, Point};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TerrainError {
    #[error("vertices {0} and {1} share the same x coordinate")]
    DuplicateX(usize, usize),
    #[error("x coordinates must be strictly increasing (vertex {0})")]
    NonMonotone(usize),
    #[error("a terrain needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("parse error: {0}")]
    ParseError(String),
}

/// An x-monotone polygonal chain `v_1 .. v_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Terrain<S> {
    vertices: Vec<Point<S>>,
    y_max: S,
}

impl<S: Scalar> Terrain<S> {
    /// Validate and normalize (merge collinear consecutive vertices).
    pub fn new(vertices: Vec<Point<S>>) -> Result<Self, TerrainError> {
        if vertices.len() < 2 {
            return Err(TerrainError::TooFewVertices(vertices.len()));
        }
        for i in 1..vertices.len() {
            match vertices[i].x.partial_cmp(&vertices[i - 1].x) {
                Some(std::cmp::Ordering::Greater) => {}
                Some(std::cmp::Ordering::Equal) => return Err(TerrainError::DuplicateX(i - 1, i)),
                _ => return Err(TerrainError::NonMonotone(i)),
            }
        }
        let mut out: Vec<Point<S>> = Vec::with_capacity(vertices.len());
        for v in vertices {
            while out.len() >= 2 && orientation(&out[out.len() - 2], &out[out.len() - 1], &v) == 0 {
                out.pop();
            }
            out.push(v);
        }
        let y_max = out.iter().map(|p| p.y.clone()).fold(out[0].y.clone(), S::max_of);
        Ok(Terrain { vertices: out, y_max })
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point<S> {
        &self.vertices[i]
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn y_max(&self) -> &S {
        &self.y_max
    }

    pub fn x_min(&self) -> &S {
        &self.vertices[0].x
    }

    pub fn x_max(&self) -> &S {
        &self.vertices[self.vertices.len() - 1].x
    }

    /// Edge `e` joins vertices `e` and `e + 1` (0-based).
    pub fn edge(&self, e: usize) -> (&Point<S>, &Point<S>) {
        (&self.vertices[e], &self.vertices[e + 1])
    }

    pub fn edge_line(&self, e: usize) -> Line<S> {
        let (a, b) = self.edge(e);
        Line::through(a, b)
    }

    pub fn edge_slope(&self, e: usize) -> S {
        let (a, b) = self.edge(e);
        (b.y.clone() - a.y.clone()) / (b.x.clone() - a.x.clone())
    }

    /// Terrain height at `x`, `None` outside the domain.
    pub fn height_at(&self, x: &S) -> Option<S> {
        if x < self.x_min() || x > self.x_max() {
            return None;
        }
        let idx = self.vertices.partition_point(|v| v.x <= *x);
        if idx == 0 {
            return Some(self.vertices[0].y.clone());
        }
        if idx >= self.n() {
            return Some(self.vertices[self.n() - 1].y.clone());
        }
        let (a, b) = (&self.vertices[idx - 1], &self.vertices[idx]);
        let t = (x.clone() - a.x.clone()) / (b.x.clone() - a.x.clone());
        Some(a.y.clone() + t * (b.y.clone() - a.y.clone()))
    }

    /// Reflection `x -> -x` with reversed vertex order. Vertex `i` maps to `n-1-i`
    /// and edge `e` to `n-2-e`.
    pub fn mirrored(&self) -> Terrain<S> {
        let vertices = self
            .vertices
            .iter()
            .rev()
            .map(|p| Point::new(-p.x.clone(), p.y.clone()))
            .collect();
        Terrain {
            vertices,
            y_max: self.y_max.clone(),
        }
    }

    pub fn convert<T: Scalar>(&self) -> Terrain<T> {
        Terrain {
            vertices: self.vertices.iter().map(|p| p.convert()).collect(),
            y_max: crate::scalar::convert(&self.y_max),
        }
    }
}

#[derive(Deserialize)]
struct TerrainJson {
    vertices: Vec<[serde_json::Value; 2]>,
}

fn json_number(v: &serde_json::Value) -> Result<Rational, TerrainError> {
    let text = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        other => return Err(TerrainError::ParseError(format!("not a number: {other}"))),
    };
    parse_rational(&text).ok_or_else(|| TerrainError::ParseError(format!("bad coordinate {text:?}")))
}

/// Parse JSON (`{"vertices": [[x, y], ...]}`) or CSV (`x,y` per line) terrain text.
pub fn parse_terrain(text: &str) -> Result<Terrain<Rational>, TerrainError> {
    let trimmed = text.trim_start();
    let points = if trimmed.starts_with('{') {
        let parsed: TerrainJson = serde_json::from_str(text).map_err(|e| TerrainError::ParseError(e.to_string()))?;
        parsed
            .vertices
            .iter()
            .map(|[x, y]| Ok(Point::new(json_number(x)?, json_number(y)?)))
            .collect::<Result<Vec<_>, TerrainError>>()?
    } else {
        parse_csv(text)?
    };
    Terrain::new(points)
}

fn parse_csv(text: &str) -> Result<Vec<Point<Rational>>, TerrainError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| TerrainError::ParseError(e.to_string()))?;
        if record.len() != 2 {
            return Err(TerrainError::ParseError(format!(
                "line {}: expected 2 fields, got {}",
                i + 1,
                record.len()
            )));
        }
        match (parse_rational(&record[0]), parse_rational(&record[1])) {
            (Some(x), Some(y)) => out.push(Point::new(x, y)),
            // tolerate a single `x,y` header line
            _ if i == 0 => continue,
            _ => return Err(TerrainError::ParseError(format!("line {}: bad coordinates", i + 1))),
        }
    }
    Ok(out)
}

/// JSON form with exact coordinate strings.
pub fn terrain_to_json(t: &Terrain<Rational>) -> serde_json::Value {
    let verts: Vec<serde_json::Value> = t
        .vertices()
        .iter()
        .map(|p| serde_json::json!([format_rational(&p.x), format_rational(&p.y)]))
        .collect();
    serde_json::json!({ "vertices": verts })
}

/// Build an exact terrain from integer-ish coordinates (handy in tests and generators).
pub fn terrain_from_f64(coords: &[(f64, f64)]) -> Result<Terrain<Rational>, TerrainError> {
    Terrain::new(
        coords
            .iter()
            .map(|&(x, y)| Point::new(Rational::from_f64(x), Rational::from_f64(y)))
            .collect(),
    )
}
