//! Deterministic terrain generators on an integer grid.

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{orientation, Point};
use crate::scalar::{Rational, Scalar};
use crate::terrain::Terrain;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GenError {
    #[error("a terrain needs at least 2 vertices, got {0}")]
    TooFew(usize),
    #[error("amplitude must be at least 2, got {0}")]
    Amplitude(i64),
    #[error("unknown profile {0:?} (expected random, peaks or staircase)")]
    Profile(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Independent heights.
    Random,
    /// Alternating summits and valleys.
    Peaks,
    /// Flat treads and risers of one common slope, up then down.
    Staircase,
}

impl FromStr for Profile {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Profile::Random),
            "peaks" => Ok(Profile::Peaks),
            "staircase" => Ok(Profile::Staircase),
            other => Err(GenError::Profile(other.to_string())),
        }
    }
}

/// Terrain with `n` vertices, strictly increasing integer x and no three
/// consecutive collinear vertices. The same arguments always give the same terrain.
pub fn generate(n: usize, seed: u64, profile: Profile, amplitude: i64) -> Result<Terrain<Rational>, GenError> {
    if n < 2 {
        return Err(GenError::TooFew(n));
    }
    if amplitude < 2 {
        return Err(GenError::Amplitude(amplitude));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = match profile {
        Profile::Random => heights(n, &mut rng, |rng, _| rng.gen_range(0..=amplitude)),
        Profile::Peaks => heights(n, &mut rng, |rng, i| {
            let quarter = (amplitude / 4).max(1);
            if i % 2 == 1 {
                rng.gen_range(amplitude - quarter..=amplitude)
            } else {
                rng.gen_range(0..=quarter)
            }
        }),
        Profile::Staircase => staircase(n, &mut rng),
    };
    Ok(Terrain::new(pts).expect("generated vertices are strictly x-monotone"))
}

fn heights(n: usize, rng: &mut ChaCha8Rng, mut y: impl FnMut(&mut ChaCha8Rng, usize) -> i64) -> Vec<Point<Rational>> {
    let mut pts: Vec<Point<Rational>> = Vec::with_capacity(n);
    let mut x = 0i64;
    for i in 0..n {
        x += if i == 0 { 0 } else { rng.gen_range(1..=3) };
        let mut p = point(x, y(rng, i));
        while pts.len() >= 2 && orientation(&pts[pts.len() - 2], &pts[pts.len() - 1], &p) == 0 {
            p = point(x, p.y.to_f64() as i64 + 1);
        }
        pts.push(p);
    }
    pts
}

fn staircase(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point<Rational>> {
    let slope = rng.gen_range(1..=2i64);
    let turn = n / 2;
    let (mut x, mut y) = (0i64, 0i64);
    let mut pts = vec![point(0, 0)];
    for i in 1..n {
        let dx = rng.gen_range(1..=3i64);
        x += dx;
        // treads on odd edges, risers on even ones; risers descend past the turn
        if i % 2 == 0 {
            y += if i <= turn { slope * dx } else { -slope * dx };
        }
        pts.push(point(x, y));
    }
    pts
}

fn point(x: i64, y: i64) -> Point<Rational> {
    Point::new(Rational::from_i64(x), Rational::from_i64(y))
}
