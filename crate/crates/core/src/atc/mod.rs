//! Altitude terrain cover: the lowest altitude line admitting `k` guards that
//! together see the whole terrain.
//!
//! `k = 1` is a lowest-point problem over the edge half-planes. `k = 2` runs
//! the staged pipeline in exact arithmetic; larger `k` runs it in floating
//! point after an exact first stage. [`solve_bisect`] is the baseline.

mod stages;

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::envelope::AltitudeInterval;
use crate::geom::minimize_max_of_lines;
use crate::scalar::{convert, format_scalar, ArithmeticMode, Rational, Scalar};
use crate::terrain::Terrain;
use crate::visibility::{Portion, Viewers};

pub use stages::{
    extreme_viewer_envelopes, first_interval, min_h_edge_two_guards, snapshot_at, solve_even, solve_k2, solve_odd,
    solve_staged, stage_invariants_hold, GuardKey, SideSnapshot, Snapshot, StageState, StagedRun, ViewKind,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum AtcError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no candidate heights to search")]
    EmptyCandidates,
    #[error("peaks changed inside a refined interval: {0}")]
    PeaksChanged(String),
    #[error("stage {0} covers the terrain before the last stage")]
    StageDegeneracy(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtcMethod {
    K1,
    K2,
    Even,
    Odd,
    Bisect,
    /// `k >= floor(n/2)`: every other vertex at `y(T)`.
    Floor,
}

/// Which guards cover one edge at the optimum (indices into the guard list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCover {
    pub edge: usize,
    pub guards: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtcSolution {
    pub h_star: Rational,
    pub guards: Vec<Rational>,
    pub certificate: Vec<EdgeCover>,
    pub method: AtcMethod,
    /// Arithmetic of the stage that produced `h_star`; float results are exact images of an `f64`.
    pub mode: ArithmeticMode,
    /// Fallbacks and other notes from the run.
    pub diagnostics: Vec<String>,
}

impl AtcSolution {
    pub fn h_star_f64(&self) -> f64 {
        self.h_star.to_f64()
    }

    /// `h_star` as a report string (exact decimal or `num/den` in exact mode).
    pub fn h_star_string(&self) -> String {
        self.render(&self.h_star)
    }

    pub fn guard_strings(&self) -> Vec<String> {
        self.guards.iter().map(|g| self.render(g)).collect()
    }

    fn render(&self, r: &Rational) -> String {
        match self.mode {
            ArithmeticMode::Exact => format_scalar(r),
            ArithmeticMode::Float => format_scalar(&r.to_f64()),
        }
    }

    pub(crate) fn build<S: Scalar>(
        t: &Terrain<S>,
        h: &S,
        guards: Vec<S>,
        method: AtcMethod,
        diagnostics: Vec<String>,
    ) -> AtcSolution {
        let mut guards = guards;
        guards.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let mut diagnostics = diagnostics;
        let certificate = match certify(t, h, &guards) {
            Ok(c) => c,
            Err(e) => {
                // canonical placement failed to certify; fall back to the greedy witness
                diagnostics.push(format!(
                    "canonical guards leave edge {e} uncovered; using greedy guards"
                ));
                guards = Viewers::new(t).greedy_guards(h, None);
                certify(t, h, &guards).unwrap_or_default()
            }
        };
        AtcSolution {
            h_star: convert(h),
            guards: guards.iter().map(convert).collect(),
            certificate,
            method,
            mode: S::MODE,
            diagnostics,
        }
    }
}

/// Whether `k` guards on `L(h)` suffice, with the greedy witness.
pub fn decide<S: Scalar>(t: &Terrain<S>, k: usize, h: &S) -> (bool, Vec<S>) {
    decide_with(&Viewers::new(t), k, h)
}

pub(crate) fn decide_with<S: Scalar>(v: &Viewers<S>, k: usize, h: &S) -> (bool, Vec<S>) {
    let guards = v.greedy_guards(h, Some(k));
    (guards.len() <= k, guards)
}

/// Assign every edge to one guard that sees it fully, or to two guards whose
/// visible portions (a suffix and a prefix) join up. `Err(e)` names an uncovered edge.
pub fn certify<S: Scalar>(t: &Terrain<S>, h: &S, guards: &[S]) -> Result<Vec<EdgeCover>, usize> {
    let v = Viewers::new(t);
    let views: Vec<_> = guards
        .iter()
        .map(|g| v.views_from(&crate::geom::Point::new(g.clone(), h.clone())))
        .collect();
    let mut out = Vec::with_capacity(t.num_edges());
    for e in 0..t.num_edges() {
        if let Some(i) = views.iter().position(|vw| vw[e].portion.is_full()) {
            out.push(EdgeCover {
                edge: e,
                guards: vec![i],
            });
            continue;
        }
        let (a, b) = t.edge(e);
        // best suffix start and best prefix end over all guards
        let mut suffix: Option<(usize, S)> = None;
        let mut prefix: Option<(usize, S)> = None;
        for (i, vw) in views.iter().enumerate() {
            if let Portion::Part { from, to } = &vw[e].portion {
                if to.x.cmp_tol(&b.x) == Ordering::Equal && suffix.as_ref().is_none_or(|(_, s)| from.x < *s) {
                    suffix = Some((i, from.x.clone()));
                }
                if from.x.cmp_tol(&a.x) == Ordering::Equal && prefix.as_ref().is_none_or(|(_, p)| to.x > *p) {
                    prefix = Some((i, to.x.clone()));
                }
            }
        }
        match (suffix, prefix) {
            (Some((i, s)), Some((j, p))) if p.cmp_tol(&s) != Ordering::Less => {
                let mut g = vec![i, j];
                g.sort_unstable();
                g.dedup();
                out.push(EdgeCover { edge: e, guards: g });
            }
            _ => return Err(e),
        }
    }
    Ok(out)
}

/// Guards above every other vertex; they cover the terrain at any altitude.
pub fn every_other_vertex<S: Scalar>(t: &Terrain<S>) -> Vec<S> {
    (1..t.n()).step_by(2).map(|i| t.vertex(i).x.clone()).collect()
}

/// `max_e` of the edge lines, minimized over the domain: `(x, value)` at the leftmost minimizer.
pub fn lowest_point_in_domain<S: Scalar>(t: &Terrain<S>) -> (S, S) {
    let lines: Vec<(S, S)> = (0..t.num_edges())
        .map(|e| {
            let (a, _) = t.edge(e);
            let m = t.edge_slope(e);
            (m.clone(), a.y.clone() - m * a.x.clone())
        })
        .collect();
    minimize_max_of_lines(&lines, t.x_min(), t.x_max())
}

/// One guard: the lowest point above every edge line, lifted to `y(T)` if needed.
pub fn solve_k1<S: Scalar>(t: &Terrain<S>) -> AtcSolution {
    let (x, v) = lowest_point_in_domain(t);
    let y = t.y_max().clone();
    let (h, guard) = if v >= y {
        (v, x)
    } else {
        // the whole feasible stretch of L(y(T)); take its right end
        let f = Viewers::new(t).f_all(&y);
        (y, f)
    };
    AtcSolution::build(t, &h, vec![guard], AtcMethod::K1, Vec::new())
}

/// Altitude within `eps` above the optimum, by exponential bracketing and bisection on [`decide`].
pub fn solve_bisect<S: Scalar>(t: &Terrain<S>, k: usize, eps: &S) -> AtcSolution {
    let v = Viewers::new(t);
    let (h, guards) = bisect_range(&v, k, t.y_max().clone(), None, eps);
    AtcSolution::build(t, &h, guards, AtcMethod::Bisect, Vec::new())
}

/// Smallest feasible altitude in `(lo, hi]` to within `eps`; `hi = None` brackets upward first.
pub(crate) fn bisect_range<S: Scalar>(v: &Viewers<S>, k: usize, lo: S, hi: Option<S>, eps: &S) -> (S, Vec<S>) {
    let (ok, g) = decide_with(v, k, &lo);
    if ok {
        return (lo, g);
    }
    let mut lo = lo;
    let mut hi = match hi {
        Some(h) => h,
        None => {
            let t = v.terrain();
            let span = S::max_of(t.x_max().clone() - t.x_min().clone(), S::one());
            let mut step = span;
            loop {
                let cand = lo.clone() + step.clone();
                if decide_with(v, k, &cand).0 {
                    break cand;
                }
                lo = cand;
                step = step.clone() + step;
            }
        }
    };
    while hi.clone() - lo.clone() > *eps {
        let mid = S::midpoint(&lo, &hi);
        if decide_with(v, k, &mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let g = decide_with(v, k, &hi).1;
    (hi, g)
}

/// Binary search over sorted candidate heights: the interval `(c_{i-1}, c_i]` holding the optimum.
/// Candidates outside `(bounds.lower, bounds.upper]` are ignored; the bounds close the ends.
pub fn interval_search<S: Scalar>(t: &Terrain<S>, candidates: &[S], k: usize) -> Result<AltitudeInterval<S>, AtcError> {
    if candidates.is_empty() {
        return Err(AtcError::EmptyCandidates);
    }
    let v = Viewers::new(t);
    let y = t.y_max().clone();
    if decide_with(&v, k, &y).0 {
        return Ok(AltitudeInterval::new(y.clone(), Some(y), false, false));
    }
    let bounds = AltitudeInterval::new(y, None, true, false);
    Ok(search_within(&v, candidates, k, &bounds))
}

pub(crate) fn search_within<S: Scalar>(
    v: &Viewers<S>,
    candidates: &[S],
    k: usize,
    bounds: &AltitudeInterval<S>,
) -> AltitudeInterval<S> {
    let inside: Vec<&S> = candidates
        .iter()
        .filter(|c| **c > bounds.lower && bounds.upper.as_ref().is_none_or(|u| **c < *u))
        .collect();
    // first index whose candidate is feasible
    let (mut a, mut b) = (0usize, inside.len());
    while a < b {
        let m = (a + b) / 2;
        if decide_with(v, k, inside[m]).0 {
            b = m;
        } else {
            a = m + 1;
        }
    }
    let lower = if a == 0 {
        bounds.lower.clone()
    } else {
        inside[a - 1].clone()
    };
    let upper = if a < inside.len() {
        Some(inside[a].clone())
    } else {
        bounds.upper.clone()
    };
    AltitudeInterval::new(lower, upper, true, false)
}

/// Dispatch on `k`: one guard, the every-other-vertex floor, two guards, then even/odd pipelines.
pub fn solve(t: &Terrain<Rational>, k: usize) -> Result<AtcSolution, AtcError> {
    if k == 0 {
        return Err(AtcError::InvalidK);
    }
    if k == 1 {
        return Ok(solve_k1(t));
    }
    if k >= t.n() / 2 {
        let y = t.y_max().clone();
        return Ok(AtcSolution::build(
            t,
            &y,
            every_other_vertex(t),
            AtcMethod::Floor,
            Vec::new(),
        ));
    }
    if k == 2 {
        return Ok(solve_k2(t));
    }
    if k.is_multiple_of(2) {
        Ok(solve_even(t, k))
    } else {
        Ok(solve_odd(t, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::terrain::parse_terrain;

    fn tw() -> Terrain<Rational> {
        parse_terrain("0,0\n1,1\n2,0\n3,1\n4,0\n").unwrap()
    }

    #[test]
    fn decide_on_w_terrain() {
        let t = tw();
        assert!(decide(&t, 1, &rat(2, 1)).0);
        assert!(!decide(&t, 1, &rat(3, 2)).0);
        let (ok, g) = decide(&t, 2, &rat(1, 1));
        assert!(ok);
        assert_eq!(g, vec![rat(1, 1), rat(4, 1)]);
    }

    #[test]
    fn one_guard_cases() {
        let s = solve_k1(&tw());
        assert_eq!((s.h_star.clone(), s.guards.clone()), (rat(2, 1), vec![rat(2, 1)]));
        let up = parse_terrain("0,0\n1,1\n").unwrap();
        let s = solve_k1(&up);
        assert_eq!((s.h_star.clone(), s.guards.clone()), (rat(1, 1), vec![rat(1, 1)]));
        let flat = parse_terrain("0,0\n1,0\n").unwrap();
        let s = solve_k1(&flat);
        assert_eq!((s.h_star.clone(), s.guards.clone()), (rat(0, 1), vec![rat(0, 1)]));
        assert_eq!(s.certificate.len(), 1);
    }

    #[test]
    fn bisection_baseline() {
        let t = tw();
        let s = solve_bisect(&t, 1, &rat(1, 1_000_000_000));
        assert!((s.h_star_f64() - 2.0).abs() <= 1e-9);
        let s = solve_bisect(&t, 2, &rat(1, 1_000_000_000));
        assert_eq!(s.h_star, rat(1, 1));
        let flat = parse_terrain("0,0\n1,0\n2,0.5\n").unwrap();
        assert_eq!(solve_bisect(&flat, 3, &rat(1, 1000)).h_star, rat(1, 2));
    }

    #[test]
    fn interval_search_brackets_optimum() {
        let t = tw();
        let i = interval_search(&t, &[rat(1, 1), rat(2, 1), rat(3, 1)], 1).unwrap();
        assert_eq!((i.lower, i.upper), (rat(1, 1), Some(rat(2, 1))));
        assert!(i.lower_open && !i.upper_open);
        let i = interval_search(&t, &[rat(1, 1), rat(2, 1)], 2).unwrap();
        assert_eq!((i.lower, i.upper), (rat(1, 1), Some(rat(1, 1))));
        assert_eq!(interval_search(&t, &[], 1), Err(AtcError::EmptyCandidates));
    }

    #[test]
    fn certificate_pairs_partial_views() {
        let t = tw();
        let c = certify(&t, &rat(1, 1), &[rat(1, 1), rat(3, 1)]).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(certify(&t, &rat(1, 1), &[rat(1, 1)]), Err(3));
        assert_eq!(certify(&t, &rat(1, 1), &[]), Err(0));
    }
}
