//! Brute-force references. Slow on purpose; each one shares as little code with
//! the solvers as possible.

use std::cmp::Ordering;

use crate::geom::Point;
use crate::scalar::{Rational, Scalar};
use crate::terrain::Terrain;
use crate::visibility::{is_visible, Root};

/// Samples per edge, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleGrid {
    per_edge: usize,
}

impl SampleGrid {
    /// At least two samples per edge.
    pub fn new(per_edge: usize) -> Self {
        assert!(per_edge >= 2, "a sample grid needs both endpoints");
        SampleGrid { per_edge }
    }

    pub fn per_edge(&self) -> usize {
        self.per_edge
    }

    /// Points `a + (b - a) i / (s - 1)` on every edge, shared endpoints listed once.
    pub fn points<S: Scalar>(&self, t: &Terrain<S>) -> Vec<Point<S>> {
        let s = self.per_edge as i64;
        let mut out = vec![t.vertex(0).clone()];
        for e in 0..t.num_edges() {
            let (a, b) = t.edge(e);
            for i in 1..s {
                let f = S::from_i64(i) / S::from_i64(s - 1);
                out.push(Point::new(
                    a.x.clone() + (b.x.clone() - a.x.clone()) * f.clone(),
                    a.y.clone() + (b.y.clone() - a.y.clone()) * f,
                ));
            }
        }
        out
    }
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { per_edge: 64 }
    }
}

/// `y >= slope x + intercept` (`above`) or `y <= slope x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlane {
    pub slope: Rational,
    pub intercept: Rational,
    pub above: bool,
}

impl HalfPlane {
    pub fn above(slope: Rational, intercept: Rational) -> Self {
        HalfPlane {
            slope,
            intercept,
            above: true,
        }
    }

    fn at(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    fn contains(&self, p: &Point<Rational>) -> bool {
        let y = self.at(&p.x);
        if self.above {
            p.y >= y
        } else {
            p.y <= y
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LowestPoint {
    /// Lowest feasible pairwise intersection (leftmost among ties).
    Vertex(Point<Rational>),
    /// No feasible vertex: the caller evaluates its domain boundary instead.
    Unbounded,
}

/// Every pairwise boundary intersection, filtered for feasibility: O(m^3).
pub fn oracle_lowest_point(halfplanes: &[HalfPlane]) -> LowestPoint {
    let mut best: Option<Point<Rational>> = None;
    for (i, p) in halfplanes.iter().enumerate() {
        for q in &halfplanes[i + 1..] {
            if p.slope == q.slope {
                continue;
            }
            let x = (&q.intercept - &p.intercept) / (&p.slope - &q.slope);
            let v = Point::new(x.clone(), p.at(&x));
            if !halfplanes.iter().all(|h| h.contains(&v)) {
                continue;
            }
            let better = best.as_ref().is_none_or(|b| (&v.y, &v.x) < (&b.y, &b.x));
            if better {
                best = Some(v);
            }
        }
    }
    best.map_or(LowestPoint::Unbounded, LowestPoint::Vertex)
}

/// Upper half-planes of the edges `v_i .. v_j`.
pub fn edge_halfplanes(t: &Terrain<Rational>, i: usize, j: usize) -> Vec<HalfPlane> {
    (i..j)
        .map(|e| {
            let (a, _) = t.edge(e);
            let m = t.edge_slope(e);
            let c = &a.y - &m * &a.x;
            HalfPlane::above(m, c)
        })
        .collect()
}

/// Lowest altitude for one guard above the whole terrain, from the vertex-enumeration LP:
/// a feasible vertex inside the x-range, else the better domain end.
pub fn oracle_one_guard_height(t: &Terrain<Rational>) -> Rational {
    let hp = edge_halfplanes(t, 0, t.n() - 1);
    let top = |x: &Rational| hp.iter().map(|h| h.at(x)).max().expect("at least one edge");
    let ends = top(t.x_min()).min(top(t.x_max()));
    let lowest = match oracle_lowest_point(&hp) {
        LowestPoint::Vertex(p) if p.x >= *t.x_min() && p.x <= *t.x_max() => p.y.min(ends),
        _ => ends,
    };
    lowest.max(t.y_max().clone())
}

/// Every sampled terrain point is visible from some guard on `L(h)`.
pub fn oracle_cover_check<S: Scalar>(t: &Terrain<S>, h: &S, guards: &[S], grid: SampleGrid) -> bool {
    let viewers: Vec<Point<S>> = guards.iter().map(|x| Point::new(x.clone(), h.clone())).collect();
    grid.points(t)
        .iter()
        .all(|p| viewers.iter().any(|u| is_visible(t, u, p).unwrap_or(false)))
}

/// Abscissae on `L(h)` (within the terrain's x-range) that see `p`, straight from
/// the vertices: a viewer beyond vertex `w` sees `p` iff it is not below line `p w`.
pub fn viewer_interval<S: Scalar>(t: &Terrain<S>, p: &Point<S>, h: &S) -> (S, S) {
    let rise = h.clone() - p.y.clone();
    let mut lo = t.x_min().clone();
    let mut hi = t.x_max().clone();
    for w in t.vertices() {
        let dy = w.y.clone() - p.y.clone();
        if dy.sign() != Ordering::Greater {
            continue;
        }
        let dx = w.x.clone() - p.x.clone();
        let reach = p.x.clone() + rise.clone() * dx.clone() / dy;
        match dx.sign() {
            Ordering::Greater => hi = S::min_of(hi, reach),
            Ordering::Less => lo = S::max_of(lo, reach),
            Ordering::Equal => {}
        }
    }
    (lo, hi)
}

/// Fewest points on `L(h)` stabbing every sample's viewer interval (greedy by right end).
pub fn oracle_min_guards<S: Scalar>(t: &Terrain<S>, h: &S, grid: SampleGrid) -> usize {
    let mut intervals: Vec<(S, S)> = grid.points(t).iter().map(|p| viewer_interval(t, p, h)).collect();
    intervals.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
    let mut count = 0;
    let mut last: Option<S> = None;
    for (lo, hi) in intervals {
        if last.as_ref().is_some_and(|x| lo.cmp_tol(x) != Ordering::Greater) {
            continue;
        }
        count += 1;
        last = Some(hi);
    }
    count
}

/// Lowest altitude for one guard owning `v_i .. v_j` within its x-range, clamped to `y(T)`.
///
/// The sublevel sets of the edge lines on the x-range are intervals, so by Helly's
/// theorem on the line the minimum of their maximum is attained by some pair.
pub fn oracle_required_height(t: &Terrain<Rational>, i: usize, j: usize) -> Rational {
    let hp = edge_halfplanes(t, i, j);
    let (a, b) = (&t.vertex(i).x, &t.vertex(j).x);
    let mut best = t.y_max().clone();
    for p in &hp {
        for q in &hp {
            // minimum of max(p, q) over [a, b]
            let f = |x: &Rational| p.at(x).max(q.at(x));
            let mut v = f(a).min(f(b));
            if p.slope != q.slope {
                let x = (&q.intercept - &p.intercept) / (&p.slope - &q.slope);
                if x >= *a && x <= *b {
                    v = v.min(f(&x));
                }
            }
            best = best.max(v);
        }
    }
    best
}

/// Table `req[i][j]` for every `i < j`.
pub fn required_height_table(t: &Terrain<Rational>) -> Vec<Vec<Option<Rational>>> {
    let n = t.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (i < j).then(|| oracle_required_height(t, i, j)))
                .collect()
        })
        .collect()
}

/// Optimal altitude over all partitions into at most `k` vertex-bounded subchains (DP over the table).
pub fn oracle_batc(t: &Terrain<Rational>, k: usize) -> Rational {
    assert!(k >= 1);
    let req = required_height_table(t);
    let n = t.n();
    // best[j]: optimum for v_0 .. v_j with the current number of subchains
    let mut best: Vec<Option<Rational>> = (0..n).map(|j| req[0][j].clone()).collect();
    for _ in 1..k.min(n - 1) {
        let prev = best.clone();
        for j in 1..n {
            for i in 1..j {
                if let (Some(a), Some(r)) = (&prev[i], &req[i][j]) {
                    let v = a.clone().max(r.clone());
                    if best[j].as_ref().is_none_or(|b| v < *b) {
                        best[j] = Some(v);
                    }
                }
            }
        }
    }
    best[n - 1].clone().expect("n >= 2")
}

/// Fewest subchains coverable from `L(h)` (DP over the table).
pub fn oracle_batc_count(t: &Terrain<Rational>, h: &Rational) -> usize {
    let req = required_height_table(t);
    let n = t.n();
    let mut fewest = vec![usize::MAX; n];
    fewest[0] = 0;
    for j in 1..n {
        for i in 0..j {
            if fewest[i] != usize::MAX && req[i][j].as_ref().is_some_and(|r| r <= h) {
                fewest[j] = fewest[j].min(fewest[i] + 1);
            }
        }
    }
    fewest[n - 1]
}

/// Whether vertices `a` and `b` see each other (no vertex strictly between lies strictly above the chord).
fn vertices_see<S: Scalar>(t: &Terrain<S>, a: usize, b: usize) -> bool {
    let (a, b) = (a.min(b), a.max(b));
    let (p, q) = (t.vertex(a), t.vertex(b));
    (a + 1..b).all(|w| {
        let r = t.vertex(w);
        let c = (q.x.clone() - p.x.clone()) * (r.y.clone() - p.y.clone())
            - (q.y.clone() - p.y.clone()) * (r.x.clone() - p.x.clone());
        c.sign() != Ordering::Greater
    })
}

/// Parents of the shortest-path tree by Dijkstra on the vertex visibility graph.
/// Equal-length paths prefer the predecessor closest to the vertex.
pub fn oracle_spt<S: Scalar>(t: &Terrain<S>, root: Root) -> Vec<Option<usize>> {
    let n = t.n();
    let src = match root {
        Root::Left => 0,
        Root::Right => n - 1,
    };
    let pos: Vec<(f64, f64)> = t.vertices().iter().map(|v| v.to_f64()).collect();
    let len = |a: usize, b: usize| ((pos[a].0 - pos[b].0).powi(2) + (pos[a].1 - pos[b].1).powi(2)).sqrt();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n)
            .filter(|&v| !done[v] && dist[v].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        else {
            break;
        };
        done[u] = true;
        for v in 0..n {
            if done[v] || v == u || !vertices_see(t, u, v) {
                continue;
            }
            let d = dist[u] + len(u, v);
            let tol = 1e-9 * (1.0 + d);
            let closer = parent[v].is_none_or(|p| u.abs_diff(v) < p.abs_diff(v));
            if d < dist[v] - tol || ((d - dist[v]).abs() <= tol && closer) {
                dist[v] = d.min(dist[v]);
                parent[v] = Some(u);
            }
        }
    }
    parent
}

/// Altitude where `k` guards first suffice, by bisection on the sampled stabbing count.
pub fn oracle_atc(t: &Terrain<f64>, k: usize, grid: SampleGrid, eps: f64) -> f64 {
    let y = *t.y_max();
    if oracle_min_guards(t, &y, grid) <= k {
        return y;
    }
    let (mut lo, mut hi) = (y, y + 1.0);
    while oracle_min_guards(t, &hi, grid) > k {
        lo = hi;
        hi = y + 2.0 * (hi - y);
    }
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if oracle_min_guards(t, &mid, grid) <= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `|a - b|` scaled by `1 + |b|`, for tolerance checks in tests and the CLI.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
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
    fn lowest_point_cases() {
        let t = tw();
        assert_eq!(
            oracle_lowest_point(&edge_halfplanes(&t, 0, 4)),
            LowestPoint::Vertex(Point::new(rat(2, 1), rat(2, 1)))
        );
        assert_eq!(
            oracle_lowest_point(&[HalfPlane::above(rat(1, 1), rat(0, 1))]),
            LowestPoint::Unbounded
        );
        let parallel = [
            HalfPlane::above(rat(1, 1), rat(0, 1)),
            HalfPlane::above(rat(1, 1), rat(3, 1)),
        ];
        assert_eq!(oracle_lowest_point(&parallel), LowestPoint::Unbounded);
        assert_eq!(oracle_one_guard_height(&t), rat(2, 1));
    }

    #[test]
    fn cover_check_cases() {
        let t = tw();
        let g = SampleGrid::default();
        assert!(oracle_cover_check(&t, &rat(1, 1), &[rat(1, 1), rat(3, 1)], g));
        assert!(!oracle_cover_check(&t, &rat(1, 1), &[rat(1, 1)], g));
        assert!(!oracle_cover_check(&t, &rat(1, 1), &[], g));
    }

    #[test]
    fn min_guard_cases() {
        let t: Terrain<f64> = tw().convert();
        let g = SampleGrid::default();
        assert_eq!(oracle_min_guards(&t, &1.0, g), 2);
        assert_eq!(oracle_min_guards(&t, &2.0, g), 1);
        let flat: Terrain<f64> = parse_terrain("0,0\n3,0\n").unwrap().convert();
        assert_eq!(oracle_min_guards(&flat, &0.0, g), 1);
    }

    #[test]
    fn batc_cases() {
        let t = tw();
        assert_eq!(oracle_batc(&t, 2), rat(1, 1));
        assert_eq!(oracle_batc(&t, 1), rat(2, 1));
        assert_eq!(oracle_batc(&t, 4), rat(1, 1));
        assert_eq!(oracle_batc(&t, 9), rat(1, 1));
        assert_eq!(oracle_batc_count(&t, &rat(1, 1)), 2);
        assert_eq!(oracle_required_height(&t, 0, 4), rat(2, 1));
    }

    #[test]
    fn spt_on_w_terrain() {
        let t = tw();
        assert_eq!(
            oracle_spt(&t, Root::Right),
            vec![Some(1), Some(3), Some(3), Some(4), None]
        );
        assert_eq!(
            oracle_spt(&t, Root::Left),
            vec![None, Some(0), Some(1), Some(1), Some(3)]
        );
    }

    #[test]
    fn grid_points_are_exact() {
        let t = tw();
        let pts = SampleGrid::new(3).points(&t);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[1], Point::new(rat(1, 2), rat(1, 2)));
        assert!(pts.iter().all(|p| p.y >= rat(0, 1)));
    }
}
