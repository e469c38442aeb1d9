//! Bijective cover: every guard owns one contiguous subchain with vertex endpoints.
//!
//! A guard on `L(h)` inside the x-range of a subchain sees all of it iff it lies
//! above every edge line of the subchain. At `h >= y(T)` that is an interval of
//! abscissae, so everything reduces to half-plane intersections in exact arithmetic.

use std::collections::{BTreeMap, VecDeque};
use std::ops::Bound::{Excluded, Unbounded};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::envelope::AltitudeInterval;
use crate::geom::{minimize_max_of_lines, Point};
use crate::scalar::Rational;
use crate::terrain::Terrain;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum BatcError {
    #[error("altitude {0} lies below the terrain (y(T) = {1})")]
    BelowTerrain(f64, f64),
    #[error("k must be at least 1")]
    InvalidK,
}

/// Lowest guard for the subchain `v_i .. v_j` (0-based, `i < j`).
#[derive(Debug, Clone, PartialEq)]
pub struct SubchainWitness {
    pub i: usize,
    pub j: usize,
    /// Rightmost point of the feasible stretch at `required_h`.
    pub w: Point<Rational>,
    pub required_h: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatcPair {
    pub guard_x: Rational,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatcSolution {
    pub h_star: Rational,
    pub pairs: Vec<BatcPair>,
}

impl BatcSolution {
    /// Every pair's guard lies in its subchain's x-range and above all of its edge lines.
    pub fn certify(&self, t: &Terrain<Rational>) -> bool {
        let mut next = 0;
        for p in &self.pairs {
            if p.from != next || p.to <= p.from {
                return false;
            }
            if !sees_subchain(t, p.from, p.to, &p.guard_x, &self.h_star) {
                return false;
            }
            next = p.to;
        }
        next == t.n() - 1
    }
}

/// Whether `(x, h)` lies in the x-range of `v_i .. v_j` and on or above each of its edge lines.
pub fn sees_subchain(t: &Terrain<Rational>, i: usize, j: usize, x: &Rational, h: &Rational) -> bool {
    if x < &t.vertex(i).x || x > &t.vertex(j).x {
        return false;
    }
    (i..j).all(|e| {
        let (m, c) = slope_intercept(t, e);
        m * x + c <= *h
    })
}

fn slope_intercept(t: &Terrain<Rational>, e: usize) -> (Rational, Rational) {
    let (a, _) = t.edge(e);
    let m = t.edge_slope(e);
    let c = &a.y - &m * &a.x;
    (m, c)
}

/// Abscissa where edge line `e` reaches height `h`; `None` for a horizontal edge.
fn root_at(t: &Terrain<Rational>, e: usize, h: &Rational) -> Option<Rational> {
    let (m, c) = slope_intercept(t, e);
    if m.is_zero() {
        None
    } else {
        Some((h - c) / m)
    }
}

/// Rightmost feasible abscissa for `v_i .. v_j` at `h`.
fn rightmost_at(t: &Terrain<Rational>, i: usize, j: usize, h: &Rational) -> Rational {
    (i..j)
        .filter(|&e| t.edge_slope(e).is_positive())
        .filter_map(|e| root_at(t, e, h))
        .fold(t.vertex(j).x.clone(), |acc, r| acc.min(r))
}

/// Leftmost feasible abscissa for `v_i .. v_j` at `h`.
fn leftmost_at(t: &Terrain<Rational>, i: usize, j: usize, h: &Rational) -> Rational {
    (i..j)
        .filter(|&e| t.edge_slope(e).is_negative())
        .filter_map(|e| root_at(t, e, h))
        .fold(t.vertex(i).x.clone(), |acc, r| acc.max(r))
}

/// Direct computation: minimize the upper envelope of the edge lines over `[x(v_i), x(v_j)]`, clamp to `y(T)`.
pub fn required_height(t: &Terrain<Rational>, i: usize, j: usize) -> SubchainWitness {
    assert!(i < j && j < t.n(), "need i < j < n");
    let lines: Vec<(Rational, Rational)> = (i..j).map(|e| slope_intercept(t, e)).collect();
    let (_, v) = minimize_max_of_lines(&lines, &t.vertex(i).x, &t.vertex(j).x);
    let h = v.max(t.y_max().clone());
    let x = rightmost_at(t, i, j, &h);
    SubchainWitness {
        i,
        j,
        w: Point::new(x, h.clone()),
        required_h: h,
    }
}

// ---------------------------------------------------------------- prefix sweep

/// Upper envelope of non-horizontal lines keyed by slope.
#[derive(Debug, Default)]
struct Hull {
    lines: BTreeMap<Rational, Rational>,
    ops: usize,
}

/// Middle line `b` never rises above both neighbours.
fn redundant(a: (&Rational, &Rational), b: (&Rational, &Rational), c: (&Rational, &Rational)) -> bool {
    (b.0 - a.0) * (a.1 - c.1) + (b.1 - a.1) * (c.0 - a.0) <= Rational::zero()
}

impl Hull {
    fn pred(&self, m: &Rational) -> Option<(Rational, Rational)> {
        self.lines
            .range(..m.clone())
            .next_back()
            .map(|(a, b)| (a.clone(), b.clone()))
    }

    fn succ(&self, m: &Rational) -> Option<(Rational, Rational)> {
        self.lines
            .range((Excluded(m.clone()), Unbounded))
            .next()
            .map(|(a, b)| (a.clone(), b.clone()))
    }

    fn insert(&mut self, m: Rational, c: Rational) {
        if let Some(old) = self.lines.get(&m) {
            if *old >= c {
                return;
            }
            self.lines.remove(&m);
            self.ops += 1;
        }
        if let (Some(p), Some(s)) = (self.pred(&m), self.succ(&m)) {
            if redundant((&p.0, &p.1), (&m, &c), (&s.0, &s.1)) {
                return;
            }
        }
        self.lines.insert(m.clone(), c.clone());
        self.ops += 1;
        while let Some(p) = self.pred(&m) {
            let Some(pp) = self.pred(&p.0) else { break };
            if !redundant((&pp.0, &pp.1), (&p.0, &p.1), (&m, &c)) {
                break;
            }
            self.lines.remove(&p.0);
            self.ops += 1;
        }
        while let Some(s) = self.succ(&m) {
            let Some(ss) = self.succ(&s.0) else { break };
            if !redundant((&m, &c), (&s.0, &s.1), (&ss.0, &ss.1)) {
                break;
            }
            self.lines.remove(&s.0);
            self.ops += 1;
        }
    }

    /// Crossing of the falling and rising parts: the lowest point of the envelope.
    fn bottom(&self) -> Option<(Rational, Rational)> {
        let zero = Rational::zero();
        let (mn, cn) = self.lines.range(..zero.clone()).next_back()?;
        let (mp, cp) = self.lines.range((Excluded(zero), Unbounded)).next()?;
        let x = (cn - cp) / (mp - mn);
        let v = mp * &x + cp;
        Some((x, v))
    }
}

/// Witnesses `w(i, l)` for `l = i+1, i+2, ...`, produced lazily.
///
/// While the prefix is coverable from `L(y(T))` the answer only needs the
/// running extreme roots at `y(T)`. After that the lowest point of the edge-line
/// envelope is the witness; the envelope changes by at most one insertion and
/// amortized O(1) deletions per edge.
pub struct PrefixSweep<'a> {
    t: &'a Terrain<Rational>,
    start: usize,
    next_edge: usize,
    hull: Hull,
    /// Extreme feasible abscissae at `y(T)` over the edges so far.
    lower: Rational,
    upper: Option<Rational>,
    above_floor: bool,
    steps: usize,
}

impl<'a> PrefixSweep<'a> {
    pub fn new(t: &'a Terrain<Rational>, start: usize) -> Self {
        PrefixSweep {
            t,
            start,
            next_edge: start,
            hull: Hull::default(),
            lower: t.vertex(start).x.clone(),
            upper: None,
            above_floor: false,
            steps: 0,
        }
    }

    /// Work done so far: one step per edge plus every envelope insertion and deletion.
    pub fn ops(&self) -> usize {
        self.steps + self.hull.ops
    }
}

impl Iterator for PrefixSweep<'_> {
    type Item = SubchainWitness;

    fn next(&mut self) -> Option<SubchainWitness> {
        let t = self.t;
        let e = self.next_edge;
        if e + 1 >= t.n() {
            return None;
        }
        self.next_edge += 1;
        self.steps += 1;
        let floor = t.y_max();
        let (m, c) = slope_intercept(t, e);
        if !m.is_zero() {
            let r = (floor - &c) / &m;
            if m.is_positive() {
                self.upper = Some(match self.upper.take() {
                    Some(u) => u.min(r),
                    None => r,
                });
            } else {
                self.lower = self.lower.clone().max(r);
            }
            self.hull.insert(m, c);
        }
        let j = e + 1;
        let xj = &t.vertex(j).x;
        if !self.above_floor {
            let right = self.upper.as_ref().map_or(xj.clone(), |u| u.clone().min(xj.clone()));
            if self.lower <= right {
                return Some(SubchainWitness {
                    i: self.start,
                    j,
                    w: Point::new(right, floor.clone()),
                    required_h: floor.clone(),
                });
            }
            self.above_floor = true;
        }
        let (x, v) = self
            .hull
            .bottom()
            .expect("a prefix above the floor has rising and falling edges");
        Some(SubchainWitness {
            i: self.start,
            j,
            w: Point::new(x, v.clone()),
            required_h: v,
        })
    }
}

/// All witnesses `w(i, l)` for `l = i+1 .. n-1`.
pub fn sweep_w_prefix(t: &Terrain<Rational>, i: usize) -> Vec<SubchainWitness> {
    PrefixSweep::new(t, i).collect()
}

// ---------------------------------------------------------------- fixed altitude

/// Farthest vertex `next[j]` such that `v_j .. v_next[j]` is coverable from `L(h)`; two pointers over monotone deques.
pub fn farthest_reach(t: &Terrain<Rational>, h: &Rational) -> Vec<usize> {
    let n = t.n();
    let mut next = vec![n - 1; n];
    // (edge, root) with roots decreasing for the falling edges, increasing for the rising ones
    let mut falling: VecDeque<(usize, Rational)> = VecDeque::new();
    let mut rising: VecDeque<(usize, Rational)> = VecDeque::new();
    let mut end = 0usize;
    for j in 0..n - 1 {
        if end < j {
            end = j;
        }
        while end < n - 1 {
            let e = end;
            let m = t.edge_slope(e);
            let ok = match root_at(t, e, h) {
                None => true,
                Some(r) if m.is_positive() => falling.front().is_none_or(|(_, l)| *l <= r),
                Some(r) => rising.front().is_none_or(|(_, u)| r <= *u),
            };
            if !ok {
                break;
            }
            if let Some(r) = root_at(t, e, h) {
                if m.is_positive() {
                    while rising.back().is_some_and(|(_, u)| *u >= r) {
                        rising.pop_back();
                    }
                    rising.push_back((e, r));
                } else {
                    while falling.back().is_some_and(|(_, l)| *l <= r) {
                        falling.pop_back();
                    }
                    falling.push_back((e, r));
                }
            }
            end += 1;
        }
        next[j] = end;
        if falling.front().is_some_and(|(e, _)| *e == j) {
            falling.pop_front();
        }
        if rising.front().is_some_and(|(e, _)| *e == j) {
            rising.pop_front();
        }
    }
    next
}

fn check_floor(t: &Terrain<Rational>, h: &Rational) -> Result<(), BatcError> {
    if h < t.y_max() {
        Err(BatcError::BelowTerrain(
            crate::scalar::Scalar::to_f64(h),
            crate::scalar::Scalar::to_f64(t.y_max()),
        ))
    } else {
        Ok(())
    }
}

/// Minimum number of guard/subchain pairs on `L(h)`: greedy longest subchains from the left.
pub fn batc_count(t: &Terrain<Rational>, h: &Rational) -> Result<BatcSolution, BatcError> {
    check_floor(t, h)?;
    let next = farthest_reach(t, h);
    let mut pairs = Vec::new();
    let mut s = 0;
    while s < t.n() - 1 {
        let j = next[s];
        pairs.push(BatcPair {
            guard_x: leftmost_at(t, s, j, h),
            from: s,
            to: j,
        });
        s = j;
    }
    Ok(BatcSolution {
        h_star: h.clone(),
        pairs,
    })
}

fn min_pairs(next: &[usize]) -> usize {
    let mut s = 0;
    let mut count = 0;
    while s < next.len() - 1 {
        s = next[s];
        count += 1;
    }
    count
}

fn feasible(t: &Terrain<Rational>, k: usize, h: &Rational) -> bool {
    min_pairs(&farthest_reach(t, h)) <= k
}

/// Exactly `min(k, n-1)` pairs at `h`, cutting as early as possible (smallest cut sequence).
pub fn partition_at(t: &Terrain<Rational>, k: usize, h: &Rational) -> Vec<BatcPair> {
    let n = t.n();
    let next = farthest_reach(t, h);
    // fewest pairs needed for the suffix starting at j
    let mut need = vec![0usize; n];
    for j in (0..n - 1).rev() {
        need[j] = 1 + need[next[j]];
    }
    let k = k.min(n - 1);
    let mut pairs = Vec::with_capacity(k);
    let mut s = 0;
    for r in 1..k {
        let left = k - r;
        let j = (s + 1..=next[s])
            .find(|&j| need[j] <= left && n - 1 - j >= left)
            .expect("h is feasible for k pairs");
        pairs.push(BatcPair {
            guard_x: leftmost_at(t, s, j, h),
            from: s,
            to: j,
        });
        s = j;
    }
    pairs.push(BatcPair {
        guard_x: leftmost_at(t, s, n - 1, h),
        from: s,
        to: n - 1,
    });
    pairs
}

// ---------------------------------------------------------------- altitude optimization

/// Two pairs: best split vertex from one forward and one mirrored prefix sweep.
pub fn batc_altitude_k2(t: &Terrain<Rational>) -> BatcSolution {
    let n = t.n();
    if n < 3 {
        return batc_altitude_k1(t);
    }
    let forward: Vec<Rational> = PrefixSweep::new(t, 0).map(|w| w.required_h).collect();
    let mirrored = t.mirrored();
    let backward: Vec<Rational> = PrefixSweep::new(&mirrored, 0).map(|w| w.required_h).collect();
    // forward[i-1] = req(0, i); backward[n-2-i] = req(i, n-1)
    let (split, h) = (1..n - 1)
        .map(|i| (i, forward[i - 1].clone().max(backward[n - 2 - i].clone())))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("n >= 3");
    let pairs = vec![
        BatcPair {
            guard_x: leftmost_at(t, 0, split, &h),
            from: 0,
            to: split,
        },
        BatcPair {
            guard_x: leftmost_at(t, split, n - 1, &h),
            from: split,
            to: n - 1,
        },
    ];
    BatcSolution { h_star: h, pairs }
}

fn batc_altitude_k1(t: &Terrain<Rational>) -> BatcSolution {
    let n = t.n();
    let w = required_height(t, 0, n - 1);
    let h = w.required_h;
    BatcSolution {
        pairs: vec![BatcPair {
            guard_x: leftmost_at(t, 0, n - 1, &h),
            from: 0,
            to: n - 1,
        }],
        h_star: h,
    }
}

/// One altitude range with constant greedy reach.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEntry {
    /// Half-open `[lower, upper)`; `upper = None` is unbounded.
    pub interval: AltitudeInterval<Rational>,
    /// Vertex where this guard's subchain starts.
    pub start: usize,
    /// Last vertex this guard covers; `None` when earlier guards already reached `v_n`.
    pub reach: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementRow {
    /// 1-based guard index; row 0 is the seed row before any guard.
    pub guard: usize,
    pub entries: Vec<RowEntry>,
}

impl RefinementRow {
    /// Seed row over `[lower, upper)`: nothing covered yet.
    pub fn seed(lower: Rational, upper: Option<Rational>) -> Self {
        RefinementRow {
            guard: 0,
            entries: vec![RowEntry {
                interval: AltitudeInterval::new(lower, upper, false, true),
                start: 0,
                reach: Some(0),
            }],
        }
    }

    /// Rows are ordered, disjoint, contiguous, and reaches never drop with altitude.
    pub fn is_well_formed(&self, n: usize) -> bool {
        let ordered = self.entries.windows(2).all(|w| {
            w[0].interval.upper.as_ref() == Some(&w[1].interval.lower) && w[0].interval.lower < w[1].interval.lower
        });
        let reach = |e: &RowEntry| e.reach.unwrap_or(n);
        let monotone = self.entries.windows(2).all(|w| reach(&w[0]) <= reach(&w[1]));
        ordered && monotone
    }
}

/// Split each entry of `prev` where the next guard's reach changes.
pub fn refine_intervals(t: &Terrain<Rational>, prev: &RefinementRow) -> RefinementRow {
    let last = t.n() - 1;
    let mut entries = Vec::new();
    for entry in &prev.entries {
        let s = match entry.reach {
            Some(r) if r < last => r,
            _ => {
                entries.push(RowEntry {
                    interval: entry.interval.clone(),
                    start: last,
                    reach: None,
                });
                continue;
            }
        };
        let lo = &entry.interval.lower;
        let hi = entry.interval.upper.as_ref();
        // reach at lo, then every witness height inside (lo, hi) opens a new entry
        let mut reach = s;
        let mut cuts: Vec<(Rational, usize)> = Vec::new();
        for w in PrefixSweep::new(t, s) {
            if hi.is_some_and(|hi| w.required_h >= *hi) {
                break;
            }
            if w.required_h <= *lo {
                reach = w.j;
            } else if cuts.last().is_some_and(|(h, _)| *h == w.required_h) {
                cuts.last_mut().unwrap().1 = w.j;
            } else {
                cuts.push((w.required_h, w.j));
            }
        }
        let mut bottom = lo.clone();
        for (h, j) in cuts {
            entries.push(RowEntry {
                interval: AltitudeInterval::new(bottom, Some(h.clone()), false, true),
                start: s,
                reach: Some(reach),
            });
            bottom = h;
            reach = j;
        }
        entries.push(RowEntry {
            interval: AltitudeInterval::new(bottom, hi.cloned(), false, true),
            start: s,
            reach: Some(reach),
        });
    }
    RefinementRow {
        guard: prev.guard + 1,
        entries,
    }
}

/// Lowest altitude admitting `k` pairs.
///
/// Rows are refined guard by guard. After each row the working range shrinks to
/// the one entry holding the optimum (binary search with the linear-time
/// decision), so every later row refines a single interval. The optimum is the
/// lower end of the lowest entry of row `k` in which `v_n` is covered.
pub fn batc_altitude(t: &Terrain<Rational>, k: usize) -> Result<BatcSolution, BatcError> {
    if k == 0 {
        return Err(BatcError::InvalidK);
    }
    if k == 1 {
        return Ok(batc_altitude_k1(t));
    }
    if k == 2 {
        return Ok(batc_altitude_k2(t));
    }
    let (h, _) = batc_altitude_rows(t, k);
    Ok(BatcSolution {
        pairs: partition_at(t, k, &h),
        h_star: h,
    })
}

/// Staged row refinement; also returns the rows for inspection.
pub fn batc_altitude_rows(t: &Terrain<Rational>, k: usize) -> (Rational, Vec<RefinementRow>) {
    let last = t.n() - 1;
    let floor = t.y_max().clone();
    if feasible(t, k, &floor) {
        return (floor, Vec::new());
    }
    let mut row = RefinementRow::seed(floor, None);
    let mut rows = Vec::new();
    // smallest known feasible altitude above the working range
    let mut top: Option<Rational> = None;
    for guard in 1..=k {
        row = refine_intervals(t, &row);
        rows.push(row.clone());
        if guard == k {
            break;
        }
        // first entry whose lower end is feasible; the optimum lies in the entry below it or at its lower end
        let (mut a, mut b) = (1usize, row.entries.len());
        while a < b {
            let mid = (a + b) / 2;
            if feasible(t, k, &row.entries[mid].interval.lower) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        if a < row.entries.len() {
            top = Some(row.entries[a].interval.lower.clone());
        }
        row.entries = vec![row.entries[a - 1].clone()];
    }
    let covered = row
        .entries
        .iter()
        .find(|e| e.reach.is_none_or(|r| r == last))
        .map(|e| e.interval.lower.clone());
    let h = covered
        .or(top)
        .unwrap_or_else(|| required_height(t, 0, last).required_h);
    (h, rows)
}
