//! Staged solver for `k >= 2` guards.
//!
//! Let `f_i(h)` be the i-th guard of the left-to-right greedy at altitude `h`
//! and `g_i(h)` the i-th guard of the right-to-left greedy. With `m = ceil(k/2)`:
//!
//! * odd `k`: feasible iff `g_m(h) <= f_m(h)` (a middle guard fits between them);
//! * even `k`: feasible iff every edge strictly between `f_m` and `g_m` is covered
//!   by the suffix `f_m` sees and the prefix `g_m` sees.
//!
//! Stage `i` narrows the altitude interval until the combinatorial identity
//! of guards `1..=i` on both sides is constant (their anchors and tangent
//! vertices). Inside such an interval every `f_i` is a closed-form rational
//! function of `h`, so the final condition is solved directly.
//!
//! Candidate event heights come from the closed forms: envelope breakpoints of
//! each guard's candidates, sightline events of the previous guard (tree
//! edges, vertex verticals, edge lines), tangent switches of ray-hit anchors
//! and clamp switches. A sampled structure check backs the event lists up with
//! bisection on the change point.

use std::cmp::Ordering;

use super::{bisect_range, decide_with, search_within, AtcMethod, AtcSolution};
use crate::envelope::{
    breakpoints, curve_crossings, first_crossing_height, pointwise_extreme, poly_roots, AltitudeInterval, Direction,
    ExtremeMode, PiecewiseMonotoneCurve, Poly, RationalCurve,
};
use crate::scalar::{ArithmeticMode, Rational, Scalar};
use crate::terrain::Terrain;
use crate::visibility::{Anchor, Candidate, EdgeView, GreedyTrace, Portion, Reach, Root, Viewers};

/// Combinatorial identity of one greedy guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardKey {
    pub anchor: (usize, Option<usize>, bool),
    pub tangent: Option<usize>,
}

/// How a guard sees one edge, without coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViewKind {
    Full,
    Empty,
    /// Only the endpoint nearest the guard.
    Point,
    /// A far-side subsegment bounded by the sightline over these peak vertices.
    Ray(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideSnapshot {
    pub guards: Vec<GuardKey>,
    pub complete: bool,
}

/// Structure of the first `stage` guards from both sides (plus the middle views on the last even stage).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub left: SideSnapshot,
    pub right: SideSnapshot,
    pub middle: Vec<(usize, ViewKind, ViewKind)>,
}

/// Result of one stage: the interval and its constant structure.
#[derive(Debug, Clone, PartialEq)]
pub struct StageState<S> {
    pub stage: usize,
    pub interval: AltitudeInterval<S>,
    pub f_curve: PiecewiseMonotoneCurve<S>,
    pub g_curve: PiecewiseMonotoneCurve<S>,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StagedRun<S> {
    pub h_star: S,
    pub guards: Vec<S>,
    pub states: Vec<StageState<S>>,
    pub diagnostics: Vec<String>,
}

struct Side<S> {
    terrain: Terrain<S>,
    viewers: Viewers<S>,
    /// Left tree parents: sightlines from a viewer looking right graze these chains.
    left_parent: Vec<Option<usize>>,
    /// Right tree parents: tangents from points on edges.
    right_parent: Vec<Option<usize>>,
}

impl<S: Scalar> Side<S> {
    fn new(t: Terrain<S>) -> Self {
        let viewers = Viewers::new(&t);
        let left_parent = viewers.spt(Root::Left).parent;
        let right_parent = viewers.spt(Root::Right).parent;
        Side {
            terrain: t,
            viewers,
            left_parent,
            right_parent,
        }
    }

    fn trace(&self, h: &S, m: usize) -> GreedyTrace<S> {
        self.viewers.greedy_trace(h, Some(m.saturating_sub(1)), true)
    }
}

struct Ctx<S> {
    left: Side<S>,
    right: Side<S>,
    k: usize,
    m: usize,
    even: bool,
}

fn guard_key<S: Scalar>(c: &Candidate<S>) -> GuardKey {
    GuardKey {
        anchor: c.anchor.key(),
        tangent: match c.reach {
            Reach::Tangent(t) => Some(t),
            Reach::Clamped(_) => None,
        },
    }
}

fn view_kind<S: Scalar>(t: &Terrain<S>, v: &EdgeView<S>) -> ViewKind {
    match &v.portion {
        Portion::Full => ViewKind::Full,
        Portion::Empty => ViewKind::Empty,
        Portion::Part { from, .. } => {
            let (a, _) = t.edge(v.edge);
            if from.x.cmp_tol(&a.x) == Ordering::Greater {
                ViewKind::Ray(v.peak.clone())
            } else {
                ViewKind::Point
            }
        }
    }
}

fn side_snapshot<S: Scalar>(trace: &GreedyTrace<S>, stage: usize) -> SideSnapshot {
    SideSnapshot {
        guards: trace.guards.iter().take(stage).map(|g| guard_key(&g.chosen)).collect(),
        complete: trace.complete && trace.guards.len() <= stage,
    }
}

impl<S: Scalar> Ctx<S> {
    fn new(t: &Terrain<S>, k: usize) -> Self {
        Ctx {
            left: Side::new(t.clone()),
            right: Side::new(t.mirrored()),
            k,
            m: k.div_ceil(2),
            even: k.is_multiple_of(2),
        }
    }

    fn n(&self) -> usize {
        self.left.terrain.n()
    }

    fn decide(&self, h: &S) -> bool {
        decide_with(&self.left.viewers, self.k, h).0
    }

    /// Middle edges (strictly between `f_m` and `g_m`) with their two views.
    fn middle(&self, lt: &GreedyTrace<S>, rt: &GreedyTrace<S>) -> Vec<(usize, ViewKind, ViewKind)> {
        let (Some(fm), Some(gm)) = (lt.guards.get(self.m - 1), rt.guards.get(self.m - 1)) else {
            return Vec::new();
        };
        let t = &self.left.terrain;
        let n = self.n();
        let f = fm.x.clone();
        let g = -gm.x.clone();
        let mut out = Vec::new();
        for e in 0..t.num_edges() {
            let (a, b) = t.edge(e);
            if a.x < f || b.x > g {
                continue;
            }
            let lv = fm.views.iter().find(|v| v.edge == e);
            let rv = gm.views.iter().find(|v| v.edge == n - 2 - e);
            let (Some(lv), Some(rv)) = (lv, rv) else { continue };
            out.push((e, view_kind(t, lv), view_kind(&self.right.terrain, rv)));
        }
        out
    }

    fn snapshot(&self, h: &S, stage: usize, with_middle: bool) -> Snapshot {
        let lt = self.left.trace(h, self.m);
        let rt = self.right.trace(h, self.m);
        Snapshot {
            left: side_snapshot(&lt, stage),
            right: side_snapshot(&rt, stage),
            middle: if with_middle { self.middle(&lt, &rt) } else { Vec::new() },
        }
    }
}

// ---------------------------------------------------------------- closed forms

/// Line of edge `e` as `(m, c)` with `y = m x + c`.
fn edge_mc<S: Scalar>(t: &Terrain<S>, e: usize) -> (S, S) {
    let (a, _) = t.edge(e);
    let m = t.edge_slope(e);
    let c = a.y.clone() - m.clone() * a.x.clone();
    (m, c)
}

/// Abscissa where the sightline from `(X(h), h)` over vertex `b` lands on the line of edge `e`.
fn ray_hit<S: Scalar>(t: &Terrain<S>, prev: &RationalCurve<S>, e: usize, b: usize) -> (Poly<S>, Poly<S>) {
    let (m, c) = edge_mc(t, e);
    let bp = t.vertex(b);
    let (n, d) = (&prev.num, &prev.den);
    // x = (X (y_b - c) + (c - h) x_b) / (m X + y_b - h - m x_b)
    let a = n
        .scale(&(bp.y.clone() - c.clone()))
        .add(&d.mul(&Poly::linear(c.clone() * bp.x.clone(), -bp.x.clone())));
    let bden = n
        .scale(&m)
        .add(&d.mul(&Poly::linear(bp.y.clone() - m.clone() * bp.x.clone(), -S::one())));
    (a, bden)
}

/// Rightmost viewer of the moving point `A/B` on edge `e` through tangent vertex `tv`.
fn tangent_from_moving<S: Scalar>(
    t: &Terrain<S>,
    (a, b): (Poly<S>, Poly<S>),
    e: usize,
    tv: usize,
    id: usize,
) -> RationalCurve<S> {
    let (m, c) = edge_mc(t, e);
    let tp = t.vertex(tv);
    // x = (A (y_t - h - m x_t) + x_t (h - c) B) / ((y_t - c) B - m A)
    let num = a
        .mul(&Poly::linear(tp.y.clone() - m.clone() * tp.x.clone(), -S::one()))
        .add(&b.mul(&Poly::linear(-(tp.x.clone() * c.clone()), tp.x.clone())));
    let den = b.scale(&(tp.y.clone() - c)).sub(&a.scale(&m));
    RationalCurve::new(num, den, Direction::Increasing, id)
}

fn vertex_line<S: Scalar>(t: &Terrain<S>, v: usize, tv: usize, id: usize) -> RationalCurve<S> {
    let (p, q) = (t.vertex(v), t.vertex(tv));
    let d = (q.x.clone() - p.x.clone()) / (q.y.clone() - p.y.clone());
    RationalCurve::line(p.x.clone() - p.y.clone() * d.clone(), d, id)
}

/// Closed form of a candidate's abscissa; `unclamped` ignores the `x(v_n)` clamp when a tangent exists.
fn candidate_curve<S: Scalar>(
    t: &Terrain<S>,
    c: &Candidate<S>,
    prev: Option<&RationalCurve<S>>,
    id: usize,
    unclamped: bool,
) -> RationalCurve<S> {
    let tangent = match c.reach {
        Reach::Tangent(tv) => tv,
        Reach::Clamped(Some(tv)) if unclamped => tv,
        Reach::Clamped(_) => return RationalCurve::constant(t.x_max().clone(), usize::MAX),
    };
    match &c.anchor {
        Anchor::Vertex(v) => vertex_line(t, *v, tangent, id),
        Anchor::RayHit { edge, peak, .. } => {
            let prev = prev.expect("ray-hit anchors need a previous guard");
            tangent_from_moving(t, ray_hit(t, prev, *edge, *peak), *edge, tangent, id)
        }
    }
}

fn guard_curves<S: Scalar>(t: &Terrain<S>, trace: &GreedyTrace<S>, upto: usize) -> Vec<RationalCurve<S>> {
    let mut out: Vec<RationalCurve<S>> = Vec::new();
    for (j, g) in trace.guards.iter().take(upto).enumerate() {
        let c = candidate_curve(t, &g.chosen, out.last(), j, false);
        out.push(c);
    }
    out
}

fn negate<S: Scalar>(c: &RationalCurve<S>) -> RationalCurve<S> {
    let dir = match c.direction {
        Direction::Increasing => Direction::Decreasing,
        Direction::Decreasing => Direction::Increasing,
        Direction::Constant => Direction::Constant,
    };
    RationalCurve::new(c.num.neg(), c.den.clone(), dir, c.id)
}

fn difference<S: Scalar>(a: &RationalCurve<S>, b: &RationalCurve<S>) -> RationalCurve<S> {
    RationalCurve::new(
        a.num.mul(&b.den).sub(&b.num.mul(&a.den)),
        a.den.mul(&b.den),
        Direction::Constant,
        0,
    )
}

// ---------------------------------------------------------------- events

/// `h` in `(lo, hi)` where `(X(h), h)` lies on the line `alpha x + beta y = gamma`.
fn hits_line<S: Scalar>(x: &RationalCurve<S>, alpha: &S, beta: &S, gamma: &S, lo: &S, hi: &S, out: &mut Vec<S>) {
    let p = x
        .num
        .scale(alpha)
        .add(&x.den.mul(&Poly::linear(-gamma.clone(), beta.clone())));
    if let Ok(r) = poly_roots(&p, lo, Some(hi)) {
        out.extend(r);
    }
}

fn hits_value<S: Scalar>(x: &RationalCurve<S>, value: &S, lo: &S, hi: &S, out: &mut Vec<S>) {
    hits_line(x, &S::one(), &S::zero(), value, lo, hi, out);
}

impl<S: Scalar> Side<S> {
    /// Candidate event heights for guard `j` (0-based) of this side.
    fn events(&self, trace: &GreedyTrace<S>, curves: &[RationalCurve<S>], j: usize, lo: &S, hi: &S, out: &mut Vec<S>) {
        let t = &self.terrain;
        let Some(g) = trace.guards.get(j) else { return };
        let prev = if j == 0 { None } else { curves.get(j - 1) };
        if j > 0 && prev.is_none() {
            return;
        }
        // switches of the minimizing candidate
        let cands: Vec<RationalCurve<S>> = g
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| candidate_curve(t, c, prev, i, false))
            .collect();
        if !cands.is_empty() {
            let dom = AltitudeInterval::new(lo.clone(), Some(hi.clone()), true, false);
            if let Ok(env) = pointwise_extreme(&cands, ExtremeMode::Min, &dom) {
                out.extend(breakpoints(&env));
            }
            // the chosen curve against every other candidate
            let chosen = candidate_curve(t, &g.chosen, prev, usize::MAX - 1, false);
            for c in &cands {
                if let Ok(r) = curve_crossings(&chosen, c, lo, Some(hi)) {
                    out.extend(r);
                }
            }
        }
        // clamp switch
        if let Reach::Tangent(_) | Reach::Clamped(Some(_)) = g.chosen.reach {
            let raw = candidate_curve(t, &g.chosen, prev, 0, true);
            hits_value(&raw, t.x_max(), lo, hi, out);
        }
        // tangent switches and edge-end crossings of a ray-hit anchor
        if let (Anchor::RayHit { edge, peak, .. }, Some(p)) = (&g.chosen.anchor, prev) {
            let (a, b) = ray_hit(t, p, *edge, *peak);
            let px = RationalCurve::new(a, b, Direction::Constant, 0);
            let (va, vb) = t.edge(*edge);
            hits_value(&px, &va.x, lo, hi, out);
            hits_value(&px, &vb.x, lo, hi, out);
            let el = t.edge_line(*edge);
            for (w, pw) in self.right_parent.iter().enumerate() {
                let Some(pw) = pw else { continue };
                let l = crate::geom::Line::through(t.vertex(w), t.vertex(*pw));
                if let crate::geom::Intersection::Point(q) = crate::geom::line_intersection(&l, &el) {
                    if q.x > va.x && q.x < vb.x {
                        hits_value(&px, &q.x, lo, hi, out);
                    }
                }
            }
        }
        // sightline events of this guard as a viewer
        if let Some(x) = curves.get(j) {
            self.viewer_events(x, lo, hi, out);
        }
    }

    fn viewer_events(&self, x: &RationalCurve<S>, lo: &S, hi: &S, out: &mut Vec<S>) {
        let t = &self.terrain;
        for v in t.vertices() {
            hits_value(x, &v.x, lo, hi, out);
        }
        for e in 0..t.num_edges() {
            let l = t.edge_line(e);
            hits_line(x, &l.a, &l.b, &l.c, lo, hi, out);
        }
        for (b, pb) in self.left_parent.iter().enumerate() {
            if let Some(pb) = pb {
                let l = crate::geom::Line::through(t.vertex(b), t.vertex(*pb));
                hits_line(x, &l.a, &l.b, &l.c, lo, hi, out);
            }
        }
    }
}

// ---------------------------------------------------------------- refinement

fn sorted_unique<S: Scalar>(mut v: Vec<S>) -> Vec<S> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| a.cmp_tol(b) == Ordering::Equal);
    v
}

fn tiny<S: Scalar>(lo: &S, hi: &S) -> bool {
    let scale = S::one() + hi.abs_val();
    let tol = match S::MODE {
        ArithmeticMode::Exact => S::from_f64(1e-15),
        ArithmeticMode::Float => S::from_f64(1e-10),
    };
    hi.clone() - lo.clone() <= tol * scale
}

/// Points strictly inside `(lo, hi)`: near each end and the middle.
fn probes<S: Scalar>(lo: &S, hi: &S) -> [S; 3] {
    let w = hi.clone() - lo.clone();
    let off = w / S::from_i64(1024);
    [lo.clone() + off.clone(), S::midpoint(lo, hi), hi.clone() - off]
}

impl<S: Scalar> Ctx<S> {
    /// Narrow `(lo, hi]` until the stage structure is the same at all probes.
    fn refine(&self, lo: S, hi: S, stage: usize, middle: bool, diags: &mut Vec<String>) -> (S, S) {
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..256 {
            if tiny(&lo, &hi) {
                return (lo, hi);
            }
            let pts = probes(&lo, &hi);
            let keys: Vec<Snapshot> = pts.iter().map(|p| self.snapshot(p, stage, middle)).collect();
            let Some(diff) = (1..3).find(|&i| keys[i] != keys[0]) else {
                return (lo, hi);
            };
            // bisect for the change point between pts[0] and pts[diff]
            let (mut a, mut b) = (pts[0].clone(), pts[diff].clone());
            while !tiny(&a, &b) {
                let mid = S::midpoint(&a, &b);
                if self.snapshot(&mid, stage, middle) == keys[0] {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            if self.decide(&b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        diags.push(format!(
            "stage {stage}: structure kept changing; interval left at width {:e}",
            (hi.clone() - lo.clone()).to_f64()
        ));
        (lo, hi)
    }

    fn stage_events(&self, stage: usize, lo: &S, hi: &S) -> Vec<S> {
        let h = S::midpoint(lo, hi);
        let mut out = Vec::new();
        for side in [&self.left, &self.right] {
            let tr = side.trace(&h, self.m);
            let curves = guard_curves(&side.terrain, &tr, stage);
            side.events(&tr, &curves, stage - 1, lo, hi, &mut out);
        }
        sorted_unique(out)
    }

    fn stage_state(&self, stage: usize, lo: &S, hi: &S) -> StageState<S> {
        let h = S::midpoint(lo, hi);
        let lt = self.left.trace(&h, self.m);
        let rt = self.right.trace(&h, self.m);
        let dom = AltitudeInterval::new(lo.clone(), Some(hi.clone()), true, false);
        let lc = guard_curves(&self.left.terrain, &lt, stage);
        let rc = guard_curves(&self.right.terrain, &rt, stage);
        let pick = |cs: &[RationalCurve<S>], neg: bool| match cs.get(stage - 1) {
            Some(c) => PiecewiseMonotoneCurve::single(if neg { negate(c) } else { c.clone() }, &dom),
            None => PiecewiseMonotoneCurve {
                pieces: Vec::new(),
                direction: Direction::Constant,
            },
        };
        StageState {
            stage,
            interval: dom.clone(),
            f_curve: pick(&lc, false),
            g_curve: pick(&rc, true),
            snapshot: self.snapshot(&h, stage, self.even && stage == self.m),
        }
    }
}

// ---------------------------------------------------------------- closure

/// Smallest `h` in `[lo, hi]` with `d(h) >= 0`, or `None` when `d < 0` throughout.
/// Irrational roots are bracketed and the feasible end of a narrow bracket is returned.
fn min_nonneg<S: Scalar>(d: &RationalCurve<S>, lo: &S, hi: &S) -> Option<S> {
    let nonneg = |h: &S| d.eval(h).sign() != Ordering::Less;
    if nonneg(lo) {
        return Some(lo.clone());
    }
    let roots = poly_roots(&d.num, lo, Some(hi)).unwrap_or_default();
    let mut marks = roots;
    marks.push(hi.clone());
    let mut prev = lo.clone();
    for r in marks {
        if nonneg(&r) {
            // the sign flips somewhere in (prev, r]; narrow it with exact sign tests
            let (mut a, mut b) = (prev.clone(), r.clone());
            while !tiny(&a, &b) {
                let mid = S::midpoint(&a, &b);
                if nonneg(&mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(b);
        }
        prev = r;
    }
    None
}

/// Lowest `h` in `[lo, hi]` at which the far-side portion seen from the left
/// guard `left(h)` and the near-side portion seen from the right guard `right(h)`
/// together cover edge `e`. `None` is the "never inside the interval" sentinel.
/// `right_view` peaks index the mirrored terrain, as right-side snapshots do.
#[allow(clippy::too_many_arguments)]
pub fn min_h_edge_two_guards<S: Scalar>(
    t: &Terrain<S>,
    e: usize,
    left: &RationalCurve<S>,
    left_view: &ViewKind,
    right: &RationalCurve<S>,
    right_view: &ViewKind,
    lo: &S,
    hi: &S,
) -> Option<S> {
    if matches!(left_view, ViewKind::Full) || matches!(right_view, ViewKind::Full) {
        return Some(lo.clone());
    }
    let (a, b) = t.edge(e);
    let n = t.n();
    // left guard sees [p1, x_w]; p1 = x_w when it sees at most the near endpoint
    let p1 = match left_view {
        ViewKind::Ray(peak) => {
            let (num, den) = ray_hit(t, left, e, *peak.iter().max().unwrap());
            RationalCurve::new(num, den, Direction::Constant, 0)
        }
        _ => RationalCurve::constant(b.x.clone(), 0),
    };
    let p2 = match right_view {
        ViewKind::Ray(peak) => {
            let mt = t.mirrored();
            let mirrored_guard = negate(right);
            let (num, den) = ray_hit(&mt, &mirrored_guard, n - 2 - e, *peak.iter().max().unwrap());
            negate(&RationalCurve::new(num, den, Direction::Constant, 0))
        }
        _ => RationalCurve::constant(a.x.clone(), 0),
    };
    min_nonneg(&difference(&p2, &p1), lo, hi)
}

impl<S: Scalar> Ctx<S> {
    /// Closed-form optimum inside the final interval.
    fn close(&self, lo: &S, hi: &S, diags: &mut Vec<String>) -> S {
        let h = S::midpoint(lo, hi);
        let lt = self.left.trace(&h, self.m);
        let rt = self.right.trace(&h, self.m);
        let lc = guard_curves(&self.left.terrain, &lt, self.m);
        let rc = guard_curves(&self.right.terrain, &rt, self.m);
        let (Some(fm), Some(xm)) = (lc.get(self.m - 1), rc.get(self.m - 1)) else {
            diags.push("a side finished early inside the final interval".into());
            return hi.clone();
        };
        let gm = negate(xm);
        if !self.even {
            let dom = AltitudeInterval::new(lo.clone(), Some(hi.clone()), false, false);
            let f = PiecewiseMonotoneCurve::single(fm.clone(), &dom);
            let g = PiecewiseMonotoneCurve::single(gm, &dom);
            return first_crossing_height(&f, &g).unwrap_or_else(|_| hi.clone());
        }
        let t = &self.left.terrain;
        let mut best = lo.clone();
        for (e, lv, rv) in self.middle(&lt, &rt) {
            match min_h_edge_two_guards(t, e, fm, &lv, &gm, &rv, lo, hi) {
                Some(v) => best = S::max_of(best, v),
                // covered only from the interval's upper event on
                None => return hi.clone(),
            }
        }
        best
    }

    fn canonical_guards(&self, h: &S) -> Vec<S> {
        let lt = self.left.viewers.greedy_trace(h, Some(self.m - 1), false);
        let rt = self.right.viewers.greedy_trace(h, Some(self.m - 1), false);
        let mut g: Vec<S> = lt.guards.iter().take(self.m).map(|g| g.x.clone()).collect();
        let right_take = if self.even { self.m } else { self.m - 1 };
        g.extend(rt.guards.iter().take(right_take).map(|g| -g.x.clone()));
        g
    }
}

/// Run stages `1..=ceil(k/2)` from `start` and close. `start` must contain the optimum with
/// an infeasible open lower end and a feasible closed upper end.
pub fn solve_staged<S: Scalar>(t: &Terrain<S>, k: usize, start: &AltitudeInterval<S>) -> StagedRun<S> {
    let ctx = Ctx::new(t, k);
    let mut diags = Vec::new();
    let mut lo = start.lower.clone();
    let mut hi = start.upper.clone().expect("bounded start interval");
    let mut states = Vec::new();
    for stage in 1..=ctx.m {
        if tiny(&lo, &hi) {
            break;
        }
        let events = ctx.stage_events(stage, &lo, &hi);
        let bounds = AltitudeInterval::new(lo.clone(), Some(hi.clone()), true, false);
        let found = search_within(&ctx.left.viewers, &events, k, &bounds);
        lo = found.lower;
        hi = found.upper.expect("bounded");
        let middle = ctx.even && stage == ctx.m;
        (lo, hi) = ctx.refine(lo, hi, stage, middle, &mut diags);
        states.push(ctx.stage_state(stage, &lo, &hi));
    }
    let mut h = if tiny(&lo, &hi) {
        hi.clone()
    } else {
        ctx.close(&lo, &hi, &mut diags)
    };
    if !ctx.decide(&h) && S::MODE == ArithmeticMode::Float {
        // a float root can land a hair below the feasible side
        let nudged = S::min_of(h.clone() + S::from_f64(1e-10) * (S::one() + h.abs_val()), hi.clone());
        if ctx.decide(&nudged) {
            h = nudged;
        }
    }
    if !verified(&ctx, t, &h) {
        diags.push(format!(
            "closed form {:.12} failed verification; bisecting the final interval",
            h.to_f64()
        ));
        let eps = S::from_f64(1e-13) * (S::one() + hi.abs_val());
        h = bisect_range(&ctx.left.viewers, k, lo.clone(), Some(hi.clone()), &eps).0;
    }
    let guards = ctx.canonical_guards(&h);
    StagedRun {
        h_star: h,
        guards,
        states,
        diagnostics: diags,
    }
}

fn verified<S: Scalar>(ctx: &Ctx<S>, t: &Terrain<S>, h: &S) -> bool {
    if !ctx.decide(h) {
        return false;
    }
    let rel = match S::MODE {
        ArithmeticMode::Exact => 1e-9,
        ArithmeticMode::Float => 1e-7,
    };
    let below = h.clone() - S::from_f64(rel) * (S::one() + h.abs_val());
    below <= *t.y_max() || !ctx.decide(&below)
}

/// Whether each stage's structure is the same just inside both ends of its interval.
pub fn stage_invariants_hold<S: Scalar>(t: &Terrain<S>, k: usize, states: &[StageState<S>]) -> bool {
    let ctx = Ctx::new(t, k);
    states.iter().all(|s| {
        let (lo, hi) = (&s.interval.lower, s.interval.upper.as_ref().unwrap());
        if tiny(lo, hi) {
            return true;
        }
        let [a, _, b] = probes(lo, hi);
        let middle = ctx.even && s.stage == ctx.m;
        ctx.snapshot(&a, s.stage, middle) == s.snapshot && ctx.snapshot(&b, s.stage, middle) == s.snapshot
    })
}

/// Structure of the first `stage` guards of both greedy sweeps at altitude `h`.
pub fn snapshot_at<S: Scalar>(t: &Terrain<S>, k: usize, stage: usize, h: &S) -> Snapshot {
    let ctx = Ctx::new(t, k);
    ctx.snapshot(h, stage, ctx.even && stage == ctx.m)
}

// ---------------------------------------------------------------- entry points

/// `f(h)` and `g(h)`: envelopes of the per-vertex extreme viewers, clamped to the domain.
pub fn extreme_viewer_envelopes<S: Scalar>(t: &Terrain<S>) -> (PiecewiseMonotoneCurve<S>, PiecewiseMonotoneCurve<S>) {
    let dom = AltitudeInterval::closed_from(t.y_max().clone());
    let side = |terrain: &Terrain<S>| {
        let v = Viewers::new(terrain);
        let mut curves = vec![RationalCurve::constant(terrain.x_max().clone(), usize::MAX)];
        let h = terrain.y_max().clone();
        for i in 0..terrain.n() {
            let c = v.candidate(Anchor::Vertex(i), &h);
            if let Reach::Tangent(tv) | Reach::Clamped(Some(tv)) = c.reach {
                curves.push(vertex_line(terrain, i, tv, i));
            }
        }
        pointwise_extreme(&curves, ExtremeMode::Min, &dom).expect("non-empty")
    };
    let f = side(t);
    let mirrored = side(&t.mirrored());
    let g = PiecewiseMonotoneCurve {
        pieces: mirrored
            .pieces
            .iter()
            .map(|p| crate::envelope::Piece {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                curve: negate(&p.curve),
                jump: p.jump,
            })
            .collect(),
        direction: Direction::Decreasing,
    };
    (f, g)
}

/// Exact first stage: the interval between consecutive breakpoints of `f(h)`/`g(h)` holding the optimum.
pub fn first_interval(t: &Terrain<Rational>, k: usize) -> AltitudeInterval<Rational> {
    let (f, g) = extreme_viewer_envelopes(t);
    let upper = super::solve_k1(t).h_star;
    let mut cands = breakpoints(&f);
    cands.extend(breakpoints(&g));
    let cands = sorted_unique(cands);
    let v = Viewers::new(t);
    let bounds = AltitudeInterval::new(t.y_max().clone(), Some(upper.clone()), true, false);
    let mut found = search_within(&v, &cands, k, &bounds);
    if found.upper.is_none() {
        found.upper = Some(upper);
    }
    found
}

fn floor_solution(t: &Terrain<Rational>, k: usize, method: AtcMethod) -> Option<AtcSolution> {
    let y = t.y_max().clone();
    if k >= t.n() / 2 {
        return Some(AtcSolution::build(
            t,
            &y,
            super::every_other_vertex(t),
            AtcMethod::Floor,
            Vec::new(),
        ));
    }
    let ctx = Ctx::new(t, k);
    if ctx.decide(&y) {
        return Some(AtcSolution::build(t, &y, ctx.canonical_guards(&y), method, Vec::new()));
    }
    None
}

/// Two guards, exact: guards at `f(h*)` and `g(h*)`.
pub fn solve_k2(t: &Terrain<Rational>) -> AtcSolution {
    if let Some(s) = floor_solution(t, 2, AtcMethod::K2) {
        return s;
    }
    let start = first_interval(t, 2);
    let run = solve_staged(t, 2, &start);
    AtcSolution::build(t, &run.h_star, run.guards, AtcMethod::K2, run.diagnostics)
}

fn solve_float(t: &Terrain<Rational>, k: usize, method: AtcMethod) -> AtcSolution {
    if let Some(s) = floor_solution(t, k, method) {
        return s;
    }
    let start = first_interval(t, k);
    let tf: Terrain<f64> = t.convert();
    let startf = AltitudeInterval::new(
        start.lower.to_f64(),
        start.upper.as_ref().map(|u| u.to_f64()),
        true,
        false,
    );
    let run = solve_staged(&tf, k, &startf);
    AtcSolution::build(&tf, &run.h_star, run.guards, method, run.diagnostics)
}

/// Even `k >= 4`: stage 1 exact, later stages in floating point.
pub fn solve_even(t: &Terrain<Rational>, k: usize) -> AtcSolution {
    assert!(k.is_multiple_of(2) && k >= 2, "solve_even needs an even k");
    if k == 2 {
        return solve_k2(t);
    }
    solve_float(t, k, AtcMethod::Even)
}

/// Odd `k >= 3`: stages up to `ceil(k/2)`, then the first crossing of `f_m` and `g_m`.
pub fn solve_odd(t: &Terrain<Rational>, k: usize) -> AtcSolution {
    assert!(k % 2 == 1, "solve_odd needs an odd k");
    if k == 1 {
        return super::solve_k1(t);
    }
    solve_float(t, k, AtcMethod::Odd)
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
    fn envelopes_of_w_terrain() {
        let (f, g) = extreme_viewer_envelopes(&tw());
        assert_eq!(f.eval(&rat(1, 1)), Some(rat(1, 1)));
        assert_eq!(f.eval(&rat(3, 1)), Some(rat(3, 1)));
        assert_eq!(g.eval(&rat(1, 1)), Some(rat(3, 1)));
        assert_eq!(first_crossing_height(&f, &g), Ok(rat(2, 1)));
        assert!(f.piece_count() < tw().n());
    }

    #[test]
    fn two_guards_on_w_terrain_hit_the_floor() {
        let s = solve_k2(&tw());
        assert_eq!(s.h_star, rat(1, 1));
        assert_eq!(s.guards, vec![rat(1, 1), rat(3, 1)]);
    }

    #[test]
    fn right_guard_alone_closes_a_valley_edge() {
        // edge (1,1)-(2,0) seen only by the right guard (6 - h, h) over peak (3,1), mirrored index 1
        let t = tw();
        let left = RationalCurve::line(rat(-2, 1), rat(1, 1), 0);
        let right = RationalCurve::line(rat(6, 1), rat(-1, 1), 1);
        let h = min_h_edge_two_guards(
            &t,
            1,
            &left,
            &ViewKind::Empty,
            &right,
            &ViewKind::Ray(vec![1]),
            &rat(1, 1),
            &rat(5, 2),
        );
        assert_eq!(h, Some(rat(2, 1)));
        let full = min_h_edge_two_guards(
            &t,
            1,
            &left,
            &ViewKind::Full,
            &right,
            &ViewKind::Empty,
            &rat(1, 1),
            &rat(5, 2),
        );
        assert_eq!(full, Some(rat(1, 1)));
    }

    #[test]
    fn ray_hit_matches_geometry() {
        // viewer (h - 1, h) over peak (1,1) onto the line of edge (2,0)-(3,1)
        let t = tw();
        let x = RationalCurve::line(rat(-1, 1), rat(1, 1), 0);
        let (a, b) = ray_hit(&t, &x, 2, 1);
        let px = RationalCurve::new(a, b, Direction::Constant, 0);
        // from (1,2) the ray over (1,1) is vertical
        assert_eq!(px.eval(&rat(2, 1)), rat(1, 1));
        // from (2,3): slope 2 through (1,1) meets y = x - 2 at x = -1
        assert_eq!(px.eval(&rat(3, 1)), rat(-1, 1));
    }
}
