//! Visibility on the region above a terrain.
//!
//! Visibility is closed: a sightline may graze the terrain at vertices. A
//! segment from `u` to `p` is visible iff every vertex strictly between them in
//! x lies on or below the segment (the vertical gap between segment and terrain
//! is piecewise linear with breakpoints at vertices).
//!
//! Viewer extremes use the shortest path trees from `v_n` (right) and `v_1`
//! (left). The right tree is the stack of upper hulls of the terrain suffixes,
//! so the geodesic parent of a vertex is its nearest max-slope vertex to the
//! right. Tangent queries from interior edge points walk the same hull chains
//! with skew-binary jump pointers.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geom::{cross, line_intersection, orientation, Intersection, Line, Point};
use crate::scalar::Scalar;
use crate::terrain::Terrain;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VisibilityError {
    #[error("viewer x lies outside the terrain domain")]
    OutOfDomain,
    #[error("edge {0} is fully visible; it has no peak")]
    FullyVisible(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Root {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathTree {
    pub root: Root,
    pub parent: Vec<Option<usize>>,
}

/// Geodesic tree above the terrain rooted at `v_1` (left) or `v_n` (right).
pub fn shortest_path_tree<S: Scalar>(t: &Terrain<S>, root: Root) -> ShortestPathTree {
    match root {
        Root::Right => ShortestPathTree {
            root,
            parent: right_parents(t),
        },
        Root::Left => {
            let n = t.n();
            let mirrored = right_parents(&t.mirrored());
            let mut parent = vec![None; n];
            for (mi, p) in mirrored.iter().enumerate() {
                parent[n - 1 - mi] = p.map(|q| n - 1 - q);
            }
            ShortestPathTree { root, parent }
        }
    }
}

/// One right-to-left stack scan; the stack is the upper hull of the current suffix.
fn right_parents<S: Scalar>(t: &Terrain<S>) -> Vec<Option<usize>> {
    let n = t.n();
    let v = t.vertices();
    let mut parent = vec![None; n];
    let mut stack: Vec<usize> = vec![n - 1];
    for i in (0..n - 1).rev() {
        // pop while the vertex below the top is strictly above the sightline i -> top
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let below = stack[stack.len() - 2];
            if orientation(&v[i], &v[top], &v[below]) > 0 {
                stack.pop();
            } else {
                break;
            }
        }
        parent[i] = Some(*stack.last().unwrap());
        stack.push(i);
    }
    parent
}

pub fn is_visible<S: Scalar>(t: &Terrain<S>, u: &Point<S>, p: &Point<S>) -> Result<bool, VisibilityError> {
    if u.x < *t.x_min() || u.x > *t.x_max() {
        return Err(VisibilityError::OutOfDomain);
    }
    let (a, b) = match u.x.partial_cmp(&p.x) {
        Some(Ordering::Less) => (u, p),
        Some(Ordering::Greater) => (p, u),
        _ => return Ok(u.y.cmp_tol(&p.y) != Ordering::Less),
    };
    let lo = t.vertices().partition_point(|v| v.x <= a.x);
    for w in &t.vertices()[lo..] {
        if w.x >= b.x {
            break;
        }
        if orientation(a, b, w) > 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Leftmost (`g_x`) and rightmost (`f_x`) abscissa on `L(h)` from which a target
/// is fully visible, clamped to `[x(v_1), x(v_n)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewerInterval<S> {
    pub g_x: S,
    pub f_x: S,
    pub h: S,
}

/// Hull chains of one side with skew-binary jump pointers for tangent queries.
#[derive(Debug, Clone)]
struct HullIndex<S> {
    terrain: Terrain<S>,
    parent: Vec<Option<usize>>,
    jump: Vec<usize>,
}

impl<S: Scalar> HullIndex<S> {
    fn new(terrain: Terrain<S>) -> Self {
        let parent = right_parents(&terrain);
        let n = terrain.n();
        // parents lie to the right, so a right-to-left pass sees every parent first
        let mut depth = vec![0usize; n];
        let mut jump: Vec<usize> = (0..n).collect();
        for i in (0..n).rev() {
            if let Some(p) = parent[i] {
                depth[i] = depth[p] + 1;
                let (j, jj) = (jump[p], jump[jump[p]]);
                jump[i] = if depth[p] - depth[j] == depth[j] - depth[jj] {
                    jj
                } else {
                    p
                };
            }
        }
        HullIndex { terrain, parent, jump }
    }

    /// Nearest max-slope vertex seen from `p`, searching the hull chain starting at vertex `first`.
    fn tangent(&self, p: &Point<S>, first: usize) -> usize {
        let v = self.terrain.vertices();
        let advance = |c: usize| -> bool {
            match self.parent[c] {
                Some(nx) => orientation(p, &v[c], &v[nx]) > 0,
                None => false,
            }
        };
        let mut c = first;
        if !advance(c) {
            return c;
        }
        loop {
            let j = self.jump[c];
            if j != c && advance(j) {
                c = j;
                continue;
            }
            match self.parent[c] {
                Some(nx) if advance(nx) => c = nx,
                _ => break,
            }
        }
        self.parent[c].expect("advance implies a parent")
    }

    /// Rightmost viewer on `L(h)` of a point `p` whose first vertex to the right is `first`,
    /// together with what bounds it.
    fn reach_from(&self, p: &Point<S>, first: usize, h: &S) -> (Reach, S) {
        let v = self.terrain.vertices();
        let x_max = self.terrain.x_max().clone();
        let t = self.tangent(p, first);
        let tp = &v[t];
        if tp.y.cmp_tol(&p.y) != Ordering::Greater {
            return (Reach::Clamped(None), x_max);
        }
        let x = p.x.clone() + (h.clone() - p.y.clone()) * (tp.x.clone() - p.x.clone()) / (tp.y.clone() - p.y.clone());
        if x >= x_max {
            (Reach::Clamped(Some(t)), x_max)
        } else {
            (Reach::Tangent(t), S::max_of(x, p.x.clone()))
        }
    }

    fn f_from(&self, p: &Point<S>, first: usize, h: &S) -> S {
        self.reach_from(p, first, h).1
    }

    fn vertex_reach(&self, i: usize, h: &S) -> (Reach, S) {
        match self.parent[i] {
            None => (Reach::Clamped(None), self.terrain.x_max().clone()),
            Some(first) => self.reach_from(self.terrain.vertex(i), first, h),
        }
    }

    fn f_vertex(&self, i: usize, h: &S) -> S {
        self.vertex_reach(i, h).1
    }
}

/// Which part of an edge a viewer sees.
#[derive(Debug, Clone, PartialEq)]
pub enum Portion<S> {
    Empty,
    Full,
    /// Closed subsegment `from .. to` in increasing x (may be a single point).
    Part {
        from: Point<S>,
        to: Point<S>,
    },
}

impl<S: Scalar> Portion<S> {
    pub fn is_full(&self) -> bool {
        matches!(self, Portion::Full)
    }
}

/// Visible portion of one edge together with its peak.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeView<S> {
    pub edge: usize,
    pub portion: Portion<S>,
    /// Vertices on the grazing sightline bounding the portion (empty when full or empty).
    pub peak: Vec<usize>,
}

/// Running max-slope sightline from a viewer, with the vertices attaining it.
#[derive(Debug, Clone)]
struct Horizon<S> {
    slope: Option<S>,
    vertices: Vec<usize>,
}

impl<S: Scalar> Horizon<S> {
    fn empty() -> Self {
        Horizon {
            slope: None,
            vertices: Vec::new(),
        }
    }

    fn push(&mut self, idx: usize, slope: S) {
        match &self.slope {
            None => {
                self.slope = Some(slope);
                self.vertices = vec![idx];
            }
            Some(s) => match slope.cmp_tol(s) {
                Ordering::Greater => {
                    self.slope = Some(slope);
                    self.vertices = vec![idx];
                }
                Ordering::Equal => self.vertices.push(idx),
                Ordering::Less => {}
            },
        }
    }
}

fn slope_from<S: Scalar>(u: &Point<S>, p: &Point<S>) -> S {
    (p.y.clone() - u.y.clone()) / (p.x.clone() - u.x.clone())
}

/// View of edge `e` (with `x(v_e) > x(u)`) given the horizon over vertices strictly between.
fn view_right<S: Scalar>(t: &Terrain<S>, u: &Point<S>, e: usize, horizon: &Horizon<S>) -> EdgeView<S> {
    let (v, w) = t.edge(e);
    let sv = slope_from(u, v);
    let v_visible = horizon.slope.as_ref().is_none_or(|s| sv.cmp_tol(s) != Ordering::Less);
    // horizon extended by v itself, built lazily since most edges never need the peak
    let extended = || {
        let mut all = horizon.clone();
        all.push(e, sv.clone());
        all
    };
    let side = orientation(v, w, u);
    let empty = || EdgeView {
        edge: e,
        portion: Portion::Empty,
        peak: Vec::new(),
    };
    match side.cmp(&0) {
        Ordering::Greater => {
            if v_visible {
                return EdgeView {
                    edge: e,
                    portion: Portion::Full,
                    peak: Vec::new(),
                };
            }
            let s = horizon.slope.clone().unwrap();
            let ray = Line::from_slope(s.clone(), u.y.clone() - s * u.x.clone());
            let hit = match line_intersection(&ray, &t.edge_line(e)) {
                Intersection::Point(p) => p,
                _ => return empty(),
            };
            if hit.x.cmp_tol(&w.x) == Ordering::Greater {
                return empty();
            }
            let from = if hit.x > w.x { w.clone() } else { hit };
            EdgeView {
                edge: e,
                portion: Portion::Part { from, to: w.clone() },
                peak: horizon.vertices.clone(),
            }
        }
        Ordering::Equal => EdgeView {
            edge: e,
            portion: if v_visible { Portion::Full } else { Portion::Empty },
            peak: Vec::new(),
        },
        Ordering::Less => {
            if v_visible {
                EdgeView {
                    edge: e,
                    portion: Portion::Part {
                        from: v.clone(),
                        to: v.clone(),
                    },
                    peak: extended().vertices,
                }
            } else {
                empty()
            }
        }
    }
}

/// Views of the edge containing `x(u)` (full) and of every edge to its right.
/// The sweep stops as soon as `visit` returns false.
fn sweep_right<S: Scalar>(t: &Terrain<S>, u: &Point<S>, mut visit: impl FnMut(&EdgeView<S>) -> bool) {
    let vs = t.vertices();
    let first = vs.partition_point(|v| v.x <= u.x);
    if first >= 1 && first - 1 < t.num_edges() {
        let view = EdgeView {
            edge: first - 1,
            portion: Portion::Full,
            peak: Vec::new(),
        };
        if !visit(&view) {
            return;
        }
    }
    let mut horizon = Horizon::empty();
    for e in first..t.num_edges() {
        let view = view_right(t, u, e, &horizon);
        if !visit(&view) {
            return;
        }
        horizon.push(e, slope_from(u, &vs[e]));
    }
}

/// Extreme viewers and per-edge views for one terrain.
#[derive(Debug, Clone)]
pub struct Viewers<S> {
    terrain: Terrain<S>,
    right: HullIndex<S>,
    left: HullIndex<S>,
}

impl<S: Scalar> Viewers<S> {
    pub fn new(t: &Terrain<S>) -> Self {
        Viewers {
            terrain: t.clone(),
            right: HullIndex::new(t.clone()),
            left: HullIndex::new(t.mirrored()),
        }
    }

    pub fn terrain(&self) -> &Terrain<S> {
        &self.terrain
    }

    pub fn spt(&self, root: Root) -> ShortestPathTree {
        match root {
            Root::Right => ShortestPathTree {
                root,
                parent: self.right.parent.clone(),
            },
            Root::Left => shortest_path_tree(&self.terrain, Root::Left),
        }
    }

    fn mirror_index(&self, i: usize) -> usize {
        self.terrain.n() - 1 - i
    }

    pub fn vertex_f(&self, v: usize, h: &S) -> S {
        self.right.f_vertex(v, h)
    }

    pub fn vertex_g(&self, v: usize, h: &S) -> S {
        -self.left.f_vertex(self.mirror_index(v), h)
    }

    pub fn vertex_viewers(&self, v: usize, h: &S) -> ViewerInterval<S> {
        ViewerInterval {
            g_x: self.vertex_g(v, h),
            f_x: self.vertex_f(v, h),
            h: h.clone(),
        }
    }

    /// Rightmost viewer of a point lying on edge `e`.
    pub fn point_f(&self, p: &Point<S>, e: usize, h: &S) -> S {
        let (_, w) = self.terrain.edge(e);
        if p.x.cmp_tol(&w.x) != Ordering::Less {
            return self.vertex_f(e + 1, h);
        }
        let f = self.right.f_from(p, e + 1, h);
        S::max_of(f, p.x.clone())
    }

    /// Leftmost viewer of a point lying on edge `e`.
    pub fn point_g(&self, p: &Point<S>, e: usize, h: &S) -> S {
        let (v, _) = self.terrain.edge(e);
        if p.x.cmp_tol(&v.x) != Ordering::Greater {
            return self.vertex_g(e, h);
        }
        let mp = Point::new(-p.x.clone(), p.y.clone());
        let me = self.terrain.n() - 2 - e;
        let f = self.left.f_from(&mp, me + 1, h);
        -S::max_of(f, mp.x)
    }

    /// Rightmost viewer from which segment `a..b` on edge `e` is fully visible.
    pub fn segment_f(&self, a: &Point<S>, b: &Point<S>, e: usize, h: &S) -> S {
        S::min_of(self.point_f(a, e, h), self.point_f(b, e, h))
    }

    pub fn segment_g(&self, a: &Point<S>, b: &Point<S>, e: usize, h: &S) -> S {
        S::max_of(self.point_g(a, e, h), self.point_g(b, e, h))
    }

    /// Edge viewer interval via the parent-comparison rule on the trees.
    pub fn edge_viewers(&self, e: usize, h: &S) -> ViewerInterval<S> {
        let (v, w) = (e, e + 1);
        let vs = self.terrain.vertices();
        let px = |i: usize| self.right.parent[i].map(|p| vs[p].x.clone());
        let f_x = match (px(v), px(w)) {
            (Some(a), Some(b)) if a < b => self.vertex_f(v, h),
            (Some(_), None) => self.vertex_f(v, h),
            _ => self.vertex_f(w, h),
        };
        // mirrored rule for the left tree
        let (mv, mw) = (self.mirror_index(w), self.mirror_index(v));
        let mvs = self.left.terrain.vertices();
        let mpx = |i: usize| self.left.parent[i].map(|p| mvs[p].x.clone());
        let g_x = match (mpx(mv), mpx(mw)) {
            (Some(a), Some(b)) if a < b => self.vertex_g(w, h),
            (Some(_), None) => self.vertex_g(w, h),
            _ => self.vertex_g(v, h),
        };
        // the rule picks the binding endpoint; endpoint minimum is the same value
        let f_alt = S::min_of(self.vertex_f(v, h), self.vertex_f(w, h));
        let g_alt = S::max_of(self.vertex_g(v, h), self.vertex_g(w, h));
        debug_assert!(f_x.cmp_tol(&f_alt) == Ordering::Equal || S::MODE == crate::scalar::ArithmeticMode::Float);
        debug_assert!(g_x.cmp_tol(&g_alt) == Ordering::Equal || S::MODE == crate::scalar::ArithmeticMode::Float);
        ViewerInterval { g_x, f_x, h: h.clone() }
    }

    /// Views of all edges from a viewer `u` on or above the terrain.
    pub fn views_from(&self, u: &Point<S>) -> Vec<EdgeView<S>> {
        let m = self.terrain.num_edges();
        let mut out: Vec<Option<EdgeView<S>>> = vec![None; m];
        sweep_right(&self.terrain, u, |view| {
            out[view.edge] = Some(view.clone());
            true
        });
        let mt = &self.left.terrain;
        let mu = Point::new(-u.x.clone(), u.y.clone());
        sweep_right(mt, &mu, |view| {
            let e = m - 1 - view.edge;
            let mapped = self.unmirror_view(view, e);
            match &out[e] {
                Some(existing) if existing.portion.is_full() => {}
                _ => out[e] = Some(mapped),
            }
            true
        });
        out.into_iter()
            .enumerate()
            .map(|(e, v)| {
                v.unwrap_or(EdgeView {
                    edge: e,
                    portion: Portion::Full,
                    peak: Vec::new(),
                })
            })
            .collect()
    }

    fn unmirror_view(&self, view: &EdgeView<S>, e: usize) -> EdgeView<S> {
        let n = self.terrain.n();
        let portion = match &view.portion {
            Portion::Part { from, to } => Portion::Part {
                from: Point::new(-to.x.clone(), to.y.clone()),
                to: Point::new(-from.x.clone(), from.y.clone()),
            },
            other => other.clone(),
        };
        let mut peak: Vec<usize> = view.peak.iter().map(|&i| n - 1 - i).collect();
        peak.sort_unstable();
        EdgeView { edge: e, portion, peak }
    }

    pub fn visible_portion(&self, u: &Point<S>, e: usize) -> EdgeView<S> {
        self.views_from(u).swap_remove(e)
    }

    pub fn peak(&self, u: &Point<S>, e: usize) -> Result<Vec<usize>, VisibilityError> {
        let view = self.visible_portion(u, e);
        match view.portion {
            Portion::Full => Err(VisibilityError::FullyVisible(e)),
            Portion::Empty => Ok(Vec::new()),
            Portion::Part { .. } => Ok(view.peak),
        }
    }

    /// `f(h)`: leftmost of all per-edge rightmost viewers.
    pub fn f_all(&self, h: &S) -> S {
        (0..self.terrain.num_edges())
            .map(|e| self.edge_viewers(e, h).f_x)
            .fold(self.terrain.x_max().clone(), S::min_of)
    }

    /// `g(h)`: rightmost of all per-edge leftmost viewers.
    pub fn g_all(&self, h: &S) -> S {
        (0..self.terrain.num_edges())
            .map(|e| self.edge_viewers(e, h).g_x)
            .fold(self.terrain.x_min().clone(), S::max_of)
    }

    /// Greedy minimum guard set on `L(h)`; stops after `limit + 1` guards when given.
    pub fn greedy_guards(&self, h: &S, limit: Option<usize>) -> Vec<S> {
        self.greedy_trace(h, limit, false)
            .guards
            .into_iter()
            .map(|g| g.x)
            .collect()
    }

    /// Rightmost viewer of `p` (lying on edge `e`, or the vertex itself) with its binding tangent.
    pub fn candidate(&self, anchor: Anchor<S>, h: &S) -> Candidate<S> {
        let t = &self.terrain;
        let (point, (reach, x)) = match &anchor {
            Anchor::Vertex(v) => (t.vertex(*v).clone(), self.right.vertex_reach(*v, h)),
            Anchor::RayHit { edge, point, .. } => {
                let p = point.clone();
                (p.clone(), self.right.reach_from(&p, edge + 1, h))
            }
        };
        Candidate {
            anchor,
            point,
            reach,
            x,
        }
    }

    fn piece_candidates(&self, view: &EdgeView<S>, h: &S) -> Vec<Candidate<S>> {
        let t = &self.terrain;
        let e = view.edge;
        let (a, b) = t.edge(e);
        let whole = || {
            vec![
                self.candidate(Anchor::Vertex(e), h),
                self.candidate(Anchor::Vertex(e + 1), h),
            ]
        };
        match &view.portion {
            Portion::Full => Vec::new(),
            Portion::Empty => whole(),
            Portion::Part { from, to } => {
                if from.x.cmp_tol(&a.x) == Ordering::Greater {
                    let hit = if from.x.cmp_tol(&b.x) != Ordering::Less {
                        Anchor::Vertex(e + 1)
                    } else {
                        Anchor::RayHit {
                            edge: e,
                            peak: *view.peak.iter().max().expect("partial view has a peak"),
                            point: from.clone(),
                        }
                    };
                    vec![self.candidate(Anchor::Vertex(e), h), self.candidate(hit, h)]
                } else if to.x.cmp_tol(&b.x) == Ordering::Less {
                    whole()
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Left-to-right greedy with the binding candidate of every guard recorded.
    /// Each guard sits at the rightmost point seeing the leftmost uncovered piece;
    /// with `record` set the sweep runs to the end and keeps all candidates and views.
    pub fn greedy_trace(&self, h: &S, limit: Option<usize>, record: bool) -> GreedyTrace<S> {
        let t = &self.terrain;
        let vs = t.vertices();
        let mut guards: Vec<TracedGuard<S>> = Vec::new();
        let pick = |cands: &[Candidate<S>]| -> Option<usize> {
            let mut best: Option<usize> = None;
            for (i, c) in cands.iter().enumerate() {
                // ties go to the smallest anchor so the choice is stable across an altitude range
                let better = best.is_none_or(|b| match c.x.cmp_tol(&cands[b].x) {
                    Ordering::Less => true,
                    Ordering::Equal => c.anchor.key() < cands[b].anchor.key(),
                    Ordering::Greater => false,
                });
                if better {
                    best = Some(i);
                }
            }
            best
        };
        // first guard: f(h), scanning until no edge can lower the minimum
        let mut cands: Vec<Candidate<S>> = Vec::new();
        let mut best_x = t.x_max().clone();
        for e in 0..t.num_edges() {
            if vs[e].x >= best_x {
                break;
            }
            for v in [e, e + 1] {
                let c = self.candidate(Anchor::Vertex(v), h);
                if c.x < best_x {
                    best_x = c.x.clone();
                }
                cands.push(c);
            }
        }
        let mut chosen = cands[pick(&cands).expect("at least one edge")].clone();
        loop {
            let u = chosen.x.clone();
            let viewer = Point::new(u.clone(), h.clone());
            let mut next: Vec<Candidate<S>> = Vec::new();
            let mut next_x: Option<S> = None;
            let mut views: Vec<EdgeView<S>> = Vec::new();
            sweep_right(t, &viewer, |view| {
                let e = view.edge;
                if let Some(nb) = &next_x {
                    if !record && vs[e].x >= *nb {
                        return false;
                    }
                }
                for c in self.piece_candidates(view, h) {
                    if next_x.as_ref().is_none_or(|nb| c.x < *nb) {
                        next_x = Some(c.x.clone());
                    }
                    next.push(c);
                }
                if record {
                    views.push(view.clone());
                }
                true
            });
            guards.push(TracedGuard {
                x: u.clone(),
                chosen: chosen.clone(),
                candidates: if record { std::mem::take(&mut cands) } else { Vec::new() },
                views,
            });
            let Some(i) = pick(&next) else {
                return GreedyTrace { guards, complete: true };
            };
            if limit.is_some_and(|l| guards.len() > l) || guards.len() > t.n() {
                return GreedyTrace {
                    guards,
                    complete: false,
                };
            }
            chosen = next[i].clone();
            // numerical safety: never step backwards
            if chosen.x < u {
                chosen.x = u;
            }
            cands = next;
        }
    }
}

/// What a candidate guard position is anchored to.
#[derive(Debug, Clone, PartialEq)]
pub enum Anchor<S> {
    Vertex(usize),
    /// Point on `edge` where the sightline from the previous guard over `peak` lands.
    RayHit {
        edge: usize,
        peak: usize,
        point: Point<S>,
    },
}

impl<S: Scalar> Anchor<S> {
    /// Combinatorial identity (drops the numeric point).
    pub fn key(&self) -> (usize, Option<usize>, bool) {
        match self {
            Anchor::Vertex(v) => (*v, None, false),
            Anchor::RayHit { edge, peak, .. } => (*edge, Some(*peak), true),
        }
    }
}

/// What bounds a rightmost viewer: a tangent vertex, or the domain end
/// (keeping the tangent when the sightline would have passed `x(v_n)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    Tangent(usize),
    Clamped(Option<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<S> {
    pub anchor: Anchor<S>,
    pub point: Point<S>,
    pub reach: Reach,
    pub x: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracedGuard<S> {
    pub x: S,
    pub chosen: Candidate<S>,
    /// Every candidate considered for this guard (only when recorded).
    pub candidates: Vec<Candidate<S>>,
    /// Views from this guard of every edge to its right (only when recorded).
    pub views: Vec<EdgeView<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace<S> {
    pub guards: Vec<TracedGuard<S>>,
    /// Whether the recorded guards cover the whole terrain.
    pub complete: bool,
}

/// Minimum number of guards on `L(h)` covering the terrain, with their abscissas.
pub fn min_guards_at_height<S: Scalar>(t: &Terrain<S>, h: &S) -> (usize, Vec<S>) {
    let guards = Viewers::new(t).greedy_guards(h, None);
    (guards.len(), guards)
}

/// Whether `p` (on `T`) lies on or below segment `u q`; shared by oracles and tests.
pub fn below_segment<S: Scalar>(u: &Point<S>, q: &Point<S>, p: &Point<S>) -> bool {
    let c = if u.x < q.x { cross(u, q, p) } else { cross(q, u, p) };
    c.sign() != Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::terrain::parse_terrain;

    fn tw() -> Terrain<Rational> {
        parse_terrain("0,0\n1,1\n2,0\n3,1\n4,0\n").unwrap()
    }

    fn pt(x: Rational, y: Rational) -> Point<Rational> {
        Point::new(x, y)
    }

    fn r(n: i64) -> Rational {
        rat(n, 1)
    }

    #[test]
    fn spt_on_w_terrain() {
        let t = tw();
        let right = shortest_path_tree(&t, Root::Right);
        assert_eq!(right.parent, vec![Some(1), Some(3), Some(3), Some(4), None]);
        let left = shortest_path_tree(&t, Root::Left);
        assert_eq!(left.parent, vec![None, Some(0), Some(1), Some(1), Some(3)]);
    }

    #[test]
    fn spt_on_convex_chain_follows_chain() {
        let t = parse_terrain("0,0\n1,3\n2,5\n3,6\n4,6.5\n").unwrap();
        let right = shortest_path_tree(&t, Root::Right);
        assert_eq!(right.parent, vec![Some(1), Some(2), Some(3), Some(4), None]);
    }

    #[test]
    fn visibility_examples() {
        let t = tw();
        assert!(is_visible(&t, &pt(r(2), r(2)), &pt(r(4), r(0))).unwrap());
        assert!(!is_visible(&t, &pt(r(1), r(1)), &pt(rat(7, 2), rat(1, 2))).unwrap());
        assert!(is_visible(&t, &pt(r(1), r(1)), &pt(r(1), r(1))).unwrap());
        assert_eq!(
            is_visible(&t, &pt(r(5), r(2)), &pt(r(4), r(0))),
            Err(VisibilityError::OutOfDomain)
        );
    }

    #[test]
    fn vertex_viewer_extremes() {
        let t = tw();
        let v = Viewers::new(&t);
        assert_eq!(v.vertex_f(0, &rat(3, 2)), rat(3, 2));
        assert_eq!(v.vertex_f(4, &r(7)), r(4));
        // every vertex right of (3,1) is lower, so the whole line to the right sees it
        assert_eq!(v.vertex_f(3, &r(1)), r(4));
        assert_eq!(v.vertex_g(4, &r(1)), r(3));
        assert_eq!(v.vertex_g(0, &r(9)), r(0));
    }

    #[test]
    fn edge_viewer_extremes() {
        let t = tw();
        let v = Viewers::new(&t);
        let e3 = v.edge_viewers(3, &r(1));
        assert_eq!((e3.g_x, e3.f_x), (r(3), r(4)));
        let e0 = v.edge_viewers(0, &r(1));
        assert_eq!((e0.g_x, e0.f_x), (r(0), r(1)));
        assert_eq!(v.f_all(&r(1)), r(1));
        assert_eq!(v.g_all(&r(1)), r(3));
        assert_eq!(v.f_all(&r(2)), r(2));
        assert_eq!(v.g_all(&r(2)), r(2));
        let single = parse_terrain("0,0\n1,1\n").unwrap();
        let sv = Viewers::new(&single).edge_viewers(0, &r(1));
        assert!(sv.g_x <= sv.f_x);
    }

    #[test]
    fn portions_and_peaks() {
        let t = tw();
        let v = Viewers::new(&t);
        let u = pt(r(1), r(1));
        let view = v.visible_portion(&u, 3);
        assert_eq!(
            view.portion,
            Portion::Part {
                from: pt(r(3), r(1)),
                to: pt(r(3), r(1))
            }
        );
        assert_eq!(v.peak(&u, 3), Ok(vec![3]));
        assert!(v.visible_portion(&pt(r(2), r(2)), 1).portion.is_full());
        assert_eq!(v.peak(&pt(r(2), r(2)), 1), Err(VisibilityError::FullyVisible(1)));
        // from (1,1) the left slope of the right bump is hidden except its top
        let view = v.visible_portion(&u, 2);
        assert!(view.portion.is_full());
    }

    #[test]
    fn collinear_blockers_form_the_peak() {
        // viewer, two summits and the target edge start all on one sightline
        let t = parse_terrain("0,0\n1,2\n2,0\n3,2\n4,0\n6,3\n").unwrap();
        let v = Viewers::new(&t);
        let view = v.visible_portion(&pt(r(0), r(2)), 4);
        assert_eq!(
            view.portion,
            Portion::Part {
                from: pt(rat(16, 3), r(2)),
                to: pt(r(6), r(3))
            }
        );
        assert_eq!(view.peak, vec![1, 3]);
    }

    #[test]
    fn greedy_guard_counts() {
        let t = tw();
        let (c, g) = min_guards_at_height(&t, &r(1));
        assert_eq!(c, 2);
        assert_eq!(g, vec![r(1), r(4)]);
        assert_eq!(min_guards_at_height(&t, &r(2)), (1, vec![r(2)]));
        let flat = parse_terrain("0,0\n1,0\n").unwrap();
        assert_eq!(min_guards_at_height(&flat, &r(0)).0, 1);
    }
}
