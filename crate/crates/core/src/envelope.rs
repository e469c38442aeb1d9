//! Curves giving a guard abscissa as a function of the altitude `h`.
//!
//! A [`RationalCurve`] is `C(h)/D(h)` on an altitude interval. Envelopes are
//! built by divide and conquer; each merge splits at the crossings of the two
//! active pieces. Linear crossings are solved in the scalar field; higher
//! degree crossings are isolated in `f64` through the roots of the derivative
//! (between consecutive critical points a polynomial has at most one root).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{convert, Scalar};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("root isolation failed near h = {0}")]
    RootIsolationFailure(f64),
    #[error("the curves never meet on the domain")]
    NoCrossing,
    #[error("no curves given")]
    Empty,
}

/// Polynomial with coefficients from low to high degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.len() > 1 && coeffs.last().unwrap().sign() == Ordering::Equal {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        Poly { coeffs }
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b h`.
    pub fn linear(a: S, b: S) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].sign() == Ordering::Equal
    }

    pub fn eval(&self, h: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * h.clone() + c.clone())
    }

    pub fn add(&self, o: &Poly<S>) -> Poly<S> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Poly<S>, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(S::zero);
        Poly::new((0..n).map(|i| get(self, i) + get(o, i)).collect())
    }

    pub fn neg(&self) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, o: &Poly<S>) -> Poly<S> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly<S>) -> Poly<S> {
        let mut out = vec![S::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, k: &S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }
}

/// Lower bound, optional upper bound (`None` is +inf) and openness flags.
#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeInterval<S> {
    pub lower: S,
    pub upper: Option<S>,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl<S: Scalar> AltitudeInterval<S> {
    pub fn closed_from(lower: S) -> Self {
        AltitudeInterval {
            lower,
            upper: None,
            lower_open: false,
            upper_open: true,
        }
    }

    pub fn new(lower: S, upper: Option<S>, lower_open: bool, upper_open: bool) -> Self {
        AltitudeInterval {
            lower,
            upper,
            lower_open,
            upper_open,
        }
    }

    pub fn contains(&self, h: &S) -> bool {
        let lo_ok = match h.partial_cmp(&self.lower) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => !self.lower_open,
            _ => false,
        };
        let hi_ok = match &self.upper {
            None => true,
            Some(u) => match h.partial_cmp(u) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => !self.upper_open,
                _ => false,
            },
        };
        lo_ok && hi_ok
    }

    /// A representative interior altitude.
    pub fn sample(&self) -> S {
        match &self.upper {
            Some(u) => S::midpoint(&self.lower, u),
            None => self.lower.clone() + S::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeMode {
    Min,
    Max,
}

/// `x(h) = num(h) / den(h)`; `id` identifies the source so equal-source pieces can be merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalCurve<S> {
    pub num: Poly<S>,
    pub den: Poly<S>,
    pub direction: Direction,
    pub id: usize,
}

impl<S: Scalar> RationalCurve<S> {
    pub fn new(num: Poly<S>, den: Poly<S>, direction: Direction, id: usize) -> Self {
        RationalCurve {
            num,
            den,
            direction,
            id,
        }
    }

    /// `x = a + b h`.
    pub fn line(a: S, b: S, id: usize) -> Self {
        let direction = match b.sign() {
            Ordering::Greater => Direction::Increasing,
            Ordering::Less => Direction::Decreasing,
            Ordering::Equal => Direction::Constant,
        };
        RationalCurve::new(Poly::linear(a, b), Poly::constant(S::one()), direction, id)
    }

    pub fn constant(c: S, id: usize) -> Self {
        RationalCurve::line(c, S::zero(), id)
    }

    pub fn eval(&self, h: &S) -> S {
        self.num.eval(h) / self.den.eval(h)
    }

    /// Degree pair `(deg C, deg D)`.
    pub fn degrees(&self) -> (usize, usize) {
        (self.num.degree(), self.den.degree())
    }

    pub fn is_linear(&self) -> bool {
        self.num.degree() <= 1 && self.den.degree() == 0
    }

    /// `num_1 den_2 - num_2 den_1`, whose roots are the crossings.
    fn crossing_poly(&self, o: &RationalCurve<S>) -> Poly<S> {
        self.num.mul(&o.den).sub(&o.num.mul(&self.den))
    }
}

/// All `h` in the open interval `(lo, hi)` where the curves coincide.
pub fn curve_crossings<S: Scalar>(
    c1: &RationalCurve<S>,
    c2: &RationalCurve<S>,
    lo: &S,
    hi: Option<&S>,
) -> Result<Vec<S>, EnvelopeError> {
    let p = c1.crossing_poly(c2);
    // the denominators keep a constant sign on a validity interval, so the
    // sign of p tracks the sign of c1 - c2 up to a fixed flip
    poly_roots(&p, lo, hi)
}

/// Roots of `p` strictly inside `(lo, hi)`, sorted and deduplicated.
pub fn poly_roots<S: Scalar>(p: &Poly<S>, lo: &S, hi: Option<&S>) -> Result<Vec<S>, EnvelopeError> {
    if p.is_zero() || p.degree() == 0 {
        return Ok(Vec::new());
    }
    let inside = |r: &S| *r > *lo && hi.is_none_or(|h| *r < *h);
    if p.degree() == 1 {
        let r = -p.coeffs[0].clone() / p.coeffs[1].clone();
        return Ok(if inside(&r) { vec![r] } else { Vec::new() });
    }
    if p.degree() == 2 {
        if let Some(roots) = quadratic_roots(p) {
            return Ok(roots.into_iter().filter(|r| inside(r)).collect());
        }
    }
    let c = p.to_f64();
    let lo_f = lo.to_f64();
    let hi_f = match hi {
        Some(h) => h.to_f64(),
        None => lo_f.abs() + cauchy_bound(&c) + 1.0,
    };
    let roots = real_roots_f64(&c, lo_f, hi_f)?;
    let mut out: Vec<S> = Vec::new();
    for r in roots {
        let s = S::from_f64(r);
        if inside(&s) && out.last().is_none_or(|l: &S| s.cmp_tol(l) != Ordering::Equal) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Roots of a quadratic when the discriminant has a square root in the field.
fn quadratic_roots<S: Scalar>(p: &Poly<S>) -> Option<Vec<S>> {
    let (c, b, a) = (&p.coeffs[0], &p.coeffs[1], &p.coeffs[2]);
    let disc = b.clone() * b.clone() - S::from_i64(4) * a.clone() * c.clone();
    match disc.sign() {
        Ordering::Less => return Some(Vec::new()),
        Ordering::Equal => return Some(vec![-b.clone() / (S::from_i64(2) * a.clone())]),
        Ordering::Greater => {}
    }
    let root = disc.sqrt_exact()?;
    let two_a = S::from_i64(2) * a.clone();
    let mut r = vec![(-b.clone() - root.clone()) / two_a.clone(), (-b.clone() + root) / two_a];
    r.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    Some(r)
}

fn cauchy_bound(c: &[f64]) -> f64 {
    let lead = c.last().copied().unwrap_or(1.0).abs();
    if lead == 0.0 {
        return 1e12;
    }
    1.0 + c[..c.len() - 1].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max)
}

fn eval_f64(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn trim_f64(c: &[f64]) -> Vec<f64> {
    let scale = c.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let mut v = c.to_vec();
    while v.len() > 1 && v.last().unwrap().abs() <= scale * 1e-14 {
        v.pop();
    }
    v
}

/// Real roots of a polynomial on `[lo, hi]`, isolated between the roots of its derivative.
pub fn real_roots_f64(c: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>, EnvelopeError> {
    let c = trim_f64(c);
    if c.iter().any(|a| !a.is_finite()) {
        return Err(EnvelopeError::RootIsolationFailure(lo));
    }
    match c.len() {
        0 | 1 => return Ok(Vec::new()),
        2 => {
            let r = -c[0] / c[1];
            return Ok(if r >= lo && r <= hi { vec![r] } else { Vec::new() });
        }
        _ => {}
    }
    let deriv: Vec<f64> = c.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect();
    let mut marks = vec![lo];
    marks.extend(real_roots_f64(&deriv, lo, hi)?);
    marks.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    let tol = 1e-12;
    for w in marks.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval_f64(&c, a), eval_f64(&c, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            // a double root at a critical point shows up as a near-zero value there
            if fb.abs() < 1e-12 && fa.abs() > 1e-12 {
                roots.push(b);
            }
            continue;
        }
        let neg_at_a = fa < 0.0;
        for _ in 0..200 {
            if b - a <= tol * (1.0 + a.abs()) {
                break;
            }
            let m = 0.5 * (a + b);
            let fm = eval_f64(&c, m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (fm < 0.0) == neg_at_a {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol * (1.0 + b.abs()));
    Ok(roots)
}

/// One piece of a piecewise curve, valid on `[lo, hi]` (`hi = None` is +inf).
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<S> {
    pub lo: S,
    pub hi: Option<S>,
    pub curve: RationalCurve<S>,
    /// The value at `lo` differs from the previous piece's value there (or a gap precedes it).
    pub jump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMonotoneCurve<S> {
    pub pieces: Vec<Piece<S>>,
    pub direction: Direction,
}

impl<S: Scalar> PiecewiseMonotoneCurve<S> {
    pub fn single(curve: RationalCurve<S>, domain: &AltitudeInterval<S>) -> Self {
        let direction = curve.direction;
        PiecewiseMonotoneCurve {
            pieces: vec![Piece {
                lo: domain.lower.clone(),
                hi: domain.upper.clone(),
                curve,
                jump: false,
            }],
            direction,
        }
    }

    pub fn lower(&self) -> Option<&S> {
        self.pieces.first().map(|p| &p.lo)
    }

    pub fn upper(&self) -> Option<&S> {
        self.pieces.last().and_then(|p| p.hi.as_ref())
    }

    /// Index of the piece containing `h` (the later piece wins at a shared boundary).
    pub fn piece_at(&self, h: &S) -> Option<usize> {
        let idx = self.pieces.partition_point(|p| p.lo <= *h);
        if idx == 0 {
            return None;
        }
        let p = &self.pieces[idx - 1];
        match &p.hi {
            Some(hi) if *h > *hi => None,
            _ => Some(idx - 1),
        }
    }

    pub fn eval(&self, h: &S) -> Option<S> {
        self.piece_at(h).map(|i| self.pieces[i].curve.eval(h))
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> Vec<S> {
        breakpoints(self)
    }

    pub fn to_f64(&self) -> PiecewiseMonotoneCurve<f64> {
        PiecewiseMonotoneCurve {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo.to_f64(),
                    hi: p.hi.as_ref().map(|h| h.to_f64()),
                    curve: RationalCurve::new(
                        Poly::new(p.curve.num.to_f64()),
                        Poly::new(p.curve.den.to_f64()),
                        p.curve.direction,
                        p.curve.id,
                    ),
                    jump: p.jump,
                })
                .collect(),
            direction: self.direction,
        }
    }

    /// Restrict to `[lo, hi]`.
    pub fn restrict(&self, lo: &S, hi: Option<&S>) -> Self {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let plo = S::max_of(p.lo.clone(), lo.clone());
            let phi = match (&p.hi, hi) {
                (Some(a), Some(b)) => Some(S::min_of(a.clone(), b.clone())),
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(b.clone()),
                (None, None) => None,
            };
            if let Some(h) = &phi {
                if *h < plo || (*h == plo && p.hi.as_ref() != Some(&plo)) {
                    continue;
                }
            }
            pieces.push(Piece {
                lo: plo,
                hi: phi,
                curve: p.curve.clone(),
                jump: p.jump && pieces.is_empty(),
            });
        }
        if let Some(first) = pieces.first_mut() {
            first.jump = false;
        }
        PiecewiseMonotoneCurve {
            pieces,
            direction: self.direction,
        }
    }
}

/// Sorted, deduplicated interior breakpoints of a piecewise curve.
pub fn breakpoints<S: Scalar>(curve: &PiecewiseMonotoneCurve<S>) -> Vec<S> {
    let mut out: Vec<S> = Vec::new();
    for w in curve.pieces.windows(2) {
        for h in [w[0].hi.clone(), Some(w[1].lo.clone())].into_iter().flatten() {
            if out.last().is_none_or(|l| h.cmp_tol(l) == Ordering::Greater) {
                out.push(h);
            }
        }
    }
    out
}

fn better<S: Scalar>(a: &S, b: &S, mode: ExtremeMode) -> bool {
    match mode {
        ExtremeMode::Min => a.cmp_tol(b) == Ordering::Less,
        ExtremeMode::Max => a.cmp_tol(b) == Ordering::Greater,
    }
}

/// Pointwise min or max of full-domain curves.
pub fn pointwise_extreme<S: Scalar>(
    curves: &[RationalCurve<S>],
    mode: ExtremeMode,
    domain: &AltitudeInterval<S>,
) -> Result<PiecewiseMonotoneCurve<S>, EnvelopeError> {
    let parts: Vec<PiecewiseMonotoneCurve<S>> = curves
        .iter()
        .map(|c| PiecewiseMonotoneCurve::single(c.clone(), domain))
        .collect();
    envelope_of(parts, mode)
}

/// Pointwise min or max of piecewise curves that may be undefined on parts of the range.
pub fn envelope_of<S: Scalar>(
    mut curves: Vec<PiecewiseMonotoneCurve<S>>,
    mode: ExtremeMode,
) -> Result<PiecewiseMonotoneCurve<S>, EnvelopeError> {
    curves.retain(|c| !c.pieces.is_empty());
    if curves.is_empty() {
        return Err(EnvelopeError::Empty);
    }
    while curves.len() > 1 {
        let mut next = Vec::with_capacity(curves.len().div_ceil(2));
        let mut it = curves.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(&a, &b, mode)?),
                None => next.push(a),
            }
        }
        curves = next;
    }
    let mut out = curves.pop().unwrap();
    finalize(&mut out);
    Ok(out)
}

fn merge<S: Scalar>(
    a: &PiecewiseMonotoneCurve<S>,
    b: &PiecewiseMonotoneCurve<S>,
    mode: ExtremeMode,
) -> Result<PiecewiseMonotoneCurve<S>, EnvelopeError> {
    let mut marks: Vec<S> = Vec::new();
    let mut unbounded = false;
    for p in a.pieces.iter().chain(b.pieces.iter()) {
        marks.push(p.lo.clone());
        match &p.hi {
            Some(h) => marks.push(h.clone()),
            None => unbounded = true,
        }
    }
    marks.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    marks.dedup();
    let mut spans: Vec<(S, Option<S>)> = marks.windows(2).map(|w| (w[0].clone(), Some(w[1].clone()))).collect();
    if unbounded {
        spans.push((marks.last().unwrap().clone(), None));
    }
    let covering = |c: &PiecewiseMonotoneCurve<S>, lo: &S, hi: &Option<S>| -> Option<usize> {
        let probe = match hi {
            Some(h) => S::midpoint(lo, h),
            None => lo.clone() + S::one(),
        };
        c.piece_at(&probe)
    };
    let mut pieces: Vec<Piece<S>> = Vec::new();
    for (lo, hi) in spans {
        let pa = covering(a, &lo, &hi).map(|i| &a.pieces[i].curve);
        let pb = covering(b, &lo, &hi).map(|i| &b.pieces[i].curve);
        match (pa, pb) {
            (None, None) => {}
            (Some(c), None) | (None, Some(c)) => push_piece(&mut pieces, lo, hi, c.clone()),
            (Some(ca), Some(cb)) => {
                let roots = if ca.id == cb.id && ca == cb {
                    Vec::new()
                } else {
                    curve_crossings(ca, cb, &lo, hi.as_ref())?
                };
                let mut cuts = vec![lo.clone()];
                cuts.extend(roots);
                let mut sub: Vec<(S, Option<S>)> =
                    cuts.windows(2).map(|w| (w[0].clone(), Some(w[1].clone()))).collect();
                sub.push((cuts.last().unwrap().clone(), hi.clone()));
                for (slo, shi) in sub {
                    let probe = match &shi {
                        Some(h) => S::midpoint(&slo, h),
                        None => slo.clone() + S::one(),
                    };
                    let (va, vb) = (ca.eval(&probe), cb.eval(&probe));
                    let pick = if better(&vb, &va, mode) { cb } else { ca };
                    push_piece(&mut pieces, slo, shi, pick.clone());
                }
            }
        }
    }
    Ok(PiecewiseMonotoneCurve {
        pieces,
        direction: a.direction,
    })
}

fn push_piece<S: Scalar>(pieces: &mut Vec<Piece<S>>, lo: S, hi: Option<S>, curve: RationalCurve<S>) {
    if let Some(h) = &hi {
        if *h <= lo {
            return;
        }
    }
    if let Some(last) = pieces.last_mut() {
        if last.curve.id == curve.id && last.curve == curve && last.hi.as_ref() == Some(&lo) {
            last.hi = hi;
            return;
        }
    }
    pieces.push(Piece {
        lo,
        hi,
        curve,
        jump: false,
    });
}

/// Tag jumps and set the overall direction.
fn finalize<S: Scalar>(c: &mut PiecewiseMonotoneCurve<S>) {
    for i in 1..c.pieces.len() {
        let (prev, cur) = (&c.pieces[i - 1], &c.pieces[i]);
        let jump = match &prev.hi {
            Some(h) if *h == cur.lo => prev.curve.eval(h).cmp_tol(&cur.curve.eval(h)) != Ordering::Equal,
            _ => true,
        };
        c.pieces[i].jump = jump;
    }
    let dirs: Vec<Direction> = c
        .pieces
        .iter()
        .map(|p| p.curve.direction)
        .filter(|d| *d != Direction::Constant)
        .collect();
    c.direction = match dirs.first() {
        None => Direction::Constant,
        Some(d) if dirs.iter().all(|x| x == d) => *d,
        Some(_) => c.direction,
    };
}

/// Minimal `h` (within the common domain) at which the increasing `fm` reaches the decreasing `gm`.
pub fn first_crossing_height<S: Scalar>(
    fm: &PiecewiseMonotoneCurve<S>,
    gm: &PiecewiseMonotoneCurve<S>,
) -> Result<S, EnvelopeError> {
    let (Some(flo), Some(glo)) = (fm.lower(), gm.lower()) else {
        return Err(EnvelopeError::NoCrossing);
    };
    let start = S::max_of(flo.clone(), glo.clone());
    let mut marks: Vec<S> = vec![start.clone()];
    for p in fm.pieces.iter().chain(gm.pieces.iter()) {
        for h in [Some(p.lo.clone()), p.hi.clone()].into_iter().flatten() {
            if h > start {
                marks.push(h);
            }
        }
    }
    marks.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    marks.dedup();
    let end = match (fm.upper(), gm.upper()) {
        (Some(a), Some(b)) => Some(S::min_of(a.clone(), b.clone())),
        (Some(a), None) | (None, Some(a)) => Some(a.clone()),
        (None, None) => None,
    };
    for (i, lo) in marks.iter().enumerate() {
        if let Some(e) = &end {
            if lo > e {
                break;
            }
        }
        let hi = marks.get(i + 1).cloned().or_else(|| end.clone());
        let (Some(fi), Some(gi)) = (fm.piece_at(lo), gm.piece_at(lo)) else {
            continue;
        };
        let (fc, gc) = (&fm.pieces[fi].curve, &gm.pieces[gi].curve);
        if fc.eval(lo).cmp_tol(&gc.eval(lo)) != Ordering::Less {
            return Ok(lo.clone());
        }
        if let Some(r) = curve_crossings(fc, gc, lo, hi.as_ref())?.into_iter().next() {
            return Ok(r);
        }
        // a crossing exactly at the domain end is excluded by the open root search
        if let (Some(h), Some(e)) = (&hi, &end) {
            if h == e && fc.eval(h).cmp_tol(&gc.eval(h)) != Ordering::Less {
                return Ok(h.clone());
            }
        }
    }
    Err(EnvelopeError::NoCrossing)
}

/// JSON dump of a curve for plotting (coefficients as floats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDump {
    pub label: String,
    pub direction: Direction,
    pub pieces: Vec<PieceDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceDump {
    pub lo: f64,
    pub hi: Option<f64>,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
    pub jump: bool,
}

impl CurveDump {
    pub fn from_curve<S: Scalar>(label: &str, c: &PiecewiseMonotoneCurve<S>) -> Self {
        CurveDump {
            label: label.to_string(),
            direction: c.direction,
            pieces: c
                .pieces
                .iter()
                .map(|p| PieceDump {
                    lo: p.lo.to_f64(),
                    hi: p.hi.as_ref().map(|h| h.to_f64()),
                    num: p.curve.num.to_f64(),
                    den: p.curve.den.to_f64(),
                    jump: p.jump,
                })
                .collect(),
        }
    }

    pub fn eval(&self, h: f64) -> Option<f64> {
        let p = self
            .pieces
            .iter()
            .rev()
            .find(|p| p.lo <= h && p.hi.is_none_or(|u| h <= u))?;
        Some(eval_f64(&p.num, h) / eval_f64(&p.den, h))
    }
}

/// Convert a curve between scalar types.
pub fn convert_curve<A: Scalar, B: Scalar>(c: &PiecewiseMonotoneCurve<A>) -> PiecewiseMonotoneCurve<B> {
    let cp = |p: &Poly<A>| Poly::new(p.coeffs.iter().map(convert::<A, B>).collect());
    PiecewiseMonotoneCurve {
        pieces: c
            .pieces
            .iter()
            .map(|p| Piece {
                lo: convert(&p.lo),
                hi: p.hi.as_ref().map(convert),
                curve: RationalCurve::new(cp(&p.curve.num), cp(&p.curve.den), p.curve.direction, p.curve.id),
                jump: p.jump,
            })
            .collect(),
        direction: c.direction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn r(n: i64) -> Rational {
        rat(n, 1)
    }

    #[test]
    fn min_of_two_lines() {
        let a = RationalCurve::line(r(0), r(1), 0);
        let b = RationalCurve::line(r(4), r(-1), 1);
        let env = pointwise_extreme(
            &[a.clone(), b.clone()],
            ExtremeMode::Min,
            &AltitudeInterval::closed_from(r(1)),
        )
        .unwrap();
        assert_eq!(env.pieces.len(), 2);
        assert_eq!(env.pieces[0].curve, a);
        assert_eq!((env.pieces[0].lo.clone(), env.pieces[0].hi.clone()), (r(1), Some(r(2))));
        assert_eq!(env.pieces[1].curve, b);
        assert_eq!(env.pieces[1].hi, None);
        assert_eq!(env.breakpoints(), vec![r(2)]);
        assert!(!env.pieces[1].jump);
    }

    #[test]
    fn identity_and_ties() {
        let a = RationalCurve::line(r(0), r(1), 0);
        let dom = AltitudeInterval::closed_from(r(0));
        let one = pointwise_extreme(std::slice::from_ref(&a), ExtremeMode::Max, &dom).unwrap();
        assert_eq!(one.pieces.len(), 1);
        assert!(one.breakpoints().is_empty());
        let twin = RationalCurve::line(r(0), r(1), 1);
        let two = pointwise_extreme(&[a, twin], ExtremeMode::Min, &dom).unwrap();
        assert_eq!(two.pieces.len(), 1);
    }

    #[test]
    fn linear_crossings() {
        let a = RationalCurve::line(r(0), r(1), 0);
        let b = RationalCurve::line(r(4), r(-1), 1);
        assert_eq!(curve_crossings(&a, &b, &r(1), Some(&r(3))).unwrap(), vec![r(2)]);
        let c = RationalCurve::line(r(1), r(1), 2);
        assert!(curve_crossings(&a, &c, &r(1), Some(&r(3))).unwrap().is_empty());
    }

    #[test]
    fn first_crossing_cases() {
        let dom = AltitudeInterval::closed_from(r(1));
        let f = PiecewiseMonotoneCurve::single(RationalCurve::line(r(0), r(1), 0), &dom);
        let g = PiecewiseMonotoneCurve::single(RationalCurve::line(r(4), r(-1), 1), &dom);
        assert_eq!(first_crossing_height(&f, &g).unwrap(), r(2));
        // already crossed at the floor
        let g2 = PiecewiseMonotoneCurve::single(RationalCurve::line(r(1), r(-1), 1), &dom);
        assert_eq!(first_crossing_height(&f, &g2).unwrap(), r(1));
        // f stays left of g
        let g3 = PiecewiseMonotoneCurve::single(RationalCurve::line(r(5), r(1), 1), &dom);
        assert_eq!(first_crossing_height(&f, &g3), Err(EnvelopeError::NoCrossing));
    }

    #[test]
    fn polynomial_roots_are_found_between_critical_points() {
        // (h-1)(h-2)(h-3)
        let roots = real_roots_f64(&[-6.0, 11.0, -6.0, 1.0], 0.0, 10.0).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-9);
        }
        // double root at 2
        let roots = real_roots_f64(&[4.0, -4.0, 1.0], 0.0, 10.0).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-6);
    }
}
