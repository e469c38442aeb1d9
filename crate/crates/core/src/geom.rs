//! Points, lines and the orientation predicate.

use std::cmp::Ordering;

use crate::scalar::{convert, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn convert<T: Scalar>(&self) -> Point<T> {
        Point::new(convert(&self.x), convert(&self.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

/// Twice the signed area of `(p, q, r)`.
pub fn cross<S: Scalar>(p: &Point<S>, q: &Point<S>, r: &Point<S>) -> S {
    (q.x.clone() - p.x.clone()) * (r.y.clone() - p.y.clone())
        - (q.y.clone() - p.y.clone()) * (r.x.clone() - p.x.clone())
}

/// Sign of `(q - p) x (r - p)`: `+1` for a left turn, `-1` for a right turn, `0` when collinear.
pub fn orientation<S: Scalar>(p: &Point<S>, q: &Point<S>, r: &Point<S>) -> i8 {
    match cross(p, q, r).sign() {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

/// The line `a*x + b*y = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Intersection<S> {
    Point(Point<S>),
    Parallel,
    Coincident,
}

impl<S: Scalar> Line<S> {
    pub fn new(a: S, b: S, c: S) -> Self {
        assert!(
            !(a.is_zero_tol() && b.is_zero_tol()),
            "degenerate line: a and b both zero"
        );
        Line { a, b, c }
    }

    pub fn through(p: &Point<S>, q: &Point<S>) -> Self {
        let a = q.y.clone() - p.y.clone();
        let b = p.x.clone() - q.x.clone();
        let c = a.clone() * p.x.clone() + b.clone() * p.y.clone();
        Line::new(a, b, c)
    }

    /// `y = slope * x + intercept`.
    pub fn from_slope(slope: S, intercept: S) -> Self {
        Line::new(-slope, S::one(), intercept)
    }

    /// Vertical line `x = x0`.
    pub fn vertical(x0: S) -> Self {
        Line::new(S::one(), S::zero(), x0)
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero_tol()
    }

    pub fn slope(&self) -> Option<S> {
        if self.is_vertical() {
            None
        } else {
            Some(-self.a.clone() / self.b.clone())
        }
    }

    /// y on the line at `x`; `None` for vertical lines.
    pub fn y_at(&self, x: &S) -> Option<S> {
        if self.is_vertical() {
            None
        } else {
            Some((self.c.clone() - self.a.clone() * x.clone()) / self.b.clone())
        }
    }

    /// x on the line at height `y`; `None` for horizontal lines.
    pub fn x_at(&self, y: &S) -> Option<S> {
        if self.a.is_zero_tol() {
            None
        } else {
            Some((self.c.clone() - self.b.clone() * y.clone()) / self.a.clone())
        }
    }

    /// Whether `p` lies in the closed upper half-plane of a non-vertical line.
    pub fn contains_above(&self, p: &Point<S>) -> bool {
        let y = self.y_at(&p.x).expect("non-vertical");
        p.y.cmp_tol(&y) != Ordering::Less
    }
}

pub fn line_intersection<S: Scalar>(l1: &Line<S>, l2: &Line<S>) -> Intersection<S> {
    let det = l1.a.clone() * l2.b.clone() - l1.b.clone() * l2.a.clone();
    if det.is_zero_tol() {
        // parallel; coincident when the right-hand sides are proportional too
        let r1 = l1.a.clone() * l2.c.clone() - l2.a.clone() * l1.c.clone();
        let r2 = l1.b.clone() * l2.c.clone() - l2.b.clone() * l1.c.clone();
        if r1.is_zero_tol() && r2.is_zero_tol() {
            return Intersection::Coincident;
        }
        return Intersection::Parallel;
    }
    let x = (l1.c.clone() * l2.b.clone() - l1.b.clone() * l2.c.clone()) / det.clone();
    let y = (l1.a.clone() * l2.c.clone() - l1.c.clone() * l2.a.clone()) / det;
    Intersection::Point(Point::new(x, y))
}

/// Leftmost minimizer over `[lo, hi]` of `F(x) = max_i (slope_i x + intercept_i)`,
/// returned with `F` there. Builds the upper envelope of the lines (O(m log m)).
pub fn minimize_max_of_lines<S: Scalar>(lines: &[(S, S)], lo: &S, hi: &S) -> (S, S) {
    assert!(!lines.is_empty(), "need at least one line");
    let mut sorted: Vec<(S, S)> = lines.to_vec();
    sorted.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    // upper envelope: slopes increasing left to right
    let mut hull: Vec<(S, S)> = Vec::new();
    for l in sorted {
        if let Some(last) = hull.last() {
            if last.0 == l.0 {
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // b is useless if a and l meet at or left of where a and b meet
            let lhs = (l.1.clone() - a.1.clone()) * (b.0.clone() - a.0.clone());
            let rhs = (b.1.clone() - a.1.clone()) * (l.0.clone() - a.0.clone());
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let eval = |x: &S| {
        hull.iter()
            .map(|(m, c)| m.clone() * x.clone() + c.clone())
            .fold(None, |acc: Option<S>, v| {
                Some(acc.map_or(v.clone(), |a| S::max_of(a, v)))
            })
            .unwrap()
    };
    let mut best_x = lo.clone();
    let mut best_v = eval(lo);
    for w in hull.windows(2) {
        let x = (w[0].1.clone() - w[1].1.clone()) / (w[1].0.clone() - w[0].0.clone());
        if x > *lo && x <= *hi {
            let v = eval(&x);
            if v < best_v {
                best_v = v;
                best_x = x;
            }
        }
    }
    let v = eval(hi);
    if v < best_v {
        best_v = v;
        best_x = hi.clone();
    }
    (best_x, best_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn p(x: i64, y: i64) -> Point<Rational> {
        Point::new(rat(x, 1), rat(y, 1))
    }

    #[test]
    fn orientation_cases() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), 0);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(1, 1)), 1);
        assert_eq!(orientation(&p(0, 0), &p(1, 1), &p(2, 0)), -1);
    }

    #[test]
    fn intersections() {
        let a = Line::from_slope(rat(1, 1), rat(0, 1));
        let b = Line::from_slope(rat(-1, 1), rat(4, 1));
        assert_eq!(line_intersection(&a, &b), Intersection::Point(p(2, 2)));
        let c = Line::from_slope(rat(1, 1), rat(1, 1));
        assert_eq!(line_intersection(&a, &c), Intersection::Parallel);
        let flat = Line::from_slope(rat(0, 1), rat(0, 1));
        let vert = Line::vertical(rat(3, 1));
        assert_eq!(line_intersection(&flat, &vert), Intersection::Point(p(3, 0)));
        let a2 = Line::through(&p(0, 0), &p(2, 2));
        assert_eq!(line_intersection(&a, &a2), Intersection::Coincident);
    }

    #[test]
    fn min_of_line_maximum() {
        let lines = vec![(rat(1, 1), rat(0, 1)), (rat(-1, 1), rat(4, 1)), (rat(0, 1), rat(1, 1))];
        assert_eq!(
            minimize_max_of_lines(&lines, &rat(0, 1), &rat(4, 1)),
            (rat(2, 1), rat(2, 1))
        );
        assert_eq!(
            minimize_max_of_lines(&lines, &rat(3, 1), &rat(4, 1)),
            (rat(3, 1), rat(3, 1))
        );
        let flat = vec![(rat(0, 1), rat(0, 1))];
        assert_eq!(
            minimize_max_of_lines(&flat, &rat(0, 1), &rat(1, 1)),
            (rat(0, 1), rat(0, 1))
        );
    }

    #[test]
    #[should_panic]
    fn rejects_degenerate_line() {
        let _ = Line::new(rat(0, 1), rat(0, 1), rat(1, 1));
    }
}
