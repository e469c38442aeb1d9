use std::cmp::Ordering;

use proptest::prelude::*;
use terrain_guard::atc::decide;
use terrain_guard::batc::required_height;
use terrain_guard::envelope::{curve_crossings, pointwise_extreme, ExtremeMode, RationalCurve};
use terrain_guard::geom::minimize_max_of_lines;
use terrain_guard::oracles::oracle_cover_check;
use terrain_guard::scalar::rat;
use terrain_guard::terrain::{terrain_from_f64, terrain_to_json};
use terrain_guard::{
    batc_altitude, batc_count, is_visible, min_guards_at_height, orientation, parse_terrain, solve, AltitudeInterval,
    Point, Rational, SampleGrid, Scalar, Terrain, Viewers,
};

fn terrain(max_n: usize) -> impl Strategy<Value = Terrain<Rational>> {
    prop::collection::vec((1u8..4, -8i8..9), 2..=max_n).prop_map(|steps| {
        let mut x = 0.0;
        let coords: Vec<(f64, f64)> = steps
            .iter()
            .map(|&(dx, y)| {
                x += f64::from(dx);
                (x, f64::from(y))
            })
            .collect();
        terrain_from_f64(&coords).expect("strictly increasing x")
    })
}

/// `count` altitudes from `y(T)` upward in steps of `step`.
fn altitudes(t: &Terrain<Rational>, count: i64, step: Rational) -> Vec<Rational> {
    (0..count).map(|i| t.y_max() + &step * Rational::from_i64(i)).collect()
}

fn q(x: i64) -> Rational {
    rat(x, 1)
}

/// Min-max height for the part of the terrain between `a` and `b` (cut points on edges `ea`, `eb`).
fn fractional_required(t: &Terrain<Rational>, a: &Rational, ea: usize, b: &Rational, eb: usize) -> Rational {
    let lines: Vec<(Rational, Rational)> = (ea..=eb)
        .map(|e| {
            let m = t.edge_slope(e);
            let c = &t.edge(e).0.y - &m * &t.edge(e).0.x;
            (m, c)
        })
        .collect();
    let (_, v) = minimize_max_of_lines(&lines, a, b);
    v.max(t.y_max().clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn accepted_terrains_are_strictly_monotone(pts in prop::collection::vec((-20i32..20, -20i32..20), 0..12)) {
        let text: String = pts.iter().map(|(x, y)| format!("{x},{y}\n")).collect();
        if let Ok(t) = parse_terrain(&text) {
            prop_assert!(t.vertices().windows(2).all(|w| w[0].x < w[1].x));
        }
    }

    #[test]
    fn orientation_is_antisymmetric(c in prop::array::uniform6(-50i64..50)) {
        let p = Point::new(q(c[0]), q(c[1]));
        let a = Point::new(q(c[2]), q(c[3]));
        let b = Point::new(q(c[4]), q(c[5]));
        prop_assert_eq!(orientation(&p, &a, &b), -orientation(&p, &b, &a));
    }

    #[test]
    fn json_round_trip_is_identity(t in terrain(12)) {
        let again = parse_terrain(&terrain_to_json(&t).to_string()).unwrap();
        prop_assert_eq!(again.vertices(), t.vertices());
    }

    #[test]
    fn viewer_extremes_are_monotone_in_altitude(t in terrain(10)) {
        let v = Viewers::new(&t);
        for e in 0..t.num_edges() {
            let mut last: Option<(Rational, Rational)> = None;
            for h in altitudes(&t, 12, rat(1, 2)) {
                let iv = v.edge_viewers(e, &h);
                if let Some((f, g)) = &last {
                    prop_assert!(iv.f_x >= *f, "f_x drops on edge {} at h={}", e, h);
                    prop_assert!(iv.g_x <= *g, "g_x rises on edge {} at h={}", e, h);
                }
                last = Some((iv.f_x, iv.g_x));
            }
        }
    }

    #[test]
    fn blocking_is_one_sided(t in terrain(9), lift in 0i64..6, pick in 0usize..64) {
        let h = t.y_max() + q(lift);
        let pts = SampleGrid::new(4).points(&t);
        let p = &pts[pick % pts.len()];
        let xs: Vec<Rational> = (0..=16)
            .map(|i| t.x_min() + (t.x_max() - t.x_min()) * rat(i, 16))
            .filter(|x| x < &p.x)
            .collect();
        let mut hidden = false;
        for x in xs.iter().rev() {
            let seen = is_visible(&t, &Point::new(x.clone(), h.clone()), p).unwrap();
            prop_assert!(!(hidden && seen), "visible again from x={} after being blocked", x);
            hidden |= !seen;
        }
    }

    #[test]
    fn everything_left_of_f_is_visible_from_f(t in terrain(10), lift in 0i64..6) {
        let h = t.y_max() + q(lift);
        let f = Viewers::new(&t).f_all(&h);
        let u = Point::new(f.clone(), h);
        for p in SampleGrid::new(8).points(&t).iter().filter(|p| p.x <= f) {
            prop_assert!(is_visible(&t, &u, p).unwrap(), "{:?} hidden from f", p);
        }
    }

    #[test]
    fn guard_count_never_rises_with_altitude(t in terrain(14)) {
        let tf: Terrain<f64> = t.convert();
        let mut last = usize::MAX;
        for h in altitudes(&t, 10, rat(1, 3)) {
            let (count, _) = min_guards_at_height(&tf, &h.to_f64());
            prop_assert!(count <= last);
            last = count;
        }
    }

    #[test]
    fn envelope_of_lines_is_their_pointwise_min(coeffs in prop::collection::vec((-20i64..20, 0i64..5), 1..8)) {
        let curves: Vec<RationalCurve<Rational>> = coeffs
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| RationalCurve::line(q(a), q(b), id))
            .collect();
        let env = pointwise_extreme(&curves, ExtremeMode::Min, &AltitudeInterval::closed_from(q(0))).unwrap();
        prop_assert!(env.piece_count() <= curves.len());
        let mut last: Option<Rational> = None;
        for s in 0..200 {
            let h = rat(s, 8);
            let x = env.eval(&h).unwrap();
            let each: Vec<Rational> = curves.iter().map(|c| c.eval(&h)).collect();
            prop_assert!(each.iter().all(|c| x <= *c));
            prop_assert!(each.contains(&x));
            if let Some(prev) = &last {
                prop_assert!(x >= *prev, "non-decreasing lines give a non-decreasing min");
            }
            last = Some(x);
        }
    }

    #[test]
    fn crossings_separate_constant_sign_runs(
        a in prop::array::uniform3(-6i64..6),
        b in prop::array::uniform2(-6i64..6),
    ) {
        use terrain_guard::envelope::{Direction, Poly};
        let quad = RationalCurve::new(
            Poly::new(vec![q(a[0]), q(a[1]), q(a[2])]),
            Poly::constant(q(1)),
            Direction::Increasing,
            0,
        );
        let line = RationalCurve::line(q(b[0]), q(b[1]), 1);
        let hi = q(10);
        let roots = curve_crossings(&quad, &line, &q(-10), Some(&hi)).unwrap();
        let mut marks = vec![q(-10)];
        marks.extend(roots.iter().cloned());
        marks.push(hi);
        for w in marks.windows(2) {
            let signs: Vec<Ordering> = (1..8)
                .map(|i| {
                    let h = &w[0] + (&w[1] - &w[0]) * rat(i, 8);
                    (quad.eval(&h) - line.eval(&h)).sign()
                })
                .filter(|s| *s != Ordering::Equal)
                .collect();
            prop_assert!(signs.windows(2).all(|p| p[0] == p[1]), "sign flips between {} and {}", w[0], w[1]);
        }
    }

    #[test]
    fn decide_is_monotone_in_altitude(t in terrain(12), k in 1usize..4) {
        let mut was = false;
        for h in altitudes(&t, 12, rat(1, 4)) {
            let now = decide(&t, k, &h).0;
            prop_assert!(!was || now, "decide drops back to false at h={}", h);
            was = now;
        }
    }

    #[test]
    fn more_guards_never_need_more_altitude(t in terrain(12)) {
        let hs: Vec<f64> = (1..=4).map(|k| solve(&t, k).unwrap().h_star_f64()).collect();
        for w in hs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()));
        }
    }

    #[test]
    fn no_cover_without_a_guard_at_or_left_of_f(t in terrain(10), lift in 0i64..4) {
        let h = t.y_max() + q(lift);
        let v = Viewers::new(&t);
        let f = v.f_all(&h);
        prop_assume!(&f < t.x_max());
        let shifted = &f + (t.x_max() - &f) / q(4);
        let guards: Vec<Rational> = v
            .greedy_guards(&h, None)
            .into_iter()
            .map(|g| g.max(shifted.clone()))
            .collect();
        prop_assert!(!oracle_cover_check(&t, &h, &guards, SampleGrid::default()));
    }

    #[test]
    fn no_cover_without_a_guard_at_or_right_of_g(t in terrain(10), lift in 0i64..4) {
        let h = t.y_max() + q(lift);
        let v = Viewers::new(&t);
        let g = v.g_all(&h);
        prop_assume!(&g > t.x_min());
        let shifted = &g - (&g - t.x_min()) / q(4);
        let guards: Vec<Rational> = v
            .greedy_guards(&h, None)
            .into_iter()
            .map(|x| x.min(shifted.clone()))
            .collect();
        prop_assert!(!oracle_cover_check(&t, &h, &guards, SampleGrid::default()));
    }

    #[test]
    fn widening_a_subchain_never_lowers_its_height(t in terrain(12), a in 0usize..12, b in 0usize..12) {
        let n = t.n();
        let (i, j) = (a % (n - 1), 1 + b % (n - 1));
        prop_assume!(i < j);
        let base = required_height(&t, i, j).required_h;
        if i > 0 {
            prop_assert!(required_height(&t, i - 1, j).required_h >= base);
        }
        if j + 1 < n {
            prop_assert!(required_height(&t, i, j + 1).required_h >= base);
        }
    }

    #[test]
    fn optimal_cuts_gain_nothing_from_interior_points(t in terrain(10), k in 2usize..4) {
        let s = batc_altitude(&t, k).unwrap();
        let n = t.n();
        for w in s.pairs.windows(2) {
            let (left, right) = (&w[0], &w[1]);
            let cut = left.to;
            // slide the cut into each neighbouring edge
            for e in [cut.wrapping_sub(1), cut] {
                if e >= n - 1 || e < left.from || e >= right.to {
                    continue;
                }
                let (p, r) = t.edge(e);
                for frac in 1..4 {
                    let x = &p.x + (&r.x - &p.x) * rat(frac, 4);
                    let lhs = fractional_required(&t, &t.vertex(left.from).x, left.from, &x, e);
                    let rhs = fractional_required(&t, &x, e, &t.vertex(right.to).x, right.to - 1);
                    let rest = s
                        .pairs
                        .iter()
                        .filter(|p| p.to <= left.from || p.from >= right.to)
                        .map(|p| required_height(&t, p.from, p.to).required_h)
                        .max()
                        .unwrap_or_else(|| t.y_max().clone());
                    prop_assert!(lhs.max(rhs).max(rest) >= s.h_star);
                }
            }
        }
    }

    #[test]
    fn batc_count_falls_with_altitude_and_meets_k(t in terrain(12), k in 1usize..5) {
        let mut last = usize::MAX;
        for h in altitudes(&t, 8, rat(1, 2)) {
            let c = batc_count(&t, &h).unwrap().pairs.len();
            prop_assert!(c <= last);
            last = c;
        }
        let s = batc_altitude(&t, k).unwrap();
        prop_assert!(batc_count(&t, &s.h_star).unwrap().pairs.len() <= k);
    }

    #[test]
    fn bijective_guarding_is_never_lower(t in terrain(10), k in 1usize..4) {
        let atc = solve(&t, k).unwrap().h_star_f64();
        let batc = batc_altitude(&t, k).unwrap().h_star.to_f64();
        prop_assert!(atc <= batc + 1e-9 * (1.0 + batc.abs()));
    }
}
