//! Tangent-circle solvers for the seven constraint families
//! PPP, PPL, PPC, LLL, LLP, LLC, CLP.
//!
//! Every family reduces to quadratics: centers restricted to a
//! perpendicular bisector, an angle bisector, or a radical-style line,
//! with tangency branches enumerated by sign. All real solutions are
//! returned; branch choice is the caller's job via [`Selector`]s.
//! Candidates are validated against the residual contract before being
//! emitted, which also discards extraneous roots introduced by squaring.

use crate::error::GeomError;
use crate::geom::{dist, foot, Circle, Line, Point, Tolerance};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint<S> {
    Point(Point<S>),
    Line(Line<S>),
    Circle(Circle<S>),
}

/// Exactly three point/line/circle constraints.
#[derive(Debug, Clone, Copy)]
pub struct TangencyProblem<S> {
    pub constraints: [Constraint<S>; 3],
}

#[derive(Debug, Clone)]
pub struct TangencySolution<S> {
    pub circle: Circle<S>,
    /// One (constraint index, point) per line/circle constraint.
    pub touch_points: Vec<(usize, Point<S>)>,
    /// One (constraint index, point) per point constraint.
    pub passes_through: Vec<(usize, Point<S>)>,
}

/// Geometric branch-selection predicates.
#[derive(Debug, Clone, Copy)]
pub enum Selector<S> {
    /// Center (or point) nearest to the given point.
    Nearest(Point<S>),
    Farthest(Point<S>),
    /// Center strictly inside triangle PQR.
    InsideTriangle(Point<S>, Point<S>, Point<S>),
    /// Center strictly inside the angle at `v` spanned toward `p` and `q`.
    InsideAngle {
        v: Point<S>,
        p: Point<S>,
        q: Point<S>,
    },
    /// Tangent internally to the circle constraint.
    Internal,
    /// Tangent externally to the circle constraint.
    External,
    /// Strictly smallest radius among the candidates.
    Smallest,
    /// Strictly largest radius among the candidates.
    Largest,
}

impl<S: Scalar> TangencyProblem<S> {
    fn counts(&self) -> (usize, usize, usize) {
        let mut n = (0, 0, 0);
        for c in &self.constraints {
            match c {
                Constraint::Point(_) => n.0 += 1,
                Constraint::Line(_) => n.1 += 1,
                Constraint::Circle(_) => n.2 += 1,
            }
        }
        n
    }

    fn points(&self) -> Vec<(usize, Point<S>)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Constraint::Point(p) => Some((i, *p)),
                _ => None,
            })
            .collect()
    }

    fn lines(&self) -> Vec<(usize, Line<S>)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Constraint::Line(l) => Some((i, *l)),
                _ => None,
            })
            .collect()
    }

    fn circles(&self) -> Vec<(usize, Circle<S>)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Constraint::Circle(c) => Some((i, *c)),
                _ => None,
            })
            .collect()
    }
}

/// Roots of a*t^2 + b*t + c = 0, degenerating to the linear case when the
/// leading coefficient vanishes relative to the others.
fn solve_quadratic<S: Scalar>(a: S, b: S, c: S) -> Vec<S> {
    let mag = a.abs().max_s(b.abs()).max_s(c.abs());
    if !(mag > S::zero()) {
        return vec![];
    }
    let tiny = S::rel_eps() * mag;
    if a.abs() <= tiny {
        if b.abs() <= tiny {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - S::from_i64(4) * a * c;
    if disc < S::zero() {
        return vec![];
    }
    let sd = disc.sqrt();
    // Citardauq-style split avoids cancellation in the smaller root.
    let q = if b >= S::zero() {
        -(b + sd).half()
    } else {
        (sd - b).half()
    };
    if q.abs() <= tiny {
        return vec![-b / a / S::two()];
    }
    vec![q / a, c / q]
}

/// Max relative tangency residual of a candidate circle.
fn max_residual<S: Scalar>(circle: &Circle<S>, p: &TangencyProblem<S>) -> S {
    let mut worst = S::zero();
    for c in &p.constraints {
        let r = match c {
            Constraint::Point(q) => (dist(*q, circle.center) - circle.radius).abs(),
            Constraint::Line(l) => (l.signed_dist(circle.center).abs() - circle.radius).abs(),
            Constraint::Circle(o) => {
                let d = dist(circle.center, o.center);
                let ext = (d - (circle.radius + o.radius)).abs();
                let int = (d - (circle.radius - o.radius).abs()).abs();
                ext.min_s(int)
            }
        };
        worst = worst.max_s(r);
    }
    worst
}

fn touch_on_circle<S: Scalar>(sol: &Circle<S>, other: &Circle<S>) -> Point<S> {
    let d = dist(sol.center, other.center);
    let ux = (other.center.x - sol.center.x) / d;
    let uy = (other.center.y - sol.center.y) / d;
    let t1 = Point::new(sol.center.x + ux * sol.radius, sol.center.y + uy * sol.radius);
    let t2 = Point::new(sol.center.x - ux * sol.radius, sol.center.y - uy * sol.radius);
    let r1 = (dist(t1, other.center) - other.radius).abs();
    let r2 = (dist(t2, other.center) - other.radius).abs();
    if r1 <= r2 {
        t1
    } else {
        t2
    }
}

fn package<S: Scalar>(circle: Circle<S>, p: &TangencyProblem<S>) -> TangencySolution<S> {
    let mut touch_points = Vec::new();
    let mut passes_through = Vec::new();
    for (i, c) in p.constraints.iter().enumerate() {
        match c {
            Constraint::Point(q) => passes_through.push((i, *q)),
            Constraint::Line(l) => touch_points.push((i, foot(circle.center, l))),
            Constraint::Circle(o) => touch_points.push((i, touch_on_circle(&circle, o))),
        }
    }
    TangencySolution {
        circle,
        touch_points,
        passes_through,
    }
}

/// All real tangent circles for the problem, residual-validated, ordered
/// by (radius, center.x, center.y) and deduplicated.
pub fn solve<S: Scalar>(
    p: &TangencyProblem<S>,
    tol: &Tolerance<S>,
) -> Result<Vec<TangencySolution<S>>, GeomError> {
    check_nondegenerate(p, tol)?;
    let candidates = match p.counts() {
        (3, 0, 0) => solve_ppp(p, tol),
        (2, 1, 0) => solve_ppl(p, tol),
        (2, 0, 1) => solve_ppc(p, tol),
        (1, 2, 0) => solve_llp(p, tol),
        (0, 3, 0) => solve_lll(p),
        (0, 2, 1) => solve_llc(p, tol),
        (1, 1, 1) => solve_clp(p, tol),
        _ => {
            return Err(GeomError::DegenerateInput(
                "unsupported tangency family (only PPP, PPL, PPC, LLL, LLP, LLC, CLP)".into(),
            ))
        }
    };
    // Residual gate: genuine roots sit at ~eps*scale, extraneous squared
    // roots at O(scale).
    let gate = tol.eps.sqrt() * tol.scale;
    let min_r = tol.len() * S::from_i64(10);
    let mut accepted: Vec<Circle<S>> = Vec::new();
    for c in candidates {
        if !(c.radius > min_r) || !c.radius.is_finite() {
            continue;
        }
        if !(max_residual(&c, p) <= gate) {
            continue;
        }
        let dup = accepted.iter().any(|d| {
            dist(d.center, c.center) <= min_r && (d.radius - c.radius).abs() <= min_r
        });
        if !dup {
            accepted.push(c);
        }
    }
    accepted.sort_by(|u, v| {
        (u.radius, u.center.x, u.center.y)
            .partial_cmp(&(v.radius, v.center.x, v.center.y))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(accepted.into_iter().map(|c| package(c, p)).collect())
}

fn check_nondegenerate<S: Scalar>(
    p: &TangencyProblem<S>,
    tol: &Tolerance<S>,
) -> Result<(), GeomError> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            let same = match (&p.constraints[i], &p.constraints[j]) {
                (Constraint::Point(a), Constraint::Point(b)) => dist(*a, *b) <= tol.len(),
                (Constraint::Line(a), Constraint::Line(b)) => {
                    (a.a - b.a).abs() <= tol.dimensionless()
                        && (a.b - b.b).abs() <= tol.dimensionless()
                        && (a.c - b.c).abs() <= tol.len()
                }
                (Constraint::Circle(a), Constraint::Circle(b)) => {
                    dist(a.center, b.center) <= tol.len()
                        && (a.radius - b.radius).abs() <= tol.len()
                }
                _ => false,
            };
            if same {
                return Err(GeomError::DegenerateInput(
                    "repeated identical constraint".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Perpendicular-bisector parametrization for a point pair: returns
/// (midpoint, unit direction) of the locus of centers equidistant from both.
fn bisector_of_points<S: Scalar>(p: Point<S>, q: Point<S>) -> (Point<S>, (S, S)) {
    let m = crate::geom::midpoint(p, q);
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    let n = dx.hypot_s(dy);
    ((m), (-dy / n, dx / n))
}

fn solve_ppp<S: Scalar>(p: &TangencyProblem<S>, tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let pts = p.points();
    let (p1, p2, p3) = (pts[0].1, pts[1].1, pts[2].1);
    if crate::geom::cross2(p1, p2, p3).abs() <= tol.area() {
        return vec![];
    }
    let (m1, u1) = bisector_of_points(p1, p2);
    let (m2, u2) = bisector_of_points(p1, p3);
    // Intersect the two bisectors: m1 + t*u1 = m2 + s*u2.
    let det = u1.0 * (-u2.1) - (-u2.0) * u1.1;
    if det.abs() <= S::rel_eps() {
        return vec![];
    }
    let rx = m2.x - m1.x;
    let ry = m2.y - m1.y;
    let t = (rx * (-u2.1) - (-u2.0) * ry) / det;
    let center = Point::new(m1.x + u1.0 * t, m1.y + u1.1 * t);
    vec![Circle {
        center,
        radius: dist(center, p1),
    }]
}

fn solve_ppl<S: Scalar>(p: &TangencyProblem<S>, _tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let pts = p.points();
    let (p1, p2) = (pts[0].1, pts[1].1);
    let l = p.lines()[0].1;
    let (m, u) = bisector_of_points(p1, p2);
    let m2 = dist(m, p1).sq();
    let d0 = l.signed_dist(m);
    let k = l.a * u.0 + l.b * u.1;
    // (d0 + k t)^2 = t^2 + m2
    let roots = solve_quadratic(k * k - S::one(), S::two() * d0 * k, d0 * d0 - m2);
    roots
        .into_iter()
        .map(|t| {
            let center = Point::new(m.x + u.0 * t, m.y + u.1 * t);
            Circle {
                center,
                radius: dist(center, p1),
            }
        })
        .collect()
}

fn solve_ppc<S: Scalar>(p: &TangencyProblem<S>, _tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let pts = p.points();
    let (p1, p2) = (pts[0].1, pts[1].1);
    let o = p.circles()[0].1;
    let (m, u) = bisector_of_points(p1, p2);
    let m2 = dist(m, p1).sq();
    let wx = m.x - o.center.x;
    let wy = m.y - o.center.y;
    // |c-O|^2 - |c-p1|^2 - R^2 = alpha*t + beta (linear in t).
    let alpha = S::two() * (u.0 * wx + u.1 * wy);
    let beta = wx * wx + wy * wy - m2 - o.radius.sq();
    // (alpha t + beta)^2 = 4 R^2 (t^2 + m2), covering both tangency signs.
    let four_r2 = S::from_i64(4) * o.radius.sq();
    let roots = solve_quadratic(
        alpha.sq() - four_r2,
        S::two() * alpha * beta,
        beta.sq() - four_r2 * m2,
    );
    roots
        .into_iter()
        .map(|t| {
            let center = Point::new(m.x + u.0 * t, m.y + u.1 * t);
            Circle {
                center,
                radius: dist(center, p1),
            }
        })
        .collect()
}

fn solve_lll<S: Scalar>(p: &TangencyProblem<S>) -> Vec<Circle<S>> {
    let ls = p.lines();
    let (l1, l2, l3) = (ls[0].1, ls[1].1, ls[2].1);
    let mut out = Vec::new();
    for &s1 in &[S::one(), -S::one()] {
        for &s2 in &[S::one(), -S::one()] {
            for &s3 in &[S::one(), -S::one()] {
                // a_i x + b_i y + c_i = s_i r, solved by Cramer's rule.
                let det3 = |c1: (S, S, S), c2: (S, S, S), c3: (S, S, S)| {
                    c1.0 * (c2.1 * c3.2 - c3.1 * c2.2) - c2.0 * (c1.1 * c3.2 - c3.1 * c1.2)
                        + c3.0 * (c1.1 * c2.2 - c2.1 * c1.2)
                };
                let col_a = (l1.a, l2.a, l3.a);
                let col_b = (l1.b, l2.b, l3.b);
                let col_s = (s1, s2, s3);
                let rhs = (-l1.c, -l2.c, -l3.c);
                let den = det3(col_a, col_b, col_s);
                if !(den.abs() > S::rel_eps()) {
                    continue;
                }
                let x = det3(rhs, col_b, col_s) / den;
                let y = det3(col_a, rhs, col_s) / den;
                let r = det3(col_a, col_b, rhs) / den;
                if r > S::zero() {
                    out.push(Circle {
                        center: Point::new(x, y),
                        radius: r,
                    });
                }
            }
        }
    }
    out
}

/// The two angle-bisector lines of a (normalized) line pair.
fn line_pair_bisectors<S: Scalar>(l1: &Line<S>, l2: &Line<S>) -> Vec<Line<S>> {
    let mut out = Vec::new();
    for &s in &[S::one(), -S::one()] {
        if let Ok(b) = Line::new(l1.a + s * l2.a, l1.b + s * l2.b, l1.c + s * l2.c) {
            out.push(b);
        }
    }
    out
}

fn solve_llp<S: Scalar>(p: &TangencyProblem<S>, _tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let ls = p.lines();
    let (l1, l2) = (ls[0].1, ls[1].1);
    let q = p.points()[0].1;
    let mut out = Vec::new();
    for bis in line_pair_bisectors(&l1, &l2) {
        let base = foot(q, &bis);
        let (vx, vy) = bis.direction();
        let d0 = l1.signed_dist(base);
        let k = l1.a * vx + l1.b * vy;
        let mx = base.x - q.x;
        let my = base.y - q.y;
        // |c - q|^2 = (d0 + k t)^2
        let roots = solve_quadratic(
            S::one() - k * k,
            S::two() * (vx * mx + vy * my - d0 * k),
            mx * mx + my * my - d0 * d0,
        );
        for t in roots {
            let center = Point::new(base.x + vx * t, base.y + vy * t);
            out.push(Circle {
                center,
                radius: dist(center, q),
            });
        }
    }
    out
}

fn solve_llc<S: Scalar>(p: &TangencyProblem<S>, _tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let ls = p.lines();
    let (l1, l2) = (ls[0].1, ls[1].1);
    let o = p.circles()[0].1;
    let mut out = Vec::new();
    for bis in line_pair_bisectors(&l1, &l2) {
        let base = foot(o.center, &bis);
        let (vx, vy) = bis.direction();
        let d0 = l1.signed_dist(base);
        let k = l1.a * vx + l1.b * vy;
        let wx = base.x - o.center.x;
        let wy = base.y - o.center.y;
        for &s in &[S::one(), -S::one()] {
            // |c-O|^2 - R^2 - d(t)^2 - 2 R s d(t) = 0 with d(t) = d0 + k t.
            let a2 = S::one() - k * k;
            let b2 = S::two() * (vx * wx + vy * wy - d0 * k - o.radius * s * k);
            let c2 = wx * wx + wy * wy - o.radius.sq() - d0 * d0
                - S::two() * o.radius * s * d0;
            for t in solve_quadratic(a2, b2, c2) {
                let center = Point::new(base.x + vx * t, base.y + vy * t);
                let r = l1.signed_dist(center).abs();
                out.push(Circle { center, radius: r });
            }
        }
    }
    out
}

fn solve_clp<S: Scalar>(p: &TangencyProblem<S>, _tol: &Tolerance<S>) -> Vec<Circle<S>> {
    let q = p.points()[0].1;
    let l = p.lines()[0].1;
    let o = p.circles()[0].1;
    let mut out = Vec::new();
    let k_const = q.x.sq() + q.y.sq() - o.center.x.sq() - o.center.y.sq() + o.radius.sq();
    for &sigma in &[S::one(), -S::one()] {
        for &s in &[S::one(), -S::one()] {
            // Linear locus: |c-q|^2 - |c-O|^2 + R^2 + 2 R s sigma d_l(c) = 0.
            let two_r_s = S::two() * o.radius * s * sigma;
            let la = S::two() * (o.center.x - q.x) + two_r_s * l.a;
            let lb = S::two() * (o.center.y - q.y) + two_r_s * l.b;
            let lc = k_const + two_r_s * l.c;
            let locus = match Line::new(la, lb, lc) {
                Ok(line) => line,
                Err(_) => continue,
            };
            let base = foot(q, &locus);
            let (vx, vy) = locus.direction();
            let d0 = l.signed_dist(base);
            let k = l.a * vx + l.b * vy;
            let mx = base.x - q.x;
            let my = base.y - q.y;
            // |c-q|^2 = d_l(c)^2
            for t in solve_quadratic(
                S::one() - k * k,
                S::two() * (vx * mx + vy * my - d0 * k),
                mx * mx + my * my - d0 * d0,
            ) {
                let center = Point::new(base.x + vx * t, base.y + vy * t);
                let r = sigma * l.signed_dist(center);
                if r > S::zero() {
                    out.push(Circle { center, radius: r });
                }
            }
        }
    }
    out
}

/// Evaluate a selector against candidate `idx`, comparing only against the
/// indices still `alive` (selectors apply as successive filters).
fn matches<S: Scalar>(
    sel: &Selector<S>,
    idx: usize,
    alive: &[usize],
    sols: &[TangencySolution<S>],
    problem: &TangencyProblem<S>,
    tol: &Tolerance<S>,
) -> bool {
    let c = &sols[idx].circle;
    match sel {
        Selector::Nearest(p) => {
            let d = dist(c.center, *p);
            alive
                .iter()
                .all(|&j| j == idx || dist(sols[j].circle.center, *p) > d)
        }
        Selector::Farthest(p) => {
            let d = dist(c.center, *p);
            alive
                .iter()
                .all(|&j| j == idx || dist(sols[j].circle.center, *p) < d)
        }
        Selector::InsideTriangle(a, b, q) => {
            let s1 = crate::geom::cross2(*a, *b, c.center);
            let s2 = crate::geom::cross2(*b, *q, c.center);
            let s3 = crate::geom::cross2(*q, *a, c.center);
            (s1 > S::zero() && s2 > S::zero() && s3 > S::zero())
                || (s1 < S::zero() && s2 < S::zero() && s3 < S::zero())
        }
        Selector::InsideAngle { v, p, q } => {
            let sp = crate::geom::cross2(*v, *p, c.center) * crate::geom::cross2(*v, *p, *q);
            let sq = crate::geom::cross2(*v, *q, c.center) * crate::geom::cross2(*v, *q, *p);
            sp > S::zero() && sq > S::zero()
        }
        Selector::Internal | Selector::External => {
            let oc = problem.circles();
            if oc.is_empty() {
                return false;
            }
            let o = oc[0].1;
            let d = dist(c.center, o.center);
            let int = (d - (c.radius - o.radius).abs()).abs();
            let ext = (d - (c.radius + o.radius)).abs();
            let gate = tol.eps.sqrt() * tol.scale;
            match sel {
                Selector::Internal => int <= gate && int < ext,
                _ => ext <= gate && ext < int,
            }
        }
        Selector::Smallest => alive
            .iter()
            .all(|&j| j == idx || sols[j].circle.radius > c.radius),
        Selector::Largest => alive
            .iter()
            .all(|&j| j == idx || sols[j].circle.radius < c.radius),
    }
}

/// Apply the selectors as successive filters; exactly one candidate must
/// survive.
pub fn select<S: Scalar>(
    sols: &[TangencySolution<S>],
    selectors: &[Selector<S>],
    problem: &TangencyProblem<S>,
    tol: &Tolerance<S>,
) -> Result<TangencySolution<S>, GeomError> {
    let mut alive: Vec<usize> = (0..sols.len()).collect();
    for sel in selectors {
        let prev = alive.clone();
        alive.retain(|&i| matches(sel, i, &prev, sols, problem, tol));
    }
    if alive.len() != 1 {
        return Err(GeomError::AmbiguousSelection(alive.len()));
    }
    Ok(sols[alive[0]].clone())
}
