//! Triangle representation, named centers, cevians, and the associated
//! circles (incircle, excircles, circumcircle, mixtilinear incircles).
//!
//! Centers are evaluated from a fixed table of unnormalized barycentric
//! weights, except the Feuerbach point which is computed geometrically as
//! the incircle / nine-point-circle tangency (the weight formula is
//! poorly conditioned near isoceles shapes).

use crate::apollonius::{self, Constraint, Selector, TangencyProblem};
use crate::error::GeomError;
use crate::geom::{
    dist, intersect_ll, line_through, midpoint, Circle, Line, Point, Tolerance,
};
use crate::scalar::Scalar;

/// Vertex label; side `BC` is opposite `A`, etc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    A,
    B,
    C,
}

impl Vertex {
    pub fn all() -> [Vertex; 3] {
        [Vertex::A, Vertex::B, Vertex::C]
    }

    /// The two other vertices, in cyclic order (A -> (B, C), B -> (C, A), ...).
    pub fn others(self) -> (Vertex, Vertex) {
        match self {
            Vertex::A => (Vertex::B, Vertex::C),
            Vertex::B => (Vertex::C, Vertex::A),
            Vertex::C => (Vertex::A, Vertex::B),
        }
    }
}

/// Named triangle centers, indexed as in the standard center catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CenterKind {
    /// X1
    Incenter,
    /// X2
    Centroid,
    /// X3
    Circumcenter,
    /// X4
    Orthocenter,
    /// X5
    NinePointCenter,
    /// X6
    Symmedian,
    /// X7
    Gergonne,
    /// X8
    Nagel,
    /// X9
    Mittenpunkt,
    /// X10
    Spieker,
    /// X11: incircle / nine-point-circle tangency
    Feuerbach,
    /// X55: internal center of similitude of incircle and circumcircle
    Insimilicenter,
    /// Excenter opposite the given vertex
    Excenter(Vertex),
}

/// Unnormalized barycentric weights with respect to (A, B, C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barycentric<S> {
    pub u: S,
    pub v: S,
    pub w: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<S> {
    pub va: Point<S>,
    pub vb: Point<S>,
    pub vc: Point<S>,
    /// |BC|
    pub a: S,
    /// |CA|
    pub b: S,
    /// |AB|
    pub c: S,
    /// Semiperimeter.
    pub s: S,
    /// Area (always positive).
    pub area: S,
}

/// A cevian: segment from a vertex to its trace on the opposite side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cevian<S> {
    pub vertex: Point<S>,
    pub trace: Point<S>,
    pub line: Line<S>,
}

/// Cevian varieties used throughout the catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CevianKind {
    /// Through the incircle touch point on the opposite side.
    Gergonne,
    /// Through the opposite excircle's touch point (isotomic to Gergonne).
    Nagel,
    Median,
    Bisector,
    Symmedian,
    /// Through a named center.
    ThroughCenter(CenterKind),
}

impl<S: Scalar> Triangle<S> {
    pub fn new(va: Point<S>, vb: Point<S>, vc: Point<S>) -> Result<Self, GeomError> {
        let a = dist(vb, vc);
        let b = dist(vc, va);
        let c = dist(va, vb);
        let scale = a.max_s(b).max_s(c);
        let margin = S::rel_eps() * scale;
        let ok = (b + c - a) > margin && (c + a - b) > margin && (a + b - c) > margin;
        if !ok {
            return Err(GeomError::DegenerateInput(
                "triangle inequality violated within tolerance".into(),
            ));
        }
        let s = (a + b + c).half();
        let area = (s * (s - a) * (s - b) * (s - c)).sqrt();
        Ok(Triangle {
            va,
            vb,
            vc,
            a,
            b,
            c,
            s,
            area,
        })
    }

    /// Canonical coordinate realization of given side lengths:
    /// A = (0,0), B = (c,0), C in the upper half plane.
    pub fn from_sides(a: S, b: S, c: S) -> Result<Self, GeomError> {
        let x = (b.sq() + c.sq() - a.sq()) / (S::two() * c);
        let y2 = b.sq() - x.sq();
        if !(y2 > S::zero()) {
            return Err(GeomError::DegenerateInput(
                "side lengths violate the triangle inequality".into(),
            ));
        }
        Triangle::new(
            Point::new(S::zero(), S::zero()),
            Point::new(c, S::zero()),
            Point::new(x, y2.sqrt()),
        )
    }

    /// Diameter of the figure, the reference for relative tolerances.
    pub fn scale(&self) -> S {
        self.a.max_s(self.b).max_s(self.c)
    }

    pub fn tolerance(&self) -> Tolerance<S> {
        Tolerance::for_scale(self.scale())
    }

    pub fn vertex(&self, v: Vertex) -> Point<S> {
        match v {
            Vertex::A => self.va,
            Vertex::B => self.vb,
            Vertex::C => self.vc,
        }
    }

    /// Side length opposite the vertex.
    pub fn side(&self, v: Vertex) -> S {
        match v {
            Vertex::A => self.a,
            Vertex::B => self.b,
            Vertex::C => self.c,
        }
    }

    /// The side line opposite the vertex.
    pub fn side_line(&self, v: Vertex) -> Result<Line<S>, GeomError> {
        let (p, q) = v.others();
        line_through(self.vertex(p), self.vertex(q), &self.tolerance())
    }

    /// Cartesian point of unnormalized barycentric weights.
    pub fn barycentric_point(&self, w: Barycentric<S>) -> Result<Point<S>, GeomError> {
        let t = w.u + w.v + w.w;
        if t.abs() <= S::rel_eps() * (w.u.abs() + w.v.abs() + w.w.abs()).max_s(S::one()) {
            return Err(GeomError::DegenerateInput(
                "barycentric weights sum to zero".into(),
            ));
        }
        Ok(Point::new(
            (w.u * self.va.x + w.v * self.vb.x + w.w * self.vc.x) / t,
            (w.u * self.va.y + w.v * self.vb.y + w.w * self.vc.y) / t,
        ))
    }

    /// Unnormalized barycentric weights of a center; `None` for the
    /// Feuerbach point, which is computed geometrically.
    pub fn center_weights(&self, kind: CenterKind) -> Option<Barycentric<S>> {
        let (a, b, c, s) = (self.a, self.b, self.c, self.s);
        let (a2, b2, c2) = (a.sq(), b.sq(), c.sq());
        // Conway-style half-cosine factors.
        let sa = b2 + c2 - a2;
        let sb = c2 + a2 - b2;
        let sc = a2 + b2 - c2;
        let w = |u, v, w| Some(Barycentric { u, v, w });
        match kind {
            CenterKind::Incenter => w(a, b, c),
            CenterKind::Centroid => w(S::one(), S::one(), S::one()),
            CenterKind::Circumcenter => w(a2 * sa, b2 * sb, c2 * sc),
            CenterKind::Orthocenter => w(sb * sc, sc * sa, sa * sb),
            CenterKind::NinePointCenter => w(
                a2 * (b2 + c2) - (b2 - c2).sq(),
                b2 * (c2 + a2) - (c2 - a2).sq(),
                c2 * (a2 + b2) - (a2 - b2).sq(),
            ),
            CenterKind::Symmedian => w(a2, b2, c2),
            CenterKind::Gergonne => w((s - b) * (s - c), (s - c) * (s - a), (s - a) * (s - b)),
            CenterKind::Nagel => w(s - a, s - b, s - c),
            CenterKind::Mittenpunkt => w(a * (s - a), b * (s - b), c * (s - c)),
            CenterKind::Spieker => w(b + c, c + a, a + b),
            CenterKind::Insimilicenter => w(a2 * (s - a), b2 * (s - b), c2 * (s - c)),
            CenterKind::Excenter(Vertex::A) => w(-a, b, c),
            CenterKind::Excenter(Vertex::B) => w(a, -b, c),
            CenterKind::Excenter(Vertex::C) => w(a, b, -c),
            CenterKind::Feuerbach => None,
        }
    }

    pub fn center(&self, kind: CenterKind) -> Result<Point<S>, GeomError> {
        match self.center_weights(kind) {
            Some(w) => self.barycentric_point(w),
            None => self.feuerbach_point(),
        }
    }

    /// Incircle / nine-point-circle tangency point: the two circles touch
    /// internally, so the point lies on segment N->I extended to distance
    /// R/2 from N (the nine-point radius).
    fn feuerbach_point(&self) -> Result<Point<S>, GeomError> {
        let i = self.center(CenterKind::Incenter)?;
        let n = self.center(CenterKind::NinePointCenter)?;
        let half_r = self.circumcircle()?.radius.half();
        let d = dist(n, i);
        if !(d > S::zero()) {
            // Equilateral: incircle and nine-point circle coincide.
            return Err(GeomError::DegenerateInput(
                "Feuerbach point undefined for equilateral triangles".into(),
            ));
        }
        Ok(Point::new(
            n.x + (i.x - n.x) / d * half_r,
            n.y + (i.y - n.y) / d * half_r,
        ))
    }

    /// Incircle touch point on the side opposite `v`; for v = A (side BC)
    /// the distances are |B,touch| = s-b and |C,touch| = s-c.
    pub fn touch_point(&self, v: Vertex) -> Point<S> {
        let (p, q) = v.others();
        let from = self.vertex(p);
        let to = self.vertex(q);
        let len = self.side(v);
        let t = (self.s - self.side(p)) / len;
        Point::new(from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t)
    }

    /// Touch point of the excircle opposite `v` on side opposite `v`
    /// (the Nagel trace), isotomic to the incircle touch point.
    pub fn nagel_trace(&self, v: Vertex) -> Point<S> {
        let (p, q) = v.others();
        let from = self.vertex(p);
        let to = self.vertex(q);
        let t = (self.s - self.side(q)) / self.side(v);
        Point::new(from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t)
    }

    pub fn cevian(&self, v: Vertex, kind: CevianKind) -> Result<Cevian<S>, GeomError> {
        let apex = self.vertex(v);
        let (p, q) = v.others();
        let from = self.vertex(p);
        let to = self.vertex(q);
        let trace = match kind {
            CevianKind::Gergonne => self.touch_point(v),
            CevianKind::Nagel => self.nagel_trace(v),
            CevianKind::Median => midpoint(from, to),
            CevianKind::Bisector | CevianKind::Symmedian => {
                // Trace divides the opposite side from `p` in ratio
                // side(q) : side(p), squared for the symmedian.
                let (mut wp, mut wq) = (self.side(q), self.side(p));
                if matches!(kind, CevianKind::Symmedian) {
                    wp = wp.sq();
                    wq = wq.sq();
                }
                let t = wp / (wp + wq);
                Point::new(from.x + (to.x - from.x) * t, from.y + (to.y - from.y) * t)
            }
            CevianKind::ThroughCenter(center) => {
                let tol = self.tolerance();
                let through = line_through(apex, self.center(center)?, &tol)?;
                intersect_ll(&through, &self.side_line(v)?, &tol)?
            }
        };
        let line = line_through(apex, trace, &self.tolerance())?;
        Ok(Cevian {
            vertex: apex,
            trace,
            line,
        })
    }

    pub fn incircle(&self) -> Result<Circle<S>, GeomError> {
        Ok(Circle {
            center: self.center(CenterKind::Incenter)?,
            radius: self.area / self.s,
        })
    }

    pub fn circumcircle(&self) -> Result<Circle<S>, GeomError> {
        Ok(Circle {
            center: self.center(CenterKind::Circumcenter)?,
            radius: self.a * self.b * self.c / (S::from_i64(4) * self.area),
        })
    }

    pub fn nine_point_circle(&self) -> Result<Circle<S>, GeomError> {
        Ok(Circle {
            center: self.center(CenterKind::NinePointCenter)?,
            radius: self.circumcircle()?.radius.half(),
        })
    }

    pub fn excircle(&self, v: Vertex) -> Result<Circle<S>, GeomError> {
        Ok(Circle {
            center: self.center(CenterKind::Excenter(v))?,
            radius: self.area / (self.s - self.side(v)),
        })
    }

    /// Mixtilinear incircle at `v`: tangent to the two sides through `v`
    /// and internally tangent to the circumcircle. Returns the circle,
    /// its touch point on the circumcircle, and the touch points on the
    /// two sides (in the cyclic order of `v.others()`).
    pub fn mixtilinear_incircle(
        &self,
        v: Vertex,
    ) -> Result<(Circle<S>, Point<S>, [Point<S>; 2]), GeomError> {
        let apex = self.vertex(v);
        let (p, q) = v.others();
        let tol = self.tolerance();
        let lp = line_through(apex, self.vertex(p), &tol)?;
        let lq = line_through(apex, self.vertex(q), &tol)?;
        let circum = self.circumcircle()?;
        let prob = TangencyProblem {
            constraints: [
                Constraint::Line(lp),
                Constraint::Line(lq),
                Constraint::Circle(circum),
            ],
        };
        let sols = apollonius::solve(&prob, &tol)?;
        let sel = [
            Selector::InsideAngle {
                v: apex,
                p: self.vertex(p),
                q: self.vertex(q),
            },
            Selector::Internal,
            Selector::Nearest(apex),
        ];
        let hit = apollonius::select(&sols, &sel, &prob, &tol)?;
        let mut touch_p = None;
        let mut touch_q = None;
        let mut touch_c = None;
        for (i, pt) in &hit.touch_points {
            match i {
                0 => touch_p = Some(*pt),
                1 => touch_q = Some(*pt),
                _ => touch_c = Some(*pt),
            }
        }
        match (touch_c, touch_p, touch_q) {
            (Some(tc), Some(tp), Some(tq)) => Ok((hit.circle, tc, [tp, tq])),
            _ => Err(GeomError::SolverFailure(
                "mixtilinear tangency points missing".into(),
            )),
        }
    }

    /// Triangle of the three incircle touch points.
    pub fn intouch_triangle(&self) -> Result<Triangle<S>, GeomError> {
        Triangle::new(
            self.touch_point(Vertex::A),
            self.touch_point(Vertex::B),
            self.touch_point(Vertex::C),
        )
    }

    /// Triangle of the feet of the altitudes.
    pub fn orthic_triangle(&self) -> Result<Triangle<S>, GeomError> {
        let foot_of = |v: Vertex| -> Result<Point<S>, GeomError> {
            Ok(crate::geom::foot(self.vertex(v), &self.side_line(v)?))
        };
        Triangle::new(foot_of(Vertex::A)?, foot_of(Vertex::B)?, foot_of(Vertex::C)?)
    }
}
