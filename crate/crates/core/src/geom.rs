//! Planar kernel: points, lines, circles, intersections and predicates.
//!
//! Every tolerance is relative to the figure scale (diameter of the
//! starting triangle), which makes the whole engine unit-free. At fast
//! precision the relative epsilon is 1e-10, at confirm precision 1e-24;
//! see [`crate::scalar::Scalar::rel_eps`].

use crate::error::GeomError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

/// Line {(x,y) : ax + by + c = 0}, normalized to a^2 + b^2 = 1 with the
/// sign fixed so (a, b) is lexicographically >= (-a, -b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<S> {
    pub center: Point<S>,
    pub radius: S,
}

/// Output of a construction step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeoObject<S> {
    Point(Point<S>),
    Line(Line<S>),
    Circle(Circle<S>),
    Scalar(S),
}

impl<S: Scalar> GeoObject<S> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GeoObject::Point(_) => "point",
            GeoObject::Line(_) => "line",
            GeoObject::Circle(_) => "circle",
            GeoObject::Scalar(_) => "scalar",
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GeoObject::Point(p) => p.x.is_finite() && p.y.is_finite(),
            GeoObject::Line(l) => l.a.is_finite() && l.b.is_finite() && l.c.is_finite(),
            GeoObject::Circle(c) => {
                c.center.x.is_finite() && c.center.y.is_finite() && c.radius.is_finite()
            }
            GeoObject::Scalar(v) => v.is_finite(),
        }
    }
}

/// Relative tolerance bundle: `eps` is the precision's relative epsilon,
/// `scale` the diameter of the current figure.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<S> {
    pub eps: S,
    pub scale: S,
}

impl<S: Scalar> Tolerance<S> {
    pub fn for_scale(scale: S) -> Self {
        Tolerance {
            eps: S::rel_eps(),
            scale,
        }
    }

    /// Absolute tolerance for quantities with units of length.
    pub fn len(&self) -> S {
        self.eps * self.scale
    }

    /// Absolute tolerance for quantities with units of area.
    pub fn area(&self) -> S {
        self.eps * self.scale * self.scale
    }

    /// Tolerance for dimensionless quantities (unit-vector dots etc).
    pub fn dimensionless(&self) -> S {
        self.eps
    }
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Point::new(S::from_f64(x), S::from_f64(y))
    }
}

pub fn dist<S: Scalar>(p: Point<S>, q: Point<S>) -> S {
    (p.x - q.x).hypot_s(p.y - q.y)
}

pub fn midpoint<S: Scalar>(p: Point<S>, q: Point<S>) -> Point<S> {
    Point::new((p.x + q.x).half(), (p.y + q.y).half())
}

/// Twice the signed area of triangle PQR (positive when counterclockwise).
pub fn cross2<S: Scalar>(p: Point<S>, q: Point<S>, r: Point<S>) -> S {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

pub fn signed_area<S: Scalar>(p: Point<S>, q: Point<S>, r: Point<S>) -> S {
    cross2(p, q, r).half()
}

/// Interior angle at vertex `q` of the path p-q-r, in (0, pi).
pub fn angle<S: Scalar>(p: Point<S>, q: Point<S>, r: Point<S>) -> Result<S, GeomError> {
    let (ux, uy) = (p.x - q.x, p.y - q.y);
    let (vx, vy) = (r.x - q.x, r.y - q.y);
    let nu = ux.hypot_s(uy);
    let nv = vx.hypot_s(vy);
    if !(nu > S::zero()) || !(nv > S::zero()) {
        return Err(GeomError::DegenerateInput("angle at coincident points".into()));
    }
    let c = (ux * vx + uy * vy) / (nu * nv);
    Ok(c.acos())
}

impl<S: Scalar> Line<S> {
    /// Normalize raw coefficients; errors when a = b = 0.
    pub fn new(a: S, b: S, c: S) -> Result<Self, GeomError> {
        let n = a.hypot_s(b);
        if !(n > S::zero()) {
            return Err(GeomError::DegenerateInput("zero normal line".into()));
        }
        let (mut a, mut b, mut c) = (a / n, b / n, c / n);
        // Sign convention: (a, b) lexicographically >= (-a, -b).
        let flip = a < S::zero() || (a == S::zero() && b < S::zero());
        if flip {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(Line { a, b, c })
    }

    /// Signed distance from a point to the line.
    pub fn signed_dist(&self, p: Point<S>) -> S {
        self.a * p.x + self.b * p.y + self.c
    }

    /// Unit direction vector of the line.
    pub fn direction(&self) -> (S, S) {
        (-self.b, self.a)
    }
}

pub fn line_through<S: Scalar>(
    p: Point<S>,
    q: Point<S>,
    tol: &Tolerance<S>,
) -> Result<Line<S>, GeomError> {
    if dist(p, q) <= tol.len() {
        return Err(GeomError::DegenerateInput(
            "line through coincident points".into(),
        ));
    }
    // Normal is the rotated direction; c fixed by incidence at p.
    let a = q.y - p.y;
    let b = p.x - q.x;
    let c = -(a * p.x + b * p.y);
    Line::new(a, b, c)
}

pub fn intersect_ll<S: Scalar>(
    l1: &Line<S>,
    l2: &Line<S>,
    tol: &Tolerance<S>,
) -> Result<Point<S>, GeomError> {
    let det = l1.a * l2.b - l2.a * l1.b;
    if det.abs() <= tol.dimensionless() {
        return Err(GeomError::ParallelLines);
    }
    let x = (l1.b * l2.c - l2.b * l1.c) / det;
    let y = (l2.a * l1.c - l1.a * l2.c) / det;
    Ok(Point::new(x, y))
}

/// Order two points by (x, then y) ascending.
fn ordered<S: Scalar>(p: Point<S>, q: Point<S>) -> Vec<Point<S>> {
    if (p.x, p.y) <= (q.x, q.y) {
        vec![p, q]
    } else {
        vec![q, p]
    }
}

pub fn intersect_lc<S: Scalar>(l: &Line<S>, c: &Circle<S>, tol: &Tolerance<S>) -> Vec<Point<S>> {
    let d = l.signed_dist(c.center);
    let f = Point::new(c.center.x - l.a * d, c.center.y - l.b * d);
    if (d.abs() - c.radius).abs() <= tol.len() {
        return vec![f]; // tangency
    }
    if d.abs() > c.radius {
        return vec![];
    }
    let h = (c.radius * c.radius - d * d).sqrt();
    let (dx, dy) = l.direction();
    ordered(
        Point::new(f.x - dx * h, f.y - dy * h),
        Point::new(f.x + dx * h, f.y + dy * h),
    )
}

pub fn intersect_cc<S: Scalar>(
    c1: &Circle<S>,
    c2: &Circle<S>,
    tol: &Tolerance<S>,
) -> Result<Vec<Point<S>>, GeomError> {
    let d = dist(c1.center, c2.center);
    if d <= tol.len() && (c1.radius - c2.radius).abs() <= tol.len() {
        return Err(GeomError::CoincidentCircles);
    }
    if d <= tol.len() {
        return Ok(vec![]); // concentric, distinct radii
    }
    // Radical line, then reuse the line/circle case.
    let a = (c2.center.x - c1.center.x) * S::two();
    let b = (c2.center.y - c1.center.y) * S::two();
    let k = |p: Point<S>, r: S| p.x * p.x + p.y * p.y - r * r;
    let c = k(c1.center, c1.radius) - k(c2.center, c2.radius);
    let radical = Line::new(a, b, c)?;
    Ok(intersect_lc(&radical, c1, tol))
}

pub fn foot<S: Scalar>(p: Point<S>, l: &Line<S>) -> Point<S> {
    let d = l.signed_dist(p);
    Point::new(p.x - l.a * d, p.y - l.b * d)
}

pub fn reflect<S: Scalar>(p: Point<S>, l: &Line<S>) -> Point<S> {
    let d = l.signed_dist(p);
    Point::new(p.x - l.a * d * S::two(), p.y - l.b * d * S::two())
}

pub fn parallel_through<S: Scalar>(p: Point<S>, l: &Line<S>) -> Result<Line<S>, GeomError> {
    Line::new(l.a, l.b, -(l.a * p.x + l.b * p.y))
}

pub fn perpendicular_through<S: Scalar>(p: Point<S>, l: &Line<S>) -> Result<Line<S>, GeomError> {
    // Normal of the perpendicular is the direction of l.
    let (a, b) = l.direction();
    Line::new(a, b, -(a * p.x + b * p.y))
}

// ---------------------------------------------------------------------------
// Predicates. Each is a residual comparison against the relative tolerance;
// callers wanting dual-precision confirmation re-evaluate the construction
// at confirm precision and call these again.
// ---------------------------------------------------------------------------

pub fn collinear<S: Scalar>(p: Point<S>, q: Point<S>, r: Point<S>, tol: &Tolerance<S>) -> bool {
    cross2(p, q, r).abs() <= tol.area()
}

pub fn concurrent<S: Scalar>(l1: &Line<S>, l2: &Line<S>, l3: &Line<S>, tol: &Tolerance<S>) -> bool {
    let det = l1.a * (l2.b * l3.c - l3.b * l2.c) - l1.b * (l2.a * l3.c - l3.a * l2.c)
        + l1.c * (l2.a * l3.b - l3.a * l2.b);
    det.abs() <= tol.len()
}

pub fn is_parallel<S: Scalar>(l1: &Line<S>, l2: &Line<S>, tol: &Tolerance<S>) -> bool {
    (l1.a * l2.b - l2.a * l1.b).abs() <= tol.dimensionless()
}

pub fn is_perpendicular<S: Scalar>(l1: &Line<S>, l2: &Line<S>, tol: &Tolerance<S>) -> bool {
    (l1.a * l2.a + l1.b * l2.b).abs() <= tol.dimensionless()
}

pub fn on_line<S: Scalar>(p: Point<S>, l: &Line<S>, tol: &Tolerance<S>) -> bool {
    l.signed_dist(p).abs() <= tol.len()
}

pub fn on_circle<S: Scalar>(p: Point<S>, c: &Circle<S>, tol: &Tolerance<S>) -> bool {
    (dist(p, c.center) - c.radius).abs() <= tol.len()
}

pub fn tangent_lc<S: Scalar>(l: &Line<S>, c: &Circle<S>, tol: &Tolerance<S>) -> bool {
    (l.signed_dist(c.center).abs() - c.radius).abs() <= tol.len()
}

pub fn tangent_cc<S: Scalar>(c1: &Circle<S>, c2: &Circle<S>, tol: &Tolerance<S>) -> bool {
    let d = dist(c1.center, c2.center);
    let ext = (d - (c1.radius + c2.radius)).abs();
    let int = (d - (c1.radius - c2.radius).abs()).abs();
    ext.min_s(int) <= tol.len()
}

pub fn coincide<S: Scalar>(p: Point<S>, q: Point<S>, tol: &Tolerance<S>) -> bool {
    dist(p, q) <= tol.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dd;

    fn p(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn tol() -> Tolerance<f64> {
        Tolerance::for_scale(1.0)
    }

    #[test]
    fn line_axis_cases() {
        let l = line_through(p(0.0, 0.0), p(1.0, 0.0), &tol()).unwrap();
        // y = 0, normalized: (a,b,c) = (0,1,0) up to the sign convention.
        assert!(l.a.abs() < 1e-15 && (l.b.abs() - 1.0).abs() < 1e-15 && l.c.abs() < 1e-15);
        let l = line_through(p(0.0, 0.0), p(0.0, 1.0), &tol()).unwrap();
        assert!((l.a.abs() - 1.0).abs() < 1e-15 && l.b.abs() < 1e-15 && l.c.abs() < 1e-15);
    }

    #[test]
    fn line_diagonal_normalized() {
        // Through (0,0),(1,1): a = -b, |a| = 1/sqrt(2), c = 0.
        let l = line_through(p(0.0, 0.0), p(1.0, 1.0), &tol()).unwrap();
        assert!((l.a + l.b).abs() < 1e-15);
        assert!((l.a.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(l.c.abs() < 1e-15);
        assert!((l.a * l.a + l.b * l.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_through_coincident_rejected() {
        assert!(matches!(
            line_through(p(0.5, 0.5), p(0.5, 0.5), &tol()),
            Err(GeomError::DegenerateInput(_))
        ));
    }

    #[test]
    fn intersect_lines() {
        let x0 = line_through(p(0.0, 0.0), p(0.0, 1.0), &tol()).unwrap();
        let y0 = line_through(p(0.0, 0.0), p(1.0, 0.0), &tol()).unwrap();
        let q = intersect_ll(&x0, &y0, &tol()).unwrap();
        assert!(dist(q, p(0.0, 0.0)) < 1e-15);

        let diag = line_through(p(1.0, 0.0), p(0.0, 1.0), &tol()).unwrap();
        let q = intersect_ll(&y0, &diag, &tol()).unwrap();
        assert!(dist(q, p(1.0, 0.0)) < 1e-14);

        let y1 = line_through(p(0.0, 1.0), p(1.0, 1.0), &tol()).unwrap();
        assert_eq!(intersect_ll(&y0, &y1, &tol()), Err(GeomError::ParallelLines));
    }

    #[test]
    fn intersect_line_circle() {
        let unit = Circle {
            center: p(0.0, 0.0),
            radius: 1.0,
        };
        let y0 = line_through(p(0.0, 0.0), p(1.0, 0.0), &tol()).unwrap();
        let pts = intersect_lc(&y0, &unit, &tol());
        assert_eq!(pts.len(), 2);
        assert!(dist(pts[0], p(-1.0, 0.0)) < 1e-14);
        assert!(dist(pts[1], p(1.0, 0.0)) < 1e-14);

        let y1 = line_through(p(0.0, 1.0), p(1.0, 1.0), &tol()).unwrap();
        let pts = intersect_lc(&y1, &unit, &tol());
        assert_eq!(pts.len(), 1);
        assert!(dist(pts[0], p(0.0, 1.0)) < 1e-14);

        let y2 = line_through(p(0.0, 2.0), p(1.0, 2.0), &tol()).unwrap();
        assert!(intersect_lc(&y2, &unit, &tol()).is_empty());
    }

    #[test]
    fn intersect_circles() {
        let c = |x: f64, r: f64| Circle {
            center: p(x, 0.0),
            radius: r,
        };
        // Tangent pair.
        let pts = intersect_cc(&c(0.0, 1.0), &c(2.0, 1.0), &tol()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(dist(pts[0], p(1.0, 0.0)) < 1e-12);
        // Transversal pair: (1/2, +-sqrt(3)/2), derived from the radical
        // line x = 1/2 and the unit circle.
        let pts = intersect_cc(&c(0.0, 1.0), &c(1.0, 1.0), &tol()).unwrap();
        assert_eq!(pts.len(), 2);
        let h = (3.0f64).sqrt() / 2.0;
        assert!(dist(pts[0], p(0.5, -h)) < 1e-14);
        assert!(dist(pts[1], p(0.5, h)) < 1e-14);
        for q in pts {
            assert!((dist(q, p(0.0, 0.0)) - 1.0).abs() < 1e-14);
            assert!((dist(q, p(1.0, 0.0)) - 1.0).abs() < 1e-14);
        }
        // Disjoint.
        assert!(intersect_cc(&c(0.0, 1.0), &c(3.0, 1.0), &tol()).unwrap().is_empty());
        // Coincident.
        assert_eq!(
            intersect_cc(&c(0.0, 1.0), &c(0.0, 1.0), &tol()),
            Err(GeomError::CoincidentCircles)
        );
    }

    #[test]
    fn foot_midpoint_reflect() {
        let y0 = line_through(p(0.0, 0.0), p(1.0, 0.0), &tol()).unwrap();
        assert!(dist(foot(p(1.0, 1.0), &y0), p(1.0, 0.0)) < 1e-15);
        assert!(dist(midpoint(p(0.0, 0.0), p(2.0, 4.0)), p(1.0, 2.0)) < 1e-15);
        assert!(dist(reflect(p(0.0, 1.0), &y0), p(0.0, -1.0)) < 1e-15);
    }

    #[test]
    fn measures() {
        assert!((signed_area(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)) - 0.5).abs() < 1e-15);
        let a = angle(p(1.0, 0.0), p(0.0, 0.0), p(0.0, 1.0)).unwrap();
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((dist(p(0.0, 0.0), p(3.0, 4.0)) - 5.0).abs() < 1e-15);
        assert!(angle(p(0.0, 0.0), p(0.0, 0.0), p(1.0, 1.0)).is_err());
    }

    #[test]
    fn predicate_cases() {
        let t = tol();
        assert!(collinear(p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), &t));
        assert!(!collinear(p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.1), &t));
        let unit = Circle {
            center: p(0.0, 0.0),
            radius: 1.0,
        };
        let y1 = line_through(p(0.0, 1.0), p(1.0, 1.0), &t).unwrap();
        assert!(tangent_lc(&y1, &unit, &t));
        let x0 = line_through(p(0.0, 0.0), p(0.0, 1.0), &t).unwrap();
        let y0 = line_through(p(0.0, 0.0), p(1.0, 0.0), &t).unwrap();
        assert!(is_perpendicular(&x0, &y0, &t));
        assert!(!is_parallel(&x0, &y0, &t));
    }

    #[test]
    fn parallel_perpendicular_through() {
        let t = tol();
        let y0 = line_through(p(0.0, 0.0), p(1.0, 0.0), &t).unwrap();
        let par = parallel_through(p(0.5, 2.0), &y0).unwrap();
        assert!(is_parallel(&par, &y0, &t));
        assert!(on_line(p(0.5, 2.0), &par, &t));
        let perp = perpendicular_through(p(0.5, 2.0), &y0).unwrap();
        assert!(is_perpendicular(&perp, &y0, &t));
        assert!(on_line(p(0.5, 2.0), &perp, &t));
    }

    #[test]
    fn kernel_works_at_confirm_precision() {
        use crate::scalar::Scalar;
        let t: Tolerance<Dd> = Tolerance::for_scale(Dd::from_f64(1.0));
        let a = Point::new(Dd::from_f64(0.0), Dd::from_f64(0.0));
        let b = Point::new(Dd::from_f64(1.0), Dd::from_f64(0.0));
        let c = Point::new(Dd::from_f64(0.3), Dd::from_f64(0.9));
        let ab = line_through(a, b, &t).unwrap();
        let f = foot(c, &ab);
        // Residuals at confirm precision stay under 1e-24.
        assert!(ab.signed_dist(f).abs().to_f64() < 1e-28);
        let perp = line_through(c, f, &t).unwrap();
        assert!(is_perpendicular(&perp, &ab, &t));
    }
}
