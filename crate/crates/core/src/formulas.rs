//! Closed-form quantities of the Gergonne configuration, stated purely
//! over side lengths.
//!
//! Every formula here has an independent geometric oracle: the same
//! quantity measured on a coordinate realization of the triangle. The
//! tests cross-check formula against measurement at both precisions, so
//! the algebra and the geometry validate each other.
//!
//! All vertex/side variants go through one relabeling function instead of
//! per-formula cyclic copies: each formula is written for the base
//! labeling (vertex A, side BC) and callers relabel first.

use crate::error::GeomError;
use crate::scalar::Scalar;
use crate::triangle::Vertex;

/// Side lengths (a, b, c) of a valid triangle; the unit of account for
/// every closed form in this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTriple<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Scalar> SideTriple<S> {
    pub fn new(a: S, b: S, c: S) -> Result<Self, GeomError> {
        let scale = a.max_s(b).max_s(c);
        let margin = S::rel_eps() * scale;
        if !(a > S::zero() && b > S::zero() && c > S::zero())
            || !((b + c - a) > margin && (c + a - b) > margin && (a + b - c) > margin)
        {
            return Err(GeomError::DegenerateInput(
                "side lengths violate the strict triangle inequality".into(),
            ));
        }
        Ok(SideTriple { a, b, c })
    }

    /// Semiperimeter.
    pub fn s(&self) -> S {
        (self.a + self.b + self.c).half()
    }

    /// The recurring denominator Q = a^2+b^2+c^2-2ab-2bc-2ca, negative
    /// for every valid triangle.
    pub fn q(&self) -> S {
        let (a, b, c) = (self.a, self.b, self.c);
        a.sq() + b.sq() + c.sq()
            - S::two() * (a * b + b * c + c * a)
    }

    /// Heron area K.
    pub fn heron_area(&self) -> S {
        let s = self.s();
        (s * (s - self.a) * (s - self.b) * (s - self.c)).sqrt()
    }

    /// Cyclic relabeling that moves `v` into the A slot
    /// (A -> identity, B -> (b,c,a), C -> (c,a,b)).
    pub fn relabel(&self, v: Vertex) -> SideTriple<S> {
        match v {
            Vertex::A => *self,
            Vertex::B => SideTriple {
                a: self.b,
                b: self.c,
                c: self.a,
            },
            Vertex::C => SideTriple {
                a: self.c,
                b: self.a,
                c: self.b,
            },
        }
    }

    /// Mirror relabeling (swap B and C); composes with [`Self::relabel`]
    /// to reach all six labelings.
    pub fn mirror(&self) -> SideTriple<S> {
        SideTriple {
            a: self.a,
            b: self.c,
            c: self.b,
        }
    }

    /// Relabeling that moves the ordered pair (v1, v2) into (A, B).
    /// Odd permutations mirror the triangle, which no length formula
    /// can observe.
    pub fn relabel_pair(&self, v1: Vertex, v2: Vertex) -> Result<SideTriple<S>, GeomError> {
        let (a, b, c) = (self.a, self.b, self.c);
        let (na, nb, nc) = match (v1, v2) {
            (Vertex::A, Vertex::B) => (a, b, c),
            (Vertex::A, Vertex::C) => (a, c, b),
            (Vertex::B, Vertex::C) => (b, c, a),
            (Vertex::B, Vertex::A) => (b, a, c),
            (Vertex::C, Vertex::A) => (c, a, b),
            (Vertex::C, Vertex::B) => (c, b, a),
            _ => {
                return Err(GeomError::DegenerateInput(
                    "vertex pair must be distinct".into(),
                ))
            }
        };
        Ok(SideTriple {
            a: na,
            b: nb,
            c: nc,
        })
    }

    /// Distance from `v` to the Gergonne point:
    /// sqrt( a(b+c-a)^3 (a(a+b+c) - 2(b-c)^2) ) / |Q| for v = A.
    pub fn spoke_distance(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let (a, b, c) = (t.a, t.b, t.c);
        let num = a * (b + c - a) * (b + c - a).sq() * (a * (a + b + c) - S::two() * (b - c).sq());
        num.sqrt() / t.q().abs()
    }

    /// Ratio of Gergonne-point distances |v1 D| / |v2 D| in the paper's
    /// radical form (for (A, B)):
    /// (b+c-a)/(c+a-b) * sqrt( a(b+c-a) g(a,b,c) / (b(c+a-b) g(b,c,a)) )
    /// with g(a,b,c) = a^2 + ab - 2b^2 + ac + 4bc - 2c^2.
    pub fn tripolar_ratio(&self, v1: Vertex, v2: Vertex) -> Result<S, GeomError> {
        let t = self.relabel_pair(v1, v2)?;
        let (a, b, c) = (t.a, t.b, t.c);
        let g = |a: S, b: S, c: S| {
            a.sq() + a * b - S::two() * b.sq() + a * c + S::from_i64(4) * b * c - S::two() * c.sq()
        };
        let num = a * (b + c - a) * g(a, b, c);
        let den = b * (c + a - b) * g(b, c, a);
        Ok((b + c - a) / (c + a - b) * (num / den).sqrt())
    }

    /// Sub-area ratio [BDC]/[CDA] = (c+a-b)/(b+c-a) for the Gergonne
    /// point D.
    pub fn barycentric_area_ratio(&self) -> S {
        let (a, b, c) = (self.a, self.b, self.c);
        (c + a - b) / (b + c - a)
    }

    /// Sub-area cut off toward the side opposite `v`:
    /// [BCD] = (a+b-c)(a-b+c) / (-Q) * K for v = A.
    pub fn gergonne_subarea(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let (a, b, c) = (t.a, t.b, t.c);
        (a + b - c) * (a - b + c) / (-t.q()) * t.heron_area()
    }

    /// Distances from the two side endpoints to the touch point on the
    /// side opposite `v`: (BE, CE) = (s-b, s-c) for v = A.
    pub fn trace_lengths(&self, v: Vertex) -> (S, S) {
        let t = self.relabel(v);
        let s = t.s();
        (s - t.b, s - t.c)
    }

    /// Division ratio AD/DE of the Gergonne cevian from `v` by the
    /// Gergonne point: a(s-a) / ((s-b)(s-c)).
    pub fn cevian_division(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let s = t.s();
        t.a * (s - t.a) / ((s - t.b) * (s - t.c))
    }

    /// Length AE of the Gergonne cevian from `v`:
    /// AE^2 = (s-a)(as - (b-c)^2) / a.
    pub fn cevian_length(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let s = t.s();
        ((s - t.a) * (t.a * s - (t.b - t.c).sq()) / t.a).sqrt()
    }

    /// Pararadius from the Gergonne point D parallel to the side
    /// opposite `v`, ending on the relabeled side CA:
    /// x = DE = -a(a+b-c)(b+c-a) / Q.
    pub fn pararadius(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let (a, b, c) = (t.a, t.b, t.c);
        -a * (a + b - c) * (b + c - a) / t.q()
    }

    /// AE/DE for the pararadius configuration: b/(s-c).
    pub fn parallel_ratio(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        t.b / (t.s() - t.c)
    }

    /// The two segments the pararadius endpoint E cuts on side CA:
    /// AE = 2ab(a-b-c)/Q, CE = b(b^2+c^2-a^2-2bc)/Q.
    pub fn pararadius_split(&self, v: Vertex) -> (S, S) {
        let t = self.relabel(v);
        let (a, b, c) = (t.a, t.b, t.c);
        let q = t.q();
        let ae = S::two() * a * b * (a - b - c) / q;
        let ce = b * (b.sq() + c.sq() - a.sq() - S::two() * b * c) / q;
        (ae, ce)
    }

    /// Full parachord through D parallel to the side opposite `v`:
    /// FG = 2a^2(a-b-c)/Q.
    pub fn parachord(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let (a, b, c) = (t.a, t.b, t.c);
        S::two() * a.sq() * (a - b - c) / t.q()
    }

    /// Perpendicular distance from the Gergonne point to the side
    /// opposite `v`: DE = 8(s-b)(s-c)K / (a * (-Q)).
    pub fn apothem(&self, v: Vertex) -> S {
        let t = self.relabel(v);
        let s = t.s();
        S::from_i64(8) * (s - t.b) * (s - t.c) * t.heron_area() / (t.a * (-t.q()))
    }

    /// Ratio of apothems to the sides opposite v1 and v2:
    /// DE/DF = b(c+a-b) / (a(b+c-a)) for (A, B).
    pub fn trilinear_ratio(&self, v1: Vertex, v2: Vertex) -> Result<S, GeomError> {
        let t = self.relabel_pair(v1, v2)?;
        let (a, b, c) = (t.a, t.b, t.c);
        Ok(b * (c + a - b) / (a * (b + c - a)))
    }

    /// Residual of the Gergonne chord identity
    /// (s-a)/(s-b) * n/m + (s-a)/(s-c) * q/p - 1,
    /// where a chord through the Gergonne point cuts AB into m = AE,
    /// n = EB and AC into p = AF, q = FC. Zero (to confirm precision)
    /// exactly when the chord passes through the Gergonne point.
    pub fn chord_residual(&self, m: S, n: S, p: S, q: S) -> S {
        let s = self.s();
        (s - self.a) / (s - self.b) * (n / m) + (s - self.a) / (s - self.c) * (q / p) - S::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dist, foot, intersect_ll, line_through, parallel_through, Point};
    use crate::scalar::Dd;
    use crate::triangle::{CenterKind, Triangle};
    use proptest::prelude::*;

    /// Geometric measurements on a coordinate realization; the oracle
    /// side of every formula-vs-geometry check.
    struct Oracle<S: Scalar> {
        t: Triangle<S>,
        d: Point<S>,
    }

    impl<S: Scalar> Oracle<S> {
        fn new(sides: SideTriple<S>) -> Self {
            let t = Triangle::from_sides(sides.a, sides.b, sides.c).unwrap();
            let d = t.center(CenterKind::Gergonne).unwrap();
            Oracle { t, d }
        }

        fn spoke(&self, v: Vertex) -> S {
            dist(self.t.vertex(v), self.d)
        }

        /// Sub-area of the triangle (other two vertices, D).
        fn subarea(&self, v: Vertex) -> S {
            let (p, q) = v.others();
            crate::geom::signed_area(self.t.vertex(p), self.t.vertex(q), self.d).abs()
        }

        fn cevian_len(&self, v: Vertex) -> S {
            dist(self.t.vertex(v), self.t.touch_point(v))
        }

        fn cevian_div(&self, v: Vertex) -> S {
            dist(self.t.vertex(v), self.d) / dist(self.d, self.t.touch_point(v))
        }

        /// Pararadius endpoint: parallel[D, side opposite v] meets the
        /// relabeled side CA.
        fn pararadius_endpoint(&self, v: Vertex) -> Point<S> {
            let tol = self.t.tolerance();
            let (_, vc) = v.others();
            let par = parallel_through(self.d, &self.t.side_line(v).unwrap()).unwrap();
            // Relabeled side CA = (old C', old A') with A' = v, C' = second other.
            let ca = line_through(self.t.vertex(vc), self.t.vertex(v), &tol).unwrap();
            intersect_ll(&par, &ca, &tol).unwrap()
        }

        fn apothem_len(&self, v: Vertex) -> S {
            let side = self.t.side_line(v).unwrap();
            dist(self.d, foot(self.d, &side))
        }
    }

    fn check_all_formulas<S: Scalar>(sides: SideTriple<S>, rel_tol: f64) {
        let o = Oracle::new(sides);
        let scale = sides.a.max_s(sides.b).max_s(sides.c).to_f64();
        let close = |got: S, want: S, what: &str| {
            let err = (got - want).abs().to_f64() / scale.max(want.abs().to_f64());
            assert!(err <= rel_tol, "{what}: formula {got:?} vs geometry {want:?}");
        };
        for v in Vertex::all() {
            close(sides.spoke_distance(v), o.spoke(v), "spoke");
            close(sides.gergonne_subarea(v), o.subarea(v), "subarea");
            close(sides.cevian_length(v), o.cevian_len(v), "cevian length");
            close(sides.cevian_division(v), o.cevian_div(v), "cevian division");
            let e = o.pararadius_endpoint(v);
            close(sides.pararadius(v), dist(o.d, e), "pararadius");
            close(
                sides.parallel_ratio(v),
                dist(o.t.vertex(v), e) / dist(o.d, e),
                "parallel ratio",
            );
            let (ae, ce) = sides.pararadius_split(v);
            close(ae, dist(o.t.vertex(v), e), "pararadius split AE");
            close(ce, dist(o.t.vertex(v.others().1), e), "pararadius split CE");
            close(sides.apothem(v), o.apothem_len(v), "apothem");
            let (be, ce) = sides.trace_lengths(v);
            let touch = o.t.touch_point(v);
            close(be, dist(o.t.vertex(v.others().0), touch), "trace BE");
            close(ce, dist(o.t.vertex(v.others().1), touch), "trace CE");
        }
        close(
            sides.barycentric_area_ratio(),
            o.subarea(Vertex::A) / o.subarea(Vertex::B),
            "barycentric ratio",
        );
        for (v1, v2) in [
            (Vertex::A, Vertex::B),
            (Vertex::A, Vertex::C),
            (Vertex::B, Vertex::C),
        ] {
            close(
                sides.tripolar_ratio(v1, v2).unwrap(),
                o.spoke(v1) / o.spoke(v2),
                "tripolar ratio",
            );
            close(
                sides.trilinear_ratio(v1, v2).unwrap(),
                o.apothem_len(v1) / o.apothem_len(v2),
                "trilinear ratio",
            );
        }
    }

    #[test]
    fn equilateral_values() {
        let t = SideTriple::new(1.0, 1.0, 1.0).unwrap();
        let s3 = 3.0f64.sqrt();
        assert!((t.spoke_distance(Vertex::A) - s3 / 3.0).abs() < 1e-14);
        assert!((t.gergonne_subarea(Vertex::A) - s3 / 12.0).abs() < 1e-14);
        assert!((t.pararadius(Vertex::A) - 1.0 / 3.0).abs() < 1e-14);
        assert!((t.parachord(Vertex::A) - 2.0 / 3.0).abs() < 1e-14);
        assert!((t.parallel_ratio(Vertex::A) - 2.0).abs() < 1e-14);
        assert!((t.apothem(Vertex::A) - s3 / 6.0).abs() < 1e-14);
        assert!((t.cevian_length(Vertex::A).sq() - 0.75).abs() < 1e-14);
        assert!((t.cevian_division(Vertex::A) - 2.0).abs() < 1e-14);
        assert!((t.tripolar_ratio(Vertex::A, Vertex::C).unwrap() - 1.0).abs() < 1e-14);
        assert!((t.trilinear_ratio(Vertex::A, Vertex::B).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_shape_spoke_ratios() {
        // a:b:c = 7:9:10 gives AD = 2 CD; 5:8:9 gives 3; 4:9:10 gives 5.
        for ((a, b, c), want) in [
            ((7.0, 9.0, 10.0), 2.0),
            ((5.0, 8.0, 9.0), 3.0),
            ((4.0, 9.0, 10.0), 5.0),
        ] {
            let t = SideTriple::new(a, b, c).unwrap();
            let r = t.tripolar_ratio(Vertex::A, Vertex::C).unwrap();
            assert!((r - want).abs() < 1e-10, "({a},{b},{c}) ratio {r}");
            let direct = t.spoke_distance(Vertex::A) / t.spoke_distance(Vertex::C);
            assert!((direct - want).abs() < 1e-10);
        }
    }

    #[test]
    fn area_ratio_345() {
        // [BDC]/[CDA] = (c+a-b)/(b+c-a) = 2/3 for (3,4,5).
        let t = SideTriple::new(3.0, 4.0, 5.0).unwrap();
        assert!((t.barycentric_area_ratio() - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn thin_area_ratio_854_is_632() {
        // For a:b:c = 8:5:4 and E the apothem foot on BC,
        // [BCD]/[AED] = 632.
        let sides = SideTriple::new(8.0, 5.0, 4.0).unwrap();
        let o = Oracle::new(sides);
        let e = foot(o.d, &o.t.side_line(Vertex::A).unwrap());
        let bcd = crate::geom::signed_area(o.t.vb, o.t.vc, o.d).abs();
        let aed = crate::geom::signed_area(o.t.va, e, o.d).abs();
        let ratio = bcd / aed;
        assert!(
            (ratio - 632.0).abs() / 632.0 < 1e-9,
            "[BCD]/[AED] = {ratio}"
        );
    }

    #[test]
    fn odd_pararadius_shape() {
        // With c = (2 - sqrt 5) a + b the pararadius parallel to CA
        // (vertex B relabeling) equals 2b(c-b)/(a-3b+c).
        let a = 1.0;
        let b = 2.0;
        let c = (2.0 - 5.0f64.sqrt()) * a + b;
        // Paper configuration: parallel to AC meeting BC, which is the
        // pararadius of the (b, a, c) relabeling.
        let t = SideTriple::new(b, a, c).unwrap();
        let want = 2.0 * b * (c - b) / (a - 3.0 * b + c);
        let got = t.pararadius(Vertex::A);
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
    }

    #[test]
    fn right_angle_perpendicular_reciprocals() {
        // Right angle at A, feet of the perpendiculars from the Gergonne
        // point: E on AC, F on AB, G on BC. Then 1/CE + 1/BF = 1/DG.
        // (With legs on the axes, CE and BF are the far leg segments and
        // DG the hypotenuse apothem; e.g. (5,4,3): CE=36/11, BF=24/11,
        // DG=72/55 and 11/36 + 11/24 = 55/72.)
        for (a, b, c) in [(5.0, 4.0, 3.0), (13.0, 12.0, 5.0), (5.0, 4.4721359549995793, 2.23606797749979)] {
            let sides = SideTriple::new(a, b, c).unwrap();
            assert!((a * a - b * b - c * c).abs() < 1e-10, "not right-angled at A");
            let o = Oracle::new(sides);
            let e = foot(o.d, &o.t.side_line(Vertex::B).unwrap());
            let f = foot(o.d, &o.t.side_line(Vertex::C).unwrap());
            let g = foot(o.d, &o.t.side_line(Vertex::A).unwrap());
            let lhs = 1.0 / dist(o.t.vc, e) + 1.0 / dist(o.t.vb, f);
            let rhs = 1.0 / dist(o.d, g);
            assert!((lhs - rhs).abs() < 1e-12, "({a},{b},{c}): {lhs} vs {rhs}");
            // DG is the apothem to the hypotenuse, so the closed form
            // participates in the identity too.
            assert!((dist(o.d, g) - sides.apothem(Vertex::A)).abs() < 1e-13);
        }
    }

    #[test]
    fn three_pararadii_identity() {
        // 1/AZ + 1/PX = 1/BX + 1/PY = 1/CY + 1/PZ for the three
        // pararadii X on BC, Y on CA, Z on AB.
        let sides = SideTriple::new(3.1, 4.3, 5.2).unwrap();
        let o = Oracle::new(sides);
        let tol = o.t.tolerance();
        let meet = |par_side: Vertex, on_side: Vertex| {
            let par = parallel_through(o.d, &o.t.side_line(par_side).unwrap()).unwrap();
            intersect_ll(&par, &o.t.side_line(on_side).unwrap(), &tol).unwrap()
        };
        let x = meet(Vertex::C, Vertex::A); // parallel to AB, on BC
        let y = meet(Vertex::A, Vertex::B); // parallel to BC, on CA
        let z = meet(Vertex::B, Vertex::C); // parallel to CA, on AB
        let v1 = 1.0 / dist(o.t.va, z) + 1.0 / dist(o.d, x);
        let v2 = 1.0 / dist(o.t.vb, x) + 1.0 / dist(o.d, y);
        let v3 = 1.0 / dist(o.t.vc, y) + 1.0 / dist(o.d, z);
        assert!((v1 - v2).abs() < 1e-12 && (v2 - v3).abs() < 1e-12);
    }

    #[test]
    fn parachord_consistency() {
        // The parachord is the two pararadius pieces on either side of D
        // glued together; b = c makes them equal halves.
        let t = SideTriple::new(3.0, 4.0, 5.0).unwrap();
        let left = t.pararadius(Vertex::A);
        // Other half: parallel to BC toward AB = mirror labeling (a,c,b).
        let mirror = SideTriple::new(3.0, 5.0, 4.0).unwrap();
        let right = mirror.pararadius(Vertex::A);
        assert!((left + right - t.parachord(Vertex::A)).abs() < 1e-13);
        let iso = SideTriple::new(3.0, 4.0, 4.0).unwrap();
        assert!((2.0 * iso.pararadius(Vertex::A) - iso.parachord(Vertex::A)).abs() < 1e-13);
    }

    #[test]
    fn chord_residual_cases() {
        let sides = SideTriple::new(3.0, 4.0, 5.0).unwrap();
        let o = Oracle::new(sides);
        let tol = o.t.tolerance();
        // Parachord parallel to BC: F on AC, G on AB.
        let par = parallel_through(o.d, &o.t.side_line(Vertex::A).unwrap()).unwrap();
        let f = intersect_ll(&par, &o.t.side_line(Vertex::B).unwrap(), &tol).unwrap();
        let g = intersect_ll(&par, &o.t.side_line(Vertex::C).unwrap(), &tol).unwrap();
        let (m, n) = (dist(o.t.va, g), dist(o.t.vb, g));
        let (p, q) = (dist(o.t.va, f), dist(o.t.vc, f));
        assert!(sides.chord_residual(m, n, p, q).abs() < 1e-12);
        // Negative control: the same chord through the centroid instead.
        let cent = o.t.center(CenterKind::Centroid).unwrap();
        let par = parallel_through(cent, &o.t.side_line(Vertex::A).unwrap()).unwrap();
        let f = intersect_ll(&par, &o.t.side_line(Vertex::B).unwrap(), &tol).unwrap();
        let g = intersect_ll(&par, &o.t.side_line(Vertex::C).unwrap(), &tol).unwrap();
        let (m, n) = (dist(o.t.va, g), dist(o.t.vb, g));
        let (p, q) = (dist(o.t.va, f), dist(o.t.vc, f));
        assert!(sides.chord_residual(m, n, p, q).abs() > 1e-3);
    }

    #[test]
    fn scale_covariance() {
        let base = SideTriple::new(3.0, 4.0, 5.0).unwrap();
        for k in [1.0 / 3.0, 1.0, 7.0] {
            let t = SideTriple::new(3.0 * k, 4.0 * k, 5.0 * k).unwrap();
            // Lengths scale linearly.
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
            assert!(rel(t.spoke_distance(Vertex::A), k * base.spoke_distance(Vertex::A)) < 1e-13);
            assert!(rel(t.pararadius(Vertex::B), k * base.pararadius(Vertex::B)) < 1e-13);
            assert!(rel(t.apothem(Vertex::C), k * base.apothem(Vertex::C)) < 1e-13);
            // Areas scale quadratically.
            assert!(
                rel(t.gergonne_subarea(Vertex::A), k * k * base.gergonne_subarea(Vertex::A))
                    < 1e-13
            );
            // Ratios are invariant.
            assert!(
                rel(
                    t.tripolar_ratio(Vertex::A, Vertex::B).unwrap(),
                    base.tripolar_ratio(Vertex::A, Vertex::B).unwrap()
                ) < 1e-13
            );
        }
    }

    #[test]
    fn confirm_precision_agreement() {
        // Formula vs geometry at double-double precision: relative
        // error below 1e-24.
        let d = |v: f64| Dd::from_f64(v);
        for (a, b, c) in [(3.0, 4.0, 5.0), (2.0, 2.5, 3.2), (7.0, 9.0, 10.0)] {
            let sides = SideTriple::new(d(a), d(b), d(c)).unwrap();
            check_all_formulas(sides, 1e-24);
        }
    }

    proptest! {
        #[test]
        fn formula_matches_geometry(a in 0.5f64..1.4, b in 0.5f64..1.4) {
            let c = 3.0 - a - b;
            // Keep a healthy margin from degeneracy so f64 roundoff
            // stays far below the 1e-12 agreement bound.
            let margin = (a + b - c).min(b + c - a).min(c + a - b);
            prop_assume!(c > 0.5 && margin > 0.1);
            let sides = SideTriple::new(a, b, c).unwrap();
            check_all_formulas(sides, 1e-12);
        }

        #[test]
        fn q_is_negative_on_valid_triples(a in 0.6f64..1.4, b in 0.6f64..1.4) {
            let c = 3.0 - a - b;
            prop_assume!(SideTriple::new(a, b, c).is_ok());
            let q = SideTriple::new(a, b, c).unwrap().q();
            prop_assert!(q < 0.0, "Q = {q} for ({a}, {b}, {c})");
        }
    }
}
