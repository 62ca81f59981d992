//! Deterministic SVG 1.1 figure emission.
//!
//! A figure is a script evaluated on one concrete triangle: the
//! triangle outline plus every bound point, line and circle.  Output is
//! plain text with fixed-precision coordinates, so identical inputs
//! yield byte-identical SVG.  Points produced by a `gergonne(...)`
//! construction are drawn green, every other point black.

use std::fmt::Write as _;

use crate::geom::{Circle, GeoObject, Line, Point};
use crate::lang::{self, Env, Expr, LangError, Script};
use crate::triangle::Triangle;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;
const GREEN: &str = "#1a9641";

/// Evaluate `script` on `tri` at fast precision and draw the result.
pub fn render_svg(script: &Script, tri: &Triangle<f64>) -> Result<String, LangError> {
    let env = lang::evaluate(script, tri)?;
    Ok(draw(script, tri, &env))
}

/// Names bound by a direct `gergonne(...)` call.
fn gergonne_names(script: &Script) -> Vec<&str> {
    script
        .stmts
        .iter()
        .filter(|st| matches!(&st.rhs, Expr::Call { name, .. } if name == "gergonne"))
        .map(|st| st.name.as_str())
        .collect()
}

struct Frame {
    min: Point<f64>,
    scale: f64,
}

impl Frame {
    /// Map world coordinates to canvas coordinates (y grows upward in
    /// the plane, downward in SVG).
    fn map(&self, p: Point<f64>) -> (f64, f64) {
        (
            MARGIN + (p.x - self.min.x) * self.scale,
            CANVAS - MARGIN - (p.y - self.min.y) * self.scale,
        )
    }
}

fn fit(points: &[Point<f64>]) -> Frame {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    let span = (max.x - min.x).max(max.y - min.y).max(1e-9);
    Frame {
        min,
        scale: (CANVAS - 2.0 * MARGIN) / span,
    }
}

/// Intersect the line a·x + b·y = c with the world-coordinate bounding
/// box, returning the chord endpoints if the line crosses the box.
fn clip_line(l: &Line<f64>, lo: Point<f64>, hi: Point<f64>) -> Option<(Point<f64>, Point<f64>)> {
    let mut hits: Vec<Point<f64>> = Vec::new();
    let mut push = |p: Point<f64>| {
        let eps = 1e-9 * (hi.x - lo.x + hi.y - lo.y);
        if p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps {
            if !hits.iter().any(|q| (q.x - p.x).abs() + (q.y - p.y).abs() < eps) {
                hits.push(p);
            }
        }
    };
    // Convention a·x + b·y + c = 0 with a² + b² = 1.
    if l.b.abs() > 1e-12 {
        for x in [lo.x, hi.x] {
            push(Point::new(x, -(l.c + l.a * x) / l.b));
        }
    }
    if l.a.abs() > 1e-12 {
        for y in [lo.y, hi.y] {
            push(Point::new(-(l.c + l.b * y) / l.a, y));
        }
    }
    if hits.len() < 2 {
        return None;
    }
    // Farthest pair keeps the chord stable when a corner double-hits.
    let mut best = (hits[0], hits[1], -1.0);
    for i in 0..hits.len() {
        for j in i + 1..hits.len() {
            let d = (hits[i].x - hits[j].x).powi(2) + (hits[i].y - hits[j].y).powi(2);
            if d > best.2 {
                best = (hits[i], hits[j], d);
            }
        }
    }
    Some((best.0, best.1))
}

fn draw(script: &Script, tri: &Triangle<f64>, env: &Env<f64>) -> String {
    let green_names = gergonne_names(script);

    // Frame on everything that has an extent.
    let mut anchor = vec![tri.va, tri.vb, tri.vc];
    for (_, obj) in &env.bindings {
        match obj {
            GeoObject::Point(p) => anchor.push(*p),
            GeoObject::Circle(Circle { center, radius }) => {
                anchor.push(Point::new(center.x - radius, center.y - radius));
                anchor.push(Point::new(center.x + radius, center.y + radius));
            }
            _ => {}
        }
    }
    let frame = fit(&anchor);
    let pad = 0.04 * (CANVAS - 2.0 * MARGIN) / frame.scale;
    let lo = Point::new(frame.min.x - pad, frame.min.y - pad);
    let hi = Point::new(
        frame.min.x + (CANVAS - 2.0 * MARGIN) / frame.scale + pad,
        frame.min.y + (CANVAS - 2.0 * MARGIN) / frame.scale + pad,
    );

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );

    // Triangle outline first, construction on top.
    let (ax, ay) = frame.map(tri.va);
    let (bx, by) = frame.map(tri.vb);
    let (cx, cy) = frame.map(tri.vc);
    let _ = writeln!(
        out,
        r#"  <polygon class="triangle" points="{ax:.3},{ay:.3} {bx:.3},{by:.3} {cx:.3},{cy:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#
    );

    for (name, obj) in &env.bindings {
        match obj {
            GeoObject::Line(l) => {
                if let Some((p, q)) = clip_line(l, lo, hi) {
                    let (x1, y1) = frame.map(p);
                    let (x2, y2) = frame.map(q);
                    let _ = writeln!(
                        out,
                        r##"  <line class="line" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#4a4a4a" stroke-width="1"/>"##
                    );
                }
            }
            GeoObject::Circle(Circle { center, radius }) => {
                let (x, y) = frame.map(*center);
                let r = radius * frame.scale;
                let _ = writeln!(
                    out,
                    r##"  <circle class="circle" cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="none" stroke="#2166ac" stroke-width="1"/>"##
                );
            }
            _ => {
                let _ = name;
            }
        }
    }
    // Points and their labels last so they stay visible.
    let verts = [
        (script.vertices[0].as_str(), tri.va),
        (script.vertices[1].as_str(), tri.vb),
        (script.vertices[2].as_str(), tri.vc),
    ];
    let bound_pts = env.bindings.iter().filter_map(|(n, o)| match o {
        GeoObject::Point(p) => Some((n.as_str(), *p)),
        _ => None,
    });
    for (name, p) in verts.into_iter().chain(bound_pts) {
        let (x, y) = frame.map(p);
        let fill = if green_names.contains(&name) {
            GREEN
        } else {
            "black"
        };
        let _ = writeln!(
            out,
            r#"  <circle class="point" cx="{x:.3}" cy="{y:.3}" r="3" fill="{fill}"/>"#
        );
        let _ = writeln!(
            out,
            r#"  <text x="{tx:.3}" y="{ty:.3}" font-size="13" font-family="sans-serif">{name}</text>"#,
            tx = x + 5.0,
            ty = y - 5.0,
        );
    }
    out.push_str("</svg>\n");
    out
}
