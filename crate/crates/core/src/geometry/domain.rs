//! Built-in smooth domains: disk, ellipse, smoothed polygon.

use super::{BoundaryCurve, Point};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Named domain shapes accepted by [`build_domain`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// Convex polygon with circular corner fillets of the given radius.
    SmoothedPolygon { vertices: Vec<(f64, f64)>, corner_radius: f64 },
}

#[derive(Debug, Clone)]
enum Shape {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon { samples: Vec<Point> },
}

/// A bounded planar domain with smooth boundary.
#[derive(Debug, Clone)]
pub struct Domain {
    shape: Shape,
    boundary: Arc<BoundaryCurve>,
    diameter: f64,
    spec: DomainSpec,
}

const CURVE_SAMPLES: usize = 4096;

/// Build one of the named domains.
pub fn build_domain(spec: &DomainSpec) -> Result<Domain> {
    match spec {
        DomainSpec::Disk { radius } => {
            if !(*radius > 0.0) {
                return Err(Error::invalid("disk radius must be positive"));
            }
            let r = *radius;
            let pts: Vec<Point> = (0..CURVE_SAMPLES)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / CURVE_SAMPLES as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect();
            Ok(Domain {
                shape: Shape::Disk { radius: r },
                boundary: Arc::new(BoundaryCurve::from_samples(pts)),
                diameter: 2.0 * r,
                spec: spec.clone(),
            })
        }
        DomainSpec::Ellipse { a, b } => {
            if !(*a > 0.0 && *b > 0.0) {
                return Err(Error::invalid("ellipse axes must be positive"));
            }
            let (a, b) = (*a, *b);
            let pts: Vec<Point> = (0..CURVE_SAMPLES)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / CURVE_SAMPLES as f64;
                    Point::new(a * t.cos(), b * t.sin())
                })
                .collect();
            Ok(Domain {
                shape: Shape::Ellipse { a, b },
                boundary: Arc::new(BoundaryCurve::from_samples(pts)),
                diameter: 2.0 * a.max(b),
                spec: spec.clone(),
            })
        }
        DomainSpec::SmoothedPolygon { vertices, corner_radius } => {
            if vertices.len() < 3 {
                return Err(Error::invalid("polygon needs at least 3 vertices"));
            }
            if !(*corner_radius > 0.0) {
                return Err(Error::invalid("corner radius must be positive"));
            }
            let verts: Vec<Point> = vertices.iter().map(|&(x, y)| Point::new(x, y)).collect();
            let samples = sample_rounded_polygon(&verts, *corner_radius)?;
            let mut diameter: f64 = 0.0;
            for i in 0..samples.len() {
                for j in (i + 1)..samples.len() {
                    diameter = diameter.max(samples[i].dist(samples[j]));
                }
            }
            Ok(Domain {
                shape: Shape::Polygon { samples: samples.clone() },
                boundary: Arc::new(BoundaryCurve::from_samples(samples)),
                diameter,
                spec: spec.clone(),
            })
        }
    }
}

/// Replace each corner by a circular fillet tangent to both edges and sample
/// the resulting closed curve counterclockwise.
fn sample_rounded_polygon(verts: &[Point], rad: f64) -> Result<Vec<Point>> {
    let n = verts.len();
    // ensure counterclockwise orientation
    let mut area = 0.0;
    for i in 0..n {
        area += verts[i].cross(verts[(i + 1) % n]);
    }
    let verts: Vec<Point> = if area < 0.0 {
        verts.iter().rev().copied().collect()
    } else {
        verts.to_vec()
    };
    let mut pieces: Vec<Point> = Vec::new();
    for i in 0..n {
        let prev = verts[(i + n - 1) % n];
        let v = verts[i];
        let next = verts[(i + 1) % n];
        let e0 = (v - prev).normalized();
        let e1 = (next - v).normalized();
        let int_angle = PI - e0.cross(e1).atan2(e0.dot(e1)).abs();
        let setback = rad / (int_angle / 2.0).tan();
        if setback > 0.45 * (v - prev).norm() || setback > 0.45 * (next - v).norm() {
            return Err(Error::invalid("corner radius too large for polygon edges"));
        }
        let p0 = v - e0 * setback;
        let p1 = v + e1 * setback;
        // fillet center sits on the inner angle bisector
        let bis = ((-e0 + e1) * 0.5).normalized();
        let center = v + bis * (rad / (int_angle / 2.0).sin());
        // straight piece from previous fillet end handled by dense resampling below
        pieces.push(p0);
        let a0 = (p0 - center).y.atan2((p0 - center).x);
        let mut a1 = (p1 - center).y.atan2((p1 - center).x);
        // traverse the arc in the convex (counterclockwise) direction
        while a1 < a0 {
            a1 += 2.0 * PI;
        }
        if a1 - a0 > PI {
            a1 -= 2.0 * PI;
        }
        let steps = 24;
        for k in 1..=steps {
            let t = a0 + (a1 - a0) * k as f64 / steps as f64;
            pieces.push(center + Point::new(t.cos(), t.sin()) * rad);
        }
    }
    // densify straight segments between consecutive fillets
    let mut out = Vec::new();
    let m = pieces.len();
    for i in 0..m {
        let a = pieces[i];
        let b = pieces[(i + 1) % m];
        out.push(a);
        let d = a.dist(b);
        let steps = (d / (rad * 0.1)).ceil() as usize;
        for k in 1..steps {
            out.push(a + (b - a) * (k as f64 / steps as f64));
        }
    }
    Ok(out)
}

impl Domain {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn boundary(&self) -> &BoundaryCurve {
        &self.boundary
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Tolerance below which a point counts as lying on the boundary.
    pub fn boundary_tol(&self) -> f64 {
        1e-8 * self.diameter
    }

    pub fn inside(&self, p: Point) -> bool {
        match &self.shape {
            Shape::Disk { radius } => p.norm() < *radius,
            Shape::Ellipse { a, b } => {
                (p.x / a) * (p.x / a) + (p.y / b) * (p.y / b) < 1.0
            }
            Shape::Polygon { samples } => winding_inside(samples, p),
        }
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    pub fn signed_dist(&self, p: Point) -> f64 {
        match &self.shape {
            Shape::Disk { radius } => radius - p.norm(),
            _ => {
                let s = self.boundary.project(p);
                let d = self.boundary.position(s).dist(p);
                if self.inside(p) {
                    d
                } else {
                    -d
                }
            }
        }
    }

    /// Closest boundary point and the outward unit normal there.
    pub fn closest_boundary(&self, p: Point) -> (Point, Point) {
        match &self.shape {
            Shape::Disk { radius } => {
                let n = if p.norm() > 1e-300 {
                    p.normalized()
                } else {
                    Point::new(1.0, 0.0)
                };
                (n * *radius, n)
            }
            _ => {
                let s = self.boundary.project(p);
                (self.boundary.position(s), self.boundary.normal(s))
            }
        }
    }
}

fn winding_inside(poly: &[Point], p: Point) -> bool {
    let mut wn = 0i32;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < 0.0 {
            wn -= 1;
        }
    }
    wn != 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_contract() {
        let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        let p = d.boundary().position(0.0);
        assert!((p.x - 1.0).abs() < 1e-9 && p.y.abs() < 1e-9);
        let nv = d.boundary().normal(0.0);
        assert!((nv.x - 1.0).abs() < 1e-6);
        assert!(d.inside(Point::new(0.0, 0.0)));
        assert!(!d.inside(Point::new(1.5, 0.0)));
        assert!((d.signed_dist(Point::new(0.5, 0.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ellipse_contract() {
        let d = build_domain(&DomainSpec::Ellipse { a: 2.0, b: 1.0 }).unwrap();
        assert!(d.inside(Point::new(0.0, 0.0)));
        assert!(d.inside(Point::new(1.9, 0.0)));
        assert!(!d.inside(Point::new(0.0, 1.1)));
        assert!((d.diameter() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(build_domain(&DomainSpec::Disk { radius: 0.0 }).is_err());
        assert!(build_domain(&DomainSpec::Ellipse { a: 1.0, b: -1.0 }).is_err());
    }

    #[test]
    fn smoothed_polygon_closed_and_contains_centroid() {
        let d = build_domain(&DomainSpec::SmoothedPolygon {
            vertices: vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)],
            corner_radius: 0.3,
        })
        .unwrap();
        // centroid of boundary samples must be inside
        let samples = d.boundary().samples();
        let mut c = Point::default();
        for p in samples {
            c = c + *p;
        }
        c = c * (1.0 / samples.len() as f64);
        assert!(d.inside(c));
        // unit normals along the whole boundary
        let l = d.boundary().total_len();
        for k in 0..200 {
            let nv = d.boundary().normal(l * k as f64 / 200.0);
            assert!((nv.norm() - 1.0).abs() < 1e-9);
        }
        // corners are rounded: all samples keep distance from the sharp corner
        for p in samples {
            assert!(p.dist(Point::new(1.0, 1.0)) > 0.05);
        }
    }
}
