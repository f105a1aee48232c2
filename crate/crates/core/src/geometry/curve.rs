//! Arc-length parametrized closed boundary curve stored as a sample table
//! with cubic Hermite interpolation.

use super::Point;

/// Closed boundary curve. Samples are stored at (approximately) uniform
/// arc-length parameters together with unit tangents; evaluation between
/// samples is cubic Hermite in arc length.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    /// Arc-length parameters of the samples, s[0] = 0, strictly increasing.
    s: Vec<f64>,
    pts: Vec<Point>,
    /// Unit tangents (curve traversed counterclockwise).
    tans: Vec<Point>,
    total_len: f64,
}

impl BoundaryCurve {
    /// Build from a dense list of points sampled counterclockwise along the
    /// curve (closed: last connects back to first). Tangents are estimated by
    /// centered differences, arc length by chord accumulation.
    pub fn from_samples(pts: Vec<Point>) -> Self {
        let n = pts.len();
        assert!(n >= 8, "boundary curve needs at least 8 samples");
        let mut s = vec![0.0; n];
        for i in 1..n {
            s[i] = s[i - 1] + pts[i].dist(pts[i - 1]);
        }
        let total_len = s[n - 1] + pts[0].dist(pts[n - 1]);
        let mut tans = Vec::with_capacity(n);
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            tans.push((next - prev).normalized());
        }
        BoundaryCurve { s, pts, tans, total_len }
    }

    pub fn total_len(&self) -> f64 {
        self.total_len
    }

    pub fn samples(&self) -> &[Point] {
        &self.pts
    }

    fn wrap(&self, s: f64) -> f64 {
        let l = self.total_len;
        let mut t = s % l;
        if t < 0.0 {
            t += l;
        }
        t
    }

    fn segment(&self, s: f64) -> (usize, usize, f64, f64) {
        let t = self.wrap(s);
        let n = self.pts.len();
        let i = match self.s.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let i = i.min(n - 1);
        let j = (i + 1) % n;
        let si = self.s[i];
        let sj = if j == 0 { self.total_len } else { self.s[j] };
        (i, j, (t - si) / (sj - si), sj - si)
    }

    /// Position at arc-length parameter `s` (wraps around).
    pub fn position(&self, s: f64) -> Point {
        let (i, j, u, h) = self.segment(s);
        let (p0, p1) = (self.pts[i], self.pts[j]);
        let (m0, m1) = (self.tans[i] * h, self.tans[j] * h);
        let u2 = u * u;
        let u3 = u2 * u;
        p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + p1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2)
    }

    /// Unit tangent at arc-length parameter `s`.
    pub fn tangent(&self, s: f64) -> Point {
        let (i, j, u, h) = self.segment(s);
        let (p0, p1) = (self.pts[i], self.pts[j]);
        let (m0, m1) = (self.tans[i] * h, self.tans[j] * h);
        let d = p0 * ((6.0 * u * u - 6.0 * u) / h)
            + m0 * ((3.0 * u * u - 4.0 * u + 1.0) / h)
            + p1 * ((6.0 * u - 6.0 * u * u) / h)
            + m1 * ((3.0 * u * u - 2.0 * u) / h);
        d.normalized()
    }

    /// Unit outward normal (curve is counterclockwise, so outward = tangent
    /// rotated by -90 degrees).
    pub fn normal(&self, s: f64) -> Point {
        -self.tangent(s).perp()
    }

    /// Arc-length parameter of the point on the curve closest to `x`.
    /// Coarse scan over samples followed by golden-section refinement.
    pub fn project(&self, x: Point) -> f64 {
        let n = self.pts.len();
        let mut best = 0usize;
        let mut bd = f64::INFINITY;
        for (i, p) in self.pts.iter().enumerate() {
            let d = p.dist(x);
            if d < bd {
                bd = d;
                best = i;
            }
        }
        let l = self.total_len;
        let s0 = self.s[best];
        let seg = 2.0 * l / n as f64;
        let (mut a, mut b) = (s0 - seg, s0 + seg);
        let phi = 0.5 * (5.0f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = self.position(c).dist(x);
        let mut fd = self.position(d).dist(x);
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = self.position(c).dist(x);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = self.position(d).dist(x);
            }
            if (b - a).abs() < 1e-14 * l {
                break;
            }
        }
        self.wrap(0.5 * (a + b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize, r: f64) -> BoundaryCurve {
        let pts = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        BoundaryCurve::from_samples(pts)
    }

    #[test]
    fn circle_geometry() {
        let c = circle(2048, 1.0);
        assert!((c.total_len() - 2.0 * PI).abs() < 1e-4);
        let p = c.position(0.0);
        assert!((p.x - 1.0).abs() < 1e-10 && p.y.abs() < 1e-10);
        // outward normal at t=0 is (1,0)
        let nv = c.normal(0.0);
        assert!((nv.x - 1.0).abs() < 1e-6 && nv.y.abs() < 1e-6);
        // normals are unit everywhere
        for k in 0..100 {
            let s = c.total_len() * k as f64 / 100.0;
            assert!((c.normal(s).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_finds_closest_point() {
        let c = circle(2048, 2.0);
        let s = c.project(Point::new(0.7, 0.7));
        let p = c.position(s);
        let want = Point::new(2.0 / 2.0f64.sqrt(), 2.0 / 2.0f64.sqrt());
        assert!(p.dist(want) < 1e-6, "{p:?}");
    }
}
