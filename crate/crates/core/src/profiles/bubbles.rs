//! The two standard bubbles and the linearized weights they generate.
//!
//! Interior (weighted) bubble: U_delta(x) = log[ 8(1+a)^2 d^{2(1+a)} /
//! (d^{2(1+a)} + |x|^{2(1+a)})^2 ], an entire solution of
//! -Lap u = |x|^{2a} e^u. Spike bubble: V_{d,xi}(x) = log[ 8 d^2 /
//! (d^2 + |x-xi|^2)^2 ], solving -Lap u = e^u. All evaluations run through
//! logs so arguments may span hundreds of orders of magnitude.

use crate::geometry::Point;
use crate::numeric::log1p_pow;

/// Radial profile family: the weighted (Henon/Hardy) family with exponent
/// alpha, or the standard Liouville family (identical machinery at alpha = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Henon { alpha: f64 },
    Standard,
}

impl Family {
    pub fn alpha(self) -> f64 {
        match self {
            Family::Henon { alpha } => alpha,
            Family::Standard => 0.0,
        }
    }

    /// 1 + alpha (= 1 for the standard family).
    pub fn ap1(self) -> f64 {
        1.0 + self.alpha()
    }

    /// log(8 (1+alpha)^2)
    pub fn lconst(self) -> f64 {
        (8.0 * self.ap1() * self.ap1()).ln()
    }

    /// The rescaled bubble at scale one: u1(r) = log 8(1+a)^2 - 2 log(1 + r^{2(1+a)}).
    pub fn u1(self, r: f64) -> f64 {
        self.lconst() - 2.0 * log1p_pow(r, 2.0 * self.ap1())
    }

    /// d/dr of u1: -4(1+a) r^{1+2a} / (1 + r^{2(1+a)}).
    pub fn u1_deriv(self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let a = self.alpha();
        let lv = (1.0 + 2.0 * a) * r.ln() - log1p_pow(r, 2.0 * self.ap1());
        -4.0 * self.ap1() * lv.exp()
    }

    /// Linearized weight W(r) = 8(1+a)^2 r^{2a} / (1 + r^{2(1+a)})^2
    /// = r^{2a} e^{u1(r)}; returns +inf at r = 0 when a < 0.
    pub fn weight(self, r: f64) -> f64 {
        let a = self.alpha();
        if r <= 0.0 {
            return if a > 0.0 {
                0.0
            } else if a == 0.0 {
                8.0
            } else {
                f64::INFINITY
            };
        }
        let lv = self.lconst() + 2.0 * a * r.ln() - 2.0 * log1p_pow(r, 2.0 * self.ap1());
        if lv < -700.0 {
            0.0
        } else {
            lv.exp()
        }
    }

    /// log of the weight (finite whenever r > 0).
    pub fn log_weight(self, r: f64) -> f64 {
        self.lconst() + 2.0 * self.alpha() * r.ln() - 2.0 * log1p_pow(r, 2.0 * self.ap1())
    }

    /// First correction source f1 = u1^2 / 2.
    pub fn f1(self, r: f64) -> f64 {
        let u = self.u1(r);
        0.5 * u * u
    }

    /// Second correction source
    /// f2 = w1 u - u^3/3 - w1^2/2 - u^4/8 + w1 u^2 / 2, given omega1.
    pub fn f2(self, r: f64, omega1: &dyn Fn(f64) -> f64) -> f64 {
        let u = self.u1(r);
        let w1 = omega1(r);
        w1 * u - u * u * u / 3.0 - 0.5 * w1 * w1 - u.powi(4) / 8.0 + 0.5 * w1 * u * u
    }
}

/// Interior bubble U_delta(x - q) evaluated at the offset `x_rel = x - q`.
pub fn bubble_interior(delta: f64, alpha: f64, x_rel: Point) -> f64 {
    debug_assert!(delta > 0.0);
    let fam = Family::Henon { alpha };
    fam.u1(x_rel.norm() / delta) - 2.0 * fam.ap1() * delta.ln()
}

/// Spike bubble V_{delta,xi}(x).
pub fn bubble_spike(delta: f64, xi: Point, x: Point) -> f64 {
    debug_assert!(delta > 0.0);
    Family::Standard.u1(x.dist(xi) / delta) - 2.0 * delta.ln()
}

/// Radial derivative of the interior bubble with respect to |x - q|.
pub fn bubble_interior_deriv(delta: f64, alpha: f64, r: f64) -> f64 {
    Family::Henon { alpha }.u1_deriv(r / delta) / delta
}

/// -Lap U_delta = |x|^{2a} e^{U_delta} = W(|x|/delta) / delta^2, returned as
/// (log magnitude); always positive.
pub fn bubble_interior_log_neg_lap(delta: f64, alpha: f64, r: f64) -> f64 {
    Family::Henon { alpha }.log_weight(r / delta) - 2.0 * delta.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn bubble_values_at_named_points() {
        // U_delta(0) = log(8 (1+a)^2 / delta^{2(1+a)})
        let (a, d): (f64, f64) = (0.5, 0.3);
        let want = (8.0 * 1.5f64 * 1.5).ln() - 2.0 * 1.5 * d.ln();
        assert!((bubble_interior(d, a, Point::new(0.0, 0.0)) - want).abs() < 1e-12);
        // alpha = 0, delta = 1, |x| = 1: log(8/4) = log 2
        let v = bubble_interior(1.0, 1e-14, Point::new(1.0, 0.0));
        assert!((v - 2.0f64.ln()).abs() < 1e-10, "{v}");
        // V_{d,xi}(xi) = log(8/d^2)
        let xi = Point::new(0.2, -0.7);
        assert!((bubble_spike(d, xi, xi) - (8.0 / (d * d)).ln()).abs() < 1e-12);
    }

    /// Five-point finite-difference Laplacian.
    fn fd_lap(f: &dyn Fn(Point) -> f64, p: Point, h: f64) -> f64 {
        (f(Point::new(p.x + h, p.y))
            + f(Point::new(p.x - h, p.y))
            + f(Point::new(p.x, p.y + h))
            + f(Point::new(p.x, p.y - h))
            - 4.0 * f(p))
            / (h * h)
    }

    #[test]
    fn bubbles_satisfy_their_equations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        // -Lap U = |x|^{2a} e^U at 50 random points
        for &alpha in &[0.5, -0.5, 1.5] {
            let delta = 1.0;
            let f = move |p: Point| bubble_interior(delta, alpha, p);
            for _ in 0..50 {
                let r: f64 = rng.gen_range(0.3..2.0);
                let th: f64 = rng.gen_range(0.0..6.28);
                let p = Point::new(r * th.cos(), r * th.sin());
                let lap = fd_lap(&f, p, 1e-4);
                let rhs = (p.norm().powf(2.0 * alpha)) * f(p).exp();
                assert!((lap + rhs).abs() < 1e-6, "alpha={alpha}: {} vs {}", lap, -rhs);
            }
        }
        // -Lap V = e^V
        let g = |p: Point| bubble_spike(1.0, Point::new(0.0, 0.0), p);
        for _ in 0..50 {
            let p = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let lap = fd_lap(&g, p, 1e-4);
            assert!((lap + g(p).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn spike_bubble_total_mass() {
        // int_{R^2} e^{V_{1,0}} = 8 pi, truncated at r = 1e4
        let fam = Family::Standard;
        let val = crate::numeric::composite_gl(
            |t: f64| {
                let r = t.exp();
                fam.weight(r) * r * r
            },
            (1e-8f64).ln(),
            (1e4f64).ln(),
            400,
            8,
        ) * 2.0
            * std::f64::consts::PI;
        let want = 8.0 * std::f64::consts::PI;
        assert!((val - want).abs() / want < 1e-3, "{val} vs {want}");
    }

    #[test]
    fn standard_family_is_henon_at_alpha_zero() {
        let s = Family::Standard;
        let h = Family::Henon { alpha: 0.0 };
        for &r in &[1e-6, 0.3, 1.0, 7.0, 1e5] {
            assert!((s.u1(r) - h.u1(r)).abs() < 1e-12);
            assert!((s.weight(r) - h.weight(r)).abs() < 1e-12);
            assert!((s.u1_deriv(r) - h.u1_deriv(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_is_exp_log_weight() {
        let fam = Family::Henon { alpha: -0.5 };
        for &r in &[1e-4, 0.5, 2.0, 1e3] {
            assert!((fam.weight(r) - fam.log_weight(r).exp()).abs() <= 1e-12 * fam.weight(r));
        }
    }
}
