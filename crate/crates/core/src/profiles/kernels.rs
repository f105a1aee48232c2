//! Bounded kernel elements of the linearized bubble operators.

use crate::geometry::Point;
use crate::numeric::{inv_1p_pow, pow_ratio};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Z_q(z) = (|z|^{2(1+a)} - 1)/(|z|^{2(1+a)} + 1), radial kernel of the
    /// weighted linearization.
    WeightedRadial,
    /// Z_0(z) = (|z|^2 - 1)/(|z|^2 + 1)
    Radial,
    /// Z_j(z) = z_j/(|z|^2 + 1), j = 1, 2
    Translation(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct KernelElement {
    pub kind: KernelKind,
    pub alpha: f64,
}

pub fn kernel_element(kind: KernelKind, alpha: f64) -> KernelElement {
    KernelElement { kind, alpha }
}

impl KernelElement {
    pub fn eval(&self, z: Point) -> f64 {
        let r = z.norm();
        match self.kind {
            KernelKind::WeightedRadial => pow_ratio(r, 2.0 * (1.0 + self.alpha)),
            KernelKind::Radial => pow_ratio(r, 2.0),
            KernelKind::Translation(j) => {
                let zj = if j == 1 { z.x } else { z.y };
                zj * inv_1p_pow(r, 2.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn kernel_values() {
        let zq = kernel_element(KernelKind::WeightedRadial, 0.5);
        assert!(zq.eval(Point::new(1.0, 0.0)).abs() < 1e-15);
        assert!((zq.eval(Point::new(1e9, 0.0)) - 1.0).abs() < 1e-12);
        assert!((zq.eval(Point::new(0.0, 0.0)) + 1.0).abs() < 1e-15);
        let z0 = kernel_element(KernelKind::Radial, 0.0);
        assert!((z0.eval(Point::new(0.0, 0.0)) + 1.0).abs() < 1e-15);
        assert!(z0.eval(Point::new(0.6, 0.8)).abs() < 1e-15);
        // |Z_q| <= 1 everywhere
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let z = Point::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            assert!(zq.eval(z).abs() <= 1.0);
        }
    }

    #[test]
    fn kernels_annihilate_the_linearized_operator() {
        // Lap Z + W Z = 0 checked by finite differences, standard family
        let fam = crate::profiles::Family::Standard;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for kind in [KernelKind::Radial, KernelKind::Translation(1), KernelKind::Translation(2)] {
            let k = kernel_element(kind, 0.0);
            for _ in 0..40 {
                let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let h = 1e-4;
                let lap = (k.eval(Point::new(p.x + h, p.y))
                    + k.eval(Point::new(p.x - h, p.y))
                    + k.eval(Point::new(p.x, p.y + h))
                    + k.eval(Point::new(p.x, p.y - h))
                    - 4.0 * k.eval(p))
                    / (h * h);
                let resid = lap + fam.weight(p.norm()) * k.eval(p);
                assert!(resid.abs() < 1e-5, "{kind:?} at {p:?}: {resid}");
            }
        }
        // weighted radial kernel against the weighted operator
        for &alpha in &[0.5, 1.5] {
            let fam = crate::profiles::Family::Henon { alpha };
            let k = kernel_element(KernelKind::WeightedRadial, alpha);
            for _ in 0..40 {
                let p = Point::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
                let h = 1e-4;
                let lap = (k.eval(Point::new(p.x + h, p.y))
                    + k.eval(Point::new(p.x - h, p.y))
                    + k.eval(Point::new(p.x, p.y + h))
                    + k.eval(Point::new(p.x, p.y - h))
                    - 4.0 * k.eval(p))
                    / (h * h);
                let resid = lap + fam.weight(p.norm()) * k.eval(p);
                assert!(resid.abs() < 1e-5, "alpha={alpha} at {p:?}: {resid}");
            }
        }
    }
}
