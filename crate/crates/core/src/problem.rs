//! Problem data: anisotropic coefficient families and the full problem
//! configuration (domain, weight exponent, spike counts).

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Positive smooth coefficient a(x) with analytic gradient.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientModel {
    Constant { value: f64 },
    /// a(x) = 1 + A exp(-|x-x0|^2 / sigma^2)
    GaussianBump { amplitude: f64, x0: (f64, f64), sigma: f64 },
    /// a(x) = x1^k1 x2^k2 (domain must avoid the axes)
    Product { k1: u32, k2: u32 },
}

impl CoefficientModel {
    pub fn value(&self, p: Point) -> f64 {
        match self {
            CoefficientModel::Constant { value } => *value,
            CoefficientModel::GaussianBump { amplitude, x0, sigma } => {
                let d2 = (p.x - x0.0).powi(2) + (p.y - x0.1).powi(2);
                1.0 + amplitude * (-d2 / (sigma * sigma)).exp()
            }
            CoefficientModel::Product { k1, k2 } => {
                p.x.powi(*k1 as i32) * p.y.powi(*k2 as i32)
            }
        }
    }

    pub fn gradient(&self, p: Point) -> Point {
        match self {
            CoefficientModel::Constant { .. } => Point::new(0.0, 0.0),
            CoefficientModel::GaussianBump { amplitude, x0, sigma } => {
                let dx = p.x - x0.0;
                let dy = p.y - x0.1;
                let s2 = sigma * sigma;
                let e = amplitude * (-(dx * dx + dy * dy) / s2).exp();
                Point::new(-2.0 * dx / s2 * e, -2.0 * dy / s2 * e)
            }
            CoefficientModel::Product { k1, k2 } => {
                let v = self.value(p);
                Point::new(*k1 as f64 / p.x * v, *k2 as f64 / p.y * v)
            }
        }
    }

    /// grad(log a) = grad(a)/a.
    pub fn grad_log(&self, p: Point) -> Point {
        let v = self.value(p);
        self.gradient(p) * (1.0 / v)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientModel::Constant { .. })
    }
}

/// Full problem setup for one exponent p.
#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub domain: Domain,
    pub coeff: CoefficientModel,
    pub q: Point,
    pub alpha: f64,
    pub p: f64,
    pub m: usize,
    pub l: usize,
    /// Radius of the ball around q that confines the spikes; defaults to
    /// 0.25 dist(q, boundary) for interior q, 0.1 diameter for boundary q.
    pub d: f64,
    pub q_on_boundary: bool,
}

impl ProblemConfig {
    pub fn new(
        domain: Domain,
        coeff: CoefficientModel,
        q: Point,
        alpha: f64,
        p: f64,
        m: usize,
        l: usize,
        d: Option<f64>,
    ) -> Result<Self> {
        if alpha <= -1.0 {
            return Err(Error::invalid("alpha must be greater than -1"));
        }
        if alpha >= -1e-9 && (alpha - alpha.round()).abs() < 1e-9 {
            return Err(Error::invalid("alpha must avoid the natural numbers (including 0)"));
        }
        if !(p > 1.0) {
            return Err(Error::invalid("exponent p must be greater than 1"));
        }
        let sd = domain.signed_dist(q);
        let q_on_boundary = sd.abs() <= domain.boundary_tol();
        if !q_on_boundary && !domain.inside(q) {
            return Err(Error::invalid("q must lie in the closure of the domain"));
        }
        if l > m {
            return Err(Error::invalid("l must satisfy 0 <= l <= m"));
        }
        if !q_on_boundary && l != m {
            return Err(Error::invalid("interior q forces l = m (all spikes interior)"));
        }
        let d = d.unwrap_or(if q_on_boundary {
            0.1 * domain.diameter()
        } else {
            0.25 * sd
        });
        if !(d > 0.0) {
            return Err(Error::invalid("configuration-space radius d must be positive"));
        }
        Ok(ProblemConfig { domain, coeff, q, alpha, p, m, l, d, q_on_boundary })
    }

    /// kappa = 2 (m + 1 + alpha)^2, the configuration-space separation exponent.
    pub fn kappa(&self) -> f64 {
        2.0 * (self.m as f64 + 1.0 + self.alpha).powi(2)
    }

    /// Separation radius p^{-kappa}.
    pub fn sep_radius(&self) -> f64 {
        self.p.powf(-self.kappa())
    }

    /// c_0 = 8 pi (1+alpha) for interior q, 4 pi (1+alpha) for boundary q.
    pub fn c0(&self) -> f64 {
        if self.q_on_boundary {
            4.0 * PI * (1.0 + self.alpha)
        } else {
            8.0 * PI * (1.0 + self.alpha)
        }
    }

    /// c_i = 8 pi for interior spikes (i < l), 4 pi for boundary spikes.
    pub fn c_i(&self, i: usize) -> f64 {
        if i < self.l {
            8.0 * PI
        } else {
            4.0 * PI
        }
    }

    pub fn with_p(&self, p: f64) -> Self {
        let mut c = self.clone();
        c.p = p;
        c
    }
}
