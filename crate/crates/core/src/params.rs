//! Scaling constants and the nonlinear system for the concentration
//! parameters mu.
//!
//! The mu-system couples log(8(1+a)^2 mu_0^4) and log(8 mu_i^4) to the Robin
//! and Green values at the spike locations. With s = 1/p and unknowns
//! x_i = log mu_i it rearranges exactly (the delta_0 self-reference included)
//! into S(s, x) = 0 whose s = 0 limit gives the closed-form initializer
//!   mu_0^(0) = exp(-3/4 + c_0 H(q,q)/4 + sum_k c_k G(q, xi_k)/4),
//!   mu_i^(0) = exp(-3/4 + c_i H(xi_i,xi_i)/4 + c_0 G(xi_i,q)/4
//!              + sum_{k!=i} c_k G(xi_i, xi_k)/4).

use crate::error::{Error, Result};
use serde::Serialize;

/// The scaling constants tied to the exponent p.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingSet {
    pub p: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub rho0: f64,
    pub upsilon0: f64,
    pub delta0: f64,
    pub delta: Vec<f64>,
    // log-space copies (the linear values can underflow for small alpha)
    pub log_gamma: f64,
    pub log_epsilon: f64,
    pub log_delta0: f64,
    pub log_delta: Vec<f64>,
}

/// gamma = p^{p/(p-1)} e^{-p/(2(p-1))}, epsilon = e^{-p/4},
/// rho_0 = epsilon^{1/(1+a)}, upsilon_0 = mu_0^{1/(1+a)},
/// delta_0 = rho_0 upsilon_0, delta_i = epsilon mu_i.
pub fn scaling_constants(p: f64, alpha: f64, mu: &[f64]) -> Result<ScalingSet> {
    if !(p > 1.0) {
        return Err(Error::invalid("p must exceed 1"));
    }
    if mu.is_empty() {
        return Err(Error::invalid("mu must contain at least mu_0"));
    }
    let ap1 = 1.0 + alpha;
    let log_epsilon = -p / 4.0;
    let log_gamma = p / (p - 1.0) * p.ln() + 2.0 / (p - 1.0) * log_epsilon;
    let log_rho0 = log_epsilon / ap1;
    let log_upsilon0 = mu[0].ln() / ap1;
    let log_delta0 = log_rho0 + log_upsilon0;
    let log_delta: Vec<f64> = mu[1..].iter().map(|m| log_epsilon + m.ln()).collect();
    Ok(ScalingSet {
        p,
        alpha,
        gamma: log_gamma.exp(),
        epsilon: log_epsilon.exp(),
        rho0: log_rho0.exp(),
        upsilon0: log_upsilon0.exp(),
        delta0: log_delta0.exp(),
        delta: log_delta.iter().map(|l| l.exp()).collect(),
        log_gamma,
        log_epsilon,
        log_delta0,
        log_delta,
    })
}

/// Robin/Green data consumed by the mu-system. Indexing matches the spike
/// list; `g_q_xi[k]` is G(q, xi_k) (pole xi_k evaluated at q).
#[derive(Debug, Clone, Default, Serialize)]
pub struct GreenData {
    pub h_qq: f64,
    pub h_ii: Vec<f64>,
    pub g_q_xi: Vec<f64>,
    pub g_xi_q: Vec<f64>,
    pub g_xi_xi: Vec<Vec<f64>>,
}

/// Moment constants feeding the 1/p corrections of the mu-system: the
/// weighted-family C_1, C_2 at the problem's alpha and the standard-family
/// values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentConstants {
    pub c1: f64,
    pub c2: f64,
    pub c1_std: f64,
    pub c2_std: f64,
}

/// The assembled mu-system for one (p, xi) instance.
#[derive(Debug, Clone)]
pub struct MuSystem {
    pub p: f64,
    pub alpha: f64,
    pub c0: f64,
    /// c_i per spike
    pub c: Vec<f64>,
    /// log |xi_i - q|
    pub log_dist_q: Vec<f64>,
    pub green: GreenData,
    pub consts: MomentConstants,
}

#[derive(Debug, Clone, Serialize)]
pub struct MuSolution {
    /// mu_0, mu_1, ..., mu_m
    pub mu: Vec<f64>,
    pub log_mu: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    /// leading-order initializer values
    pub mu_init: Vec<f64>,
}

impl MuSystem {
    fn m(&self) -> usize {
        self.c.len()
    }

    fn p0(&self, s: f64) -> f64 {
        let ap1 = 1.0 + self.alpha;
        let l = (8.0 * ap1 * ap1).ln();
        let (c1, c2) = (self.consts.c1, self.consts.c2);
        (l + c1 / (4.0 * ap1) + c2 * s / (4.0 * ap1))
            / (4.0 - c1 * s / ap1 - c2 * s * s / ap1)
    }

    fn r0(&self, s: f64) -> f64 {
        let ap1 = 1.0 + self.alpha;
        let (c1, c2) = (self.consts.c1, self.consts.c2);
        let (t1, t2) = (self.consts.c1_std, self.consts.c2_std);
        (1.0 - 0.25 * t1 * s - 0.25 * t2 * s * s)
            / (-4.0 + c1 * s / ap1 + c2 * s * s / ap1)
    }

    fn p1(&self, s: f64) -> f64 {
        let (t1, t2) = (self.consts.c1_std, self.consts.c2_std);
        ((8.0f64).ln() + 0.25 * t1 + 0.25 * t2 * s) / (4.0 - t1 * s - t2 * s * s)
    }

    fn r1(&self, s: f64) -> f64 {
        let ap1 = 1.0 + self.alpha;
        let (c1, c2) = (self.consts.c1, self.consts.c2);
        let (t1, t2) = (self.consts.c1_std, self.consts.c2_std);
        (1.0 - c1 * s / (4.0 * ap1) - c2 * s * s / (4.0 * ap1)) / (-4.0 + t1 * s + t2 * s * s)
    }

    /// Residual vector S(s, x) at x = log mu.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m();
        let s = 1.0 / self.p;
        let e = 2.0 * s / (1.0 - s);
        let g = &self.green;
        let mut out = vec![0.0; m + 1];
        let mut s0 = x[0] - 0.25 * self.c0 * g.h_qq + self.p0(s);
        for k in 0..m {
            let ex = (e * (x[0] - x[k + 1] - self.alpha * self.log_dist_q[k])).exp();
            s0 += self.r0(s) * ex * self.c[k] * g.g_q_xi[k];
        }
        out[0] = s0;
        for i in 0..m {
            let mut si = x[i + 1] - 0.25 * self.c[i] * g.h_ii[i] + self.p1(s);
            for k in 0..m {
                if k == i {
                    continue;
                }
                let ex = (e * (x[i + 1] - x[k + 1]
                    + self.alpha * (self.log_dist_q[i] - self.log_dist_q[k])))
                    .exp();
                si -= 0.25 * ex * self.c[k] * g.g_xi_xi[i][k];
            }
            let ex0 = (e * (x[i + 1] - x[0] + self.alpha * self.log_dist_q[i])).exp();
            si += self.r1(s) * ex0 * self.c0 * g.g_xi_q[i];
            out[i + 1] = si;
        }
        out
    }

    /// Analytic Jacobian of the residual (dense, (m+1)^2).
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let m = self.m();
        let s = 1.0 / self.p;
        let e = 2.0 * s / (1.0 - s);
        let g = &self.green;
        let mut jac = vec![vec![0.0; m + 1]; m + 1];
        jac[0][0] = 1.0;
        for k in 0..m {
            let term = self.r0(s)
                * (e * (x[0] - x[k + 1] - self.alpha * self.log_dist_q[k])).exp()
                * self.c[k]
                * g.g_q_xi[k];
            jac[0][0] += e * term;
            jac[0][k + 1] -= e * term;
        }
        for i in 0..m {
            jac[i + 1][i + 1] = 1.0;
            for k in 0..m {
                if k == i {
                    continue;
                }
                let term = 0.25
                    * (e * (x[i + 1] - x[k + 1]
                        + self.alpha * (self.log_dist_q[i] - self.log_dist_q[k])))
                        .exp()
                    * self.c[k]
                    * g.g_xi_xi[i][k];
                jac[i + 1][i + 1] -= e * term;
                jac[i + 1][k + 1] += e * term;
            }
            let term0 = self.r1(s)
                * (e * (x[i + 1] - x[0] + self.alpha * self.log_dist_q[i])).exp()
                * self.c0
                * g.g_xi_q[i];
            jac[i + 1][i + 1] += e * term0;
            jac[i + 1][0] -= e * term0;
        }
        jac
    }
}

/// Leading-order initializer (the s = 0 limit of the system).
pub fn mu_leading_order(sys: &MuSystem) -> Vec<f64> {
    let m = sys.m();
    let g = &sys.green;
    let mut out = Vec::with_capacity(m + 1);
    let mut x0 = -0.75 + 0.25 * sys.c0 * g.h_qq;
    for k in 0..m {
        x0 += 0.25 * sys.c[k] * g.g_q_xi[k];
    }
    out.push(x0.exp());
    for i in 0..m {
        let mut xi = -0.75 + 0.25 * sys.c[i] * g.h_ii[i] + 0.25 * sys.c0 * g.g_xi_q[i];
        for k in 0..m {
            if k != i {
                xi += 0.25 * sys.c[k] * g.g_xi_xi[i][k];
            }
        }
        out.push(xi.exp());
    }
    out
}

fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().map(|r| r.clone()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Damped Newton on S(s, x) = 0 from the leading-order initializer. Steps are
/// halved until the max-norm residual decreases; failure after 50 steps
/// carries the last residual.
pub fn solve_mu_system(sys: &MuSystem) -> Result<MuSolution> {
    let mu_init = mu_leading_order(sys);
    let mut x: Vec<f64> = mu_init.iter().map(|m| m.ln()).collect();
    solve_mu_from(sys, &mut x, &mu_init)
}

/// Newton solve from a caller-supplied starting point (uniqueness probes).
pub fn solve_mu_from(sys: &MuSystem, x: &mut Vec<f64>, mu_init: &[f64]) -> Result<MuSolution> {
    let maxnorm = |v: &[f64]| v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut r = sys.residual(x);
    let mut iterations = 0;
    while maxnorm(&r) > 1e-12 {
        if iterations >= 50 {
            return Err(Error::numerical(
                "mu system",
                format!("damped Newton stalled, residual {:.3e} (p may be too small)", maxnorm(&r)),
            ));
        }
        let jac = sys.jacobian(x);
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = solve_dense(&jac, &neg_r).ok_or_else(|| {
            Error::numerical("mu system", "singular Jacobian")
        })?;
        let mut lambda = 1.0;
        loop {
            let xt: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + lambda * d).collect();
            let rt = sys.residual(&xt);
            if maxnorm(&rt) < maxnorm(&r) || lambda < 1e-6 {
                *x = xt;
                r = rt;
                break;
            }
            lambda *= 0.5;
        }
        iterations += 1;
    }
    Ok(MuSolution {
        mu: x.iter().map(|v| v.exp()).collect(),
        log_mu: x.clone(),
        residual: maxnorm(&r),
        iterations,
        mu_init: mu_init.to_vec(),
    })
}
