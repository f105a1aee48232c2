//! Shared numerical utilities: Gauss--Legendre rules, adaptive quadrature,
//! the dilogarithm, and overflow-safe log helpers used by the bubble and
//! profile evaluations (arguments span hundreds of orders of magnitude).

use crate::error::{Error, Result};

/// log(1 + r^c) for r >= 0, stable for r^c far outside f64 range.
pub fn log1p_pow(r: f64, c: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let t = c * r.ln();
    if t > 36.0 {
        t + (-t).exp().ln_1p()
    } else if t < -36.0 {
        t.exp()
    } else {
        t.exp().ln_1p()
    }
}

/// (y - 1)/(y + 1) with y = r^c, i.e. tanh(c ln r / 2); stable for all r > 0.
pub fn pow_ratio(r: f64, c: f64) -> f64 {
    if r <= 0.0 {
        return -1.0;
    }
    (0.5 * c * r.ln()).tanh()
}

/// 1/(1 + r^c), stable for huge r^c.
pub fn inv_1p_pow(r: f64, c: f64) -> f64 {
    (-log1p_pow(r, c)).exp()
}

/// Dilogarithm Li2(x) for 0 <= x <= 1, accurate to ~1e-15.
///
/// Series for x <= 1/2, Euler reflection Li2(x) + Li2(1-x) = pi^2/6 - ln x ln(1-x)
/// otherwise.
pub fn dilog(x: f64) -> f64 {
    const PI2_6: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
    let x = x.clamp(0.0, 1.0);
    if x > 0.5 {
        if x == 1.0 {
            return PI2_6;
        }
        return PI2_6 - x.ln() * (1.0 - x).ln() - dilog(1.0 - x);
    }
    let mut term = x;
    let mut sum = x;
    for k in 2..200 {
        term *= x;
        let add = term / ((k * k) as f64);
        sum += add;
        if add < 1e-17 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Nodes and weights of the n-point Gauss--Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss--Legendre integration of `f` over [a, b] with `cells`
/// uniform cells and an `npts`-point rule per cell.
pub fn composite_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cells: usize, npts: usize) -> f64 {
    let (gx, gw) = gauss_legendre(npts);
    let h = (b - a) / cells as f64;
    let mut total = 0.0;
    for k in 0..cells {
        let c = a + (k as f64 + 0.5) * h;
        let mut s = 0.0;
        for (xi, wi) in gx.iter().zip(&gw) {
            s += wi * f(c + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
///
/// Returns an error naming the worst subinterval if the recursion bottoms out
/// before the tolerance is met.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (b.abs() + a.abs()).max(1.0) {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::numerical(
                "quadrature",
                format!("adaptive Simpson failed to converge on [{a:.6e}, {b:.6e}]"),
            ));
        }
        Ok(rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)?
            + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Exact tail integral of a power-log density:
/// `int_R^inf w^{-c} (ln w)^k dw = R^{1-c} * sum_{j=0..k} C(k,j) (ln R)^{k-j} j! / (c-1)^{j+1}`.
pub fn power_log_tail(big_r: f64, c: f64, k: usize) -> f64 {
    assert!(c > 1.0 && big_r > 0.0);
    let lr = big_r.ln();
    let mut binom = 1.0;
    let mut fact = 1.0;
    let mut sum = 0.0;
    for j in 0..=k {
        if j > 0 {
            binom *= (k - j + 1) as f64 / j as f64;
            fact *= j as f64;
        }
        sum += binom * lr.powi((k - j) as i32) * fact / (c - 1.0).powi(j as i32 + 1);
    }
    big_r.powf(1.0 - c) * sum
}

/// Least-squares slope of y against x (used for convergence-rate fits).
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
