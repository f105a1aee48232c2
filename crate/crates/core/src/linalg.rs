//! Sparse symmetric linear algebra for the P1 solves: CSR storage,
//! Jacobi-preconditioned conjugate gradients, MINRES for the indefinite
//! Newton systems, and a reverse-Cuthill-McKee skyline LDL^T factorization
//! shared across right-hand sides.

use crate::error::{Error, Result};

/// Compressed sparse row matrix (full symmetric storage).
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<f64>,
}

/// Coordinate-format accumulator used during assembly.
#[derive(Debug, Clone)]
pub struct CooBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooBuilder {
    pub fn new(n: usize) -> Self {
        CooBuilder { n, entries: Vec::new() }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn to_csr(&self) -> Csr {
        let n = self.n;
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_unstable_by_key(|&k| (self.entries[k].0, self.entries[k].1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::new();
        let mut data: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (i, j, v) = self.entries[k];
            if last == Some((i, j)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                data.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Csr { n, indptr, indices, data }
    }
}

impl Csr {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            y[i] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.indices[k] == i {
                    d[i] = self.data[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients for SPD systems; converges to
/// relative residual `tol` or errors with the iteration count.
pub fn cg_jacobi(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let d = a.diagonal();
    let minv: Vec<f64> = d.iter().map(|&v| if v.abs() > 0.0 { 1.0 / v } else { 1.0 }).collect();
    let bnorm = norm2(b).max(1e-300);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(ri, mi)| ri * mi).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if norm2(&r) / bnorm <= tol {
            return Ok(x);
        }
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm2(&r) / bnorm <= tol {
        return Ok(x);
    }
    Err(Error::numerical(
        "linear solve",
        format!(
            "CG did not reach tol {tol:.1e} in {max_iter} iterations (residual {:.3e})",
            norm2(&r) / bnorm
        ),
    ))
}

/// MINRES with |diagonal| scaling, for symmetric (possibly indefinite) systems.
pub fn minres(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let d = a.diagonal();
    let scale: Vec<f64> = d
        .iter()
        .map(|&v| if v.abs() > 1e-300 { 1.0 / v.abs().sqrt() } else { 1.0 })
        .collect();
    // solve (S A S) y = S b with S = diag(scale), then x = S y
    let sb: Vec<f64> = b.iter().zip(&scale).map(|(bi, si)| bi * si).collect();
    let bnorm = norm2(&sb).max(1e-300);
    let mut tmp = vec![0.0; n];
    let mut av = vec![0.0; n];
    let mut matvec_s = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            tmp[i] = x[i] * scale[i];
        }
        a.matvec(&tmp, y);
        for i in 0..n {
            y[i] *= scale[i];
        }
    };
    let mut x = vec![0.0; n];
    let mut v_prev = vec![0.0; n];
    let mut v = sb.clone();
    let mut beta = norm2(&v);
    if beta == 0.0 {
        return Ok(x);
    }
    for vi in v.iter_mut() {
        *vi /= beta;
    }
    let (mut c_prev, mut s_prev, mut c, mut s) = (1.0f64, 0.0f64, 1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w_prev = vec![0.0; n];
    let mut eta = beta;
    let mut resid = beta;
    for _ in 0..max_iter {
        matvec_s(&v, &mut av);
        let alpha = dot(&v, &av);
        for i in 0..n {
            av[i] -= alpha * v[i] + beta * v_prev[i];
        }
        let beta_new = norm2(&av);
        let delta = c * alpha - c_prev * s * beta;
        let rho2 = s * alpha + c_prev * c * beta;
        let rho3 = s_prev * beta;
        let rho1 = (delta * delta + beta_new * beta_new).sqrt();
        let (c_new, s_new) = if rho1 > 0.0 {
            (delta / rho1, beta_new / rho1)
        } else {
            (1.0, 0.0)
        };
        for i in 0..n {
            let wi = (v[i] - rho3 * w_prev[i] - rho2 * w[i]) / rho1.max(1e-300);
            w_prev[i] = w[i];
            w[i] = wi;
            x[i] += c_new * eta * wi;
        }
        resid *= s_new.abs();
        eta = -s_new * eta;
        if resid / bnorm <= tol {
            for i in 0..n {
                x[i] *= scale[i];
            }
            return Ok(x);
        }
        for i in 0..n {
            v_prev[i] = v[i];
            v[i] = av[i] / beta_new.max(1e-300);
        }
        beta = beta_new;
        c_prev = c;
        s_prev = s;
        c = c_new;
        s = s_new;
    }
    Err(Error::numerical(
        "linear solve",
        format!("MINRES stalled at relative residual {:.3e}", resid / bnorm),
    ))
}

/// Reverse Cuthill--McKee ordering from the CSR adjacency.
pub fn rcm_order(a: &Csr) -> Vec<usize> {
    let n = a.n;
    let deg = |i: usize| a.indptr[i + 1] - a.indptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    loop {
        let start = match (0..n).filter(|&i| !visited[i]).min_by_key(|&i| deg(i)) {
            Some(s) => s,
            None => break,
        };
        visited[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut nbrs: Vec<usize> = (a.indptr[i]..a.indptr[i + 1])
                .map(|k| a.indices[k])
                .filter(|&j| !visited[j])
                .collect();
            nbrs.sort_unstable_by_key(|&j| deg(j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Skyline (variable-band) LDL^T factorization with RCM preordering.
/// Handles symmetric indefinite matrices without pivoting; a vanishing pivot
/// reports failure so callers can fall back to MINRES.
pub struct SkylineLdl {
    n: usize,
    perm: Vec<usize>,
    col_start: Vec<usize>,
    offsets: Vec<usize>,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl SkylineLdl {
    /// Storage (in f64 entries) the factor would need.
    pub fn estimate_storage(a: &Csr) -> usize {
        let (_, col_start) = Self::profile(a);
        col_start.iter().enumerate().map(|(k, &cs)| k - cs).sum()
    }

    fn profile(a: &Csr) -> (Vec<usize>, Vec<usize>) {
        let n = a.n;
        let perm = rcm_order(a);
        let mut iperm = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            iperm[p] = k;
        }
        let mut col_start = vec![0usize; n];
        for k in 0..n {
            let i = perm[k];
            let mut first = k;
            for t in a.indptr[i]..a.indptr[i + 1] {
                first = first.min(iperm[a.indices[t]]);
            }
            col_start[k] = first;
        }
        (perm, col_start)
    }

    pub fn factor(a: &Csr) -> Result<SkylineLdl> {
        let n = a.n;
        let (perm, col_start) = Self::profile(a);
        let mut iperm = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            iperm[p] = k;
        }
        let mut offsets = vec![0usize; n + 1];
        for k in 0..n {
            offsets[k + 1] = offsets[k] + (k - col_start[k]);
        }
        let mut l = vec![0.0; offsets[n]];
        let mut d = vec![0.0; n];
        for k in 0..n {
            let i = perm[k];
            for t in a.indptr[i]..a.indptr[i + 1] {
                let j = iperm[a.indices[t]];
                if j == k {
                    d[k] += a.data[t];
                } else if j < k {
                    l[offsets[k] + (j - col_start[k])] += a.data[t];
                }
            }
        }
        let mut work = vec![0.0; n];
        for k in 0..n {
            let cs = col_start[k];
            for j in cs..k {
                work[j] = l[offsets[k] + (j - cs)];
            }
            for j in cs..k {
                let js = col_start[j];
                let mut s = work[j];
                for t in js.max(cs)..j {
                    s -= work[t] * l[offsets[j] + (t - js)] * d[t];
                }
                work[j] = s / d[j];
            }
            let mut dk = d[k];
            for j in cs..k {
                dk -= work[j] * work[j] * d[j];
            }
            if dk.abs() < 1e-300 {
                return Err(Error::numerical("linear solve", format!("zero pivot at {k}")));
            }
            d[k] = dk;
            for j in cs..k {
                l[offsets[k] + (j - cs)] = work[j];
            }
        }
        Ok(SkylineLdl { n, perm, col_start, offsets, l, d })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for k in 0..n {
            y[k] = b[self.perm[k]];
        }
        for k in 0..n {
            let cs = self.col_start[k];
            let mut s = y[k];
            for j in cs..k {
                s -= self.l[self.offsets[k] + (j - cs)] * y[j];
            }
            y[k] = s;
        }
        for k in 0..n {
            y[k] /= self.d[k];
        }
        for k in (0..n).rev() {
            let cs = self.col_start[k];
            let yk = y[k];
            for j in cs..k {
                y[j] -= self.l[self.offsets[k] + (j - cs)] * yk;
            }
        }
        let mut x = vec![0.0; n];
        for k in 0..n {
            x[self.perm[k]] = y[k];
        }
        x
    }
}
