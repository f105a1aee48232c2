//! P1 assembly of the a-weighted Neumann operator and its solves.

use super::field::FieldOnMesh;
use crate::error::{Error, Result};
use crate::geometry::{Mesh, Point};
use crate::linalg::{cg_jacobi, CooBuilder, Csr, SkylineLdl};
use crate::problem::CoefficientModel;
use std::sync::Arc;

/// Seven-point degree-5 triangle rule (barycentric coordinates, weights
/// summing to one).
pub const TRI_QUAD_PTS: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [0.059715871789770, 0.470142064105115, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.059715871789770, 0.470142064105115],
        0.132394152788506,
    ),
    (
        [0.470142064105115, 0.470142064105115, 0.059715871789770],
        0.132394152788506,
    ),
    (
        [0.797426985353087, 0.101286507323456, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.797426985353087, 0.101286507323456],
        0.125939180544827,
    ),
    (
        [0.101286507323456, 0.101286507323456, 0.797426985353087],
        0.125939180544827,
    ),
];

/// Physical quadrature points and weights (including the area factor) of
/// triangle `ti`.
pub fn tri_quadrature(mesh: &Mesh, ti: usize) -> [(Point, f64); 7] {
    let [a, b, c] = mesh.triangles[ti];
    let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
    let area = mesh.tri_area(ti);
    TRI_QUAD_PTS.map(|(bc, w)| (pa * bc[0] + pb * bc[1] + pc * bc[2], w * area))
}

/// Assembled a-weighted stiffness + mass operator on a mesh, with an optional
/// shared direct factorization (reused read-only across right-hand sides).
pub struct NeumannOperator {
    pub mesh: Arc<Mesh>,
    pub coeff: CoefficientModel,
    pub matrix: Csr,
    factor: Option<SkylineLdl>,
}

/// Direct factorization memory cap (number of f64 entries in the profile).
const FACTOR_CAP: usize = 120_000_000;

impl NeumannOperator {
    /// Assemble int a grad(u).grad(v) + int a u v with the 7-point rule.
    /// Rejects a non-positive coefficient at any quadrature point.
    pub fn new(mesh: Arc<Mesh>, coeff: CoefficientModel) -> Result<Self> {
        let n = mesh.n_nodes();
        let mut coo = CooBuilder::new(n);
        for ti in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangles[ti];
            let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
            let det = (pb - pa).cross(pc - pa);
            // constant P1 gradients
            let grads = [
                Point::new(pb.y - pc.y, pc.x - pb.x) * (1.0 / det),
                Point::new(pc.y - pa.y, pa.x - pc.x) * (1.0 / det),
                Point::new(pa.y - pb.y, pb.x - pa.x) * (1.0 / det),
            ];
            let idx = [a, b, c];
            let mut a_avg = 0.0;
            let mut mass = [[0.0f64; 3]; 3];
            for (bc, w) in TRI_QUAD_PTS {
                let p = pa * bc[0] + pb * bc[1] + pc * bc[2];
                let av = coeff.value(p);
                if !(av > 0.0) {
                    return Err(Error::invalid(
                        "coefficient must be positive at every quadrature point",
                    ));
                }
                a_avg += w * av;
                for i in 0..3 {
                    for j in 0..3 {
                        mass[i][j] += w * av * bc[i] * bc[j];
                    }
                }
            }
            let area = 0.5 * det;
            for i in 0..3 {
                for j in 0..3 {
                    let k = a_avg * grads[i].dot(grads[j]) * area + mass[i][j] * area;
                    coo.add(idx[i], idx[j], k);
                }
            }
        }
        let matrix = coo.to_csr();
        let factor = if SkylineLdl::estimate_storage(&matrix) <= FACTOR_CAP {
            SkylineLdl::factor(&matrix).ok()
        } else {
            None
        };
        Ok(NeumannOperator { mesh, coeff, matrix, factor })
    }

    /// Right-hand side of the weak form: int a f v + boundary int a g v.
    /// `g` receives the point and the outward unit normal.
    pub fn assemble_rhs(
        &self,
        f: &dyn Fn(Point) -> f64,
        g: &dyn Fn(Point, Point) -> f64,
    ) -> Vec<f64> {
        let mesh = &self.mesh;
        let mut rhs = vec![0.0; mesh.n_nodes()];
        for ti in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangles[ti];
            let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
            let area = mesh.tri_area(ti);
            for (bc, w) in TRI_QUAD_PTS {
                let p = pa * bc[0] + pb * bc[1] + pc * bc[2];
                let val = self.coeff.value(p) * f(p) * w * area;
                if val != 0.0 && val.is_finite() {
                    rhs[a] += val * bc[0];
                    rhs[b] += val * bc[1];
                    rhs[c] += val * bc[2];
                }
            }
        }
        // 4-point Gauss per boundary edge
        const GX: [f64; 4] = [
            -0.8611363115940526,
            -0.3399810435848563,
            0.3399810435848563,
            0.8611363115940526,
        ];
        const GW: [f64; 4] = [
            0.3478548451374538,
            0.6521451548625461,
            0.6521451548625461,
            0.3478548451374538,
        ];
        for ([i, j], nv) in &mesh.boundary_edges {
            let (pi, pj) = (mesh.nodes[*i], mesh.nodes[*j]);
            let half = (pj - pi) * 0.5;
            let mid = (pi + pj) * 0.5;
            let len = pi.dist(pj);
            for (x, w) in GX.iter().zip(&GW) {
                let p = mid + half * *x;
                let lam = 0.5 * (1.0 - x); // weight of node i
                let val = self.coeff.value(p) * g(p, *nv) * w * 0.5 * len;
                if val.is_finite() {
                    rhs[*i] += val * lam;
                    rhs[*j] += val * (1.0 - lam);
                }
            }
        }
        rhs
    }

    /// Solve with the shared factorization when available, Jacobi-CG
    /// otherwise; the system is SPD by construction.
    pub fn solve_vec(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if let Some(f) = &self.factor {
            return Ok(f.solve(rhs));
        }
        cg_jacobi(&self.matrix, rhs, 1e-11, 40 * self.matrix.n)
    }

    pub fn solve(
        &self,
        f: &dyn Fn(Point) -> f64,
        g: &dyn Fn(Point, Point) -> f64,
    ) -> Result<FieldOnMesh> {
        let rhs = self.assemble_rhs(f, g);
        let x = self.solve_vec(&rhs)?;
        Ok(FieldOnMesh::new(self.mesh.clone(), x))
    }

    /// Relative algebraic residual |Ax - b| / |b| of a candidate solution.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.matrix.matvec(x, &mut ax);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..x.len() {
            num += (ax[i] - b[i]) * (ax[i] - b[i]);
            den += b[i] * b[i];
        }
        (num / den.max(1e-300)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, generate_mesh, DomainSpec};

    #[test]
    fn quad_rule_weights_sum_to_one() {
        let s: f64 = TRI_QUAD_PTS.iter().map(|(_, w)| w).sum();
        assert!((s - 1.0).abs() < 1e-12);
        // degree-2 exactness: int over reference triangle of l1^2 = area/6
        let v: f64 = TRI_QUAD_PTS.iter().map(|(bc, w)| w * bc[0] * bc[0]).sum();
        assert!((v - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_solution_is_exact() {
        // a == 1, f == 1, g == 0  =>  u == 1
        let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        let mesh = Arc::new(generate_mesh(&d, &[], 0.15).unwrap());
        let op = NeumannOperator::new(mesh, CoefficientModel::Constant { value: 1.0 }).unwrap();
        let u = op.solve(&|_| 1.0, &|_, _| 0.0).unwrap();
        for &v in &u.values {
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn rejects_nonpositive_coefficient() {
        let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        let mesh = Arc::new(generate_mesh(&d, &[], 0.2).unwrap());
        // product family vanishes on the axes inside the disk
        let r = NeumannOperator::new(mesh, CoefficientModel::Product { k1: 1, k2: 0 });
        assert!(r.is_err());
    }

    fn l2_error(mesh: &Mesh, u: &FieldOnMesh, exact: &dyn Fn(Point) -> f64) -> f64 {
        let mut err2 = 0.0;
        for ti in 0..mesh.triangles.len() {
            for (p, w) in tri_quadrature(mesh, ti) {
                let d = u.eval_in(ti, p) - exact(p);
                err2 += w * d * d;
            }
        }
        err2.sqrt()
    }

    #[test]
    fn manufactured_cosine_converges_at_second_order() {
        // u* = cos(x1), a == 1: f = 2 cos(x1), g = -sin(x1) nu_1
        let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        let exact = |p: Point| p.x.cos();
        let mut errs = Vec::new();
        for h in [0.2, 0.1, 0.05] {
            let mesh = Arc::new(generate_mesh(&d, &[], h).unwrap());
            let op =
                NeumannOperator::new(mesh.clone(), CoefficientModel::Constant { value: 1.0 })
                    .unwrap();
            let u = op
                .solve(&|p| 2.0 * p.x.cos(), &|p, nv| -p.x.sin() * nv.x)
                .unwrap();
            errs.push(l2_error(&mesh, &u, &exact));
        }
        let rate1 = (errs[0] / errs[1]).ln() / 2.0f64.ln();
        let rate2 = (errs[1] / errs[2]).ln() / 2.0f64.ln();
        let rate = 0.5 * (rate1 + rate2);
        assert!((1.7..=2.3).contains(&rate), "rates {rate1:.2} {rate2:.2}, errs {errs:?}");
    }

    #[test]
    fn manufactured_anisotropic_quadratic() {
        // a = gaussian bump, u* = x1^2:
        // f = u* - Lap_a u* = x1^2 - 2 - (d_x log a) * 2 x1
        let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
        let coeff = CoefficientModel::GaussianBump { amplitude: 1.0, x0: (0.2, 0.1), sigma: 0.6 };
        let exact = |p: Point| p.x * p.x;
        let mut errs = Vec::new();
        for h in [0.2, 0.1] {
            let mesh = Arc::new(generate_mesh(&d, &[], h).unwrap());
            let op = NeumannOperator::new(mesh.clone(), coeff.clone()).unwrap();
            let cf = coeff.clone();
            let u = op
                .solve(
                    &move |p| p.x * p.x - 2.0 - cf.grad_log(p).x * 2.0 * p.x,
                    &|p, nv| 2.0 * p.x * nv.x,
                )
                .unwrap();
            errs.push(l2_error(&mesh, &u, &exact));
        }
        let rate = (errs[0] / errs[1]).ln() / 2.0f64.ln();
        assert!((1.7..=2.3).contains(&rate), "rate {rate:.2}, errs {errs:?}");
    }
}
