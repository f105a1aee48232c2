//! Piecewise-linear nodal fields with barycentric evaluation.

use crate::geometry::{Mesh, Point};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

/// Nodal values on a mesh, evaluated by barycentric interpolation. The
/// locator hint is a relaxed atomic so lookups with spatial locality stay
/// cheap and evaluation remains shareable across threads.
#[derive(Debug)]
pub struct FieldOnMesh {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
    hint: AtomicUsize,
}

impl Clone for FieldOnMesh {
    fn clone(&self) -> Self {
        FieldOnMesh {
            mesh: self.mesh.clone(),
            values: self.values.clone(),
            hint: AtomicUsize::new(self.hint.load(Ordering::Relaxed)),
        }
    }
}

impl FieldOnMesh {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Self {
        assert_eq!(mesh.n_nodes(), values.len());
        FieldOnMesh { mesh, values, hint: AtomicUsize::new(0) }
    }

    pub fn eval(&self, p: Point) -> f64 {
        let hint = self.hint.load(Ordering::Relaxed);
        let ti = self.mesh.locate(p, Some(hint));
        self.hint.store(ti, Ordering::Relaxed);
        self.eval_in(ti, p)
    }

    /// Evaluate with an explicit locator hint (hot loops).
    pub fn eval_hinted(&self, p: Point, hint: &mut usize) -> f64 {
        let ti = self.mesh.locate(p, Some(*hint));
        *hint = ti;
        self.eval_in(ti, p)
    }

    pub fn eval_in(&self, ti: usize, p: Point) -> f64 {
        let bc = self.mesh.barycentric(ti, p);
        let t = self.mesh.triangles[ti];
        bc[0] * self.values[t[0]] + bc[1] * self.values[t[1]] + bc[2] * self.values[t[2]]
    }

    /// Piecewise-constant gradient on triangle `ti`.
    pub fn grad_in(&self, ti: usize) -> Point {
        let [a, b, c] = self.mesh.triangles[ti];
        let (pa, pb, pc) = (self.mesh.nodes[a], self.mesh.nodes[b], self.mesh.nodes[c]);
        let det = (pb - pa).cross(pc - pa);
        let (va, vb, vc) = (self.values[a], self.values[b], self.values[c]);
        // grad = sum_i v_i grad(lambda_i)
        let gx = (va * (pb.y - pc.y) + vb * (pc.y - pa.y) + vc * (pa.y - pb.y)) / det;
        let gy = (va * (pc.x - pb.x) + vb * (pa.x - pc.x) + vc * (pb.x - pa.x)) / det;
        Point::new(gx, gy)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}
