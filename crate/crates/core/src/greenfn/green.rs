//! Green's function of -Lap_a u + u with Neumann data: regular-part-first
//! splitting, Robin values, and the near-boundary reflection diagnostic.

use super::assemble::NeumannOperator;
use super::field::FieldOnMesh;
use crate::error::{Error, Result};
use crate::geometry::{Mesh, Point};
use crate::problem::CoefficientModel;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleTag {
    Interior,
    Boundary,
}

/// Discrete Green's function and regular part for one pole.
#[derive(Debug, Clone)]
pub struct GreensField {
    pub pole: Point,
    pub tag: PoleTag,
    /// S + H at the nodes, pole node patched for export
    pub g: FieldOnMesh,
    pub h: FieldOnMesh,
    pub robin: f64,
    /// 1/(2 pi) for interior poles, 1/pi for boundary poles
    pub normalization: f64,
}

impl GreensField {
    /// Logarithmic singular part S(x) = norm * log(1/|x - pole|).
    pub fn singular(&self, x: Point) -> f64 {
        self.normalization * (1.0 / x.dist(self.pole)).ln()
    }

    /// G(x) evaluated as S(x) + H(x) (robust near the pole).
    pub fn g_at(&self, x: Point) -> f64 {
        self.singular(x) + self.h.eval(x)
    }

    pub fn h_at(&self, x: Point) -> f64 {
        self.h.eval(x)
    }
}

/// Weak solve of -Lap_a u + u = f, du/dnu = g. The mesh must resolve any
/// singular structure of `f` by grading.
pub fn solve_neumann(
    op: &NeumannOperator,
    f: &dyn Fn(Point) -> f64,
    g: &dyn Fn(Point, Point) -> f64,
) -> Result<FieldOnMesh> {
    op.solve(f, g)
}

fn local_h_at(mesh: &Mesh, p: Point) -> f64 {
    let ti = mesh.locate(p, None);
    let [a, b, c] = mesh.triangles[ti];
    let e0 = mesh.nodes[a].dist(mesh.nodes[b]);
    let e1 = mesh.nodes[b].dist(mesh.nodes[c]);
    let e2 = mesh.nodes[c].dist(mesh.nodes[a]);
    e0.max(e1).max(e2)
}

/// Compute the Green's function for a pole by solving for the regular part:
///   -Lap_a H + H = grad(log a).grad(S) - S   in Omega,
///   dH/dnu = -dS/dnu                         on the boundary,
/// then G = S + H, with S = norm log(1/|x-y|). Boundary poles are snapped to
/// the nearest boundary node and use the 1/pi normalization.
pub fn greens_function(
    op: &NeumannOperator,
    y: Point,
    tag: PoleTag,
) -> Result<GreensField> {
    let mesh = &op.mesh;
    let (pole, normalization) = match tag {
        PoleTag::Interior => {
            let sd = mesh_signed_dist(mesh, y);
            let h_loc = local_h_at(mesh, y);
            if sd < 2.0 * h_loc {
                return Err(Error::invalid(format!(
                    "interior pole within two mesh sizes of the boundary \
                     (dist {sd:.3e}, local h {h_loc:.3e}); use the reflection diagnostic"
                )));
            }
            (y, 1.0 / (2.0 * PI))
        }
        PoleTag::Boundary => {
            // snap to the nearest boundary node
            let mut best = None;
            let mut bd = f64::INFINITY;
            for (i, p) in mesh.nodes.iter().enumerate() {
                if mesh.on_boundary[i] {
                    let d = p.dist(y);
                    if d < bd {
                        bd = d;
                        best = Some(*p);
                    }
                }
            }
            (best.ok_or_else(|| Error::invalid("mesh has no boundary nodes"))?, 1.0 / PI)
        }
    };
    let coeff = op.coeff.clone();
    let grad_s = move |x: Point| -> Point {
        let d = x - pole;
        let r2 = d.dot(d);
        d * (-normalization / r2)
    };
    let f = {
        let coeff = coeff.clone();
        move |x: Point| -> f64 {
            let s = normalization * (1.0 / x.dist(pole)).ln();
            let gl = coeff.grad_log(x);
            gl.dot(grad_s(x)) - s
        }
    };
    let g = move |x: Point, nv: Point| -> f64 { -grad_s(x).dot(nv) };
    let h = op.solve(&f, &g)?;
    let robin = h.eval(pole);
    // nodal G for export; the pole node itself gets a capped S value
    let mut gvals = Vec::with_capacity(mesh.n_nodes());
    for (i, &p) in mesh.nodes.iter().enumerate() {
        let d = p.dist(pole);
        let s = if d > 0.0 {
            normalization * (1.0 / d).ln()
        } else {
            normalization * (2.0 / local_h_at(mesh, pole)).ln()
        };
        gvals.push(s + h.values[i]);
    }
    Ok(GreensField {
        pole,
        tag,
        g: FieldOnMesh::new(mesh.clone(), gvals),
        h,
        robin,
        normalization,
    })
}

fn mesh_signed_dist(mesh: &Mesh, p: Point) -> f64 {
    let mut d = f64::INFINITY;
    for ([a, b], _) in &mesh.boundary_edges {
        let (pa, pb) = (mesh.nodes[*a], mesh.nodes[*b]);
        let t = ((p - pa).dot(pb - pa) / pa.dist(pb).powi(2)).clamp(0.0, 1.0);
        d = d.min(p.dist(pa + (pb - pa) * t));
    }
    d
}

/// Robin function H(y, y).
pub fn robin_function(op: &NeumannOperator, y: Point, tag: PoleTag) -> Result<f64> {
    Ok(greens_function(op, y, tag)?.robin)
}

/// Near-boundary diagnostic: H(y,y) = (1/2pi) log(1/|y-y*|) + z(y) with y*
/// the reflection of y across the boundary. Returns (z value, reflected
/// point, H(y,y)). The remainder z stays bounded as y approaches the
/// boundary.
pub fn reflection_diagnostic(
    op: &NeumannOperator,
    domain: &crate::geometry::Domain,
    y: Point,
    band: f64,
) -> Result<(f64, Point, f64)> {
    let sd = domain.signed_dist(y);
    if !(sd > 0.0 && sd < band) {
        return Err(Error::invalid(format!(
            "reflection diagnostic needs y inside the boundary band (dist {sd:.3e}, band {band:.3e})"
        )));
    }
    let (bp, nv) = domain.closest_boundary(y);
    let ystar = bp + nv * sd;
    let hyy = greens_function(op, y, PoleTag::Interior)?.robin;
    let z = hyy - (1.0 / (2.0 * PI)) * (1.0 / y.dist(ystar)).ln();
    Ok((z, ystar, hyy))
}
