//! Direct quadrature of the energy functional
//!   J_p(u) = 1/2 int a (|grad u|^2 + u^2) - 1/(p+1) int a |x-q|^{2a} u_+^{p+1}.
//!
//! The power term runs in log space; triangles near the singular source use a
//! degree-7 rule (the integrand there is a sharply-peaked bubble power).

use crate::geometry::{Mesh, Point};
use crate::greenfn::{FieldOnMesh, TRI_QUAD_PTS};
use crate::problem::ProblemConfig;

/// Thirteen-point degree-7 triangle rule.
const TRI_QUAD_13: [([f64; 3], f64); 13] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], -0.149570044467670),
    ([0.479308067841923, 0.260345966079038, 0.260345966079038], 0.175615257433204),
    ([0.260345966079038, 0.479308067841923, 0.260345966079038], 0.175615257433204),
    ([0.260345966079038, 0.260345966079038, 0.479308067841923], 0.175615257433204),
    ([0.869739794195568, 0.065130102902216, 0.065130102902216], 0.053347235608839),
    ([0.065130102902216, 0.869739794195568, 0.065130102902216], 0.053347235608839),
    ([0.065130102902216, 0.065130102902216, 0.869739794195568], 0.053347235608839),
    ([0.638444188569809, 0.312865496004875, 0.048690315425316], 0.077113760890257),
    ([0.638444188569809, 0.048690315425316, 0.312865496004875], 0.077113760890257),
    ([0.312865496004875, 0.638444188569809, 0.048690315425316], 0.077113760890257),
    ([0.312865496004875, 0.048690315425316, 0.638444188569809], 0.077113760890257),
    ([0.048690315425316, 0.638444188569809, 0.312865496004875], 0.077113760890257),
    ([0.048690315425316, 0.312865496004875, 0.638444188569809], 0.077113760890257),
];

fn tri_points(mesh: &Mesh, ti: usize, high_order: bool, out: &mut Vec<(Point, [f64; 3], f64)>) {
    let [a, b, c] = mesh.triangles[ti];
    let (pa, pb, pc) = (mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
    let area = mesh.tri_area(ti);
    out.clear();
    if high_order {
        for (bc, w) in TRI_QUAD_13 {
            out.push((pa * bc[0] + pb * bc[1] + pc * bc[2], bc, w * area));
        }
    } else {
        for (bc, w) in TRI_QUAD_PTS {
            out.push((pa * bc[0] + pb * bc[1] + pc * bc[2], bc, w * area));
        }
    }
}

/// J_p for a general evaluable field with gradient (the ansatz). The
/// quadrature runs over `mesh` (usually deeper-graded than the field's own);
/// `core_radius` switches to the degree-7 rule near q.
pub fn energy_numeric_fn(
    config: &ProblemConfig,
    mesh: &Mesh,
    u: &dyn Fn(Point) -> f64,
    grad_u: &dyn Fn(Point) -> Point,
    core_radius: f64,
) -> f64 {
    let p = config.p;
    let mut quad = 0.0;
    let mut power = 0.0;
    let mut pts = Vec::with_capacity(13);
    for ti in 0..mesh.triangles.len() {
        let [a, _, _] = mesh.triangles[ti];
        let near = mesh.nodes[a].dist(config.q) < core_radius;
        tri_points(mesh, ti, near, &mut pts);
        for &(x, _, w) in &pts {
            let av = config.coeff.value(x);
            let uv = u(x);
            let gv = grad_u(x);
            quad += w * av * (gv.dot(gv) + uv * uv);
            if uv > 0.0 {
                let lp = av.ln()
                    + 2.0 * config.alpha * x.dist(config.q).max(1e-300).ln()
                    + (p + 1.0) * uv.ln();
                if lp + w.ln() > -700.0 {
                    power += (lp + w.ln()).exp();
                }
            }
        }
    }
    0.5 * quad - power / (p + 1.0)
}

/// J_p for a nodal field on its own mesh (the refined solution).
pub fn energy_numeric_field(config: &ProblemConfig, u: &FieldOnMesh, core_radius: f64) -> f64 {
    let p = config.p;
    let mesh = &u.mesh;
    let mut quad = 0.0;
    let mut power = 0.0;
    let mut pts = Vec::with_capacity(13);
    for ti in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangles[ti];
        let near = mesh.nodes[a].dist(config.q) < core_radius;
        tri_points(mesh, ti, near, &mut pts);
        let g = u.grad_in(ti);
        let g2 = g.dot(g);
        let (va, vb, vc) = (u.values[a], u.values[b], u.values[c]);
        for &(x, bc, w) in &pts {
            let av = config.coeff.value(x);
            let uv = bc[0] * va + bc[1] * vb + bc[2] * vc;
            quad += w * av * (g2 + uv * uv);
            if uv > 0.0 {
                let lp = av.ln()
                    + 2.0 * config.alpha * x.dist(config.q).max(1e-300).ln()
                    + (p + 1.0) * uv.ln();
                if lp + w.ln() > -700.0 {
                    power += (lp + w.ln()).exp();
                }
            }
        }
    }
    0.5 * quad - power / (p + 1.0)
}

/// The concentrated mass p int a |x-q|^{2a} u_+^{p+1} for a nodal field.
pub fn weighted_mass_field(config: &ProblemConfig, u: &FieldOnMesh, core_radius: f64) -> f64 {
    let p = config.p;
    let mesh = &u.mesh;
    let mut mass = 0.0;
    let mut pts = Vec::with_capacity(13);
    for ti in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangles[ti];
        let near = mesh.nodes[a].dist(config.q) < core_radius;
        tri_points(mesh, ti, near, &mut pts);
        let (va, vb, vc) = (u.values[a], u.values[b], u.values[c]);
        for &(x, bc, w) in &pts {
            let uv = bc[0] * va + bc[1] * vb + bc[2] * vc;
            if uv > 0.0 {
                let lp = config.coeff.value(x).ln()
                    + 2.0 * config.alpha * x.dist(config.q).max(1e-300).ln()
                    + (p + 1.0) * uv.ln()
                    + p.ln();
                if lp + w.ln() > -700.0 {
                    mass += (lp + w.ln()).exp();
                }
            }
        }
    }
    mass
}
