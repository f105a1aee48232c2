//! Graded conforming triangulations.
//!
//! Node layout: boundary nodes at locally graded arc-length spacing, a hex
//! background lattice at the global mesh size, and geometric rings around each
//! grading center going down to the center's target size. Triangulation by
//! Delaunay over the combined cloud, filtered to the domain.
//!
//! The grading law is h(x) = min over centers of max(h_c, h_global |x-c| / r_c)
//! with r_c = 0.2 * diameter, so rings progress geometrically and a center can
//! be resolved dozens of decades below the global size at a few thousand extra
//! nodes.

use super::{Domain, Point};
use crate::error::{Error, Result};
use delaunator::triangulate;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy)]
pub struct GradingCenter {
    pub point: Point,
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// (node a, node b, outward unit normal); edges traverse the boundary.
    pub boundary_edges: Vec<([usize; 2], Point)>,
    pub grading_centers: Vec<GradingCenter>,
    pub h_global: f64,
    /// true for nodes lying on the boundary curve
    pub on_boundary: Vec<bool>,
    /// one incident triangle per node (seed for the walking locator)
    vert_tri: Vec<usize>,
    /// neighbor triangle across each edge (opposite local vertex k)
    neighbors: Vec<[Option<usize>; 3]>,
}

const RING_FRACTION: f64 = 0.2; // r_c = 0.2 * diameter
const STEP_FACTOR: f64 = 0.72; // ring spacing as a fraction of local target h

/// Local target edge length at `x`.
pub fn target_h(x: Point, centers: &[GradingCenter], h_global: f64, diameter: f64) -> f64 {
    let rc = RING_FRACTION * diameter;
    let mut h = h_global;
    for c in centers {
        let t = (h_global * x.dist(c.point) / rc).max(c.h).min(h_global);
        h = h.min(t);
    }
    h
}

/// Generate a graded conforming triangulation of `domain`.
pub fn generate_mesh(
    domain: &Domain,
    centers: &[GradingCenter],
    h_global: f64,
) -> Result<Mesh> {
    let diam = domain.diameter();
    if !(h_global > 0.0) || h_global > diam / 4.0 + 1e-12 {
        return Err(Error::invalid(format!(
            "h_global must satisfy 0 < h <= diameter/4 = {}",
            diam / 4.0
        )));
    }
    for c in centers {
        if !(c.h > 0.0) || c.h > h_global {
            return Err(Error::invalid("grading center h must satisfy 0 < h <= h_global"));
        }
        if !domain.inside(c.point) && domain.signed_dist(c.point).abs() > domain.boundary_tol() {
            return Err(Error::invalid("grading center outside the closure of the domain"));
        }
        let cn = c.point.norm();
        if cn > 0.0 && c.h < 1e-13 * cn {
            return Err(Error::invalid(
                "grading depth is below coordinate resolution at this center; \
                 place deeply-graded centers at the origin",
            ));
        }
    }

    let rc = RING_FRACTION * diam;
    let ht = |x: Point| target_h(x, centers, h_global, diam);
    let mut pts: Vec<Point> = Vec::new();
    let mut bnd_flag: Vec<bool> = Vec::new();

    // --- boundary nodes: walk the curve with locally graded steps ---
    let curve = domain.boundary();
    let total = curve.total_len();
    let mut s_nodes = vec![0.0];
    let mut s = 0.0;
    loop {
        let step = ht(curve.position(s)).min(0.25 * total);
        s += step;
        if s >= total - 0.5 * step {
            break;
        }
        s_nodes.push(s);
    }
    // even out so that the closing gap is not a sliver
    let scale = total / (s_nodes.last().unwrap() + ht(curve.position(0.0)).min(s_nodes[1]));
    for sv in &mut s_nodes {
        *sv *= scale;
    }
    for &sv in &s_nodes {
        pts.push(curve.position(sv));
        bnd_flag.push(true);
    }

    // --- hex background lattice ---
    let dx = 0.96 * h_global;
    let dy = dx * 3.0f64.sqrt() / 2.0;
    let bb = bounding_box(curve.samples());
    let mut row = 0;
    let mut y = bb.1 .y + 0.23 * dy;
    while y < bb.0 .y.max(bb.1 .y) + dy {
        let off = if row % 2 == 0 { 0.0 } else { 0.5 * dx };
        let mut x = bb.1 .x + off + 0.31 * dx;
        while x < bb.0 .x + dx {
            let p = Point::new(x, y);
            if domain.inside(p) {
                let h = ht(p);
                let bd = domain.signed_dist(p);
                // keep lattice points only where the lattice is the right density
                if h > 0.55 * h_global && bd > 0.5 * h {
                    pts.push(p);
                    bnd_flag.push(false);
                }
            }
            x += dx;
        }
        y += dy;
        row += 1;
    }
    let bb_hi = bb.0;
    let _ = bb_hi;

    // --- rings around grading centers ---
    //
    // Rings with radius above `r_struct` join the Delaunay cloud. Below that,
    // Delaunay point merging (~1e-15 of the bounding box) would collapse the
    // geometry, so the remaining rings are triangulated explicitly (ring-pair
    // zippers plus an innermost fan) and stitched into the hole left behind.
    let r_struct = 1e-6 * diam;
    struct StructZone {
        center: Point,
        switch_ring: Vec<usize>, // node indices, ascending angle
        switch_angles: Vec<f64>,
        radii: Vec<f64>, // descending, below the switch ring
        counts: Vec<usize>,
        bases: Vec<f64>,
    }
    let mut zones: Vec<StructZone> = Vec::new();
    for (ci, c) in centers.iter().enumerate() {
        let deep = c.h < 0.3 * r_struct;
        if deep {
            if domain.signed_dist(c.point) < 3.0 * r_struct {
                return Err(Error::invalid(
                    "deep grading centers must sit well inside the domain",
                ));
            }
            for c2 in centers {
                let d = c.point.dist(c2.point);
                if d > 0.0 && d < 4.0 * r_struct {
                    return Err(Error::invalid("grading centers too close for deep grading"));
                }
            }
        }
        let mut rho = rc.min(0.49 * diam);
        let golden = 2.399963229728653; // angle offset between rings
        let mut k = 0usize;
        let mut zone: Option<StructZone> = None;
        while rho > 1.35 * c.h {
            let step = STEP_FACTOR * (h_global * rho / rc).clamp(c.h, h_global);
            let n = ((2.0 * std::f64::consts::PI * rho / step).round() as usize).max(8);
            let base = golden * k as f64 % (2.0 * std::f64::consts::PI);
            if deep && zone.is_none() && rho <= r_struct {
                // switch ring: last ring handed to Delaunay, recorded for stitching
                let mut ring_idx = Vec::with_capacity(n);
                let mut ring_ang = Vec::with_capacity(n);
                for j in 0..n {
                    let th = base + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    ring_idx.push(pts.len());
                    ring_ang.push(th);
                    pts.push(c.point + Point::new(th.cos(), th.sin()) * rho);
                    bnd_flag.push(false);
                }
                zone = Some(StructZone {
                    center: c.point,
                    switch_ring: ring_idx,
                    switch_angles: ring_ang,
                    radii: Vec::new(),
                    counts: Vec::new(),
                    bases: Vec::new(),
                });
            } else if let Some(z) = zone.as_mut() {
                z.radii.push(rho);
                z.counts.push(n);
                z.bases.push(base);
            } else {
                for j in 0..n {
                    let th = base + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    let p = c.point + Point::new(th.cos(), th.sin()) * rho;
                    if !domain.inside(p) {
                        continue;
                    }
                    let h = ht(p);
                    // another center may demand finer resolution here
                    if step < 0.5 * STEP_FACTOR * h || step > 2.2 * h {
                        continue;
                    }
                    if domain.signed_dist(p) < 0.45 * h {
                        continue;
                    }
                    // avoid colliding with inner rings of other centers
                    let mut clash = false;
                    for (cj, c2) in centers.iter().enumerate() {
                        if cj != ci && p.dist(c2.point) < 1.35 * c2.h {
                            clash = true;
                            break;
                        }
                    }
                    if !clash {
                        pts.push(p);
                        bnd_flag.push(false);
                    }
                }
            }
            rho -= step;
            k += 1;
        }
        if let Some(z) = zone {
            zones.push(z);
        } else if domain.inside(c.point) {
            // shallow grading: center node joins the Delaunay cloud
            let mut clash = false;
            for (cj, c2) in centers.iter().enumerate() {
                if cj != ci && c.point.dist(c2.point) < 1.35 * c2.h.max(c.h) {
                    clash = true;
                }
            }
            if !clash {
                pts.push(c.point);
                bnd_flag.push(false);
            }
        }
    }

    // --- Delaunay over the cloud, filter to the domain ---
    let dpts: Vec<delaunator::Point> = pts
        .iter()
        .map(|p| delaunator::Point { x: p.x, y: p.y })
        .collect();
    let tri = triangulate(&dpts);
    let mut triangles = Vec::new();
    for t in tri.triangles.chunks(3) {
        // delaunator emits clockwise triangles; store counterclockwise
        let (a, mut b, mut c) = (t[0], t[1], t[2]);
        let area = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        if area == 0.0 {
            continue;
        }
        if area < 0.0 {
            std::mem::swap(&mut b, &mut c);
        }
        let centroid = (pts[a] + pts[b] + pts[c]) * (1.0 / 3.0);
        // drop convex-hull fill between the hull and the curved boundary
        let all_bnd = bnd_flag[a] && bnd_flag[b] && bnd_flag[c];
        if all_bnd && !domain.inside(centroid) {
            continue;
        }
        // drop the Delaunay fill of each structured-core hole
        let mut in_hole = false;
        for z in &zones {
            let rho_sw = (pts[z.switch_ring[0]] - z.center).norm();
            if [a, b, c].iter().all(|v| z.switch_ring.contains(v))
                && centroid.dist(z.center) < rho_sw
            {
                in_hole = true;
                break;
            }
        }
        if in_hole {
            continue;
        }
        triangles.push([a, b, c]);
    }

    // --- structured cores: zipper consecutive rings, fan at the center ---
    for z in &zones {
        let mut outer_idx = z.switch_ring.clone();
        let mut outer_ang = z.switch_angles.clone();
        for r in 0..z.radii.len() {
            let (rho, n, base) = (z.radii[r], z.counts[r], z.bases[r]);
            let mut inner_idx = Vec::with_capacity(n);
            let mut inner_ang = Vec::with_capacity(n);
            for j in 0..n {
                let th = base + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                inner_idx.push(pts.len());
                inner_ang.push(th);
                pts.push(z.center + Point::new(th.cos(), th.sin()) * rho);
                bnd_flag.push(false);
            }
            zipper_rings(
                &mut triangles,
                &outer_idx,
                &outer_ang,
                &inner_idx,
                &inner_ang,
            );
            outer_idx = inner_idx;
            outer_ang = inner_ang;
        }
        // innermost fan
        let center_idx = pts.len();
        pts.push(z.center);
        bnd_flag.push(false);
        let n = outer_idx.len();
        for j in 0..n {
            triangles.push([outer_idx[j], outer_idx[(j + 1) % n], center_idx]);
        }
    }

    let mesh = finish_mesh(pts, triangles, bnd_flag, centers.to_vec(), h_global)?;
    mesh.validate(domain)?;
    Ok(mesh)
}

/// Triangulate the annulus between two concentric node rings (both ascending
/// in angle, counterclockwise) by merging them in angular order.
fn zipper_rings(
    triangles: &mut Vec<[usize; 3]>,
    outer_idx: &[usize],
    outer_ang: &[f64],
    inner_idx: &[usize],
    inner_ang: &[f64],
) {
    let (na, nb) = (outer_idx.len(), inner_idx.len());
    let tau = 2.0 * std::f64::consts::PI;
    // rotate the inner start next to the outer start
    let a0 = outer_ang[0];
    let mut j0 = 0;
    let mut bestd = f64::INFINITY;
    for (j, &th) in inner_ang.iter().enumerate() {
        let d = (th - a0).rem_euclid(tau);
        if d < bestd {
            bestd = d;
            j0 = j;
        }
    }
    // unwrapped ascending angle sequences relative to a0
    let mut ua = Vec::with_capacity(na);
    for k in 0..na {
        ua.push((outer_ang[k] - a0).rem_euclid(tau));
    }
    let mut ub = Vec::with_capacity(nb);
    for k in 0..nb {
        ub.push((inner_ang[(j0 + k) % nb] - a0).rem_euclid(tau));
    }
    for k in 1..na {
        while ua[k] < ua[k - 1] {
            ua[k] += tau;
        }
    }
    for k in 1..nb {
        while ub[k] < ub[k - 1] {
            ub[k] += tau;
        }
    }
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let next_a = if i < na {
            if i + 1 < na { ua[i + 1] } else { ua[0] + tau }
        } else {
            f64::INFINITY
        };
        let next_b = if j < nb {
            if j + 1 < nb { ub[j + 1] } else { ub[0] + tau }
        } else {
            f64::INFINITY
        };
        let ai = outer_idx[i % na];
        let bj = inner_idx[(j0 + j) % nb];
        if next_a <= next_b && i < na {
            let ai1 = outer_idx[(i + 1) % na];
            triangles.push([ai, ai1, bj]);
            i += 1;
        } else {
            let bj1 = inner_idx[(j0 + j + 1) % nb];
            triangles.push([bj1, bj, ai]);
            j += 1;
        }
    }
}

fn bounding_box(pts: &[Point]) -> (Point, Point) {
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    for p in pts {
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
    }
    (hi, lo)
}

fn finish_mesh(
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    on_boundary: Vec<bool>,
    grading_centers: Vec<GradingCenter>,
    h_global: f64,
) -> Result<Mesh> {
    use std::collections::HashMap;
    let nt = triangles.len();
    let mut edge_map: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let e = edge_map.entry(key).or_insert((usize::MAX, usize::MAX));
            if e.0 == usize::MAX {
                e.0 = ti;
            } else if e.1 == usize::MAX {
                e.1 = ti;
            } else {
                return Err(Error::numerical(
                    "mesh",
                    "non-conforming: edge shared by more than two triangles",
                ));
            }
        }
    }
    let mut neighbors = vec![[None; 3]; nt];
    let mut boundary_edges = Vec::new();
    for (ti, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let (t0, t1) = edge_map[&key];
            let other = if t0 == ti { t1 } else { t0 };
            if other != usize::MAX {
                neighbors[ti][k] = Some(other);
            } else {
                // boundary edge; triangles are CCW so outward normal is the
                // edge direction rotated by -90 degrees
                let dir = (nodes[b] - nodes[a]).normalized();
                boundary_edges.push(([a, b], -dir.perp()));
            }
        }
    }
    let mut vert_tri = vec![usize::MAX; nodes.len()];
    for (ti, t) in triangles.iter().enumerate() {
        for &v in t {
            vert_tri[v] = ti;
        }
    }
    if vert_tri.iter().any(|&t| t == usize::MAX) {
        // orphan nodes break the locator; drop them
        let keep: Vec<bool> = vert_tri.iter().map(|&t| t != usize::MAX).collect();
        let mut remap = vec![usize::MAX; nodes.len()];
        let mut new_nodes = Vec::new();
        let mut new_bnd = Vec::new();
        for (i, (&k, p)) in keep.iter().zip(&nodes).enumerate() {
            if k {
                remap[i] = new_nodes.len();
                new_nodes.push(*p);
                new_bnd.push(on_boundary[i]);
            }
        }
        let new_tris: Vec<[usize; 3]> = triangles
            .iter()
            .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
            .collect();
        return finish_mesh(new_nodes, new_tris, new_bnd, grading_centers, h_global);
    }
    Ok(Mesh {
        nodes,
        triangles,
        boundary_edges,
        grading_centers,
        h_global,
        on_boundary,
        vert_tri,
        neighbors,
    })
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn tri_area(&self, ti: usize) -> f64 {
        let [a, b, c] = self.triangles[ti];
        0.5 * (self.nodes[b] - self.nodes[a]).cross(self.nodes[c] - self.nodes[a])
    }

    /// Assert all structural invariants.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        for ti in 0..self.triangles.len() {
            if self.tri_area(ti) <= 0.0 {
                let [a, b, c] = self.triangles[ti];
                return Err(Error::numerical(
                    "mesh",
                    format!(
                        "non-positive area at triangle {ti}: ({:e},{:e}) ({:e},{:e}) ({:e},{:e})",
                        self.nodes[a].x, self.nodes[a].y,
                        self.nodes[b].x, self.nodes[b].y,
                        self.nodes[c].x, self.nodes[c].y
                    ),
                ));
            }
        }
        // grading contract: the shortest edge incident to each center is
        // within a factor 2 of the center's target h
        for c in &self.grading_centers {
            if !domain.inside(c.point) {
                continue;
            }
            let mut nearest = 0;
            let mut nd = f64::INFINITY;
            for (i, p) in self.nodes.iter().enumerate() {
                let d = p.dist(c.point);
                if d < nd {
                    nd = d;
                    nearest = i;
                }
            }
            let mut min_edge = f64::INFINITY;
            for t in &self.triangles {
                if t.contains(&nearest) {
                    for k in 0..3 {
                        let e = self.nodes[t[k]].dist(self.nodes[t[(k + 1) % 3]]);
                        if e > 0.0 {
                            min_edge = min_edge.min(e);
                        }
                    }
                }
            }
            if !(min_edge <= 2.0 * c.h) {
                return Err(Error::numerical(
                    "mesh",
                    format!("grading violated at center ({}, {}): min edge {min_edge:.3e} vs target {:.3e}",
                        c.point.x, c.point.y, c.h),
                ));
            }
        }
        Ok(())
    }

    /// Barycentric coordinates of `p` in triangle `ti`.
    pub fn barycentric(&self, ti: usize, p: Point) -> [f64; 3] {
        let [a, b, c] = self.triangles[ti];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        let den = (pb - pa).cross(pc - pa);
        let la = (pb - p).cross(pc - p) / den;
        let lb = (pc - p).cross(pa - p) / den;
        [la, lb, 1.0 - la - lb]
    }

    /// Locate the triangle containing `p` by a visibility walk from `hint`
    /// (or from the triangle incident to the nearest of a few probe nodes).
    /// Returns the best triangle even for points slightly outside the mesh.
    pub fn locate(&self, p: Point, hint: Option<usize>) -> usize {
        let mut ti = hint.unwrap_or(0).min(self.triangles.len() - 1);
        let mut best = (f64::NEG_INFINITY, ti);
        for _ in 0..4 * self.triangles.len().max(64) {
            let bc = self.barycentric(ti, p);
            let min_bc = bc[0].min(bc[1]).min(bc[2]);
            if min_bc >= -1e-12 {
                return ti;
            }
            if min_bc > best.0 {
                best = (min_bc, ti);
            }
            // step across the edge opposite the most negative coordinate:
            // barycentric k is negative when p lies beyond edge (k+1, k+2),
            // i.e. the edge starting at local vertex (k+1)
            let k = if bc[0] <= bc[1] && bc[0] <= bc[2] {
                0
            } else if bc[1] <= bc[2] {
                1
            } else {
                2
            };
            match self.neighbors[ti][(k + 1) % 3] {
                Some(nb) => {
                    if nb == ti {
                        break;
                    }
                    ti = nb;
                }
                None => break,
            }
        }
        // walk left the mesh (point outside or walk cycled): fall back to the
        // triangle incident to the nearest node
        let mut nearest = 0usize;
        let mut nd = f64::INFINITY;
        for (i, q) in self.nodes.iter().enumerate() {
            let d = q.dist(p);
            if d < nd {
                nd = d;
                nearest = i;
            }
        }
        let mut out = best.1;
        let mut bv = best.0;
        for (ti2, t) in self.triangles.iter().enumerate() {
            if t.contains(&nearest) {
                let bc = self.barycentric(ti2, p);
                let m = bc[0].min(bc[1]).min(bc[2]);
                if m > bv {
                    bv = m;
                    out = ti2;
                }
            }
        }
        out
    }

    /// Plain-text export: node and triangle listing, one record per line.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (p, b) in self.nodes.iter().zip(&self.on_boundary) {
            writeln!(w, "{:.17e} {:.17e} {}", p.x, p.y, if *b { 1 } else { 0 })?;
        }
        writeln!(w, "triangles {}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "boundary_edges {}", self.boundary_edges.len())?;
        for ([a, b], n) in &self.boundary_edges {
            writeln!(w, "{} {} {:.17e} {:.17e}", a, b, n.x, n.y)?;
        }
        Ok(())
    }

    /// Read back a mesh written by [`Mesh::write_text`].
    pub fn read_text<R: BufRead>(r: &mut R) -> Result<Mesh> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::invalid("unexpected end of mesh file"))?
                .map_err(Error::from)
        };
        let header = next()?;
        let n: usize = parse_count(&header, "nodes")?;
        let mut nodes = Vec::with_capacity(n);
        let mut on_boundary = Vec::with_capacity(n);
        for _ in 0..n {
            let l = next()?;
            let mut it = l.split_whitespace();
            let x: f64 = parse_tok(it.next())?;
            let y: f64 = parse_tok(it.next())?;
            let b: i32 = parse_tok(it.next())?;
            nodes.push(Point::new(x, y));
            on_boundary.push(b != 0);
        }
        let m: usize = parse_count(&next()?, "triangles")?;
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let l = next()?;
            let mut it = l.split_whitespace();
            triangles.push([parse_tok(it.next())?, parse_tok(it.next())?, parse_tok(it.next())?]);
        }
        finish_mesh(nodes, triangles, on_boundary, Vec::new(), 0.0)
    }
}

fn parse_count(line: &str, tag: &str) -> Result<usize> {
    let mut it = line.split_whitespace();
    let t = it.next().unwrap_or("");
    if t != tag {
        return Err(Error::invalid(format!("expected `{tag}` header, got `{line}`")));
    }
    parse_tok(it.next())
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>) -> Result<T> {
    tok.ok_or_else(|| Error::invalid("missing field in mesh file"))?
        .parse::<T>()
        .map_err(|_| Error::invalid("malformed field in mesh file"))
}
