//! Derivative-free maximization of the reduced energy over the configuration
//! space, with a memoized Robin/Green cache.
//!
//! The optimizer is projected coordinate ascent with shrinking steps:
//! interior spikes move in the plane, boundary spikes along the boundary
//! parameter, every candidate re-projected into the configuration space. The
//! multistart set always contains the regular-polygon start at radius
//! p^{-1/2} around the source.

use super::reduced::{reduced_energy_asymptotic, EnergyReport, ShapeConstants};
use crate::error::{Error, Result};
use crate::geometry::{project_to_config_space, Point, SpikeConfiguration, SpikeTag};
use crate::greenfn::{greens_function, GreensField, NeumannOperator, PoleTag};
use crate::params::GreenData;
use crate::pipeline::MeshSpec;
use crate::problem::{CoefficientModel, ProblemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Memoized Green fields keyed by pole position snapped to a lattice of pitch
/// 1e-4 diameter. When the problem is rotationally symmetric about the source
/// (disk centered at q with a radially symmetric coefficient), poles are
/// canonicalized to the positive x-axis and keyed by radius, which also makes
/// the computed landscape exactly symmetric.
pub struct GreenCache {
    config: ProblemConfig,
    mesh_spec: MeshSpec,
    symmetric: bool,
    pitch: f64,
    map: Mutex<HashMap<(i64, i64), Arc<GreensField>>>,
    q_field: Arc<GreensField>,
    q_op: Arc<NeumannOperator>,
}

fn rotate(p: Point, cos_t: f64, sin_t: f64) -> Point {
    Point::new(cos_t * p.x - sin_t * p.y, sin_t * p.x + cos_t * p.y)
}

impl GreenCache {
    pub fn new(config: &ProblemConfig, mesh_spec: MeshSpec) -> Result<Self> {
        let symmetric = rotationally_symmetric(config);
        let pitch = 1e-4 * config.domain.diameter();
        let mesh = mesh_spec.build(config, &[])?;
        let q_op = Arc::new(NeumannOperator::new(mesh, config.coeff.clone())?);
        let q_tag = if config.q_on_boundary { PoleTag::Boundary } else { PoleTag::Interior };
        let q_field = Arc::new(greens_function(&q_op, config.q, q_tag)?);
        Ok(GreenCache {
            config: config.clone(),
            mesh_spec,
            symmetric,
            pitch,
            map: Mutex::new(HashMap::new()),
            q_field,
            q_op,
        })
    }

    pub fn q_field(&self) -> Arc<GreensField> {
        self.q_field.clone()
    }

    pub fn solves_performed(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    fn snap(&self, v: f64) -> f64 {
        (v / self.pitch).round() * self.pitch
    }

    /// The canonical pole and rotation angle used for a spike position.
    fn canonical(&self, xi: Point) -> (Point, f64) {
        if self.symmetric {
            let r = self.snap(xi.dist(self.config.q));
            let theta = (xi.y - self.config.q.y).atan2(xi.x - self.config.q.x);
            (self.config.q + Point::new(r, 0.0), theta)
        } else {
            (Point::new(self.snap(xi.x), self.snap(xi.y)), 0.0)
        }
    }

    fn field_for(&self, xi: Point, tag: PoleTag) -> Result<Arc<GreensField>> {
        let (pole, _) = self.canonical(xi);
        let key = ((pole.x / self.pitch).round() as i64, (pole.y / self.pitch).round() as i64);
        if let Some(f) = self.map.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let field = if self.symmetric || pole.dist(self.config.q) < 0.02 * self.config.domain.diameter()
        {
            // pole-specific mesh graded at both q and the pole
            let mesh = self.mesh_spec.build(&self.config, &[pole])?;
            let op = NeumannOperator::new(mesh, self.config.coeff.clone())?;
            Arc::new(greens_function(&op, pole, tag)?)
        } else {
            let mesh = self.mesh_spec.build(&self.config, &[pole])?;
            let op = NeumannOperator::new(mesh, self.config.coeff.clone())?;
            Arc::new(greens_function(&op, pole, tag)?)
        };
        self.map.lock().unwrap().insert(key, field.clone());
        Ok(field)
    }

    /// Assemble the Green data for a configuration.
    pub fn green_data(&self, xi: &SpikeConfiguration) -> Result<GreenData> {
        let m = xi.m();
        let q = self.config.q;
        let mut fields = Vec::with_capacity(m);
        let mut angles = Vec::with_capacity(m);
        for (i, &x) in xi.points.iter().enumerate() {
            let tag = if xi.tags[i] == SpikeTag::Interior {
                PoleTag::Interior
            } else {
                PoleTag::Boundary
            };
            let (_, theta) = self.canonical(x);
            fields.push(self.field_for(x, tag)?);
            angles.push(theta);
        }
        // evaluate G(x, pole) with x rotated into the pole's canonical frame
        let at = |fi: usize, x: Point| -> f64 {
            let th = angles[fi];
            let xr = if self.symmetric {
                q + rotate(x - q, th.cos(), -th.sin())
            } else {
                x
            };
            fields[fi].g_at(xr)
        };
        let mut data = GreenData {
            h_qq: self.q_field.robin,
            h_ii: fields.iter().map(|f| f.robin).collect(),
            g_q_xi: (0..m).map(|k| at(k, q)).collect(),
            g_xi_q: xi
                .points
                .iter()
                .map(|&x| {
                    if self.symmetric {
                        self.q_field.g_at(q + Point::new(x.dist(q), 0.0))
                    } else {
                        self.q_field.g_at(x)
                    }
                })
                .collect(),
            g_xi_xi: vec![vec![0.0; m]; m],
        };
        for i in 0..m {
            for k in 0..m {
                if i != k {
                    data.g_xi_xi[i][k] = at(k, xi.points[i]);
                }
            }
        }
        Ok(data)
    }

    pub fn q_operator(&self) -> Arc<NeumannOperator> {
        self.q_op.clone()
    }
}

fn rotationally_symmetric(config: &ProblemConfig) -> bool {
    use crate::geometry::DomainSpec;
    let disk_at_origin = matches!(config.domain.spec(), DomainSpec::Disk { .. })
        && config.q.norm() < 1e-14;
    let radial_coeff = match &config.coeff {
        CoefficientModel::Constant { .. } => true,
        CoefficientModel::GaussianBump { x0, .. } => {
            (x0.0 - config.q.x).abs() < 1e-14 && (x0.1 - config.q.y).abs() < 1e-14
        }
        CoefficientModel::Product { .. } => false,
    };
    disk_at_origin && radial_coeff
}

#[derive(Debug, Clone, Copy)]
pub struct MaximizeOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_sweeps: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions { n_starts: 8, seed: 1, max_sweeps: 40 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximizeOutcome {
    pub xi: SpikeConfiguration,
    pub report: EnergyReport,
    pub boundary_flag: bool,
    pub starts_tried: usize,
    pub f_at_polygon_start: f64,
}

/// Maximize F_p over the configuration space by multistart projected
/// coordinate ascent.
pub fn maximize_reduced_energy(
    config: &ProblemConfig,
    cache: &GreenCache,
    shape: ShapeConstants,
    start: Option<SpikeConfiguration>,
    opts: MaximizeOptions,
) -> Result<MaximizeOutcome> {
    if config.m == 0 {
        return Err(Error::invalid("maximization needs at least one spike"));
    }
    let d = config.d;
    let polygon = polygon_start(config);
    let mut starts: Vec<Vec<Point>> = vec![polygon.clone()];
    if let Some(s) = start {
        starts.push(s.points.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.n_starts.max(1) {
        let mut pts = Vec::with_capacity(config.m);
        for _ in 0..config.m {
            let r = d * (0.15 + 0.75 * rng.gen::<f64>());
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            pts.push(config.q + Point::new(th.cos(), th.sin()) * r);
        }
        starts.push(pts);
    }

    let evaluate = |pts: &[Point]| -> Option<(f64, SpikeConfiguration)> {
        let sc = project_to_config_space(pts, config);
        if !sc.feasible {
            return None;
        }
        let green = cache.green_data(&sc).ok()?;
        let rep = reduced_energy_asymptotic(config, &sc.points, &green, shape).ok()?;
        Some((rep.f_asym, sc))
    };

    let f_poly = evaluate(&polygon).map(|(f, _)| f).unwrap_or(f64::NEG_INFINITY);

    let ascents: Vec<Option<(f64, SpikeConfiguration, f64)>> = starts
        .par_iter()
        .map(|pts| ascend(config, cache, &evaluate, pts, opts.max_sweeps))
        .collect();

    let mut best: Option<(f64, SpikeConfiguration, f64)> = None;
    for a in ascents.into_iter().flatten() {
        if best.as_ref().map(|b| a.0 > b.0).unwrap_or(true) {
            best = Some(a);
        }
    }
    let (f_best, sc_best, final_step) =
        best.ok_or_else(|| Error::invalid("all multistart configurations were infeasible"))?;
    let green = cache.green_data(&sc_best)?;
    let report = reduced_energy_asymptotic(config, &sc_best.points, &green, shape)?;
    // margin to the configuration-space boundary: separation slack plus the
    // distance to the outer cap |xi - q| = d
    let outer_margin = sc_best
        .points
        .iter()
        .map(|x| d - x.dist(config.q))
        .fold(f64::INFINITY, f64::min);
    let margin = sc_best.slack.min(outer_margin);
    let boundary_flag = margin < 2.0 * final_step;
    let _ = f_best;
    Ok(MaximizeOutcome {
        xi: sc_best,
        report,
        boundary_flag,
        starts_tried: starts.len(),
        f_at_polygon_start: f_poly,
    })
}

/// Regular polygon at radius p^{-1/2} around the source (the lower-bound
/// competitor configuration).
pub fn polygon_start(config: &ProblemConfig) -> Vec<Point> {
    let m = config.m;
    let r = config.p.powf(-0.5).min(0.8 * config.d);
    (0..m)
        .map(|i| {
            let th = std::f64::consts::TAU * i as f64 / m as f64 + 0.3;
            config.q + Point::new(th.cos(), th.sin()) * r
        })
        .collect()
}

fn ascend(
    config: &ProblemConfig,
    cache: &GreenCache,
    evaluate: &(dyn Fn(&[Point]) -> Option<(f64, SpikeConfiguration)> + Sync),
    start: &[Point],
    max_sweeps: usize,
) -> Option<(f64, SpikeConfiguration, f64)> {
    let (mut f_cur, mut sc) = evaluate(start)?;
    let mut step = 0.15 * config.d;
    let floor = (2.0 * cache.pitch).max(1e-5 * config.d);
    let boundary = config.domain.boundary();
    for _ in 0..max_sweeps {
        let mut improved = false;
        for i in 0..config.m {
            let candidates: Vec<Vec<Point>> = if sc.tags[i] == SpikeTag::Interior {
                [
                    Point::new(step, 0.0),
                    Point::new(-step, 0.0),
                    Point::new(0.0, step),
                    Point::new(0.0, -step),
                ]
                .iter()
                .map(|&dp| {
                    let mut pts = sc.points.clone();
                    pts[i] = pts[i] + dp;
                    pts
                })
                .collect()
            } else {
                // boundary spike: move along the arc-length parameter
                let s0 = boundary.project(sc.points[i]);
                [step, -step]
                    .iter()
                    .map(|&ds| {
                        let mut pts = sc.points.clone();
                        pts[i] = boundary.position(s0 + ds);
                        pts
                    })
                    .collect()
            };
            for cand in candidates {
                if let Some((f_new, sc_new)) = evaluate(&cand) {
                    if f_new > f_cur {
                        f_cur = f_new;
                        sc = sc_new;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < floor {
                break;
            }
        }
    }
    Some((f_cur, sc, step.max(floor)))
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeRow {
    pub x: f64,
    pub y: f64,
    pub f_asym: f64,
    pub valid: bool,
}

/// Evaluate F on a grid of single-spike positions (m = 1 slice). Grid points
/// violating the configuration space are marked invalid and not evaluated.
pub fn landscape_scan(
    config: &ProblemConfig,
    cache: &GreenCache,
    shape: ShapeConstants,
    n: usize,
) -> Result<Vec<LandscapeRow>> {
    if config.m != 1 {
        return Err(Error::invalid("landscape scan is an m = 1 slice"));
    }
    let d = config.d;
    let mut rows = Vec::new();
    for iy in 0..n {
        for ix in 0..n {
            let x = config.q.x - d + 2.0 * d * (ix as f64 + 0.5) / n as f64;
            let y = config.q.y - d + 2.0 * d * (iy as f64 + 0.5) / n as f64;
            let pt = Point::new(x, y);
            let sc = SpikeConfiguration {
                points: vec![pt],
                tags: vec![SpikeTag::Interior],
                kappa: config.kappa(),
                slack: 0.0,
                feasible: true,
            };
            // validity: inside the domain, inside B_d(q), separated from q
            let rp = config.sep_radius();
            let ok = config.domain.signed_dist(pt) > rp
                && pt.dist(config.q) > rp
                && pt.dist(config.q) < d;
            if !ok {
                rows.push(LandscapeRow { x, y, f_asym: f64::NAN, valid: false });
                continue;
            }
            let green = cache.green_data(&sc)?;
            let rep = reduced_energy_asymptotic(config, &sc.points, &green, shape)?;
            rows.push(LandscapeRow { x, y, f_asym: rep.f_asym, valid: true });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    fn bump_config(p: f64) -> ProblemConfig {
        ProblemConfig::new(
            build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap(),
            CoefficientModel::GaussianBump { amplitude: 1.0, x0: (0.0, 0.0), sigma: 0.25 },
            Point::new(0.0, 0.0),
            0.5,
            p,
            1,
            1,
            None,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_detection() {
        assert!(rotationally_symmetric(&bump_config(80.0)));
        let off = ProblemConfig::new(
            build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap(),
            CoefficientModel::GaussianBump { amplitude: 1.0, x0: (0.3, 0.0), sigma: 0.5 },
            Point::new(0.0, 0.0),
            0.5,
            80.0,
            1,
            1,
            None,
        )
        .unwrap();
        assert!(!rotationally_symmetric(&off));
    }

    #[test]
    fn maximizer_stays_interior_and_contracts_with_p() {
        let spec = MeshSpec { h_global: 0.1, h_at_q: 1e-4, h_at_spikes: 1e-4 };
        let shape = ShapeConstants {
            k_weighted: -0.841116916642 + 4.0 * 1.5f64.ln(),
            k_standard: -0.841116916642,
        };
        let mut dists = Vec::new();
        for &p in &[80.0, 320.0] {
            let config = bump_config(p);
            let cache = GreenCache::new(&config, spec).unwrap();
            let out = maximize_reduced_energy(
                &config,
                &cache,
                shape,
                None,
                MaximizeOptions { n_starts: 4, seed: 7, max_sweeps: 30 },
            )
            .unwrap();
            assert!(!out.boundary_flag, "p={p}: maximizer on the boundary");
            assert!(out.report.f_asym >= out.f_at_polygon_start);
            dists.push(out.xi.points[0].dist(config.q));
        }
        assert!(
            dists[1] < dists[0],
            "|xi - q| did not shrink: {dists:?}"
        );
    }

    #[test]
    fn landscape_marks_invalid_points_and_is_symmetric() {
        let config = bump_config(60.0);
        let spec = MeshSpec { h_global: 0.12, h_at_q: 1e-3, h_at_spikes: 1e-3 };
        let cache = GreenCache::new(&config, spec).unwrap();
        let shape = ShapeConstants { k_weighted: 0.78, k_standard: -0.84 };
        let n = 8;
        let rows = landscape_scan(&config, &cache, shape, n).unwrap();
        assert_eq!(rows.len(), n * n);
        assert!(rows.iter().any(|r| !r.valid));
        let valid: Vec<&LandscapeRow> = rows.iter().filter(|r| r.valid).collect();
        assert!(!valid.is_empty());
        // mirror symmetry in x (radially symmetric problem, symmetric grid)
        for r in &valid {
            if let Some(mirror) = valid
                .iter()
                .find(|s| (s.x + r.x).abs() < 1e-12 && (s.y - r.y).abs() < 1e-12)
            {
                assert!(
                    (mirror.f_asym - r.f_asym).abs() < 1e-8,
                    "asymmetry {} vs {}",
                    r.f_asym,
                    mirror.f_asym
                );
            }
        }
        // grid maximum should not beat the optimizer by more than grid slack
        let out = maximize_reduced_energy(
            &config,
            &cache,
            shape,
            None,
            MaximizeOptions { n_starts: 3, seed: 5, max_sweeps: 25 },
        )
        .unwrap();
        let grid_max = valid.iter().map(|r| r.f_asym).fold(f64::NEG_INFINITY, f64::max);
        assert!(out.report.f_asym >= grid_max - 1e-4 * grid_max.abs());
    }
}
