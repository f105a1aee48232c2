//! The spike configuration space: tuples kept p^{-kappa}-separated from each
//! other, from the singular source, and (interior spikes) from the boundary,
//! all inside the ball B_d(q).

use super::Point;
use crate::problem::ProblemConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpikeTag {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpikeConfiguration {
    pub points: Vec<Point>,
    pub tags: Vec<SpikeTag>,
    /// kappa = 2 (m + 1 + alpha)^2
    pub kappa: f64,
    /// Minimum margin over the separation constraints (positive iff all hold);
    /// +inf for the empty configuration.
    pub slack: f64,
    /// False when the constraints could not be met by moving each raw point
    /// less than p^{-kappa}.
    pub feasible: bool,
}

impl SpikeConfiguration {
    pub fn empty(kappa: f64) -> Self {
        SpikeConfiguration {
            points: Vec::new(),
            tags: Vec::new(),
            kappa,
            slack: f64::INFINITY,
            feasible: true,
        }
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }
}

fn constraint_slack(points: &[Point], tags: &[SpikeTag], config: &ProblemConfig) -> f64 {
    let rp = config.sep_radius();
    let mut slack = f64::INFINITY;
    for (i, &xi) in points.iter().enumerate() {
        slack = slack.min(xi.dist(config.q) - rp);
        slack = slack.min(config.d - xi.dist(config.q));
        for &xj in points.iter().skip(i + 1) {
            slack = slack.min(xi.dist(xj) - rp);
        }
        if tags[i] == SpikeTag::Interior {
            slack = slack.min(config.domain.signed_dist(xi) - rp);
        }
    }
    slack
}

/// Project raw points into the configuration space: interior-tagged points are
/// pushed inside the domain if needed, boundary-tagged points snapped onto the
/// boundary curve, all clamped into B_d(q). Sets the failure flag when the
/// separation constraints cannot be met by a further move smaller than
/// p^{-kappa} per point.
pub fn project_to_config_space(raw: &[Point], config: &ProblemConfig) -> SpikeConfiguration {
    let kappa = config.kappa();
    if config.m == 0 || raw.is_empty() {
        return SpikeConfiguration::empty(kappa);
    }
    assert_eq!(raw.len(), config.m, "raw point count must equal m");
    let rp = config.sep_radius();
    let tol = config.domain.boundary_tol();

    let mut pts: Vec<Point> = raw.to_vec();
    let mut tags = Vec::with_capacity(config.m);
    for (i, p) in pts.iter_mut().enumerate() {
        let tag = if i < config.l { SpikeTag::Interior } else { SpikeTag::Boundary };
        match tag {
            SpikeTag::Boundary => {
                let (bp, _) = config.domain.closest_boundary(*p);
                *p = bp;
            }
            SpikeTag::Interior => {
                // push inside to clear the boundary constraint
                let sd = config.domain.signed_dist(*p);
                let need = 2.0 * rp.max(tol);
                if sd < need {
                    let (bp, nv) = config.domain.closest_boundary(*p);
                    *p = bp - nv * need;
                }
            }
        }
        // clamp into B_d(q), and off the singular source
        let dq = p.dist(config.q);
        if dq > config.d {
            *p = config.q + (*p - config.q) * ((config.d * (1.0 - 1e-9)) / dq);
            if tag == SpikeTag::Boundary {
                let (bp, _) = config.domain.closest_boundary(*p);
                *p = bp;
            }
        }
        let dq = p.dist(config.q);
        if dq < 2.0 * rp && dq < 1e-3 * config.d {
            let dir = if dq > 0.0 {
                (*p - config.q) * (1.0 / dq)
            } else {
                Point::new(1.0, 0.0)
            };
            *p = config.q + dir * (2.0 * rp).max(1e-3 * config.d);
        }
        tags.push(tag);
    }

    let slack = constraint_slack(&pts, &tags, config);
    let feasible = slack > 0.0;
    SpikeConfiguration { points: pts, tags, kappa, slack, feasible }
}
