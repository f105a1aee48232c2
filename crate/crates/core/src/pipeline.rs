//! High-level orchestration: one entry point per pipeline stage, shared by
//! the CLI commands, the acceptance suite, and the integration tests.

use crate::ansatz::{assemble_ansatz, AnsatzField};
use crate::error::Result;
use crate::geometry::{generate_mesh, GradingCenter, Mesh, Point, SpikeConfiguration};
use crate::greenfn::{greens_function, GreensField, NeumannOperator, PoleTag};
use crate::params::{
    solve_mu_system, GreenData, MomentConstants, MuSolution, MuSystem,
};
use crate::problem::ProblemConfig;
use crate::profiles::{Family, ProfilePair};
use std::sync::Arc;

/// Solved profile pairs for both families plus the moment constants they
/// induce. Profiles depend only on alpha, so one bundle serves a whole
/// p-ladder.
#[derive(Clone)]
pub struct ProfileBundle {
    pub henon: ProfilePair,
    pub standard: ProfilePair,
    pub consts: MomentConstants,
}

impl ProfileBundle {
    pub fn solve(alpha: f64) -> Result<ProfileBundle> {
        let henon = ProfilePair::solve(Family::Henon { alpha })?;
        let standard = ProfilePair::solve(Family::Standard)?;
        let consts = MomentConstants {
            c1: henon.omega1.far_coeff,
            c2: henon.omega2.far_coeff,
            c1_std: standard.omega1.far_coeff,
            c2_std: standard.omega2.far_coeff,
        };
        Ok(ProfileBundle { henon, standard, consts })
    }
}

/// Mesh resolution knobs for a pipeline run.
#[derive(Debug, Clone, Copy)]
pub struct MeshSpec {
    pub h_global: f64,
    /// target h at the singular source (grading center)
    pub h_at_q: f64,
    /// target h at each spike
    pub h_at_spikes: f64,
}

impl MeshSpec {
    pub fn build(&self, config: &ProblemConfig, xi: &[Point]) -> Result<Arc<Mesh>> {
        let mut centers = vec![GradingCenter { point: config.q, h: self.h_at_q }];
        for &x in xi {
            centers.push(GradingCenter { point: x, h: self.h_at_spikes });
        }
        Ok(Arc::new(generate_mesh(&config.domain, &centers, self.h_global)?))
    }
}

/// Green fields for the source and every spike, plus the scalar data the
/// mu-system needs. Fields are solved on the shared operator (one assembled
/// matrix and factorization for all poles).
pub struct GreenBundle {
    /// pole at q first, then one per spike
    pub fields: Vec<Arc<GreensField>>,
    pub data: GreenData,
}

pub fn green_bundle(
    op: &NeumannOperator,
    config: &ProblemConfig,
    xi: &[Point],
) -> Result<GreenBundle> {
    let q_tag = if config.q_on_boundary { PoleTag::Boundary } else { PoleTag::Interior };
    let mut fields = vec![Arc::new(greens_function(op, config.q, q_tag)?)];
    for (i, &x) in xi.iter().enumerate() {
        let tag = if i < config.l { PoleTag::Interior } else { PoleTag::Boundary };
        fields.push(Arc::new(greens_function(op, x, tag)?));
    }
    let m = xi.len();
    let mut data = GreenData {
        h_qq: fields[0].robin,
        h_ii: (0..m).map(|i| fields[i + 1].robin).collect(),
        g_q_xi: (0..m).map(|k| fields[k + 1].g_at(config.q)).collect(),
        g_xi_q: (0..m).map(|i| fields[0].g_at(xi[i])).collect(),
        g_xi_xi: vec![vec![0.0; m]; m],
    };
    for i in 0..m {
        for k in 0..m {
            if i != k {
                data.g_xi_xi[i][k] = fields[k + 1].g_at(xi[i]);
            }
        }
    }
    Ok(GreenBundle { fields, data })
}

pub fn mu_system_for(
    config: &ProblemConfig,
    xi: &[Point],
    green: GreenData,
    consts: MomentConstants,
) -> MuSystem {
    MuSystem {
        p: config.p,
        alpha: config.alpha,
        c0: config.c0(),
        c: (0..xi.len()).map(|i| config.c_i(i)).collect(),
        log_dist_q: xi.iter().map(|x| x.dist(config.q).ln()).collect(),
        green,
        consts,
    }
}

/// Everything the downstream stages need from one constructed ansatz.
pub struct ConstructedAnsatz {
    pub ansatz: AnsatzField,
    pub greens: Vec<Arc<GreensField>>,
    pub mu: MuSolution,
    pub op: Arc<NeumannOperator>,
}

/// Full construction: Green data, mu-system solve, correction fields.
pub fn construct_ansatz(
    config: &ProblemConfig,
    xi: &SpikeConfiguration,
    op: Arc<NeumannOperator>,
    bundle: &ProfileBundle,
) -> Result<ConstructedAnsatz> {
    let gb = green_bundle(&op, config, &xi.points)?;
    let sys = mu_system_for(config, &xi.points, gb.data, bundle.consts);
    let mu = solve_mu_system(&sys)?;
    let ansatz = assemble_ansatz(config, xi, &mu, op.clone(), &bundle.henon, &bundle.standard)?;
    Ok(ConstructedAnsatz { ansatz, greens: gb.fields, mu, op })
}

/// Reference m = 0 construction on the unit disk with constant coefficient,
/// used by tests and examples: q at the origin, moderate grading.
pub fn test_m0_disk(p: f64, alpha: f64) -> ConstructedAnsatz {
    use crate::geometry::{build_domain, project_to_config_space, DomainSpec};
    use crate::problem::CoefficientModel;
    let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
    let config = ProblemConfig::new(
        d,
        CoefficientModel::Constant { value: 1.0 },
        Point::new(0.0, 0.0),
        alpha,
        p,
        0,
        0,
        None,
    )
    .unwrap();
    let spec = MeshSpec { h_global: 0.1, h_at_q: 2e-5, h_at_spikes: 2e-5 };
    let mesh = spec.build(&config, &[]).unwrap();
    let op = Arc::new(NeumannOperator::new(mesh, config.coeff.clone()).unwrap());
    let bundle = ProfileBundle::solve(alpha).unwrap();
    let xi = project_to_config_space(&[], &config);
    construct_ansatz(&config, &xi, op, &bundle).unwrap()
}
