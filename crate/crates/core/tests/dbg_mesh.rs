use henon_spikes::geometry::{build_domain, generate_mesh, DomainSpec, GradingCenter, Point};

#[test]
#[ignore]
fn dump_bad_triangles() {
    let d = build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap();
    let r = generate_mesh(&d, &[GradingCenter { point: Point::new(0.0, 0.0), h: 1e-40 }], 0.15);
    match r {
        Ok(_) => println!("mesh ok"),
        Err(e) => println!("err {e}"),
    }
}

#[test]
#[ignore]
fn dump_residual_ladder() {
    for &p in &[40.0f64, 80.0, 160.0, 320.0] {
        let t0 = std::time::Instant::now();
        let c = henon_spikes::pipeline::test_m0_disk(p, 0.5);
        let cloud = henon_spikes::ansatz::sample_cloud(&c.ansatz);
        let rep = henon_spikes::ansatz::residual_norm(&c.ansatz, &cloud).unwrap();
        println!(
            "p={p}: ||R||*={:.4e} mu0={:.5} sup={:.5} samples={} ({:.2?})",
            rep.norm,
            c.mu.mu[0],
            c.ansatz.sup_near(0, 3.0),
            rep.samples,
            t0.elapsed()
        );
    }
}

#[test]
#[ignore]
fn dump_f_profile() {
    use henon_spikes::energy::{GreenCache, ShapeConstants};
    use henon_spikes::geometry::{build_domain, project_to_config_space, DomainSpec};
    use henon_spikes::pipeline::MeshSpec;
    use henon_spikes::problem::{CoefficientModel, ProblemConfig};
    let config = ProblemConfig::new(
        build_domain(&DomainSpec::Disk { radius: 1.0 }).unwrap(),
        CoefficientModel::GaussianBump { amplitude: 1.0, x0: (0.0, 0.0), sigma: 0.25 },
        Point::new(0.0, 0.0),
        0.5,
        80.0,
        1,
        1,
        None,
    )
    .unwrap();
    let spec = MeshSpec { h_global: 0.1, h_at_q: 1e-4, h_at_spikes: 1e-4 };
    let cache = GreenCache::new(&config, spec).unwrap();
    let shape = ShapeConstants {
        k_weighted: -0.841116916642 + 4.0 * 1.5f64.ln(),
        k_standard: -0.841116916642,
    };
    println!("d = {}", config.d);
    for k in 1..25 {
        let r = 0.01 * k as f64;
        let sc = project_to_config_space(&[Point::new(r, 0.0)], &config);
        if !sc.feasible { println!("r={r}: infeasible"); continue; }
        let green = cache.green_data(&sc).unwrap();
        let rep = henon_spikes::energy::reduced_energy_asymptotic(&config, &sc.points, &green, shape).unwrap();
        println!("r={r:.3}: F={:.8} Hxx={:.5} Gxq={:.5} a={:.4}", rep.f_asym, green.h_ii[0], green.g_xi_q[0], config.coeff.value(sc.points[0]));
    }
}
