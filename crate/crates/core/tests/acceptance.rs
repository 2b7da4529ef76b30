//! Acceptance suite. One test per criterion; each prints a PASS line with
//! the measured quantity once its assertions hold (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

mod common;

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use swingnet::{
    check_spr, classify_single, damping_bounds, energy_diagnostics, log_omega_grid, network_modes,
    predict_consensus, simulate, spectrum, transfer_g, DisturbanceShape, GridParams,
    LaplacianWeights, Method, NetworkSystem, NetworkVerdict, Scenario, SectorDisturbance,
    SimConfig, SprVerdict, Topology, TransientKind,
};

use common::{
    expm, general_eigenvalues, multiset_distance, seeded_rng, transfer_g_by_linear_solve,
};

fn homogeneous(topo: Topology, damping: f64) -> NetworkSystem {
    let n = topo.node_count();
    NetworkSystem::assemble(topo, vec![1.0; n], vec![damping; n]).unwrap()
}

#[test]
fn criterion_1_nigerian_spectrum() {
    let start = Instant::now();
    let sc = Scenario::nigeria();
    let s = spectrum(&sc.topology.laplacian(LaplacianWeights::Unit)).unwrap();
    let mu_max = s.max();
    let elapsed = start.elapsed();
    assert!(
        (mu_max - 5.1748).abs() <= 5e-4,
        "mu_tilde_max = {mu_max}, expected 5.1748 +- 5e-4"
    );
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, limit 1 s");
    println!(
        "PASS criterion 1: Nigerian spectrum mu_tilde_max = {mu_max:.5} (target 5.1748 +- 5e-4) in {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_2_damping_bound_replication() {
    let (no_osc, osc) = damping_bounds(4);
    assert!((no_osc - 32f64.sqrt()).abs() <= 1e-12);
    assert!((osc - 4.0).abs() <= 1e-12);

    let sc = Scenario::nigeria();
    let s = spectrum(&sc.topology.laplacian(LaplacianWeights::Unit)).unwrap();
    for (d, expect) in [
        (1.0, NetworkVerdict::ComplexModeExists),
        (3.0, NetworkVerdict::ComplexModeExists),
        (6.0, NetworkVerdict::AllRealGuaranteed),
    ] {
        let nc = network_modes(&s, d, Some(4)).unwrap();
        assert_eq!(nc.overall, expect, "D = {d}");
        assert_eq!(nc.by_inspection(), expect, "inspection at D = {d}");
    }
    println!(
        "PASS criterion 2: d_max = 4 bounds ({no_osc:.4}, {osc:.4}); D = 1, 3 complex, D = 6 all-real"
    );
}

#[test]
fn criterion_3_spectral_factorization_equivalence() {
    let start = Instant::now();
    let graphs = [
        Topology::chain(3).unwrap(),
        Topology::chain(5).unwrap(),
        Scenario::nigeria().topology,
    ];
    let mut rng = seeded_rng(33);
    let mut worst_overall = 0.0f64;
    for topo in &graphs {
        let n = topo.node_count();
        let s = spectrum(&topo.laplacian(LaplacianWeights::Unit)).unwrap();
        for _ in 0..100 {
            let damping = rng.gen_range(0.005..8.0);
            let nc = network_modes(&s, damping, None).unwrap();
            let factored: Vec<_> = nc
                .per_mode
                .iter()
                .flat_map(|m| [m.lambda_plus, m.lambda_minus])
                .collect();
            let sys = homogeneous(topo.clone(), damping);
            let oracle = general_eigenvalues(sys.state_matrix());
            let worst = multiset_distance(&factored, &oracle).unwrap();
            assert!(
                worst < 1e-8,
                "n = {n}, D = {damping}: worst pairing distance {worst:.3e}"
            );
            worst_overall = worst_overall.max(worst);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, limit 10 s");
    println!(
        "PASS criterion 3: 300 factorization trials, worst eigenvalue gap {worst_overall:.2e} (tol 1e-8) in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_4_single_grid_thresholds() {
    let mut rng = seeded_rng(44);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = GridParams::new(
            rng.gen_range(0.05..10.0),
            rng.gen_range(0.05..10.0),
            rng.gen_range(0.05..10.0),
        )
        .unwrap();
        let class = classify_single(&p);
        let a = p.a_matrix();
        let oracle = general_eigenvalues(&nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[a[0][0], a[0][1], a[1][0], a[1][1]],
        ));
        let ours = vec![class.eigenvalues.0, class.eigenvalues.1];
        let gap = multiset_distance(&ours, &oracle).unwrap();
        assert!(gap < 1e-10, "eigenvalue gap {gap:.3e} for {p:?}");
        worst = worst.max(gap);
    }
    // Exact critical damping D = 2 sqrt(T M) reports Boundary.
    for (m, t) in [(1.0f64, 1.0), (2.0, 0.5), (4.0, 2.25)] {
        let d = 2.0 * (t * m).sqrt();
        let class = classify_single(&GridParams::new(m, d, t).unwrap());
        assert_eq!(class.kind, TransientKind::Boundary, "M = {m}, T = {t}");
    }
    println!(
        "PASS criterion 4: 1000 random draws, worst eigenvalue gap {worst:.2e} (tol 1e-10); critical damping reports Boundary"
    );
}

#[test]
fn criterion_5_consensus_and_conservation() {
    let mut max_drift = 0.0f64;
    let mut max_rel = 0.0f64;
    for (topo, damping) in [
        (Topology::unit_from_pairs(2, &[(0, 1)]).unwrap(), 2.0),
        (Topology::chain(3).unwrap(), 4.0),
        (Scenario::nigeria().topology, 1.0),
    ] {
        let n = topo.node_count();
        let sys = homogeneous(topo.clone(), damping);
        let x0 = swingnet::random_initial_state(&sys, 55);

        // Conservation over 500 RK4 steps at dt = 0.01.
        let cfg = SimConfig {
            dt: 0.01,
            steps: 500,
            method: Method::Rk4,
            ..Default::default()
        };
        let r = simulate(&sys, &x0, &cfg, None).unwrap();
        let diag = energy_diagnostics(&r, &sys).unwrap();
        let drift = diag
            .iter()
            .map(|&(_, v)| (v - diag[0].1).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-8, "n = {n}: total power drift {drift:.3e}");
        max_drift = max_drift.max(drift);

        // Terminal frequency once the slowest nonzero mode decayed by 1e8.
        let s = spectrum(&topo.laplacian(LaplacianWeights::Unit)).unwrap();
        let slowest = network_modes(&s, damping, None)
            .unwrap()
            .per_mode
            .iter()
            .flat_map(|m| [m.lambda_plus, m.lambda_minus])
            .filter(|l| l.re < -1e-9)
            .map(|l| -l.re)
            .fold(f64::INFINITY, f64::min);
        let steps = ((1e8f64).ln() / slowest / 0.01).ceil() as usize;
        let cfg = SimConfig {
            dt: 0.01,
            steps,
            method: Method::Rk4,
            ..Default::default()
        };
        let r = simulate(&sys, &x0, &cfg, None).unwrap();
        let (f_star, _) = predict_consensus(&x0[n..], damping).unwrap();
        let last = r.samples() - 1;
        for j in 0..n {
            let rel = (r.frequencies()[(last, j)] - f_star).abs() / f_star.abs();
            assert!(rel <= 1e-6, "node {j}: relative gap {rel:.3e}");
            max_rel = max_rel.max(rel);
        }
    }
    println!(
        "PASS criterion 5: max power drift {max_drift:.2e} (tol 1e-8), max terminal frequency error {max_rel:.2e} relative (tol 1e-6)"
    );
}

#[test]
fn criterion_6_band_replication() {
    let sc = Scenario::nigeria();
    let spec = sc.sim.rescale.unwrap();
    let (f_lo, f_hi) = spec.frequency_band();
    let (p_lo, p_hi) = spec.power_band();
    let mut slowest_run = 0.0f64;
    for damping in [1.0, 3.0, 6.0] {
        let sys =
            NetworkSystem::assemble(sc.topology.clone(), sc.inertias.clone(), vec![damping; 11])
                .unwrap();
        for seed in 0..20 {
            let start = Instant::now();
            let x0 = swingnet::random_initial_state(&sys, seed);
            let cfg = SimConfig {
                seed,
                ..sc.sim.clone()
            };
            let r = simulate(&sys, &x0, &cfg, None).unwrap();
            slowest_run = slowest_run.max(start.elapsed().as_secs_f64());
            assert_eq!(r.units(), swingnet::Units::Physical);
            for v in r.frequencies().iter() {
                assert!(
                    (f_lo..=f_hi).contains(v),
                    "D = {damping}, seed {seed}: frequency {v} outside [{f_lo}, {f_hi}]"
                );
            }
            for v in r.powers().iter() {
                assert!(
                    (p_lo..=p_hi).contains(v),
                    "D = {damping}, seed {seed}: power {v} outside [{p_lo}, {p_hi}]"
                );
            }
        }
    }
    assert!(
        slowest_run < 5.0,
        "slowest run took {slowest_run:.2} s, limit 5 s"
    );
    println!(
        "PASS criterion 6: 60 rescaled runs inside [{f_lo}, {f_hi}] Hz and [{p_lo}, {p_hi}] MWh; slowest run {:.1} ms",
        slowest_run * 1e3
    );
}

#[test]
fn criterion_7_integrator_correctness() {
    // RK4 against the scaling-and-squaring matrix exponential at t = 1.
    let mut worst_exp = 0.0f64;
    for (topo, x0) in [
        (
            Topology::unit_from_pairs(2, &[(0, 1)]).unwrap(),
            vec![0.2, 0.8, 0.5, 0.5],
        ),
        (
            Topology::chain(3).unwrap(),
            vec![0.9, 0.1, 0.4, 0.3, 0.6, 0.2],
        ),
    ] {
        let sys = homogeneous(topo, 1.0);
        let cfg = SimConfig {
            dt: 0.001,
            steps: 1000,
            method: Method::Rk4,
            ..Default::default()
        };
        let r = simulate(&sys, &x0, &cfg, None).unwrap();
        let exact = expm(sys.state_matrix()) * DVector::from_vec(x0.clone());
        let last = r.samples() - 1;
        for (g, e) in r.state_at(last).iter().zip(exact.iter()) {
            let gap = (g - e).abs();
            assert!(gap < 1e-6, "gap {gap:.3e}");
            worst_exp = worst_exp.max(gap);
        }
    }

    // Euler-vs-RK4 terminal gap shrinks by >= 1.8 per dt halving.
    let sys = homogeneous(Topology::unit_from_pairs(2, &[(0, 1)]).unwrap(), 3.0);
    let x0 = [0.2, 0.8, 0.5, 0.5];
    let mut gaps = Vec::new();
    let mut dt = 0.02f64;
    for _ in 0..4 {
        let steps = (1.0 / dt).round() as usize;
        let euler = SimConfig {
            dt,
            steps,
            method: Method::Euler,
            ..Default::default()
        };
        let rk4 = SimConfig {
            dt,
            steps,
            method: Method::Rk4,
            ..Default::default()
        };
        let xe = simulate(&sys, &x0, &euler, None).unwrap();
        let xr = simulate(&sys, &x0, &rk4, None).unwrap();
        let last = xe.samples() - 1;
        let gap: f64 = xe
            .state_at(last)
            .iter()
            .zip(xr.state_at(last))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        gaps.push(gap);
        dt /= 2.0;
    }
    let mut min_ratio = f64::INFINITY;
    for pair in gaps.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(ratio >= 1.8, "gap ratio {ratio:.3} below 1.8");
        min_ratio = min_ratio.min(ratio);
    }
    println!(
        "PASS criterion 7: RK4 vs matrix exponential worst gap {worst_exp:.2e} (tol 1e-6); Euler gap ratio >= {min_ratio:.2} per halving"
    );
}

#[test]
fn criterion_8_spr_suite() {
    use num_complex::Complex64;
    let p = GridParams::new(1.0, 1.0, 1.0).unwrap();
    let grid = log_omega_grid(1e-3, 1e3, 200);
    let mut margins = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        let sys = swingnet::LureSystem::new(p, k).unwrap();
        let report = check_spr(&sys, &grid).unwrap();
        assert!(report.hurwitz);
        let (p1, p2) = report.poles;
        assert!((p1 - Complex64::new(-0.5, 0.866_025_403_784)).norm() < 1e-6);
        assert!((p2 - Complex64::new(-0.5, -0.866_025_403_784)).norm() < 1e-6);
        assert!(report.limit_ok, "Z(inf) + Z(inf)^T must be exactly 2I");
        assert_eq!(report.freq_sweep.len(), 200);
        assert_eq!(report.verdict, SprVerdict::StrictlyPositiveReal, "k = {k}");
        margins.push((k, report.margin()));
    }

    let sys = swingnet::LureSystem::new(p, 1.0).unwrap();
    let (z11, z22) = swingnet::scaled_hermitian_diagonal(&sys, 1.0);
    assert!((z11 - 4.0).abs() < 1e-12 && (z22 - 4.0).abs() < 1e-12);

    // Closed-form G against the generic linear-solve evaluation.
    let mut rng = seeded_rng(88);
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 100 {
        let pr = GridParams::new(
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
        )
        .unwrap();
        let s = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let g = match transfer_g(&pr, s) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let oracle = transfer_g_by_linear_solve(&pr, s);
        for i in 0..2 {
            for j in 0..2 {
                let rel = (g[i][j] - oracle[(i, j)]).norm() / oracle[(i, j)].norm().max(1.0);
                assert!(rel <= 1e-10, "entry ({i},{j}): relative gap {rel:.3e}");
                worst = worst.max(rel);
            }
        }
        checked += 1;
    }
    let margin_str: Vec<String> = margins
        .iter()
        .map(|(k, m)| format!("k={k}: {m:.3}"))
        .collect();
    println!(
        "PASS criterion 8: poles -0.5 +- 0.866i, limit 2I exact, z11(1) = z22(1) = 4, sweep margins [{}], G closed-form vs solve worst {worst:.2e}",
        margin_str.join(", ")
    );
}

#[test]
fn criterion_9_sector_disturbance_runs() {
    let p = GridParams::new(1.0, 1.0, 1.0).unwrap();
    let sys = NetworkSystem::single_grid(&p);
    let cfg = SimConfig {
        dt: 0.01,
        steps: 1000,
        method: Method::Rk4,
        ..Default::default()
    };
    let mut bounds = Vec::new();
    for xi in [1.0, 5.0, 10.0] {
        let dist = SectorDisturbance::new(2.0, xi, DisturbanceShape::PaperSinusoid).unwrap();
        let x0 = swingnet::random_initial_state(&sys, 99);
        let r = simulate(&sys, &x0, &cfg, Some(&dist)).unwrap();
        let bound = r
            .frequencies()
            .iter()
            .chain(r.powers().iter())
            .map(|v| v.abs())
            .fold(0.0f64, f64::max);
        assert!(
            bound.is_finite() && bound < 10.0,
            "xi = {xi}: bound {bound}"
        );
        bounds.push(bound);
    }

    // Identity shape reproduces the undisturbed trajectory bit for bit.
    let x0 = swingnet::random_initial_state(&sys, 100);
    let plain = simulate(&sys, &x0, &cfg, None).unwrap();
    let identity = SectorDisturbance::new(1.0, 1.0, DisturbanceShape::Identity).unwrap();
    let disturbed = simulate(&sys, &x0, &cfg, Some(&identity)).unwrap();
    assert_eq!(plain, disturbed);
    println!(
        "PASS criterion 9: sinusoid runs bounded (max |state| = {:.3}); identity shape bit-identical",
        bounds.iter().fold(0.0f64, |a, &b| a.max(b))
    );
}
