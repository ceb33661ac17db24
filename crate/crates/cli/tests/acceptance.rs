//! Acceptance gate: one test per shipped guarantee, each printing a
//! `acceptance N: PASS` line (run with `--nocapture` to see them). Every
//! tolerance is pinned here, not in helper code.

use std::time::Instant;

use loopaction::action::LsField;
use loopaction::bounds::{apriori_radius, wbd_radius, wbd_soundness, OmegaSpec};
use loopaction::config::SolverConfig;
use loopaction::dynamics::{find_all, homotopy_track, morse_filtration};
use loopaction::hamiltonian::{catalog, HomotopyFamily};
use loopaction::loops::{random_loop, TWO_PI};
use loopaction::topology::{
    binomial, cup_length, exterior_algebra, sphere_ring, standard_instances, subadditivity_check,
    suspension_model, CoeffField, CupLengthOptions, GradedModule,
};
use loopaction::action::EmbeddedPoint;
use loopaction_cli::report::strip_timings;
use loopaction_cli::{run, Command};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn criterion_01_arnold_bound_n1() {
    let start = Instant::now();
    let cfg = SolverConfig::for_catalog("cosine-morse", 1, 8);
    let report = run(Command::Solve, &cfg).expect("solve pipeline");
    let orbits = report.orbits.as_ref().expect("orbit section");

    assert_eq!(orbits.count, 4, "exactly the four near-constant orbits");
    for orbit in &orbits.orbit {
        assert!(orbit.residual < 1e-9, "gradient residual {}", orbit.residual);
        let gap = orbit.period_gap.expect("ode check ran");
        assert!(gap < 1e-4, "period-map residual {gap}");
    }
    assert!(report.verdict.arnold_pass && report.verdict.found >= 3);
    assert!(report.verdict.pass);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!("acceptance 1: PASS — 4 orbits ≥ 3, residuals < 1e-9, period maps < 1e-4, {elapsed:?}");
}

#[test]
fn criterion_02_arnold_bound_n2() {
    let start = Instant::now();
    let cfg = SolverConfig::for_catalog("cosine-morse", 2, 6);
    let report = run(Command::Solve, &cfg).expect("solve pipeline");
    assert_eq!(report.verdict.found, 16, "product structure gives 2^4 orbits");
    assert!(report.verdict.found >= 5);
    assert!(report.verdict.pass);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?}");
    println!("acceptance 2: PASS — 16 orbits ≥ 5 on T⁴, {elapsed:?}");
}

#[test]
fn criterion_03_time_dependent_galerkin_stability() {
    let cfg8 = SolverConfig::for_catalog("time-driven", 1, 8);
    let cfg16 = SolverConfig::for_catalog("time-driven", 1, 16);
    let set8 = find_all(&cfg8.field().unwrap(), &cfg8).expect("N=8 search");
    let set16 = find_all(&cfg16.field().unwrap(), &cfg16).expect("N=16 search");

    assert!(set8.count() >= 3);
    assert_eq!(set8.count(), set16.count(), "orbit count stable in N");
    let mut actions8: Vec<f64> = set8.orbits.iter().map(|o| o.action).collect();
    let mut actions16: Vec<f64> = set16.orbits.iter().map(|o| o.action).collect();
    actions8.sort_by(f64::total_cmp);
    actions16.sort_by(f64::total_cmp);
    for (a, b) in actions8.iter().zip(&actions16) {
        assert!((a - b).abs() < 1e-6, "action drift {} vs {}", a, b);
    }
    println!(
        "acceptance 3: PASS — {} time-dependent orbits at N=8 and N=16, actions match to 1e-6",
        set8.count()
    );
}

#[test]
fn criterion_04_cup_length_certificates() {
    let start = Instant::now();
    let opts = CupLengthOptions::default();
    for n in [1usize, 2, 3] {
        let ring = exterior_algebra(2 * n, CoeffField::Rationals);
        let module = GradedModule::over_self(&ring);
        let cert = cup_length(&module, &ring, &opts);
        assert_eq!(cert.value, 2 * n + 1);
        assert_eq!(cert.witness.len(), 2 * n + 1, "β plus 2n factors");
        for factor in &cert.witness[1..] {
            assert!(
                factor.starts_with('x') && !factor.contains('∧'),
                "chain of degree-1 generators, got {factor}"
            );
        }
    }
    let sphere = sphere_ring(2, CoeffField::Rationals);
    assert_eq!(cup_length(&GradedModule::over_self(&sphere), &sphere, &opts).value, 2);
    assert_eq!(cup_length(&GradedModule::zero(&sphere), &sphere, &opts).value, 0);
    let point_ring = exterior_algebra(0, CoeffField::Rationals);
    assert_eq!(cup_length(&GradedModule::point(&point_ring), &point_ring, &opts).value, 1);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!("acceptance 4: PASS — CL(Λ(2n)) = 2n+1 for n=1,2,3; sphere 2, zero 0, point 1, {elapsed:?}");
}

#[test]
fn criterion_05_filtration_inequality() {
    let opts = CupLengthOptions::default();
    let mut checked = Vec::new();
    for key in ["cosine-morse", "time-driven"] {
        let cfg = SolverConfig::for_catalog(key, 1, 8);
        let field = cfg.field().unwrap();
        let set = find_all(&field, &cfg).expect("catalog search");
        let filtration = morse_filtration(&field, &set, &cfg).expect("filtration");
        let ring = exterior_algebra(2, CoeffField::Rationals);
        let cl = cup_length(&GradedModule::over_self(&ring), &ring, &opts).value;
        assert!(
            filtration.level_count >= cl,
            "{key}: k = {} < CL = {cl}",
            filtration.level_count
        );
        if key == "cosine-morse" {
            assert_eq!(filtration.level_count, 3, "min/saddle-pair/max by symmetry");
        }
        checked.push((key, filtration.level_count, cl));
    }
    println!("acceptance 5: PASS — critical-value counts dominate the cup-length: {checked:?}");
}

#[test]
fn criterion_06_gradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let ham = catalog("time-driven", 1).unwrap();
    let field = LsField::with_default_samples(ham, 6);
    let step = 1e-5;

    // directional derivatives at 10 random loops in 20 random directions
    for _ in 0..10 {
        let x = random_loop(&mut rng, 1, 6, 0.4);
        let g = field.gradient(&x).unwrap();
        for _ in 0..20 {
            let dir = random_loop(&mut rng, 1, 6, 1.0);
            let mut xp = x.clone();
            xp.axpy(step, &dir);
            let mut xm = x.clone();
            xm.axpy(-step, &dir);
            let fd = (field.action_value(&xp).unwrap() - field.action_value(&xm).unwrap())
                / (2.0 * step);
            let predicted = g.h12_inner(&dir).unwrap();
            let rel = (fd - predicted).abs() / predicted.abs().max(1e-3);
            assert!(rel < 1e-6, "directional derivative defect {rel}");
        }
    }

    // Hessian symmetry
    for _ in 0..10 {
        let x = random_loop(&mut rng, 1, 6, 0.4);
        let op = field.hessian(&x).unwrap();
        let v = random_loop(&mut rng, 1, 6, 1.0);
        let w = random_loop(&mut rng, 1, 6, 1.0);
        let defect =
            (op.apply(&v).h12_inner(&w).unwrap() - op.apply(&w).h12_inner(&v).unwrap()).abs();
        assert!(defect < 1e-8, "asymmetry {defect}");
    }

    // spectral identity for a(x) against a dense quadrature of ½∫⟨−Jẋ, x⟩
    for _ in 0..10 {
        let x = random_loop(&mut rng, 1, 6, 1.0);
        let spectral = loopaction::action::quadratic_action(&x);
        let grid = 4096;
        let mut area = 0.0;
        for j in 0..grid {
            let t = j as f64 / grid as f64;
            let pos = x.evaluate_at(t);
            let mut vel = vec![0.0; 2];
            for k in x.mode_indices() {
                if k == 0 {
                    continue;
                }
                let rate = TWO_PI * k as f64;
                let (s, c) = (rate * t).sin_cos();
                let v = x.coeff(k);
                vel[0] += rate * (-s * v[0] - c * v[1]);
                vel[1] += rate * (c * v[0] - s * v[1]);
            }
            area += vel[1] * pos[0] - vel[0] * pos[1];
        }
        let quadrature = 0.5 * area / grid as f64;
        assert!(
            (spectral - quadrature).abs() < 1e-9,
            "a(x) identity defect {}",
            (spectral - quadrature).abs()
        );
    }
    println!("acceptance 6: PASS — directional derivatives < 1e-6, symmetry < 1e-8, a(x) identity < 1e-9");
}

#[test]
fn criterion_07_apriori_bound_soundness() {
    let cfg = SolverConfig::for_catalog("cosine-morse", 1, 6);
    let family = HomotopyFamily::new(cfg.hamiltonian().unwrap());
    let omega = OmegaSpec::standard(cfg.problem.cutoff);

    let field = cfg.field().unwrap();
    let set = find_all(&field, &cfg).expect("search");
    let apriori = apriori_radius(&family, cfg.wbd.epsilon, &omega, Some(&set.critical_values))
        .expect("ledger");
    for orbit in &set.orbits {
        assert!(EmbeddedPoint::from_loop(&orbit.orbit).norm() <= apriori.radius);
    }
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let stages = homotopy_track(&family, &grid, &cfg).expect("track");
    for stage in &stages {
        for orbit in &stage.orbits.orbits {
            assert!(
                EmbeddedPoint::from_loop(&orbit.orbit).norm() <= apriori.radius,
                "λ = {} orbit escapes B(R)",
                stage.lambda
            );
        }
    }

    let wbd = wbd_radius(&family, cfg.wbd.epsilon, &omega).expect("radius");
    let soundness = wbd_soundness(
        &family,
        cfg.wbd.epsilon,
        &omega,
        wbd.r0,
        1,
        10_000,
        cfg.samples(),
        4321,
    )
    .expect("sampling");
    assert!(soundness.pass, "{} violations", soundness.violations);
    println!(
        "acceptance 7: PASS — R = {:.2} dominates all orbits across λ; 10⁴-sample soundness (min grad {:.3})",
        apriori.radius, soundness.min_gradient_norm
    );
}

#[test]
fn criterion_08_homotopy_continuation_proxy() {
    let cfg = SolverConfig::for_catalog("cosine-morse", 1, 6);
    let report = run(Command::Homotopy, &cfg).expect("homotopy pipeline");
    let homotopy = report.homotopy.as_ref().expect("homotopy section");
    for stage in &homotopy.stage {
        if stage.lambda < 1.0 {
            assert!(
                stage.orbits.count() >= 3,
                "λ = {}: count {} < 3",
                stage.lambda,
                stage.orbits.count()
            );
        } else {
            assert!(stage.degenerate, "λ = 1 must be flagged degenerate");
            for orbit in &stage.orbits.orbits {
                assert_eq!(orbit.kernel_dim(), 2, "constant-loop torus kernel");
            }
        }
    }
    assert!(report.verdict.pass);
    println!("acceptance 8: PASS — counts ≥ 3 for λ < 1; λ = 1 degenerate with kernel dim 2");
}

#[test]
fn criterion_09_suspension_stabilization() {
    for n in [1usize, 2] {
        let table = suspension_model(n, &[0, 1, 2, 3, 4, 5]).expect("table");
        assert!(table.stabilized(), "rows must differ by pure shifts");
        for row in &table.rows {
            for (degree, dim) in &row.dims {
                assert_eq!(
                    *dim,
                    binomial(2 * n, degree - row.shift),
                    "Betti pattern of T^{} shifted by {}",
                    2 * n,
                    row.shift
                );
            }
        }
    }
    println!("acceptance 9: PASS — suspension tables for d = 0..5 are pure shifts of the torus Betti pattern");
}

#[test]
fn criterion_10_subadditivity_suite() {
    let opts = CupLengthOptions::default();
    let mut total = 0;
    for field in [CoeffField::Rationals, CoeffField::TwoElement] {
        for m in [2usize, 3] {
            let outcomes =
                subadditivity_check(&standard_instances(m, field).expect("instances"), &opts);
            for outcome in &outcomes {
                assert!(
                    outcome.pass,
                    "{}: {} > bound {}",
                    outcome.name, outcome.lhs_value, outcome.bound
                );
                total += 1;
            }
        }
    }
    println!("acceptance 10: PASS — {total} subadditivity instances hold over both fields");
}

#[test]
fn criterion_11_byte_identical_reports() {
    let cfg = SolverConfig::for_catalog("cosine-morse", 1, 6);
    let first = run(Command::Solve, &cfg).expect("first run").to_toml();
    let second = run(Command::Solve, &cfg).expect("second run").to_toml();
    assert_eq!(strip_timings(&first), strip_timings(&second));

    // a single-threaded pool must reproduce the same bytes
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool");
    let serial = pool
        .install(|| run(Command::Solve, &cfg))
        .expect("serial run")
        .to_toml();
    assert_eq!(strip_timings(&first), strip_timings(&serial));
    println!("acceptance 11: PASS — reports byte-identical modulo [timings], including across thread counts");
}

#[test]
fn criterion_01b_solve_report_verdict_consistency() {
    // the report's verdict must reflect its own counts
    let cfg = SolverConfig::for_catalog("cosine-morse", 1, 8);
    let report = run(Command::Solve, &cfg).expect("solve pipeline");
    let orbits = report.orbits.as_ref().unwrap();
    assert_eq!(report.verdict.found, orbits.count);
    assert_eq!(report.verdict.required, 3);
    assert_eq!(
        report.verdict.arnold_pass,
        orbits.count >= report.verdict.required
    );
    assert_eq!(report.exit_code(), 0);
    println!("acceptance: verdict fields are consistent with the orbit section");
}
