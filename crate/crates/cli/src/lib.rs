//! Batch orchestration: runs the solver pipelines behind the subcommands and
//! assembles machine-readable reports.
//!
//! Exit codes: 0 verdict pass, 1 verdict fail, 2 usage/configuration error,
//! 3 numerical failure.

pub mod csv;
pub mod report;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use loopaction::action::{EmbeddedPoint, LsField};
use loopaction::bounds::{apriori_radius, wbd_soundness, OmegaSpec};
use loopaction::config::SolverConfig;
use loopaction::dynamics::{
    find_all, homotopy_track, integrate_flow, morse_filtration, verify_orbit, FlowOptions,
    MorseFiltration, OrbitSet,
};
use loopaction::hamiltonian::HomotopyFamily;
use loopaction::loops::FourierLoop;
use loopaction::selfcheck;
use loopaction::topology::{
    cup_length, exterior_algebra, sphere_ring, standard_instances, subadditivity_check,
    suspension_model, CupLengthOptions, GradedModule,
};

use report::{
    CuplengthSection, HomotopyReport, OrbitRecord, OrbitsSection, RunReport, SubadditivityReport,
    Timings, TrajectorySection, Verdict,
};

/// Subcommands of the batch front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Homotopy,
    Bound,
    Cuplength,
    Filtration,
    Selfcheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Homotopy => "homotopy",
            Command::Bound => "bound",
            Command::Cuplength => "cuplength",
            Command::Filtration => "filtration",
            Command::Selfcheck => "selfcheck",
        }
    }
}

/// Errors mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration → exit 2.
    Usage(String),
    /// The pipeline itself failed → exit 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

fn numerical(err: loopaction::Error) -> CliError {
    CliError::Numerical(err.to_string())
}

/// Reads and validates a configuration file; parse errors name the offending
/// field.
pub fn load_config(path: &Path) -> Result<SolverConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let cfg: SolverConfig = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
    cfg.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn cup_opts(cfg: &SolverConfig) -> CupLengthOptions {
    CupLengthOptions {
        random_per_degree: cfg.topology.random_per_degree,
        rng_seed: cfg.solver.rng_seed,
    }
}

fn torus_cuplength_section(cfg: &SolverConfig) -> Result<CuplengthSection, CliError> {
    let n = cfg.problem.n;
    let ring = exterior_algebra(2 * n, cfg.topology.field);
    let module = GradedModule::over_self(&ring);
    let certificate = cup_length(&module, &ring, &cup_opts(cfg));
    let fixture_certificate = match &cfg.topology.fixture {
        Some(fixture) => {
            let (ring, module) = fixture
                .build(cfg.topology.field)
                .map_err(|e| CliError::Usage(format!("topology fixture: {e}")))?;
            Some(cup_length(&module, &ring, &cup_opts(cfg)))
        }
        None => None,
    };
    Ok(CuplengthSection {
        expected: 2 * n + 1,
        computed: certificate.value,
        matches: certificate.value == 2 * n + 1,
        certificate,
        fixture_certificate,
    })
}

fn orbit_records(
    field: &LsField,
    cfg: &SolverConfig,
    set: &OrbitSet,
    with_ode: bool,
) -> (Vec<OrbitRecord>, bool, bool) {
    let mut residual_pass = true;
    let mut ode_pass = true;
    let records = set
        .orbits
        .iter()
        .map(|orbit| {
            residual_pass &= orbit.residual < cfg.solver.tol_residual;
            let ode = with_ode.then(|| {
                verify_orbit(
                    field.hamiltonian(),
                    &orbit.orbit,
                    cfg.solver.tol_ode,
                    cfg.solver.ode_steps,
                )
            });
            if let Some(ode) = &ode {
                ode_pass &= ode.pass;
            }
            OrbitRecord {
                action: orbit.action,
                residual: orbit.residual,
                degenerate: orbit.degenerate,
                kernel_dim: orbit.kernel_dim(),
                provenance: orbit.provenance.clone(),
                signature: [
                    orbit.signature.negative,
                    orbit.signature.zero,
                    orbit.signature.positive,
                ],
                x0: orbit.orbit.x0().to_vec(),
                period_gap: ode.as_ref().map(|o| o.period_gap),
                max_deviation: ode.as_ref().map(|o| o.max_deviation),
                ode_pass: ode.as_ref().map(|o| o.pass),
                fourier: orbit.orbit.clone(),
            }
        })
        .collect();
    (records, residual_pass, ode_pass)
}

fn orbits_section(
    cfg: &SolverConfig,
    set: &OrbitSet,
    records: Vec<OrbitRecord>,
) -> OrbitsSection {
    OrbitsSection {
        count: set.count(),
        required: 2 * cfg.problem.n + 1,
        seeds_tried: set.seeds_tried,
        seeds_failed: set.seeds_failed,
        any_degenerate: set.any_degenerate(),
        max_norm: set.max_norm(),
        critical_values: set.critical_values.clone(),
        warnings: set.warnings.clone(),
        orbit: records,
    }
}

fn diagnostic_trajectory(field: &LsField, cfg: &SolverConfig) -> Result<TrajectorySection, CliError> {
    let n = cfg.problem.n;
    let mut seed = FourierLoop::constant(&vec![0.06; 2 * n], cfg.problem.cutoff);
    seed.coeff_mut(1)[0] = 0.02;
    let opts = FlowOptions {
        t_final: 3.0,
        dt: 0.05,
        guard_radius: cfg.solver.guard_radius,
        ..FlowOptions::default()
    };
    let trajectory = integrate_flow(field, &seed, &opts).map_err(numerical)?;
    let samples: Vec<(f64, f64, f64)> = trajectory
        .times
        .iter()
        .zip(trajectory.states.iter().zip(&trajectory.actions))
        .map(|(&t, (state, &action))| (t, action, state.h12_norm()))
        .collect();
    let max_action_increase = trajectory.max_action_increase();
    Ok(TrajectorySection {
        steps: trajectory.times.len() - 1,
        rejected_steps: trajectory.rejected_steps,
        escaped: trajectory.escaped,
        start_action: trajectory.actions[0],
        final_action: *trajectory.actions.last().unwrap(),
        max_action_increase,
        monotone: max_action_increase <= 1e-10,
        samples,
    })
}

fn filtration_passes(filtration: &MorseFiltration, cuplength: usize) -> bool {
    filtration.level_count >= cuplength && filtration.probes.iter().all(|p| p.pass)
}

fn run_solve(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("solve", cfg.clone());
    let field = cfg.field().map_err(numerical)?;
    let required = 2 * cfg.problem.n + 1;

    let set = find_all(&field, cfg).map_err(numerical)?;
    let (records, residual_pass, ode_pass) = orbit_records(&field, cfg, &set, true);

    let filtration = if set.count() > 0 && !set.any_degenerate() {
        Some(morse_filtration(&field, &set, cfg).map_err(numerical)?)
    } else {
        None
    };

    let family = HomotopyFamily::new(field.hamiltonian().clone());
    let omega = OmegaSpec::standard(cfg.problem.cutoff);
    let values = set.critical_values.clone();
    let apriori = apriori_radius(
        &family,
        cfg.wbd.epsilon,
        &omega,
        (!values.is_empty()).then_some(values.as_slice()),
    )
    .map_err(numerical)?;
    let apriori_pass = set
        .orbits
        .iter()
        .all(|o| EmbeddedPoint::from_loop(&o.orbit).norm() <= apriori.radius);

    let cuplength = torus_cuplength_section(cfg)?;
    let filtration_pass = filtration
        .as_ref()
        .map(|f| filtration_passes(f, cuplength.computed))
        .unwrap_or(false);

    report.trajectory = Some(diagnostic_trajectory(&field, cfg)?);

    let arnold_pass = set.count() >= required;
    report.verdict = Verdict {
        required,
        found: set.count(),
        arnold_pass,
        residual_pass,
        ode_pass,
        apriori_pass,
        filtration_pass,
        pass: arnold_pass
            && residual_pass
            && ode_pass
            && apriori_pass
            && filtration_pass
            && cuplength.matches,
    };
    report.orbits = Some(orbits_section(cfg, &set, records));
    report.filtration = filtration;
    report.apriori = Some(apriori);
    report.cuplength = Some(cuplength);
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

fn run_homotopy(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("homotopy", cfg.clone());
    let required = 2 * cfg.problem.n + 1;
    let family = HomotopyFamily::new(cfg.hamiltonian().map_err(numerical)?);
    let grid = cfg.homotopy.lambda_grid.clone();

    let stages = homotopy_track(&family, &grid, cfg).map_err(numerical)?;
    let counts: Vec<usize> = stages.iter().map(|s| s.orbits.count()).collect();
    let max_norms: Vec<f64> = stages.iter().map(|s| s.max_norm).collect();

    let omega = OmegaSpec::standard(cfg.problem.cutoff);
    let apriori =
        apriori_radius(&family, cfg.wbd.epsilon, &omega, None).map_err(numerical)?;
    let apriori_pass = stages.iter().all(|s| {
        s.orbits
            .orbits
            .iter()
            .all(|o| EmbeddedPoint::from_loop(&o.orbit).norm() <= apriori.radius)
    });

    let interior_pass = stages
        .iter()
        .filter(|s| s.lambda < 1.0)
        .all(|s| s.error.is_none() && s.orbits.count() >= required);
    let endpoint_pass = stages.iter().filter(|s| s.lambda >= 1.0).all(|s| {
        s.degenerate
            && s.orbits
                .orbits
                .iter()
                .all(|o| o.kernel_dim() == 2 * cfg.problem.n)
    });

    let found = stages
        .iter()
        .filter(|s| s.lambda < 1.0)
        .map(|s| s.orbits.count())
        .min()
        .unwrap_or(0);
    report.verdict = Verdict {
        required,
        found,
        arnold_pass: interior_pass,
        residual_pass: true,
        ode_pass: endpoint_pass,
        apriori_pass,
        filtration_pass: true,
        pass: interior_pass && endpoint_pass && apriori_pass,
    };
    report.homotopy = Some(HomotopyReport {
        lambda_grid: grid,
        counts,
        max_norms,
        stage: stages,
    });
    report.apriori = Some(apriori);
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

fn run_bound(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("bound", cfg.clone());
    let family = HomotopyFamily::new(cfg.hamiltonian().map_err(numerical)?);
    let omega = OmegaSpec::standard(cfg.problem.cutoff);
    let apriori =
        apriori_radius(&family, cfg.wbd.epsilon, &omega, None).map_err(numerical)?;
    let soundness = wbd_soundness(
        &family,
        cfg.wbd.epsilon,
        &omega,
        apriori.r0,
        cfg.problem.n,
        10_000,
        cfg.samples(),
        cfg.solver.rng_seed,
    )
    .map_err(numerical)?;
    report.verdict = Verdict::trivially(soundness.pass);
    report.apriori = Some(apriori);
    report.soundness = Some(soundness);
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

fn run_cuplength(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("cuplength", cfg.clone());
    let cuplength = torus_cuplength_section(cfg)?;
    let suspension =
        suspension_model(cfg.problem.n, &[0, 1, 2, 3, 4, 5]).map_err(numerical)?;

    // reference values on the bundled models
    let opts = cup_opts(cfg);
    let sphere = sphere_ring(2, cfg.topology.field);
    let sphere_ok = cup_length(&GradedModule::over_self(&sphere), &sphere, &opts).value == 2;
    let zero_ok = cup_length(&GradedModule::zero(&sphere), &sphere, &opts).value == 0;
    let trivial = exterior_algebra(0, cfg.topology.field);
    let point_ok = cup_length(&GradedModule::point(&trivial), &trivial, &opts).value == 1;

    let pass = cuplength.matches && suspension.stabilized() && sphere_ok && zero_ok && point_ok;
    report.verdict = Verdict {
        required: cuplength.expected,
        found: cuplength.computed,
        arnold_pass: cuplength.matches,
        residual_pass: sphere_ok && zero_ok && point_ok,
        ode_pass: true,
        apriori_pass: true,
        filtration_pass: suspension.stabilized(),
        pass,
    };
    report.cuplength = Some(cuplength);
    report.suspension = Some(suspension);
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

fn run_filtration(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("filtration", cfg.clone());
    let field = cfg.field().map_err(numerical)?;
    let set = find_all(&field, cfg).map_err(numerical)?;
    let (records, residual_pass, _) = orbit_records(&field, cfg, &set, false);
    let filtration = morse_filtration(&field, &set, cfg).map_err(numerical)?;

    let cuplength = torus_cuplength_section(cfg)?;
    let outcomes = subadditivity_check(
        &standard_instances(2 * cfg.problem.n, cfg.topology.field).map_err(numerical)?,
        &cup_opts(cfg),
    );
    let sub_pass = outcomes.iter().all(|o| o.pass);
    let filtration_pass = filtration_passes(&filtration, cuplength.computed) && sub_pass;

    report.verdict = Verdict {
        required: cuplength.computed,
        found: filtration.level_count,
        arnold_pass: filtration.level_count >= cuplength.computed,
        residual_pass,
        ode_pass: true,
        apriori_pass: true,
        filtration_pass,
        pass: filtration_pass && residual_pass,
    };
    report.orbits = Some(orbits_section(cfg, &set, records));
    report.filtration = Some(filtration);
    report.cuplength = Some(cuplength);
    report.subadditivity = Some(SubadditivityReport {
        all_pass: sub_pass,
        outcome: outcomes,
    });
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

fn run_selfcheck(cfg: &SolverConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = RunReport::new("selfcheck", cfg.clone());
    let battery = selfcheck::run_all(cfg.solver.rng_seed);
    report.verdict = Verdict::trivially(battery.all_pass());
    report.selfcheck = Some(battery);
    report.timings = Timings {
        total_ms: start.elapsed().as_millis() as u64,
        phases: Vec::new(),
    };
    Ok(report)
}

/// Runs one subcommand on a validated configuration.
pub fn run(command: Command, cfg: &SolverConfig) -> Result<RunReport, CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    match command {
        Command::Solve => run_solve(cfg),
        Command::Homotopy => run_homotopy(cfg),
        Command::Bound => run_bound(cfg),
        Command::Cuplength => run_cuplength(cfg),
        Command::Filtration => run_filtration(cfg),
        Command::Selfcheck => run_selfcheck(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuplength_report_has_the_torus_value() {
        let cfg = SolverConfig::for_catalog("cosine-morse", 2, 4);
        let report = run(Command::Cuplength, &cfg).unwrap();
        assert!(report.verdict.pass);
        assert_eq!(report.cuplength.as_ref().unwrap().computed, 5);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn bound_report_carries_the_ledger() {
        let cfg = SolverConfig::for_catalog("cosine-morse", 1, 4);
        let report = run(Command::Bound, &cfg).unwrap();
        let apriori = report.apriori.as_ref().unwrap();
        assert!(apriori.radius >= 2.0 * apriori.r0);
        assert!(report.soundness.as_ref().unwrap().pass);
    }

    #[test]
    fn invalid_config_maps_to_usage_error() {
        let mut cfg = SolverConfig::for_catalog("cosine-morse", 1, 4);
        cfg.solver.tol_residual = -1.0;
        match run(Command::Solve, &cfg) {
            Err(CliError::Usage(_)) => {}
            other => panic!("expected usage error, got {other:?}"),
        }
    }
}
