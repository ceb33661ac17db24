//! Critical-orbit search and flow diagnostics.
//!
//! The primary finder is a damped Newton iteration on ∇Φ_H = 0: the action
//! is strongly indefinite, so a plain descent flow can only reach minima of
//! the residual, never the saddles that carry most of the orbit count. The
//! negative LS-gradient flow is still implemented — as a diagnostic for
//! ω-limits, Morse structure and step-monotonicity — through an exponential
//! integrator that treats the linear part of each spectral block exactly.
//!
//! Sign convention: with J the blockwise rotation by π/2 and
//! a(x) = ½(‖P⁺x‖² − ‖P⁻x‖²), critical points of Φ_H are exactly the
//! 1-periodic solutions of ẋ = J∇H(t, x); the independent period-map check
//! in [`verify_orbit`] integrates that equation.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::LsField;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, HomotopyFamily};
use crate::loops::{random_loop, FourierLoop};

// ---------------------------------------------------------------------------
// Critical orbits and orbit sets
// ---------------------------------------------------------------------------

/// Inertia estimate of the truncated Hessian at an orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HessSignature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// A found critical point of the action.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalOrbit {
    /// ‖∇Φ_H‖_s at the representative.
    pub residual: f64,
    pub action: f64,
    /// True when the Hessian has kernel directions; `signature.zero` is the
    /// kernel dimension estimate.
    pub degenerate: bool,
    /// Seed that produced the orbit.
    pub provenance: String,
    /// Eigenvalue counts of the truncated Hessian within the degeneracy band.
    pub signature: HessSignature,
    /// Lattice-normalized representative (mean in [0,1)^{2n}).
    pub orbit: FourierLoop,
}

impl CriticalOrbit {
    pub fn kernel_dim(&self) -> usize {
        self.signature.zero
    }
}

/// Why a Newton search ended without an orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoConvergence {
    pub reason: String,
    pub iterations: usize,
    pub final_residual: f64,
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Converged(CriticalOrbit),
    NoConvergence(NoConvergence),
}

/// Deduplicated critical orbits together with their clustered action values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSet {
    /// Pairwise lattice-aware H^{1/2} distance between kept orbits exceeds
    /// this.
    pub dedup_delta: f64,
    /// Action values within this tolerance count as one critical value.
    pub value_tol: f64,
    /// Sorted distinct critical values c₁ < … < c_k.
    pub critical_values: Vec<f64>,
    pub seeds_tried: usize,
    pub seeds_failed: usize,
    pub warnings: Vec<String>,
    pub orbits: Vec<CriticalOrbit>,
}

impl OrbitSet {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn any_degenerate(&self) -> bool {
        self.orbits.iter().any(|o| o.degenerate)
    }

    /// Largest H^{1/2} norm among the normalized representatives.
    pub fn max_norm(&self) -> f64 {
        self.orbits
            .iter()
            .map(|o| o.orbit.h12_norm())
            .fold(0.0, f64::max)
    }
}

fn cluster_values(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        match out.last() {
            Some(&last) if (v - last).abs() <= tol => {}
            _ => out.push(v),
        }
    }
    out
}

fn lex_key(orbit: &CriticalOrbit) -> (f64, Vec<f64>) {
    (orbit.action, orbit.orbit.x0().to_vec())
}

fn orbit_order(a: &CriticalOrbit, b: &CriticalOrbit) -> std::cmp::Ordering {
    let (aa, ax) = lex_key(a);
    let (ba, bx) = lex_key(b);
    aa.total_cmp(&ba).then_with(|| {
        ax.iter()
            .zip(&bx)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Lattice-normalizes, clusters by H^{1/2} distance ≤ δ and keeps the
/// lowest-residual representative of each cluster.
pub fn dedup(orbits: Vec<CriticalOrbit>, delta: f64, value_tol: f64) -> OrbitSet {
    let mut candidates: Vec<CriticalOrbit> = orbits
        .into_iter()
        .map(|mut o| {
            o.orbit = o.orbit.normalize_lattice();
            o
        })
        .collect();
    candidates.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| orbit_order(a, b))
    });
    let mut kept: Vec<CriticalOrbit> = Vec::new();
    for cand in candidates {
        let fresh = kept
            .iter()
            .all(|k| k.orbit.torus_h12_distance(&cand.orbit) > delta);
        if fresh {
            kept.push(cand);
        }
    }
    kept.sort_by(orbit_order);
    let critical_values = cluster_values(kept.iter().map(|o| o.action).collect(), value_tol);
    let warnings = if kept.is_empty() {
        vec!["no orbits found; for a valid problem this contradicts the 2n+1 lower bound".into()]
    } else {
        Vec::new()
    };
    OrbitSet {
        orbits: kept,
        dedup_delta: delta,
        value_tol,
        critical_values,
        seeds_tried: 0,
        seeds_failed: 0,
        warnings,
    }
}

// ---------------------------------------------------------------------------
// Newton search
// ---------------------------------------------------------------------------

/// Assembles the Hessian matrix in ⟨·,·⟩_s-orthonormal coordinates, where it
/// is symmetric.
fn hessian_matrix(field: &LsField, x: &FourierLoop) -> Result<DMatrix<f64>> {
    let dim = x.total_dim();
    let op = field.hessian(x)?;
    let mut a = DMatrix::zeros(dim, dim);
    let mut unit = vec![0.0; dim];
    for i in 0..dim {
        unit[i] = 1.0;
        let basis = FourierLoop::from_h12_vec(x.n(), x.cutoff(), &unit);
        unit[i] = 0.0;
        let column = op.apply(&basis).to_h12_vec();
        for (r, value) in column.into_iter().enumerate() {
            a[(r, i)] = value;
        }
    }
    // kill the O(1e-16) asymmetry from quadrature roundoff
    let at = a.transpose();
    Ok((a + at) * 0.5)
}

fn spectral_counts(eigenvalues: &DVector<f64>, band: f64) -> HessSignature {
    let mut sig = HessSignature {
        negative: 0,
        zero: 0,
        positive: 0,
    };
    for &l in eigenvalues.iter() {
        if l.abs() <= band {
            sig.zero += 1;
        } else if l < 0.0 {
            sig.negative += 1;
        } else {
            sig.positive += 1;
        }
    }
    sig
}

/// Damped Newton search for a zero of ∇Φ_H starting from `seed`.
///
/// The symmetric Newton system is solved through an eigendecomposition with
/// the near-kernel directions removed, which keeps the step meaningful at
/// saddle points and on degenerate critical manifolds.
pub fn find_orbit(
    field: &LsField,
    seed: &FourierLoop,
    cfg: &SolverConfig,
    provenance: &str,
) -> Result<SearchResult> {
    let s = &cfg.solver;
    let mut x = seed.clone();
    let mut iterations = 0;
    let mut residual = field.residual(&x)?;

    while residual > s.tol_residual {
        if iterations >= s.max_iter {
            return Ok(SearchResult::NoConvergence(NoConvergence {
                reason: format!("no convergence after {} iterations", s.max_iter),
                iterations,
                final_residual: residual,
            }));
        }
        if x.h12_norm() > s.guard_radius {
            return Ok(SearchResult::NoConvergence(NoConvergence {
                reason: format!("escaped the guard radius {}", s.guard_radius),
                iterations,
                final_residual: residual,
            }));
        }

        let matrix = hessian_matrix(field, &x)?;
        let eig = matrix.symmetric_eigen();
        let g = DVector::from_vec(field.gradient(&x)?.to_h12_vec());
        let coeffs = eig.eigenvectors.transpose() * &g;
        let mut step_coeffs = DVector::zeros(coeffs.len());
        for i in 0..coeffs.len() {
            let l = eig.eigenvalues[i];
            if l.abs() > s.tol_degenerate {
                step_coeffs[i] = -coeffs[i] / l;
            }
        }
        let step_vec = &eig.eigenvectors * step_coeffs;
        let step = FourierLoop::from_h12_vec(x.n(), x.cutoff(), step_vec.as_slice());

        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..30 {
            let mut trial = x.clone();
            trial.axpy(damping, &step);
            let trial_residual = field.residual(&trial)?;
            if trial_residual < (1.0 - 1e-4 * damping) * residual {
                x = trial;
                residual = trial_residual;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            return Ok(SearchResult::NoConvergence(NoConvergence {
                reason: "damping stalled without residual decrease".into(),
                iterations,
                final_residual: residual,
            }));
        }
        iterations += 1;
    }

    let matrix = hessian_matrix(field, &x)?;
    let eig = matrix.symmetric_eigen();
    let signature = spectral_counts(&eig.eigenvalues, s.tol_degenerate);
    let orbit = x.normalize_lattice();
    let action = field.action_value(&orbit)?;
    Ok(SearchResult::Converged(CriticalOrbit {
        residual: field.residual(&orbit)?,
        orbit,
        action,
        degenerate: signature.zero > 0,
        signature,
        provenance: provenance.to_string(),
    }))
}

fn grid_points(n: usize, grid: usize) -> Vec<Vec<f64>> {
    let dim = 2 * n;
    let mut points = Vec::with_capacity(grid.pow(dim as u32));
    let mut index = vec![0usize; dim];
    loop {
        points.push(index.iter().map(|&i| i as f64 / grid as f64).collect());
        let mut carry = 0;
        loop {
            if carry == dim {
                return points;
            }
            index[carry] += 1;
            if index[carry] < grid {
                break;
            }
            index[carry] = 0;
            carry += 1;
        }
    }
}

/// The standard seed battery: constant loops on a uniform g^{2n} torus grid
/// plus `random_seeds` Fourier-perturbed copies of each grid point.
pub fn standard_seeds(cfg: &SolverConfig) -> Vec<(String, FourierLoop)> {
    let n = cfg.problem.n;
    let cutoff = cfg.problem.cutoff;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.rng_seed);
    let mut seeds = Vec::new();
    for (gi, point) in grid_points(n, cfg.solver.seed_grid).into_iter().enumerate() {
        let base = FourierLoop::constant(&point, cutoff);
        seeds.push((format!("grid-{gi}"), base.clone()));
        for r in 0..cfg.solver.random_seeds {
            let mut seed = base.clone();
            let modes = random_loop(&mut rng, n, cutoff.min(2), cfg.solver.seed_perturbation);
            let padded = modes.with_cutoff(cutoff);
            seed.axpy(1.0, &padded);
            // keep the mean on the grid point; only the oscillation is random
            seed.x0_mut().copy_from_slice(&point);
            seeds.push((format!("grid-{gi}-perturb-{r}"), seed));
        }
    }
    seeds
}

/// Multi-start Newton search over an explicit seed list; deterministic for
/// a fixed configuration (parallel workers are merged in seed order).
pub fn find_with_seed_list(
    field: &LsField,
    cfg: &SolverConfig,
    seeds: &[(String, FourierLoop)],
) -> Result<OrbitSet> {
    let outcomes: Vec<(usize, Result<SearchResult>)> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, (tag, seed))| (i, find_orbit(field, seed, cfg, tag)))
        .collect();
    let mut ordered: Vec<(usize, Result<SearchResult>)> = outcomes;
    ordered.sort_by_key(|(i, _)| *i);

    let mut found = Vec::new();
    let mut failed = 0usize;
    for (_, outcome) in ordered {
        match outcome? {
            SearchResult::Converged(orbit) => found.push(orbit),
            SearchResult::NoConvergence(_) => failed += 1,
        }
    }
    let mut set = dedup(
        found,
        cfg.solver.dedup_delta,
        10.0 * cfg.solver.tol_residual,
    );
    set.seeds_tried = seeds.len();
    set.seeds_failed = failed;
    Ok(set)
}

/// Multi-start search over the standard seed battery plus optional warm
/// starts.
pub fn find_all_with_seeds(
    field: &LsField,
    cfg: &SolverConfig,
    extra_seeds: &[(String, FourierLoop)],
) -> Result<OrbitSet> {
    let mut seeds = standard_seeds(cfg);
    seeds.extend(extra_seeds.iter().cloned());
    find_with_seed_list(field, cfg, &seeds)
}

/// Multi-start search over the standard seed battery.
pub fn find_all(field: &LsField, cfg: &SolverConfig) -> Result<OrbitSet> {
    find_all_with_seeds(field, cfg, &[])
}

// ---------------------------------------------------------------------------
// Negative gradient flow
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub t_final: f64,
    pub dt: f64,
    pub guard_radius: f64,
    /// Allowed per-step action increase before the step is halved.
    pub action_increase_tol: f64,
    pub max_halvings: u32,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            t_final: 5.0,
            dt: 0.05,
            guard_radius: 50.0,
            action_increase_tol: 1e-10,
            max_halvings: 20,
        }
    }
}

/// A discrete trajectory of the negative LS-gradient flow.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FourierLoop>,
    pub actions: Vec<f64>,
    /// True when the trajectory left the guard ball.
    pub escaped: bool,
    pub rejected_steps: usize,
}

impl FlowTrajectory {
    /// Largest action increase along consecutive recorded states (should be
    /// bounded by the integrator tolerance).
    pub fn max_action_increase(&self) -> f64 {
        self.actions
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    pub fn final_state(&self) -> &FourierLoop {
        self.states.last().expect("trajectory has initial state")
    }
}

fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + z / 2.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// One exponential-Euler step of ẋ = −(Lx + K(x)): each spectral block of L
/// is integrated exactly (factors e^{∓dt}, identity on Z₀) and K enters
/// explicitly through the φ₁ weight of the block.
fn flow_step(field: &LsField, x: &FourierLoop, dt: f64) -> Result<FourierLoop> {
    let k = field.nonlinear(x)?;
    let mut out = FourierLoop::zeros(x.n(), x.cutoff());
    for (o, (xc, kc)) in out.x0_mut().iter_mut().zip(x.x0().iter().zip(k.x0())) {
        *o = xc - dt * kc;
    }
    for mode in 1..=x.cutoff() as i64 {
        for &signed in &[mode, -mode] {
            let lambda = if signed > 0 { 1.0 } else { -1.0 };
            let decay = (-lambda * dt).exp();
            let weight = phi1(-lambda * dt) * dt;
            let src_x = x.coeff(signed);
            let src_k = k.coeff(signed);
            for (i, o) in out.coeff_mut(signed).iter_mut().enumerate() {
                *o = decay * src_x[i] - weight * src_k[i];
            }
        }
    }
    Ok(out)
}

/// Integrates the negative LS-gradient flow with per-step action control.
pub fn integrate_flow(
    field: &LsField,
    x0: &FourierLoop,
    opts: &FlowOptions,
) -> Result<FlowTrajectory> {
    if !(opts.dt > 0.0) || !(opts.t_final > 0.0) {
        return Err(Error::OutOfRange {
            what: "flow step/duration",
            value: opts.dt,
            range: "(0, ∞)",
        });
    }
    let mut t = 0.0;
    let mut x = x0.clone();
    let mut action = field.action_value(&x)?;
    let mut trajectory = FlowTrajectory {
        times: vec![0.0],
        states: vec![x.clone()],
        actions: vec![action],
        escaped: false,
        rejected_steps: 0,
    };

    while t < opts.t_final - 1e-12 {
        let mut dt = opts.dt.min(opts.t_final - t);
        let mut attempt = 0;
        let (next, next_action) = loop {
            let candidate = flow_step(field, &x, dt)?;
            let candidate_action = field.action_value(&candidate)?;
            if candidate_action <= action + opts.action_increase_tol {
                break (candidate, candidate_action);
            }
            attempt += 1;
            trajectory.rejected_steps += 1;
            if attempt > opts.max_halvings {
                return Err(Error::Degenerate(format!(
                    "flow step kept increasing the action at t = {t:.4} even at dt = {dt:.3e}"
                )));
            }
            dt *= 0.5;
        };
        t += dt;
        x = next;
        action = next_action;
        trajectory.times.push(t);
        trajectory.states.push(x.clone());
        trajectory.actions.push(action);
        if x.h12_norm() > opts.guard_radius {
            trajectory.escaped = true;
            break;
        }
    }
    Ok(trajectory)
}

// ---------------------------------------------------------------------------
// Morse filtration
// ---------------------------------------------------------------------------

/// A probe showing that a chosen inter-level value is regular: the flow has
/// strictly negative action derivative −‖∇Φ‖² there.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityProbe {
    pub level: usize,
    pub value: f64,
    pub action_at_probe: f64,
    pub gradient_norm: f64,
    pub pass: bool,
}

/// Orbits grouped by critical value, with regular values separating the
/// levels (the last level is unbounded above).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorseFiltration {
    pub level_count: usize,
    pub critical_values: Vec<f64>,
    /// b_i ∈ (c_i, c_{i+1}) for i < k, and b_k = ∞.
    pub regular_values: Vec<f64>,
    /// Orbit indices per critical value, in orbit-set order.
    pub groups: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
    pub probes: Vec<RegularityProbe>,
}

fn nearest_lattice_shift(from: &[f64], to: &[f64]) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| (a - b).round()).collect()
}

/// Groups the orbits of `set` by critical value and certifies the separating
/// regular values by probing the gradient on interpolated level points.
pub fn morse_filtration(
    field: &LsField,
    set: &OrbitSet,
    cfg: &SolverConfig,
) -> Result<MorseFiltration> {
    if set.orbits.is_empty() {
        return Err(Error::EmptyInput("morse filtration needs orbits"));
    }
    if set.any_degenerate() {
        return Err(Error::Degenerate(
            "filtration is only defined for nondegenerate critical sets".into(),
        ));
    }
    let values = set.critical_values.clone();
    let k = values.len();
    let mut warnings = Vec::new();

    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (oi, orbit) in set.orbits.iter().enumerate() {
        let li = values
            .iter()
            .position(|&c| (orbit.action - c).abs() <= set.value_tol)
            .ok_or_else(|| {
                Error::Degenerate(format!(
                    "action {} does not match any clustered critical value",
                    orbit.action
                ))
            })?;
        groups[li].push(oi);
    }
    if set.orbits.len() > k {
        warnings.push(format!(
            "{} orbits share {} critical values (values within {:.1e} merged)",
            set.orbits.len(),
            k,
            set.value_tol
        ));
    }

    let mut regular_values: Vec<f64> = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    regular_values.push(f64::INFINITY);

    let floor = (100.0 * cfg.solver.tol_residual).max(1e-8);
    let mut probes = Vec::new();
    for level in 0..k.saturating_sub(1) {
        let b = regular_values[level];
        let low = &set.orbits[groups[level][0]].orbit;
        let high_raw = &set.orbits[groups[level + 1][0]].orbit;
        // move the upper representative into the lattice cell of the lower one
        let shift = nearest_lattice_shift(low.x0(), high_raw.x0());
        let high = high_raw.translate_x0(&shift);

        // bisection for Φ = b along the segment; endpoints straddle b
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let action_at = |s: f64| -> Result<f64> {
            let mut point = low.scale(1.0 - s);
            point.axpy(s, &high);
            field.action_value(&point)
        };
        let sign_lo = action_at(lo)? - b;
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            let fm = action_at(mid)? - b;
            if (fm > 0.0) == (sign_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let mut probe_point = low.scale(1.0 - s);
        probe_point.axpy(s, &high);
        let gradient_norm = field.residual(&probe_point)?;
        probes.push(RegularityProbe {
            level,
            value: b,
            action_at_probe: field.action_value(&probe_point)?,
            gradient_norm,
            pass: gradient_norm > floor,
        });
    }

    Ok(MorseFiltration {
        critical_values: values,
        regular_values,
        groups,
        level_count: k,
        probes,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Homotopy continuation
// ---------------------------------------------------------------------------

/// Outcome of `find_all` at one homotopy parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyStage {
    pub lambda: f64,
    pub max_norm: f64,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub orbits: OrbitSet,
}

/// Runs the multi-start search along H_λ = (1−λ)H, warm-starting each stage
/// from the previous stage's orbits.
pub fn homotopy_track(
    family: &HomotopyFamily,
    lambda_grid: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<HomotopyStage>> {
    let mut stages: Vec<HomotopyStage> = Vec::with_capacity(lambda_grid.len());
    let mut warm: Vec<(String, FourierLoop)> = Vec::new();
    for (li, &lambda) in lambda_grid.iter().enumerate() {
        let ham = family.at(lambda)?;
        let field = LsField::new(ham, cfg.samples());
        match find_all_with_seeds(&field, cfg, &warm) {
            Ok(set) => {
                warm = set
                    .orbits
                    .iter()
                    .enumerate()
                    .map(|(i, o)| (format!("warm-{li}-{i}"), o.orbit.clone()))
                    .collect();
                stages.push(HomotopyStage {
                    lambda,
                    max_norm: set.max_norm(),
                    degenerate: set.any_degenerate(),
                    orbits: set,
                    error: None,
                });
            }
            Err(err) => stages.push(HomotopyStage {
                lambda,
                orbits: dedup(Vec::new(), cfg.solver.dedup_delta, cfg.solver.tol_residual),
                max_norm: 0.0,
                degenerate: false,
                error: Some(err.to_string()),
            }),
        }
    }
    Ok(stages)
}

// ---------------------------------------------------------------------------
// Independent ODE verification
// ---------------------------------------------------------------------------

/// Result of re-integrating an orbit through the Hamiltonian equation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OdeReport {
    /// ‖x(1) − x(0)‖ of the classical one-period integration.
    pub period_gap: f64,
    /// Largest pointwise gap between the integration and the Fourier
    /// representation.
    pub max_deviation: f64,
    pub steps: usize,
    pub tol: f64,
    pub pass: bool,
}

fn j_apply(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for p in 0..v.len() / 2 {
        out[2 * p] = -v[2 * p + 1];
        out[2 * p + 1] = v[2 * p];
    }
    out
}

fn hamiltonian_vector_field(ham: &HamiltonianSpec, t: f64, x: &[f64]) -> Vec<f64> {
    j_apply(&ham.grad(t, x))
}

/// Fourth-order one-period integration of ẋ = J∇H(t, x) from the orbit's
/// time-zero point: an oracle for the variational solver that shares none of
/// its spectral machinery.
pub fn verify_orbit(
    ham: &HamiltonianSpec,
    orbit: &FourierLoop,
    tol: f64,
    steps: usize,
) -> OdeReport {
    let h = 1.0 / steps as f64;
    let mut x = orbit.evaluate_at(0.0);
    let start = x.clone();
    let mut max_deviation = 0.0f64;
    for j in 0..steps {
        let t = j as f64 * h;
        let k1 = hamiltonian_vector_field(ham, t, &x);
        let k2 = hamiltonian_vector_field(ham, t + 0.5 * h, &add_scaled(&x, &k1, 0.5 * h));
        let k3 = hamiltonian_vector_field(ham, t + 0.5 * h, &add_scaled(&x, &k2, 0.5 * h));
        let k4 = hamiltonian_vector_field(ham, t + h, &add_scaled(&x, &k3, h));
        for i in 0..x.len() {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let reference = orbit.evaluate_at((j + 1) as f64 * h);
        let dev = x
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
    }
    let period_gap = x
        .iter()
        .zip(&start)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    OdeReport {
        period_gap,
        max_deviation,
        steps,
        tol,
        pass: period_gap < tol,
    }
}

fn add_scaled(x: &[f64], d: &[f64], factor: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + factor * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::catalog;
    use approx::assert_abs_diff_eq;

    fn cosine_cfg() -> SolverConfig {
        SolverConfig::for_catalog("cosine-morse", 1, 6)
    }

    #[test]
    fn zero_field_constant_loop_is_stationary() {
        let field = LsField::with_default_samples(HamiltonianSpec::zero(1), 4);
        let x0 = FourierLoop::constant(&[0.3, 0.4], 4);
        let opts = FlowOptions {
            t_final: 2.0,
            ..FlowOptions::default()
        };
        let traj = integrate_flow(&field, &x0, &opts).unwrap();
        assert!(!traj.escaped);
        for state in &traj.states {
            assert_abs_diff_eq!(state.sub(&x0).h12_norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn negative_mode_grows_exponentially_under_the_flow() {
        let field = LsField::with_default_samples(HamiltonianSpec::zero(1), 2);
        let mut x0 = FourierLoop::zeros(1, 2);
        x0.coeff_mut(-1).copy_from_slice(&[1e-3, 0.0]);
        let opts = FlowOptions {
            t_final: 1.0,
            dt: 0.01,
            ..FlowOptions::default()
        };
        let traj = integrate_flow(&field, &x0, &opts).unwrap();
        let expected = x0.h12_norm() * 1.0f64.exp();
        assert_abs_diff_eq!(
            traj.final_state().h12_norm(),
            expected,
            epsilon = 1e-6 * expected
        );
        assert!(traj.max_action_increase() <= 1e-10);
    }

    #[test]
    fn degenerate_zero_hamiltonian_is_flagged_with_full_kernel() {
        let cfg = SolverConfig::for_catalog("zero", 1, 3);
        let field = cfg.field().unwrap();
        let seed = FourierLoop::constant(&[0.2, 0.8], 3);
        match find_orbit(&field, &seed, &cfg, "test").unwrap() {
            SearchResult::Converged(orbit) => {
                assert!(orbit.degenerate);
                assert_eq!(orbit.kernel_dim(), 2);
                assert_eq!(orbit.signature.negative, 2 * 3);
                assert_eq!(orbit.signature.positive, 2 * 3);
                assert_eq!(orbit.residual, 0.0);
            }
            SearchResult::NoConvergence(nc) => panic!("should converge: {nc:?}"),
        }
    }

    #[test]
    fn newton_converges_to_exact_constant_solution() {
        let cfg = cosine_cfg();
        let field = cfg.field().unwrap();
        let seed = FourierLoop::constant(&[0.07, -0.03], 6);
        match find_orbit(&field, &seed, &cfg, "test").unwrap() {
            SearchResult::Converged(orbit) => {
                assert!(orbit.residual < 1e-10);
                assert!(!orbit.degenerate);
                for &c in orbit.orbit.x0() {
                    let to_half_lattice = (c * 2.0 - (c * 2.0).round()).abs();
                    assert!(to_half_lattice < 1e-9, "mean lands on a critical point");
                }
            }
            SearchResult::NoConvergence(nc) => panic!("should converge: {nc:?}"),
        }
    }

    #[test]
    fn hopeless_seed_reports_no_convergence() {
        let mut cfg = cosine_cfg();
        cfg.solver.max_iter = 1;
        let field = cfg.field().unwrap();
        let mut seed = FourierLoop::constant(&[0.31, 0.17], 6);
        seed.coeff_mut(1).copy_from_slice(&[0.4, 0.4]);
        seed.coeff_mut(-2).copy_from_slice(&[0.3, -0.2]);
        match find_orbit(&field, &seed, &cfg, "test").unwrap() {
            SearchResult::Converged(orbit) => panic!("unexpected convergence: {orbit:?}"),
            SearchResult::NoConvergence(nc) => assert_eq!(nc.iterations, 1),
        }
    }

    #[test]
    fn dedup_collapses_lattice_copies() {
        let cfg = cosine_cfg();
        let field = cfg.field().unwrap();
        let seed = FourierLoop::constant(&[0.0, 0.0], 6);
        let orbit = match find_orbit(&field, &seed, &cfg, "base").unwrap() {
            SearchResult::Converged(o) => o,
            SearchResult::NoConvergence(nc) => panic!("{nc:?}"),
        };
        let mut shifted = orbit.clone();
        shifted.orbit = shifted.orbit.translate_x0(&[3.0, -2.0]);
        shifted.provenance = "shifted".into();
        let set = dedup(vec![orbit.clone(), shifted], 1e-3, 1e-9);
        assert_eq!(set.count(), 1);

        // distinct orbits at distance well above δ are both kept
        let far = CriticalOrbit {
            orbit: FourierLoop::constant(&[0.5, 0.5], 6),
            residual: 0.0,
            action: 0.2,
            signature: orbit.signature,
            degenerate: false,
            provenance: "far".into(),
        };
        let set = dedup(vec![orbit, far], 1e-3, 1e-9);
        assert_eq!(set.count(), 2);
    }

    #[test]
    fn verify_orbit_accepts_exact_constants_and_rejects_fakes() {
        let ham = catalog("cosine-morse", 1).unwrap();
        let good = FourierLoop::constant(&[0.5, 0.0], 6);
        let report = verify_orbit(&ham, &good, 1e-4, 512);
        assert!(report.pass);
        assert!(report.period_gap < 1e-12);

        let bad = FourierLoop::constant(&[0.25, 0.25], 6);
        let report = verify_orbit(&ham, &bad, 1e-4, 512);
        assert!(!report.pass);
        assert!(report.period_gap > 1e-2);
    }
}
