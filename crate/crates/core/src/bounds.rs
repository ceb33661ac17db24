//! A-priori bounds for invariant sets of the penalized gradient flow.
//!
//! On the embedded space Ê = R^{4n} × Z⁺ × Z⁻ the field splits as
//! ∇Ψ = L̂ + K̃ with L̂ an isometry of signature ±1, so on the annular region
//! Ω = A^{2n} × Z⁺ × Z⁻
//!
//! ```text
//! ‖∇Ψ(x)‖ ≥ ½‖P⁺x‖ + ½‖P⁻x‖ − κ,      κ ≥ sup_Ω ‖K̃‖.
//! ```
//!
//! Hence a gradient norm ≤ ε pins the point inside the ball of radius
//! r₀ = (disc-block radius) + 2(ε + κ), and the invariant set — critical
//! points plus connecting trajectories — stays inside R = 2r₀ + r₁, where
//! r₁ bounds the action spread between critical points divided by ε. All
//! three radii are uniform along the homotopy H_λ = (1−λ)H because the
//! derivative bounds of H_λ shrink monotonically.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{
    embedded_gradient, nonlinearity_norm_bound, EmbeddedPoint, LsField,
};
use crate::config::SolverConfig;
use crate::dynamics::{homotopy_track, HomotopyStage};
use crate::error::{Error, Result};
use crate::hamiltonian::HomotopyFamily;
use crate::loops::{random_loop, FourierLoop, TWO_PI};

/// The unbounded isolating region: one annulus per torus coordinate times
/// the full oscillating modes, optionally cut by a ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSpec {
    pub inner: f64,
    pub outer: f64,
    pub cutoff: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<f64>,
}

impl OmegaSpec {
    /// The standard annulus [1/2, 3/2] at the given truncation.
    pub fn standard(cutoff: usize) -> Self {
        Self {
            inner: 0.5,
            outer: 1.5,
            cutoff,
            ball: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner < 1.0 && 1.0 < self.outer && self.inner > 0.0) {
            return Err(Error::OutOfRange {
                what: "annulus radii",
                value: self.inner,
                range: "0 < inner < 1 < outer",
            });
        }
        Ok(())
    }
}

/// The radius ledger of the weak boundedness condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WbdRadius {
    pub epsilon: f64,
    /// Bound on the loop-space nonlinearity through the metric weights.
    pub kappa_gradient: f64,
    /// Bound on the disc-block remainder (penalty gradient, angular force
    /// and the spectral shift) on 0 < rᵢ < 2.
    pub kappa_disc: f64,
    pub kappa: f64,
    /// Norm of the disc block anywhere in Ω.
    pub disc_radius: f64,
    pub r0: f64,
}

/// Radius r₀ with: x ∈ Ω and ‖∇Ψ_λ(x)‖ ≤ ε imply ‖x‖ ≤ r₀, for every
/// λ ∈ [0, 1].
pub fn wbd_radius(family: &HomotopyFamily, epsilon: f64, omega: &OmegaSpec) -> Result<WbdRadius> {
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange {
            what: "wbd epsilon",
            value: epsilon,
            range: "(0, ∞)",
        });
    }
    omega.validate()?;
    let n = family.base().n();
    let bounds = family.uniform_bounds();
    let dim_sqrt = (2 * n) as f64;
    let dim_sqrt = dim_sqrt.sqrt();

    let kappa_gradient = nonlinearity_norm_bound(&bounds, omega.cutoff);
    // per disc pair: |(2(r−1)/r − 1)·u| ≤ |r − 2| ≤ 2 and the angular force
    // is at most 2·supGrad/(2π) ≤ supGrad on r ≥ 1/2
    let kappa_disc = dim_sqrt * (2.0 + bounds.sup_grad);
    let kappa = kappa_gradient + kappa_disc;
    let disc_radius = omega.outer * dim_sqrt;
    let r0 = disc_radius + 2.0 * (epsilon + kappa);
    Ok(WbdRadius {
        epsilon,
        kappa_gradient,
        kappa_disc,
        kappa,
        disc_radius,
        r0,
    })
}

/// r₁ = (max − min)/ε over known critical values.
pub fn critical_spread(epsilon: f64, values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("critical values for the spread"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange {
            what: "wbd epsilon",
            value: epsilon,
            range: "(0, ∞)",
        });
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((max - min) / epsilon)
}

/// Coefficient-derived fallback when critical values are unknown: on the
/// ball B(r₀) the quadratic part is within ±½r₀², the Hamiltonian within
/// ±supH and the penalty within [0, 2n].
pub fn critical_spread_bound(epsilon: f64, r0: f64, sup_h: f64, n: usize) -> f64 {
    (r0 * r0 + 2.0 * sup_h + (2 * n) as f64) / epsilon
}

/// The assembled invariant-set radius R = 2r₀ + r₁.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriBound {
    pub epsilon: f64,
    pub kappa: f64,
    pub r0: f64,
    pub r1: f64,
    pub radius: f64,
    pub r0_provenance: String,
    pub r1_provenance: String,
}

/// Builds the full ledger; uses computed critical values when supplied and
/// the coefficient bound otherwise. Uniform over the homotopy family.
pub fn apriori_radius(
    family: &HomotopyFamily,
    epsilon: f64,
    omega: &OmegaSpec,
    critical_values: Option<&[f64]>,
) -> Result<AprioriBound> {
    let wbd = wbd_radius(family, epsilon, omega)?;
    let (r1, r1_provenance) = match critical_values {
        Some(values) => (
            critical_spread(epsilon, values)?,
            format!("spread of {} computed critical values", values.len()),
        ),
        None => (
            critical_spread_bound(
                epsilon,
                wbd.r0,
                family.uniform_bounds().sup_h,
                family.base().n(),
            ),
            "coefficient bound on the action over B(r0)".to_string(),
        ),
    };
    Ok(AprioriBound {
        epsilon,
        kappa: wbd.kappa,
        r0: wbd.r0,
        r1,
        radius: 2.0 * wbd.r0 + r1,
        r0_provenance: "annulus radius + 2(ε + κ) from the split-field inequality".to_string(),
        r1_provenance,
    })
}

/// Outcome of the randomized soundness check of r₀.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest gradient norm seen outside B(r₀) — must exceed ε.
    pub min_gradient_norm: f64,
    pub pass: bool,
}

/// Samples points of Ω with norm above r₀ across the homotopy family and
/// verifies that the penalized gradient stays above ε there.
pub fn wbd_soundness(
    family: &HomotopyFamily,
    epsilon: f64,
    omega: &OmegaSpec,
    r0: f64,
    n: usize,
    samples: usize,
    quadrature: usize,
    rng_seed: u64,
) -> Result<SoundnessReport> {
    omega.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut violations = 0usize;
    let mut min_gradient_norm = f64::INFINITY;
    for i in 0..samples {
        let lambda = match i % 4 {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..=1.0),
        };
        let field = LsField::new(family.at(lambda)?, quadrature);

        let radii: Vec<f64> = (0..2 * n)
            .map(|_| rng.gen_range(omega.inner..=omega.outer))
            .collect();
        let angles: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..TWO_PI)).collect();
        let mut modes = random_loop(&mut rng, n, omega.cutoff, 1.0);
        modes.x0_mut().fill(0.0);
        let mode_norm = modes.h12_norm();
        let disc_sq: f64 = radii.iter().map(|r| r * r).sum();
        let target = r0 * (1.0 + rng.gen_range(0.01..=1.0));
        let needed = (target * target - disc_sq).max(1.0).sqrt();
        let modes = if mode_norm == 0.0 {
            let mut m = FourierLoop::zeros(n, omega.cutoff);
            m.coeff_mut(1)[0] = needed / TWO_PI.sqrt();
            m
        } else {
            modes.scale(needed / mode_norm)
        };
        let point = EmbeddedPoint::new(radii, angles, modes)?;
        debug_assert!(point.norm() > r0);

        let gradient_norm = embedded_gradient(&field, &point)?.norm();
        min_gradient_norm = min_gradient_norm.min(gradient_norm);
        if gradient_norm <= epsilon {
            violations += 1;
        }
    }
    Ok(SoundnessReport {
        samples,
        violations,
        min_gradient_norm,
        pass: violations == 0,
    })
}

/// One cluster of near-zeros collected across the family, with the residual
/// of its limit-point candidate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterCheck {
    pub members: usize,
    /// Smallest residual of the torus-aligned centroid over the member λ's.
    pub centroid_residual: f64,
    pub pass: bool,
}

/// Desk-scale compactness proxy for the zero set of the family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub near_zeros: usize,
    /// Largest embedded norm among collected near-zeros.
    pub bounding_radius: f64,
    /// Largest H^{1/2} norm of the lattice-normalized representatives.
    pub max_loop_norm: f64,
    pub apriori_radius: f64,
    pub bounded_by_apriori: bool,
    pub pass: bool,
    pub clusters: Vec<ClusterCheck>,
}

/// Collects near-zeros of ∇Ψ_λ across a λ-grid of the given size, checks
/// that they are bounded (by the a-priori radius) and that the limit point
/// of every convergent-looking cluster is again a near-zero.
pub fn compactness_check(
    family: &HomotopyFamily,
    cfg: &SolverConfig,
    lambda_count: usize,
) -> Result<CompactnessReport> {
    let lambdas: Vec<f64> = if lambda_count <= 1 {
        vec![0.0]
    } else {
        (0..lambda_count)
            .map(|i| i as f64 / (lambda_count - 1) as f64)
            .collect()
    };
    let stages: Vec<HomotopyStage> = homotopy_track(family, &lambdas, cfg)?;

    let mut points: Vec<(f64, FourierLoop)> = Vec::new();
    for stage in &stages {
        for orbit in &stage.orbits.orbits {
            points.push((stage.lambda, orbit.orbit.clone()));
        }
    }
    let near_zeros = points.len();
    let bounding_radius = points
        .iter()
        .map(|(_, x)| EmbeddedPoint::from_loop(x).norm())
        .fold(0.0, f64::max);
    let max_loop_norm = points
        .iter()
        .map(|(_, x)| x.h12_norm())
        .fold(0.0, f64::max);

    let omega = OmegaSpec::standard(cfg.problem.cutoff);
    let apriori = apriori_radius(family, cfg.wbd.epsilon, &omega, None)?;

    // greedy clustering by lattice-aware distance
    let cluster_radius = 2.0 * cfg.solver.dedup_delta;
    let mut assigned = vec![false; points.len()];
    let mut clusters = Vec::new();
    let residual_floor = (100.0 * cfg.solver.tol_residual).max(1e-8);
    for i in 0..points.len() {
        if assigned[i] {
            continue;
        }
        let mut member_indices = vec![i];
        assigned[i] = true;
        for j in i + 1..points.len() {
            if !assigned[j] && points[i].1.torus_h12_distance(&points[j].1) <= cluster_radius {
                assigned[j] = true;
                member_indices.push(j);
            }
        }
        if member_indices.len() < 2 {
            continue;
        }
        // align members into the lattice cell of the first and average
        let base = &points[member_indices[0]].1;
        let mut centroid = FourierLoop::zeros(base.n(), base.cutoff());
        for &mi in &member_indices {
            let shift: Vec<f64> = base
                .x0()
                .iter()
                .zip(points[mi].1.x0())
                .map(|(a, b)| (a - b).round())
                .collect();
            centroid.axpy(1.0, &points[mi].1.translate_x0(&shift));
        }
        let centroid = centroid.scale(1.0 / member_indices.len() as f64);
        let centroid_residual = member_indices
            .iter()
            .map(|&mi| {
                let field = LsField::new(family.at(points[mi].0)?, cfg.samples());
                field.residual(&centroid)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        clusters.push(ClusterCheck {
            members: member_indices.len(),
            centroid_residual,
            pass: centroid_residual < residual_floor,
        });
    }

    let bounded_by_apriori = bounding_radius <= apriori.radius;
    let pass = bounded_by_apriori && clusters.iter().all(|c| c.pass);
    Ok(CompactnessReport {
        near_zeros,
        bounding_radius,
        max_loop_norm,
        apriori_radius: apriori.radius,
        bounded_by_apriori,
        clusters,
        pass,
    })
}
