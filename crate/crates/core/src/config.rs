//! Run configuration shared by the solver and the command-line front end.

use serde::{Deserialize, Serialize};

use crate::action::{default_samples, LsField};
use crate::error::{Error, Result};
use crate::hamiltonian::{catalog, HamiltonianSpec, TrigTerm, CATALOG_KEYS};
use crate::topology::{CoeffField, TopologyFixture};

/// Hamiltonian selection: a catalog key or an inline term list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianRef {
    Catalog(String),
    Inline { terms: Vec<TrigTerm> },
}

/// The problem block: torus dimension, truncation and the Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// Torus half-dimension; loops take values in R^{2n}.
    pub n: usize,
    /// Fourier cutoff N.
    pub cutoff: usize,
    /// Quadrature sample count M; defaults to 8N.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub hamiltonian: HamiltonianRef,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSection {
    /// Constant-loop seeds per torus coordinate (g^{2n} grid points).
    pub seed_grid: usize,
    /// Random Fourier-perturbed seeds per grid point.
    pub random_seeds: usize,
    /// Amplitude of the random seed perturbations.
    pub seed_perturbation: f64,
    pub rng_seed: u64,
    /// Newton acceptance threshold on ‖∇Φ_H‖_s.
    pub tol_residual: f64,
    /// Period-map acceptance threshold for the independent ODE check.
    pub tol_ode: f64,
    /// Steps of the fourth-order one-period integrator.
    pub ode_steps: usize,
    /// Lattice-aware H^{1/2} deduplication distance δ.
    pub dedup_delta: f64,
    pub max_iter: usize,
    /// Hessian eigenvalues within [−tol_degenerate, tol_degenerate] count as
    /// kernel directions.
    pub tol_degenerate: f64,
    /// Norm beyond which a search or flow is reported as escaped.
    pub guard_radius: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            seed_grid: 4,
            random_seeds: 2,
            seed_perturbation: 0.05,
            rng_seed: 1,
            tol_residual: 1e-10,
            tol_ode: 1e-4,
            ode_steps: 4096,
            dedup_delta: 1e-3,
            max_iter: 60,
            tol_degenerate: 1e-8,
            guard_radius: 50.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WbdSection {
    /// The ε of the weak boundedness condition; any positive value yields a
    /// valid radius ledger.
    pub epsilon: f64,
}

impl Default for WbdSection {
    fn default() -> Self {
        Self { epsilon: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HomotopySection {
    pub lambda_grid: Vec<f64>,
}

impl Default for HomotopySection {
    fn default() -> Self {
        Self {
            lambda_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopologySection {
    pub field: CoeffField,
    /// Random linear combinations per degree in the cup-length search.
    pub random_per_degree: usize,
    /// Optional ad-hoc ring/module instance for the cuplength command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<TopologyFixture>,
}

impl Default for TopologySection {
    fn default() -> Self {
        Self {
            field: CoeffField::Rationals,
            random_per_degree: 32,
            fixture: None,
        }
    }
}

/// Full run configuration. All tolerances are pinned here; reports echo the
/// validated configuration for reproducibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub wbd: WbdSection,
    #[serde(default)]
    pub homotopy: HomotopySection,
    #[serde(default)]
    pub topology: TopologySection,
}

fn default_schema_version() -> u32 {
    1
}

impl SolverConfig {
    /// A ready-to-run configuration for a catalog Hamiltonian.
    pub fn for_catalog(key: &str, n: usize, cutoff: usize) -> Self {
        Self {
            schema_version: 1,
            problem: ProblemConfig {
                n,
                cutoff,
                samples: None,
                hamiltonian: HamiltonianRef::Catalog(key.to_string()),
            },
            solver: SolverSection::default(),
            wbd: WbdSection::default(),
            homotopy: HomotopySection::default(),
            topology: TopologySection::default(),
        }
    }

    pub fn samples(&self) -> usize {
        self.problem
            .samples
            .unwrap_or_else(|| default_samples(self.problem.cutoff))
    }

    /// Resolves the configured Hamiltonian.
    pub fn hamiltonian(&self) -> Result<HamiltonianSpec> {
        match &self.problem.hamiltonian {
            HamiltonianRef::Catalog(key) => catalog(key, self.problem.n).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown catalog key `{key}` (available: {})",
                    CATALOG_KEYS.join(", ")
                ))
            }),
            HamiltonianRef::Inline { terms } => {
                HamiltonianSpec::new(self.problem.n, terms.clone())
            }
        }
    }

    /// The LS-field of the configured problem.
    pub fn field(&self) -> Result<LsField> {
        Ok(LsField::new(self.hamiltonian()?, self.samples()))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if p.n == 0 {
            return Err(Error::InvalidConfig("problem.n must be at least 1".into()));
        }
        if p.cutoff == 0 {
            return Err(Error::InvalidConfig(
                "problem.cutoff must be at least 1".into(),
            ));
        }
        if self.samples() < 2 * p.cutoff + 1 {
            return Err(Error::InvalidConfig(format!(
                "problem.samples = {} is below the transform floor 2N+1 = {}",
                self.samples(),
                2 * p.cutoff + 1
            )));
        }
        let s = &self.solver;
        for (name, value) in [
            ("solver.tol_residual", s.tol_residual),
            ("solver.tol_ode", s.tol_ode),
            ("solver.dedup_delta", s.dedup_delta),
            ("solver.tol_degenerate", s.tol_degenerate),
            ("solver.guard_radius", s.guard_radius),
            ("wbd.epsilon", self.wbd.epsilon),
        ] {
            if !(value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if s.seed_grid == 0 {
            return Err(Error::InvalidConfig(
                "solver.seed_grid must be at least 1".into(),
            ));
        }
        if s.ode_steps == 0 || s.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "solver.ode_steps and solver.max_iter must be positive".into(),
            ));
        }
        let grid = &self.homotopy.lambda_grid;
        if grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig(
                "homotopy.lambda_grid must be sorted".into(),
            ));
        }
        if grid.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidConfig(
                "homotopy.lambda_grid entries must lie in [0, 1]".into(),
            ));
        }
        self.hamiltonian().map(|_| ())
    }
}
