//! Trigonometric-polynomial Hamiltonians on the torus.
//!
//! Every Hamiltonian here is a finite sum of terms
//! `c · cos(2π(⟨m, x⟩ + νt) + φ)` with integer spatial frequency m ∈ Z^{2n}
//! and integer temporal frequency ν. Integer frequencies make the required
//! Z^{2n}-periodicity in space and 1-periodicity in time exact, and give
//! closed-form derivatives and global derivative bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loops::TWO_PI;

/// One cosine term `amplitude · cos(2π(⟨spatial, x⟩ + temporal·t) + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub spatial: Vec<i64>,
    #[serde(default)]
    pub temporal: i64,
    #[serde(default)]
    pub phase: f64,
}

/// A Z^{2n}-space-periodic, 1-time-periodic Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    n: usize,
    terms: Vec<TrigTerm>,
}

/// Sup-norm bounds (|H|, |∇H|, |H''|) derived from the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBounds {
    pub sup_h: f64,
    pub sup_grad: f64,
    pub sup_hess: f64,
}

impl HamiltonianSpec {
    pub fn new(n: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        for term in &terms {
            if term.spatial.len() != 2 * n {
                return Err(Error::ShapeMismatch {
                    context: "trig term spatial frequency",
                    expected: 2 * n,
                    got: term.spatial.len(),
                });
            }
        }
        Ok(Self { n, terms })
    }

    /// The zero Hamiltonian.
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == 0.0)
    }

    /// H(t, x).
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), 2 * self.n);
        self.terms
            .iter()
            .map(|term| term.amplitude * term_angle(term, t, x).cos())
            .sum()
    }

    /// ∇H(t, x) with respect to x.
    pub fn grad(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.n];
        self.grad_into(t, x, &mut out);
        out
    }

    pub fn grad_into(&self, t: f64, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), 2 * self.n);
        out.fill(0.0);
        for term in &self.terms {
            let factor = -TWO_PI * term.amplitude * term_angle(term, t, x).sin();
            for (o, &mi) in out.iter_mut().zip(&term.spatial) {
                *o += factor * mi as f64;
            }
        }
    }

    /// Second spatial derivative H''(t, x), a symmetric 2n×2n matrix in
    /// row-major order.
    pub fn hess(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let d = 2 * self.n;
        let mut out = vec![0.0; d * d];
        for term in &self.terms {
            let factor = -TWO_PI * TWO_PI * term.amplitude * term_angle(term, t, x).cos();
            for i in 0..d {
                for j in 0..d {
                    out[i * d + j] += factor * term.spatial[i] as f64 * term.spatial[j] as f64;
                }
            }
        }
        out
    }

    /// Coefficient-sum bounds Σ|c|·(1, 2π|m|, 4π²|m|²).
    pub fn bounds(&self) -> DerivativeBounds {
        let mut sup_h = 0.0;
        let mut sup_grad = 0.0;
        let mut sup_hess = 0.0;
        for term in &self.terms {
            let c = term.amplitude.abs();
            let m_norm: f64 = term
                .spatial
                .iter()
                .map(|&mi| (mi * mi) as f64)
                .sum::<f64>()
                .sqrt();
            sup_h += c;
            sup_grad += c * TWO_PI * m_norm;
            sup_hess += c * TWO_PI * TWO_PI * m_norm * m_norm;
        }
        DerivativeBounds {
            sup_h,
            sup_grad,
            sup_hess,
        }
    }

    /// Rescales every amplitude.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm {
                amplitude: factor * t.amplitude,
                ..t.clone()
            })
            .collect();
        Self { n: self.n, terms }
    }
}

fn term_angle(term: &TrigTerm, t: f64, x: &[f64]) -> f64 {
    let spatial: f64 = term
        .spatial
        .iter()
        .zip(x)
        .map(|(&mi, &xi)| mi as f64 * xi)
        .sum();
    TWO_PI * (spatial + term.temporal as f64 * t) + term.phase
}

/// The linear homotopy H_λ = (1−λ)·H shrinking a Hamiltonian to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomotopyFamily {
    base: HamiltonianSpec,
}

impl HomotopyFamily {
    pub fn new(base: HamiltonianSpec) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &HamiltonianSpec {
        &self.base
    }

    /// H_λ for λ ∈ [0, 1]; λ = 0 is the base, λ = 1 the zero Hamiltonian.
    pub fn at(&self, lambda: f64) -> Result<HamiltonianSpec> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange {
                what: "homotopy parameter",
                value: lambda,
                range: "[0, 1]",
            });
        }
        Ok(self.base.scaled(1.0 - lambda))
    }

    /// Derivative bounds valid for every λ ∈ [0, 1] (the base dominates).
    pub fn uniform_bounds(&self) -> DerivativeBounds {
        self.base.bounds()
    }
}

/// Built-in Hamiltonians addressable by key.
///
/// * `zero` — the trivial Hamiltonian.
/// * `cosine-morse` — Σᵢ 0.1·cos(2πxᵢ), a Morse function with 2^{2n}
///   nondegenerate critical points (all near-constant orbits).
/// * `time-driven` — `cosine-morse` plus a small ν = 1 travelling term that
///   makes the orbits genuinely time-dependent.
pub fn catalog(key: &str, n: usize) -> Option<HamiltonianSpec> {
    let unit = |i: usize| {
        let mut m = vec![0i64; 2 * n];
        m[i] = 1;
        m
    };
    match key {
        "zero" => Some(HamiltonianSpec::zero(n)),
        "cosine-morse" => {
            let terms = (0..2 * n)
                .map(|i| TrigTerm {
                    amplitude: 0.1,
                    spatial: unit(i),
                    temporal: 0,
                    phase: 0.0,
                })
                .collect();
            Some(HamiltonianSpec::new(n, terms).expect("catalog shapes"))
        }
        "time-driven" => {
            let mut base = catalog("cosine-morse", n)?;
            base.terms.push(TrigTerm {
                amplitude: 0.02,
                spatial: unit(0),
                temporal: 1,
                phase: 0.0,
            });
            Some(base)
        }
        _ => None,
    }
}

/// Keys accepted by [`catalog`].
pub const CATALOG_KEYS: [&str; 3] = ["zero", "cosine-morse", "time-driven"];
