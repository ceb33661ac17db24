//! The symplectic action functional on the truncated loop space.
//!
//! For a loop x and Hamiltonian H the action is Φ_H(x) = a(x) − b(x) with
//!
//! ```text
//! a(x) = ½(‖P⁺x‖_s² − ‖P⁻x‖_s²)      (spectral form of ½∫⟨−Jẋ, x⟩ dt)
//! b(x) = ∫₀¹ H(t, x(t)) dt            (uniform-grid quadrature)
//! ```
//!
//! Its H^{1/2} gradient splits as L + K: the linear part L = P⁺ − P⁻ is
//! diagonal in the spectral decomposition, and the nonlinearity K = −j*∇H
//! pulls the sampled gradient of H back through the metric-inverse weights
//! 1/(2π|k|). The shifted pair L̂ = L + P₀, K̂ = K − P₀ makes the linear part
//! invertible without changing the sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{DerivativeBounds, HamiltonianSpec};
use crate::loops::{transform, FourierLoop, SpectralPart, TWO_PI};

/// Default quadrature size for cutoff N.
///
/// The trapezoid rule on a smooth 1-periodic integrand converges spectrally;
/// 8N samples keep the quadrature error of the composed trigonometric
/// integrands far below the solver tolerances (and satisfy the hard floor
/// 2N+1 of the discrete transform).
pub fn default_samples(cutoff: usize) -> usize {
    (8 * cutoff).max(2 * cutoff + 1)
}

/// Apply L = P⁺ − P⁻.
pub fn linear_part(x: &FourierLoop) -> FourierLoop {
    let mut out = x.clone();
    out.x0_mut().fill(0.0);
    for k in 1..=x.cutoff() as i64 {
        for c in out.coeff_mut(-k) {
            *c = -*c;
        }
    }
    out
}

/// Apply L̂ = L + P₀ (invertible: eigenvalue +1 on Z₀ ∪ Z⁺, −1 on Z⁻).
pub fn linear_part_shifted(x: &FourierLoop) -> FourierLoop {
    let mut out = linear_part(x);
    let x0 = x.x0().to_vec();
    out.x0_mut().copy_from_slice(&x0);
    out
}

/// Pull an L²-gradient loop back through the H^{1/2} metric inverse and
/// negate: g ↦ −j*g, i.e. (·)₀ ↦ −g₀ and (·)_k ↦ −g_k/(2π|k|).
fn metric_pullback_neg(g: &FourierLoop) -> FourierLoop {
    let mut out = g.clone();
    for c in out.x0_mut() {
        *c = -*c;
    }
    for k in 1..=g.cutoff() as i64 {
        for &signed in &[k, -k] {
            let w = -1.0 / (TWO_PI * k as f64);
            for c in out.coeff_mut(signed) {
                *c *= w;
            }
        }
    }
    out
}

/// The LS-structure L + K of ∇Φ_H on the truncation, at a fixed quadrature
/// size. All evaluations are pure; the struct only carries H and M.
#[derive(Clone, Debug)]
pub struct LsField {
    ham: HamiltonianSpec,
    samples: usize,
}

impl LsField {
    pub fn new(ham: HamiltonianSpec, samples: usize) -> Self {
        Self { ham, samples }
    }

    /// Uses [`default_samples`] for the given cutoff.
    pub fn with_default_samples(ham: HamiltonianSpec, cutoff: usize) -> Self {
        let samples = default_samples(cutoff);
        Self::new(ham, samples)
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.ham
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Φ_H(x) = a(x) − b(x).
    pub fn action_value(&self, x: &FourierLoop) -> Result<f64> {
        let a = quadratic_action(x);
        if self.ham.terms().is_empty() {
            return Ok(a);
        }
        let points = x.evaluate(self.samples)?;
        let m = points.len() as f64;
        let b: f64 = points
            .iter()
            .enumerate()
            .map(|(j, p)| self.ham.eval(j as f64 / m, p))
            .sum::<f64>()
            / m;
        Ok(a - b)
    }

    /// The nonlinearity K(x) = −j*∇H sampled on the quadrature grid and
    /// projected onto the cutoff.
    pub fn nonlinear(&self, x: &FourierLoop) -> Result<FourierLoop> {
        if self.ham.terms().is_empty() {
            return Ok(FourierLoop::zeros(x.n(), x.cutoff()));
        }
        let points = x.evaluate(self.samples)?;
        let m = points.len() as f64;
        let mut grads = Vec::with_capacity(points.len());
        for (j, p) in points.iter().enumerate() {
            grads.push(self.ham.grad(j as f64 / m, p));
        }
        let g = transform(&grads, x.n(), x.cutoff())?;
        Ok(metric_pullback_neg(&g))
    }

    /// K̂(x) = K(x) − P₀x.
    pub fn nonlinear_shifted(&self, x: &FourierLoop) -> Result<FourierLoop> {
        let mut out = self.nonlinear(x)?;
        let shift = x.project(SpectralPart::Zero);
        out.axpy(-1.0, &shift);
        Ok(out)
    }

    /// ∇Φ_H(x) = Lx + K(x) in the H^{1/2} metric.
    pub fn gradient(&self, x: &FourierLoop) -> Result<FourierLoop> {
        let mut out = linear_part(x);
        let k = self.nonlinear(x)?;
        out.axpy(1.0, &k);
        Ok(out)
    }

    /// Residual ‖∇Φ_H(x)‖_s.
    pub fn residual(&self, x: &FourierLoop) -> Result<f64> {
        Ok(self.gradient(x)?.h12_norm())
    }

    /// Precomputes the Hessian-vector operator at the base point `x`.
    pub fn hessian(&self, x: &FourierLoop) -> Result<HessianOperator> {
        let d = x.point_dim();
        let hess_samples = if self.ham.terms().is_empty() {
            Vec::new()
        } else {
            let points = x.evaluate(self.samples)?;
            let m = points.len() as f64;
            points
                .iter()
                .enumerate()
                .map(|(j, p)| self.ham.hess(j as f64 / m, p))
                .collect()
        };
        Ok(HessianOperator {
            n: x.n(),
            cutoff: x.cutoff(),
            samples: self.samples,
            point_dim: d,
            hess_samples,
        })
    }
}

/// a(x) = ½(‖P⁺x‖_s² − ‖P⁻x‖_s²) = π Σ_k k|x_k|².
pub fn quadratic_action(x: &FourierLoop) -> f64 {
    let mut acc = 0.0;
    for k in 1..=x.cutoff() as i64 {
        let plus: f64 = x.coeff(k).iter().map(|c| c * c).sum();
        let minus: f64 = x.coeff(-k).iter().map(|c| c * c).sum();
        acc += std::f64::consts::PI * k as f64 * (plus - minus);
    }
    acc
}

/// Φ_H(x) at quadrature size `samples`.
pub fn action_value(ham: &HamiltonianSpec, x: &FourierLoop, samples: usize) -> Result<f64> {
    LsField::new(ham.clone(), samples).action_value(x)
}

/// ∇Φ_H(x) at quadrature size `samples`.
pub fn gradient(ham: &HamiltonianSpec, x: &FourierLoop, samples: usize) -> Result<FourierLoop> {
    LsField::new(ham.clone(), samples).gradient(x)
}

/// D²Φ_H(x)[v] at quadrature size `samples`.
pub fn hessian_vec(
    ham: &HamiltonianSpec,
    x: &FourierLoop,
    v: &FourierLoop,
    samples: usize,
) -> Result<FourierLoop> {
    Ok(LsField::new(ham.clone(), samples).hessian(x)?.apply(v))
}

/// Hessian-vector products Lv + DK(x)v with H''(t, x(t)) frozen at the base
/// point. Symmetric with respect to ⟨·,·⟩_s by construction.
#[derive(Clone, Debug)]
pub struct HessianOperator {
    n: usize,
    cutoff: usize,
    samples: usize,
    point_dim: usize,
    /// H''(t_j, x(t_j)) as row-major 2n×2n matrices; empty for H ≡ 0.
    hess_samples: Vec<Vec<f64>>,
}

impl HessianOperator {
    pub fn apply(&self, v: &FourierLoop) -> FourierLoop {
        let mut out = linear_part(v);
        if self.hess_samples.is_empty() {
            return out;
        }
        let points = v.evaluate(self.samples).expect("operator cutoff fits");
        let d = self.point_dim;
        let mut products = Vec::with_capacity(points.len());
        for (h, p) in self.hess_samples.iter().zip(&points) {
            let mut w = vec![0.0; d];
            for i in 0..d {
                let row = &h[i * d..(i + 1) * d];
                w[i] = row.iter().zip(p).map(|(a, b)| a * b).sum();
            }
            products.push(w);
        }
        let g = transform(&products, self.n, self.cutoff).expect("operator shapes");
        out.axpy(1.0, &metric_pullback_neg(&g));
        out
    }
}

/// Truncated-proxy bound ‖K(x)‖_s ≤ supGrad · C(N), with C(N) the largest of
/// the inverse-metric factors {1} ∪ {1/√(2π|k|·2π|k|)…} — explicitly, the
/// k = 0 weight 1 dominates, so C(N) = 1 for every cutoff.
pub fn nonlinearity_norm_bound(bounds: &DerivativeBounds, cutoff: usize) -> f64 {
    let factor = (0..=cutoff)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                1.0 / (TWO_PI * k as f64)
            }
        })
        .fold(0.0f64, f64::max);
    bounds.sup_grad * factor.sqrt().max(factor)
}

/// A point of the embedded search space U = D₀^{2n} × Z⁺ × Z⁻: one punctured
/// disc (radius, angle) per torus coordinate plus the oscillating modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    radii: Vec<f64>,
    angles: Vec<f64>,
    modes: FourierLoop,
}

impl EmbeddedPoint {
    /// Builds a point; every radius must lie in the punctured disc (0, 2).
    /// The mean of `modes` must be zero (it is carried by the angles).
    pub fn new(radii: Vec<f64>, angles: Vec<f64>, modes: FourierLoop) -> Result<Self> {
        if radii.len() != modes.point_dim() || angles.len() != modes.point_dim() {
            return Err(Error::ShapeMismatch {
                context: "embedded point blocks",
                expected: modes.point_dim(),
                got: radii.len(),
            });
        }
        for &r in &radii {
            if !(r > 0.0 && r < 2.0) {
                return Err(Error::OutOfRange {
                    what: "embedded radius",
                    value: r,
                    range: "(0, 2)",
                });
            }
        }
        if modes.x0().iter().any(|&c| c != 0.0) {
            return Err(Error::OutOfRange {
                what: "embedded mode mean",
                value: modes.x0()[0],
                range: "{0}",
            });
        }
        Ok(Self {
            radii,
            angles,
            modes,
        })
    }

    /// Lifts a loop onto the unit torus (all radii 1).
    pub fn from_loop(x: &FourierLoop) -> Self {
        let radii = vec![1.0; x.point_dim()];
        let angles = x.x0().iter().map(|c| TWO_PI * c).collect();
        let mut modes = x.clone();
        modes.x0_mut().fill(0.0);
        Self {
            radii,
            angles,
            modes,
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn modes(&self) -> &FourierLoop {
        &self.modes
    }

    /// π: forget the radii and read the loop mean off the angles.
    pub fn project_to_loop(&self) -> FourierLoop {
        let mut x = self.modes.clone();
        for (c, &theta) in x.x0_mut().iter_mut().zip(&self.angles) {
            *c = theta / TWO_PI;
        }
        x
    }

    /// Norm in Ê = R^{4n} × Z⁺ × Z⁻: Euclidean on the disc block, H^{1/2} on
    /// the modes.
    pub fn norm(&self) -> f64 {
        let disc: f64 = self.radii.iter().map(|r| r * r).sum();
        (disc + self.modes.h12_norm_sq()).sqrt()
    }
}

/// Gradient of the penalized functional Ψ_H at an embedded point, split into
/// its radial, angular and oscillating components.
#[derive(Clone, Debug)]
pub struct EmbeddedGradient {
    /// ∂Ψ/∂rᵢ = 2(rᵢ − 1).
    pub radial: Vec<f64>,
    /// Tangential Cartesian components (1/rᵢ)·∂Ψ/∂θᵢ.
    pub angular: Vec<f64>,
    /// The Z⁺ ⊕ Z⁻ block of ∇Φ_H at π(p).
    pub modes: FourierLoop,
}

impl EmbeddedGradient {
    pub fn norm(&self) -> f64 {
        let sq: f64 = self.radial.iter().map(|a| a * a).sum::<f64>()
            + self.angular.iter().map(|a| a * a).sum::<f64>()
            + self.modes.h12_norm_sq();
        sq.sqrt()
    }
}

/// Ψ_H(p) = Φ_H(π(p)) + Σᵢ (1 − rᵢ)².
pub fn embedded_value(field: &LsField, p: &EmbeddedPoint) -> Result<f64> {
    check_radii(p)?;
    let penalty: f64 = p.radii.iter().map(|r| (1.0 - r) * (1.0 - r)).sum();
    Ok(field.action_value(&p.project_to_loop())? + penalty)
}

/// ∇Ψ_H(p); vanishes exactly when every radius is 1 and π(p) is a critical
/// loop of Φ_H.
pub fn embedded_gradient(field: &LsField, p: &EmbeddedPoint) -> Result<EmbeddedGradient> {
    check_radii(p)?;
    let full = field.gradient(&p.project_to_loop())?;
    let radial = p.radii.iter().map(|r| 2.0 * (r - 1.0)).collect();
    let angular = full
        .x0()
        .iter()
        .zip(&p.radii)
        .map(|(g, r)| g / (TWO_PI * r))
        .collect();
    let mut modes = full;
    modes.x0_mut().fill(0.0);
    Ok(EmbeddedGradient {
        radial,
        angular,
        modes,
    })
}

fn check_radii(p: &EmbeddedPoint) -> Result<()> {
    for &r in &p.radii {
        if !(r > 0.0 && r < 2.0) {
            return Err(Error::OutOfRange {
                what: "embedded radius",
                value: r,
                range: "(0, 2)",
            });
        }
    }
    Ok(())
}
