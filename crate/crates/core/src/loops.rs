//! Finite-dimensional model of the H^{1/2} loop space.
//!
//! A loop x: S¹ → R^{2n} is stored by its coefficients against the real
//! rotation basis e_k(t) = exp(2πkt·J), where J is the standard symplectic
//! matrix acting blockwise on symplectic pairs:
//!
//! ```text
//! x(t) = x₀ + Σ_{0 < |k| ≤ N} e_k(t) x_k,        x_k ∈ R^{2n}.
//! ```
//!
//! The H^{1/2} scalar product is `⟨x,y⟩_s = ⟨x₀,y₀⟩ + 2π Σ_k |k| ⟨x_k,y_k⟩`
//! and splits the space orthogonally into Z₀ (k = 0), Z⁺ (k > 0) and
//! Z⁻ (k < 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The three spectral components of the loop space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralPart {
    /// Constant loops, k = 0.
    Zero,
    /// Positively rotating modes, k > 0.
    Plus,
    /// Negatively rotating modes, k < 0.
    Minus,
}

/// Bookkeeping for the orthogonal splitting Z₀ ⊕ Z⁺ ⊕ Z⁻ at a fixed cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralDecomposition {
    n: usize,
    cutoff: usize,
}

impl SpectralDecomposition {
    pub fn new(n: usize, cutoff: usize) -> Self {
        Self { n, cutoff }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Dimension of the selected subspace.
    pub fn dim(&self, part: SpectralPart) -> usize {
        match part {
            SpectralPart::Zero => 2 * self.n,
            SpectralPart::Plus | SpectralPart::Minus => 2 * self.n * self.cutoff,
        }
    }

    /// Total dimension 2n(2N+1) of the truncated space.
    pub fn total_dim(&self) -> usize {
        2 * self.n * (2 * self.cutoff + 1)
    }

    /// Mode indices belonging to the selected subspace.
    pub fn modes(&self, part: SpectralPart) -> Vec<i64> {
        let n = self.cutoff as i64;
        match part {
            SpectralPart::Zero => vec![0],
            SpectralPart::Plus => (1..=n).collect(),
            SpectralPart::Minus => (1..=n).map(|k| -k).collect(),
        }
    }
}

/// A loop in R^{2n} truncated at Fourier cutoff N, in the rotation basis.
///
/// Coefficient layout: block 0 is x₀; for k = 1..=N block 2k−1 holds x_k and
/// block 2k holds x_{−k}; every block has 2n entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierLoop {
    n: usize,
    cutoff: usize,
    data: Vec<f64>,
}

fn block_index(k: i64) -> usize {
    if k == 0 {
        0
    } else if k > 0 {
        2 * k as usize - 1
    } else {
        2 * (-k) as usize
    }
}

impl FourierLoop {
    /// The zero loop at half-dimension `n` and cutoff `cutoff`.
    pub fn zeros(n: usize, cutoff: usize) -> Self {
        Self {
            n,
            cutoff,
            data: vec![0.0; 2 * n * (2 * cutoff + 1)],
        }
    }

    /// The constant loop with value `x0`.
    pub fn constant(x0: &[f64], cutoff: usize) -> Self {
        assert_eq!(x0.len() % 2, 0, "constant loop needs an even dimension");
        let n = x0.len() / 2;
        let mut result = Self::zeros(n, cutoff);
        result.x0_mut().copy_from_slice(x0);
        result
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Dimension 2n of the target space.
    pub fn point_dim(&self) -> usize {
        2 * self.n
    }

    /// Total number of stored real coefficients, 2n(2N+1).
    pub fn total_dim(&self) -> usize {
        self.data.len()
    }

    pub fn decomposition(&self) -> SpectralDecomposition {
        SpectralDecomposition::new(self.n, self.cutoff)
    }

    /// Coefficient vector of mode `k` (`|k| ≤ N`).
    pub fn coeff(&self, k: i64) -> &[f64] {
        assert!(k.unsigned_abs() as usize <= self.cutoff, "mode out of range");
        let b = block_index(k);
        &self.data[b * 2 * self.n..(b + 1) * 2 * self.n]
    }

    pub fn coeff_mut(&mut self, k: i64) -> &mut [f64] {
        assert!(k.unsigned_abs() as usize <= self.cutoff, "mode out of range");
        let b = block_index(k);
        &mut self.data[b * 2 * self.n..(b + 1) * 2 * self.n]
    }

    /// Mean value x₀ of the loop.
    pub fn x0(&self) -> &[f64] {
        self.coeff(0)
    }

    pub fn x0_mut(&mut self) -> &mut [f64] {
        self.coeff_mut(0)
    }

    /// All mode indices −N..=N with 0 first, then ±1, ±2, …
    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let n = self.cutoff as i64;
        std::iter::once(0).chain((1..=n).flat_map(|k| [k, -k]))
    }

    fn check_compatible(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.n != other.n || self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch {
                context,
                expected: self.total_dim(),
                got: other.total_dim(),
            });
        }
        Ok(())
    }

    /// H^{1/2} scalar product ⟨x₀,y₀⟩ + 2π Σ_k |k| ⟨x_k,y_k⟩.
    pub fn h12_inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other, "h12_inner")?;
        let mut acc = dot(self.x0(), other.x0());
        for k in 1..=self.cutoff as i64 {
            let w = TWO_PI * k as f64;
            acc += w * dot(self.coeff(k), other.coeff(k));
            acc += w * dot(self.coeff(-k), other.coeff(-k));
        }
        Ok(acc)
    }

    pub fn h12_norm_sq(&self) -> f64 {
        self.h12_inner(self).expect("self-compatible")
    }

    pub fn h12_norm(&self) -> f64 {
        self.h12_norm_sq().sqrt()
    }

    /// Orthogonal projection onto Z₀, Z⁺ or Z⁻.
    pub fn project(&self, part: SpectralPart) -> Self {
        let mut result = Self::zeros(self.n, self.cutoff);
        match part {
            SpectralPart::Zero => result.x0_mut().copy_from_slice(self.x0()),
            SpectralPart::Plus => {
                for k in 1..=self.cutoff as i64 {
                    result.coeff_mut(k).copy_from_slice(self.coeff(k));
                }
            }
            SpectralPart::Minus => {
                for k in 1..=self.cutoff as i64 {
                    result.coeff_mut(-k).copy_from_slice(self.coeff(-k));
                }
            }
        }
        result
    }

    /// Value of the loop at time `t` (period 1).
    pub fn evaluate_at(&self, t: f64) -> Vec<f64> {
        let mut point = self.x0().to_vec();
        for k in 1..=self.cutoff as i64 {
            for &signed in &[k, -k] {
                let angle = TWO_PI * signed as f64 * t;
                let (s, c) = angle.sin_cos();
                rotate_add(&mut point, self.coeff(signed), c, s);
            }
        }
        point
    }

    /// Samples x(t_j) at t_j = j/m for j = 0..m.
    ///
    /// Requires m ≥ 2N+1 so that no stored mode aliases on the grid.
    pub fn evaluate(&self, m: usize) -> Result<Vec<Vec<f64>>> {
        let needed = 2 * self.cutoff + 1;
        if m < needed {
            return Err(Error::TooFewSamples {
                cutoff: self.cutoff,
                needed,
                got: m,
            });
        }
        Ok((0..m)
            .map(|j| self.evaluate_at(j as f64 / m as f64))
            .collect())
    }

    /// Pointwise sum; shapes must agree.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        assert_eq!(self.cutoff, other.cutoff);
        let mut result = self.clone();
        for (a, b) in result.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        result
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        assert_eq!(self.cutoff, other.cutoff);
        let mut result = self.clone();
        for (a, b) in result.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        result
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut result = self.clone();
        for a in result.data.iter_mut() {
            *a *= factor;
        }
        result
    }

    /// In-place self += factor · other.
    pub fn axpy(&mut self, factor: f64, other: &Self) {
        assert_eq!(self.n, other.n);
        assert_eq!(self.cutoff, other.cutoff);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    /// Coordinates in the ⟨·,·⟩_s-orthonormal basis: x₀ as-is, x_k scaled by
    /// √(2π|k|). Euclidean geometry on the result is H^{1/2} geometry here.
    pub fn to_h12_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.total_dim());
        v.extend_from_slice(self.x0());
        for k in 1..=self.cutoff as i64 {
            let w = (TWO_PI * k as f64).sqrt();
            v.extend(self.coeff(k).iter().map(|c| c * w));
            v.extend(self.coeff(-k).iter().map(|c| c * w));
        }
        v
    }

    /// Inverse of [`FourierLoop::to_h12_vec`].
    pub fn from_h12_vec(n: usize, cutoff: usize, v: &[f64]) -> Self {
        let mut result = Self::zeros(n, cutoff);
        assert_eq!(v.len(), result.total_dim());
        let width = 2 * n;
        result.x0_mut().copy_from_slice(&v[..width]);
        let mut offset = width;
        for k in 1..=cutoff as i64 {
            let w = 1.0 / (TWO_PI * k as f64).sqrt();
            for &signed in &[k, -k] {
                for (dst, src) in result
                    .coeff_mut(signed)
                    .iter_mut()
                    .zip(&v[offset..offset + width])
                {
                    *dst = src * w;
                }
                offset += width;
            }
        }
        result
    }

    /// Copies the loop into cutoff `new_cutoff`, zero-padding or truncating.
    pub fn with_cutoff(&self, new_cutoff: usize) -> Self {
        let mut result = Self::zeros(self.n, new_cutoff);
        result.x0_mut().copy_from_slice(self.x0());
        for k in 1..=self.cutoff.min(new_cutoff) as i64 {
            result.coeff_mut(k).copy_from_slice(self.coeff(k));
            result.coeff_mut(-k).copy_from_slice(self.coeff(-k));
        }
        result
    }

    /// Translates the mean by a lattice vector.
    pub fn translate_x0(&self, shift: &[f64]) -> Self {
        assert_eq!(shift.len(), self.point_dim());
        let mut result = self.clone();
        for (a, b) in result.x0_mut().iter_mut().zip(shift) {
            *a += b;
        }
        result
    }

    /// Reduces every mean coordinate into [0, 1). Idempotent.
    pub fn normalize_lattice(&self) -> Self {
        let mut result = self.clone();
        for a in result.x0_mut().iter_mut() {
            let mut r = a.rem_euclid(1.0);
            if r >= 1.0 {
                r = 0.0;
            }
            *a = r;
        }
        result
    }

    /// H^{1/2} distance that treats the mean modulo the lattice Z^{2n}
    /// (per-coordinate shortest representative).
    pub fn torus_h12_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        assert_eq!(self.cutoff, other.cutoff);
        let mut acc = 0.0;
        for (a, b) in self.x0().iter().zip(other.x0()) {
            let d = (a - b).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            acc += d * d;
        }
        for k in 1..=self.cutoff as i64 {
            let w = TWO_PI * k as f64;
            for &signed in &[k, -k] {
                for (a, b) in self.coeff(signed).iter().zip(other.coeff(signed)) {
                    acc += w * (a - b) * (a - b);
                }
            }
        }
        acc.sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// out += R(c, s) · v per symplectic pair, R the rotation with cosine `c`
/// and sine `s`.
fn rotate_add(out: &mut [f64], v: &[f64], c: f64, s: f64) {
    for p in 0..out.len() / 2 {
        out[2 * p] += c * v[2 * p] - s * v[2 * p + 1];
        out[2 * p + 1] += s * v[2 * p] + c * v[2 * p + 1];
    }
}

/// Discrete projection of `samples` (values on the uniform grid t_j = j/m)
/// onto the modes |k| ≤ cutoff.
///
/// Frequencies are read modulo the m-periodic grid, so content above the
/// cutoff aliases to k mod m first and is then dropped if it still lies
/// outside the band. On loops that already live at the cutoff this is the
/// exact inverse of [`FourierLoop::evaluate`] whenever m ≥ 2N+1.
pub fn transform(samples: &[Vec<f64>], n: usize, cutoff: usize) -> Result<FourierLoop> {
    let m = samples.len();
    let needed = 2 * cutoff + 1;
    if m < needed {
        return Err(Error::TooFewSamples {
            cutoff,
            needed,
            got: m,
        });
    }
    for point in samples {
        if point.len() != 2 * n {
            return Err(Error::ShapeMismatch {
                context: "transform sample",
                expected: 2 * n,
                got: point.len(),
            });
        }
    }

    let mut result = FourierLoop::zeros(n, cutoff);
    for k in -(cutoff as i64)..=cutoff as i64 {
        let coeff = result.coeff_mut(k);
        for (j, point) in samples.iter().enumerate() {
            let angle = TWO_PI * k as f64 * j as f64 / m as f64;
            let (s, c) = angle.sin_cos();
            for p in 0..n {
                let a = point[2 * p];
                let b = point[2 * p + 1];
                // (a + ib) e^{-iθ} per symplectic pair
                coeff[2 * p] += a * c + b * s;
                coeff[2 * p + 1] += b * c - a * s;
            }
        }
        for entry in coeff.iter_mut() {
            *entry /= m as f64;
        }
    }
    Ok(result)
}

/// Fills a loop with coefficients drawn uniformly from [-amplitude, amplitude],
/// for seeding and randomized checks.
pub fn random_loop<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    cutoff: usize,
    amplitude: f64,
) -> FourierLoop {
    let mut result = FourierLoop::zeros(n, cutoff);
    for a in result.data.iter_mut() {
        *a = rng.gen_range(-amplitude..=amplitude);
    }
    result
}
