//! Finite graded-algebra models and the relative cup-length.
//!
//! Everything here is finite-dimensional and exact: rings and modules are
//! given by integer structure constants over a coefficient field (the
//! rationals, where integer arithmetic decides vanishing, or the two-element
//! field, where constants are reduced mod 2). The cup-length of a module M
//! over a ring R is the largest k such that some chain
//! β·α₁·…·α_{k−1} ≠ 0 with β ∈ M and αᵢ of positive degree in R survives;
//! it is 0 for the zero module and 1 when every positive-degree action kills
//! the module.
//!
//! The torus model: the index pair of the trivial flow on the embedded torus
//! is a product (annulus^{2n} × ball × ball, exit on the boundary of the
//! negative ball), whose cohomology is the exterior algebra on 2n degree-1
//! generators as a module over itself — cup-length 2n+1.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field for the graded algebra layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffField {
    /// Exact rational coefficients (integer lattice arithmetic suffices:
    /// structure constants and witnesses stay integral, and an integer
    /// vector vanishes over Q iff it vanishes over Z).
    Rationals,
    /// The two-element field; sign bookkeeping disappears.
    TwoElement,
}

impl Default for CoeffField {
    fn default() -> Self {
        CoeffField::Rationals
    }
}

impl CoeffField {
    fn normalize(self, c: i128) -> i128 {
        match self {
            CoeffField::Rationals => c,
            CoeffField::TwoElement => c.rem_euclid(2),
        }
    }
}

type Sparse = Vec<(usize, i128)>;

fn sparse_add(field: CoeffField, acc: &mut Vec<i128>, sp: &Sparse, factor: i128) {
    for &(idx, c) in sp {
        acc[idx] = field.normalize(acc[idx] + factor * c);
    }
}

fn fingerprint(parts: &[&str]) -> u64 {
    // FNV-1a; cheap structural identity for mismatch detection
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

/// An element of a graded ring or module, tagged with the fingerprint of the
/// space it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedElement {
    space: u64,
    coeffs: Vec<i128>,
}

impl GradedElement {
    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical representative of the ray through the element: divide by
    /// the gcd and make the leading coefficient positive. Nonzero-ness of
    /// products only depends on the ray.
    fn normalized_ray(&self) -> Vec<i128> {
        let mut g: i128 = 0;
        for &c in &self.coeffs {
            g = gcd(g, c.abs());
        }
        if g == 0 {
            return self.coeffs.clone();
        }
        let lead = self.coeffs.iter().find(|&&c| c != 0).copied().unwrap_or(1);
        let sign = if lead < 0 { -1 } else { 1 };
        self.coeffs.iter().map(|&c| c / g * sign).collect()
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A finite-dimensional graded ring given by integer structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedRing {
    field: CoeffField,
    labels: Vec<String>,
    degrees: Vec<u32>,
    unit: usize,
    /// products[i][j] = e_i ∪ e_j as a sparse combination.
    products: Vec<Vec<Sparse>>,
    space: u64,
}

impl GradedRing {
    /// Builds and validates a ring: grading, unit, associativity on all
    /// basis triples, graded commutativity over the chosen field.
    pub fn new(
        field: CoeffField,
        labels: Vec<String>,
        degrees: Vec<u32>,
        unit: usize,
        products: Vec<Vec<Sparse>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if degrees.len() != dim || products.len() != dim {
            return Err(Error::InvalidAlgebra("ring table sizes disagree".into()));
        }
        if unit >= dim || degrees[unit] != 0 {
            return Err(Error::InvalidAlgebra(
                "unit must be a basis element of degree 0".into(),
            ));
        }
        let mut label_parts: Vec<String> = labels.clone();
        label_parts.push(format!("ring/{field:?}"));
        for d in &degrees {
            label_parts.push(d.to_string());
        }
        let refs: Vec<&str> = label_parts.iter().map(String::as_str).collect();
        let ring = Self {
            field,
            labels,
            degrees,
            unit,
            products: products
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|sp| {
                            sp.into_iter()
                                .map(|(i, c)| (i, field.normalize(c)))
                                .filter(|&(_, c)| c != 0)
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            space: fingerprint(&refs),
        };
        ring.validate()?;
        Ok(ring)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            if self.products[i].len() != dim {
                return Err(Error::InvalidAlgebra("ragged product table".into()));
            }
            for j in 0..dim {
                let expected = self.degrees[i] + self.degrees[j];
                for &(t, _) in &self.products[i][j] {
                    if t >= dim {
                        return Err(Error::InvalidAlgebra("product index out of range".into()));
                    }
                    if self.degrees[t] != expected {
                        return Err(Error::InvalidAlgebra(format!(
                            "product {}∪{} violates the grading",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
            }
        }
        for j in 0..dim {
            if self.mul_basis(self.unit, j) != self.basis_coeffs(j)
                || self.mul_basis(j, self.unit) != self.basis_coeffs(j)
            {
                return Err(Error::InvalidAlgebra("unit does not act as identity".into()));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                // graded commutativity
                let mut ji = self.mul_basis(j, i);
                if self.field == CoeffField::Rationals
                    && (self.degrees[i] * self.degrees[j]) % 2 == 1
                {
                    for c in ji.iter_mut() {
                        *c = -*c;
                    }
                }
                if self.mul_basis(i, j) != ji {
                    return Err(Error::InvalidAlgebra(format!(
                        "{} and {} are not graded-commutative",
                        self.labels[i], self.labels[j]
                    )));
                }
                for k in 0..dim {
                    if self.assoc_left(i, j, k) != self.assoc_right(i, j, k) {
                        return Err(Error::InvalidAlgebra(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn basis_coeffs(&self, i: usize) -> Vec<i128> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    fn mul_basis(&self, i: usize, j: usize) -> Vec<i128> {
        let mut acc = vec![0; self.dim()];
        sparse_add(self.field, &mut acc, &self.products[i][j], 1);
        acc
    }

    fn assoc_left(&self, i: usize, j: usize, k: usize) -> Vec<i128> {
        let mut acc = vec![0; self.dim()];
        for &(t, c) in &self.products[i][j] {
            sparse_add(self.field, &mut acc, &self.products[t][k], c);
        }
        acc
    }

    fn assoc_right(&self, i: usize, j: usize, k: usize) -> Vec<i128> {
        let mut acc = vec![0; self.dim()];
        for &(t, c) in &self.products[j][k] {
            sparse_add(self.field, &mut acc, &self.products[i][t], c);
        }
        acc
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn basis_element(&self, i: usize) -> GradedElement {
        GradedElement {
            space: self.space,
            coeffs: self.basis_coeffs(i),
        }
    }

    pub fn unit_element(&self) -> GradedElement {
        self.basis_element(self.unit)
    }

    pub fn element(&self, coeffs: Vec<i128>) -> Result<GradedElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::AlgebraMismatch("coefficient length"));
        }
        Ok(GradedElement {
            space: self.space,
            coeffs: coeffs.into_iter().map(|c| self.field.normalize(c)).collect(),
        })
    }

    /// Cup product of two ring elements.
    pub fn cup(&self, a: &GradedElement, b: &GradedElement) -> Result<GradedElement> {
        if a.space != self.space || b.space != self.space {
            return Err(Error::AlgebraMismatch("cup on a foreign element"));
        }
        let mut acc = vec![0; self.dim()];
        for (i, &ca) in a.coeffs.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b.coeffs.iter().enumerate() {
                if cb == 0 {
                    continue;
                }
                sparse_add(self.field, &mut acc, &self.products[i][j], ca * cb);
            }
        }
        Ok(GradedElement {
            space: self.space,
            coeffs: acc,
        })
    }

    /// Basis indices of the given degree.
    pub fn degree_indices(&self, degree: u32) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.degrees[i] == degree)
            .collect()
    }

    /// Constructs the subring spanned by `indices` (must be closed under
    /// multiplication and contain the unit).
    pub fn subring(&self, indices: &[usize]) -> Result<GradedRing> {
        let position: HashMap<usize, usize> = indices
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let unit = *position
            .get(&self.unit)
            .ok_or_else(|| Error::InvalidAlgebra("subring must contain the unit".into()))?;
        let mut products = vec![vec![Sparse::new(); indices.len()]; indices.len()];
        for (pi, &i) in indices.iter().enumerate() {
            for (pj, &j) in indices.iter().enumerate() {
                let mut entry = Sparse::new();
                for &(t, c) in &self.products[i][j] {
                    let pt = position.get(&t).ok_or_else(|| {
                        Error::InvalidAlgebra(format!(
                            "span is not closed: {}∪{} leaves it",
                            self.labels[i], self.labels[j]
                        ))
                    })?;
                    entry.push((*pt, c));
                }
                products[pi][pj] = entry;
            }
        }
        GradedRing::new(
            self.field,
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
            indices.iter().map(|&i| self.degrees[i]).collect(),
            unit,
            products,
        )
    }
}

/// The exterior algebra on `m` degree-1 generators: basis = subsets of
/// {1..m}, product = signed disjoint union (shuffle sign over the rationals,
/// unsigned over the two-element field).
pub fn exterior_algebra(m: usize, field: CoeffField) -> GradedRing {
    assert!(m < 16, "exterior algebra basis would not fit in memory");
    let dim = 1usize << m;
    let labels: Vec<String> = (0..dim).map(|mask| subset_label(mask, m)).collect();
    let degrees: Vec<u32> = (0..dim).map(|mask| (mask as u32).count_ones()).collect();
    let mut products = vec![vec![Sparse::new(); dim]; dim];
    #[allow(clippy::needless_range_loop)]
    for a in 0..dim {
        for b in 0..dim {
            if a & b != 0 {
                continue;
            }
            let sign = shuffle_sign(a, b);
            products[a][b] = vec![(a | b, sign)];
        }
    }
    GradedRing::new(field, labels, degrees, 0, products).expect("exterior algebra is associative")
}

fn subset_label(mask: usize, m: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    (0..m)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("x{}", i + 1))
        .collect::<Vec<_>>()
        .join("∧")
}

/// (−1)^{#{(i,j) : i ∈ a, j ∈ b, i > j}}.
fn shuffle_sign(a: usize, b: usize) -> i128 {
    let mut inversions = 0u32;
    let mut bits_b_below = 0u32;
    for pos in 0..usize::BITS {
        if a & (1 << pos) != 0 {
            inversions += bits_b_below;
        }
        if b & (1 << pos) != 0 {
            bits_b_below += 1;
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The cohomology ring of a sphere-like space: one generator g in positive
/// degree with g∪g = 0.
pub fn sphere_ring(gen_degree: u32, field: CoeffField) -> GradedRing {
    assert!(gen_degree > 0);
    GradedRing::new(
        field,
        vec!["1".into(), "g".into()],
        vec![0, gen_degree],
        0,
        vec![
            vec![vec![(0, 1)], vec![(1, 1)]],
            vec![vec![(1, 1)], Sparse::new()],
        ],
    )
    .expect("sphere ring is associative")
}

/// A graded right module over a [`GradedRing`], given by integer action
/// constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedModule {
    field: CoeffField,
    labels: Vec<String>,
    degrees: Vec<u32>,
    ring_space: u64,
    ring_dim: usize,
    /// action[m][r] = e_m · e_r as a sparse combination of module basis.
    action: Vec<Vec<Sparse>>,
    space: u64,
}

impl GradedModule {
    /// Builds and validates a module: grading, unit identity, and the
    /// associativity (m·a)·b = m·(a∪b) on all basis triples.
    pub fn new(
        ring: &GradedRing,
        labels: Vec<String>,
        degrees: Vec<u32>,
        action: Vec<Vec<Sparse>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if degrees.len() != dim || action.len() != dim {
            return Err(Error::InvalidAlgebra("module table sizes disagree".into()));
        }
        let mut label_parts: Vec<String> = labels.clone();
        label_parts.push(format!("module-over-{}", ring.space));
        for d in &degrees {
            label_parts.push(d.to_string());
        }
        let refs: Vec<&str> = label_parts.iter().map(String::as_str).collect();
        let module = Self {
            field: ring.field,
            labels,
            degrees,
            ring_space: ring.space,
            ring_dim: ring.dim(),
            action: action
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|sp| {
                            sp.into_iter()
                                .map(|(i, c)| (i, ring.field.normalize(c)))
                                .filter(|&(_, c)| c != 0)
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            space: fingerprint(&refs),
        };
        module.validate(ring)?;
        Ok(module)
    }

    fn validate(&self, ring: &GradedRing) -> Result<()> {
        let dim = self.dim();
        for m in 0..dim {
            if self.action[m].len() != ring.dim() {
                return Err(Error::InvalidAlgebra("ragged action table".into()));
            }
            for r in 0..ring.dim() {
                let expected = self.degrees[m] + ring.degrees[r];
                for &(t, _) in &self.action[m][r] {
                    if t >= dim || self.degrees[t] != expected {
                        return Err(Error::InvalidAlgebra(
                            "module action violates the grading".into(),
                        ));
                    }
                }
            }
            let unit_action = self.act_basis(m, ring.unit);
            let mut expected = vec![0; dim];
            expected[m] = 1;
            if unit_action != expected {
                return Err(Error::InvalidAlgebra(
                    "ring unit does not act as identity on the module".into(),
                ));
            }
        }
        for m in 0..dim {
            for a in 0..ring.dim() {
                for b in 0..ring.dim() {
                    // (m·a)·b
                    let mut left = vec![0; dim];
                    for &(t, c) in &self.action[m][a] {
                        sparse_add(self.field, &mut left, &self.action[t][b], c);
                    }
                    // m·(a∪b)
                    let mut right = vec![0; dim];
                    for &(t, c) in &ring.products[a][b] {
                        sparse_add(self.field, &mut right, &self.action[m][t], c);
                    }
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "module associativity fails on ({}, {}, {})",
                            self.labels[m], ring.labels[a], ring.labels[b]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn act_basis(&self, m: usize, r: usize) -> Vec<i128> {
        let mut acc = vec![0; self.dim()];
        sparse_add(self.field, &mut acc, &self.action[m][r], 1);
        acc
    }

    /// The ring viewed as a right module over itself.
    pub fn over_self(ring: &GradedRing) -> Self {
        Self::new(
            ring,
            ring.labels.clone(),
            ring.degrees.clone(),
            ring.products.clone(),
        )
        .expect("a ring is a module over itself")
    }

    /// The zero module.
    pub fn zero(ring: &GradedRing) -> Self {
        Self::new(ring, Vec::new(), Vec::new(), Vec::new()).expect("zero module")
    }

    /// One degree-0 generator on which every positive-degree class acts as
    /// zero (the module of a contractible, point-like piece).
    pub fn point(ring: &GradedRing) -> Self {
        let action = vec![(0..ring.dim())
            .map(|r| {
                if r == ring.unit {
                    vec![(0usize, 1i128)]
                } else {
                    Sparse::new()
                }
            })
            .collect()];
        Self::new(ring, vec!["pt".into()], vec![0], action)
            .expect("point module over a connected ring")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn basis_element(&self, i: usize) -> GradedElement {
        let mut coeffs = vec![0; self.dim()];
        coeffs[i] = 1;
        GradedElement {
            space: self.space,
            coeffs,
        }
    }

    pub fn element(&self, coeffs: Vec<i128>) -> Result<GradedElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::AlgebraMismatch("coefficient length"));
        }
        Ok(GradedElement {
            space: self.space,
            coeffs: coeffs.into_iter().map(|c| self.field.normalize(c)).collect(),
        })
    }

    /// Right action m·a of a ring element on a module element.
    pub fn act(&self, m: &GradedElement, a: &GradedElement) -> Result<GradedElement> {
        if m.space != self.space {
            return Err(Error::AlgebraMismatch("module element from another module"));
        }
        if a.coeffs.len() != self.ring_dim {
            return Err(Error::AlgebraMismatch("ring element from another ring"));
        }
        let mut acc = vec![0; self.dim()];
        for (i, &cm) in m.coeffs.iter().enumerate() {
            if cm == 0 {
                continue;
            }
            for (j, &ca) in a.coeffs.iter().enumerate() {
                if ca == 0 {
                    continue;
                }
                sparse_add(self.field, &mut acc, &self.action[i][j], cm * ca);
            }
        }
        Ok(GradedElement {
            space: self.space,
            coeffs: acc,
        })
    }

    pub fn degree_indices(&self, degree: u32) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.degrees[i] == degree)
            .collect()
    }

    /// Submodule spanned by the given basis indices; the action must keep
    /// the span.
    pub fn submodule(&self, ring: &GradedRing, indices: &[usize]) -> Result<GradedModule> {
        let position: HashMap<usize, usize> = indices
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let mut action = Vec::with_capacity(indices.len());
        for &m in indices {
            let mut row = Vec::with_capacity(self.ring_dim);
            for r in 0..self.ring_dim {
                let mut entry = Sparse::new();
                for &(t, c) in &self.action[m][r] {
                    let pt = position.get(&t).ok_or_else(|| {
                        Error::InvalidAlgebra("span is not action-closed".into())
                    })?;
                    entry.push((*pt, c));
                }
                row.push(entry);
            }
            action.push(row);
        }
        GradedModule::new(
            ring,
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
            indices.iter().map(|&i| self.degrees[i]).collect(),
            action,
        )
    }

    /// Quotient by the span of `killed` (action coefficients landing there
    /// are dropped). Legal whenever the span is action-closed, e.g. for
    /// degree ideals.
    pub fn quotient(&self, ring: &GradedRing, killed: &[usize]) -> Result<GradedModule> {
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !killed.contains(i)).collect();
        let position: HashMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let mut action = Vec::with_capacity(keep.len());
        for &m in &keep {
            let mut row = Vec::with_capacity(self.ring_dim);
            for r in 0..self.ring_dim {
                let entry: Sparse = self.action[m][r]
                    .iter()
                    .filter_map(|&(t, c)| position.get(&t).map(|&pt| (pt, c)))
                    .collect();
                row.push(entry);
            }
            action.push(row);
        }
        GradedModule::new(
            ring,
            keep.iter().map(|&i| self.labels[i].clone()).collect(),
            keep.iter().map(|&i| self.degrees[i]).collect(),
            action,
        )
    }

    /// The same underlying space acted on through a subring: basis index i
    /// of `sub` corresponds to basis index `embedding[i]` of the original
    /// ring.
    pub fn restrict_action(&self, sub: &GradedRing, embedding: &[usize]) -> Result<GradedModule> {
        if embedding.len() != sub.dim() {
            return Err(Error::AlgebraMismatch("embedding length"));
        }
        let action = (0..self.dim())
            .map(|m| {
                embedding
                    .iter()
                    .map(|&orig| self.action[m][orig].clone())
                    .collect()
            })
            .collect();
        GradedModule::new(sub, self.labels.clone(), self.degrees.clone(), action)
    }
}

// ---------------------------------------------------------------------------
// Cup-length
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct CupLengthOptions {
    /// Random homogeneous linear combinations added per degree, both as
    /// module starts and as ring factors.
    pub random_per_degree: usize,
    pub rng_seed: u64,
}

impl Default for CupLengthOptions {
    fn default() -> Self {
        Self {
            random_per_degree: 32,
            rng_seed: 2024,
        }
    }
}

/// The computed cup-length with its witness chain and a statement of how far
/// the search was exhaustive.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CupLengthCertificate {
    pub value: usize,
    /// [β, α₁, …, α_{k−1}] labels of a maximal nonzero chain (empty for the
    /// zero module; just [β] when no positive-degree class acts nontrivially).
    pub witness: Vec<String>,
    pub exhaustiveness: String,
}

struct ChainNode {
    element: GradedElement,
    witness: Vec<String>,
}

/// Relative cup-length of `module` over `ring`.
///
/// The search is exhaustive over chains of basis elements (complete for
/// rings whose basis products are monomials, like exterior algebras and
/// their quotients) and augmented by seeded random homogeneous combinations
/// to guard against non-monomial instances.
pub fn cup_length(
    module: &GradedModule,
    ring: &GradedRing,
    opts: &CupLengthOptions,
) -> CupLengthCertificate {
    if module.dim() == 0 {
        return CupLengthCertificate {
            value: 0,
            witness: Vec::new(),
            exhaustiveness: "zero module".into(),
        };
    }

    let positive_basis: Vec<(GradedElement, String)> = (0..ring.dim())
        .filter(|&i| ring.degree(i) > 0)
        .map(|i| (ring.basis_element(i), ring.label(i).to_string()))
        .collect();

    // Exhaustive breadth-first search over basis starts and basis factors,
    // deduplicated per level by the ray of the element.
    let mut frontier: Vec<ChainNode> = (0..module.dim())
        .map(|i| ChainNode {
            element: module.basis_element(i),
            witness: vec![module.label(i).to_string()],
        })
        .collect();
    let mut best = ChainNode {
        element: frontier[0].element.clone(),
        witness: frontier[0].witness.clone(),
    };
    let mut chain_len = 0usize;
    loop {
        let mut next: Vec<ChainNode> = Vec::new();
        let mut seen: HashMap<Vec<i128>, ()> = HashMap::new();
        for node in &frontier {
            for (alpha, label) in &positive_basis {
                let product = module
                    .act(&node.element, alpha)
                    .expect("basis elements belong to their algebra");
                if product.is_zero() {
                    continue;
                }
                if seen.insert(product.normalized_ray(), ()).is_none() {
                    let mut witness = node.witness.clone();
                    witness.push(label.clone());
                    next.push(ChainNode {
                        element: product,
                        witness,
                    });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        chain_len += 1;
        best = ChainNode {
            element: next[0].element.clone(),
            witness: next[0].witness.clone(),
        };
        frontier = next;
    }

    // Randomized augmentation: greedy chains over random homogeneous
    // combinations mixed with the basis factors.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let random_alphas = random_homogeneous(ring.dim(), |i| ring.degree(i), ring, opts, &mut rng);
    let attempts = (opts.random_per_degree * 2).max(8);
    for attempt in 0..attempts {
        let beta = match random_module_element(module, &mut rng) {
            Some(b) => b,
            None => break,
        };
        if beta.is_zero() {
            continue;
        }
        let mut node = ChainNode {
            element: beta,
            witness: vec![format!("random-start-{attempt}")],
        };
        let mut len = 0usize;
        loop {
            let mut extended = false;
            for (alpha, label) in positive_basis.iter().chain(random_alphas.iter()) {
                let product = module.act(&node.element, alpha).expect("same algebra");
                if !product.is_zero() {
                    node = ChainNode {
                        element: product,
                        witness: {
                            let mut w = node.witness.clone();
                            w.push(label.clone());
                            w
                        },
                    };
                    len += 1;
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        if len > chain_len {
            chain_len = len;
            best = node;
        }
    }

    CupLengthCertificate {
        value: chain_len + 1,
        witness: best.witness,
        exhaustiveness: format!(
            "exhaustive over basis chains; randomized over {} homogeneous combinations per degree (seed {})",
            opts.random_per_degree, opts.rng_seed
        ),
    }
}

fn random_homogeneous<F: Fn(usize) -> u32>(
    dim: usize,
    degree_of: F,
    ring: &GradedRing,
    opts: &CupLengthOptions,
    rng: &mut ChaCha8Rng,
) -> Vec<(GradedElement, String)> {
    let mut out = Vec::new();
    let max_degree = (0..dim).map(&degree_of).max().unwrap_or(0);
    for d in 1..=max_degree {
        let indices: Vec<usize> = (0..dim).filter(|&i| degree_of(i) == d).collect();
        if indices.is_empty() {
            continue;
        }
        for c in 0..opts.random_per_degree {
            let mut coeffs = vec![0i128; dim];
            let mut nonzero = false;
            for &i in &indices {
                let v = rng.gen_range(-2i128..=2);
                coeffs[i] = v;
                nonzero |= v != 0;
            }
            if !nonzero {
                coeffs[indices[0]] = 1;
            }
            let elem = ring.element(coeffs).expect("sized for the ring");
            if !elem.is_zero() {
                out.push((elem, format!("random-α(deg {d}, #{c})")));
            }
        }
    }
    out
}

fn random_module_element(module: &GradedModule, rng: &mut ChaCha8Rng) -> Option<GradedElement> {
    if module.dim() == 0 {
        return None;
    }
    let degrees: Vec<u32> = (0..module.dim()).map(|i| module.degree(i)).collect();
    let d = degrees[rng.gen_range(0..degrees.len())];
    let indices: Vec<usize> = (0..module.dim())
        .filter(|&i| module.degree(i) == d)
        .collect();
    let mut coeffs = vec![0i128; module.dim()];
    let mut nonzero = false;
    for &i in &indices {
        let v = rng.gen_range(-2i128..=2);
        coeffs[i] = v;
        nonzero |= v != 0;
    }
    if !nonzero {
        coeffs[indices[0]] = 1;
    }
    module.element(coeffs).ok()
}

/// The graded model of the torus index pair: the ambient ring restricts
/// isomorphically onto the invariant-set cohomology, so the module is the
/// exterior algebra on 2n degree-1 generators over itself.
pub fn torus_index_module(n: usize, field: CoeffField) -> (GradedRing, GradedModule) {
    let ring = exterior_algebra(2 * n, field);
    let module = GradedModule::over_self(&ring);
    (ring, module)
}

// ---------------------------------------------------------------------------
// Suspension bookkeeping
// ---------------------------------------------------------------------------

/// Graded dimensions of H^k((ball, boundary) of dim `shift` × T^{2n}): the
/// torus Betti pattern shifted by `shift`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionRow {
    pub shift: usize,
    /// (degree, dimension) pairs with nonzero dimension.
    pub dims: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuspensionTable {
    pub torus_dim: usize,
    pub rows: Vec<SuspensionRow>,
}

impl SuspensionTable {
    /// Every consecutive pair of rows differs by a pure degree shift.
    pub fn stabilized(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let offset = w[1].shift - w[0].shift;
            w[0].dims.len() == w[1].dims.len()
                && w[0]
                    .dims
                    .iter()
                    .zip(&w[1].dims)
                    .all(|(a, b)| a.0 + offset == b.0 && a.1 == b.1)
        })
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Tables of the finite-stage cohomology groups across increasing fiber
/// dimensions; their stabilization under the degree shift is the
/// finite-dimensional witness that the direct limit is the torus cohomology.
pub fn suspension_model(n: usize, shifts: &[usize]) -> Result<SuspensionTable> {
    if shifts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "suspension shifts must be strictly increasing".into(),
        ));
    }
    let torus_dim = 2 * n;
    let rows = shifts
        .iter()
        .map(|&d| SuspensionRow {
            shift: d,
            dims: (0..=torus_dim)
                .map(|j| (d + j, binomial(torus_dim, j)))
                .collect(),
        })
        .collect();
    Ok(SuspensionTable { torus_dim, rows })
}

// ---------------------------------------------------------------------------
// Subadditivity instances
// ---------------------------------------------------------------------------

// ---------------------------------------------------------------------------
// Config-file fixtures
// ---------------------------------------------------------------------------

/// A ring given literally in the configuration file. Coefficients are i64
/// in the file format; `products[i][j]` lists (basis, coeff) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingFixture {
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    pub unit: usize,
    pub products: Vec<Vec<Vec<(usize, i64)>>>,
}

impl RingFixture {
    pub fn build(&self, field: CoeffField) -> Result<GradedRing> {
        let products = self
            .products
            .iter()
            .map(|row| {
                row.iter()
                    .map(|sp| sp.iter().map(|&(i, c)| (i, c as i128)).collect())
                    .collect()
            })
            .collect();
        GradedRing::new(
            field,
            self.labels.clone(),
            self.degrees.clone(),
            self.unit,
            products,
        )
    }
}

/// A module fixture over the fixture ring; when absent the ring acts on
/// itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleFixture {
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    pub action: Vec<Vec<Vec<(usize, i64)>>>,
}

impl ModuleFixture {
    pub fn build(&self, ring: &GradedRing) -> Result<GradedModule> {
        let action = self
            .action
            .iter()
            .map(|row| {
                row.iter()
                    .map(|sp| sp.iter().map(|&(i, c)| (i, c as i128)).collect())
                    .collect()
            })
            .collect();
        GradedModule::new(ring, self.labels.clone(), self.degrees.clone(), action)
    }
}

/// An ad-hoc cup-length instance loadable from the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyFixture {
    pub ring: RingFixture,
    #[serde(default)]
    pub module: Option<ModuleFixture>,
}

impl TopologyFixture {
    pub fn build(&self, field: CoeffField) -> Result<(GradedRing, GradedModule)> {
        let ring = self.ring.build(field)?;
        let module = match &self.module {
            Some(fixture) => fixture.build(&ring)?,
            None => GradedModule::over_self(&ring),
        };
        Ok((ring, module))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubadditivityKind {
    /// CL(total) ≤ Σ CL(parts): a filtration of the pair.
    ChainSum,
    /// CL(coarse action) ≤ CL(fine action): restriction along a larger
    /// ambient space.
    Restriction,
}

/// A concrete instance of one of the cup-length inequalities.
#[derive(Clone, Debug)]
pub struct SubadditivityInstance {
    pub name: String,
    pub kind: SubadditivityKind,
    pub lhs: (GradedModule, GradedRing),
    pub rhs: Vec<(GradedModule, GradedRing)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubadditivityOutcome {
    pub name: String,
    pub lhs_value: usize,
    pub rhs_values: Vec<usize>,
    pub bound: usize,
    pub pass: bool,
}

/// Evaluates both sides of every instance. A violation would be an
/// implementation bug, never a property of the inputs.
pub fn subadditivity_check(
    instances: &[SubadditivityInstance],
    opts: &CupLengthOptions,
) -> Vec<SubadditivityOutcome> {
    instances
        .iter()
        .map(|inst| {
            let lhs_value = cup_length(&inst.lhs.0, &inst.lhs.1, opts).value;
            let rhs_values: Vec<usize> = inst
                .rhs
                .iter()
                .map(|(m, r)| cup_length(m, r, opts).value)
                .collect();
            let bound = match inst.kind {
                SubadditivityKind::ChainSum => rhs_values.iter().sum(),
                SubadditivityKind::Restriction => rhs_values[0],
            };
            SubadditivityOutcome {
                name: inst.name.clone(),
                lhs_value,
                rhs_values,
                bound,
                pass: lhs_value <= bound,
            }
        })
        .collect()
}

/// The bundled instance battery on the exterior algebra Λ(m).
pub fn standard_instances(m: usize, field: CoeffField) -> Result<Vec<SubadditivityInstance>> {
    let ring = exterior_algebra(m, field);
    let full = GradedModule::over_self(&ring);
    let positive: Vec<usize> = (0..full.dim()).filter(|&i| full.degree(i) > 0).collect();
    let ideal = full.submodule(&ring, &positive)?;
    let unit_line = full.quotient(&ring, &positive)?;

    let mut instances = vec![
        SubadditivityInstance {
            name: format!("ideal-filtration(Λ{m})"),
            kind: SubadditivityKind::ChainSum,
            lhs: (full.clone(), ring.clone()),
            rhs: vec![
                (unit_line.clone(), ring.clone()),
                (ideal.clone(), ring.clone()),
            ],
        },
        SubadditivityInstance {
            name: format!("zero-middle(Λ{m})"),
            kind: SubadditivityKind::ChainSum,
            lhs: (full.clone(), ring.clone()),
            rhs: vec![
                (GradedModule::zero(&ring), ring.clone()),
                (full.clone(), ring.clone()),
            ],
        },
    ];

    // one level per degree: the graded pieces I_j / I_{j+1} each have
    // cup-length 1, matching a filtration with one critical level per value
    let mut levels = Vec::new();
    for j in 0..=m as u32 {
        let at_least_j: Vec<usize> = (0..full.dim()).filter(|&i| full.degree(i) >= j).collect();
        let sub = full.submodule(&ring, &at_least_j)?;
        let above: Vec<usize> = (0..sub.dim()).filter(|&i| sub.degree(i) > j).collect();
        levels.push((sub.quotient(&ring, &above)?, ring.clone()));
    }
    instances.push(SubadditivityInstance {
        name: format!("degree-levels(Λ{m})"),
        kind: SubadditivityKind::ChainSum,
        lhs: (full.clone(), ring.clone()),
        rhs: levels,
    });

    // restriction to the degree-0 subring and to the subring on one generator
    let trivial = ring.subring(&[0])?;
    instances.push(SubadditivityInstance {
        name: format!("restrict-to-point(Λ{m})"),
        kind: SubadditivityKind::Restriction,
        lhs: (full.restrict_action(&trivial, &[0])?, trivial),
        rhs: vec![(full.clone(), ring.clone())],
    });
    if m >= 1 {
        let one_gen = ring.subring(&[0, 1])?;
        instances.push(SubadditivityInstance {
            name: format!("restrict-to-one-generator(Λ{m})"),
            kind: SubadditivityKind::Restriction,
            lhs: (full.restrict_action(&one_gen, &[0, 1])?, one_gen),
            rhs: vec![(full, ring)],
        });
    }
    Ok(instances)
}
