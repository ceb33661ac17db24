//! Spectral variational solver for contractible 1-periodic orbits of
//! time-periodic Hamiltonian systems on the torus T^{2n}.
//!
//! The crate discretizes the H^{1/2} loop space by a Fourier cutoff, finds
//! the critical points of the symplectic action functional Φ_H = a − b by a
//! damped Newton search on its LS-gradient L + K, and certifies the Arnold
//! lower bound — at least 2n+1 contractible orbits — through the cup-length
//! of a finite graded-algebra model of the torus index pair.
//!
//! Module map:
//! * [`loops`] — Fourier loops, the H^{1/2} inner product, spectral
//!   projections, and the sample/coefficient transforms.
//! * [`hamiltonian`] — trigonometric-polynomial Hamiltonians with exact
//!   derivatives and bounds, plus the linear homotopy H_λ = (1−λ)H.
//! * [`action`] — Φ_H, its H^{1/2} gradient, Hessian-vector products, and
//!   the penalized extension Ψ_H on the embedded punctured-disc model.
//! * [`dynamics`] — the negative gradient flow, multi-start Newton search,
//!   lattice deduplication, Morse filtration and homotopy continuation.
//! * [`bounds`] — the weak-boundedness radius r₀, critical-value spread r₁,
//!   and the a-priori invariant-set radius R = 2r₀ + r₁.
//! * [`topology`] — graded rings/modules, cup products, relative cup-length
//!   certificates, the torus index model and suspension bookkeeping.

pub mod action;
pub mod bounds;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod loops;
pub mod selfcheck;
pub mod topology;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianSpec, HomotopyFamily};
pub use loops::{FourierLoop, SpectralDecomposition, SpectralPart};
