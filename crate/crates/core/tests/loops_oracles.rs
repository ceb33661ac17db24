//! Oracle checks for the loop-space layer. The oracles here share no code
//! with the implementation: they evaluate trigonometric series directly and
//! use a brute-force discrete Fourier transform.

use loopaction::loops::{random_loop, transform, FourierLoop, SpectralPart, TWO_PI};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Evaluates Σ e_k(t) v_k with explicit cosines, bypassing `FourierLoop`.
fn direct_eval(n: usize, coeffs: &[(i64, Vec<f64>)], t: f64) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n];
    for (k, v) in coeffs {
        let angle = TWO_PI * *k as f64 * t;
        let (s, c) = (angle.sin(), angle.cos());
        for p in 0..n {
            out[2 * p] += c * v[2 * p] - s * v[2 * p + 1];
            out[2 * p + 1] += s * v[2 * p] + c * v[2 * p + 1];
        }
    }
    out
}

fn loop_coeff_list(x: &FourierLoop) -> Vec<(i64, Vec<f64>)> {
    x.mode_indices()
        .map(|k| (k, x.coeff(k).to_vec()))
        .collect()
}

/// Quadrature oracle for the H^{1/2} product: ⟨x₀,y₀⟩ plus the dense-grid
/// integral of ⟨|D|^{1/2}x, |D|^{1/2}y⟩, where the half-derivative scales
/// mode k by √(2π|k|).
fn h12_inner_oracle(x: &FourierLoop, y: &FourierLoop, grid: usize) -> f64 {
    let half_derivative = |z: &FourierLoop| -> Vec<(i64, Vec<f64>)> {
        loop_coeff_list(z)
            .into_iter()
            .filter(|(k, _)| *k != 0)
            .map(|(k, v)| {
                let w = (TWO_PI * k.unsigned_abs() as f64).sqrt();
                (k, v.into_iter().map(|c| c * w).collect())
            })
            .collect()
    };
    let hx = half_derivative(x);
    let hy = half_derivative(y);
    let mut integral = 0.0;
    for j in 0..grid {
        let t = j as f64 / grid as f64;
        let a = direct_eval(x.n(), &hx, t);
        let b = direct_eval(y.n(), &hy, t);
        integral += a.iter().zip(&b).map(|(u, v)| u * v).sum::<f64>();
    }
    integral /= grid as f64;
    let mean: f64 = x.x0().iter().zip(y.x0()).map(|(u, v)| u * v).sum();
    mean + integral
}

#[test]
fn h12_inner_matches_half_derivative_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let x = random_loop(&mut rng, 2, 5, 1.0);
        let y = random_loop(&mut rng, 2, 5, 1.0);
        let fast = x.h12_inner(&y).unwrap();
        let oracle = h12_inner_oracle(&x, &y, 4096);
        assert!(
            (fast - oracle).abs() < 1e-10,
            "inner product {fast} vs oracle {oracle}"
        );
    }
}

#[test]
fn evaluate_matches_direct_series_summation() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let x = random_loop(&mut rng, 1, 6, 1.0);
    let coeffs = loop_coeff_list(&x);
    for j in 0..31 {
        let t = j as f64 / 31.0;
        let fast = x.evaluate_at(t);
        let oracle = direct_eval(1, &coeffs, t);
        for (a, b) in fast.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

/// Brute-force complex DFT per symplectic pair over every representable grid
/// frequency.
fn dft_oracle(samples: &[Vec<f64>], n: usize, k: i64) -> Vec<f64> {
    let m = samples.len();
    let mut out = vec![0.0; 2 * n];
    for (j, point) in samples.iter().enumerate() {
        let angle = TWO_PI * k as f64 * j as f64 / m as f64;
        let (s, c) = (angle.sin(), angle.cos());
        for p in 0..n {
            let (a, b) = (point[2 * p], point[2 * p + 1]);
            out[2 * p] += a * c + b * s;
            out[2 * p + 1] += b * c - a * s;
        }
    }
    out.iter().map(|v| v / m as f64).collect()
}

#[test]
fn transform_agrees_with_brute_force_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let x = random_loop(&mut rng, 2, 4, 1.0);
    let samples = x.evaluate(16).unwrap();
    let recovered = transform(&samples, 2, 4).unwrap();
    for k in -4i64..=4 {
        let oracle = dft_oracle(&samples, 2, k);
        for (a, b) in recovered.coeff(k).iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn mode_above_cutoff_is_dropped_when_the_grid_resolves_it() {
    // a pure k = N+1 mode sampled on m ≥ 2N+3 points: the grid resolves the
    // frequency, the band |k| ≤ N does not contain it, so the projection is 0
    let cutoff = 4;
    let mut tall = FourierLoop::zeros(1, cutoff + 1);
    tall.coeff_mut(5).copy_from_slice(&[1.0, 0.5]);
    let samples = tall.evaluate(16).unwrap();
    let projected = transform(&samples, 1, cutoff).unwrap();
    assert!(projected.h12_norm() < 1e-12);
}

#[test]
fn mode_above_cutoff_folds_when_the_grid_aliases_it() {
    // on m = 2N+1 samples the frequency N+1 is congruent to −N, so the
    // brute-force DFT and the transform both fold it onto k = −N
    let cutoff = 4;
    let m = 2 * cutoff + 1;
    let mut tall = FourierLoop::zeros(1, cutoff + 1);
    tall.coeff_mut(5).copy_from_slice(&[1.0, 0.5]);
    let samples: Vec<Vec<f64>> = (0..m)
        .map(|j| tall.evaluate_at(j as f64 / m as f64))
        .collect();
    let projected = transform(&samples, 1, cutoff).unwrap();
    let oracle = dft_oracle(&samples, 1, -(cutoff as i64));
    assert!((projected.coeff(-4)[0] - oracle[0]).abs() < 1e-12);
    assert!((projected.coeff(-4)[0] - 1.0).abs() < 1e-12, "folded in full");
    for k in -3i64..=4 {
        assert!(projected.coeff(k).iter().all(|c| c.abs() < 1e-12));
    }
}

#[test]
fn transform_rejects_underresolved_grids() {
    let samples = vec![vec![0.0, 0.0]; 8];
    assert!(transform(&samples, 1, 4).is_err());
}

fn arbitrary_loop(n: usize, cutoff: usize) -> impl Strategy<Value = FourierLoop> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * (2 * cutoff + 1)).prop_map(move |data| {
        let mut x = FourierLoop::zeros(n, cutoff);
        let mut iter = data.into_iter();
        x.x0_mut().iter_mut().for_each(|c| *c = iter.next().unwrap());
        for k in 1..=cutoff as i64 {
            for s in [k, -k] {
                x.coeff_mut(s).iter_mut().for_each(|c| *c = iter.next().unwrap());
            }
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_holds_for_all_loops(x in arbitrary_loop(1, 4)) {
        let mut expected: f64 = x.x0().iter().map(|c| c * c).sum();
        for k in 1..=4i64 {
            for s in [k, -k] {
                expected += TWO_PI * k as f64 * x.coeff(s).iter().map(|c| c * c).sum::<f64>();
            }
        }
        prop_assert!((x.h12_norm_sq() - expected).abs() < 1e-11);
    }

    #[test]
    fn projections_split_the_norm(x in arbitrary_loop(2, 3)) {
        let parts = [SpectralPart::Zero, SpectralPart::Plus, SpectralPart::Minus];
        let split: f64 = parts.iter().map(|&p| x.project(p).h12_norm_sq()).sum();
        prop_assert!((split - x.h12_norm_sq()).abs() < 1e-11);
    }

    #[test]
    fn evaluate_transform_roundtrip(x in arbitrary_loop(1, 3), oversample in 0usize..20) {
        let m = 2 * 3 + 1 + oversample;
        let samples = x.evaluate(m).unwrap();
        let back = transform(&samples, 1, 3).unwrap();
        prop_assert!(back.sub(&x).h12_norm() < 1e-11);
    }
}
