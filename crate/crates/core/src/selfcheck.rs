//! Deterministic invariant battery across all modules, for the `selfcheck`
//! command. Each check is small; the heavyweight oracle comparisons live in
//! the test suites.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{nonlinearity_norm_bound, quadratic_action, LsField};
use crate::bounds::{wbd_radius, wbd_soundness, OmegaSpec};
use crate::config::SolverConfig;
use crate::dynamics::{find_orbit, integrate_flow, verify_orbit, FlowOptions, SearchResult};
use crate::error::Result;
use crate::hamiltonian::{catalog, HomotopyFamily};
use crate::loops::{random_loop, transform, FourierLoop, SpectralPart, TWO_PI};
use crate::topology::{
    cup_length, exterior_algebra, sphere_ring, standard_instances, subadditivity_check,
    suspension_model, CoeffField, CupLengthOptions, GradedModule,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub checks: Vec<CheckResult>,
}

impl SelfCheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn record<F>(checks: &mut Vec<CheckResult>, name: &str, body: F)
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let (pass, detail) = match body() {
        Ok((pass, detail)) => (pass, detail),
        Err(err) => (false, format!("error: {err}")),
    };
    checks.push(CheckResult {
        name: name.to_string(),
        pass,
        detail,
    });
}

/// ẋ(t) by direct termwise differentiation of the rotation series.
fn derivative_at(x: &FourierLoop, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.point_dim()];
    for k in 1..=x.cutoff() as i64 {
        for &signed in &[k, -k] {
            let rate = TWO_PI * signed as f64;
            let angle = rate * t + std::f64::consts::FRAC_PI_2;
            let (s, c) = angle.sin_cos();
            let v = x.coeff(signed);
            for p in 0..x.n() {
                out[2 * p] += rate * (c * v[2 * p] - s * v[2 * p + 1]);
                out[2 * p + 1] += rate * (s * v[2 * p] + c * v[2 * p + 1]);
            }
        }
    }
    out
}

/// Dense-grid quadrature of ½∫⟨−Jẋ, x⟩ dt.
fn symplectic_area_quadrature(x: &FourierLoop, grid: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..grid {
        let t = j as f64 / grid as f64;
        let point = x.evaluate_at(t);
        let velocity = derivative_at(x, t);
        for p in 0..x.n() {
            // ⟨−Jẋ, x⟩ on the pair = ẋ₂x₁·(−1)… computed as (−Jv)·u
            let mjv = [velocity[2 * p + 1], -velocity[2 * p]];
            acc += mjv[0] * point[2 * p] + mjv[1] * point[2 * p + 1];
        }
    }
    0.5 * acc / grid as f64
}

/// Runs every module's invariant suite with the given seed.
pub fn run_all(seed: u64) -> SelfCheckReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    record(&mut checks, "loops/parseval", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = random_loop(&mut rng, 2, 5, 1.0);
            let mut expected = x.x0().iter().map(|c| c * c).sum::<f64>();
            for k in 1..=5i64 {
                for &s in &[k, -k] {
                    expected +=
                        TWO_PI * k as f64 * x.coeff(s).iter().map(|c| c * c).sum::<f64>();
                }
            }
            worst = worst.max((x.h12_norm_sq() - expected).abs());
        }
        Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
    });

    record(&mut checks, "loops/projection-orthogonality", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = random_loop(&mut rng, 1, 6, 1.0);
            let y = random_loop(&mut rng, 1, 6, 1.0);
            let parts = [SpectralPart::Zero, SpectralPart::Plus, SpectralPart::Minus];
            let mut pythagoras = 0.0;
            for p in parts {
                pythagoras += x.project(p).h12_norm_sq();
                for q in parts {
                    if p != q {
                        worst =
                            worst.max(x.project(p).h12_inner(&y.project(q))?.abs());
                    }
                }
            }
            worst = worst.max((pythagoras - x.h12_norm_sq()).abs());
        }
        Ok((worst < 1e-12, format!("max deviation {worst:.2e}")))
    });

    record(&mut checks, "loops/transform-roundtrip", || {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = random_loop(&mut rng, 2, 4, 1.0);
            let samples = x.evaluate(2 * 4 + 1)?;
            let back = transform(&samples, 2, 4)?;
            worst = worst.max(back.sub(&x).h12_norm());
        }
        Ok((worst < 1e-12, format!("max roundtrip error {worst:.2e}")))
    });

    record(&mut checks, "hamiltonian/periodicity", || {
        let h = catalog("time-driven", 1).expect("catalog");
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            worst = worst.max((h.eval(t, &x) - h.eval(t + 1.0, &x)).abs());
            worst = worst.max((h.eval(t, &x) - h.eval(t, &[x[0] + 1.0, x[1]])).abs());
        }
        Ok((worst < 1e-13, format!("max periodicity defect {worst:.2e}")))
    });

    record(&mut checks, "hamiltonian/gradient-vs-finite-differences", || {
        let h = catalog("time-driven", 1).expect("catalog");
        let step = 1e-6;
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let t: f64 = rng.gen_range(0.0..1.0);
            let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            let g = h.grad(t, &x);
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += step;
                xm[i] -= step;
                let fd = (h.eval(t, &xp) - h.eval(t, &xm)) / (2.0 * step);
                worst = worst.max((g[i] - fd).abs());
            }
        }
        Ok((worst < 1e-7, format!("max |grad − fd| {worst:.2e}")))
    });

    record(&mut checks, "action/spectral-identity", || {
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = random_loop(&mut rng, 1, 5, 1.0);
            let spectral = quadratic_action(&x);
            let quadrature = symplectic_area_quadrature(&x, 512);
            worst = worst.max((spectral - quadrature).abs());
        }
        Ok((worst < 1e-9, format!("max |a − quadrature| {worst:.2e}")))
    });

    record(&mut checks, "action/directional-derivative", || {
        let field = LsField::with_default_samples(catalog("time-driven", 1).expect("catalog"), 5);
        let step = 1e-5;
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = random_loop(&mut rng, 1, 5, 0.5);
            let g = field.gradient(&x)?;
            let dir = random_loop(&mut rng, 1, 5, 1.0);
            let mut xp = x.clone();
            xp.axpy(step, &dir);
            let mut xm = x.clone();
            xm.axpy(-step, &dir);
            let fd = (field.action_value(&xp)? - field.action_value(&xm)?) / (2.0 * step);
            let predicted = g.h12_inner(&dir)?;
            worst = worst.max((fd - predicted).abs() / predicted.abs().max(1.0));
        }
        Ok((worst < 1e-6, format!("max relative defect {worst:.2e}")))
    });

    record(&mut checks, "action/hessian-symmetry", || {
        let field = LsField::with_default_samples(catalog("cosine-morse", 1).expect("catalog"), 5);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = random_loop(&mut rng, 1, 5, 0.5);
            let op = field.hessian(&x)?;
            let v = random_loop(&mut rng, 1, 5, 1.0);
            let w = random_loop(&mut rng, 1, 5, 1.0);
            let left = op.apply(&v).h12_inner(&w)?;
            let right = op.apply(&w).h12_inner(&v)?;
            worst = worst.max((left - right).abs());
        }
        Ok((worst < 1e-10, format!("max asymmetry {worst:.2e}")))
    });

    record(&mut checks, "action/lattice-equivariance", || {
        let field = LsField::with_default_samples(catalog("cosine-morse", 1).expect("catalog"), 4);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let x = random_loop(&mut rng, 1, 4, 0.5);
            let shifted = x.translate_x0(&[3.0, -2.0]);
            let gap = field
                .gradient(&x)?
                .sub(&field.gradient(&shifted)?)
                .h12_norm();
            worst = worst.max(gap);
        }
        Ok((worst < 1e-11, format!("max gradient gap {worst:.2e}")))
    });

    record(&mut checks, "action/nonlinearity-norm-bound", || {
        let ham = catalog("time-driven", 1).expect("catalog");
        let bound = nonlinearity_norm_bound(&ham.bounds(), 5);
        let field = LsField::with_default_samples(ham, 5);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let x = random_loop(&mut rng, 1, 5, 2.0);
            worst = worst.max(field.nonlinear(&x)?.h12_norm());
        }
        Ok((
            worst <= bound,
            format!("max ‖K‖ {worst:.3e} ≤ bound {bound:.3e}"),
        ))
    });

    record(&mut checks, "dynamics/flow-monotonicity", || {
        let field = LsField::with_default_samples(catalog("cosine-morse", 1).expect("catalog"), 6);
        let mut seed_loop = FourierLoop::constant(&[0.05, -0.04], 6);
        seed_loop.coeff_mut(1).copy_from_slice(&[0.02, 0.01]);
        let opts = FlowOptions {
            t_final: 4.0,
            dt: 0.02,
            ..FlowOptions::default()
        };
        let traj = integrate_flow(&field, &seed_loop, &opts)?;
        let increase = traj.max_action_increase();
        Ok((
            increase <= 1e-10 && !traj.escaped,
            format!("max action increase {increase:.2e}"),
        ))
    });

    record(&mut checks, "dynamics/dual-residual", || {
        let cfg = SolverConfig::for_catalog("cosine-morse", 1, 6);
        let field = cfg.field()?;
        let seed_loop = FourierLoop::constant(&[0.04, 0.03], 6);
        match find_orbit(&field, &seed_loop, &cfg, "selfcheck")? {
            SearchResult::Converged(orbit) => {
                let ode = verify_orbit(
                    field.hamiltonian(),
                    &orbit.orbit,
                    cfg.solver.tol_ode,
                    1024,
                );
                Ok((
                    orbit.residual < cfg.solver.tol_residual && ode.pass,
                    format!(
                        "residual {:.2e}, period gap {:.2e}",
                        orbit.residual, ode.period_gap
                    ),
                ))
            }
            SearchResult::NoConvergence(nc) => Ok((false, format!("newton failed: {nc:?}"))),
        }
    });

    record(&mut checks, "bounds/wbd-soundness", || {
        let family = HomotopyFamily::new(catalog("cosine-morse", 1).expect("catalog"));
        let omega = OmegaSpec::standard(4);
        let eps = 0.5;
        let wbd = wbd_radius(&family, eps, &omega)?;
        let report = wbd_soundness(&family, eps, &omega, wbd.r0, 1, 2000, 32, seed)?;
        Ok((
            report.pass,
            format!(
                "{} samples, min gradient {:.3}",
                report.samples, report.min_gradient_norm
            ),
        ))
    });

    record(&mut checks, "topology/ring-axioms", || {
        // constructors validate associativity, grading, commutativity, unit
        for field in [CoeffField::Rationals, CoeffField::TwoElement] {
            let _ = exterior_algebra(4, field);
            let _ = sphere_ring(2, field);
        }
        Ok((true, "exterior(4) and sphere rings validate over both fields".into()))
    });

    record(&mut checks, "topology/cup-length-battery", || {
        let opts = CupLengthOptions::default();
        let mut pass = true;
        for m in 0..=4 {
            let ring = exterior_algebra(m, CoeffField::Rationals);
            let module = GradedModule::over_self(&ring);
            pass &= cup_length(&module, &ring, &opts).value == m + 1;
        }
        let sphere = sphere_ring(3, CoeffField::Rationals);
        pass &= cup_length(&GradedModule::over_self(&sphere), &sphere, &opts).value == 2;
        pass &= cup_length(&GradedModule::zero(&sphere), &sphere, &opts).value == 0;
        Ok((pass, "Λ(0..4), sphere and zero module".into()))
    });

    record(&mut checks, "topology/suspension-stabilization", || {
        let table = suspension_model(2, &[0, 1, 2, 3, 4, 5])?;
        Ok((table.stabilized(), "shifts 0..5 on T⁴".into()))
    });

    record(&mut checks, "topology/subadditivity", || {
        let opts = CupLengthOptions::default();
        let mut pass = true;
        for m in [2, 3] {
            let outcomes = subadditivity_check(&standard_instances(m, CoeffField::Rationals)?, &opts);
            pass &= outcomes.iter().all(|o| o.pass);
        }
        Ok((pass, "standard instances on Λ(2), Λ(3)".into()))
    });

    SelfCheckReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_battery_passes() {
        let report = run_all(7);
        for check in &report.checks {
            assert!(check.pass, "{}: {}", check.name, check.detail);
        }
    }
}
