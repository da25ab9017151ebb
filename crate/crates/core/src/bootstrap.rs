//! Heisenberg-scaling refinement of a constant-accuracy estimator.
//!
//! Iteration `j` learns the residual `(Z V_j^dagger)^{2^j}` to constant
//! accuracy and folds its principal `2^j`-th root into the running estimate,
//! so the error halves per iteration while the query cost doubles.

use std::f64::consts::FRAC_2_PI;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{cis, eigenphases, frac_power, UnitaryMatrix};
use crate::metrics::spread_of_phases;
use crate::oracle::QueryOracle;
use crate::process_tomography::{base_estimate, BaseConfig, EffectiveTarget};

/// Lie-distance accuracy the base estimator must reach on every residual.
pub const BASE_LIE_ACCURACY: f64 = 1.0 / 200.0;

/// A constant-accuracy estimator for `(Z A)^p`.
pub trait BaseEstimator {
    /// Returns an estimate within Lie distance [`BASE_LIE_ACCURACY`] of the
    /// target with probability at least `1 - eta`.
    fn estimate(
        &mut self,
        oracle: &mut QueryOracle,
        target: &EffectiveTarget,
        eta: f64,
        rng: &mut dyn RngCore,
    ) -> Result<UnitaryMatrix>;
}

/// The tomography-based estimator, run at pudist accuracy `(2/pi) / 200`.
#[derive(Clone, Debug, Default)]
pub struct TomographyBase {
    pub config: BaseConfig,
}

impl TomographyBase {
    pub fn new(config: BaseConfig) -> Self {
        Self { config }
    }

    /// pudist accuracy guaranteeing [`BASE_LIE_ACCURACY`] in Lie distance.
    pub fn pudist_accuracy() -> f64 {
        FRAC_2_PI * BASE_LIE_ACCURACY
    }
}

impl BaseEstimator for TomographyBase {
    fn estimate(
        &mut self,
        oracle: &mut QueryOracle,
        target: &EffectiveTarget,
        eta: f64,
        rng: &mut dyn RngCore,
    ) -> Result<UnitaryMatrix> {
        Ok(base_estimate(oracle, target, Self::pudist_accuracy(), eta, &self.config, rng)?.estimate)
    }
}

#[derive(Clone, Debug)]
pub struct BootstrapIterate {
    pub j: u32,
    pub power: u64,
    pub eta: f64,
    /// Base estimate of the residual.
    pub residual_estimate: UnitaryMatrix,
    /// Running estimate after this iteration.
    pub next: UnitaryMatrix,
    /// Queries spent by this iteration.
    pub queries: u64,
}

#[derive(Clone, Debug)]
pub struct BootstrapTrace {
    pub iterates: Vec<BootstrapIterate>,
    pub final_estimate: UnitaryMatrix,
}

/// `T = ceil(log2(1/eps))`.
pub fn iteration_count(eps: f64) -> u32 {
    ((1.0 / eps).log2() - 1e-12).ceil().max(0.0) as u32
}

/// `eta_j = eta * 8^{j - T - 1}`.
pub fn iteration_eta(eta: f64, j: u32, t: u32) -> f64 {
    eta * 8f64.powi(j as i32 - t as i32 - 1)
}

/// Principal `p`-th root after rotating the spectrum's covering arc to be
/// centred on 1. The rotation only changes the global phase, which the
/// channel ignores, and keeps the spectrum as far from the branch cut as
/// possible.
pub fn centered_root(u: &UnitaryMatrix, p: u64) -> Result<UnitaryMatrix> {
    let center = spread_of_phases(&eigenphases(u)?)?.arc_center;
    frac_power(&u.scaled(cis(-center)), 1.0 / p as f64)
}

/// Runs `T + 1` iterations and returns the final estimate with its trace.
pub fn bootstrap(
    oracle: &mut QueryOracle,
    eps: f64,
    eta: f64,
    base: &mut dyn BaseEstimator,
    rng: &mut dyn RngCore,
) -> Result<(UnitaryMatrix, BootstrapTrace)> {
    if !(eps > 0.0 && eps < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("need eps, eta in (0, 1), got {eps}, {eta}")));
    }
    let d = oracle.dim();
    let t = iteration_count(eps);
    let mut v = UnitaryMatrix::identity(d);
    let mut iterates = Vec::with_capacity(t as usize + 1);
    for j in 0..=t {
        let power = 1u64 << j;
        let eta_j = iteration_eta(eta, j, t);
        let start = oracle.queries_used();
        let target = EffectiveTarget::residual(&v, power);
        let u = base.estimate(oracle, &target, eta_j, rng)?;
        v = &centered_root(&u, power)? * &v;
        iterates.push(BootstrapIterate {
            j,
            power,
            eta: eta_j,
            residual_estimate: u,
            next: v.clone(),
            queries: oracle.queries_used() - start,
        });
    }
    Ok((v.clone(), BootstrapTrace { iterates, final_estimate: v }))
}

/// Least-squares slope of `ln Q` against `ln(1/eps)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 distinct eps values, got {}", distinct.len())));
    }
    if points.iter().any(|&(e, q)| !(e > 0.0) || !(q > 0.0)) {
        return Err(Error::InvalidParameter("eps and query counts must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (1.0 / p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Test doubles that know the hidden unitary. Each call charges one
/// `run_pattern` of the target's power so query accounting stays exact.
pub mod mocks {
    use rand::{Rng, RngCore};

    use super::{BaseEstimator, BASE_LIE_ACCURACY};
    use crate::error::Result;
    use crate::linalg::{expm, gaussian_c64, haar_random, principal_log, AntiHermitianGenerator, CMatrix, UnitaryMatrix, C64};
    use crate::oracle::{derived_oracle_pattern, QueryOracle};
    use crate::process_tomography::EffectiveTarget;

    /// How a successful mock call deviates from the true residual.
    #[derive(Clone, Copy, Debug, PartialEq)]
    pub enum Perturbation {
        None,
        /// Random direction, operator norm exactly `size`.
        Random(f64),
        /// Pushes further along the residual's own generator, norm exactly `size`.
        Aligned(f64),
    }

    /// Mock base estimator.
    #[derive(Clone, Debug)]
    pub struct MockBase {
        truth: UnitaryMatrix,
        pub perturbation: Perturbation,
        /// Return a Haar-random matrix on this call index.
        pub fail_at: Option<u32>,
        /// Fail with probability `eta` on every call.
        pub random_failures: bool,
        calls: u32,
    }

    impl MockBase {
        pub fn new(truth: UnitaryMatrix, perturbation: Perturbation) -> Self {
            Self { truth, perturbation, fail_at: None, random_failures: false, calls: 0 }
        }

        pub fn exact(truth: UnitaryMatrix) -> Self {
            Self::new(truth, Perturbation::None)
        }

        /// Worst-case accuracy allowed of a base estimator, in a random direction.
        pub fn adversarial(truth: UnitaryMatrix) -> Self {
            Self::new(truth, Perturbation::Random(BASE_LIE_ACCURACY))
        }

        pub fn failing_at(mut self, call: u32) -> Self {
            self.fail_at = Some(call);
            self
        }

        pub fn with_random_failures(mut self) -> Self {
            self.random_failures = true;
            self
        }

        pub fn residual(&self, target: &EffectiveTarget) -> UnitaryMatrix {
            let r = (&self.truth * &target.interleave).pow(target.power);
            match &target.post {
                Some(w) => w * &r,
                None => r,
            }
        }
    }

    fn unit_generator(d: usize, rng: &mut dyn RngCore) -> AntiHermitianGenerator {
        let h = CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng));
        let x = AntiHermitianGenerator::from_hermitian(&h);
        x.scaled(1.0 / x.norm())
    }

    impl BaseEstimator for MockBase {
        fn estimate(
            &mut self,
            oracle: &mut QueryOracle,
            target: &EffectiveTarget,
            eta: f64,
            rng: &mut dyn RngCore,
        ) -> Result<UnitaryMatrix> {
            let d = target.dim();
            let call = self.calls;
            self.calls += 1;
            let (v0, v1, v2) = derived_oracle_pattern(0, &target.interleave.adjoint(), &UnitaryMatrix::identity(d));
            oracle.run_pattern(&v0, &v1, &v2, target.power)?;

            let fails = self.fail_at == Some(call) || (self.random_failures && rng.random::<f64>() < eta);
            if fails {
                return Ok(haar_random(d, rng));
            }
            let r = self.residual(target);
            let x = match self.perturbation {
                Perturbation::None => return Ok(r),
                Perturbation::Random(size) => unit_generator(d, rng).scaled(size),
                Perturbation::Aligned(size) => {
                    let center = crate::metrics::spread_of_phases(&crate::linalg::eigenphases(&r)?)?.arc_center;
                    let centered = r.scaled(C64::from_polar(1.0, -center));
                    match principal_log(&centered, 1e-9) {
                        Ok(g) if g.norm() > 1e-12 => g.scaled(size / g.norm()),
                        _ => unit_generator(d, rng).scaled(size),
                    }
                }
            };
            Ok(&r * &expm(&x))
        }
    }
}
