//! Unitary estimation at the standard `d^2 / eps^2` query scaling.
//!
//! Columns of the target and of the target times `F^dagger` are learned by
//! pure-state tomography and each set is projected to the nearest unitary.
//! The unknown per-column phases are then recovered from the Fourier
//! pre-rotated copy, and the whole procedure is repeated and collated by a
//! central-estimate vote to boost confidence.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{dft, hadamard, project_to_unitary, CMatrix, UnitaryMatrix, C64};
use crate::metrics::pudist;
use crate::oracle::{QueryOracle, StatePreparation};
use crate::state_tomography::{estimate_state, StateTomographyConfig};

/// Per-column infidelity target is `EPS0_RATIO * eps^2`.
pub const EPS0_RATIO: f64 = 1.0 / 64.0;

/// Repetitions `2 * ceil(REPETITION_FACTOR * ln(1/eta)) + 1`.
pub const REPETITION_FACTOR: f64 = 24.0;

/// Fraction of candidates a central estimate must be close to.
pub const CENTRAL_FRACTION: f64 = 0.505;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FourierKind {
    #[default]
    Dft,
    /// Only valid when `d` is a power of two.
    Hadamard,
}

impl FourierKind {
    pub fn matrix(self, d: usize) -> Result<UnitaryMatrix> {
        match self {
            FourierKind::Dft => Ok(dft(d)),
            FourierKind::Hadamard => hadamard(d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseConfig {
    pub state: StateTomographyConfig,
    pub eps0_ratio: f64,
    pub repetition_factor: f64,
    pub fourier: FourierKind,
}

impl Default for BaseConfig {
    fn default() -> Self {
        Self {
            state: StateTomographyConfig::default(),
            eps0_ratio: EPS0_RATIO,
            repetition_factor: REPETITION_FACTOR,
            fourier: FourierKind::Dft,
        }
    }
}

impl BaseConfig {
    pub fn repetitions(&self, eta: f64) -> u64 {
        2 * (self.repetition_factor * (1.0 / eta).ln()).ceil().max(0.0) as u64 + 1
    }

    /// Queries spent by one call of [`base_estimate`] on a power-`p` target.
    pub fn queries(&self, d: usize, eps: f64, eta: f64, power: u64) -> u64 {
        let m = self.state.sample_count(d, self.eps0_ratio * eps * eps);
        self.repetitions(eta) * 2 * d as u64 * m * power
    }
}

/// The unitary `W (Z A)^power` seen through the oracle, with `A` and the
/// optional post-rotation `W` known.
#[derive(Clone, Debug)]
pub struct EffectiveTarget {
    pub interleave: UnitaryMatrix,
    pub power: u64,
    pub post: Option<UnitaryMatrix>,
}

impl EffectiveTarget {
    /// `Z` itself.
    pub fn direct(d: usize) -> Self {
        Self { interleave: UnitaryMatrix::identity(d), power: 1, post: None }
    }

    /// The residual `(Z V^dagger)^power`.
    pub fn residual(v: &UnitaryMatrix, power: u64) -> Self {
        Self { interleave: v.adjoint(), power, post: None }
    }

    pub fn with_post(mut self, post: UnitaryMatrix) -> Self {
        self.post = Some(post);
        self
    }

    pub fn dim(&self) -> usize {
        self.interleave.dim()
    }
}

/// Columns estimated independently; unit norm but not jointly unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnEstimateMatrix(pub CMatrix);

impl ColumnEstimateMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn project(&self) -> Result<UnitaryMatrix> {
        project_to_unitary(&self.0)
    }
}

/// Diagonal of unit-modulus column phases.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagonal(pub Vec<C64>);

impl PhaseDiagonal {
    pub fn entries(&self) -> &[C64] {
        &self.0
    }

    pub fn to_unitary(&self) -> UnitaryMatrix {
        let phases: Vec<f64> = self.0.iter().map(|z| z.arg()).collect();
        UnitaryMatrix::from_phases(&phases)
    }
}

/// Tomography of every column of `target * pre_rotation`; `d * m * power` queries.
pub fn learn_columns<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    target: &EffectiveTarget,
    pre_rotation: &UnitaryMatrix,
    eps0: f64,
    config: &StateTomographyConfig,
    rng: &mut R,
) -> Result<ColumnEstimateMatrix> {
    let d = target.dim();
    let mut cols = CMatrix::zeros(d, d);
    for c in 0..d {
        let mut prep = StatePreparation::column(c, &target.interleave, target.power, pre_rotation);
        if let Some(w) = &target.post {
            prep = prep.with_post(w.clone());
        }
        let est = estimate_state(&prep, oracle, eps0, config, rng)?;
        cols.set_column(c, &est.vector);
    }
    Ok(ColumnEstimateMatrix(cols))
}

/// Recovers column phases `Psi` so that `V Psi^dagger` is the target up to a
/// global phase, given `V ~ Z Phi_V` and `G ~ Z F^dagger Phi_G`.
///
/// `P(a, b) = (G^dagger V)_{ab} / F_{ab}` is `conj(phi_G_a) phi_V_b` in the
/// exact case, so every row yields an estimate `P(a, b) / P(a, 0)` of
/// `phi_V_b / phi_V_0`. The estimates are combined by a coordinatewise median
/// taken in a frame rotated to their mean direction, which makes the result
/// independent of the (arbitrary) global phase of `V`.
pub fn fix_phases(v: &UnitaryMatrix, g: &UnitaryMatrix, f: &UnitaryMatrix) -> Result<PhaseDiagonal> {
    let d = v.dim();
    if g.dim() != d || f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.dim().max(f.dim()) });
    }
    let gv = g.matrix().adjoint() * v.matrix();
    let p = CMatrix::from_fn(d, d, |a, b| gv[(a, b)] / f.matrix()[(a, b)]);
    let mut psi = Vec::with_capacity(d);
    psi.push(C64::new(1.0, 0.0));
    for b in 1..d {
        let ratios: Vec<C64> = (0..d).map(|a| p[(a, b)] / p[(a, 0)]).collect();
        psi.push(rotated_median(&ratios));
    }
    Ok(PhaseDiagonal(psi))
}

/// Coordinatewise median in the frame aligned with the mean, renormalised.
fn rotated_median(z: &[C64]) -> C64 {
    let sum: C64 = z.iter().sum();
    let frame = if sum.norm() > 0.0 { sum / sum.norm() } else { C64::new(1.0, 0.0) };
    let (mut re, mut im): (Vec<f64>, Vec<f64>) = z.iter().map(|w| w * frame.conj()).map(|w| (w.re, w.im)).unzip();
    let m = C64::new(median(&mut re), median(&mut im)) * frame;
    if m.norm() > 0.0 {
        m / m.norm()
    } else {
        frame
    }
}

fn median(x: &mut [f64]) -> f64 {
    x.sort_by(f64::total_cmp);
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        0.5 * (x[n / 2 - 1] + x[n / 2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoostOutcome {
    pub index: usize,
    /// No candidate was central; the one with the largest neighbourhood won.
    pub degraded: bool,
}

/// Returns the first candidate within `2 eps` (pudist) of at least
/// `ceil(0.505 T)` candidates, itself included.
pub fn boost_confidence(candidates: &[UnitaryMatrix], eps: f64) -> Result<BoostOutcome> {
    if candidates.is_empty() {
        return Err(Error::InsufficientData("no candidates to collate".into()));
    }
    let t = candidates.len();
    let need = (CENTRAL_FRACTION * t as f64).ceil() as usize;
    let mut best = (0, 0);
    for (i, c) in candidates.iter().enumerate() {
        let mut count = 0;
        for other in candidates {
            if pudist(c, other)? <= 2.0 * eps {
                count += 1;
            }
        }
        if count >= need {
            return Ok(BoostOutcome { index: i, degraded: false });
        }
        if count > best.1 {
            best = (i, count);
        }
    }
    Ok(BoostOutcome { index: best.0, degraded: true })
}

#[derive(Clone, Debug)]
pub struct BaseEstimate {
    pub estimate: UnitaryMatrix,
    pub repetitions: u64,
    pub degraded: bool,
    pub queries: u64,
}

/// One unboosted estimate: learn both column sets, project, fix phases.
pub fn single_estimate<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    target: &EffectiveTarget,
    eps: f64,
    config: &BaseConfig,
    rng: &mut R,
) -> Result<UnitaryMatrix> {
    let d = target.dim();
    let eps0 = config.eps0_ratio * eps * eps;
    let f = config.fourier.matrix(d)?;
    let v = learn_columns(oracle, target, &UnitaryMatrix::identity(d), eps0, &config.state, rng)?.project()?;
    let g = learn_columns(oracle, target, &f.adjoint(), eps0, &config.state, rng)?.project()?;
    let psi = fix_phases(&v, &g, &f)?;
    Ok(&v * &psi.to_unitary().adjoint())
}

/// Estimate with pudist at most `eps` except with probability about `eta`.
pub fn base_estimate<R: Rng + ?Sized>(
    oracle: &mut QueryOracle,
    target: &EffectiveTarget,
    eps: f64,
    eta: f64,
    config: &BaseConfig,
    rng: &mut R,
) -> Result<BaseEstimate> {
    if !(eps > 0.0 && eps < 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("need eps, eta in (0, 1), got {eps}, {eta}")));
    }
    let start = oracle.queries_used();
    let reps = config.repetitions(eta);
    let mut candidates = Vec::with_capacity(reps as usize);
    for _ in 0..reps {
        candidates.push(single_estimate(oracle, target, eps, config, rng)?);
    }
    let outcome = boost_confidence(&candidates, eps)?;
    Ok(BaseEstimate {
        estimate: candidates.swap_remove(outcome.index),
        repetitions: reps,
        degraded: outcome.degraded,
        queries: oracle.queries_used() - start,
    })
}
