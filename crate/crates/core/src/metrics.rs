//! Distances between unitary channels.
//!
//! Every projective metric here is a closed-form function of the spread of
//! the eigenphases of `U^dagger V`, i.e. the length of the shortest arc of the
//! unit circle containing all of them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{circular_distance, eigenphases, wrap_pi, wrap_two_pi, UnitaryMatrix};

/// Minimal covering arc of a set of eigenphases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadResult {
    /// Arc length in `[0, 2pi)`.
    pub sigma: f64,
    /// Midpoint of the arc, in `(-pi, pi]`.
    pub arc_center: f64,
}

/// Spread of an arbitrary list of angles: `2pi` minus the largest circular gap.
pub fn spread_of_phases(phases: &[f64]) -> Result<SpreadResult> {
    if phases.is_empty() {
        return Err(Error::EmptyPhaseSet);
    }
    let mut p: Vec<f64> = phases.iter().map(|&t| wrap_two_pi(t)).collect();
    p.sort_by(f64::total_cmp);
    let n = p.len();
    // gap k runs from p[k] forward to p[k+1]; the last one wraps around
    let mut best_gap = p[0] + 2.0 * PI - p[n - 1];
    let mut arc_start = p[0];
    for k in 0..n - 1 {
        let gap = p[k + 1] - p[k];
        if gap > best_gap {
            best_gap = gap;
            arc_start = p[k + 1];
        }
    }
    let sigma = (2.0 * PI - best_gap).max(0.0);
    let sigma = if sigma >= 2.0 * PI { 0.0 } else { sigma };
    Ok(SpreadResult { sigma, arc_center: wrap_pi(arc_start + sigma / 2.0) })
}

fn check_dims(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    Ok(())
}

fn relative_phases(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<Vec<f64>> {
    check_dims(u, v)?;
    eigenphases(&(&u.adjoint() * v))
}

/// Spread of the eigenphases of `U^dagger V`.
pub fn spread(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<SpreadResult> {
    spread_of_phases(&relative_phases(u, v)?)
}

pub fn diamond_norm_from_spread(sigma: f64) -> f64 {
    if sigma < PI {
        2.0 * (sigma / 2.0).sin()
    } else {
        2.0
    }
}

pub fn pudist_from_spread(sigma: f64) -> f64 {
    2.0 * (sigma / 4.0).sin()
}

/// `||U(U) - U(V)||_diamond`, in `[0, 2]`.
pub fn diamond_norm(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    Ok(diamond_norm_from_spread(spread(u, v)?.sigma))
}

/// Diamond-norm distance, half of [`diamond_norm`], in `[0, 1]`.
pub fn diamond_distance(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    Ok(diamond_norm(u, v)? / 2.0)
}

/// `min_phi ||phi U - V||_op`.
pub fn pudist(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    Ok(pudist_from_spread(spread(u, v)?.sigma))
}

/// Intrinsic Lie distance between `U(1)U` and `U(1)V`, i.e. `sigma / 2`.
pub fn lie_dist(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    Ok(spread(u, v)?.sigma / 2.0)
}

/// Lie distance without projecting out the global phase: `max_k |theta_k|`
/// over the eigenphases of `U^dagger V` in `(-pi, pi]`.
pub fn path_dist(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    Ok(relative_phases(u, v)?.iter().map(|t| t.abs()).fold(0.0, f64::max))
}

/// `1 - |Tr(U^dagger V) / d|^2`.
pub fn ent_infidelity(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    check_dims(u, v)?;
    let d = u.dim() as f64;
    let t = (u.matrix().adjoint() * v.matrix()).trace().norm() / d;
    Ok((1.0 - t * t).clamp(0.0, 1.0))
}

/// `(2d)^{-1/2} min_phi ||U - phi V||_F = sqrt(1 - |Tr(U^dagger V)| / d)`.
pub fn frob_phase_metric(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<f64> {
    check_dims(u, v)?;
    let d = u.dim() as f64;
    let t = (u.matrix().adjoint() * v.matrix()).trace().norm() / d;
    Ok((1.0 - t).max(0.0).sqrt())
}

/// All spread-derived distances from a single eigendecomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDistances {
    pub sigma: f64,
    pub diamond_norm: f64,
    pub diamond_distance: f64,
    pub pudist: f64,
    pub lie_dist: f64,
    pub ent_infidelity: f64,
}

pub fn channel_distances(u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<ChannelDistances> {
    let sigma = spread(u, v)?.sigma;
    let dn = diamond_norm_from_spread(sigma);
    Ok(ChannelDistances {
        sigma,
        diamond_norm: dn,
        diamond_distance: dn / 2.0,
        pudist: pudist_from_spread(sigma),
        lie_dist: sigma / 2.0,
        ent_infidelity: ent_infidelity(u, v)?,
    })
}

/// Finite multiset of angles, stored in `[0, 2pi)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseSet {
    phases: Vec<f64>,
}

impl PhaseSet {
    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        Self { phases: phases.into_iter().map(wrap_two_pi).collect() }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn shifted(&self, tau: f64) -> Self {
        Self::new(self.phases.iter().map(|&t| t + tau))
    }
}

fn directed_hausdorff(a: &[f64], b: &[f64], tau: f64) -> f64 {
    a.iter()
        .map(|&x| b.iter().map(|&y| circular_distance(x + tau, y)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Circular Hausdorff distance between `A + tau` and `B`.
pub fn shifted_hausdorff(a: &PhaseSet, b: &PhaseSet, tau: f64) -> f64 {
    directed_hausdorff(&a.phases, &b.phases, tau).max(directed_hausdorff(&b.phases, &a.phases, -tau))
}

/// `min_tau` of the circular Hausdorff distance between `A + tau` and `B`.
///
/// The objective is piecewise linear in `tau` with unit slopes, so its minimum
/// sits either on an alignment shift `b - a` or halfway between two of them.
pub fn hausdorff_phase_dist(a: &PhaseSet, b: &PhaseSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPhaseSet);
    }
    let mut shifts: Vec<f64> = Vec::with_capacity(a.len() * b.len());
    for &x in a.phases() {
        for &y in b.phases() {
            shifts.push(wrap_two_pi(y - x));
        }
    }
    shifts.sort_by(f64::total_cmp);
    shifts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);

    let mut best = f64::INFINITY;
    for (i, &s) in shifts.iter().enumerate() {
        best = best.min(shifted_hausdorff(a, b, s));
        for &t in &shifts[i + 1..] {
            let mid = 0.5 * (s + t);
            best = best.min(shifted_hausdorff(a, b, mid));
            best = best.min(shifted_hausdorff(a, b, mid + PI));
        }
    }
    Ok(best)
}
