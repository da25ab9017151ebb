//! Eigenphase estimation up to a global shift.
//!
//! A controlled-SWAP gadget on two eigenvector registers turns `Z^{2^k}`
//! into a qubit `(|0> + e^{i 2^k (beta - alpha)} |1>)/sqrt 2`, which iterative
//! phase estimation reads out coarse-to-fine. Pairing a fixed reference
//! eigenvector with uniformly random ones collects every phase difference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{eig_unitary, wrap_pi, wrap_two_pi, CVector, UnitaryMatrix, C64};
use crate::metrics::{spread_of_phases, PhaseSet};

/// Shots per basis and scale are `ceil(C_PE * ln(1/eta))`.
pub const C_PE: f64 = 2.0;

/// Reference pairings are `ceil(C_CC * d * ln d)`.
pub const C_CC: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenphaseConfig {
    pub c_pe: f64,
    pub c_cc: f64,
}

impl Default for EigenphaseConfig {
    fn default() -> Self {
        Self { c_pe: C_PE, c_cc: C_CC }
    }
}

impl EigenphaseConfig {
    pub fn shots(&self, eta: f64) -> u64 {
        (self.c_pe * (1.0 / eta).ln()).ceil().max(1.0) as u64
    }

    pub fn pairings(&self, d: usize) -> u64 {
        (self.c_cc * d as f64 * (d as f64).ln()).ceil().max(1.0) as u64
    }

    /// Failure probability allotted to each pairing.
    pub fn pairing_eta(&self, d: usize) -> f64 {
        0.1 / self.pairings(d) as f64
    }
}

/// Scales `M = ceil(log2(1/eps)) + 2`.
pub fn scale_count(eps: f64) -> u32 {
    ((1.0 / eps).log2() - 1e-12).ceil().max(0.0) as u32 + 2
}

/// Queries spent by one [`phase_diff_estimate`] call: `2 R (2^M - 1)`.
pub fn phase_diff_queries(eps: f64, eta: f64, config: &EigenphaseConfig) -> u64 {
    2 * config.shots(eta) * ((1u64 << scale_count(eps)) - 1)
}

/// Simulated output of the controlled-SWAP gadget for a hidden phase gap.
#[derive(Debug)]
pub struct PhaseDiffSampler {
    delta: f64,
    ledger: u64,
    rng: ChaCha20Rng,
}

impl PhaseDiffSampler {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self { delta, ledger: 0, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn queries_used(&self) -> u64 {
        self.ledger
    }

    /// Runs the gadget with `Z^{2^k}` `shots` times, rotates the qubit by
    /// `feedback` and measures; returns the number of `0` outcomes, each
    /// occurring with probability `cos^2((2^k delta + feedback)/2)`.
    /// Charges `shots * 2^k` queries.
    pub fn measure(&mut self, k: u32, feedback: f64, shots: u64) -> u64 {
        self.ledger += shots << k;
        let angle = (1u64 << k) as f64 * self.delta + feedback;
        let p0 = (angle / 2.0).cos().powi(2).clamp(0.0, 1.0);
        Binomial::new(shots, p0).expect("probability in [0, 1]").sample(&mut self.rng)
    }
}

/// Estimate of `delta` within `eps` except with probability about `eta`.
///
/// Scale `k` measures the residual `2^k (delta - theta)` in two quadratures
/// and refines `theta` by its `atan2` estimate divided by `2^k`; each scale
/// needs the residual estimate to within `pi/2`, after which the final scale
/// fixes `delta` to `2^{1-M}` times that error.
pub fn phase_diff_estimate(sampler: &mut PhaseDiffSampler, eps: f64, eta: f64, config: &EigenphaseConfig) -> Result<f64> {
    if !(eps > 0.0 && eps < std::f64::consts::PI) || !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("need eps in (0, pi), eta in (0, 1), got {eps}, {eta}")));
    }
    let shots = config.shots(eta);
    let mut theta = 0.0;
    for k in 0..scale_count(eps) {
        let scale = (1u64 << k) as f64;
        let feedback = -scale * theta;
        let c = 2.0 * sampler.measure(k, feedback, shots) as f64 / shots as f64 - 1.0;
        let s = 2.0 * sampler.measure(k, feedback - std::f64::consts::FRAC_PI_2, shots) as f64 / shots as f64 - 1.0;
        theta += s.atan2(c) / scale;
    }
    Ok(wrap_two_pi(theta))
}

/// Access to `Z` for eigenphase estimation. Eigenvectors are drawn uniformly
/// (the maximally mixed register) from the spectral decomposition, indexed in
/// circular order starting at the minimal covering arc so that the draws do
/// not depend on the global phase of `Z`.
#[derive(Debug)]
pub struct EigenphaseOracle {
    phases: Vec<f64>,
    ledger: u64,
    rng: ChaCha20Rng,
}

impl EigenphaseOracle {
    pub fn new(z: &UnitaryMatrix, seed: u64) -> Result<Self> {
        let raw = eig_unitary(z)?.phases;
        let spread = spread_of_phases(&raw)?;
        let start = spread.arc_center - spread.sigma / 2.0;
        let mut phases = raw;
        phases.sort_by(|a, b| wrap_two_pi(a - start + 1e-12).total_cmp(&wrap_two_pi(b - start + 1e-12)));
        Ok(Self { phases, ledger: 0, rng: ChaCha20Rng::seed_from_u64(seed) })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn queries_used(&self) -> u64 {
        self.ledger
    }

    fn draw_index(&mut self) -> usize {
        self.rng.random_range(0..self.phases.len())
    }
}

#[derive(Clone, Debug)]
pub struct EigenphaseEstimate {
    /// Deduplicated phases, relative to the reference eigenphase.
    pub phases: PhaseSet,
    /// Every recorded difference, before deduplication.
    pub raw: Vec<f64>,
    pub pairings: u64,
    pub queries: u64,
}

/// Records `ceil(C_CC d ln d)` phase differences against one reference
/// eigenvector, each to accuracy `eps/2`, then merges them into clusters of
/// diameter at most `eps`, so the output stays within `eps` in Hausdorff distance.
pub fn estimate_eigenphases(oracle: &mut EigenphaseOracle, eps: f64, config: &EigenphaseConfig) -> Result<EigenphaseEstimate> {
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_4) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, pi/4), got {eps}")));
    }
    let d = oracle.dim();
    let pairings = config.pairings(d);
    let eta = config.pairing_eta(d);
    let a = oracle.draw_index();
    let mut raw = Vec::with_capacity(pairings as usize);
    for _ in 0..pairings {
        let b = oracle.draw_index();
        let mut sampler = PhaseDiffSampler::new(oracle.phases[b] - oracle.phases[a], oracle.rng.random());
        raw.push(phase_diff_estimate(&mut sampler, eps / 2.0, eta, config)?);
        oracle.ledger += sampler.queries_used();
    }
    let queries = pairings * phase_diff_queries(eps / 2.0, eta, config);
    Ok(EigenphaseEstimate { phases: cluster_phases(&raw, eps), raw, pairings, queries })
}

/// Greedy circular clustering into arcs of length at most `diameter`, each
/// represented by its arc midpoint. Clusters start after the largest gap so
/// that no cluster straddles it.
pub fn cluster_phases(phases: &[f64], diameter: f64) -> PhaseSet {
    if phases.is_empty() {
        return PhaseSet::default();
    }
    let spread = spread_of_phases(phases).expect("nonempty");
    let start = spread.arc_center - spread.sigma / 2.0;
    let mut offsets: Vec<f64> = phases.iter().map(|&t| wrap_two_pi(t - start + 1e-12) - 1e-12).collect();
    offsets.sort_by(f64::total_cmp);
    let mut reps = Vec::new();
    let mut lo = offsets[0];
    let mut hi = offsets[0];
    for &x in &offsets[1..] {
        if x - lo > diameter {
            reps.push(0.5 * (lo + hi));
            lo = x;
        }
        hi = x;
    }
    reps.push(0.5 * (lo + hi));
    PhaseSet::new(reps.into_iter().map(|r| r + start))
}

/// Full statevector of the gadget on `|+>|a>|b>` (qubit first): controlled
/// SWAP, `Z^power` on the first register, controlled SWAP.
pub fn swap_gadget_state(z: &UnitaryMatrix, a: &CVector, b: &CVector, power: u64) -> CVector {
    let d = z.dim();
    let idx = |q: usize, i: usize, j: usize| q * d * d + i * d + j;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = CVector::zeros(2 * d * d);
    for q in 0..2 {
        for i in 0..d {
            for j in 0..d {
                state[idx(q, i, j)] = a[i] * b[j] * h;
            }
        }
    }
    let cswap = |s: &CVector| {
        let mut out = s.clone();
        for i in 0..d {
            for j in 0..d {
                out[idx(1, i, j)] = s[idx(1, j, i)];
            }
        }
        out
    };
    let zp = z.pow(power);
    let apply_z = |s: &CVector| {
        let mut out = CVector::zeros(s.len());
        for q in 0..2 {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += zp.matrix()[(i, k)] * s[idx(q, k, j)];
                    }
                    out[idx(q, i, j)] = acc;
                }
            }
        }
        out
    };
    cswap(&apply_z(&cswap(&state)))
}

/// Relative phase of the gadget qubit, `arg(q_1 / q_0)`, and the norm of the
/// part of the state outside `qubit (x) |a> (x) |b>`.
pub fn gadget_qubit_phase(state: &CVector, a: &CVector, b: &CVector) -> (f64, f64) {
    let d = a.len();
    let mut q = [C64::new(0.0, 0.0); 2];
    for (s, qs) in q.iter_mut().enumerate() {
        for i in 0..d {
            for j in 0..d {
                *qs += (a[i] * b[j]).conj() * state[s * d * d + i * d + j];
            }
        }
    }
    let mut residual = state.clone();
    for s in 0..2 {
        for i in 0..d {
            for j in 0..d {
                residual[s * d * d + i * d + j] -= q[s] * a[i] * b[j];
            }
        }
    }
    (wrap_pi((q[1] / q[0]).arg()), residual.norm())
}
