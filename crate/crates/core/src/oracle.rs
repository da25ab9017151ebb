//! Black-box access to a hidden unitary `Z`.
//!
//! The oracle only prepares states `V2 (Z V1)^p V0 |0>` and reports
//! measurement outcomes, charging `p` queries per preparation. The hidden
//! matrix is never exposed:
//!
//! ```compile_fail
//! use unitary_lab_core::{oracle::QueryOracle, UnitaryMatrix};
//! let o = QueryOracle::new(UnitaryMatrix::identity(2), 0);
//! let _ = o.hidden;
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, gaussian_c64, identity, swap_to_column, CMatrix, CVector, UnitaryMatrix, C64};

/// How uniform-POVM measurements are simulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingMode {
    /// One Haar basis and one [`QueryOracle::run_pattern`] call per sample.
    Literal,
    /// Outcome vectors drawn directly from their exact distribution.
    Direct,
    /// Like `Direct` up to `threshold` samples; above it, `pool` exact samples
    /// are drawn and their fluctuation around the known mean is rescaled to
    /// the covariance of the full sample average.
    Aggregated { threshold: u64, pool: u64 },
}

impl Default for SamplingMode {
    fn default() -> Self {
        SamplingMode::Aggregated { threshold: 20_000, pool: 256 }
    }
}

/// Describes the state `post (Z interleave)^power pre |0>`.
#[derive(Clone, Debug)]
pub struct StatePreparation {
    pub pre: UnitaryMatrix,
    pub interleave: UnitaryMatrix,
    pub power: u64,
    /// Known rotation applied after the queries; folded into the measurement basis.
    pub post: Option<UnitaryMatrix>,
}

impl StatePreparation {
    /// `Z^power |0>`.
    pub fn new(d: usize, power: u64) -> Self {
        Self {
            pre: UnitaryMatrix::identity(d),
            interleave: UnitaryMatrix::identity(d),
            power,
            post: None,
        }
    }

    /// Column `c` of `(Z A)^power R`, i.e. `(Z A)^power R |c>`.
    pub fn column(c: usize, interleave: &UnitaryMatrix, power: u64, pre_rotation: &UnitaryMatrix) -> Self {
        let d = interleave.dim();
        Self {
            pre: pre_rotation * &swap_to_column(d, c),
            interleave: interleave.clone(),
            power,
            post: None,
        }
    }

    pub fn with_post(mut self, post: UnitaryMatrix) -> Self {
        self.post = Some(post);
        self
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }
}

/// Pattern `(V0, V1, V2)` preparing `basis^dagger (Z V_j^dagger)^p |c>`.
pub fn derived_oracle_pattern(
    target_column: usize,
    residual: &UnitaryMatrix,
    basis: &UnitaryMatrix,
) -> (UnitaryMatrix, UnitaryMatrix, UnitaryMatrix) {
    let d = residual.dim();
    (swap_to_column(d, target_column), residual.adjoint(), basis.adjoint())
}

/// Outcomes of uniform-POVM measurements, kept as the running sum of
/// `|v><v|` plus (when not aggregated) the individual outcome vectors.
#[derive(Clone, Debug)]
pub struct PovmSampleSet {
    dim: usize,
    count: u64,
    moment_sum: CMatrix,
    outcomes: Vec<CVector>,
    aggregated: bool,
}

impl PovmSampleSet {
    pub fn new(dim: usize) -> Self {
        Self { dim, count: 0, moment_sum: CMatrix::zeros(dim, dim), outcomes: Vec::new(), aggregated: false }
    }

    /// From `(basis, index)` pairs; the outcome vector is column `index` of `basis`.
    pub fn from_pairs<'a>(dim: usize, pairs: impl IntoIterator<Item = (&'a UnitaryMatrix, usize)>) -> Self {
        let mut s = Self::new(dim);
        for (basis, j) in pairs {
            s.push(basis.matrix().column(j).into_owned());
        }
        s
    }

    pub fn push(&mut self, v: CVector) {
        self.moment_sum += &v * v.adjoint();
        self.outcomes.push(v);
        self.count += 1;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Individual outcome vectors; empty for aggregated sets.
    pub fn outcomes(&self) -> &[CVector] {
        &self.outcomes
    }

    pub fn is_aggregated(&self) -> bool {
        self.aggregated
    }

    /// `(1/m) sum_j |v_j><v_j|`.
    pub fn mean_projector(&self) -> CMatrix {
        &self.moment_sum / C64::new(self.count.max(1) as f64, 0.0)
    }
}

/// Holder of the hidden unitary with a monotone query ledger.
#[derive(Debug)]
pub struct QueryOracle {
    hidden: UnitaryMatrix,
    ledger: u64,
    budget: Option<u64>,
    rng: ChaCha20Rng,
}

impl QueryOracle {
    pub fn new(hidden: UnitaryMatrix, seed: u64) -> Self {
        Self { hidden, ledger: 0, budget: None, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn dim(&self) -> usize {
        self.hidden.dim()
    }

    pub fn queries_used(&self) -> u64 {
        self.ledger
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    fn charge(&mut self, requested: u64) -> Result<()> {
        let total = self.ledger.saturating_add(requested);
        if let Some(budget) = self.budget {
            if total > budget {
                return Err(Error::BudgetExceeded { used: self.ledger, requested, budget });
            }
        }
        self.ledger = total;
        Ok(())
    }

    fn check_dim(&self, u: &UnitaryMatrix) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        Ok(())
    }

    /// `(Z V1)^p V0 |0>` by repeated matrix-vector products.
    fn evolve(&self, v0: &UnitaryMatrix, v1: &UnitaryMatrix, p: u64) -> CVector {
        let zv1 = self.hidden.matrix() * v1.matrix();
        let mut psi = v0.matrix().column(0).into_owned();
        for _ in 0..p {
            psi = &zv1 * psi;
        }
        psi
    }

    /// Prepares `V2 (Z V1)^p V0 |0>`, measures in the computational basis and
    /// charges `p` queries.
    pub fn run_pattern(&mut self, v0: &UnitaryMatrix, v1: &UnitaryMatrix, v2: &UnitaryMatrix, p: u64) -> Result<usize> {
        for u in [v0, v1, v2] {
            self.check_dim(u)?;
        }
        if p == 0 {
            return Err(Error::InvalidParameter("power must be at least 1".into()));
        }
        self.charge(p)?;
        let psi = v2.apply(&self.evolve(v0, v1, p));
        let u: f64 = self.rng.random();
        Ok(sample_index(&psi, u))
    }

    /// Measures `m` copies of the prepared state, each in an independent
    /// Haar-random basis, returning the outcome vectors (or their aggregate).
    /// Charges `m * power` queries.
    pub fn measure_uniform_povm(&mut self, prep: &StatePreparation, m: u64, mode: SamplingMode) -> Result<PovmSampleSet> {
        for u in [&prep.pre, &prep.interleave] {
            self.check_dim(u)?;
        }
        if let Some(post) = &prep.post {
            self.check_dim(post)?;
        }
        if m == 0 || prep.power == 0 {
            return Err(Error::InvalidParameter("sample count and power must be at least 1".into()));
        }
        self.charge(m.saturating_mul(prep.power))?;
        let d = self.dim();
        let mut psi = self.evolve(&prep.pre, &prep.interleave, prep.power);
        psi.unscale_mut(psi.norm());
        let post = prep.post.as_ref().map(|p| p.matrix());
        let rng = &mut self.rng;

        let (exact, pool) = match mode {
            SamplingMode::Aggregated { threshold, pool } if m > threshold => (pool.max(1), true),
            _ => (m, false),
        };
        let mut set = PovmSampleSet::new(d);
        for _ in 0..exact {
            let v = povm_outcome(&psi, rng);
            let v = match post {
                Some(p) => p * v,
                None => v,
            };
            if pool {
                set.moment_sum += &v * v.adjoint();
                set.count += 1;
            } else {
                set.push(v);
            }
        }
        if pool {
            let target = match post {
                Some(p) => p * &psi,
                None => psi.clone(),
            };
            let mu = (identity(d) + &target * target.adjoint()) / C64::new((d + 1) as f64, 0.0);
            let pooled_mean = set.mean_projector();
            let scale = (exact as f64 / m as f64).sqrt();
            let mean = &mu + (pooled_mean - &mu) * C64::new(scale, 0.0);
            set.moment_sum = mean * C64::new(m as f64, 0.0);
            set.count = m;
            set.aggregated = true;
        }
        Ok(set)
    }
}

/// Inverse-CDF sampling of a computational-basis outcome.
fn sample_index(psi: &CVector, u: f64) -> usize {
    let total: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let target = u * total;
    let mut acc = 0.0;
    for (j, z) in psi.iter().enumerate() {
        acc += z.norm_sqr();
        if target < acc {
            return j;
        }
    }
    // rounding can leave target just above the final partial sum
    psi.iter().rposition(|z| z.norm_sqr() > 0.0).unwrap_or(0)
}

/// Outcome vector of a Haar-basis measurement of `psi`. Its law has density
/// `d |<v|psi>|^2` against the uniform measure on the sphere: the overlap
/// `t = |<v|psi>|^2` is `Beta(2, d-1)`, its phase is uniform, and the
/// orthogonal part is uniform on the unit sphere of `psi^perp`.
fn povm_outcome<R: Rng + ?Sized>(psi: &CVector, rng: &mut R) -> CVector {
    let d = psi.len();
    if d == 1 {
        return basis_vector(1, 0) * C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    }
    let t: f64 = Beta::new(2.0, (d - 1) as f64).expect("valid beta parameters").sample(rng);
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let mut w = CVector::from_iterator(d, (0..d).map(|_| gaussian_c64(rng)));
    let overlap = psi.dotc(&w);
    w -= psi * overlap;
    let n = w.norm();
    w.unscale_mut(n);
    psi * (phase * t.sqrt()) + w * C64::new((1.0 - t).sqrt(), 0.0)
}
