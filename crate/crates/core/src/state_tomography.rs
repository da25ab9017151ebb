//! Pure-state tomography from uniform-POVM measurements.
//!
//! Each copy is measured in an independent Haar-random basis. The linear
//! estimator `L = (d+1) avg |v><v| - I` is unbiased for `|z><z|`; it is rounded
//! to a density matrix by projecting its spectrum onto the probability simplex
//! and keeping only the top eigenvector.

use nalgebra::SymmetricEigen;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{haar_random, identity, CMatrix, CVector, UnitaryMatrix, C64};
use crate::oracle::{PovmSampleSet, QueryOracle, SamplingMode, StatePreparation};

/// Constant in the sample count `m = ceil(C_STATE * d / eps0)`.
pub const C_STATE: f64 = 4.0;

/// Top projected eigenvalues closer than this are reported as a tie.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateTomographyConfig {
    pub c_state: f64,
    pub sampling: SamplingMode,
}

impl Default for StateTomographyConfig {
    fn default() -> Self {
        Self { c_state: C_STATE, sampling: SamplingMode::default() }
    }
}

impl StateTomographyConfig {
    pub fn sample_count(&self, d: usize, eps0: f64) -> u64 {
        (self.c_state * d as f64 / eps0).ceil() as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateEstimate {
    /// Unit vector whose largest-magnitude entry is real and positive.
    pub vector: CVector,
    pub samples_used: u64,
    /// Set when the two largest projected eigenvalues tied and the lower index won.
    pub degenerate_top: bool,
}

/// `m` uniform-POVM measurements of the prepared state.
///
/// In [`SamplingMode::Literal`] the bases are drawn from `rng` and every
/// sample is a separate [`QueryOracle::run_pattern`] call; a known `post`
/// rotation `W` is folded into the basis as `W V`, so that the outcome index
/// depends only on `V`. The other modes delegate to the oracle's direct sampler.
pub fn collect_samples<R: Rng + ?Sized>(
    prep: &StatePreparation,
    oracle: &mut QueryOracle,
    m: u64,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<PovmSampleSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    match mode {
        SamplingMode::Literal => {
            let d = prep.dim();
            let bases = (0..m).map(|_| haar_random(d, rng)).collect::<Vec<_>>();
            collect_with_bases(prep, oracle, &bases)
        }
        _ => oracle.measure_uniform_povm(prep, m, mode),
    }
}

/// Literal sampling with caller-chosen bases (one sample per basis).
pub fn collect_with_bases(
    prep: &StatePreparation,
    oracle: &mut QueryOracle,
    bases: &[UnitaryMatrix],
) -> Result<PovmSampleSet> {
    let d = prep.dim();
    let mut set = PovmSampleSet::new(d);
    for v in bases {
        let (basis, v2) = match &prep.post {
            Some(w) => {
                let basis = w * v;
                let v2 = &basis.adjoint() * w;
                (basis, v2)
            }
            None => (v.clone(), v.adjoint()),
        };
        let j = oracle.run_pattern(&prep.pre, &prep.interleave, &v2, prep.power)?;
        set.push(basis.matrix().column(j).into_owned());
    }
    Ok(set)
}

/// `L = (d+1) (1/m) sum_j |v_j><v_j| - I`.
pub fn build_l(samples: &PovmSampleSet) -> Result<CMatrix> {
    if samples.count() == 0 {
        return Err(Error::InsufficientData("no measurement outcomes".into()));
    }
    let d = samples.dim();
    let mean = samples.mean_projector();
    let l = mean * C64::new((d + 1) as f64, 0.0) - identity(d);
    Ok((&l + l.adjoint()) * C64::new(0.5, 0.0))
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Spectral simplex projection of a Hermitian `L`, keeping only the top eigenvector.
pub fn round_to_state(l: &CMatrix) -> Result<StateEstimate> {
    if l.nrows() != l.ncols() {
        return Err(Error::NotSquare { rows: l.nrows(), cols: l.ncols() });
    }
    let eig = SymmetricEigen::new(l.clone());
    let values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let projected = project_to_simplex(&values);

    // nalgebra returns eigenvalues unordered; break ties by lowest index
    let mut order: Vec<usize> = (0..projected.len()).collect();
    order.sort_by(|&a, &b| projected[b].total_cmp(&projected[a]).then(a.cmp(&b)));
    let top = order[0];
    let degenerate_top = order.len() > 1 && projected[top] - projected[order[1]] <= TIE_TOL;

    let vector = canonical_phase(eig.eigenvectors.column(top).into_owned());
    Ok(StateEstimate { vector, samples_used: 0, degenerate_top })
}

/// Rescales to unit norm with the largest-magnitude entry real and positive.
pub fn canonical_phase(mut v: CVector) -> CVector {
    let n = v.norm();
    v.unscale_mut(n);
    let k = (0..v.len()).fold(0, |best, i| if v[i].norm() > v[best].norm() { i } else { best });
    let z = v[k];
    if z.norm() > 0.0 {
        v *= z.conj() / z.norm();
    }
    v
}

/// Collect, build `L`, round. Uses `m = ceil(c_state * d / eps0)` copies.
pub fn estimate_state<R: Rng + ?Sized>(
    prep: &StatePreparation,
    oracle: &mut QueryOracle,
    eps0: f64,
    config: &StateTomographyConfig,
    rng: &mut R,
) -> Result<StateEstimate> {
    if !(eps0 > 0.0 && eps0 <= 1.0) {
        return Err(Error::InvalidParameter(format!("eps0 must lie in (0, 1], got {eps0}")));
    }
    let m = config.sample_count(prep.dim(), eps0);
    let samples = collect_samples(prep, oracle, m, config.sampling, rng)?;
    let mut est = round_to_state(&build_l(&samples)?)?;
    est.samples_used = m;
    Ok(est)
}

/// `1 - |<z|u>|^2` for unit vectors.
pub fn infidelity(z: &CVector, u: &CVector) -> f64 {
    (1.0 - z.dotc(u).norm_sqr()).max(0.0)
}
