//! Hard instances for the query lower bound: nets of reflections, their
//! fractional powers, the one-query gadget that postselects onto `R^{+-alpha}`,
//! and the counting bounds used by the identification argument.

use std::f64::consts::PI;

use rand::{Rng, RngCore};

use crate::bootstrap::{bootstrap, BaseEstimator};
use crate::error::{Error, Result};
use crate::linalg::{cis, haar_random, identity, op_norm, CMatrix, CVector, UnitaryMatrix, C64};
use crate::metrics::diamond_norm;
use crate::oracle::QueryOracle;

/// Structural tolerance for reflections.
pub const REFLECTION_TOL: f64 = 1e-10;

/// Diamond norms closer than this count as a tie when picking the nearest net element.
pub const NEAREST_TIE_TOL: f64 = 1e-12;

/// Checks `R^2 = I` and `R = R^dagger`.
pub fn check_reflection(r: &UnitaryMatrix) -> Result<()> {
    let m = r.matrix();
    let dev = op_norm(&(m * m - identity(r.dim()))).max(op_norm(&(m - m.adjoint())));
    if dev > REFLECTION_TOL {
        return Err(Error::NotReflection(dev));
    }
    Ok(())
}

/// `U diag(+1 x floor(d/2), -1 x floor(d/2), +1 x (d mod 2)) U^dagger` for Haar `U`.
pub fn sample_reflection<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("reflections need d >= 2, got {d}")));
    }
    let half = d / 2;
    let phases: Vec<f64> = (0..d).map(|k| if (half..2 * half).contains(&k) { PI } else { 0.0 }).collect();
    let u = haar_random(d, rng);
    let m = u.matrix() * UnitaryMatrix::from_phases(&phases).matrix() * u.matrix().adjoint();
    // symmetrise away rounding so the Hermitian check is exact
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    UnitaryMatrix::new(m)
}

#[derive(Clone, Debug)]
pub struct ReflectionNet {
    pub elements: Vec<UnitaryMatrix>,
    pub separation: f64,
    /// False when fewer elements than requested were found.
    pub complete: bool,
    pub attempts: u64,
}

impl ReflectionNet {
    /// Smallest pairwise diamond norm, or `None` for fewer than two elements.
    pub fn min_pairwise_diamond(&self) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                let dn = diamond_norm(&self.elements[i], &self.elements[j])?;
                best = Some(best.map_or(dn, |b| b.min(dn)));
            }
        }
        Ok(best)
    }
}

/// Greedy packing over a fixed candidate list.
pub fn net_from_candidates(candidates: &[UnitaryMatrix], separation: f64) -> Result<ReflectionNet> {
    let mut elements: Vec<UnitaryMatrix> = Vec::new();
    for c in candidates {
        check_reflection(c)?;
        if accepts(&elements, c, separation)? {
            elements.push(c.clone());
        }
    }
    Ok(ReflectionNet { complete: elements.len() == candidates.len(), elements, separation, attempts: candidates.len() as u64 })
}

fn accepts(elements: &[UnitaryMatrix], c: &UnitaryMatrix, separation: f64) -> Result<bool> {
    for e in elements {
        if diamond_norm(e, c)? < separation {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rejection packing: sample reflections and keep those at diamond norm at
/// least `target_sep` from every accepted element.
pub fn build_net<R: Rng + ?Sized>(
    d: usize,
    target_sep: f64,
    target_n: usize,
    max_attempts: u64,
    rng: &mut R,
) -> Result<ReflectionNet> {
    if !(target_sep > 0.0 && target_sep <= 2.5) {
        return Err(Error::InvalidParameter(format!("separation must be positive, got {target_sep}")));
    }
    let mut elements = Vec::with_capacity(target_n);
    let mut attempts = 0;
    while elements.len() < target_n && attempts < max_attempts {
        attempts += 1;
        let c = sample_reflection(d, rng)?;
        if accepts(&elements, &c, target_sep)? {
            elements.push(c);
        }
    }
    Ok(ReflectionNet { complete: elements.len() >= target_n, elements, separation: target_sep, attempts })
}

/// `R^alpha = (I + R)/2 + e^{-i pi alpha} (I - R)/2`.
pub fn frac_reflection(r: &UnitaryMatrix, alpha: f64) -> Result<UnitaryMatrix> {
    check_reflection(r)?;
    let i = identity(r.dim());
    let half = C64::new(0.5, 0.0);
    let m = (&i + r.matrix()) * half + (&i - r.matrix()) * (half * cis(-PI * alpha));
    UnitaryMatrix::new(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GadgetSign {
    Plus,
    Minus,
}

impl GadgetSign {
    pub fn value(self) -> f64 {
        match self {
            GadgetSign::Plus => 1.0,
            GadgetSign::Minus => -1.0,
        }
    }
}

/// `gamma = cos(alpha pi/2) / (cos(alpha pi/2) + sin(alpha pi/2))`.
pub fn gadget_gamma(alpha: f64) -> f64 {
    let (s, c) = (alpha * PI / 2.0).sin_cos();
    c / (c + s)
}

/// `P = [[sqrt(g), +-i sqrt(1-g)], [sqrt(1-g), -+i sqrt(g)]]`.
pub fn gadget_matrix(alpha: f64, sign: GadgetSign) -> Result<UnitaryMatrix> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let g = gadget_gamma(alpha).clamp(0.0, 1.0);
    let (a, b) = (g.sqrt(), (1.0 - g).sqrt());
    let s = sign.value();
    let i = C64::i();
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), i * (s * b), C64::new(b, 0.0), -i * (s * a)]);
    UnitaryMatrix::new(m)
}

/// Amplitude of the postselected branch: `e^{+-i pi alpha/2} / (cos(alpha pi/2) + sin(alpha pi/2))`.
pub fn gadget_amplitude(alpha: f64, sign: GadgetSign) -> C64 {
    let (s, c) = (alpha * PI / 2.0).sin_cos();
    cis(sign.value() * PI * alpha / 2.0) / (c + s)
}

#[derive(Clone, Debug)]
pub struct GadgetResult {
    /// `(P (x) I) cR (P (x) I) |0>|psi>`, ancilla first.
    pub full_state: CVector,
    /// Unnormalised ancilla-`|0>` branch.
    pub branch: CVector,
    /// The branch normalised.
    pub postselected: CVector,
    /// Closed-form amplitude: `branch = nu R^{+-alpha} psi`.
    pub nu: C64,
}

/// Statevector simulation of the one-query fractional-power gadget.
pub fn gadget_apply(r: &UnitaryMatrix, alpha: f64, sign: GadgetSign, psi: &CVector) -> Result<GadgetResult> {
    check_reflection(r)?;
    let d = r.dim();
    if psi.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.len() });
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter("input state must be normalised".into()));
    }
    let p = gadget_matrix(alpha, sign)?;
    let pi = p.kron(&UnitaryMatrix::identity(d));
    let mut cr = CMatrix::zeros(2 * d, 2 * d);
    cr.view_mut((0, 0), (d, d)).copy_from(&identity(d));
    cr.view_mut((d, d), (d, d)).copy_from(r.matrix());
    let mut input = CVector::zeros(2 * d);
    input.rows_mut(0, d).copy_from(psi);
    let full_state = pi.matrix() * (cr * (pi.matrix() * input));
    let branch: CVector = full_state.rows(0, d).into_owned();
    let n = branch.norm();
    let postselected = if n > 0.0 { &branch / C64::new(n, 0.0) } else { branch.clone() };
    Ok(GadgetResult { full_state, branch, postselected, nu: gadget_amplitude(alpha, sign) })
}

/// Natural log of the exact tail norm `(sum_{w > K} C(Q,w) g^{Q-w} (1-g)^w)^{1/2}`;
/// `-inf` when nothing is truncated.
pub fn ln_ancilla_truncation_error(q: u64, gamma: f64, k: u64) -> f64 {
    if k >= q {
        return f64::NEG_INFINITY;
    }
    let ln_g = gamma.ln();
    let ln_h = (1.0 - gamma).ln();
    let mut ln_binom = 0.0;
    let mut terms = Vec::with_capacity((q - k) as usize);
    for w in 0..=q {
        if w > k {
            let a = if q - w == 0 { 0.0 } else { (q - w) as f64 * ln_g };
            let b = if w == 0 { 0.0 } else { w as f64 * ln_h };
            terms.push(ln_binom + a + b);
        }
        if w < q {
            ln_binom += ((q - w) as f64).ln() - ((w + 1) as f64).ln();
        }
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    0.5 * (top + sum.ln())
}

/// Norm of the weight-`> K` part of `(sqrt(g)|0> + sqrt(1-g)|1>)^{(x) Q}`.
pub fn ancilla_truncation_error(q: u64, gamma: f64, k: u64) -> f64 {
    ln_ancilla_truncation_error(q, gamma, k).exp()
}

/// Cutoff `K = ceil(40 + 40 (1 - gamma) Q)`.
pub fn truncation_cutoff(q: u64, gamma: f64) -> u64 {
    (40.0 + 40.0 * (1.0 - gamma) * q as f64).ceil() as u64
}

/// Natural log of `exp(-k^2 (1-g) Q / (2 (2 + k)))` with `K = k (1-g) Q`.
pub fn ln_truncation_chernoff_bound(q: u64, gamma: f64, k_cut: u64) -> f64 {
    let mean = (1.0 - gamma) * q as f64;
    let k = k_cut as f64 / mean;
    -k * k * mean / (2.0 * (2.0 + k))
}

/// `min(1, C(Q + d^2 - 1, Q) / N)`.
pub fn identification_bound(q: u64, d: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let top = q + d * d - 1;
    let choose = q.min(d * d - 1);
    match exact_binomial(top, choose) {
        Some(c) => (c as f64 / n as f64).min(1.0),
        None => (ln_binomial(top, choose) - (n as f64).ln()).exp().min(1.0),
    }
}

fn exact_binomial(n: u64, k: u64) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // c * (n - k + i) / i stays integral: it is C(n - k + i, i)
        c = c.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(c)
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}

/// `alpha = 1 / floor(1 / (8 eps))`.
pub fn identification_alpha(eps: f64) -> Result<f64> {
    let n = (1.0 / (8.0 * eps)).floor();
    if n < 1.0 {
        return Err(Error::InvalidParameter(format!("eps must be at most 1/8, got {eps}")));
    }
    Ok(1.0 / n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestElement {
    pub index: usize,
    pub diamond_norm: f64,
    /// Another element was equally close; the lowest index won.
    pub tie: bool,
}

pub fn nearest_net_element(net: &ReflectionNet, w: &UnitaryMatrix) -> Result<NearestElement> {
    if net.elements.is_empty() {
        return Err(Error::InsufficientData("empty net".into()));
    }
    let dists = net.elements.iter().map(|e| diamond_norm(e, w)).collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &x) in dists.iter().enumerate() {
        if x < dists[best] - NEAREST_TIE_TOL {
            best = i;
        }
    }
    let tie = dists.iter().enumerate().any(|(i, &x)| i != best && (x - dists[best]).abs() <= NEAREST_TIE_TOL);
    Ok(NearestElement { index: best, diamond_norm: dists[best], tie })
}

#[derive(Clone, Debug)]
pub struct Identification {
    pub nearest: NearestElement,
    pub estimate: UnitaryMatrix,
    pub powered: UnitaryMatrix,
}

/// Learns `Z = R^alpha` to accuracy `eps`, raises the estimate to the
/// integer power `1/alpha` and returns the diamond-nearest net element.
pub fn identify_via_powering(
    oracle: &mut QueryOracle,
    net: &ReflectionNet,
    eps: f64,
    eta: f64,
    base: &mut dyn BaseEstimator,
    rng: &mut dyn RngCore,
) -> Result<Identification> {
    let n = (1.0 / identification_alpha(eps)?).round() as u64;
    let (estimate, _) = bootstrap(oracle, eps, eta, base, rng)?;
    let powered = estimate.pow(n);
    let nearest = nearest_net_element(net, &powered)?;
    Ok(Identification { nearest, estimate, powered })
}
