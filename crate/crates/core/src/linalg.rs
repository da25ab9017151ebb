//! Dense complex linear algebra specialised to unitary matrices.
//!
//! Everything here is a pure function of its inputs. Randomness is always
//! passed in explicitly so that trials stay reproducible under seeding.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance enforced by the [`UnitaryMatrix`] and [`AntiHermitianGenerator`] constructors.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Default distance from the branch cut at `pi` below which logarithms are refused.
pub const DEFAULT_BRANCH_GUARD: f64 = 1e-9;

/// Singular values at or below this are treated as zero by [`project_to_unitary`].
pub const RANK_TOL: f64 = 1e-12;

const SCHUR_EPS_LADDER: [f64; 4] = [1e-15, 1e-14, 1e-13, 1e-12];
const SCHUR_MAX_ITER: usize = 10_000;

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Computational basis vector `|k>` of `C^d`.
pub fn basis_vector(d: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pi(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_two_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// Length of the shorter arc between two angles, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

fn not_square(m: &CMatrix) -> Error {
    Error::NotSquare { rows: m.nrows(), cols: m.ncols() }
}

/// A `d x d` complex matrix with `U^dagger U = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(not_square(&m));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let dev = unitarity_defect(&m);
        if dev > STRUCTURE_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is unitary by construction (products, decompositions).
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(d: usize) -> Self {
        Self(identity(d))
    }

    /// `diag(e^{i theta_0}, ..., e^{i theta_{d-1}})`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let diag = CVector::from_iterator(phases.len(), phases.iter().map(|&t| cis(t)));
        Self(CMatrix::from_diagonal(&diag))
    }

    /// Diagonal unitary from unit-modulus entries.
    pub fn from_diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&CVector::from_column_slice(entries)))
    }

    pub fn from_row_slice(d: usize, entries: &[C64]) -> Result<Self> {
        Self::new(CMatrix::from_row_slice(d, d, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scaled(&self, phase: C64) -> Self {
        Self::from_trusted(&self.0 * phase)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.0 * v
    }

    /// `U^p` by repeated multiplication.
    pub fn pow(&self, p: u64) -> Self {
        let mut acc = identity(self.dim());
        for _ in 0..p {
            acc = &self.0 * acc;
        }
        Self::from_trusted(acc)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_trusted(self.0.kronecker(&other.0))
    }

    /// Operator-norm distance `||U^dagger U - I||`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

impl Mul for &UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix::from_trusted(&self.0 * &rhs.0)
    }
}

impl Mul for UnitaryMatrix {
    type Output = UnitaryMatrix;
    fn mul(self, rhs: UnitaryMatrix) -> UnitaryMatrix {
        &self * &rhs
    }
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let d = m.nrows();
    op_norm(&(m.adjoint() * m - identity(d)))
}

/// An element of the Lie algebra `u(d)`: `X^dagger = -X`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiHermitianGenerator(CMatrix);

impl AntiHermitianGenerator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(not_square(&m));
        }
        let dev = op_norm(&(&m + m.adjoint()));
        if dev > STRUCTURE_TOL {
            return Err(Error::NotAntiHermitian(dev));
        }
        Ok(Self(m))
    }

    pub fn zero(d: usize) -> Self {
        Self(CMatrix::zeros(d, d))
    }

    /// `i H` for a Hermitian `H` (only the Hermitian part of `h` is used).
    pub fn from_hermitian(h: &CMatrix) -> Self {
        let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
        Self(herm * C64::i())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn scaled(&self, r: f64) -> Self {
        Self(&self.0 * C64::new(r, 0.0))
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }
}

/// Spectral decomposition of a unitary: phases in `(-pi, pi]` and orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct UnitaryEigensystem {
    pub phases: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

impl UnitaryEigensystem {
    /// `sum_k f(theta_k) |v_k><v_k|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = self.vectors.matrix();
        let diag = CVector::from_iterator(self.phases.len(), self.phases.iter().map(|&t| f(t)));
        v * CMatrix::from_diagonal(&diag) * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(cis)
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal folded back into `Q`.
pub fn haar_random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(d >= 1, "dimension must be at least 1");
    let g = ginibre(d, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q;
    for k in 0..d {
        let rkk = r[(k, k)];
        let n = rkk.norm();
        let ph = if n > 0.0 { rkk / n } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            out[(i, k)] *= ph;
        }
    }
    UnitaryMatrix::from_trusted(out)
}

/// Haar-random unit vector in `C^d`.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let mut v = CVector::from_iterator(d, (0..d).map(|_| gaussian_c64(rng)));
    let n = v.norm();
    v.unscale_mut(n);
    v
}

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng))
}

/// Eigendecomposition of a unitary via the complex Schur form, which is
/// diagonal for normal matrices and whose Schur vectors are orthonormal even
/// inside degenerate eigenvalue clusters.
pub fn eig_unitary(u: &UnitaryMatrix) -> Result<UnitaryEigensystem> {
    let d = u.dim();
    if d == 1 {
        let z = u.matrix()[(0, 0)];
        return Ok(UnitaryEigensystem {
            phases: vec![principal_arg(z)],
            vectors: UnitaryMatrix::identity(1),
        });
    }
    // nearly scalar inputs can stall the QR iteration at the tightest tolerance
    let schur = SCHUR_EPS_LADDER
        .iter()
        .find_map(|&eps| Schur::try_new(u.matrix().clone(), eps, SCHUR_MAX_ITER))
        .ok_or(Error::Decomposition)?;
    let (q, t) = schur.unpack();
    let phases = (0..d).map(|k| principal_arg(t[(k, k)])).collect();
    Ok(UnitaryEigensystem { phases, vectors: UnitaryMatrix::from_trusted(q) })
}

/// Eigenphases only, in `(-pi, pi]`.
pub fn eigenphases(u: &UnitaryMatrix) -> Result<Vec<f64>> {
    Ok(eig_unitary(u)?.phases)
}

/// Argument in `(-pi, pi]` (maps the `-pi` produced by a signed zero to `pi`).
fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// The unique generator `X` with `||X|| < pi` and `e^X = U`.
pub fn principal_log(u: &UnitaryMatrix, guard: f64) -> Result<AntiHermitianGenerator> {
    let eig = eig_unitary(u)?;
    check_branch(&eig.phases, guard)?;
    let x = eig.reconstruct_with(|t| C64::new(0.0, t));
    Ok(AntiHermitianGenerator(x))
}

fn check_branch(phases: &[f64], guard: f64) -> Result<()> {
    for &phase in phases {
        if PI - phase.abs() <= guard {
            return Err(Error::BranchCut { phase, guard });
        }
    }
    Ok(())
}

/// Principal power `U^r = exp(r log U)`.
pub fn frac_power(u: &UnitaryMatrix, r: f64) -> Result<UnitaryMatrix> {
    frac_power_guarded(u, r, DEFAULT_BRANCH_GUARD)
}

pub fn frac_power_guarded(u: &UnitaryMatrix, r: f64, guard: f64) -> Result<UnitaryMatrix> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must be positive, got {r}")));
    }
    let eig = eig_unitary(u)?;
    check_branch(&eig.phases, guard)?;
    Ok(UnitaryMatrix::from_trusted(eig.reconstruct_with(|t| cis(r * t))))
}

/// Matrix exponential of an anti-Hermitian generator, via the Hermitian
/// eigendecomposition of `-iX`.
pub fn expm(x: &AntiHermitianGenerator) -> UnitaryMatrix {
    let d = x.dim();
    let h = x.matrix() * C64::new(0.0, -1.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let diag = CVector::from_iterator(d, eig.eigenvalues.iter().map(|&l| cis(l)));
    let v = &eig.eigenvectors;
    UnitaryMatrix::from_trusted(v * CMatrix::from_diagonal(&diag) * v.adjoint())
}

/// Closest unitary in operator norm: the polar factor `X Y^dagger` of `M = X S Y^dagger`.
pub fn project_to_unitary(m: &CMatrix) -> Result<UnitaryMatrix> {
    if m.nrows() != m.ncols() {
        return Err(not_square(m));
    }
    let svd = m.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin <= RANK_TOL {
        return Err(Error::RankDeficient(smin));
    }
    let u = svd.u.ok_or(Error::Decomposition)?;
    let v_t = svd.v_t.ok_or(Error::Decomposition)?;
    Ok(UnitaryMatrix::from_trusted(u * v_t))
}

/// Unitary DFT, `<a|F|b> = d^{-1/2} exp(-2 pi i ab/d)`.
pub fn dft(d: usize) -> UnitaryMatrix {
    let s = 1.0 / (d as f64).sqrt();
    UnitaryMatrix::from_trusted(CMatrix::from_fn(d, d, |a, b| {
        let k = ((a * b) % d) as f64;
        cis(-2.0 * PI * k / d as f64) * s
    }))
}

/// `H^{(x) n}` for `d = 2^n`.
pub fn hadamard(d: usize) -> Result<UnitaryMatrix> {
    if !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Hadamard transform needs a power of two, got {d}")));
    }
    let s = 1.0 / (d as f64).sqrt();
    Ok(UnitaryMatrix::from_trusted(CMatrix::from_fn(d, d, |a, b| {
        let sign = if (a & b).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(sign * s, 0.0)
    })))
}

/// Permutation unitary exchanging `|0>` and `|c>` (identity when `c = 0`).
pub fn swap_to_column(d: usize, c: usize) -> UnitaryMatrix {
    let mut m = identity(d);
    if c != 0 {
        m.swap_columns(0, c);
    }
    UnitaryMatrix::from_trusted(m)
}

pub fn pauli_x() -> UnitaryMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    UnitaryMatrix::from_trusted(CMatrix::from_row_slice(2, 2, &[o, l, l, o]))
}

pub fn pauli_y() -> UnitaryMatrix {
    let o = C64::new(0.0, 0.0);
    let i = C64::i();
    UnitaryMatrix::from_trusted(CMatrix::from_row_slice(2, 2, &[o, -i, i, o]))
}

pub fn pauli_z() -> UnitaryMatrix {
    UnitaryMatrix::from_phases(&[0.0, PI])
}

/// Controlled-NOT on two qubits (control = first qubit).
pub fn cnot() -> UnitaryMatrix {
    let mut m = CMatrix::zeros(4, 4);
    let l = C64::new(1.0, 0.0);
    m[(0, 0)] = l;
    m[(1, 1)] = l;
    m[(2, 3)] = l;
    m[(3, 2)] = l;
    UnitaryMatrix::from_trusted(m)
}
