use std::fmt;
use std::ops::BitOr;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eigen;
use super::matrix::{norm_sqr, ComplexMatrix};
use crate::error::{Error, Result};
use crate::gates::BipartiteGate;

pub const NORM_TOL: f64 = 1e-12;

/// Local dimensions `(d_a, d_A, d_B, d_b)` of a four-party state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub anc_a: usize,
    pub sys_a: usize,
    pub sys_b: usize,
    pub anc_b: usize,
}

impl Dims {
    pub fn new(anc_a: usize, sys_a: usize, sys_b: usize, anc_b: usize) -> Result<Self> {
        if anc_a == 0 || sys_a == 0 || sys_b == 0 || anc_b == 0 {
            return Err(Error::OutOfRange("all local dimensions must be positive".into()));
        }
        Ok(Self { anc_a, sys_a, sys_b, anc_b })
    }

    /// Dimensions in `(a, A, B, b)` order.
    pub fn as_array(&self) -> [usize; 4] {
        [self.anc_a, self.sys_a, self.sys_b, self.anc_b]
    }

    pub fn total(&self) -> usize {
        self.anc_a * self.sys_a * self.sys_b * self.anc_b
    }

    /// Dimension of Alice's side `a ⊗ A`.
    pub fn alice(&self) -> usize {
        self.anc_a * self.sys_a
    }

    /// Dimension of Bob's side `B ⊗ b`.
    pub fn bob(&self) -> usize {
        self.sys_b * self.anc_b
    }

    pub fn dim_of(&self, set: Subsystems) -> usize {
        self.as_array().iter().enumerate().filter(|(i, _)| set.contains_index(*i)).map(|(_, d)| d).product()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.anc_a, self.sys_a, self.sys_b, self.anc_b)
    }
}

/// A subset of the four parties `{a, A, B, b}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Subsystems(u8);

impl Subsystems {
    pub const NONE: Self = Self(0);
    /// Alice's ancilla `a`.
    pub const ANC_A: Self = Self(0b0001);
    /// Alice's system `A`.
    pub const SYS_A: Self = Self(0b0010);
    /// Bob's system `B`.
    pub const SYS_B: Self = Self(0b0100);
    /// Bob's ancilla `b`.
    pub const ANC_B: Self = Self(0b1000);
    pub const ALL: Self = Self(0b1111);
    pub const ALICE: Self = Self(0b0011);
    pub const BOB: Self = Self(0b1100);

    pub fn contains_index(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn contains(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 0b1111)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Every nonempty proper subset, in bit order.
    pub fn proper_subsets() -> impl Iterator<Item = Self> {
        (1u8..15).map(Self)
    }
}

impl BitOr for Subsystems {
    type Output = Self;

    fn bitor(self, rhs: Self) -> Self {
        Self(self.0 | rhs.0)
    }
}

/// Normalized pure state on `a ⊗ A ⊗ B ⊗ b`, `b` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    dims: Dims,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes, checking length and normalization.
    pub fn new(dims: Dims, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dims}",
                amplitudes.len()
            )));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(dims: Dims, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::new(dims, amplitudes)
    }

    /// Unit vector with i.i.d. complex Gaussian amplitudes (uniform on the sphere).
    pub fn random<R: Rng + ?Sized>(dims: Dims, rng: &mut R) -> Self {
        let amps = gaussian_vector(dims.total(), rng);
        Self::normalized(dims, amps).expect("gaussian vector is nonzero")
    }

    /// `|x⟩_{aA} ⊗ |y⟩_{Bb}` for an Alice vector of length `d_a·d_A` and a Bob vector of length `d_B·d_b`.
    pub fn product(dims: Dims, alice: &[C64], bob: &[C64]) -> Result<Self> {
        if alice.len() != dims.alice() || bob.len() != dims.bob() {
            return Err(Error::DimensionMismatch(format!(
                "factor lengths {}, {} do not fit dims {dims}",
                alice.len(),
                bob.len()
            )));
        }
        Self::normalized(dims, super::matrix::kron_vec(alice, bob))
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Entry-wise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self { dims: self.dims, amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect() }
    }

    /// `(I_a ⊗ U ⊗ I_b)|ψ⟩`, acting on the `(A, B)` index pair without
    /// forming the full operator.
    pub fn apply_gate(&self, gate: &BipartiteGate) -> Result<Self> {
        let mut out = self.amplitudes.clone();
        apply_local(&mut out, self.dims, gate.matrix())?;
        Ok(Self { dims: self.dims, amplitudes: out })
    }

    /// Applies an operator on `a ⊗ A` (if `alice`) or on `B ⊗ b`.
    pub fn apply_side(&self, op: &ComplexMatrix, alice: bool) -> Result<Self> {
        let (rows, cols) = (self.dims.alice(), self.dims.bob());
        let want = if alice { rows } else { cols };
        if op.rows() != want || op.cols() != want {
            return Err(Error::DimensionMismatch(format!(
                "side operator is {}x{}, side dimension is {want}",
                op.rows(),
                op.cols()
            )));
        }
        let psi = ComplexMatrix::from_row_major(rows, cols, self.amplitudes.clone())?;
        let out = if alice { op * &psi } else { &psi * &op.transpose() };
        Ok(Self { dims: self.dims, amplitudes: out.into_vec() })
    }

    /// Reduced density matrix on `keep`, factors in `(a, A, B, b)` order.
    pub fn partial_trace(&self, keep: Subsystems) -> Result<DensityMatrix> {
        if keep.is_empty() || keep == Subsystems::ALL {
            return Err(Error::InvalidSubsystems(format!(
                "keep set must be a nonempty proper subset, got {:04b}",
                keep.bits()
            )));
        }
        let m = self.bipartition(keep);
        let rho = &m * &m.adjoint();
        Ok(DensityMatrix::from_raw(rho.hermitian_part()))
    }

    /// Amplitudes arranged as a `dim(keep) x dim(rest)` matrix.
    pub(crate) fn bipartition(&self, keep: Subsystems) -> ComplexMatrix {
        let d = self.dims.as_array();
        let rows = self.dims.dim_of(keep);
        let cols = self.dims.total() / rows;
        let mut m = ComplexMatrix::zeros(rows, cols);
        let mut digits = [0usize; 4];
        for (flat, &amp) in self.amplitudes.iter().enumerate() {
            let mut rem = flat;
            for k in (0..4).rev() {
                digits[k] = rem % d[k];
                rem /= d[k];
            }
            let (mut r, mut c) = (0, 0);
            for k in 0..4 {
                if keep.contains_index(k) {
                    r = r * d[k] + digits[k];
                } else {
                    c = c * d[k] + digits[k];
                }
            }
            m[(r, c)] = amp;
        }
        m
    }
}

/// In-place `(I_a ⊗ U ⊗ I_b)` on a raw amplitude buffer.
pub(crate) fn apply_local(psi: &mut [C64], dims: Dims, u: &ComplexMatrix) -> Result<()> {
    let ab = dims.sys_a * dims.sys_b;
    if u.rows() != ab || u.cols() != ab {
        return Err(Error::DimensionMismatch(format!(
            "gate is {}x{}, state has A·B = {ab}",
            u.rows(),
            u.cols()
        )));
    }
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch("amplitude buffer length".into()));
    }
    let db = dims.anc_b;
    let block = ab * db;
    let mut col = vec![C64::new(0.0, 0.0); ab];
    let mut tmp = vec![C64::new(0.0, 0.0); ab];
    for a in 0..dims.anc_a {
        let base = a * block;
        for b in 0..db {
            for (k, slot) in col.iter_mut().enumerate() {
                *slot = psi[base + k * db + b];
            }
            for (i, t) in tmp.iter_mut().enumerate() {
                *t = u.row(i).iter().zip(&col).map(|(x, y)| x * y).sum();
            }
            for (k, &t) in tmp.iter().enumerate() {
                psi[base + k * db + b] = t;
            }
        }
    }
    Ok(())
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const EIG_TOL: f64 = 1e-10;

    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        let dev = (tr - C64::new(1.0, 0.0)).norm();
        if dev > Self::TRACE_TOL {
            return Err(Error::BadTrace(dev));
        }
        let ev = eigen::eigvalsh(&matrix)?;
        if let Some(&min) = ev.last() {
            if min < -Self::EIG_TOL {
                return Err(Error::Invariant(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { matrix })
    }

    /// Pure-state projector `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let n = norm_sqr(psi);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { matrix: ComplexMatrix::outer(psi, psi).hermitian_part() })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)) }
    }

    /// Unchecked constructor for matrices that are density matrices by construction.
    pub(crate) fn from_raw(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues, descending.
    pub fn eigvals(&self) -> Result<Vec<f64>> {
        eigen::eigvalsh(&self.matrix)
    }
}
