//! Gate constructions: `U₂ₓ₃`, its inverse expansion, the two-qubit
//! canonical family and SWAP.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{kron, ComplexMatrix, Dims, PureState, UNITARY_TOL};

/// A unitary on `C^A ⊗ C^B`, indexed A-major (B fastest).
///
/// Deserialization goes through [`BipartiteGate::new`], so a stored matrix
/// that is not unitary is rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateData")]
pub struct BipartiteGate {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

/// Unchecked serialized form of a [`BipartiteGate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateData {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ComplexMatrix,
}

impl TryFrom<GateData> for BipartiteGate {
    type Error = Error;

    fn try_from(g: GateData) -> Result<Self> {
        Self::new(g.dim_a, g.dim_b, g.matrix)
    }
}

impl BipartiteGate {
    /// Wraps a matrix, rejecting it unless `‖U†U − I‖_F < 1e−10`.
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = dim_a * dim_b;
        if n == 0 || matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "gate on {dim_a}x{dim_b} needs a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.unitarity_defect();
        if !(defect < UNITARY_TOL) {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b, matrix: ComplexMatrix::identity(dim_a * dim_b) }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `U†`.
    pub fn adjoint(&self) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: self.matrix.adjoint() }
    }

    /// `2 log₂ min(A, B)`, the largest possible entanglement change.
    pub fn max_entanglement_change(&self) -> f64 {
        2.0 * (self.dim_a.min(self.dim_b) as f64).log2()
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `ω = e^{2πi/3}`, from the closed forms of cos and sin at 2π/3.
pub fn omega() -> C64 {
    c(-0.5, 3f64.sqrt() / 2.0)
}

fn omega_pow(k: i64) -> C64 {
    let w = omega();
    match k.rem_euclid(3) {
        0 => c(1.0, 0.0),
        1 => w,
        _ => w.conj(),
    }
}

/// The two trine triples on a qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct Trines {
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
    pub gamma: [C64; 2],
    pub alpha_perp: [C64; 2],
    pub beta_perp: [C64; 2],
    pub gamma_perp: [C64; 2],
}

impl Trines {
    fn triple(&self, perp: bool) -> [[C64; 2]; 3] {
        if perp {
            [self.alpha_perp, self.beta_perp, self.gamma_perp]
        } else {
            [self.alpha, self.beta, self.gamma]
        }
    }
}

/// `|α⟩ = |0⟩`, `|β⟩ = −½|0⟩ + (√3/2)|1⟩`, `|γ⟩ = −½|0⟩ − (√3/2)|1⟩`
/// and the partners `|α⊥⟩ = |1⟩`, `|β⊥⟩ = −½|1⟩ − (√3/2)|0⟩`,
/// `|γ⊥⟩ = −½|1⟩ + (√3/2)|0⟩`.
pub fn trine_states() -> Trines {
    let h = 3f64.sqrt() / 2.0;
    Trines {
        alpha: [c(1.0, 0.0), c(0.0, 0.0)],
        beta: [c(-0.5, 0.0), c(h, 0.0)],
        gamma: [c(-0.5, 0.0), c(-h, 0.0)],
        alpha_perp: [c(0.0, 0.0), c(1.0, 0.0)],
        beta_perp: [c(-h, 0.0), c(-0.5, 0.0)],
        gamma_perp: [c(h, 0.0), c(-0.5, 0.0)],
    }
}

/// `|w_ij⟩ = (1/√3) Σ_k ω^{jk} |t_k⟩|k⟩` with `t` the plain trines for
/// `i = 0` and the perpendicular ones for `i = 1`. Length 6, A-major.
pub fn w_vector(i: usize, j: usize) -> Vec<C64> {
    let trines = trine_states();
    let t = trines.triple(i == 1);
    let s = 1.0 / 3f64.sqrt();
    let mut w = vec![c(0.0, 0.0); 6];
    for (k, tk) in t.iter().enumerate() {
        let phase = omega_pow((j * k) as i64) * s;
        for (a, &amp) in tk.iter().enumerate() {
            w[a * 3 + k] += amp * phase;
        }
    }
    w
}

/// Column coefficient of `|w_ij⟩⟨ij|`: `−i` for `ij = 00, 12`, else 1.
fn u2x3_coefficient(i: usize, j: usize) -> C64 {
    match (i, j) {
        (0, 0) | (1, 2) => c(0.0, -1.0),
        _ => c(1.0, 0.0),
    }
}

/// `U₂ₓ₃ = Σ_ij c_ij |w_ij⟩⟨ij|` on `C² ⊗ C³`.
pub fn build_u2x3() -> BipartiteGate {
    let mut m = ComplexMatrix::zeros(6, 6);
    for i in 0..2 {
        for j in 0..3 {
            let coef = u2x3_coefficient(i, j);
            let col: Vec<C64> = w_vector(i, j).into_iter().map(|z| z * coef).collect();
            m.set_column(i * 3 + j, &col);
        }
    }
    BipartiteGate::new(2, 3, m).expect("U2x3 construction is unitary")
}

/// `|v_j⟩ = (1/√3)(i|0⟩ + ω^{−j}|1⟩ + ω^{−2j}|2⟩)`.
pub fn v_vector(j: usize) -> [C64; 3] {
    let s = 1.0 / 3f64.sqrt();
    let j = j as i64;
    [c(0.0, s), omega_pow(-j) * s, omega_pow(-2 * j) * s]
}

/// `|v_j′⟩ = (1/√3)(|0⟩ + ω^{−j}|1⟩ + iω^{−2j}|2⟩)`.
pub fn v_prime_vector(j: usize) -> [C64; 3] {
    let s = 1.0 / 3f64.sqrt();
    let j = j as i64;
    [c(s, 0.0), omega_pow(-j) * s, omega_pow(-2 * j) * c(0.0, s)]
}

/// `U₂ₓ₃†` assembled from its expansion in the `|v_j⟩, |v_j′⟩` vectors,
/// without reference to [`build_u2x3`].
pub fn build_u2x3_dagger_oracle() -> BipartiteGate {
    let h = 3f64.sqrt() / 2.0;
    // column |ij⟩ ↦ x|0⟩_A|v_j⟩ + y|1⟩_A|v_j′⟩
    let coeffs: [[(f64, f64); 3]; 2] = [
        [(1.0, 0.0), (-0.5, -h), (-0.5, h)],
        [(0.0, 1.0), (h, -0.5), (-h, -0.5)],
    ];
    let mut m = ComplexMatrix::zeros(6, 6);
    for i in 0..2 {
        for j in 0..3 {
            let (x, y) = coeffs[i][j];
            let v = v_vector(j);
            let vp = v_prime_vector(j);
            let mut col = vec![c(0.0, 0.0); 6];
            for k in 0..3 {
                col[k] = v[k] * x;
                col[3 + k] = vp[k] * y;
            }
            m.set_column(i * 3 + j, &col);
        }
    }
    BipartiteGate::new(2, 3, m).expect("inverse expansion is unitary")
}

/// `½(|00⟩ + |11⟩)_{aA} ⊗ (|00⟩ + |22⟩)_{Bb}` on dims `(2, 2, 3, 3)`: a
/// product across the cut that `U₂ₓ₃` maps to a state with two ebits.
pub fn two_ebit_input() -> PureState {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let alice = [c(s, 0.0), z, z, c(s, 0.0)];
    let mut bob = [z; 9];
    bob[0] = c(s, 0.0);
    bob[8] = c(s, 0.0);
    PureState::product(Dims { anc_a: 2, sys_a: 2, sys_b: 3, anc_b: 3 }, &alice, &bob).expect("unit vectors")
}

/// Angles of `exp(iα σx⊗σx + iβ σy⊗σy + iγ σz⊗σz)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitCanonical {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Bell basis in `|00⟩, |01⟩, |10⟩, |11⟩` coordinates together with the
/// eigenvalues of `(σx⊗σx, σy⊗σy, σz⊗σz)` on each vector.
pub fn bell_basis() -> [([C64; 4], [f64; 3]); 4] {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    [
        ([c(s, 0.0), z, z, c(s, 0.0)], [1.0, -1.0, 1.0]),
        ([c(s, 0.0), z, z, c(-s, 0.0)], [-1.0, 1.0, 1.0]),
        ([z, c(s, 0.0), c(s, 0.0), z], [1.0, 1.0, -1.0]),
        ([z, c(s, 0.0), c(-s, 0.0), z], [-1.0, -1.0, -1.0]),
    ]
}

/// Pauli matrices `(σx, σy, σz)`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        ComplexMatrix::from_row_major(2, 2, vec![z, one, one, z]).expect("2x2"),
        ComplexMatrix::from_row_major(2, 2, vec![z, -i, i, z]).expect("2x2"),
        ComplexMatrix::from_row_major(2, 2, vec![one, z, z, -one]).expect("2x2"),
    ]
}

/// The generators `σx⊗σx, σy⊗σy, σz⊗σz`.
pub fn canonical_generators() -> [ComplexMatrix; 3] {
    let [x, y, z] = paulis();
    [kron(&x, &x), kron(&y, &y), kron(&z, &z)]
}

/// Spectral synthesis in the shared Bell eigenbasis of the three commuting
/// generators: `U = Σ_k e^{i(α x_k + β y_k + γ z_k)} |b_k⟩⟨b_k|`.
pub fn canonical_two_qubit(p: TwoQubitCanonical) -> BipartiteGate {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (vec, [x, y, z]) in bell_basis() {
        let phase = C64::from_polar(1.0, p.alpha * x + p.beta * y + p.gamma * z);
        let proj = ComplexMatrix::outer(&vec, &vec).scale(phase);
        m = &m + &proj;
    }
    BipartiteGate::new(2, 2, m).expect("spectral synthesis is unitary")
}

/// `F|ij⟩ = |ji⟩` on `C^d ⊗ C^d`.
pub fn swap_gate(d: usize) -> BipartiteGate {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    BipartiteGate::new(d, d, m).expect("permutation is unitary")
}
