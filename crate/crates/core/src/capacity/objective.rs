//! Entanglement across the `aA | Bb` cut as a smooth function of raw
//! amplitudes, with its Euclidean gradient.

use std::f64::consts::LN_2;

use num_complex::Complex64 as C64;

use crate::entropy::ZERO_EIGENVALUE;
use crate::gates::BipartiteGate;
use crate::tensor::{apply_local, jacobi, ComplexMatrix, Dims};

/// Floor applied to eigenvalues inside `log` when forming the gradient.
pub const GRADIENT_EIGEN_FLOOR: f64 = 1e-12;

/// A real function on the unit sphere of `C^n`.
///
/// Gradients are complex vectors `g` with `df = Re⟨g, dx⟩`, i.e. `g.re` is
/// the derivative along the real part and `g.im` along the imaginary part.
pub trait SphereObjective: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[C64]) -> f64;

    fn value_grad(&self, x: &[C64], grad: &mut [C64]) -> f64;
}

/// `−Tr ρ log₂ ρ` for `ρ = M M†` (or `M†M`, whichever is smaller), where `M`
/// is `x` viewed as a `rows x cols` row-major matrix. `x` need not be
/// normalized; eigenvalues are only clamped below at zero.
pub fn cut_entropy(x: &[C64], rows: usize, cols: usize, grad: Option<&mut [C64]>) -> f64 {
    debug_assert_eq!(x.len(), rows * cols);
    let left = rows <= cols;
    let n = if left { rows } else { cols };
    let mut gram = vec![C64::new(0.0, 0.0); n * n];
    if left {
        for i in 0..n {
            let ri = &x[i * cols..(i + 1) * cols];
            for j in i..n {
                let rj = &x[j * cols..(j + 1) * cols];
                let s: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                gram[i * n + j] = s;
                gram[j * n + i] = s.conj();
            }
        }
    } else {
        for r in 0..rows {
            let row = &x[r * cols..(r + 1) * cols];
            for i in 0..n {
                let ci = row[i].conj();
                for j in i..n {
                    gram[i * n + j] += ci * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                gram[i * n + j] = gram[j * n + i].conj();
            }
        }
    }

    let want = grad.is_some();
    let (values, vectors) = jacobi(&gram, n, want).expect("Jacobi converges on Gram matrices");
    let entropy = values
        .iter()
        .map(|&l| l.max(0.0))
        .filter(|&l| l >= ZERO_EIGENVALUE)
        .map(|l| -l * l.log2())
        .sum::<f64>();

    if let Some(grad) = grad {
        let v = vectors.expect("requested");
        let k = entropy_derivative(&values, &v);
        if left {
            // g = 2 K M
            for i in 0..rows {
                for c in 0..cols {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..rows {
                        s += k[i * n + j] * x[j * cols + c];
                    }
                    grad[i * cols + c] = s * 2.0;
                }
            }
        } else {
            // g = 2 M K
            for r in 0..rows {
                for j in 0..cols {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..cols {
                        s += x[r * cols + i] * k[i * n + j];
                    }
                    grad[r * cols + j] = s * 2.0;
                }
            }
        }
    }
    entropy
}

/// `K = −(log₂ ρ + I/ln 2)` from the spectral data of `ρ`.
fn entropy_derivative(values: &[f64], v: &ComplexMatrix) -> Vec<C64> {
    let n = values.len();
    let w: Vec<f64> = values.iter().map(|&l| -(l.max(GRADIENT_EIGEN_FLOOR).log2() + 1.0 / LN_2)).collect();
    let mut k = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let s: C64 = (0..n).map(|m| v[(i, m)] * v[(j, m)].conj() * w[m]).sum();
            k[i * n + j] = s;
            k[j * n + i] = s.conj();
        }
    }
    k
}

/// `ΔE(ψ) = E((I⊗U⊗I)ψ) − E(ψ)` over states of the given dims.
pub struct DeltaEntanglement<'a> {
    gate: &'a BipartiteGate,
    gate_adjoint: BipartiteGate,
    dims: Dims,
}

impl<'a> DeltaEntanglement<'a> {
    pub fn new(gate: &'a BipartiteGate, dims: Dims) -> Self {
        debug_assert_eq!((gate.dim_a(), gate.dim_b()), (dims.sys_a, dims.sys_b));
        Self { gate, gate_adjoint: gate.adjoint(), dims }
    }
}

impl SphereObjective for DeltaEntanglement<'_> {
    fn dim(&self) -> usize {
        self.dims.total()
    }

    fn value(&self, x: &[C64]) -> f64 {
        let (rows, cols) = (self.dims.alice(), self.dims.bob());
        let mut out = x.to_vec();
        apply_local(&mut out, self.dims, self.gate.matrix()).expect("dims checked");
        cut_entropy(&out, rows, cols, None) - cut_entropy(x, rows, cols, None)
    }

    fn value_grad(&self, x: &[C64], grad: &mut [C64]) -> f64 {
        let (rows, cols) = (self.dims.alice(), self.dims.bob());
        let mut out = x.to_vec();
        apply_local(&mut out, self.dims, self.gate.matrix()).expect("dims checked");
        let mut g_out = vec![C64::new(0.0, 0.0); x.len()];
        let e_out = cut_entropy(&out, rows, cols, Some(&mut g_out));
        // pull back through the unitary: ∇_ψ E(Wψ) = W† ∇E(Wψ)
        apply_local(&mut g_out, self.dims, self.gate_adjoint.matrix()).expect("dims checked");
        let e_in = cut_entropy(x, rows, cols, Some(grad));
        for (g, go) in grad.iter_mut().zip(&g_out) {
            *g = go - *g;
        }
        e_out - e_in
    }
}

/// Output entanglement for inputs `|Φ⟩_{aA} ⊗ |Ψ⟩_{Bb}` with `a = A`, `b = B`
/// and `|Φ⟩` maximally entangled; the variable is `|Ψ⟩`.
pub struct ProductAnsatz<'a> {
    gate: &'a BipartiteGate,
    gate_adjoint: BipartiteGate,
    dims: Dims,
    alice: Vec<C64>,
}

impl<'a> ProductAnsatz<'a> {
    pub fn new(gate: &'a BipartiteGate) -> Self {
        let (a, b) = (gate.dim_a(), gate.dim_b());
        let dims = Dims { anc_a: a, sys_a: a, sys_b: b, anc_b: b };
        Self { gate, gate_adjoint: gate.adjoint(), dims, alice: maximally_entangled(a) }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Full four-party amplitudes for a Bob vector.
    pub fn embed(&self, bob: &[C64]) -> Vec<C64> {
        crate::tensor::kron_vec(&self.alice, bob)
    }
}

impl SphereObjective for ProductAnsatz<'_> {
    fn dim(&self) -> usize {
        self.dims.bob()
    }

    fn value(&self, x: &[C64]) -> f64 {
        let mut out = self.embed(x);
        apply_local(&mut out, self.dims, self.gate.matrix()).expect("dims checked");
        cut_entropy(&out, self.dims.alice(), self.dims.bob(), None)
    }

    fn value_grad(&self, x: &[C64], grad: &mut [C64]) -> f64 {
        let (rows, cols) = (self.dims.alice(), self.dims.bob());
        let mut out = self.embed(x);
        apply_local(&mut out, self.dims, self.gate.matrix()).expect("dims checked");
        let mut g_full = vec![C64::new(0.0, 0.0); out.len()];
        let e = cut_entropy(&out, rows, cols, Some(&mut g_full));
        apply_local(&mut g_full, self.dims, self.gate_adjoint.matrix()).expect("dims checked");
        // ψ = Φ ⊗ x is linear in x: ∇_x = (⟨Φ| ⊗ I) ∇_ψ
        for (k, g) in grad.iter_mut().enumerate() {
            *g = (0..rows).map(|m| self.alice[m].conj() * g_full[m * cols + k]).sum();
        }
        // the input is a product across the cut, so E(in) = 0 identically
        e
    }
}

/// `(1/√d) Σ_j |j⟩|j⟩`.
pub fn maximally_entangled(d: usize) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        v[j * d + j] = C64::new(s, 0.0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entanglement;
    use crate::gates::build_u2x3;
    use crate::rng::{stream, Purpose};
    use crate::tensor::PureState;

    #[test]
    fn cut_entropy_matches_partial_trace_route() {
        let mut rng = stream(1, Purpose::TestData, 0);
        for dims in [Dims::new(2, 2, 3, 3).unwrap(), Dims::new(3, 3, 1, 1).unwrap(), Dims::new(1, 2, 3, 2).unwrap()] {
            let psi = PureState::random(dims, &mut rng);
            let e = cut_entropy(psi.amplitudes(), dims.alice(), dims.bob(), None);
            assert!((e - entanglement(&psi).unwrap().0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_matches_direct_computation() {
        let u = build_u2x3();
        let dims = Dims::new(2, 2, 3, 3).unwrap();
        let psi = PureState::random(dims, &mut stream(2, Purpose::TestData, 0));
        let obj = DeltaEntanglement::new(&u, dims);
        let direct = entanglement(&psi.apply_gate(&u).unwrap()).unwrap().0 - entanglement(&psi).unwrap().0;
        assert!((obj.value(psi.amplitudes()) - direct).abs() < 1e-12);
        let mut g = vec![C64::new(0.0, 0.0); dims.total()];
        assert!((obj.value_grad(psi.amplitudes(), &mut g) - direct).abs() < 1e-12);
    }
}
