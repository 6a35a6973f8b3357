//! Haar-random unitaries and statistics of random gates.

use std::f64::consts::LN_2;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{entangling_power, maximally_entangled, OptimizerConfig};
use crate::entropy::{entanglement, Ebits};
use crate::error::{Error, Result};
use crate::gates::{swap_gate, BipartiteGate};
use crate::rng::{derive_seed, stream, Purpose};
use crate::tensor::{gaussian_vector, ComplexMatrix, DensityMatrix, Dims, PureState, Subsystems};

/// Householder QR of a square matrix. Returns `Q` and the diagonal of `R`.
fn householder_qr(mut a: ComplexMatrix) -> (ComplexMatrix, Vec<C64>) {
    let n = a.rows();
    let mut q = ComplexMatrix::identity(n);
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let x: Vec<C64> = (k..n).map(|i| a[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        diag.push(alpha);
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        // A ← (I − 2vv†) A on rows k.., Q ← Q (I − 2vv†) on columns k..
        for j in k..n {
            let s: C64 = (k..n).map(|i| v[i - k].conj() * a[(i, j)]).sum::<C64>() * 2.0;
            for i in k..n {
                a[(i, j)] -= v[i - k] * s;
            }
        }
        for i in 0..n {
            let s: C64 = (k..n).map(|j| q[(i, j)] * v[j - k]).sum::<C64>() * 2.0;
            for j in k..n {
                q[(i, j)] -= s * v[j - k].conj();
            }
        }
    }
    (q, diag)
}

/// A `d x d` unitary drawn from the Haar measure.
///
/// QR of a matrix of independent standard complex Gaussians, with each
/// column of `Q` rescaled by the phase of the matching diagonal entry of `R`
/// so that the factorization is unique and the result exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "haar_unitary needs d >= 1");
    let z = ComplexMatrix::from_row_major(d, d, gaussian_vector(d * d, rng)).expect("d*d entries");
    let (mut q, diag) = householder_qr(z);
    for (j, r) in diag.iter().enumerate() {
        let ph = if r.norm() > 0.0 { r / r.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// A Haar-random gate on `C^A ⊗ C^B`.
pub fn haar_gate<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> BipartiteGate {
    BipartiteGate::new(dim_a, dim_b, haar_unitary(dim_a * dim_b, rng)).expect("QR factor is unitary")
}

/// `U|Φ_A⟩_{aA}|Φ_B⟩_{Bb}` with `a = A`, `b = B`.
pub fn canonical_output(gate: &BipartiteGate) -> PureState {
    let (a, b) = (gate.dim_a(), gate.dim_b());
    let dims = Dims { anc_a: a, sys_a: a, sys_b: b, anc_b: b };
    let input = PureState::product(dims, &maximally_entangled(a), &maximally_entangled(b)).expect("unit vectors");
    input.apply_gate(gate).expect("dims match the gate")
}

/// `Tr(ρ_aA)²` of [`canonical_output`].
pub fn purity_after_gate(gate: &BipartiteGate) -> f64 {
    canonical_output(gate).partial_trace(Subsystems::ALICE).expect("proper subset").purity()
}

/// Entanglement of [`canonical_output`].
pub fn output_entanglement(gate: &BipartiteGate) -> Ebits {
    entanglement(&canonical_output(gate)).expect("valid state")
}

/// `(A² + B² − 2) / (A²B² − 1)`, the Haar average of [`purity_after_gate`].
pub fn predicted_purity(dim_a: usize, dim_b: usize) -> f64 {
    let (a2, b2) = ((dim_a * dim_a) as f64, (dim_b * dim_b) as f64);
    (a2 + b2 - 2.0) / (a2 * b2 - 1.0)
}

/// Monte Carlo estimate of the mean output purity next to its exact value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub dims: (usize, usize),
    pub samples: usize,
    pub mean_purity: f64,
    pub predicted_purity: f64,
    pub std_error: f64,
}

impl MomentReport {
    /// `(mean − prediction) / std_error`.
    pub fn z_score(&self) -> f64 {
        (self.mean_purity - self.predicted_purity) / self.std_error
    }
}

fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Averages [`purity_after_gate`] over `samples` Haar gates; gate `i` comes
/// from the stream `(seed, Purity, i)`.
pub fn mean_purity_experiment(dim_a: usize, dim_b: usize, samples: usize, seed: u64) -> Result<MomentReport> {
    if samples < 100 {
        return Err(Error::InvalidConfig(format!("need at least 100 samples, got {samples}")));
    }
    Dims::new(dim_a, dim_a, dim_b, dim_b)?;
    let purities: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| purity_after_gate(&haar_gate(dim_a, dim_b, &mut stream(seed, Purpose::Purity, i as u64))))
        .collect();
    let (mean_purity, std_error) = mean_and_std_error(&purities);
    Ok(MomentReport {
        dims: (dim_a, dim_b),
        samples,
        mean_purity,
        predicted_purity: predicted_purity(dim_a, dim_b),
        std_error,
    })
}

/// `2 log₂ A − (1/ln 2)(A²/B²)`, a lower bound on the Haar average of
/// [`output_entanglement`]. Requires `A ≤ B`.
pub fn expected_entanglement_bound(dim_a: usize, dim_b: usize) -> Result<Ebits> {
    if dim_a == 0 || dim_a > dim_b {
        return Err(Error::OutOfRange(format!("bound needs 0 < A <= B, got A = {dim_a}, B = {dim_b}")));
    }
    let (a, b) = (dim_a as f64, dim_b as f64);
    Ok(Ebits(2.0 * a.log2() - (a * a) / (b * b) / LN_2))
}

/// Capacity estimates for one random gate.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    pub index: usize,
    pub e_up: Ebits,
    pub e_down: Ebits,
}

impl ScatterRecord {
    pub fn gap(&self) -> f64 {
        self.e_up.0 - self.e_down.0
    }
}

/// Aggregate statistics of a scatter run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub gates: usize,
    /// Largest `e_up − e_down`.
    pub max_gap: f64,
    /// Largest `|e_up − e_down|`.
    pub max_abs_gap: f64,
    pub mean_up: f64,
    pub mean_down: f64,
    pub std_error_up: f64,
    pub std_error_down: f64,
}

impl ScatterSummary {
    pub fn from_records(records: &[ScatterRecord]) -> Self {
        let ups: Vec<f64> = records.iter().map(|r| r.e_up.0).collect();
        let downs: Vec<f64> = records.iter().map(|r| r.e_down.0).collect();
        let (mean_up, std_error_up) = mean_and_std_error(&ups);
        let (mean_down, std_error_down) = mean_and_std_error(&downs);
        Self {
            gates: records.len(),
            max_gap: records.iter().map(ScatterRecord::gap).fold(f64::NEG_INFINITY, f64::max),
            max_abs_gap: records.iter().map(|r| r.gap().abs()).fold(0.0, f64::max),
            mean_up,
            mean_down,
            std_error_up,
            std_error_down,
        }
    }
}

/// Gate `i` of a scatter run with the given seed.
pub fn scatter_gate(dim_a: usize, dim_b: usize, seed: u64, i: usize) -> BipartiteGate {
    haar_gate(dim_a, dim_b, &mut stream(seed, Purpose::HaarGate, i as u64))
}

/// Estimates `E↑` and `E↓` for `n_gates` Haar gates with ancillas `(A, B)`.
/// Each estimate runs `cfg` with its seed replaced by one derived from
/// `(seed, gate index)`.
pub fn scatter_experiment(
    dim_a: usize,
    dim_b: usize,
    n_gates: usize,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<Vec<ScatterRecord>> {
    cfg.validate()?;
    Dims::new(dim_a, dim_a, dim_b, dim_b)?;
    (0..n_gates)
        .into_par_iter()
        .map(|i| {
            let gate = scatter_gate(dim_a, dim_b, seed, i);
            let up_cfg = cfg.with_seed(derive_seed(seed, Purpose::ScatterUp, i as u64));
            let down_cfg = cfg.with_seed(derive_seed(seed, Purpose::ScatterDown, i as u64));
            let e_up = entangling_power(&gate, (dim_a, dim_b), &up_cfg)?.value;
            let e_down = entangling_power(&gate.adjoint(), (dim_a, dim_b), &down_cfg)?.value;
            Ok(ScatterRecord { index: i, e_up, e_down })
        })
        .collect()
}

/// `(I + F)/2` on `C^d ⊗ C^d`.
pub fn symmetric_projector(d: usize) -> ComplexMatrix {
    let f = swap_gate(d);
    (&ComplexMatrix::identity(d * d) + f.matrix()).scale(C64::new(0.5, 0.0))
}

/// `(I − F)/2` on `C^d ⊗ C^d`.
pub fn antisymmetric_projector(d: usize) -> ComplexMatrix {
    let f = swap_gate(d);
    (&ComplexMatrix::identity(d * d) - f.matrix()).scale(C64::new(0.5, 0.0))
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.rows();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)] * b[(j, i)]).sum()
}

/// Haar average of `(U⊗U) ρ (U⊗U)†` for `ρ` on `C^d ⊗ C^d`:
/// `σ Tr(ρ Π_sym) + α Tr(ρ Π_anti)` with `σ = 2Π_sym/(d(d+1))` and
/// `α = 2Π_anti/(d(d−1))`.
pub fn twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.dim();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionMismatch(format!("twirl needs dimension d², got {n}")));
    }
    let sym = symmetric_projector(d);
    let df = d as f64;
    let p_sym = trace_product(rho.matrix(), &sym).re;
    let mut out = sym.scale(C64::new(2.0 * p_sym / (df * (df + 1.0)), 0.0));
    if d > 1 {
        let anti = antisymmetric_projector(d);
        let p_anti = trace_product(rho.matrix(), &anti).re;
        out = &out + &anti.scale(C64::new(2.0 * p_anti / (df * (df - 1.0)), 0.0));
    }
    DensityMatrix::new(out.hermitian_part())
}

/// `(U⊗U) ρ (U⊗U)†` for a single unitary `U`.
pub fn conjugate_by_square(rho: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let uu = crate::tensor::kron(u, u);
    let left = uu.matmul(rho).expect("square dims agree");
    left.matmul(&uu.adjoint()).expect("square dims agree")
}

/// A random density matrix of rank `n`: `G G† / Tr(G G†)` for Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_row_major(n, n, gaussian_vector(n * n, rng)).expect("n*n entries");
    let m = g.matmul(&g.adjoint()).expect("square");
    let t = m.trace().re;
    DensityMatrix::new(m.scale(C64::new(1.0 / t, 0.0)).hermitian_part()).expect("positive, unit trace")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::build_u2x3;

    #[test]
    fn haar_draws_are_unitary() {
        let mut rng = stream(3, Purpose::TestData, 0);
        for d in 1..=7 {
            for _ in 0..50 {
                assert!(haar_unitary(d, &mut rng).unitarity_defect() < 1e-10);
            }
        }
        let u = haar_unitary(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn purity_reference_values() {
        assert!((purity_after_gate(&BipartiteGate::identity(2, 2)) - 1.0).abs() < 1e-12);
        assert!((purity_after_gate(&swap_gate(2)) - 0.25).abs() < 1e-12);
        let p = purity_after_gate(&build_u2x3());
        assert!(p >= 0.25 - 1e-12 && p <= 1.0);
    }

    #[test]
    fn predicted_purity_values() {
        assert!((predicted_purity(2, 3) - 11.0 / 35.0).abs() < 1e-15);
        assert!((predicted_purity(2, 2) - 0.4).abs() < 1e-15);
        assert!((predicted_purity(3, 3) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn entanglement_bound_values() {
        assert!((expected_entanglement_bound(2, 3).unwrap().0 - (2.0 - 4.0 / 9.0 / LN_2)).abs() < 1e-15);
        assert!((expected_entanglement_bound(2, 3).unwrap().0 - 1.3587).abs() < 2e-4);
        assert!((expected_entanglement_bound(2, 100).unwrap().0 - 1.99942).abs() < 1e-5);
        assert!((expected_entanglement_bound(3, 3).unwrap().0 - (2.0 * 3f64.log2() - 1.0 / LN_2)).abs() < 1e-15);
        assert!(expected_entanglement_bound(3, 2).is_err());
    }

    #[test]
    fn small_sample_counts_rejected() {
        assert!(matches!(mean_purity_experiment(2, 2, 99, 1), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn projector_traces() {
        for d in 1..=4 {
            let n = (d * d) as f64;
            assert!((symmetric_projector(d).trace().re - (n + d as f64) / 2.0).abs() < 1e-12);
            assert!((antisymmetric_projector(d).trace().re - (n - d as f64) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_is_idempotent_and_rejects_bad_dims() {
        let mut rng = stream(4, Purpose::TestData, 0);
        for n in [1, 4, 9, 16] {
            let rho = random_density(n, &mut rng);
            let t = twirl(&rho).unwrap();
            let tt = twirl(&t).unwrap();
            assert!(t.matrix().max_abs_diff(tt.matrix()) < 1e-10);
        }
        assert!(matches!(twirl(&DensityMatrix::maximally_mixed(6)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn scatter_summary_of_known_records() {
        let recs = [
            ScatterRecord { index: 0, e_up: Ebits(1.9), e_down: Ebits(1.8) },
            ScatterRecord { index: 1, e_up: Ebits(1.5), e_down: Ebits(1.7) },
        ];
        let s = ScatterSummary::from_records(&recs);
        assert!((s.max_gap - 0.1).abs() < 1e-12);
        assert!((s.max_abs_gap - 0.2).abs() < 1e-12);
        assert!((s.mean_up - 1.7).abs() < 1e-12);
    }
}
