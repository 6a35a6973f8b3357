//! Numerical certificate that `U₂ₓ₃` cannot remove two ebits.
//!
//! A would-be maximal disentangler input is `|Φ⟩_{aA} ⊗ Σ_k |k⟩_B|τ_k⟩_b`
//! with `|Φ⟩` a Bell pair. Applying `U₂ₓ₃†` gives `½ Σ_ij |i⟩_a|j⟩_A|Φ_ij⟩_{Bb}`,
//! and the output has two ebits exactly when the four `Φ_ij` are
//! orthonormal. This module builds the `Φ_ij`, reproduces the chain of
//! constraints that orthonormality forces on the `τ_k`, and searches for the
//! smallest achievable distance of their Gram matrix from the identity.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::capacity::{best_index, multi_start, OptimizerConfig, SphereObjective};
use crate::error::{Error, Result};
use crate::gates::{build_u2x3, omega, v_prime_vector, v_vector};
use crate::rng::Purpose;
use crate::tensor::{inner, kron_vec, norm_sqr, ComplexMatrix, Dims, PureState};

/// Allowed deviation of `Σ ⟨τ_k|τ_k⟩` from 1.
pub const TAU_NORM_TOL: f64 = 1e-12;

/// Tolerance for the exact relations in [`forced_constraint_check`].
pub const FORCED_TOL: f64 = 1e-10;

/// Threshold on the minimum residual for a passing certificate.
pub const RESIDUAL_FLOOR: f64 = 0.05;

/// Bob's ancilla components `|τ_0⟩, |τ_1⟩, |τ_2⟩`, each in `C³`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauTriple {
    pub tau0: [C64; 3],
    pub tau1: [C64; 3],
    pub tau2: [C64; 3],
}

impl TauTriple {
    /// Checked constructor; the squared norms must sum to 1.
    pub fn new(tau0: [C64; 3], tau1: [C64; 3], tau2: [C64; 3]) -> Result<Self> {
        let t = Self { tau0, tau1, tau2 };
        t.check_normalized()?;
        Ok(t)
    }

    /// Reads `(τ_0, τ_1, τ_2)` from the 9 amplitudes of `Σ_k |k⟩_B|τ_k⟩_b`
    /// and rescales them to unit total norm.
    pub fn from_bob_state(x: &[C64]) -> Result<Self> {
        if x.len() != 9 {
            return Err(Error::DimensionMismatch(format!("expected 9 amplitudes, got {}", x.len())));
        }
        let n = norm_sqr(x).sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let part = |k: usize| [x[3 * k] / n, x[3 * k + 1] / n, x[3 * k + 2] / n];
        Ok(Self { tau0: part(0), tau1: part(1), tau2: part(2) })
    }

    /// `Σ_k |k⟩_B|τ_k⟩_b`, B-major.
    pub fn bob_state(&self) -> Vec<C64> {
        self.taus().iter().flat_map(|t| t.iter().copied()).collect()
    }

    pub fn taus(&self) -> [[C64; 3]; 3] {
        [self.tau0, self.tau1, self.tau2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.taus().iter().map(|t| norm_sqr(t)).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let dev = (self.norm_sqr() - 1.0).abs();
        if dev > TAU_NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    /// `τ_k ↦ V τ_k` for a `3 x 3` matrix `V`.
    pub fn rotate_ancilla(&self, v: &ComplexMatrix) -> Result<Self> {
        let apply = |t: &[C64; 3]| -> Result<[C64; 3]> {
            let w = v.matvec(t)?;
            Ok([w[0], w[1], w[2]])
        };
        Ok(Self { tau0: apply(&self.tau0)?, tau1: apply(&self.tau1)?, tau2: apply(&self.tau2)? })
    }

    pub fn scale(&self, s: C64) -> Self {
        let f = |t: [C64; 3]| t.map(|z| z * s);
        Self { tau0: f(self.tau0), tau1: f(self.tau1), tau2: f(self.tau2) }
    }
}

/// Labels of the four output states in the order used everywhere below.
pub const PHI_LABELS: [&str; 4] = ["00", "01", "10", "11"];

/// Coefficients of `τ_k` in `Φ_ij / √2`, together with whether the Bob
/// factor is `|v_k⟩` (false) or `|v_k′⟩` (true).
fn phi_coefficients() -> [([f64; 3], bool); 4] {
    let h = 3f64.sqrt() / 2.0;
    [
        ([1.0, -0.5, -0.5], false),
        ([0.0, -h, h], true),
        ([0.0, h, -h], false),
        ([1.0, -0.5, -0.5], true),
    ]
}

/// Linear maps `M_ij` with `Φ_ij = M_ij · (Σ_k |k⟩|τ_k⟩)`, each `9 x 9`.
fn phi_maps() -> [ComplexMatrix; 4] {
    phi_coefficients().map(|(coef, prime)| {
        let mut m = ComplexMatrix::zeros(9, 9);
        for k in 0..3 {
            let v = if prime { v_prime_vector(k) } else { v_vector(k) };
            let s = coef[k] * std::f64::consts::SQRT_2;
            // |v_k⟩_B |τ_k⟩_b: row (B', b), column (k, b)
            for (bp, vb) in v.iter().enumerate() {
                for b in 0..3 {
                    m[(bp * 3 + b, k * 3 + b)] += vb * s;
                }
            }
        }
        m
    })
}

/// `Φ_00, Φ_01, Φ_10, Φ_11` in `B ⊗ b` (B-major), e.g.
/// `Φ_00 = √2 [|v_0⟩|τ_0⟩ − ½|v_1⟩|τ_1⟩ − ½|v_2⟩|τ_2⟩]`.
pub fn build_phi_states(tau: &TauTriple) -> [Vec<C64>; 4] {
    let taus = tau.taus();
    phi_coefficients().map(|(coef, prime)| {
        let mut phi = vec![C64::new(0.0, 0.0); 9];
        for k in 0..3 {
            let v = if prime { v_prime_vector(k) } else { v_vector(k) };
            let term = kron_vec(&v, &taus[k]);
            for (p, t) in phi.iter_mut().zip(term) {
                *p += t * (coef[k] * std::f64::consts::SQRT_2);
            }
        }
        phi
    })
}

/// The input `(1/√2)(|00⟩ + |11⟩)_{aA} ⊗ Σ_k |k⟩_B|τ_k⟩_b`.
pub fn disentangler_input(tau: &TauTriple) -> Result<PureState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = [C64::new(s, 0.0), z, z, C64::new(s, 0.0)];
    PureState::product(Dims::new(2, 2, 3, 3)?, &bell, &tau.bob_state())
}

/// Largest entry-wise deviation between `½ Σ_ij |i⟩_a|j⟩_A|Φ_ij⟩` and
/// `U₂ₓ₃†` applied to [`disentangler_input`].
pub fn reassembly_deviation(tau: &TauTriple) -> Result<f64> {
    let direct = disentangler_input(tau)?.apply_gate(&build_u2x3().adjoint())?;
    let phis = build_phi_states(tau);
    let mut dev: f64 = 0.0;
    for (p, phi) in phis.iter().enumerate() {
        for (m, z) in phi.iter().enumerate() {
            dev = dev.max((z * 0.5 - direct.amplitudes()[p * 9 + m]).norm());
        }
    }
    Ok(dev)
}

/// `G_pq = ⟨Φ_p|Φ_q⟩` for the four states.
pub fn gram_matrix(phis: &[Vec<C64>; 4]) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |p, q| inner(&phis[p], &phis[q]))
}

/// Gram matrix of the `Φ_ij` and its Frobenius distance from `I₄`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramResidual {
    pub residual: f64,
    pub tau: TauTriple,
    pub gram: ComplexMatrix,
}

pub fn gram_residual(tau: &TauTriple) -> Result<GramResidual> {
    tau.check_normalized()?;
    let gram = gram_matrix(&build_phi_states(tau));
    let residual = (&gram - &ComplexMatrix::identity(4)).frobenius_norm();
    Ok(GramResidual { residual, tau: *tau, gram })
}

/// One row of the forced-constraint table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub name: String,
    pub expected: C64,
    pub found: C64,
    pub deviation: f64,
}

impl ConstraintRow {
    fn new(name: impl Into<String>, expected: C64, found: C64) -> Self {
        Self { name: name.into(), expected, found, deviation: (expected - found).norm() }
    }

    pub fn holds(&self) -> bool {
        self.deviation <= FORCED_TOL
    }
}

/// The witness triple and the relations checked on it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForcedConstraintReport {
    pub tau: TauTriple,
    pub rows: Vec<ConstraintRow>,
    /// `⟨Φ_00|Φ_11⟩`, the entry that cannot vanish.
    pub phi00_phi11: C64,
}

/// A triple that satisfies every relation orthonormality forces:
/// `τ_1 = |1⟩/√3`, `τ_2 = ωτ_1`, and `τ_0 = c τ_1/‖τ_1‖ + d|0⟩` with `c`
/// fixed by `⟨τ_0|τ_1⟩ = −ω/6` and `d ≥ 0` by `‖τ_0‖² = 1/3`.
pub fn forced_witness() -> TauTriple {
    let z = C64::new(0.0, 0.0);
    let w = omega();
    let n1 = 1.0 / 3f64.sqrt();
    let tau1 = [z, C64::new(n1, 0.0), z];
    let tau2 = tau1.map(|t| t * w);
    // ⟨τ_0|τ_1⟩ = conj(c)·‖τ_1‖
    let c = (-w / 6.0).conj() / n1;
    let d = (1.0 / 3.0 - c.norm_sqr()).max(0.0).sqrt();
    let tau0 = [C64::new(d, 0.0), c, z];
    TauTriple { tau0, tau1, tau2 }
}

/// Rebuilds the constraint chain on [`forced_witness`] and verifies it.
///
/// Fails with [`Error::Invariant`] if any relation is off by more than
/// [`FORCED_TOL`], which would mean the construction itself is wrong.
pub fn forced_constraint_check() -> Result<ForcedConstraintReport> {
    let tau = forced_witness();
    tau.check_normalized()?;
    let w = omega();
    let third = C64::new(1.0 / 3.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let [t0, t1, t2] = tau.taus();
    let gram = gram_matrix(&build_phi_states(&tau));

    let mut rows = vec![
        ConstraintRow::new("<tau0|tau0>", third, inner(&t0, &t0)),
        ConstraintRow::new("<tau1|tau1>", third, inner(&t1, &t1)),
        ConstraintRow::new("<tau2|tau2>", third, inner(&t2, &t2)),
        ConstraintRow::new("<tau1|tau2>", w / 3.0, inner(&t1, &t2)),
        ConstraintRow::new("<tau0|tau1>", -w / 6.0, inner(&t0, &t1)),
        ConstraintRow::new("<tau0|tau2>", -(w * w) / 6.0, inner(&t0, &t2)),
    ];
    for (p, label) in PHI_LABELS.iter().enumerate() {
        rows.push(ConstraintRow::new(format!("<Phi{label}|Phi{label}>"), one, gram[(p, p)]));
    }
    rows.push(ConstraintRow::new("<Phi00|Phi10>", zero, gram[(0, 2)]));
    rows.push(ConstraintRow::new("<Phi01|Phi10>", zero, gram[(1, 2)]));
    rows.push(ConstraintRow::new("<Phi00|Phi01>", zero, gram[(0, 1)]));
    let phi00_phi11 = gram[(0, 3)];
    rows.push(ConstraintRow::new("<Phi00|Phi11>", C64::new(2.0 / 3.0, 0.0), phi00_phi11));

    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.holds())
        .map(|r| format!("{} = {} (expected {}, deviation {:.3e})", r.name, r.found, r.expected, r.deviation))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Invariant(format!("forced constraints not reproduced: {}", failed.join("; "))));
    }
    Ok(ForcedConstraintReport { tau, rows, phi00_phi11 })
}

/// `−‖G − I‖²_F` as a function of the 9 amplitudes of `Σ_k |k⟩|τ_k⟩`.
pub struct NegativeGramDistance {
    maps: [ComplexMatrix; 4],
    adjoints: [ComplexMatrix; 4],
}

impl NegativeGramDistance {
    pub fn new() -> Self {
        let maps = phi_maps();
        let adjoints = [0, 1, 2, 3].map(|p| maps[p].adjoint());
        Self { maps, adjoints }
    }

    fn phis(&self, x: &[C64]) -> [Vec<C64>; 4] {
        [0, 1, 2, 3].map(|p| self.maps[p].matvec(x).expect("9 amplitudes"))
    }
}

impl Default for NegativeGramDistance {
    fn default() -> Self {
        Self::new()
    }
}

impl SphereObjective for NegativeGramDistance {
    fn dim(&self) -> usize {
        9
    }

    fn value(&self, x: &[C64]) -> f64 {
        let g = gram_matrix(&self.phis(x));
        -(&g - &ComplexMatrix::identity(4)).frobenius_norm().powi(2)
    }

    fn value_grad(&self, x: &[C64], grad: &mut [C64]) -> f64 {
        let phis = self.phis(x);
        let r = &gram_matrix(&phis) - &ComplexMatrix::identity(4);
        // ∇‖G − I‖² = 4 Σ_p M_p† Σ_q conj(r_pq) Φ_q
        grad.iter_mut().for_each(|g| *g = C64::new(0.0, 0.0));
        for p in 0..4 {
            let mut acc = vec![C64::new(0.0, 0.0); 9];
            for (q, phi) in phis.iter().enumerate() {
                let w = r[(p, q)].conj();
                for (a, f) in acc.iter_mut().zip(phi) {
                    *a += w * f;
                }
            }
            let back = self.adjoints[p].matvec(&acc).expect("9 amplitudes");
            for (g, b) in grad.iter_mut().zip(back) {
                *g -= b * 4.0;
            }
        }
        -r.frobenius_norm().powi(2)
    }
}

/// Multi-start minimization of the Gram residual over normalized triples.
/// Returns the best point found; a strictly positive value is the
/// numerical signature that no triple makes the `Φ_ij` orthonormal.
pub fn infeasibility_search(cfg: &OptimizerConfig) -> Result<GramResidual> {
    cfg.validate()?;
    let obj = NegativeGramDistance::new();
    let runs = multi_start(&obj, cfg, Purpose::CertifyRestart);
    let best = &runs[best_index(&runs)];
    gram_residual(&TauTriple::from_bob_state(&best.x)?)
}

/// Outcome of the full certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub forced: ForcedConstraintReport,
    pub minimum: GramResidual,
    pub passed: bool,
}

/// Runs [`forced_constraint_check`] and [`infeasibility_search`]. Passes iff
/// `⟨Φ_00|Φ_11⟩ = 2/3` within [`FORCED_TOL`] and the minimum residual
/// exceeds [`RESIDUAL_FLOOR`].
pub fn certify(cfg: &OptimizerConfig) -> Result<Certificate> {
    let forced = forced_constraint_check()?;
    let minimum = infeasibility_search(cfg)?;
    let passed = (forced.phi00_phi11 - C64::new(2.0 / 3.0, 0.0)).norm() <= FORCED_TOL && minimum.residual > RESIDUAL_FLOOR;
    Ok(Certificate { forced, minimum, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::tensor::gaussian_vector;

    fn random_tau(i: u64) -> TauTriple {
        TauTriple::from_bob_state(&gaussian_vector(9, &mut stream(11, Purpose::TestData, i))).unwrap()
    }

    #[test]
    fn maps_agree_with_displayed_formulas() {
        let tau = random_tau(0);
        let obj = NegativeGramDistance::new();
        let via_maps = obj.phis(&tau.bob_state());
        for (a, b) in via_maps.iter().zip(build_phi_states(&tau)) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reassembly_matches_direct_application() {
        for i in 0..100 {
            assert!(reassembly_deviation(&random_tau(i)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn only_tau0_kills_cross_states() {
        let z = C64::new(0.0, 0.0);
        let tau = TauTriple::new([C64::new(1.0, 0.0), z, z], [z; 3], [z; 3]).unwrap();
        let phis = build_phi_states(&tau);
        assert!(norm_sqr(&phis[1]) == 0.0 && norm_sqr(&phis[2]) == 0.0);
    }

    #[test]
    fn unnormalized_tau_rejected() {
        let t = random_tau(1).scale(C64::new(1.1, 0.0));
        assert!(matches!(gram_residual(&t), Err(Error::NotNormalized(_))));
        assert!(TauTriple::new(t.tau0, t.tau1, t.tau2).is_err());
    }

    #[test]
    fn forced_chain_reproduced() {
        let rep = forced_constraint_check().unwrap();
        assert!((rep.phi00_phi11 - C64::new(2.0 / 3.0, 0.0)).norm() < 1e-10);
        assert!(rep.rows.iter().all(ConstraintRow::holds));
    }

    #[test]
    fn residual_at_witness() {
        let r = gram_residual(&forced_witness()).unwrap();
        // the (00,11) and (11,00) entries alone contribute √2 · 2/3
        assert!(r.residual >= (2.0 * (2.0f64 / 3.0).powi(2)).sqrt() - 1e-10);
        assert!((r.residual - (&r.gram - &ComplexMatrix::identity(4)).frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn global_phase_leaves_residual_unchanged() {
        let t = random_tau(2);
        let a = gram_residual(&t).unwrap().residual;
        let b = gram_residual(&t.scale(C64::from_polar(1.0, 0.7))).unwrap().residual;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let obj = NegativeGramDistance::new();
        let x = gaussian_vector(9, &mut stream(5, Purpose::TestData, 0));
        let mut g = vec![C64::new(0.0, 0.0); 9];
        obj.value_grad(&x, &mut g);
        let h = 1e-6;
        for k in 0..9 {
            for (part, unit) in [(g[k].re, C64::new(h, 0.0)), (g[k].im, C64::new(0.0, h))] {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += unit;
                xm[k] -= unit;
                let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
                assert!((fd - part).abs() < 1e-5 * (1.0 + part.abs()), "k={k}: {fd} vs {part}");
            }
        }
    }
}
