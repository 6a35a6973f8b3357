//! Numerical estimates of entangling and disentangling power.
//!
//! `E↑(U)` is a supremum over input states and over ancilla sizes. For fixed
//! ancilla dimensions the multi-start ascent below returns the best value it
//! visits, which is a **lower bound** on the true capacity: it can miss the
//! global maximum, and larger ancillas may do better. Ancillas of size
//! `(A, B)` are enough when the gate is maximally entangling.

mod objective;
mod sphere;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use objective::{cut_entropy, maximally_entangled, DeltaEntanglement, ProductAnsatz, SphereObjective, GRADIENT_EIGEN_FLOOR};
pub use sphere::{ascend, best_index, multi_start, Ascent};

use crate::entropy::Ebits;
use crate::error::{Error, Result};
use crate::gates::BipartiteGate;
use crate::rng::{Purpose, DEFAULT_SEED};
use crate::tensor::{Dims, PureState};

/// Multi-start ascent settings.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    pub shrink_factor: f64,
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 2000, initial_step: 0.1, shrink_factor: 0.5, grad_tol: 1e-8, seed: DEFAULT_SEED }
    }
}

impl OptimizerConfig {
    /// Lighter settings used for each gate of the scatter experiment.
    pub fn scatter() -> Self {
        Self { restarts: 16, max_iters: 500, ..Self::default() }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be positive");
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return bad("shrink_factor must lie in (0, 1)");
        }
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        Ok(())
    }
}

/// Best value found by a multi-start run, with diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: Ebits,
    /// The input state achieving `value`.
    pub best_input: PureState,
    pub per_restart_values: Vec<f64>,
    pub per_restart_converged: Vec<bool>,
    pub best_restart: usize,
    /// Whether the best restart met the gradient tolerance before `max_iters`.
    pub converged: bool,
    /// Iterations taken by the best restart.
    pub iterations_used: usize,
    /// Tangent gradient norm at the best input.
    pub grad_norm: f64,
}

impl CapacityEstimate {
    fn from_runs(runs: Vec<Ascent>, to_state: impl Fn(Vec<C64>) -> PureState) -> Self {
        let best = best_index(&runs);
        let per_restart_values = runs.iter().map(|r| r.value).collect();
        let per_restart_converged = runs.iter().map(|r| r.converged).collect();
        let winner = runs.into_iter().nth(best).expect("at least one restart");
        Self {
            value: Ebits(winner.value),
            best_input: to_state(winner.x),
            per_restart_values,
            per_restart_converged,
            best_restart: best,
            converged: winner.converged,
            iterations_used: winner.iterations,
            grad_norm: winner.grad_norm,
        }
    }

    /// Number of restarts that met the gradient tolerance.
    pub fn converged_restarts(&self) -> usize {
        self.per_restart_converged.iter().filter(|&&c| c).count()
    }
}

fn gate_dims(gate: &BipartiteGate, anc: (usize, usize)) -> Result<Dims> {
    Dims::new(anc.0, gate.dim_a(), gate.dim_b(), anc.1)
}

/// `E((I⊗U⊗I)ψ) − E(ψ)`.
pub fn delta_entanglement(gate: &BipartiteGate, psi_in: &PureState) -> Result<f64> {
    let d = psi_in.dims();
    if (d.sys_a, d.sys_b) != (gate.dim_a(), gate.dim_b()) {
        return Err(Error::DimensionMismatch(format!(
            "state has (A, B) = ({}, {}), gate acts on {}x{}",
            d.sys_a,
            d.sys_b,
            gate.dim_a(),
            gate.dim_b()
        )));
    }
    Ok(DeltaEntanglement::new(gate, d).value(psi_in.amplitudes()))
}

/// Euclidean gradient of `ΔE` at `psi_in` with respect to the real and
/// imaginary parts of the amplitudes, interleaved as
/// `[Re ψ₀, Im ψ₀, Re ψ₁, Im ψ₁, …]`. Not projected onto the sphere.
pub fn gradient_delta_entanglement(gate: &BipartiteGate, psi_in: &PureState) -> Result<Vec<f64>> {
    let raw = gradient_raw(gate, psi_in.dims(), psi_in.amplitudes())?;
    Ok(raw.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// Gradient of `ΔE` on raw (not necessarily normalized) amplitudes.
pub fn gradient_raw(gate: &BipartiteGate, dims: Dims, amplitudes: &[C64]) -> Result<Vec<C64>> {
    if (dims.sys_a, dims.sys_b) != (gate.dim_a(), gate.dim_b()) || amplitudes.len() != dims.total() {
        return Err(Error::DimensionMismatch("gate and state dims differ".into()));
    }
    let mut g = vec![C64::new(0.0, 0.0); amplitudes.len()];
    DeltaEntanglement::new(gate, dims).value_grad(amplitudes, &mut g);
    Ok(g)
}

/// `ΔE` on raw amplitudes, the function whose gradient [`gradient_raw`] returns.
pub fn delta_raw(gate: &BipartiteGate, dims: Dims, amplitudes: &[C64]) -> f64 {
    DeltaEntanglement::new(gate, dims).value(amplitudes)
}

/// Lower bound on `E↑(U)` with ancillas `anc = (d_a, d_b)`.
pub fn entangling_power(gate: &BipartiteGate, anc: (usize, usize), cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    cfg.validate()?;
    let dims = gate_dims(gate, anc)?;
    let obj = DeltaEntanglement::new(gate, dims);
    let runs = multi_start(&obj, cfg, Purpose::CapacityRestart);
    Ok(CapacityEstimate::from_runs(runs, |x| {
        PureState::normalized(dims, x).expect("optimizer keeps unit norm")
    }))
}

/// Lower bound on `E↓(U) = E↑(U†)`. The reported `best_input` is the state
/// fed to `U†`, i.e. the output side of `U`.
pub fn disentangling_power(gate: &BipartiteGate, anc: (usize, usize), cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    entangling_power(&gate.adjoint(), anc, cfg)
}

/// Entangling power restricted to inputs `|Φ⟩_{aA} ⊗ |Ψ⟩_{Bb}` with
/// `a = A`, `b = B` and `|Φ⟩` maximally entangled.
pub fn entangling_power_product_ansatz(gate: &BipartiteGate, cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    cfg.validate()?;
    let obj = ProductAnsatz::new(gate);
    let dims = obj.dims();
    let runs = multi_start(&obj, cfg, Purpose::CapacityRestart);
    Ok(CapacityEstimate::from_runs(runs, |bob| {
        PureState::normalized(dims, obj.embed(&bob)).expect("product of unit vectors")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{build_u2x3, swap_gate};

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 8, max_iters: 500, ..OptimizerConfig::default() }
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        for bad in [
            OptimizerConfig { restarts: 0, ..Default::default() },
            OptimizerConfig { max_iters: 0, ..Default::default() },
            OptimizerConfig { initial_step: 0.0, ..Default::default() },
            OptimizerConfig { shrink_factor: 1.0, ..Default::default() },
            OptimizerConfig { grad_tol: -1.0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn identity_gate_has_no_power() {
        let id = BipartiteGate::identity(2, 2);
        let est = entangling_power(&id, (2, 2), &quick()).unwrap();
        assert!(est.value.0.abs() <= 1e-8);
        let prod = entangling_power_product_ansatz(&id, &quick()).unwrap();
        assert!(prod.value.0.abs() <= 1e-8);
    }

    #[test]
    fn estimate_value_is_max_of_restarts() {
        let est = entangling_power(&swap_gate(2), (1, 1), &quick()).unwrap();
        let max = est.per_restart_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((est.value.0 - max).abs() < 1e-12);
        // no ancillas: SWAP only relabels the parties, ΔE = 0
        assert!(est.value.0.abs() < 1e-8);
    }

    #[test]
    fn delta_dimension_mismatch() {
        let psi = PureState::random(Dims::new(1, 2, 2, 1).unwrap(), &mut rand::rng());
        assert!(matches!(delta_entanglement(&build_u2x3(), &psi), Err(Error::DimensionMismatch(_))));
    }
}
