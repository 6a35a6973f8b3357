//! Entropies in base 2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{DensityMatrix, PureState, Subsystems};

/// Eigenvalues below this contribute nothing to `−λ log λ`.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

/// Allowed deviation of `Tr ρ` from 1 in [`von_neumann`].
pub const TRACE_TOL: f64 = 1e-8;

/// An amount of entropy or entanglement in ebits.
#[derive(Copy, Clone, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ebits(pub f64);

impl Ebits {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Ebits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = f.precision() {
            write!(f, "{:.*} ebits", p, self.0)
        } else {
            write!(f, "{} ebits", self.0)
        }
    }
}

impl From<Ebits> for f64 {
    fn from(e: Ebits) -> f64 {
        e.0
    }
}

/// `−Σ λ log₂ λ` over a spectrum, with eigenvalues clamped to `[0, 1]` and
/// those below [`ZERO_EIGENVALUE`] dropped.
pub fn shannon_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l >= ZERO_EIGENVALUE)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann(rho: &DensityMatrix) -> Result<Ebits> {
    let dev = (rho.trace() - 1.0).abs();
    if dev > TRACE_TOL {
        return Err(Error::BadTrace(dev));
    }
    Ok(Ebits(shannon_bits(&rho.eigvals()?)))
}

/// Entanglement across `aA | Bb`: the entropy of Alice's reduced state.
pub fn entanglement(state: &PureState) -> Result<Ebits> {
    von_neumann(&state.partial_trace(Subsystems::ALICE)?)
}

/// `S₂(ρ) = −log₂ Tr ρ²`.
pub fn renyi2(rho: &DensityMatrix) -> Ebits {
    Ebits((-rho.purity().log2()).max(0.0))
}

/// `H₂(δ) = −δ log₂ δ − (1−δ) log₂(1−δ)`.
pub fn binary_entropy(delta: f64) -> Result<Ebits> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!("binary entropy argument {delta} not in [0, 1]")));
    }
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(Ebits(h(delta) + h(1.0 - delta)))
}

/// `S(X|Y) = S(ρ_XY) − S(ρ_Y)`; may be negative.
pub fn conditional_entropy(state: &PureState, x: Subsystems, y: Subsystems) -> Result<f64> {
    if !x.is_disjoint(y) {
        return Err(Error::InvalidSubsystems("conditional entropy needs disjoint X and Y".into()));
    }
    if x.is_empty() {
        return Err(Error::InvalidSubsystems("X must be nonempty".into()));
    }
    let joint = x | y;
    // S of the full pure state is 0
    let s_xy = if joint == Subsystems::ALL { 0.0 } else { von_neumann(&state.partial_trace(joint)?)?.0 };
    let s_y = if y.is_empty() { 0.0 } else { von_neumann(&state.partial_trace(y)?)?.0 };
    Ok(s_xy - s_y)
}
