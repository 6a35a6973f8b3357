//! Entangling and disentangling power of bipartite unitary gates.
//!
//! The entangling power `E↑(U)` of a gate `U` on `A ⊗ B` is the largest
//! increase in entanglement across the Alice|Bob cut that one application of
//! `I_a ⊗ U ⊗ I_b` can produce on a pure state of `a ⊗ A ⊗ B ⊗ b`, where `a`
//! and `b` are local ancillas. The disentangling power `E↓(U)` is the largest
//! decrease, and equals `E↑(U†)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: dense complex matrices, four-party pure states, partial
//!   traces and a Jacobi Hermitian eigensolver.
//! - [`entropy`]: von Neumann, Rényi-2, binary and conditional entropies.
//! - [`gates`]: the qubit-qutrit gate `U₂ₓ₃`, its independent inverse
//!   expansion, the two-qubit canonical family and SWAP.
//! - [`capacity`]: multi-start projected-gradient ascent on the unit sphere
//!   estimating `E↑` and `E↓`.
//! - [`haar`]: Haar-random gates, the mean-purity identity, the
//!   entangling/disentangling scatter and the twirl.
//! - [`certify`]: numerical certificate that `U₂ₓ₃` cannot disentangle two
//!   ebits.
//! - [`cli`]: the `entpower` command-line front end.
//!
//! All entropies are in base 2 (ebits). The global index convention for
//! four-party states is `(a, A, B, b)` with `b` varying fastest.

pub mod capacity;
pub mod certify;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod gates;
pub mod haar;
pub mod rng;
pub mod tensor;

pub use capacity::{CapacityEstimate, OptimizerConfig};
pub use entropy::Ebits;
pub use error::{Error, Result};
pub use gates::BipartiteGate;
pub use tensor::{ComplexMatrix, DensityMatrix, Dims, PureState, Subsystems};

pub use num_complex::Complex64 as C64;
