//! Partial traces and entropies on a random four-party state.

use entpower::entropy::{conditional_entropy, entanglement, renyi2, von_neumann};
use entpower::rng::{stream, Purpose, DEFAULT_SEED};
use entpower::tensor::{Dims, PureState, Subsystems};

fn main() -> entpower::Result<()> {
    let dims = Dims::new(2, 2, 3, 3)?;
    let psi = PureState::random(dims, &mut stream(DEFAULT_SEED, Purpose::TestData, 0));

    let alice = psi.partial_trace(Subsystems::ALICE)?;
    let bob = psi.partial_trace(Subsystems::BOB)?;
    println!("state on {dims}");
    println!("E(aA|Bb)          = {:.9}", entanglement(&psi)?);
    println!("S(rho_Bb)         = {:.9}  (same spectrum as rho_aA)", von_neumann(&bob)?);
    println!("S2(rho_aA)        = {:.9}  (never above the von Neumann value)", renyi2(&alice));
    println!("S(A|a)            = {:+.9}", conditional_entropy(&psi, Subsystems::SYS_A, Subsystems::ANC_A)?);
    Ok(())
}
