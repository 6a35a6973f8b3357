//! `U₂ₓ₃` turns a product state into one with two ebits across Alice|Bob.

use entpower::entropy::entanglement;
use entpower::gates::{build_u2x3, build_u2x3_dagger_oracle, two_ebit_input};

fn main() -> entpower::Result<()> {
    let u = build_u2x3();
    println!("unitarity defect of U2x3:       {:.2e}", u.matrix().unitarity_defect());
    let oracle = build_u2x3_dagger_oracle();
    println!("v/v' expansion vs adjoint:      {:.2e}", oracle.matrix().max_abs_diff(u.adjoint().matrix()));

    let input = two_ebit_input();
    let output = input.apply_gate(&u)?;
    println!("entanglement before: {:.12} ebits", entanglement(&input)?.0);
    println!("entanglement after:  {:.12} ebits", entanglement(&output)?.0);
    Ok(())
}
