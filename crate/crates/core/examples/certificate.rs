//! Why `U₂ₓ₃` cannot remove two ebits: the four output states `Φ_ij` can
//! never be made orthonormal.

use entpower::certify::{forced_constraint_check, gram_residual, infeasibility_search, forced_witness};
use entpower::OptimizerConfig;

fn main() -> entpower::Result<()> {
    let forced = forced_constraint_check()?;
    for row in &forced.rows {
        println!("{:<16} = {:>+.6}{:+.6}i", row.name, row.found.re, row.found.im);
    }
    println!("residual at the witness: {:.6}", gram_residual(&forced_witness())?.residual);

    let best = infeasibility_search(&OptimizerConfig::default())?;
    println!("smallest ||G - I||_F found over all triples: {:.9}", best.residual);
    println!("Gram matrix there:\n{:?}", best.gram);
    Ok(())
}
