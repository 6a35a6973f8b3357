//! Entangling and disentangling power of `U₂ₓ₃` with ancillas `(2, 3)`.
//!
//! Run with `--release`; the defaults use 64 restarts per estimate.

use entpower::capacity::{disentangling_power, entangling_power, entangling_power_product_ansatz};
use entpower::gates::build_u2x3;
use entpower::OptimizerConfig;

fn main() -> entpower::Result<()> {
    let u = build_u2x3();
    let cfg = OptimizerConfig::default();

    let up = entangling_power(&u, (2, 3), &cfg)?;
    let down = disentangling_power(&u, (2, 3), &cfg)?;
    println!("E_up   >= {:.9}   (restart {} of {})", up.value, up.best_restart, cfg.restarts);
    println!("E_down >= {:.9}   (restart {} of {})", down.value, down.best_restart, cfg.restarts);
    println!("gap       {:.4} ebits", up.value.0 - down.value.0);

    // Alice frozen in a Bell pair with her ancilla, only Bob's side varies
    let prod_up = entangling_power_product_ansatz(&u, &cfg)?;
    let prod_down = entangling_power_product_ansatz(&u.adjoint(), &cfg)?;
    println!("product ansatz: U {:.9}, U^dagger {:.9}", prod_up.value, prod_down.value);
    println!("(all values are lower bounds for these ancilla sizes)");
    Ok(())
}
