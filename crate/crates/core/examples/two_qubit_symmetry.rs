//! For two-qubit gates the entangling and disentangling powers coincide.

use entpower::capacity::{disentangling_power, entangling_power};
use entpower::gates::{canonical_two_qubit, TwoQubitCanonical};
use entpower::rng::{stream, Purpose, DEFAULT_SEED};
use entpower::OptimizerConfig;
use rand::Rng;

fn main() -> entpower::Result<()> {
    let cfg = OptimizerConfig::default().with_restarts(16);
    let mut rng = stream(DEFAULT_SEED, Purpose::TestData, 0);
    println!("{:>8} {:>8} {:>8}   {:>11} {:>11} {:>9}", "alpha", "beta", "gamma", "E_up", "E_down", "diff");
    for _ in 0..5 {
        let p = TwoQubitCanonical {
            alpha: rng.random_range(0.0..1.6),
            beta: rng.random_range(0.0..1.6),
            gamma: rng.random_range(0.0..1.6),
        };
        let g = canonical_two_qubit(p);
        let up = entangling_power(&g, (2, 2), &cfg)?.value.0;
        let down = disentangling_power(&g, (2, 2), &cfg)?.value.0;
        println!(
            "{:>8.4} {:>8.4} {:>8.4}   {up:>11.9} {down:>11.9} {:>9.2e}",
            p.alpha,
            p.beta,
            p.gamma,
            (up - down).abs()
        );
    }
    Ok(())
}
