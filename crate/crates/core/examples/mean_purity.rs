//! Haar average of the output purity `Tr ρ_aA²` on the canonical input
//! against `(A² + B² − 2)/(A²B² − 1)`.

use entpower::haar::mean_purity_experiment;
use entpower::rng::DEFAULT_SEED;

fn main() -> entpower::Result<()> {
    for (a, b) in [(2, 2), (2, 3), (3, 3)] {
        let rep = mean_purity_experiment(a, b, 20_000, DEFAULT_SEED)?;
        println!(
            "{a}x{b}: mean {:.6} +/- {:.6}, exact {:.6}, z = {:+.2}",
            rep.mean_purity,
            rep.std_error,
            rep.predicted_purity,
            rep.z_score()
        );
    }
    Ok(())
}
