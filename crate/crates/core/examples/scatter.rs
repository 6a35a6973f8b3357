//! `E↑` against `E↓` for random qubit-qutrit gates, as CSV on stdout.
//!
//! `cargo run --release --example scatter -- 200 > scatter.csv`

use entpower::cli::scatter_csv;
use entpower::haar::{expected_entanglement_bound, scatter_experiment, ScatterSummary};
use entpower::rng::DEFAULT_SEED;
use entpower::OptimizerConfig;

fn main() -> entpower::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let records = scatter_experiment(2, 3, n, &OptimizerConfig::scatter(), DEFAULT_SEED)?;
    print!("{}", scatter_csv(&records));

    let s = ScatterSummary::from_records(&records);
    eprintln!("max e_up - e_down: {:.4}, max |gap|: {:.4}", s.max_gap, s.max_abs_gap);
    eprintln!(
        "mean e_up {:.4} (bound on the canonical input alone: {:.4})",
        s.mean_up,
        expected_entanglement_bound(2, 3)?.0
    );
    Ok(())
}
