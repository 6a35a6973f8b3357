//! Monte Carlo average of `(U⊗U) ρ (U⊗U)†` over Haar `U` against the
//! closed-form twirl.

use entpower::haar::{conjugate_by_square, haar_unitary, random_density, twirl};
use entpower::rng::{stream, Purpose, DEFAULT_SEED};
use entpower::tensor::ComplexMatrix;
use entpower::C64;

fn main() -> entpower::Result<()> {
    let d = 2;
    let rho = random_density(d * d, &mut stream(DEFAULT_SEED, Purpose::TestData, 0));
    let exact = twirl(&rho)?;

    let samples = 5000;
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..samples {
        let u = haar_unitary(d, &mut stream(DEFAULT_SEED, Purpose::Twirl, i));
        acc = &acc + &conjugate_by_square(rho.matrix(), &u);
    }
    let mc = acc.scale(C64::new(1.0 / samples as f64, 0.0));
    println!("closed form:\n{:?}", exact.matrix());
    println!("Monte Carlo ({samples} draws):\n{mc:?}");
    println!("largest entry difference: {:.2e}", mc.max_abs_diff(exact.matrix()));
    Ok(())
}
