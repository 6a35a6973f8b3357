//! Analytic gradient of ΔE against central finite differences.

use entpower::capacity::{delta_raw, gradient_delta_entanglement, gradient_raw};
use entpower::haar::haar_gate;
use entpower::rng::{stream, Purpose};
use entpower::tensor::{Dims, PureState};
use entpower::C64;

const H: f64 = 1e-5;

/// Largest component error relative to the largest gradient component.
fn relative_error(gate: &entpower::BipartiteGate, psi: &PureState) -> f64 {
    let dims = psi.dims();
    let x = psi.amplitudes().to_vec();
    let g = gradient_raw(gate, dims, &x).unwrap();
    let mut worst: f64 = 0.0;
    let scale = g.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max).max(1e-300);
    for k in 0..x.len() {
        for (unit, analytic) in [(C64::new(H, 0.0), g[k].re), (C64::new(0.0, H), g[k].im)] {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += unit;
            xm[k] -= unit;
            let fd = (delta_raw(gate, dims, &xp) - delta_raw(gate, dims, &xm)) / (2.0 * H);
            worst = worst.max((fd - analytic).abs() / scale);
        }
    }
    worst
}

#[test]
fn gradient_matches_central_differences_on_100_instances() {
    let shapes = [(1, 2, 2, 1), (2, 2, 2, 2), (2, 2, 3, 3), (1, 2, 3, 2), (3, 3, 2, 1)];
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let (a, sa, sb, b) = shapes[i as usize % shapes.len()];
        let dims = Dims::new(a, sa, sb, b).unwrap();
        let mut rng = stream(21, Purpose::TestData, i);
        let gate = haar_gate(sa, sb, &mut rng);
        let psi = PureState::random(dims, &mut rng);
        let err = relative_error(&gate, &psi);
        assert!(err < 1e-5, "instance {i} on {dims}: relative error {err:.3e}");
        worst = worst.max(err);
    }
    println!("worst relative error over 100 instances: {worst:.3e}");
}

#[test]
fn public_gradient_is_interleaved() {
    let dims = Dims::new(1, 2, 3, 1).unwrap();
    let mut rng = stream(22, Purpose::TestData, 0);
    let gate = haar_gate(2, 3, &mut rng);
    let psi = PureState::random(dims, &mut rng);
    let flat = gradient_delta_entanglement(&gate, &psi).unwrap();
    let raw = gradient_raw(&gate, dims, psi.amplitudes()).unwrap();
    assert_eq!(flat.len(), 2 * dims.total());
    for (k, z) in raw.iter().enumerate() {
        assert_eq!(flat[2 * k], z.re);
        assert_eq!(flat[2 * k + 1], z.im);
    }
}
