//! Acceptance suite: one line per criterion.
//!
//! A criterion line reads `criterion N: PASS|FAIL  detail`. The process exits
//! nonzero if any hard requirement fails. Soft targets that miss are printed
//! as FAIL with a `(soft)` tag but do not change the exit code.

use std::process::{Command, Stdio};
use std::time::Instant;

use entpower::capacity::{
    delta_raw, disentangling_power, entangling_power, gradient_raw, multi_start, best_index, DeltaEntanglement,
    SphereObjective,
};
use entpower::certify::{forced_constraint_check, infeasibility_search, FORCED_TOL, RESIDUAL_FLOOR};
use entpower::entropy::{shannon_bits, von_neumann};
use entpower::gates::{
    build_u2x3, build_u2x3_dagger_oracle, canonical_two_qubit, two_ebit_input, TwoQubitCanonical,
};
use entpower::haar::{
    conjugate_by_square, haar_gate, haar_unitary, mean_purity_experiment, random_density, scatter_experiment, twirl,
    ScatterSummary,
};
use entpower::rng::{stream, Purpose, DEFAULT_SEED};
use entpower::tensor::{ComplexMatrix, Dims, PureState, Subsystems};
use entpower::{entropy::entanglement, BipartiteGate, OptimizerConfig, C64};
use rand::Rng;

enum Verdict {
    Pass,
    SoftFail,
    Fail,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn outcome(hard: bool, detail: String) -> Outcome {
    Outcome { verdict: if hard { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn c1() -> Outcome {
    let u = build_u2x3();
    let m = u.matrix();
    let gram = m.adjoint().matmul(m).unwrap();
    let off = (&gram - &ComplexMatrix::identity(6)).frobenius_norm();
    let oracle = build_u2x3_dagger_oracle();
    let diff = oracle.matrix().max_abs_diff(&m.adjoint());
    outcome(off < 1e-12 && diff < 1e-12, format!("|U^dag U - I|_F = {off:.2e}, oracle vs U^dag = {diff:.2e}"))
}

fn c2() -> Outcome {
    let out = two_ebit_input().apply_gate(&build_u2x3()).unwrap();
    let e = entanglement(&out).unwrap().0;
    outcome((e - 2.0).abs() <= 1e-9, format!("E(U|in>) = {e:.12}"))
}

fn c3() -> Outcome {
    let cfg = OptimizerConfig::default().with_restarts(64);
    let est = entangling_power(&build_u2x3(), (2, 3), &cfg).unwrap();
    let v = est.value.0;
    outcome(v >= 2.0 - 1e-6, format!("E_up = {v:.9} (64 restarts)"))
}

fn c4() -> Outcome {
    let cfg = OptimizerConfig::default().with_restarts(256);
    let v = disentangling_power(&build_u2x3(), (2, 3), &cfg).unwrap().value.0;
    outcome((1.92..=1.96).contains(&v), format!("E_down = {v:.9}, gap {:.4} (256 restarts)", 2.0 - v))
}

fn c5() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut rng = stream(DEFAULT_SEED, Purpose::TestData, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = TwoQubitCanonical {
            alpha: rng.random_range(-1.6..1.6),
            beta: rng.random_range(-1.6..1.6),
            gamma: rng.random_range(-1.6..1.6),
        };
        let g = canonical_two_qubit(p);
        let up = entangling_power(&g, (2, 2), &cfg).unwrap().value.0;
        let down = disentangling_power(&g, (2, 2), &cfg).unwrap().value.0;
        worst = worst.max((up - down).abs());
    }
    outcome(worst <= 2e-3, format!("max |E_up - E_down| = {worst:.3e} over 20 gates"))
}

fn c6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b) in [(2, 2), (2, 3), (3, 3)] {
        let rep = mean_purity_experiment(a, b, 100_000, DEFAULT_SEED).unwrap();
        let z = rep.z_score();
        ok &= z.abs() <= 4.0;
        parts.push(format!("{a}x{b}: {:.6} vs {:.6} (z {z:+.2})", rep.mean_purity, rep.predicted_purity));
    }
    outcome(ok, parts.join(", "))
}

fn c7() -> Outcome {
    let recs = scatter_experiment(2, 3, 1000, &OptimizerConfig::scatter(), DEFAULT_SEED).unwrap();
    let s = ScatterSummary::from_records(&recs);
    let capped = recs.iter().all(|r| r.e_up.0 <= 2.0 + 1e-6 && r.e_down.0 <= 2.0 + 1e-6);
    let upper = s.max_gap <= 0.14 && capped;
    let lower = s.max_gap >= 0.08;
    let detail = format!(
        "max gap {:.6} over {} gates (<= 0.14: {}, >= 0.08: {}); mean E_up {:.4} +/- {:.4}, mean E_down {:.4} +/- {:.4}",
        s.max_gap,
        s.gates,
        if upper { "yes" } else { "no" },
        if lower { "yes" } else { "no" },
        s.mean_up,
        s.std_error_up,
        s.mean_down,
        s.std_error_down,
    );
    let verdict = match (upper, lower) {
        (false, _) => Verdict::Fail,
        (true, false) => Verdict::SoftFail,
        (true, true) => Verdict::Pass,
    };
    Outcome { verdict, detail }
}

fn c8() -> Outcome {
    let report = forced_constraint_check();
    let forced = match &report {
        Ok(r) => r.rows.iter().all(|row| row.holds()) && (r.phi00_phi11 - C64::new(2.0 / 3.0, 0.0)).norm() <= FORCED_TOL,
        Err(_) => false,
    };
    let mut residuals = Vec::new();
    for seed in [DEFAULT_SEED, 1, 2] {
        residuals.push(infeasibility_search(&OptimizerConfig::default().with_seed(seed)).unwrap().residual);
    }
    let floor_ok = residuals.iter().all(|&r| r > RESIDUAL_FLOOR);
    let lo = residuals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = residuals.iter().cloned().fold(0.0, f64::max);
    let stable = hi - lo <= 0.1 * lo;
    outcome(
        forced && floor_ok && stable,
        format!(
            "forced relations {}, min residual over 3 seeds in [{lo:.9}, {hi:.9}]",
            if forced { "hold" } else { "violated" }
        ),
    )
}

/// `−ΔE` under the gate itself, so its maximum is the disentangling power
/// computed without forming `U†` as the gate.
struct Decrease<'a>(DeltaEntanglement<'a>);

impl SphereObjective for Decrease<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[C64]) -> f64 {
        -self.0.value(x)
    }

    fn value_grad(&self, x: &[C64], grad: &mut [C64]) -> f64 {
        let v = self.0.value_grad(x, grad);
        grad.iter_mut().for_each(|g| *g = -*g);
        -v
    }
}

fn gradient_check() -> f64 {
    const H: f64 = 1e-5;
    let shapes = [(1, 2, 2, 1), (2, 2, 2, 2), (2, 2, 3, 3), (1, 2, 3, 2), (3, 3, 2, 1)];
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let (a, sa, sb, b) = shapes[i as usize % shapes.len()];
        let dims = Dims::new(a, sa, sb, b).unwrap();
        let mut rng = stream(91, Purpose::TestData, i);
        let gate = haar_gate(sa, sb, &mut rng);
        let x = PureState::random(dims, &mut rng).amplitudes().to_vec();
        let g = gradient_raw(&gate, dims, &x).unwrap();
        let scale = g.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
        for k in 0..x.len() {
            for (unit, analytic) in [(C64::new(H, 0.0), g[k].re), (C64::new(0.0, H), g[k].im)] {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[k] += unit;
                xm[k] -= unit;
                let fd = (delta_raw(&gate, dims, &xp) - delta_raw(&gate, dims, &xm)) / (2.0 * H);
                worst = worst.max((fd - analytic).abs() / scale);
            }
        }
    }
    worst
}

fn entropy_of(psi: &PureState, set: Subsystems) -> f64 {
    if set.is_empty() || set == Subsystems::ALL {
        return 0.0;
    }
    von_neumann(&psi.partial_trace(set).unwrap()).unwrap().0
}

fn entropy_checks() -> (f64, f64) {
    let sets: Vec<Subsystems> = Subsystems::proper_subsets().collect();
    let mut schmidt: f64 = 0.0;
    let mut slack: f64 = f64::INFINITY;
    for i in 0..1000u64 {
        let mut rng = stream(92, Purpose::TestData, i);
        let d: Vec<usize> = (0..4).map(|_| rng.random_range(1..=3)).collect();
        let psi = PureState::random(Dims::new(d[0], d[1], d[2], d[3]).unwrap(), &mut rng);
        for &s in &sets {
            let l = shannon_bits(&psi.partial_trace(s).unwrap().eigvals().unwrap());
            let r = shannon_bits(&psi.partial_trace(s.complement()).unwrap().eigvals().unwrap());
            schmidt = schmidt.max((l - r).abs());
        }
        for &x in &sets {
            for &y in &sets {
                if !x.is_disjoint(y) {
                    continue;
                }
                let (sx, sy, sxy) = (entropy_of(&psi, x), entropy_of(&psi, y), entropy_of(&psi, x | y));
                slack = slack.min(sx + sy - sxy).min(sxy - (sx - sy).abs());
            }
        }
    }
    (schmidt, slack)
}

fn reversal_check() -> f64 {
    let cfg = OptimizerConfig::scatter();
    let dims = Dims::new(2, 2, 3, 3).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let g: BipartiteGate = haar_gate(2, 3, &mut stream(93, Purpose::HaarGate, i));
        let direct = {
            let obj = Decrease(DeltaEntanglement::new(&g, dims));
            let runs = multi_start(&obj, &cfg.with_seed(93 + i), Purpose::CapacityRestart);
            runs[best_index(&runs)].value
        };
        let via_adjoint = entangling_power(&g.adjoint(), (2, 3), &cfg.with_seed(193 + i)).unwrap().value.0;
        worst = worst.max((direct - via_adjoint).abs());
    }
    worst
}

fn twirl_check() -> f64 {
    let mut worst_z: f64 = 0.0;
    for d in [2, 3] {
        let n = 10_000u64;
        let rho = random_density(d * d, &mut stream(94, Purpose::TestData, d as u64));
        let exact = twirl(&rho).unwrap();
        let len = d.pow(4);
        let (mut s, mut s2) = (vec![[0.0f64; 2]; len], vec![[0.0f64; 2]; len]);
        for i in 0..n {
            let u = haar_unitary(d, &mut stream(94, Purpose::Twirl, i));
            for (k, z) in conjugate_by_square(rho.matrix(), &u).as_slice().iter().enumerate() {
                for (p, x) in [z.re, z.im].into_iter().enumerate() {
                    s[k][p] += x;
                    s2[k][p] += x * x;
                }
            }
        }
        let nf = n as f64;
        for (k, z) in exact.matrix().as_slice().iter().enumerate() {
            for (p, target) in [z.re, z.im].into_iter().enumerate() {
                let mean = s[k][p] / nf;
                let se = ((s2[k][p] / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
                if se > 1e-14 {
                    worst_z = worst_z.max((mean - target).abs() / se);
                } else if (mean - target).abs() > 1e-12 {
                    worst_z = f64::INFINITY;
                }
            }
        }
    }
    worst_z
}

fn c9() -> Outcome {
    let fd = gradient_check();
    let (schmidt, slack) = entropy_checks();
    let rev = reversal_check();
    let tz = twirl_check();
    let ok = fd < 1e-5 && schmidt < 1e-9 && slack > -1e-9 && rev <= 2e-3 && tz <= 4.0;
    outcome(
        ok,
        format!(
            "gradient rel err {fd:.2e}, Schmidt {schmidt:.2e}, min inequality slack {slack:.2e}, \
             E_down(U) vs E_up(U^dag) {rev:.2e}, twirl max |z| {tz:.2}"
        ),
    )
}

fn c10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "2", "4"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_entpower"))
            .args(["scatter", "--dims", "2x3", "--samples", "40", "--seed", "10", "--workers", workers, "--out"])
            .arg(&path)
            .stderr(Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(same, format!("scatter CSV with 1, 2 and 4 workers: {} bytes each, identical: {same}", outputs[0].len()))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] =
        [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8), (9, c9), (10, c10)];
    let mut hard_failures = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = match o.verdict {
            Verdict::Pass => "PASS",
            Verdict::SoftFail => "FAIL (soft)",
            Verdict::Fail => {
                hard_failures += 1;
                "FAIL"
            }
        };
        println!("criterion {n}: {tag}  {} [{secs:.1}s]", o.detail);
    }
    if hard_failures > 0 {
        eprintln!("{hard_failures} criteria failed");
        std::process::exit(1);
    }
}
