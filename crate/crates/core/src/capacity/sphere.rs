//! Projected gradient ascent on the unit sphere of `C^n` with backtracking.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::objective::SphereObjective;
use super::OptimizerConfig;
use crate::rng::{stream, Purpose};
use crate::tensor::{gaussian_vector, norm_sqr};

/// Sufficient-increase constant in the Armijo test.
const ARMIJO: f64 = 1e-4;

/// Upper bound on the length of a single tangent move.
const MAX_MOVE: f64 = 0.5;

/// Moves shorter than this are below working precision.
const MIN_MOVE: f64 = 1e-15;

/// Result of one ascent run.
#[derive(Clone, Debug)]
pub struct Ascent {
    pub x: Vec<C64>,
    pub value: f64,
    /// Norm of the tangent-space gradient at `x`.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn normalize(x: &mut [C64]) {
    let n = norm_sqr(x).sqrt();
    x.iter_mut().for_each(|z| *z /= n);
}

/// Removes the radial component: `g ← g − Re⟨x, g⟩ x`.
fn project_tangent(x: &[C64], g: &mut [C64]) -> f64 {
    let r: f64 = x.iter().zip(g.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi -= xi * r;
    }
    norm_sqr(g).sqrt()
}

/// Number of curvature pairs kept for the quasi-Newton direction.
const MEMORY: usize = 8;

fn dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Two-loop recursion: applies the inverse-Hessian estimate of `−f` built
/// from `(s, y)` pairs to the tangent gradient `g`. Returns an ascent
/// direction (equal to `g` when the memory is empty).
fn quasi_newton_direction(g: &[C64], pairs: &[(Vec<C64>, Vec<C64>, f64)]) -> Vec<C64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= yi * a;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = pairs.last() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|z| *z *= gamma);
    }
    for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += si * (a - b);
        }
    }
    q
}

/// Ascent from `x0`: each step moves along the tangent space, renormalizes,
/// and backtracks by `shrink_factor` until the Armijo increase condition
/// holds. The direction is the projected gradient corrected by a
/// limited-memory quasi-Newton estimate of the curvature; whenever that
/// estimate fails to give an ascent direction the plain projected gradient is
/// used. Iterate values are non-decreasing, so the returned value is the
/// largest one visited.
pub fn ascend<O: SphereObjective + ?Sized>(obj: &O, x0: Vec<C64>, cfg: &OptimizerConfig) -> Ascent {
    let n = x0.len();
    let mut x = x0;
    normalize(&mut x);
    let mut g = vec![C64::new(0.0, 0.0); n];
    let mut f = obj.value_grad(&x, &mut g);
    let mut grad_norm = project_tangent(&x, &mut g);
    let mut trial = vec![C64::new(0.0, 0.0); n];
    let mut g_new = vec![C64::new(0.0, 0.0); n];
    let mut pairs: Vec<(Vec<C64>, Vec<C64>, f64)> = Vec::with_capacity(MEMORY);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        if grad_norm < cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut dir = quasi_newton_direction(&g, &pairs);
        project_tangent(&x, &mut dir);
        let mut slope = dot(&dir, &g);
        if !(slope > 0.0) {
            dir.copy_from_slice(&g);
            slope = grad_norm * grad_norm;
            pairs.clear();
        }
        let dir_norm = norm_sqr(&dir).sqrt();
        let mut step = if pairs.is_empty() { cfg.initial_step } else { 1.0 };
        step = step.min(MAX_MOVE / dir_norm);

        let mut accepted = false;
        while step * dir_norm >= MIN_MOVE {
            for ((t, xi), di) in trial.iter_mut().zip(&x).zip(&dir) {
                *t = xi + di * step;
            }
            normalize(&mut trial);
            if obj.value(&trial) >= f + ARMIJO * step * slope {
                accepted = true;
                break;
            }
            step *= cfg.shrink_factor;
        }
        if !accepted {
            if pairs.is_empty() {
                // no representable improving move along the gradient
                break;
            }
            pairs.clear();
            continue;
        }

        let f_new = obj.value_grad(&trial, &mut g_new);
        let gn_new = project_tangent(&trial, &mut g_new);
        // curvature pair for −f, both vectors taken in the embedding space
        let s: Vec<C64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<C64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm_sqr(&s).sqrt() * norm_sqr(&y).sqrt() && sy > 0.0 {
            if pairs.len() == MEMORY {
                pairs.remove(0);
            }
            pairs.push((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        grad_norm = gn_new;
    }
    if !converged && grad_norm < cfg.grad_tol {
        converged = true;
    }
    Ascent { x, value: f, grad_norm, iterations, converged }
}

/// Independent ascents from Gaussian starting points; restart `r` draws its
/// start from the stream `(cfg.seed, purpose, r)`. The output order is the
/// restart order regardless of how the work is scheduled.
pub fn multi_start<O: SphereObjective + ?Sized>(obj: &O, cfg: &OptimizerConfig, purpose: Purpose) -> Vec<Ascent> {
    (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(cfg.seed, purpose, r as u64);
            let x0 = gaussian_vector(obj.dim(), &mut rng);
            ascend(obj, x0, cfg)
        })
        .collect()
}

/// Index of the best run; ties go to the lowest index.
pub fn best_index(runs: &[Ascent]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if r.value > runs[best].value {
            best = i;
        }
    }
    best
}
