//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Inputs further than this from Hermitian are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Sweeps stop once the off-diagonal Frobenius mass drops below this
/// (scaled by `max(1, ‖H‖_F)`).
const OFF_DIAG_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `H = V diag(values) V†` with values sorted descending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    check_hermitian(h)?;
    let (values, vectors) = jacobi(h.as_slice(), h.rows(), true)?;
    Ok(Eigh { values, vectors: vectors.expect("requested") })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    Ok(jacobi(h.as_slice(), h.rows(), false)?.0)
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Jacobi iteration on a row-major `n x n` Hermitian buffer. The input is
/// symmetrised first, so only tolerance-level asymmetry is absorbed.
pub(crate) fn jacobi(
    entries: &[C64],
    n: usize,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let mut a: Vec<C64> = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = C64::new(entries[i * n + i].re, 0.0);
        for j in i + 1..n {
            let z = (entries[i * n + j] + entries[j * n + i].conj()) * 0.5;
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = C64::new(1.0, 0.0);
        }
        Some(v)
    } else {
        None
    };

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = OFF_DIAG_TOL * scale;

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, v.as_deref_mut(), n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]));
    Ok((values, vectors))
}

/// Annihilates `a[p][q]` with `A ← J† A J`, `V ← V J`, where
/// `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the `(p, q)` plane.
fn rotate(a: &mut [C64], v: Option<&mut [C64]>, n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = apq / mag; // e^{iφ}
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J entries
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    // A ← A J (columns p, q)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * jpp + akq * jqp;
        a[k * n + q] = akp * jpq + akq * jqq;
    }
    // A ← J† A (rows p, q)
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
        a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = vkp * jpp + vkq * jqp;
            v[k * n + q] = vkp * jpq + vkq * jqq;
        }
    }
}
