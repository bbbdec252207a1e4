//! Cyclic Jacobi eigendecomposition for small complex Hermitian matrices.

use crate::error::{invalid, FtnError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub const MAX_DIM: usize = 16;
const MAX_SWEEPS: usize = 100;
const OFF_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: DMatrix<Complex64>,
}

/// Largest |A_ij - conj(A_ji)| over the matrix.
pub fn hermitian_asymmetry(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Eigendecomposition `A = V diag(values) V^H` of a Hermitian matrix of
/// dimension at most [`MAX_DIM`].
pub fn hermitian_eig(a: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(FtnError::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    if n > MAX_DIM {
        return Err(invalid("dimension", n, "dimension <= 16"));
    }
    let scale = max_abs(a);
    let asym = hermitian_asymmetry(a);
    if asym > 1e-10 * scale {
        return Err(FtnError::NotHermitian { asymmetry: asym });
    }

    // Work on the exactly-Hermitian part.
    let mut m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let norm = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut converged = n < 2 || norm == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        let off = off_diagonal(&m);
        if off <= OFF_THRESHOLD * norm {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    if !converged {
        let off = off_diagonal(&m);
        if off > OFF_THRESHOLD * norm {
            return Err(FtnError::EigenNoConvergence { sweeps, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing the (p, q) entry: first a phase on column q
/// makes the entry real, then a real Givens rotation annihilates it.
fn rotate(m: &mut DMatrix<Complex64>, v: &mut DMatrix<Complex64>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{i alpha}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.nrows();
    let pc = phase.conj(); // e^{-i alpha}

    // A <- A U with U = [[c, s], [-s e^{-ia}, c e^{-ia}]] on columns p, q.
    for r in 0..n {
        let xp = m[(r, p)];
        let xq = m[(r, q)];
        m[(r, p)] = xp * c - xq * pc * s;
        m[(r, q)] = xp * s + xq * pc * c;
    }
    // A <- U^H A on rows p, q.
    for col in 0..n {
        let xp = m[(p, col)];
        let xq = m[(q, col)];
        m[(p, col)] = xp * c - xq * phase * s;
        m[(q, col)] = xp * s + xq * phase * c;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for r in 0..n {
        let xp = v[(r, p)];
        let xq = v[(r, q)];
        v[(r, p)] = xp * c - xq * pc * s;
        v[(r, q)] = xp * s + xq * pc * c;
    }
}
