//! Finite-N Gram matrices and exact block mutual information.

use crate::capacity::{scheme_rate, scheme_spectrum, Scheme};
use crate::channel::{CMatrix, FlatMimoChannel, TappedDelayChannel};
use crate::error::{invalid, FtnError, Result};
use crate::pulse::{FoldedSpectrum, RrcPulse};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub const MAX_FLAT_N: usize = 2048;
pub const MAX_FS_N: usize = 512;
/// Relative eigenvalue floor of the pseudo-inverse of G.
pub const PINV_FLOOR: f64 = 1e-10;

/// Symmetric Toeplitz matrix (G)_{n,m} = g((n - m)δT), stored by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    column: Vec<f64>,
    spacing: f64,
}

pub fn build_gram(pulse: &RrcPulse, delta: f64, n: usize) -> Result<GramMatrix> {
    if n == 0 || n > MAX_FLAT_N {
        return Err(invalid("N", n, "1 <= N <= 2048"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", delta, "0 < delta <= 1"));
    }
    let spacing = delta * pulse.period();
    let column = (0..n).map(|k| pulse.autocorr(k as f64 * spacing)).collect();
    Ok(GramMatrix { column, spacing })
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.column.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.column[i.abs_diff(j)]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.to_dense()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Shifted Gram (G^j)_{m,n} = g((m - n)δT - d_j).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedGram {
    pub delay: f64,
    pub matrix: DMatrix<f64>,
}

pub fn build_shifted_gram(pulse: &RrcPulse, delta: f64, delay: f64, n: usize) -> Result<ShiftedGram> {
    if n == 0 || n > MAX_FS_N {
        return Err(invalid("N", n, "1 <= N <= 512"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", delta, "0 < delta <= 1"));
    }
    if !delay.is_finite() {
        return Err(invalid("delay", delay, "finite"));
    }
    let dt = delta * pulse.period();
    let matrix = DMatrix::from_fn(n, n, |m, k| pulse.autocorr((m as f64 - k as f64) * dt - delay));
    Ok(ShiftedGram { delay, matrix })
}

/// Covariance of the stacked symbol vector (antenna-major, KN×KN).
#[derive(Debug, Clone)]
pub enum InputCovariance {
    /// s·I.
    Iid(f64),
    Full(CMatrix),
}

/// log2 det of a Hermitian positive definite matrix via Cholesky.
fn log2_det_hpd(a: &CMatrix) -> Result<f64> {
    let n = a.nrows();
    // Row-major lower factor so the inner products run over contiguous rows.
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let mut logdet = 0.0;
    for j in 0..n {
        let (head, rest) = l.split_at_mut(j * n);
        let row_j = &mut rest[..n];
        for i in 0..j {
            let row_i = &head[i * n..i * n + i];
            let mut s = a[(j, i)];
            for k in 0..i {
                s -= row_j[k] * row_i[k].conj();
            }
            row_j[i] = s / head[i * n + i].re;
        }
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= row_j[k].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(FtnError::FactorizationBreakdown { pivot: j, value: d });
        }
        let r = d.sqrt();
        row_j[j] = Complex64::new(r, 0.0);
        logdet += 2.0 * r.ln();
    }
    Ok(logdet / std::f64::consts::LN_2)
}

/// Hermitian square root of a PSD matrix.
fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let scale = a.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let asym = crate::numerics::eig::hermitian_asymmetry(a);
    if asym > 1e-10 * scale.max(1e-300) {
        return Err(FtnError::NotHermitian { asymmetry: asym });
    }
    let eig = SymmetricEigen::new(a.clone());
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-9 * scale {
            return Err(invalid("input covariance eigenvalue", *v, ">= 0 (positive semidefinite)"));
        }
        *v = v.max(0.0).sqrt();
    }
    let d = CMatrix::from_diagonal(&vals.map(|x| Complex64::new(x, 0.0)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// (1/N)·log2 det(I + σ0⁻² S M S) with S = Σ_A^{1/2}.
fn block_rate(m: &CMatrix, input: &InputCovariance, noise: f64, n: usize) -> Result<f64> {
    let dim = m.nrows();
    let mut a = match input {
        InputCovariance::Iid(s) => {
            if !(*s >= 0.0) || !s.is_finite() {
                return Err(invalid("input variance", *s, "finite and >= 0"));
            }
            if *s == 0.0 {
                return Ok(0.0);
            }
            m * Complex64::new(s / noise, 0.0)
        }
        InputCovariance::Full(cov) => {
            if cov.shape() != (dim, dim) {
                return Err(FtnError::DimensionMismatch(format!(
                    "input covariance {:?}, expected {dim}x{dim}",
                    cov.shape()
                )));
            }
            let s = hermitian_sqrt(cov)?;
            (&s * m * &s) / Complex64::new(noise, 0.0)
        }
    };
    for i in 0..dim {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    Ok(log2_det_hpd(&a)? / n as f64)
}

fn check_noise(noise: f64) -> Result<()> {
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(invalid("sigma0^2", noise, "finite and > 0"));
    }
    Ok(())
}

/// Exact finite-N rate (1/N)·log2 det(I + σ0⁻² Σ_A (W ⊗ G)), in bits per symbol.
pub fn finite_n_rate(
    h: &FlatMimoChannel,
    g: &GramMatrix,
    input: &InputCovariance,
    noise: f64,
) -> Result<f64> {
    check_noise(noise)?;
    let w = h.gram();
    let k = w.nrows();
    let n = g.n();
    let m = CMatrix::from_fn(k * n, k * n, |r, c| w[(r / n, c / n)] * g.get(r % n, c % n));
    block_rate(&m, input, noise, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzegoPoint {
    pub n: usize,
    pub finite_rate: f64,
    pub limit_rate: f64,
    pub rel_gap: f64,
}

/// Finite-N rates under i.i.d. input Σ_A = (PδT/K)·I against the
/// frequency-domain limit of the same input.
pub fn szego_gap(
    h: &FlatMimoChannel,
    pulse: &RrcPulse,
    delta: f64,
    power: f64,
    noise: f64,
    ns: &[usize],
) -> Result<Vec<SzegoPoint>> {
    let fs = FoldedSpectrum::new(*pulse, delta)?;
    let tau = h.eigenmodes()?;
    let k = h.tx();
    let limit = if tau.iter().all(|&t| t == 0.0) {
        0.0
    } else {
        let sol = scheme_spectrum(Scheme::SsSf, power, &tau, &fs, noise)?;
        scheme_rate(&sol, &tau, noise)?.bits_per_symbol
    };
    let input = InputCovariance::Iid(power * delta * pulse.period() / k as f64);
    ns.iter()
        .map(|&n| {
            let g = build_gram(pulse, delta, n)?;
            let finite = finite_n_rate(h, &g, &input, noise)?;
            let rel_gap = if limit == 0.0 {
                finite.abs()
            } else {
                (finite - limit).abs() / limit
            };
            Ok(SzegoPoint {
                n,
                finite_rate: finite,
                limit_rate: limit,
                rel_gap,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsFiniteRate {
    pub bits_per_symbol: f64,
    /// Eigenvalues of G dropped by the pseudo-inverse floor.
    pub floored: usize,
}

/// Finite-N rate of a tapped-delay channel with noise covariance σ0²(I ⊗ G),
/// using the floored pseudo-inverse of G.
pub fn fs_finite_n_rate(
    ch: &TappedDelayChannel,
    pulse: &RrcPulse,
    delta: f64,
    n: usize,
    input: &InputCovariance,
    noise: f64,
) -> Result<FsFiniteRate> {
    check_noise(noise)?;
    if n == 0 || n > MAX_FS_N {
        return Err(invalid("N", n, "1 <= N <= 512"));
    }
    let g = build_gram(pulse, delta, n)?.to_dense();
    let eig = SymmetricEigen::new(g);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x));
    let floor = PINV_FLOOR * lmax;
    let mut floored = 0;
    let inv_sqrt = eig.eigenvalues.map(|x| {
        if x > floor {
            1.0 / x.sqrt()
        } else {
            floored += 1;
            0.0
        }
    });
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();

    let (l, k) = (ch.rx(), ch.tx());
    // C = (I_L ⊗ G^{+1/2}) Σ_j (H^j ⊗ G^j), so that M = C^H C.
    let mut c = CMatrix::zeros(l * n, k * n);
    for tap in ch.taps() {
        let gj = build_shifted_gram(pulse, delta, tap.delay, n)?.matrix;
        let wj = &root * gj;
        for lr in 0..l {
            for kc in 0..k {
                let hz = tap.gains[(lr, kc)];
                if hz == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..n {
                    for row in 0..n {
                        c[(lr * n + row, kc * n + col)] += hz * wj[(row, col)];
                    }
                }
            }
        }
    }
    let m = c.adjoint() * &c;
    Ok(FsFiniteRate {
        bits_per_symbol: block_rate(&m, input, noise, n)?,
        floored,
    })
}
