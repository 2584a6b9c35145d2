//! Dense complex linear algebra used by the operator builders and certifiers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `a · b`, skipping zero entries of `b`. Finite sections of band operators are
/// very sparse, which makes this far cheaper than a dense product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bk = b[(k, j)];
            if bk == ZERO {
                continue;
            }
            let col = a.column(k);
            let mut dst = out.column_mut(j);
            for i in 0..a.nrows() {
                let v = col[i];
                if v != ZERO {
                    dst[i] += v * bk;
                }
            }
        }
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Column-compressed copy of a matrix, for repeated products.
struct Csc {
    nrows: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl Csc {
    fn new(m: &CMatrix) -> Self {
        let cols = (0..m.ncols())
            .map(|j| {
                m.column(j)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != ZERO)
                    .map(|(i, v)| (i, *v))
                    .collect()
            })
            .collect();
        Self {
            nrows: m.nrows(),
            cols,
        }
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            for &(i, v) in col {
                y[i] += v * xj;
            }
        }
    }

    fn apply_adjoint(&self, y: &[Complex64], x: &mut [Complex64]) {
        for (j, col) in self.cols.iter().enumerate() {
            x[j] = col.iter().map(|&(i, v)| v.conj() * y[i]).sum();
        }
    }
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
///
/// Small matrices go through a dense SVD. Larger ones use Lanczos with full
/// reorthogonalization on the Gram operator `A*A`, started from a fixed-seed
/// vector so the result is deterministic.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if max_abs(m) == 0.0 {
        return 0.0;
    }
    if m.nrows().min(m.ncols()) <= 48 {
        return m
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max);
    }
    lanczos_norm(m)
}

fn lanczos_norm(m: &CMatrix) -> f64 {
    let a = Csc::new(m);
    let n = m.ncols();
    let max_steps = n.min(600);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() + 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let nq = norm2(&q);
    q.iter_mut().for_each(|v| *v /= nq);

    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut tmp = vec![ZERO; a.nrows];
    let mut w = vec![ZERO; n];
    let mut estimate = 0.0;

    for k in 0..max_steps {
        a.apply(&basis[k], &mut tmp);
        a.apply_adjoint(&tmp, &mut w);
        let alpha = dot(&basis[k], &w).re;
        alphas.push(alpha);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for qj in &basis {
                let c = dot(qj, &w);
                w.iter_mut().zip(qj).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let beta = norm2(&w);

        let check = (k + 1) % 8 == 0 || beta < 1e-300 || k + 1 == max_steps;
        if check {
            let (theta, last) = tridiag_top(&alphas, &betas);
            estimate = theta;
            // the Ritz value error is of order (β·y)²/gap, far below this bound
            if beta < 1e-300 || (beta * last).abs() <= 1e-9 * theta.max(1e-300) {
                break;
            }
        }
        if beta < 1e-300 || k + 1 == n {
            let (theta, _) = tridiag_top(&alphas, &betas);
            estimate = theta;
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    estimate.max(0.0).sqrt()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix and the last
/// component of its unit eigenvector: Sturm bisection, then inverse iteration.
fn tridiag_top(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let off = |i: usize| if i < betas.len() { betas[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    // number of eigenvalues below x
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let b2 = if i > 0 { betas[i - 1] * betas[i - 1] } else { 0.0 };
            d = alphas[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;

    // (T − σ)y = x with σ just above θ, so the system is negative definite
    let sigma = theta + 1e-12 * theta.abs().max(1.0);
    let mut x = vec![1.0 / (k as f64).sqrt(); k];
    let mut c = vec![0.0; k];
    let mut y = vec![0.0; k];
    for _ in 0..3 {
        let mut denom = alphas[0] - sigma;
        c[0] = if k > 1 { betas[0] / denom } else { 0.0 };
        y[0] = x[0] / denom;
        for i in 1..k {
            denom = alphas[i] - sigma - betas[i - 1] * c[i - 1];
            c[i] = if i + 1 < k { betas[i] / denom } else { 0.0 };
            y[i] = (x[i] - betas[i - 1] * y[i - 1]) / denom;
        }
        for i in (0..k.saturating_sub(1)).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / n);
    }
    (theta, x[k - 1])
}

/// Eigenvalues through a complex Schur decomposition.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let t = nalgebra::linalg::Schur::new(m.clone()).unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn spectral_radius(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unitary `Q` and upper-triangular `T` with `m = Q T Q*`.
pub fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    nalgebra::linalg::Schur::new(m.clone()).unpack()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sparse_product_matches_dense() {
        let a = CMatrix::from_fn(5, 4, |i, j| c((i * 3 + j) as f64 % 4.0, (i + 2 * j) as f64 % 3.0 - 1.0));
        let b = CMatrix::from_fn(4, 3, |i, j| if (i + j) % 2 == 0 { c(i as f64, -(j as f64)) } else { ZERO });
        assert!(max_abs(&(matmul(&a, &b) - &a * &b)) < 1e-14);
    }

    #[test]
    fn lanczos_agrees_with_svd() {
        let n = 90;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = CMatrix::from_fn(n, n - 10, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let svd = m.clone().singular_values().max();
        assert!((lanczos_norm(&m) - svd).abs() < 1e-10 * svd);
        // shift-like matrix with a clustered top spectrum
        let s = CMatrix::from_fn(120, 120, |i, j| if i == j + 1 || j == i + 1 { c(1.0, 0.0) } else { ZERO });
        let exact = 2.0 * (std::f64::consts::PI / 121.0).cos();
        assert!((spectral_norm(&s) - exact).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = CMatrix::from_row_slice(3, 3, &[c(2.0, 0.0), c(1.0, 0.0), ZERO, ZERO, c(0.0, 1.0), c(5.0, 0.0), ZERO, ZERO, c(-3.0, 0.0)]);
        let mut ev: Vec<f64> = eigenvalues(&m).iter().map(|z| z.norm()).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12 && (ev[2] - 3.0).abs() < 1e-12);
        assert!((spectral_radius(&m) - 3.0).abs() < 1e-12);
    }
}
