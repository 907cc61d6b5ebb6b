//! One-sided (Hestenes) Jacobi SVD.
//!
//! Jacobi is slower than bidiagonalization but gives singular values with
//! small absolute error relative to ‖A‖, which is what the singular-value
//! difference `(Se − Sc)/α` in extraction depends on.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// `A = U · diag(sigma) · Vᵀ`.
///
/// Signs are fixed so the largest-magnitude entry of every column of `U` is
/// positive (first such index on ties); the matching column of `V` is flipped
/// with it.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdTriple<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> SvdTriple<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        Matrix::from_svd_parts(&self.u, &self.sigma, &self.v)
    }
}

/// Full SVD: `U` is m×m, `V` is n×n, `sigma` has min(m, n) non-increasing entries.
pub fn svd<T: Real>(a: &Matrix<T>) -> Result<SvdTriple<T>> {
    decompose(a, true)
}

/// Economy SVD: `U` is m×k and `V` is n×k with k = min(m, n).
pub fn svd_thin<T: Real>(a: &Matrix<T>) -> Result<SvdTriple<T>> {
    decompose(a, false)
}

fn decompose<T: Real>(a: &Matrix<T>, full: bool) -> Result<SvdTriple<T>> {
    if a.is_empty() {
        return Err(Error::Empty("svd of an empty matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    let (mut u, sigma, mut v) = if a.rows() >= a.cols() {
        tall(a, full)
    } else {
        let (u, s, v) = tall(&a.transpose(), full);
        (v, s, u)
    };
    fix_signs(&mut u, &mut v, sigma.len());
    Ok(SvdTriple { u, sigma, v })
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn rotate<T: Real>(p: &mut [T], q: &mut [T], c: T, s: T) {
    for (x, y) in p.iter_mut().zip(q.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

fn split_pair<T>(cols: &mut [Vec<T>], p: usize, q: usize) -> (&mut [T], &mut [T]) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Jacobi on an m×n matrix with m ≥ n.
fn tall<T: Real>(a: &Matrix<T>, full: bool) -> (Matrix<T>, Vec<T>, Matrix<T>) {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();

    let tol = T::epsilon() * T::from_usize_lossy(m).sqrt();
    let mut norms = vec![T::zero(); n];
    for _ in 0..MAX_SWEEPS {
        for (nrm, col) in norms.iter_mut().zip(&w) {
            *nrm = dot(col, col);
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::lit(2.0);
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (wp, wq) = split_pair(&mut w, p, q);
                rotate(wp, wq, c, s);
                let (vp, vq) = split_pair(&mut v, p, q);
                rotate(vp, vq, c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<T> = w.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap().then(i.cmp(&j)));
    sigma = order.iter().map(|&i| sigma[i]).collect();
    let v_cols: Vec<Vec<T>> = order.iter().map(|&i| v[i].clone()).collect();
    let w_cols: Vec<Vec<T>> = order.iter().map(|&i| w[i].clone()).collect();

    let smax = sigma[0];
    let negligible = smax * T::epsilon() * T::from_usize_lossy(m.max(n));
    let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(if full { m } else { n });
    for (j, col) in w_cols.into_iter().enumerate() {
        let candidate = if sigma[j] > negligible && sigma[j] > T::zero() {
            let inv = T::one() / sigma[j];
            Some(col.into_iter().map(|x| x * inv).collect())
        } else {
            None
        };
        let accepted = candidate.and_then(|c| orthonormalize(c, &u_cols));
        let col = match accepted {
            Some(c) => c,
            None => complete(&u_cols, m),
        };
        u_cols.push(col);
    }
    if full {
        while u_cols.len() < m {
            let c = complete(&u_cols, m);
            u_cols.push(c);
        }
    }
    (
        Matrix::from_columns(m, &u_cols),
        sigma,
        Matrix::from_columns(n, &v_cols),
    )
}

/// Two passes of modified Gram-Schmidt against `basis`; `None` when the
/// candidate is (numerically) inside their span.
fn orthonormalize<T: Real>(mut x: Vec<T>, basis: &[Vec<T>]) -> Option<Vec<T>> {
    let start = dot(&x, &x).sqrt();
    if start == T::zero() {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let proj = dot(&x, b);
            for (xi, &bi) in x.iter_mut().zip(b) {
                *xi -= proj * bi;
            }
        }
    }
    let left = dot(&x, &x).sqrt();
    if left <= start * T::lit(1e-3) {
        return None;
    }
    let inv = T::one() / left;
    Some(x.into_iter().map(|v| v * inv).collect())
}

/// Next orthonormal completion vector, drawn from the standard basis.
fn complete<T: Real>(basis: &[Vec<T>], m: usize) -> Vec<T> {
    for i in 0..m {
        let mut e = vec![T::zero(); m];
        e[i] = T::one();
        if let Some(c) = orthonormalize(e, basis) {
            return c;
        }
    }
    unreachable!("basis of size {} cannot span R^{m}", basis.len())
}

fn fix_signs<T: Real>(u: &mut Matrix<T>, v: &mut Matrix<T>, paired: usize) {
    for j in 0..u.cols() {
        let mut best = 0;
        let mut best_abs = T::zero();
        for r in 0..u.rows() {
            let a = u[(r, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if u[(best, j)] < T::zero() {
            for r in 0..u.rows() {
                u[(r, j)] = -u[(r, j)];
            }
            if j < paired {
                for r in 0..v.rows() {
                    v[(r, j)] = -v[(r, j)];
                }
            }
        }
    }
}
