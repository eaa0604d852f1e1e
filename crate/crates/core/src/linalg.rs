//! Small dense kernels: symmetric eigenvalues, top eigenvalue, thin SVD.
//!
//! Matrices here are small (a cluster's indicator-expanded columns or one
//! coefficient block), so the routines favour accuracy and simplicity.

use ndarray::{Array1, Array2, ShapeBuilder};

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Above this order the top eigenvalue comes from power iteration.
pub const DENSE_EIGEN_LIMIT: usize = 64;

const POWER_TOL: f64 = 1e-9;
const POWER_MAX_ITER: usize = 1000;

/// All eigenvalues of a symmetric `n × n` matrix stored row-major, sorted
/// descending. Householder reduction to tridiagonal form followed by
/// implicit QL.
pub fn sym_eigenvalues<T: Scalar>(a: &[T], n: usize) -> Result<Vec<T>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            what: "symmetric matrix",
            expected: n * n,
            found: a.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut m, n, &mut d, &mut e);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

fn tridiagonalize<T: Scalar>(a: &mut [T], n: usize, d: &mut [T], e: &mut [T]) {
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale: T = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == T::zero() {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    e[0] = T::zero();
    for i in 0..n {
        d[i] = a[idx(i, i)];
    }
}

fn tridiagonal_ql<T: Scalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::DegenerateInput(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix
/// (row-major). Dense decomposition up to [`DENSE_EIGEN_LIMIT`], power
/// iteration above.
pub fn top_eigenvalue<T: Scalar>(a: &[T], n: usize) -> Result<T> {
    if n == 0 {
        return Ok(T::zero());
    }
    if n == 1 {
        return Ok(a[0]);
    }
    if n <= DENSE_EIGEN_LIMIT {
        return Ok(sym_eigenvalues(a, n)?[0]);
    }
    power_iteration(a, n, T::lit(POWER_TOL), POWER_MAX_ITER)
}

/// Power iteration for the dominant eigenvalue of a PSD matrix.
pub fn power_iteration<T: Scalar>(a: &[T], n: usize, tol: T, max_iter: usize) -> Result<T> {
    // Start from the diagonal, which is never orthogonal to the dominant
    // direction of a nonzero PSD matrix with a nonzero diagonal.
    let mut v: Vec<T> = (0..n).map(|i| a[i * n + i] + T::lit(1e-3)).collect();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![T::zero(); n];
    let mut lambda = T::zero();
    for _ in 0..max_iter {
        for i in 0..n {
            w[i] = dot(&a[i * n..(i + 1) * n], &v);
        }
        let next = dot(&v, &w);
        let nw = dot(&w, &w).sqrt();
        if nw == T::zero() {
            return Ok(T::zero());
        }
        for i in 0..n {
            v[i] = w[i] / nw;
        }
        if (next - lambda).abs() <= tol * next.abs().max(T::one()) {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

/// Thin singular value decomposition `w = u · diag(s) · vᵀ`, singular values
/// descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Array2<T>,
    pub s: Array1<T>,
    pub v: Array2<T>,
}

/// One-sided Jacobi SVD.
pub fn svd<T: Scalar>(w: &Array2<T>) -> Result<Svd<T>> {
    let (rows, cols) = w.dim();
    if rows >= cols {
        one_sided_jacobi(w)
    } else {
        let t = one_sided_jacobi(&w.t().to_owned())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn one_sided_jacobi<T: Scalar>(w: &Array2<T>) -> Result<Svd<T>> {
    let (m, n) = w.dim();
    // Column-major work copies so that columns are contiguous.
    let mut a: Vec<Vec<T>> = (0..n).map(|j| w.column(j).to_vec()).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut c = vec![T::zero(); n];
            c[j] = T::one();
            c
        })
        .collect();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut converged = false;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::DegenerateInput("Jacobi SVD failed to converge".into()));
    }
    let mut order: Vec<(usize, T)> = a.iter().map(|c| dot(c, c).sqrt()).enumerate().collect();
    order.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.0.cmp(&y.0))
    });
    let mut u = Array2::<T>::zeros((m, n).f());
    let mut vv = Array2::<T>::zeros((n, n).f());
    let mut s = Array1::<T>::zeros(n);
    let smax = order.first().map(|o| o.1).unwrap_or(T::zero());
    let tiny = smax * eps * T::from_usize_lossy(m.max(n));
    let mut deficient = Vec::new();
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s[k] = sigma;
        for i in 0..n {
            vv[[i, k]] = v[j][i];
        }
        if sigma > tiny && sigma > T::zero() {
            for i in 0..m {
                u[[i, k]] = a[j][i] / sigma;
            }
        } else {
            deficient.push(k);
        }
    }
    complete_orthonormal(&mut u, &deficient);
    Ok(Svd { u, s, v: vv })
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fill the listed columns of `u` with unit vectors orthogonal to the rest.
fn complete_orthonormal<T: Scalar>(u: &mut Array2<T>, missing: &[usize]) {
    let (m, n) = u.dim();
    let mut filled: Vec<bool> = vec![true; n];
    for &k in missing {
        filled[k] = false;
    }
    for &k in missing {
        for basis in 0..m {
            let mut cand = vec![T::zero(); m];
            cand[basis] = T::one();
            for _pass in 0..2 {
                for j in 0..n {
                    if !filled[j] {
                        continue;
                    }
                    let col = u.column(j);
                    let proj: T = col.iter().zip(&cand).map(|(&a, &b)| a * b).sum();
                    for i in 0..m {
                        cand[i] -= proj * col[i];
                    }
                }
            }
            let nc = dot(&cand, &cand).sqrt();
            if nc > T::lit(0.5) {
                for i in 0..m {
                    u[[i, k]] = cand[i] / nc;
                }
                filled[k] = true;
                break;
            }
        }
    }
}
