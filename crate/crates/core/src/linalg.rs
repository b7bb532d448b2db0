//! Small dense linear-algebra kernels, generic over [`Float`].
//!
//! Sizes in this crate are modest (p <= a few hundred), so the routines favour
//! accuracy over blocking: QR by twice-iterated modified Gram-Schmidt, SVD by
//! one-sided Jacobi on the triangular factor, symmetric eigenproblems by
//! cyclic Jacobi.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::Float;

/// Thin QR factorisation `a = q * r` of an `m x n` matrix with `m >= n`.
///
/// Columns that are numerically dependent on their predecessors get a zero
/// column in `q` and a zero row in `r`, so `q` has orthonormal *non-zero*
/// columns and the product still reproduces `a`.
pub fn qr_mgs<F: Float>(a: ArrayView2<F>) -> (Array2<F>, Array2<F>) {
    let (m, n) = a.dim();
    let mut q = a.to_owned();
    let mut r = Array2::<F>::zeros((n, n));
    let drop_tol = F::epsilon() * F::cst(16.0);
    for j in 0..n {
        let orig_norm = q.column(j).dot(&q.column(j)).sqrt();
        // Two passes of MGS keep the basis orthogonal to working precision.
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i).to_owned();
                let proj = qi.dot(&q.column(j));
                r[[i, j]] += proj;
                let mut cj = q.column_mut(j);
                cj.scaled_add(-proj, &qi);
            }
        }
        let norm = q.column(j).dot(&q.column(j)).sqrt();
        if norm <= drop_tol * orig_norm || norm == F::zero() || m == 0 {
            q.column_mut(j).fill(F::zero());
            r[[j, j]] = F::zero();
        } else {
            q.column_mut(j).mapv_inplace(|v| v / norm);
            r[[j, j]] = norm;
        }
    }
    (q, r)
}

/// Thin singular value decomposition `a = u * diag(s) * v^T`, with `s` sorted
/// in descending order and `k = min(m, n)` triplets.
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub u: Array2<F>,
    pub s: Array1<F>,
    pub v: Array2<F>,
}

impl<F: Float> Svd<F> {
    /// Numerical rank with the usual `max(m, n) * eps * s_max` cutoff.
    pub fn rank(&self) -> usize {
        let cutoff = self.default_cutoff();
        self.s.iter().filter(|&&v| v > cutoff).count()
    }

    fn default_cutoff(&self) -> F {
        let dim = self.u.nrows().max(self.v.nrows());
        let smax = self.s.iter().cloned().fold(F::zero(), F::max);
        F::from_count(dim.max(1)) * F::epsilon() * smax
    }

    /// Minimum-norm least-squares solution `a^+ b`.
    pub fn solve_pinv(&self, b: ArrayView1<F>) -> Array1<F> {
        let cutoff = self.default_cutoff();
        let utb = self.u.t().dot(&b);
        let scaled = Array1::from_iter(utb.iter().zip(self.s.iter()).map(|(&c, &sv)| {
            if sv > cutoff {
                c / sv
            } else {
                F::zero()
            }
        }));
        self.v.dot(&scaled)
    }
}

pub fn svd<F: Float>(a: ArrayView2<F>) -> Svd<F> {
    let (m, n) = a.dim();
    if m >= n {
        let (q, r) = qr_mgs(a);
        let (ur, s, v) = jacobi_square_svd(r);
        Svd { u: q.dot(&ur), s, v }
    } else {
        let t = svd(a.t());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

pub fn singular_values<F: Float>(a: ArrayView2<F>) -> Array1<F> {
    let (m, n) = a.dim();
    let r = if m >= n {
        qr_mgs(a).1
    } else {
        qr_mgs(a.t()).1
    };
    jacobi_square_svd(r).1
}

/// One-sided (Hestenes) Jacobi SVD of a square matrix.
fn jacobi_square_svd<F: Float>(a: Array2<F>) -> (Array2<F>, Array1<F>, Array2<F>) {
    let n = a.ncols();
    let mut w = a;
    let mut v = Array2::<F>::eye(n);
    let tol = F::epsilon() * F::from_count(n.max(1));
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (alpha, beta, gamma) = {
                    let ci = w.column(i);
                    let cj = w.column(j);
                    (ci.dot(&ci), cj.dot(&cj), ci.dot(&cj))
                };
                if gamma == F::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (F::cst(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let sn = c * t;
                rotate_columns(&mut w, i, j, c, sn);
                rotate_columns(&mut v, i, j, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s = Array1::<F>::zeros(n);
    let mut u = Array2::<F>::zeros((w.nrows(), n));
    for k in 0..n {
        let norm = w.column(k).dot(&w.column(k)).sqrt();
        s[k] = norm;
        if norm > F::zero() {
            u.column_mut(k).assign(&w.column(k).mapv(|x| x / norm));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap_or(std::cmp::Ordering::Equal));
    (
        u.select(Axis(1), &order),
        s.select(Axis(0), &order),
        v.select(Axis(1), &order),
    )
}

fn rotate_columns<F: Float>(m: &mut Array2<F>, i: usize, j: usize, c: F, s: F) {
    for row in 0..m.nrows() {
        let a = m[[row, i]];
        let b = m[[row, j]];
        m[[row, i]] = c * a - s * b;
        m[[row, j]] = s * a + c * b;
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in descending order; eigenvectors are the
/// matching columns of the second matrix.
pub fn symmetric_eigen<F: Float>(a: ArrayView2<F>) -> (Array1<F>, Array2<F>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigen needs a square matrix");
    let mut m = a.to_owned();
    let mut v = Array2::<F>::eye(n);
    for _sweep in 0..100 {
        let off: F = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        let scale: F = m.iter().map(|x| *x * *x).sum();
        if off <= F::epsilon() * F::epsilon() * scale || off == F::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (F::cst(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (F::one() + theta * theta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }
    let diag = m.diag().to_owned();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[b].partial_cmp(&diag[a]).unwrap_or(std::cmp::Ordering::Equal));
    (diag.select(Axis(0), &order), v.select(Axis(1), &order))
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// when a non-positive pivot is met.
pub fn cholesky<F: Float>(a: ArrayView2<F>) -> Option<Array2<F>> {
    let n = a.nrows();
    let mut l = Array2::<F>::zeros((n, n));
    for j in 0..n {
        let d = a[[j, j]] - l.slice(s![j, ..j]).dot(&l.slice(s![j, ..j]));
        if !(d > F::zero()) {
            return None;
        }
        let ljj = d.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let v = a[[i, j]] - l.slice(s![i, ..j]).dot(&l.slice(s![j, ..j]));
            l[[i, j]] = v / ljj;
        }
    }
    Some(l)
}

/// Solves `l l^T x = b` given the lower Cholesky factor `l`.
pub fn cholesky_solve<F: Float>(l: ArrayView2<F>, b: ArrayView1<F>) -> Array1<F> {
    let n = l.nrows();
    let mut z = Array1::<F>::zeros(n);
    for i in 0..n {
        let acc = b[i] - l.slice(s![i, ..i]).dot(&z.slice(s![..i]));
        z[i] = acc / l[[i, i]];
    }
    let mut x = Array1::<F>::zeros(n);
    for i in (0..n).rev() {
        let mut acc = z[i];
        for k in (i + 1)..n {
            acc -= l[[k, i]] * x[k];
        }
        x[i] = acc / l[[i, i]];
    }
    x
}
