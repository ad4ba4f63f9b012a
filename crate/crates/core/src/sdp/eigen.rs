//! Dense symmetric eigendecomposition.
//!
//! Householder tridiagonalization followed by implicit-shift QL with
//! eigenvector accumulation — the classic EISPACK `tred2`/`tql2` pair,
//! written against the [`Scalar`] trait so it serves `f32` and `f64` alike.
//! Matrices here are small (`n ≤ 64`), so an O(n³) dense routine with no
//! external dependencies is the right tool.

use crate::mat::{Mat, SymMat};
use crate::scalar::Scalar;

/// Eigendecomposition `A = V·diag(values)·Vᵀ` of a symmetric matrix.
///
/// `values` ascend; column `k` of `vectors` is the unit eigenvector for
/// `values[k]`.
#[derive(Clone, Debug)]
pub struct SymEigen<F> {
    pub values: Vec<F>,
    pub vectors: Mat<F>,
}

/// Decompose a symmetric matrix. Symmetry is assumed, not checked: only the
/// lower triangle is read during tridiagonalization.
pub fn sym_eigen<F: Scalar>(a: &SymMat<F>) -> SymEigen<F> {
    let n = a.n();
    let mut v = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            v[i * n + j] = a.get(i, j);
        }
    }
    let mut d = vec![F::zero(); n];
    let mut e = vec![F::zero(); n];
    if n > 0 {
        tred2(n, &mut v, &mut d, &mut e);
        tql2(n, &mut v, &mut d, &mut e);
    }
    SymEigen { values: d, vectors: Mat::from_fn(n, n, |i, j| v[i * n + j]) }
}

/// Householder reduction of `v` (symmetric, row-major) to tridiagonal form;
/// on return `v` holds the accumulated transformation, `d` the diagonal and
/// `e` the subdiagonal.
fn tred2<F: Scalar>(n: usize, v: &mut [F], d: &mut [F], e: &mut [F]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }

    for i in (1..n).rev() {
        // Scale to avoid under/overflow.
        let mut scale = F::zero();
        let mut h = F::zero();
        for item in d.iter().take(i) {
            scale = scale + item.abs();
        }
        if scale == F::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = F::zero();
                v[j * n + i] = F::zero();
            }
        } else {
            // Generate Householder vector.
            for item in d.iter_mut().take(i) {
                *item = *item / scale;
                h = h + *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > F::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = F::zero();
            }

            // Apply similarity transformation to remaining columns.
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in (j + 1)..i {
                    g = g + v[k * n + j] * d[k];
                    e[k] = e[k] + v[k * n + j] * f;
                }
                e[j] = g;
            }
            f = F::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k * n + j] = v[k * n + j] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = F::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = F::one();
        let h = d[i + 1];
        if h != F::zero() {
            for k in 0..=i {
                d[k] = v[k * n + (i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = F::zero();
                for k in 0..=i {
                    g = g + v[k * n + (i + 1)] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] = v[k * n + j] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + (i + 1)] = F::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = F::zero();
    }
    v[(n - 1) * n + (n - 1)] = F::one();
    e[0] = F::zero();
}

/// Implicit-shift QL on the tridiagonal (d, e), accumulating eigenvectors
/// into `v`; sorts the spectrum ascending.
fn tql2<F: Scalar>(n: usize, v: &mut [F], d: &mut [F], e: &mut [F]) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = F::zero();

    let mut f = F::zero();
    let mut tst1 = F::zero();
    let eps = F::epsilon();
    for l in 0..n {
        // Find small subdiagonal element.
        tst1 = crate::scalar::pmax(tst1, d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }

        // If m == l, d[l] is an eigenvalue; otherwise iterate.
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                // Compute implicit shift.
                let mut g = d[l];
                let two = F::one() + F::one();
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(F::one());
                if p < F::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item = *item - h;
                }
                f = f + h;

                // Implicit QL transformation.
                p = d[m];
                let mut c = F::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = F::zero();
                let mut s2 = F::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    // Accumulate transformation.
                    for k in 0..n {
                        h = v[k * n + (i + 1)];
                        v[k * n + (i + 1)] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                // The implicit QL step converges cubically; 100 sweeps only
                // happens if rounding stalls progress, in which case the
                // current value is as good as it gets.
                if e[l].abs() <= eps * tst1 || iter >= 100 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = F::zero();
    }

    // Sort eigenvalues ascending, permuting eigenvectors along.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(k, i);
            for row in 0..n {
                v.swap(row * n + i, row * n + k);
            }
        }
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue<F: Scalar>(a: &SymMat<F>) -> F {
    sym_eigen(a).values.first().cloned().unwrap_or_else(F::zero)
}

/// Nearest (Frobenius) PSD matrix: clamp negative eigenvalues to zero.
pub fn psd_project<F: Scalar>(a: &SymMat<F>) -> SymMat<F> {
    let eig = sym_eigen(a);
    let n = a.n();
    let mut out = SymMat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = F::zero();
            for (k, &lam) in eig.values.iter().enumerate() {
                if lam > F::zero() {
                    acc = acc + lam * eig.vectors.get(i, k) * eig.vectors.get(j, k);
                }
            }
            out.set_sym(i, j, acc);
        }
    }
    out
}

/// Factor a (near-)PSD matrix as `R·Rᵀ` with rows of `R` indexed like `a`.
///
/// Eigenvalues below `clamp_floor` are treated as 0 and their columns are
/// dropped, so `R` is `n×d` with `d ≤ n`; columns come out in descending
/// eigenvalue order.
pub fn factor_psd<F: Scalar>(a: &SymMat<F>, clamp_floor: F) -> Mat<F> {
    let eig = sym_eigen(a);
    let n = a.n();
    let kept: Vec<usize> =
        (0..n).rev().filter(|&k| eig.values[k] > clamp_floor && eig.values[k] > F::zero()).collect();
    Mat::from_fn(n, kept.len(), |i, c| {
        let k = kept[c];
        eig.vectors.get(i, k) * eig.values[k].sqrt()
    })
}
