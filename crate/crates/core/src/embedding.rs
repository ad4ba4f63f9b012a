//! Normalization of relaxation solutions into unit-length embeddings.
//!
//! The rounding schemes need vectors that are either zero or unit length,
//! with inner products rescaled as `⟨φ(ū), φ(v̄)⟩ = X_uv / max(‖ū‖², ‖v̄‖²)`.
//! This module builds that target Gram matrix, factorizes it (clamping
//! numerically negative eigenvalues), and verifies the two metric properties
//! the downstream analysis leans on:
//!
//! 1. squared distances `‖φ(ū) − φ(v̄)‖²` still satisfy the triangle
//!    inequality, and
//! 4. normalization at most doubles rescaled distances:
//!    `‖φ(ū) − φ(v̄)‖² ≤ 2‖ū − v̄‖² / max(‖ū‖², ‖v̄‖²)`.
//!
//! (Properties 2 and 3 — the rescaled inner products and unit norms — hold by
//! construction on the target Gram matrix and within `tol` after
//! factorization.) Vectors with `‖ū‖² ≤ TOL_ZERO` map to the zero row; they
//! can never be selected by a positive norm threshold downstream.

use serde::Serialize;
use thiserror::Error;

use crate::mat::{Mat, SymMat};
use crate::scalar::{pmax, Scalar};
use crate::sdp::eigen::{factor_psd, min_eigenvalue};
use crate::sdp::{SdpSolution, DEFAULT_TOL_PSD};

/// Squared norms at or below this are treated as the zero vector.
pub const TOL_ZERO: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EmbeddingError<F: Scalar> {
    #[error(
        "solution cannot be normalized: {reason} (residual {residual:?} beyond \
         threshold {threshold:?})"
    )]
    NotNormalizable { reason: &'static str, residual: F, threshold: F },
}

/// A unit-or-zero embedding `φ` of a relaxation solution.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedEmbedding<F> {
    /// Rows are `φ(ū)`: unit vectors up to `tol`, or exactly zero rows.
    pub phi: Mat<F>,
    /// Target Gram matrix (pre-factorization, exact by construction).
    pub target_gram: SymMat<F>,
    /// Squared norms `‖ū‖²` of the source vectors.
    pub source_norm_sq: Vec<F>,
    /// Squared distances `‖ū − v̄‖²` of the source vectors.
    pub source_dist_sq: SymMat<F>,
    /// Largest violation of the squared-distance triangle inequality on `φ`.
    pub triangle_residual: F,
    /// Largest violation of the distance-doubling bound on `φ`.
    pub contraction_residual: F,
    /// Largest deviation `|⟨φ(ū), φ(v̄)⟩ − M_uv|` introduced by factorization.
    pub factorization_residual: F,
}

impl<F: Scalar> NormalizedEmbedding<F> {
    pub fn n(&self) -> usize {
        self.phi.rows()
    }

    pub fn dim(&self) -> usize {
        self.phi.cols()
    }

    /// Whether vertex `u`'s source vector was (numerically) zero.
    pub fn is_zero(&self, u: usize) -> bool {
        self.source_norm_sq[u] <= F::from_f64(TOL_ZERO).expect("representable")
    }

    /// Squared distance `‖φ(ū) − φ(v̄)‖²`.
    pub fn phi_dist_sq(&self, u: usize, v: usize) -> F {
        self.phi.row_dist_sq(u, v)
    }
}

/// Normalize a relaxation solution into a unit-or-zero embedding.
///
/// Builds the target Gram matrix `M` (`M_uu = 1` for nonzero vectors,
/// `M_uv = X_uv / max(X_uu, X_vv)`, zero rows for zero vectors), clamps
/// eigenvalues in `[−threshold, 0)` to zero, and factorizes. Fails with
/// [`EmbeddingError::NotNormalizable`] when `M` has an eigenvalue below
/// `−max(tol_psd·n, tol)` or when a verified property is violated beyond
/// `tol` after factorization — both symptoms that the input was not actually
/// a near-feasible solution.
pub fn normalize<F: Scalar>(
    sol: &SdpSolution<F>,
    tol: F,
) -> Result<NormalizedEmbedding<F>, EmbeddingError<F>> {
    let gram = &sol.gram;
    let n = gram.n();
    let zero_cut = F::from_f64(TOL_ZERO).expect("representable");

    let source_norm_sq: Vec<F> = (0..n).map(|u| gram.get(u, u)).collect();
    let nonzero: Vec<bool> = source_norm_sq.iter().map(|&s| s > zero_cut).collect();

    let target_gram = SymMat::from_fn(n, |u, v| {
        if !nonzero[u] || !nonzero[v] {
            F::zero()
        } else if u == v {
            F::one()
        } else {
            gram.get(u, v) / pmax(source_norm_sq[u], source_norm_sq[v])
        }
    });

    let tol_psd = F::from_f64(DEFAULT_TOL_PSD).expect("representable");
    let psd_threshold = pmax(tol_psd * F::from_usize(n).expect("representable"), tol);
    let min_eig = min_eigenvalue(&target_gram);
    if min_eig < -psd_threshold {
        return Err(EmbeddingError::NotNormalizable {
            reason: "target Gram matrix has a significantly negative eigenvalue",
            residual: -min_eig,
            threshold: psd_threshold,
        });
    }

    let phi = factor_psd(&target_gram, F::zero());

    // How far factorization strayed from the target Gram matrix (covers the
    // unit-norm and rescaled-inner-product properties).
    let mut factorization_residual = F::zero();
    for u in 0..n {
        for v in u..n {
            let dev = (phi.row_dot(u, v) - target_gram.get(u, v)).abs();
            factorization_residual = pmax(factorization_residual, dev);
        }
    }
    if factorization_residual > tol {
        return Err(EmbeddingError::NotNormalizable {
            reason: "factorized embedding deviates from the target Gram matrix",
            residual: factorization_residual,
            threshold: tol,
        });
    }

    // Pairwise φ distances once; the property scans below reuse them.
    let phi_dist = SymMat::from_fn(n, |u, v| phi.row_dist_sq(u, v));
    let source_dist_sq = SymMat::from_fn(n, |u, v| gram.gram_dist_sq(u, v));

    // Squared-distance triangle inequality on all triples.
    let mut triangle_residual = F::zero();
    for v in 0..n {
        for u in 0..n {
            if u == v {
                continue;
            }
            for w in (u + 1)..n {
                if w == v {
                    continue;
                }
                let lhs = phi_dist.get(u, w) - phi_dist.get(u, v) - phi_dist.get(v, w);
                triangle_residual = pmax(triangle_residual, lhs);
            }
        }
    }
    if triangle_residual > tol {
        return Err(EmbeddingError::NotNormalizable {
            reason: "squared-distance triangle inequality fails on the embedding",
            residual: triangle_residual,
            threshold: tol,
        });
    }

    // Distance doubling: ‖φ(ū) − φ(v̄)‖² ≤ 2‖ū − v̄‖² / max(‖ū‖², ‖v̄‖²).
    let two = F::one() + F::one();
    let mut contraction_residual = F::zero();
    for u in 0..n {
        for v in (u + 1)..n {
            let denom = pmax(source_norm_sq[u], source_norm_sq[v]);
            if denom <= zero_cut {
                continue;
            }
            let bound = two * source_dist_sq.get(u, v) / denom;
            contraction_residual = pmax(contraction_residual, phi_dist.get(u, v) - bound);
        }
    }
    if contraction_residual > tol {
        return Err(EmbeddingError::NotNormalizable {
            reason: "distance-doubling bound fails on the embedding",
            residual: contraction_residual,
            threshold: tol,
        });
    }

    Ok(NormalizedEmbedding {
        phi,
        target_gram,
        source_norm_sq,
        source_dist_sq,
        triangle_residual,
        contraction_residual,
        factorization_residual,
    })
}
