//! The vector relaxation: assembly, reference solutions, feasibility checks,
//! and a first-order solver.
//!
//! One vector `ū` per vertex, Gram matrix `X_uv = ⟨ū, v̄⟩`. The program:
//!
//! ```text
//! minimize    Σ_e max_{u,v ∈ e} ‖ū − v̄‖²          (linearized: Σ_e t_e)
//! subject to  Σ_v X_uv ≤ δn·X_uu                  (spread, per vertex)
//!             Σ_u X_uu = 1                         (normalization)
//!             X_uv + X_vw − X_uw ≤ X_vv            (triangle, per triple)
//!             0 ≤ X_uv ≤ X_uu                      (box, per pair)
//!             t_e ≥ X_uu + X_vv − 2X_uv            (epigraph, per pair in e)
//!             X ⪰ 0
//! ```
//!
//! The reference ("intended") solution for a candidate set `S` puts
//! `ū = e₁/√|S|` for `u ∈ S` and `ū = 0` otherwise; its objective equals the
//! expansion `φ(S)` exactly, which is what makes the relaxation sound. That
//! exactness claim is checked in exact rational arithmetic — see
//! [`intended_solution_exact`] and [`check_feasibility_exact`].

pub mod eigen;
mod solver;

pub use solver::{
    solve, solve_relaxation, solve_with_options, SolveStats, SolverOptions, StallReason,
};

use crate::hypergraph::{Hypergraph, VertexSet};
use crate::mat::{Mat, SymMat};
use crate::scalar::{pmax, ratio_floor_usize, ratio_to_f64, Rational, Ring, Scalar};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

/// Default solver tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default iteration budget.
pub const DEFAULT_MAX_ITERS: usize = 50_000;
/// Eigenvalue slack allowed below zero in PSD checks.
pub const DEFAULT_TOL_PSD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SdpError<F: Scalar = f64> {
    #[error("delta must be in (0, 1/2], got {0}")]
    BadDelta(Rational),
    #[error("delta*n = {deltan} < 1 admits no nonempty candidate set")]
    DegenerateCap { deltan: Rational },
    #[error("candidate set must be nonempty")]
    EmptySet,
    #[error("set size {size} exceeds the size cap delta*n = {cap}")]
    SetTooLarge { size: usize, cap: Rational },
    #[error(
        "solver stopped after {iterations} iterations without certifying tolerance {tol:?}: \
         {reason}; the attached solution (residual {residual:?}) may still be usable"
    )]
    NonConvergence {
        iterations: usize,
        /// Max residual of the attached (best recorded) solution.
        residual: F,
        tol: F,
        /// The convergence criterion that was still failing.
        reason: StallReason,
        /// Best iterate found; approximate but often serviceable.
        solution: Box<SdpSolution<F>>,
    },
}

/// Constraint-family sizes of a relaxation, under the documented counting
/// conventions (ordered triples and ordered pairs; mirrored triples coincide).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintCounts {
    pub spread: usize,
    pub normalization: usize,
    pub triangle: usize,
    #[serde(rename = "box")]
    pub box_: usize,
    pub epigraph: usize,
}

impl ConstraintCounts {
    pub fn total(&self) -> usize {
        self.spread + self.normalization + self.triangle + self.box_ + self.epigraph
    }
}

/// An assembled relaxation instance: the hypergraph's edges plus `δ`.
#[derive(Clone, Debug)]
pub struct RelaxationSpec {
    n: usize,
    delta: Rational,
    edges: Vec<Vec<u32>>,
}

/// Validate `0 < δ ≤ 1/2` (shared by relaxation building and rounding).
pub fn validate_delta(delta: Rational) -> Result<(), SdpError> {
    if delta > Rational::zero() && delta <= Rational::new(1, 2) {
        Ok(())
    } else {
        Err(SdpError::BadDelta(delta))
    }
}

/// Assemble the relaxation for a hypergraph at a given `δ`.
///
/// Rejects `δ ∉ (0, 1/2]` and the degenerate case `δn < 1` (no nonempty set
/// can satisfy the size bound).
pub fn build_relaxation(h: &Hypergraph, delta: Rational) -> Result<RelaxationSpec, SdpError> {
    validate_delta(delta)?;
    let n = h.num_vertices();
    let deltan = delta * Rational::from_integer(n as i64);
    if deltan < Rational::one() {
        return Err(SdpError::DegenerateCap { deltan });
    }
    Ok(RelaxationSpec { n, delta, edges: h.edges().to_vec() })
}

impl RelaxationSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> Rational {
        self.delta
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Exact size cap `⌊δn⌋`.
    pub fn size_cap(&self) -> usize {
        ratio_floor_usize(self.delta * Rational::from_integer(self.n as i64))
    }

    /// `δn` in the target scalar type.
    pub fn delta_n<T: Ring>(&self) -> T {
        let num = T::from_i64(*self.delta.numer()).expect("small integer");
        let den = T::from_i64(*self.delta.denom()).expect("small integer");
        let n = T::from_usize(self.n).expect("small integer");
        num * n / den
    }

    pub fn counts(&self) -> ConstraintCounts {
        let n = self.n;
        ConstraintCounts {
            spread: n,
            normalization: 1,
            triangle: n * n.saturating_sub(1) * n.saturating_sub(2),
            box_: n * n.saturating_sub(1),
            epigraph: self.edges.iter().map(|e| e.len() * (e.len() - 1) / 2).sum(),
        }
    }
}

/// Objective value induced by a Gram matrix: `Σ_e max_{u,v∈e} d²(u, v)`.
pub fn sdpcost_from_gram<T: Ring>(edges: &[Vec<u32>], gram: &SymMat<T>) -> T {
    let mut total = T::zero();
    for e in edges {
        let mut worst = T::zero();
        for (a, &u) in e.iter().enumerate() {
            for &v in &e[a + 1..] {
                worst = pmax(worst, gram.gram_dist_sq(u as usize, v as usize));
            }
        }
        total = total + worst;
    }
    total
}

/// Max violation per linear-constraint family, plus the objective-consistency
/// gap `|sdpcost − Σ_e max-pair(gram)|`. Runs over any [`Ring`], so the same
/// code yields exact rational residuals and float residuals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyResiduals<T> {
    pub spread: T,
    pub normalization: T,
    pub triangle: T,
    #[serde(rename = "box")]
    pub box_: T,
    pub objective: T,
}

impl<T: Ring> FamilyResiduals<T> {
    pub fn max(&self) -> T {
        let m = pmax(self.spread.clone(), self.normalization.clone());
        let m = pmax(m, self.triangle.clone());
        let m = pmax(m, self.box_.clone());
        pmax(m, self.objective.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.max() == T::zero()
    }
}

/// Evaluate all linear families on a Gram matrix.
pub fn family_residuals<T: Ring>(
    spec: &RelaxationSpec,
    gram: &SymMat<T>,
    sdpcost: &T,
) -> FamilyResiduals<T> {
    let n = spec.n;
    let delta_n: T = spec.delta_n();

    // Spread: Σ_v X_uv ≤ δn·X_uu.
    let mut spread = T::zero();
    for u in 0..n {
        let mut row_sum = T::zero();
        for v in 0..n {
            row_sum = row_sum + gram.get(u, v);
        }
        spread = pmax(spread, row_sum - delta_n.clone() * gram.get(u, u));
    }

    // Normalization: Σ_u X_uu = 1.
    let normalization = (gram.trace() - T::one()).abs();

    // Triangle: X_uv + X_vw − X_uw ≤ X_vv. (u,v,w) and (w,v,u) coincide, so
    // scanning unordered {u,w} per center v covers all ordered triples.
    let mut triangle = T::zero();
    for v in 0..n {
        for u in 0..n {
            if u == v {
                continue;
            }
            for w in (u + 1)..n {
                if w == v {
                    continue;
                }
                let lhs = gram.get(u, v) + gram.get(v, w) - gram.get(u, w) - gram.get(v, v);
                triangle = pmax(triangle, lhs);
            }
        }
    }

    // Box: 0 ≤ X_uv ≤ min(X_uu, X_vv) over pairs.
    let mut box_ = T::zero();
    for u in 0..n {
        for v in (u + 1)..n {
            let x = gram.get(u, v);
            box_ = pmax(box_, -x.clone());
            box_ = pmax(box_, x.clone() - gram.get(u, u));
            box_ = pmax(box_, x - gram.get(v, v));
        }
    }

    let objective = (sdpcost.clone() - sdpcost_from_gram(&spec.edges, gram)).abs();

    FamilyResiduals { spread: pmax(spread, T::zero()), normalization, triangle: pmax(triangle, T::zero()), box_: pmax(box_, T::zero()), objective }
}

/// Full residual summary stored on solutions (families + spectral checks).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualSummary<F> {
    pub spread: F,
    pub normalization: F,
    pub triangle: F,
    #[serde(rename = "box")]
    pub box_: F,
    pub objective: F,
    /// `max(0, −λ_min(X))`.
    pub psd: F,
    /// `max_uv |⟨row_u, row_v⟩ − X_uv|` for the recovered vectors.
    pub gram_vs_vectors: F,
}

impl<F: Scalar> ResidualSummary<F> {
    pub fn from_parts(families: &FamilyResiduals<F>, psd: F, gram_vs_vectors: F) -> Self {
        ResidualSummary {
            spread: families.spread,
            normalization: families.normalization,
            triangle: families.triangle,
            box_: families.box_,
            objective: families.objective,
            psd,
            gram_vs_vectors,
        }
    }

    pub fn max(&self) -> F {
        [self.spread, self.normalization, self.triangle, self.box_, self.objective, self.psd, self.gram_vs_vectors]
            .into_iter()
            .fold(F::zero(), pmax)
    }
}

/// A (floating-point) solution to the relaxation.
#[derive(Clone, Debug, Serialize)]
pub struct SdpSolution<F> {
    /// Gram matrix `X` (symmetric, PSD up to `tol_psd`, diag in [0, 1]).
    pub gram: SymMat<F>,
    /// `n×d` factorization: `⟨row_u, row_v⟩ = X_uv` up to `tol_psd`.
    pub vectors: Mat<F>,
    /// Objective `Σ_e max_{u,v∈e} ‖ū − v̄‖²` of `gram`.
    pub sdpcost: F,
    /// Residuals of `gram`/`vectors` against the source relaxation.
    pub residuals: ResidualSummary<F>,
    /// Solver metadata (`None` for analytically constructed solutions).
    pub stats: Option<SolveStats>,
}

/// Assemble a full [`SdpSolution`] from a Gram matrix: recover vectors by
/// eigendecomposition (negative eigenvalues clamped to 0), recompute the
/// objective, and attach fresh residuals.
pub fn complete_solution<F: Scalar>(
    spec: &RelaxationSpec,
    gram: SymMat<F>,
    stats: Option<SolveStats>,
) -> SdpSolution<F> {
    let n = spec.n;
    let sdpcost = sdpcost_from_gram(&spec.edges, &gram);
    let families = family_residuals(spec, &gram, &sdpcost);
    let vectors = eigen::factor_psd(&gram, F::zero());
    let mut gvv = F::zero();
    for u in 0..n {
        for v in u..n {
            gvv = pmax(gvv, (vectors.row_dot(u, v) - gram.get(u, v)).abs());
        }
    }
    let psd = pmax(-eigen::min_eigenvalue(&gram), F::zero());
    let residuals = ResidualSummary::from_parts(&families, psd, gvv);
    SdpSolution { gram, vectors, sdpcost, residuals, stats }
}

/// Verdict of [`check_feasibility`].
#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport<F> {
    pub residuals: ResidualSummary<F>,
    pub max_residual: F,
    pub tol: F,
    pub pass: bool,
}

/// Recompute every residual of a solution against a relaxation and compare to
/// `tol`.
pub fn check_feasibility<F: Scalar>(
    sol: &SdpSolution<F>,
    spec: &RelaxationSpec,
    tol: F,
) -> FeasibilityReport<F> {
    let families = family_residuals(spec, &sol.gram, &sol.sdpcost);
    let min_eig = eigen::min_eigenvalue(&sol.gram);
    let psd = pmax(-min_eig, F::zero());
    let mut gvv = F::zero();
    let n = spec.n;
    if sol.vectors.rows() == n {
        for u in 0..n {
            for v in u..n {
                gvv = pmax(gvv, (sol.vectors.row_dot(u, v) - sol.gram.get(u, v)).abs());
            }
        }
    }
    let residuals = ResidualSummary::from_parts(&families, psd, gvv);
    let max_residual = residuals.max();
    FeasibilityReport { residuals, max_residual, tol, pass: max_residual <= tol }
}

/// Reference solution in exact arithmetic: Gram `1/|S|` on `S×S`, 0 elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSdpSolution {
    pub gram: SymMat<Rational>,
    /// Objective value; equals the expansion `φ(S)` of the source set.
    pub sdpcost: Rational,
}

/// Verdict of [`check_feasibility_exact`]: rational residuals and an exact
/// PSD decision.
#[derive(Clone, Debug)]
pub struct ExactFeasibilityReport {
    pub families: FamilyResiduals<Rational>,
    pub psd_ok: bool,
}

impl ExactFeasibilityReport {
    /// True exactly when every residual is 0 and the Gram matrix is PSD.
    pub fn pass(&self) -> bool {
        self.psd_ok && self.families.is_zero()
    }
}

/// Build the reference solution for a candidate set `S` in exact arithmetic.
///
/// Requires `0 < |S| ≤ δn`; its objective then equals `φ(S)` exactly (with
/// `δ ≤ 1/2` the smaller side of `S` is `|S|` itself).
pub fn intended_solution_exact(
    h: &Hypergraph,
    s: &VertexSet,
    delta: Rational,
) -> Result<ExactSdpSolution, SdpError> {
    validate_delta(delta)?;
    if s.is_empty() {
        return Err(SdpError::EmptySet);
    }
    let n = h.num_vertices();
    let cap = delta * Rational::from_integer(n as i64);
    if Rational::from_integer(s.len() as i64) > cap {
        return Err(SdpError::SetTooLarge { size: s.len(), cap });
    }
    let inv = Rational::new(1, s.len() as i64);
    let gram = SymMat::from_fn(n, |i, j| {
        if s.contains(i as u32) && s.contains(j as u32) {
            inv
        } else {
            Rational::zero()
        }
    });
    let sdpcost = sdpcost_from_gram(h.edges(), &gram);
    Ok(ExactSdpSolution { gram, sdpcost })
}

/// Exact residuals of an exact solution (plus the exact PSD decision).
pub fn check_feasibility_exact(
    sol: &ExactSdpSolution,
    spec: &RelaxationSpec,
) -> ExactFeasibilityReport {
    let families = family_residuals(spec, &sol.gram, &sol.sdpcost);
    ExactFeasibilityReport { families, psd_ok: is_psd_exact(&sol.gram) }
}

/// Reference solution in the float scalar type, with vectors and residuals.
pub fn intended_solution<F: Scalar>(
    h: &Hypergraph,
    s: &VertexSet,
    delta: Rational,
) -> Result<SdpSolution<F>, SdpError> {
    let exact = intended_solution_exact(h, s, delta)?;
    let n = h.num_vertices();
    let gram = exact.gram.map(|r| F::from_f64(ratio_to_f64(*r)).expect("finite"));
    // Rank-1 factorization: a single coordinate 1/√|S| on members of S.
    let coord = F::from_usize(s.len()).expect("finite").sqrt().recip();
    let vectors = Mat::from_fn(n, 1, |u, _| {
        if s.contains(u as u32) {
            coord
        } else {
            F::zero()
        }
    });
    let sdpcost = F::from_f64(ratio_to_f64(exact.sdpcost)).expect("finite");
    let spec = build_relaxation(h, delta)?;
    let families = family_residuals(&spec, &gram, &sdpcost);
    let mut gvv = F::zero();
    for u in 0..n {
        for v in u..n {
            gvv = pmax(gvv, (vectors.row_dot(u, v) - gram.get(u, v)).abs());
        }
    }
    // Rank-1 by construction: λ_min(X) = 0 exactly.
    let residuals = ResidualSummary::from_parts(&families, F::zero(), gvv);
    Ok(SdpSolution { gram, vectors, sdpcost, residuals, stats: None })
}

/// Exact PSD test by symmetric Gaussian elimination with complete diagonal
/// pivoting (internally over `i128` rationals to postpone overflow).
///
/// A symmetric rational matrix is PSD iff this elimination never meets a
/// negative pivot and any all-zero-diagonal remainder is the zero block.
pub fn is_psd_exact(g: &SymMat<Rational>) -> bool {
    type R = Ratio<i128>;
    let n = g.n();
    let mut a: Vec<R> = g
        .as_slice()
        .iter()
        .map(|r| R::new(*r.numer() as i128, *r.denom() as i128))
        .collect();
    let mut active: Vec<usize> = (0..n).collect();

    while !active.is_empty() {
        // Complete diagonal pivoting: largest remaining diagonal entry.
        let &pivot = active
            .iter()
            .max_by(|&&i, &&j| a[i * n + i].cmp(&a[j * n + j]))
            .expect("nonempty active set");
        let p = a[pivot * n + pivot];
        if p < R::zero() {
            return false;
        }
        if p.is_zero() {
            // All remaining diagonals are ≤ 0 (pivot was maximal); PSD forces
            // the whole remaining block to vanish.
            return active.iter().all(|&i| {
                active.iter().all(|&j| a[i * n + j].is_zero()) && !(a[i * n + i] < R::zero())
            });
        }
        active.retain(|&i| i != pivot);
        // Schur complement on the remaining block.
        for &i in &active {
            let col_i = a[i * n + pivot];
            if col_i.is_zero() {
                continue;
            }
            for &j in &active {
                let update = col_i * a[pivot * n + j] / p;
                a[i * n + j] -= update;
            }
        }
    }
    true
}
