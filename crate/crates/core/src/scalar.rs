//! Scalar abstractions: one code path for exact rationals and floats.
//!
//! Two layers of genericity:
//!
//! * [`Ring`] — everything needed to *evaluate* linear/quadratic expressions
//!   and compare them: the Gram-matrix constraint algebra is written against
//!   this trait so it runs bit-exactly over [`Rational`] and approximately
//!   over `f32`/`f64` with the same code.
//! * [`Scalar`] — [`Ring`] plus `Float`: what the iterative solver, the
//!   normalization map, and the samplers need (square roots, exp, NaN checks).
//!
//! `Rational` deliberately backs exactness-critical quantities (expansion
//! values, size caps, reference-solution residuals): e.g. with δ = 1/49 and
//! n = 49 the size cap `⌊δn⌋` must be 1, while `f64` computes
//! `(1.0/49.0) × 49.0 = 0.999…` and floors it to 0 — silently outlawing
//! every candidate set.

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, Num, Signed, Zero};

/// Exact rational number used at API boundaries where exactness matters.
pub type Rational = Ratio<i64>;

/// Commutative-ring-with-comparison scalars: the constraint-evaluation layer.
///
/// Implemented by `f32`, `f64`, and [`Rational`] via the blanket impl.
pub trait Ring:
    Num + Signed + FromPrimitive + PartialOrd + Clone + std::fmt::Debug + Send + Sync + 'static
{
}

impl<T> Ring for T where
    T: Num + Signed + FromPrimitive + PartialOrd + Clone + std::fmt::Debug + Send + Sync + 'static
{
}

/// Floating-point scalars for the numerical solver and samplers.
///
/// Implemented by `f32` and `f64` via the blanket impl; `Rational` is
/// excluded (no `Float`), keeping exact and approximate paths apart.
pub trait Scalar: Ring + Float + std::iter::Sum {}

impl<T> Scalar for T where T: Ring + Float + std::iter::Sum {}

/// `max` for types that are only `PartialOrd` (prefers `a` on ties/NaN).
pub fn pmax<T: PartialOrd>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// `min` for types that are only `PartialOrd` (prefers `a` on ties/NaN).
pub fn pmin<T: PartialOrd>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Exact rational → `f64`, used when exact quantities cross into numerics.
pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Largest integer `k ≥ 0` with `k ≤ r`, as `usize` (0 for negative `r`).
///
/// Size caps like `⌊δn⌋` and `⌊(1+ε)δn⌋` go through this so they are exact.
pub fn ratio_floor_usize(r: Rational) -> usize {
    if r < Rational::zero() {
        0
    } else {
        r.floor().to_integer() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn floor_of_exact_fraction_times_count_is_exact() {
        // The motivating case: a 1/49 share of 49 must floor to 1, not 0.
        let share = Rational::new(1, 49);
        assert_eq!(ratio_floor_usize(share * Rational::from_integer(49)), 1);
        // f64 reproduces the failure this type exists to avoid.
        assert_eq!(((1.0_f64 / 49.0) * 49.0).floor() as usize, 0);
    }

    #[test]
    fn floor_handles_boundaries() {
        assert_eq!(ratio_floor_usize(Rational::new(3, 2)), 1);
        assert_eq!(ratio_floor_usize(Rational::from_integer(2)), 2);
        assert_eq!(ratio_floor_usize(Rational::new(-1, 2)), 0);
        assert_eq!(ratio_floor_usize(Rational::zero()), 0);
    }

    #[test]
    fn generic_ring_code_runs_over_both_scalar_kinds() {
        fn affine<T: Ring>(x: T, a: T, b: T) -> T {
            a * x + b
        }
        assert_eq!(
            affine(Rational::new(1, 3), Rational::from_integer(3), Rational::one()),
            Rational::from_integer(2)
        );
        assert_eq!(affine(0.5_f64, 2.0, 1.0), 2.0);
    }
}
