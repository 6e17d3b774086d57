//! Pareto dominance, dominated-region cell decomposition, hypervolume and the
//! truncation normalizers built on top of them.
//!
//! All objectives are maximized: `a` dominates `b` when `a ≥ b` componentwise
//! with at least one strict inequality.

mod decomposition;
mod hypervolume;

pub use decomposition::{
    decompose_dominated, decompose_dominating, Cell, CellDecomposition, Orientation,
    DEFAULT_MAX_CELLS,
};
pub use hypervolume::hypervolume;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Strict Pareto dominance of `a` over `b`. Panics when the dimensions differ.
#[inline]
pub fn dominates<T: Real>(a: &[T], b: &[T]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance between vectors of different length");
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// `a ⪯ b`: `a` is dominated by or equal to `b`. Panics when the dimensions differ.
#[inline]
pub fn dominated_or_equal<T: Real>(a: &[T], b: &[T]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance between vectors of different length");
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// [`dominates`] returning an error instead of panicking on a dimension mismatch.
pub fn try_dominates<T: Real>(a: &[T], b: &[T]) -> Result<bool> {
    check_dims(a, b)?;
    Ok(dominates(a, b))
}

/// [`dominated_or_equal`] returning an error instead of panicking on a dimension mismatch.
pub fn try_dominated_or_equal<T: Real>(a: &[T], b: &[T]) -> Result<bool> {
    check_dims(a, b)?;
    Ok(dominated_or_equal(a, b))
}

fn check_dims<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "vectors have dimensions {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Indices of the points not dominated by any other point, first occurrence of
/// exact duplicates kept, in input order.
pub fn non_dominated_indices<T: Real>(points: &[Vec<T>]) -> Vec<usize> {
    let mut keep = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            if dominates(q, p) || (j < i && q == p) {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    keep
}

/// `Z_O`, `Z_U` and their ratio for one Gaussian predictive distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationQuantities<T> {
    /// Probability of the region dominated by the sampled frontier.
    pub z_over: T,
    /// Probability of everything except the region dominating the sampled frontier.
    pub z_under: T,
    pub p_hat: T,
}

/// Computes `Z_O` from the dominated-region cells and `Z_U = 1 − P(dominating region)`
/// from the sign-flipped cells; both clamped to `[prob_floor, 1 − ε/2]`.
pub fn truncation_quantities<T: Real>(
    over: &CellDecomposition<T>,
    flipped: &CellDecomposition<T>,
    mean: &[T],
    std: &[T],
) -> TruncationQuantities<T> {
    debug_assert_eq!(over.orientation(), Orientation::Dominated);
    debug_assert_eq!(flipped.orientation(), Orientation::Dominating);
    let clamp = |p: T| p.max(T::prob_floor()).min(T::prob_ceil());
    let z_over = clamp(over.probability(mean, std));
    let z_under = clamp(T::one() - flipped.probability(mean, std)).max(z_over);
    TruncationQuantities {
        z_over,
        z_under,
        p_hat: z_over / z_under,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[2.0, 2.0], &[1.0, 1.0]));
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0]));
        assert!(!dominates(&[2.0, 1.0], &[1.0, 2.0]));
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(dominated_or_equal(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(try_dominates(&[1.0], &[1.0, 2.0]).is_err());
        assert!(try_dominated_or_equal(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let pts = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![0.0, 0.0]];
        assert_eq!(non_dominated_indices(&pts), vec![0, 1]);
        let dup = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(non_dominated_indices(&dup), vec![0]);
        assert!(non_dominated_indices::<f64>(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn dominance_is_strict_partial_order(
            a in prop::collection::vec(-2i32..3, 3),
            b in prop::collection::vec(-2i32..3, 3),
            c in prop::collection::vec(-2i32..3, 3),
        ) {
            let f = |v: &Vec<i32>| v.iter().map(|x| *x as f64).collect::<Vec<_>>();
            let (a, b, c) = (f(&a), f(&b), f(&c));
            prop_assert!(!dominates(&a, &a));
            if dominates(&a, &b) {
                prop_assert!(!dominates(&b, &a));
                if dominates(&b, &c) {
                    prop_assert!(dominates(&a, &c));
                }
            }
        }

        #[test]
        fn filter_is_idempotent(pts in prop::collection::vec(prop::collection::vec(0i32..5, 3), 0..30)) {
            let pts: Vec<Vec<f64>> = pts.iter().map(|v| v.iter().map(|x| *x as f64).collect()).collect();
            let once: Vec<Vec<f64>> = non_dominated_indices(&pts).into_iter().map(|i| pts[i].clone()).collect();
            let twice: Vec<Vec<f64>> = non_dominated_indices(&once).into_iter().map(|i| once[i].clone()).collect();
            prop_assert_eq!(once, twice);
        }
    }
}
