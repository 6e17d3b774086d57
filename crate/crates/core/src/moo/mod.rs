//! Pareto sets and the NSGA-II solver used to sample frontiers.

mod nsga2;

pub use nsga2::{crowding_distance, fast_non_dominated_sort, nsga2_solve, Nsga2Config};

use crate::error::{Error, Result};
use crate::geometry::{dominates, non_dominated_indices};
use crate::scalar::Real;

/// Mutually non-dominated, duplicate-free objective vectors with optional preimages.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoSet<T> {
    points: Vec<Vec<T>>,
    inputs: Option<Vec<Vec<T>>>,
}

impl<T: Real> ParetoSet<T> {
    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            inputs: None,
        }
    }

    /// Keeps the non-dominated subset of `points`.
    pub fn from_points(points: &[Vec<T>]) -> Result<Self> {
        check_shape(points)?;
        Ok(non_dominated_filter(points))
    }

    /// Keeps the non-dominated subset of `points` together with their aligned inputs.
    pub fn from_points_with_inputs(points: &[Vec<T>], inputs: &[Vec<T>]) -> Result<Self> {
        check_shape(points)?;
        if points.len() != inputs.len() {
            return Err(Error::invalid("points and inputs are not aligned"));
        }
        let keep = non_dominated_indices(points);
        Ok(Self {
            points: keep.iter().map(|&i| points[i].clone()).collect(),
            inputs: Some(keep.iter().map(|&i| inputs[i].clone()).collect()),
        })
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn inputs(&self) -> Option<&[Vec<T>]> {
        self.inputs.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Vec::len)
    }

    /// Checks mutual non-dominance and absence of duplicates.
    pub fn is_valid(&self) -> bool {
        for (i, p) in self.points.iter().enumerate() {
            for (j, q) in self.points.iter().enumerate() {
                if i != j && (dominates(q, p) || q == p) {
                    return false;
                }
            }
        }
        true
    }
}

fn check_shape<T>(points: &[Vec<T>]) -> Result<()> {
    if let Some(first) = points.first() {
        if points.iter().any(|p| p.len() != first.len()) {
            return Err(Error::invalid("points have inconsistent dimension"));
        }
    }
    Ok(())
}

/// The points not dominated by any other, duplicates collapsed to their first occurrence.
pub fn non_dominated_filter<T: Real>(points: &[Vec<T>]) -> ParetoSet<T> {
    ParetoSet {
        points: non_dominated_indices(points)
            .into_iter()
            .map(|i| points[i].clone())
            .collect(),
        inputs: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_examples() {
        let s = non_dominated_filter(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(s.points(), &[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let s = non_dominated_filter(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(s.points(), &[vec![1.0, 1.0]]);
        assert!(non_dominated_filter::<f64>(&[]).is_empty());
    }

    #[test]
    fn inputs_stay_aligned() {
        let s = ParetoSet::from_points_with_inputs(
            &[vec![0.0, 0.0], vec![1.0, 2.0]],
            &[vec![0.1], vec![0.9]],
        )
        .unwrap();
        assert_eq!(s.points(), &[vec![1.0, 2.0]]);
        assert_eq!(s.inputs().unwrap(), &[vec![0.9]]);
        assert!(s.is_valid());
    }

    #[test]
    fn ragged_points_rejected() {
        assert!(ParetoSet::from_points(&[vec![0.0], vec![0.0, 1.0]]).is_err());
    }
}
