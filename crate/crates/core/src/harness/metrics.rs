use crate::error::{Error, Result};
use crate::geometry::hypervolume;
use crate::moo::{non_dominated_filter, ParetoSet};

/// Offset below the reference frontier's componentwise minimum.
pub const REFERENCE_POINT_OFFSET: f64 = 1e-6;

/// Reference point and hypervolume used to normalize observed hypervolumes.
#[derive(Debug, Clone, PartialEq)]
pub struct RhvScale {
    pub reference_point: Vec<f64>,
    pub reference_hypervolume: f64,
}

impl RhvScale {
    pub fn new(reference: &ParetoSet<f64>) -> Result<Self> {
        let Some(l) = reference.dim() else {
            return Err(Error::invalid("reference frontier is empty"));
        };
        let reference_point: Vec<f64> = (0..l)
            .map(|j| {
                reference
                    .points()
                    .iter()
                    .map(|p| p[j])
                    .fold(f64::INFINITY, f64::min)
                    - REFERENCE_POINT_OFFSET
            })
            .collect();
        let reference_hypervolume = hypervolume(reference.points(), &reference_point)?;
        if !(reference_hypervolume > 0.0) {
            return Err(Error::numerical("reference frontier has zero hypervolume"));
        }
        Ok(Self {
            reference_point,
            reference_hypervolume,
        })
    }

    /// Hypervolume of the non-dominated subset of `observed` (points not above the
    /// reference point contribute nothing).
    pub fn hypervolume(&self, observed: &[Vec<f64>]) -> Result<f64> {
        if observed.is_empty() {
            return Ok(0.0);
        }
        let front = non_dominated_filter(observed);
        hypervolume(front.points(), &self.reference_point)
    }

    pub fn rhv(&self, observed: &[Vec<f64>]) -> Result<f64> {
        Ok(self.hypervolume(observed)? / self.reference_hypervolume)
    }
}

/// Relative hypervolume of `observed` against `reference`.
pub fn rhv(observed: &[Vec<f64>], reference: &ParetoSet<f64>) -> Result<f64> {
    RhvScale::new(reference)?.rhv(observed)
}
