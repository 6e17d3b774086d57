use crate::error::{Error, Result};
use crate::scalar::Real;

use super::decomposition::split_region;
use super::non_dominated_indices;

/// Lebesgue measure of the region dominated by `frontier` and bounded below by `reference`.
///
/// Points not strictly above the reference in every objective contribute nothing and are dropped.
pub fn hypervolume<T: Real>(frontier: &[Vec<T>], reference: &[T]) -> Result<T> {
    if frontier.iter().any(|p| p.len() != reference.len()) {
        return Err(Error::invalid("frontier and reference dimensions differ"));
    }
    let clipped: Vec<Vec<T>> = frontier
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v > r))
        .cloned()
        .collect();
    if clipped.is_empty() {
        return Ok(T::zero());
    }
    let points: Vec<Vec<T>> = non_dominated_indices(&clipped)
        .into_iter()
        .map(|i| clipped[i].clone())
        .collect();
    let hi: Vec<T> = (0..reference.len())
        .map(|l| points.iter().map(|p| p[l]).fold(T::neg_infinity(), T::max))
        .collect();
    let mut total = T::zero();
    split_region(points, reference.to_vec(), hi, &mut |lo, up| {
        total += lo
            .iter()
            .zip(up)
            .fold(T::one(), |acc, (l, u)| acc * (*u - *l));
        Ok(())
    })?;
    Ok(total)
}
