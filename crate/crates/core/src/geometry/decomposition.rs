//! Recursive split of a dominated region into disjoint hyper-rectangles.
//!
//! Within a box `(lo, hi]` holding mutually non-dominated points, the pivot's
//! own box `(lo, p]` is emitted and the remainder is split into `L` disjoint
//! slabs, slab `l` being `{f ≤ p on dims < l, f_l > p_l}`. Points are clipped
//! into each slab and the recursion continues until a box holds one point.

use crate::error::{Error, Result};
use crate::scalar::{norm_cdf, Real};

use super::non_dominated_indices;

/// Default cap on the number of cells before a decomposition errors out.
pub const DEFAULT_MAX_CELLS: usize = 5_000_000;

/// Which region of the frontier the cells cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `{f : f ⪯ p for some p}`; cells are stored as-is.
    Dominated,
    /// `{f : p ⪯ f for some p}`; cells are stored in the sign-flipped space.
    Dominating,
}

/// Half-open hyper-rectangle `(lower, upper]`; lower entries may be `−∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> Cell<T> {
    pub fn contains(&self, f: &[T]) -> bool {
        f.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| v > l && v <= u)
    }

    /// Volume after raising infinite lower bounds to `floor`.
    pub fn clipped_volume(&self, floor: &[T]) -> T {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(floor)
            .map(|((l, u), f)| (*u - l.max(*f)).max(T::zero()))
            .fold(T::one(), |a, b| a * b)
    }
}

/// Disjoint cells whose union is the dominated (or dominating) region of a frontier.
#[derive(Debug, Clone)]
pub struct CellDecomposition<T> {
    orientation: Orientation,
    source: Vec<Vec<T>>,
    /// Per objective: sorted distinct bound values, `coords[l][0] = −∞`.
    coords: Vec<Vec<T>>,
    /// Per cell: `L` lower indices followed by `L` upper indices into `coords`.
    bounds: Vec<u32>,
    n_cells: usize,
}

/// Decomposes `{f : f ⪯ p for some p ∈ frontier}`.
pub fn decompose_dominated<T: Real>(
    frontier: &[Vec<T>],
    max_cells: usize,
) -> Result<CellDecomposition<T>> {
    CellDecomposition::build(frontier, Orientation::Dominated, max_cells)
}

/// Decomposes `{f : p ⪯ f for some p ∈ frontier}` through the sign flip `f ↦ −f`.
pub fn decompose_dominating<T: Real>(
    frontier: &[Vec<T>],
    max_cells: usize,
) -> Result<CellDecomposition<T>> {
    CellDecomposition::build(frontier, Orientation::Dominating, max_cells)
}

impl<T: Real> CellDecomposition<T> {
    fn build(frontier: &[Vec<T>], orientation: Orientation, max_cells: usize) -> Result<Self> {
        let Some(first) = frontier.first() else {
            return Err(Error::invalid("cannot decompose an empty frontier"));
        };
        let dim = first.len();
        if dim == 0 || frontier.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("frontier points have inconsistent dimension"));
        }
        if frontier.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("frontier coordinates must be finite"));
        }
        let oriented: Vec<Vec<T>> = match orientation {
            Orientation::Dominated => frontier.to_vec(),
            Orientation::Dominating => frontier
                .iter()
                .map(|p| p.iter().map(|v| -*v).collect())
                .collect(),
        };
        let reduced: Vec<Vec<T>> = non_dominated_indices(&oriented)
            .into_iter()
            .map(|i| oriented[i].clone())
            .collect();
        let lo = vec![T::neg_infinity(); dim];
        let hi: Vec<T> = (0..dim)
            .map(|l| {
                reduced
                    .iter()
                    .map(|p| p[l])
                    .fold(T::neg_infinity(), T::max)
            })
            .collect();
        let mut cells: Vec<(Vec<T>, Vec<T>)> = Vec::new();
        split_region(reduced, lo, hi, &mut |l, u| {
            if cells.len() >= max_cells {
                return Err(Error::TooManyCells { limit: max_cells });
            }
            cells.push((l.to_vec(), u.to_vec()));
            Ok(())
        })?;

        let mut coords: Vec<Vec<T>> = (0..dim)
            .map(|l| {
                let mut c: Vec<T> = cells.iter().flat_map(|(a, b)| [a[l], b[l]]).collect();
                c.push(T::neg_infinity());
                c.sort_by(|a, b| a.partial_cmp(b).unwrap());
                c.dedup();
                c
            })
            .collect();
        for c in &mut coords {
            if c[0] != T::neg_infinity() {
                c.insert(0, T::neg_infinity());
            }
        }
        let index = |l: usize, v: T| -> u32 {
            coords[l]
                .binary_search_by(|c| c.partial_cmp(&v).unwrap())
                .expect("bound registered") as u32
        };
        let mut bounds = Vec::with_capacity(cells.len() * 2 * dim);
        for (l_vec, u_vec) in &cells {
            bounds.extend(l_vec.iter().enumerate().map(|(l, v)| index(l, *v)));
            bounds.extend(u_vec.iter().enumerate().map(|(l, v)| index(l, *v)));
        }
        Ok(Self {
            orientation,
            source: frontier.to_vec(),
            coords,
            n_cells: cells.len(),
            bounds,
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The frontier this decomposition was built from, in the original orientation.
    pub fn source(&self) -> &[Vec<T>] {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn len(&self) -> usize {
        self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.n_cells == 0
    }

    /// Cells in the decomposition's own space (negated for [`Orientation::Dominating`]).
    pub fn cells(&self) -> Vec<Cell<T>> {
        let dim = self.dim();
        self.bounds
            .chunks(2 * dim)
            .map(|b| Cell {
                lower: (0..dim).map(|l| self.coords[l][b[l] as usize]).collect(),
                upper: (0..dim).map(|l| self.coords[l][b[dim + l] as usize]).collect(),
            })
            .collect()
    }

    /// Whether `f` (original orientation) lies in the covered region, tested through the cells.
    pub fn contains(&self, f: &[T]) -> bool {
        let g: Vec<T> = match self.orientation {
            Orientation::Dominated => f.to_vec(),
            Orientation::Dominating => f.iter().map(|v| -*v).collect(),
        };
        self.cells().iter().any(|c| c.contains(&g))
    }

    /// `P(f ∈ region)` for `f ~ N(mean, diag(std²))` in the original orientation:
    /// `Σ_cells Π_l [Φ((u − μ)/σ) − Φ((ℓ − μ)/σ)]`.
    pub fn probability(&self, mean: &[T], std: &[T]) -> T {
        let dim = self.dim();
        debug_assert_eq!(mean.len(), dim);
        debug_assert_eq!(std.len(), dim);
        let sign = match self.orientation {
            Orientation::Dominated => T::one(),
            Orientation::Dominating => -T::one(),
        };
        // standardized coordinate, lower CDF and upper tail per breakpoint
        let table: Vec<Vec<(T, T, T)>> = self
            .coords
            .iter()
            .enumerate()
            .map(|(l, cs)| {
                let mu = sign * mean[l];
                cs.iter()
                    .map(|c| {
                        let z = (*c - mu) / std[l];
                        (z, norm_cdf(z), norm_cdf(-z))
                    })
                    .collect()
            })
            .collect();
        let mut total = T::zero();
        for b in self.bounds.chunks(2 * dim) {
            let mut prod = T::one();
            for l in 0..dim {
                let (z_lo, cdf_lo, sf_lo) = table[l][b[l] as usize];
                let (_, cdf_hi, sf_hi) = table[l][b[dim + l] as usize];
                let p = if z_lo > T::zero() {
                    sf_lo - sf_hi
                } else {
                    cdf_hi - cdf_lo
                };
                prod *= p.max(T::zero());
                if prod == T::zero() {
                    break;
                }
            }
            total += prod;
        }
        total.min(T::one())
    }

    /// `f ⪯ p` for some frontier point `p`: membership in the dominated region.
    pub fn frontier_dominates_or_equals(&self, f: &[T]) -> bool {
        self.source
            .iter()
            .any(|p| f.iter().zip(p).all(|(a, b)| a <= b))
    }

    /// `p ⪯ f` for some frontier point `p`: membership in the dominating region.
    pub fn dominates_or_equals_frontier(&self, f: &[T]) -> bool {
        self.source
            .iter()
            .any(|p| f.iter().zip(p).all(|(a, b)| a >= b))
    }
}

/// Emits disjoint boxes covering `∪_p (lo, min(p, hi)]` within `(lo, hi]`.
///
/// `points` must be mutually non-dominated, duplicate free, and satisfy `lo < p ≤ hi`.
pub(crate) fn split_region<T: Real>(
    points: Vec<Vec<T>>,
    lo: Vec<T>,
    hi: Vec<T>,
    emit: &mut impl FnMut(&[T], &[T]) -> Result<()>,
) -> Result<()> {
    match points.len() {
        0 => return Ok(()),
        1 => return emit(&lo, &points[0]),
        _ => {}
    }
    let dim = lo.len();
    let proxy_lo: Vec<T> = (0..dim)
        .map(|l| {
            if lo[l].is_finite() {
                lo[l]
            } else {
                points.iter().map(|p| p[l]).fold(T::infinity(), T::min) - T::one()
            }
        })
        .collect();
    let volume = |p: &Vec<T>| {
        p.iter()
            .zip(&proxy_lo)
            .fold(T::one(), |acc, (v, l)| acc * (*v - *l))
    };
    let mut pivot_i = 0;
    let mut best = volume(&points[0]);
    for (i, p) in points.iter().enumerate().skip(1) {
        let v = volume(p);
        if v > best {
            best = v;
            pivot_i = i;
        }
    }
    let pivot = points[pivot_i].clone();
    emit(&lo, &pivot)?;

    for l in 0..dim {
        let mut sub_lo = lo.clone();
        let mut sub_hi = hi.clone();
        sub_hi[..l].copy_from_slice(&pivot[..l]);
        sub_lo[l] = pivot[l];
        let clipped: Vec<Vec<T>> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pivot_i)
            .filter_map(|(_, q)| {
                let c: Vec<T> = q.iter().zip(&sub_hi).map(|(a, b)| a.min(*b)).collect();
                c.iter().zip(&sub_lo).all(|(a, b)| a > b).then_some(c)
            })
            .collect();
        if clipped.is_empty() {
            continue;
        }
        let sub_points = if clipped.len() == 1 {
            clipped
        } else {
            non_dominated_indices(&clipped)
                .into_iter()
                .map(|i| clipped[i].clone())
                .collect()
        };
        split_region(sub_points, sub_lo, sub_hi, emit)?;
    }
    Ok(())
}
