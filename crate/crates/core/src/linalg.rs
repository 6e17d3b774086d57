//! Dense Cholesky factorization and triangular solves.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Diagonal jitter levels tried, in order, after a plain factorization fails.
pub const JITTER_LEVELS: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factors the symmetric `n × n` row-major matrix `a`. Only the lower triangle is read.
    /// Returns `None` when `a` is not numerically positive definite.
    pub fn factor(a: &[T], n: usize) -> Option<Self> {
        assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > T::zero()) || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, l })
    }

    /// Factors `a`, escalating diagonal jitter through [`JITTER_LEVELS`] on failure.
    /// Returns the factor together with the jitter that was finally added.
    pub fn factor_with_jitter(a: &[T], n: usize) -> Result<(Self, T)> {
        if let Some(c) = Self::factor(a, n) {
            return Ok((c, T::zero()));
        }
        let mut tried = Vec::with_capacity(JITTER_LEVELS.len());
        let mut work = a.to_vec();
        for &jitter in &JITTER_LEVELS {
            tried.push(jitter);
            let j = T::lit(jitter);
            for i in 0..n {
                work[i * n + i] = a[i * n + i] + j;
            }
            if let Some(c) = Self::factor(&work, n) {
                return Ok((c, j));
            }
        }
        Err(Error::Numerical {
            message: format!("Cholesky factorization of a {n}x{n} matrix failed"),
            jitter_attempts: tried,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.l[i * self.n + j]
    }

    /// Solves `L z = b`.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let mut s = z[i];
            for (k, lik) in row.iter().enumerate() {
                s -= *lik * z[k];
            }
            z[i] = s / self.l[i * n + i];
        }
        z
    }

    /// Solves `Lᵀ x = z`.
    pub fn solve_upper(&self, z: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x = z.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `L v` for a vector `v`; maps standard normals to `N(0, A)` draws.
    pub fn mul_lower(&self, v: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.l[i * n..=i * n + i]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| *a * *b)
                    .sum()
            })
            .collect()
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> T {
        let two = T::lit(2.0);
        (0..self.n).map(|i| self.l[i * self.n + i].ln()).sum::<T>() * two
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Independent of [`Cholesky`]; used as a cross-check and for tiny systems.
pub fn dense_solve<T: Real>(a: &[T], n: usize, b: &[T]) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i * n + col]
                .abs()
                .partial_cmp(&m[j * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv * n + col] == T::zero() {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[row * n + k] -= f * v;
            }
            let v = x[col];
            x[row] -= f * v;
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for k in row + 1..n {
            s -= m[row * n + k] * x[k];
        }
        x[row] = s / m[row * n + row];
    }
    Some(x)
}
