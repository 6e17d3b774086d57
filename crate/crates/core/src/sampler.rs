//! Approximate joint posterior sample paths via random Fourier features.
//!
//! Each objective gets its own feature map `φ(x) = √(2/D) cos(W x + b)` with
//! `W_j ~ N(0, I/ℓ²)`, `b_j ~ U[0, 2π)`, so that `φ(x)·φ(x') ≈ k(x, x')`. The
//! weights are drawn from the Bayesian linear model posterior
//! `N((ΦᵀΦ + σ²I)⁻¹Φᵀy, σ²(ΦᵀΦ + σ²I)⁻¹)` using the pathwise identity
//! `w = w₀ + Φᵀ(ΦΦᵀ + σ²I)⁻¹(y − Φw₀ − ε)`, which needs only an `n × n` solve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gp::{GpPosterior, MultiGp};
use crate::linalg::Cholesky;
use crate::scalar::Real;

/// Feature count used for acquisition sample paths.
pub const ACQUISITION_FEATURES: usize = 500;
/// Feature count used for synthetic ground-truth functions.
pub const SYNTHETIC_FEATURES: usize = 1000;

/// Random Fourier feature map for an RBF kernel with unit signal variance.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFeatures<T> {
    dim: usize,
    /// `D × d`, row-major.
    frequencies: Vec<T>,
    phases: Vec<T>,
    scale: T,
}

impl<T: Real> RandomFeatures<T> {
    pub fn draw<R: Rng + ?Sized>(
        dim: usize,
        n_features: usize,
        length_scale: T,
        rng: &mut R,
    ) -> Self {
        let inv_ls = T::one() / length_scale;
        let frequencies = (0..n_features * dim)
            .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)) * inv_ls)
            .collect();
        let two_pi = 2.0 * std::f64::consts::PI;
        let phases = (0..n_features)
            .map(|_| T::lit(rng.gen::<f64>() * two_pi))
            .collect();
        let scale = (T::lit(2.0) / T::from_usize(n_features).unwrap()).sqrt();
        Self {
            dim,
            frequencies,
            phases,
            scale,
        }
    }

    pub fn n_features(&self) -> usize {
        self.phases.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature_scale(&self) -> T {
        self.scale
    }

    pub fn features(&self, x: &[T]) -> Vec<T> {
        let d = self.dim;
        self.phases
            .iter()
            .enumerate()
            .map(|(j, b)| self.scale * (dot(&self.frequencies[j * d..(j + 1) * d], x) + *b).cos())
            .collect()
    }

    /// `w · φ(x)` without materializing the feature vector.
    #[inline]
    fn weighted(&self, weights: &[T], x: &[T]) -> T {
        let d = self.dim;
        let mut acc = T::zero();
        for (j, (w, b)) in weights.iter().zip(&self.phases).enumerate() {
            acc += *w * (dot(&self.frequencies[j * d..(j + 1) * d], x) + *b).cos();
        }
        acc * self.scale
    }
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (p, q) in a.iter().zip(b) {
        s += *p * *q;
    }
    s
}

/// One objective's sampled function `f(x) = w · φ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathObjective<T> {
    pub features: RandomFeatures<T>,
    pub weights: Vec<T>,
}

/// Joint sample of all objectives; deterministic and cheap to evaluate anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath<T> {
    dim: usize,
    objectives: Vec<PathObjective<T>>,
}

impl<T: Real> SampledPath<T> {
    pub fn from_objectives(objectives: Vec<PathObjective<T>>) -> Result<Self> {
        let Some(first) = objectives.first() else {
            return Err(Error::invalid("a sample path needs at least one objective"));
        };
        let dim = first.features.dim();
        for o in &objectives {
            if o.features.dim() != dim || o.weights.len() != o.features.n_features() {
                return Err(Error::invalid("inconsistent sample path objectives"));
            }
        }
        Ok(Self { dim, objectives })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[PathObjective<T>] {
        &self.objectives
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "path expects dimension {}, got {}",
                self.dim,
                x.len()
            )));
        }
        Ok(self.evaluate_unchecked(x))
    }

    #[inline]
    pub(crate) fn evaluate_unchecked(&self, x: &[T]) -> Vec<T> {
        self.objectives
            .iter()
            .map(|o| o.features.weighted(&o.weights, x))
            .collect()
    }

    pub fn evaluate_batch(&self, xs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        xs.iter().map(|x| self.evaluate(x)).collect()
    }
}

/// Draws one objective's weights from the feature-space posterior given `gp`'s data.
fn draw_objective<T: Real, R: Rng + ?Sized>(
    gp: &GpPosterior<T>,
    n_features: usize,
    rng: &mut R,
) -> Result<PathObjective<T>> {
    let params = gp.params();
    let features = RandomFeatures::draw(gp.dim(), n_features, params.length_scale, rng);
    let mut weights: Vec<T> = (0..n_features)
        .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let n = gp.len();
    if n > 0 {
        let noise = gp.noise_variances();
        let phi: Vec<Vec<T>> = gp.inputs().iter().map(|x| features.features(x)).collect();
        let mut gram = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = dot(&phi[i], &phi[j]);
                gram[i * n + j] = v;
                gram[j * n + i] = v;
            }
            gram[i * n + i] += noise[i];
        }
        let chol = Cholesky::factor_with_jitter(&gram, n)
            .map_err(|e| match e {
                Error::Numerical {
                    jitter_attempts, ..
                } => Error::Numerical {
                    message: "weight posterior factorization failed".into(),
                    jitter_attempts,
                },
                other => other,
            })?
            .0;
        let resid: Vec<T> = gp
            .targets()
            .iter()
            .zip(&phi)
            .zip(noise)
            .map(|((y, p), nv)| {
                let eps = T::lit(rng.sample::<f64, _>(StandardNormal)) * nv.sqrt();
                *y - dot(p, &weights) - eps
            })
            .collect();
        let v = chol.solve(&resid);
        for (p, vi) in phi.iter().zip(&v) {
            for (w, pj) in weights.iter_mut().zip(p) {
                *w += *pj * *vi;
            }
        }
    }
    Ok(PathObjective { features, weights })
}

/// Draws a joint sample path of all objectives of `gps`.
pub fn draw_path<T: Real, R: Rng + ?Sized>(
    gps: &MultiGp<T>,
    n_features: usize,
    rng: &mut R,
) -> Result<SampledPath<T>> {
    if n_features == 0 {
        return Err(Error::invalid("at least one random feature is required"));
    }
    let objectives = gps
        .objectives()
        .iter()
        .map(|g| draw_objective(g, n_features, rng))
        .collect::<Result<Vec<_>>>()?;
    SampledPath::from_objectives(objectives)
}

/// [`draw_path`] with a dedicated seeded stream.
pub fn draw_path_seeded<T: Real>(
    gps: &MultiGp<T>,
    n_features: usize,
    seed: u64,
) -> Result<SampledPath<T>> {
    draw_path(gps, n_features, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelParams;

    fn prior_gps(d: usize, l: usize, ls: f64) -> MultiGp<f64> {
        let p = KernelParams::new(ls, 1e-4).unwrap();
        MultiGp::from_posteriors((0..l).map(|_| GpPosterior::prior(p, d)).collect()).unwrap()
    }

    #[test]
    fn same_seed_same_path() {
        let gps = prior_gps(2, 2, 0.2);
        let a = draw_path_seeded(&gps, 50, 9).unwrap();
        let b = draw_path_seeded(&gps, 50, 9).unwrap();
        assert_eq!(a, b);
        let c = draw_path_seeded(&gps, 50, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_weights_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let features = RandomFeatures::draw(3, 20, 0.3, &mut rng);
        let path = SampledPath::from_objectives(vec![PathObjective {
            features,
            weights: vec![0.0; 20],
        }])
        .unwrap();
        assert_eq!(path.evaluate(&[0.1, 0.2, 0.3]).unwrap(), vec![0.0]);
    }

    #[test]
    fn batch_equals_single() {
        let gps = prior_gps(2, 3, 0.2);
        let path = draw_path_seeded(&gps, 100, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let batch = path.evaluate_batch(&xs).unwrap();
        for (x, b) in xs.iter().zip(&batch) {
            assert_eq!(&path.evaluate(x).unwrap(), b);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let path = draw_path_seeded(&prior_gps(2, 2, 0.2), 10, 0).unwrap();
        assert!(path.evaluate(&[0.5]).is_err());
    }

    #[test]
    fn finite_difference_lipschitz_probe() {
        // |f'| is bounded by √(2/D) Σ|w_j|‖W_j‖; a grid probe must respect it.
        let gps = prior_gps(1, 1, 0.1);
        let path = draw_path_seeded(&gps, 500, 5).unwrap();
        let o = &path.objectives()[0];
        let bound: f64 = o
            .weights
            .iter()
            .zip(o.features.frequencies.iter())
            .map(|(w, f)| (w * f).abs())
            .sum::<f64>()
            * o.features.feature_scale();
        let h = 1e-4;
        let mut x = 0.0;
        while x + h <= 1.0 {
            let a = path.evaluate(&[x]).unwrap()[0];
            let b = path.evaluate(&[x + h]).unwrap()[0];
            assert!((a - b).abs() <= bound * h * (1.0 + 1e-9));
            x += 0.01;
        }
    }
}
