use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::CellDecomposition;
use crate::gp::MultiGp;
use crate::scalar::Real;

use super::estimators::LOG_FLOOR;
use super::{check_point, predictive, AcquisitionSampleSet};

pub const DEFAULT_NOISE_DRAWS: usize = 4;

/// Posterior of a latent `f ~ N(mu, var)` after observing `y = f + ε`,
/// `ε ~ N(0, noise_var)`. Returns `(ν, s)`.
pub fn posterior_given_observation<T: Real>(mu: T, var: T, noise_var: T, y: T) -> (T, T) {
    let total = var + noise_var;
    (mu + var / total * (y - mu), var * noise_var / total)
}

/// `(P(A_O), P(A_U \ A_O), P(ℝ^L \ A_U))` under `N(mean, diag(std²))`.
pub fn noisy_partition<T: Real>(
    over: &CellDecomposition<T>,
    flipped: &CellDecomposition<T>,
    mean: &[T],
    std: &[T],
) -> (T, T, T) {
    let p_over = over.probability(mean, std).min(T::one());
    let p_out = flipped.probability(mean, std).min(T::one() - p_over);
    (p_over, (T::one() - p_over - p_out).max(T::zero()), p_out)
}

/// Lower bound when the sampled output is only seen through Gaussian noise:
/// memberships become probabilities under `p(f | ỹ)`, averaged over
/// `noise_draws` noise realizations per entry.
pub fn lb_noisy<T: Real>(
    x: &[T],
    lambda: T,
    samples: &AcquisitionSampleSet<T>,
    gps: &MultiGp<T>,
    noise_var: T,
    noise_draws: usize,
    seed: u64,
) -> Result<T> {
    if !(lambda > T::zero() && lambda <= T::one()) {
        return Err(Error::invalid(format!("lambda {lambda} is outside (0, 1]")));
    }
    if !(noise_var > T::zero()) || !noise_var.is_finite() {
        return Err(Error::invalid("noise variance must be positive"));
    }
    if noise_draws == 0 {
        return Err(Error::invalid("at least one noise draw is required"));
    }
    check_point(x, gps)?;
    let (mean, std) = predictive(gps, x);
    let var: Vec<T> = std.iter().map(|s| *s * *s).collect();
    let noise_sd = noise_var.sqrt();
    let floor = T::lit(LOG_FLOOR).max(T::prob_floor());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = T::zero();
    for e in samples.entries() {
        let q = crate::geometry::truncation_quantities(&e.over_cells, &e.flipped_cells, &mean, &std);
        let eta = lambda / q.z_under;
        let zeta = eta + (T::one() - lambda) / q.z_over;
        let f_tilde = e.path.evaluate_unchecked(x);
        for _ in 0..noise_draws {
            let mut nu = Vec::with_capacity(mean.len());
            let mut sd = Vec::with_capacity(mean.len());
            for l in 0..mean.len() {
                let eps: f64 = StandardNormal.sample(&mut rng);
                let y = f_tilde[l] + T::lit(eps) * noise_sd;
                let (n, s) = posterior_given_observation(mean[l], var[l], noise_var, y);
                nu.push(n);
                sd.push(s.sqrt());
            }
            let (p_over, p_between, _) = noisy_partition(&e.over_cells, &e.flipped_cells, &nu, &sd);
            sum += (zeta * p_over + eta * p_between).max(floor).ln();
        }
    }
    Ok(sum / T::lit((samples.len() * noise_draws) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::tests::{small_cfg, toy_gps};
    use crate::acquisition::{lb_naive_mc, prepare_samples};
    use crate::geometry::{decompose_dominated, decompose_dominating, DEFAULT_MAX_CELLS};

    #[test]
    fn observation_posterior_arithmetic() {
        let (nu, s) = posterior_given_observation(0.0, 1.0, 1.0, 2.0);
        assert_eq!(nu, 1.0);
        assert_eq!(s, 0.5);
    }

    #[test]
    fn partition_sums_to_one() {
        let f: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]];
        let o = decompose_dominated(&f, DEFAULT_MAX_CELLS).unwrap();
        let u = decompose_dominating(&f, DEFAULT_MAX_CELLS).unwrap();
        for (m, s) in [([0.5, 0.5], [0.3, 0.2]), ([2.0, -1.0], [1.0, 1.0]), ([0.0, 0.0], [1e-6, 1e-6])] {
            let (a, b, c) = noisy_partition(&o, &u, &m, &s);
            assert!((a + b + c - 1.0).abs() < 1e-10);
            assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
        }
    }

    #[test]
    fn vanishing_noise_matches_noiseless() {
        let (gps, dom) = toy_gps();
        let s = prepare_samples(&gps, &dom, &small_cfg(3), 8).unwrap();
        for x in [[0.2, 0.3], [0.8, 0.6]] {
            let states = s.states(&x, &gps).unwrap();
            if states.iter().any(|st| !st.in_under) {
                continue;
            }
            let a = lb_noisy(&x, 0.5, &s, &gps, 1e-12, 2, 0).unwrap();
            let b = lb_naive_mc(&x, 0.5, &s, &gps).unwrap();
            assert!((a - b).abs() < 1e-3, "{a} {b}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let (gps, dom) = toy_gps();
        let s = prepare_samples(&gps, &dom, &small_cfg(1), 8).unwrap();
        let x = [0.5, 0.5];
        assert!(lb_noisy(&x, 0.5, &s, &gps, 0.0, 2, 0).is_err());
        assert!(lb_noisy(&x, 0.5, &s, &gps, 0.1, 0, 0).is_err());
        assert!(lb_noisy(&x, 0.0, &s, &gps, 0.1, 1, 0).is_err());
    }
}
