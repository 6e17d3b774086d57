use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::gp::{fit_length_scale, Dataset, Domain, FitConfig, GpPosterior, KernelParams};
use crate::scalar::{norm_cdf, norm_pdf, Real};

/// Augmentation weight of the Tchebycheff scalarization.
pub const PAREGO_RHO: f64 = 0.05;

/// `min_l w_l f_l + ρ Σ_l w_l f_l` (larger is better).
pub fn scalarize<T: Real>(f: &[T], weights: &[T], rho: T) -> T {
    let mut min = T::infinity();
    let mut sum = T::zero();
    for (fl, wl) in f.iter().zip(weights) {
        let v = *fl * *wl;
        min = min.min(v);
        sum += v;
    }
    min + rho * sum
}

/// Uniform draw from the probability simplex.
pub fn dirichlet_weights<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| T::lit(v / total)).collect()
}

/// Expected improvement over `best` of `N(mean, var)`.
pub fn expected_improvement<T: Real>(mean: T, var: T, best: T) -> T {
    let gap = mean - best;
    if var <= T::zero() {
        return gap.max(T::zero());
    }
    let sd = var.sqrt();
    let z = gap / sd;
    (gap * norm_cdf(z) + sd * norm_pdf(z)).max(T::zero())
}

/// Single GP fit to the scalarized observations of one iteration.
#[derive(Debug, Clone)]
pub struct ParegoModel<T> {
    gp: GpPosterior<T>,
    best: T,
    weights: Vec<T>,
}

impl<T: Real> ParegoModel<T> {
    pub fn fit(
        data: &Dataset<T>,
        domain: &Domain<T>,
        weights: Vec<T>,
        rho: T,
        cfg: &FitConfig,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::invalid("cannot fit ParEGO to an empty dataset"));
        }
        if weights.len() != data.n_objectives() {
            return Err(Error::invalid("weight vector length differs from objective count"));
        }
        if let Some(x) = data.inputs().iter().find(|x| !domain.contains(x)) {
            return Err(Error::invalid(format!("input {x:?} lies outside the domain")));
        }
        let y: Vec<T> = data
            .outputs()
            .iter()
            .map(|f| scalarize(f, &weights, rho))
            .collect();
        let best = y.iter().copied().fold(T::neg_infinity(), T::max);
        let ls = fit_length_scale(data.inputs(), &y, cfg)?;
        let gp = GpPosterior::new(
            data.inputs().to_vec(),
            y,
            KernelParams::new(ls, T::lit(cfg.noise_variance))?,
        )?;
        Ok(Self { gp, best, weights })
    }

    pub fn gp(&self) -> &GpPosterior<T> {
        &self.gp
    }

    pub fn best(&self) -> T {
        self.best
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

pub fn parego_acquisition<T: Real>(x: &[T], model: &ParegoModel<T>) -> T {
    let (m, v) = model.gp.predict(x);
    expected_improvement(m, v, model.best)
}

/// A uniform value, so the maximizer of a batch is a uniform draw.
pub fn random_acquisition<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.gen::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn ei_degenerate() {
        assert_eq!(expected_improvement(2.0, 0.0, 1.5), 0.5);
        assert_eq!(expected_improvement(1.0, 0.0, 1.5), 0.0);
    }

    #[test]
    fn ei_against_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let mean: f64 = rng.gen_range(-1.0..1.0);
            let sd: f64 = rng.gen_range(0.1..2.0);
            let best: f64 = rng.gen_range(-1.0..1.0);
            let n = 200_000;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                let v = (mean + sd * z - best).max(0.0);
                s += v;
                s2 += v * v;
            }
            let m = s / n as f64;
            let se = ((s2 / n as f64 - m * m) / n as f64).sqrt();
            let ei = expected_improvement(mean, sd * sd, best);
            assert!((ei - m).abs() <= 3.0 * se + 1e-12, "{ei} {m} {se}");
        }
    }

    #[test]
    fn corner_weight_picks_first_objective() {
        let f = [0.3, -2.0, 5.0];
        let v = scalarize(&f, &[1.0, 0.0, 0.0], 0.05);
        // the zero-weighted objectives contribute 0 to the min
        assert_eq!(v, 0.0 + 0.05 * 0.3);
        let g = [-0.3f64, 2.0];
        assert!((scalarize(&g, &[1.0, 0.0], 0.05) - (-0.3 * 1.05)).abs() < 1e-15);
    }

    #[test]
    fn weights_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..5 {
            let w: Vec<f64> = dirichlet_weights(n, &mut rng);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn parego_fit_and_score() {
        let xs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 / 4.0]).collect();
        let ys: Vec<Vec<f64>> = xs.iter().map(|x| vec![x[0], 1.0 - x[0] * x[0]]).collect();
        let data = Dataset::new(xs, ys).unwrap();
        let m = ParegoModel::fit(&data, &Domain::unit(1), vec![0.5, 0.5], 0.05, &FitConfig::default())
            .unwrap();
        let v = parego_acquisition(&[0.6], &m);
        assert!(v >= 0.0 && v.is_finite());
        assert!(ParegoModel::fit(&data, &Domain::unit(1), vec![1.0], 0.05, &FitConfig::default()).is_err());
    }

    #[test]
    fn random_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: f64 = random_acquisition(&mut rng);
        assert!((0.0..1.0).contains(&v));
    }
}
