//! Independent zero-mean Gaussian-process regression per objective with an isotropic RBF kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Real;

/// Predictive variances are clamped from below at this value.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Default observation noise variance used by the surrogate.
pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-4;

/// RBF kernel hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<T> {
    pub length_scale: T,
    pub signal_variance: T,
    pub noise_variance: T,
}

impl<T: Real> KernelParams<T> {
    /// Unit signal variance, as used throughout the toolkit.
    pub fn new(length_scale: T, noise_variance: T) -> Result<Self> {
        if !(length_scale > T::zero()) {
            return Err(Error::invalid(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        if !(noise_variance > T::zero()) {
            return Err(Error::invalid(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        Ok(Self {
            length_scale,
            signal_variance: T::one(),
            noise_variance,
        })
    }

    /// `k(x, x2) = s² exp(−‖x − x2‖² / (2ℓ²))`.
    pub fn eval(&self, x: &[T], x2: &[T]) -> Result<T> {
        if x.len() != x2.len() {
            return Err(Error::invalid(format!(
                "kernel inputs have dimensions {} and {}",
                x.len(),
                x2.len()
            )));
        }
        Ok(self.eval_unchecked(x, x2))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[T], x2: &[T]) -> T {
        let sq: T = x.iter().zip(x2).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
        let two = T::lit(2.0);
        self.signal_variance * (-sq / (two * self.length_scale * self.length_scale)).exp()
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> Domain<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::invalid("domain bounds must be non-empty and equal length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::invalid("domain lower bounds must be below upper bounds"));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![T::zero(); d],
            upper: vec![T::one(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| v >= l && v <= u)
    }

    /// Maps a point of `[0,1]^d` into this box.
    pub fn from_unit(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, h))| *l + *v * (*h - *l))
            .collect()
    }

    /// Maps a point of this box into `[0,1]^d`.
    pub fn to_unit(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, h))| (*v - *l) / (*h - *l))
            .collect()
    }
}

/// Paired inputs and multi-objective outputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<T> {
    inputs: Vec<Vec<T>>,
    outputs: Vec<Vec<T>>,
}

impl<T: Real> Dataset<T> {
    pub fn new(inputs: Vec<Vec<T>>, outputs: Vec<Vec<T>>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::invalid(format!(
                "{} inputs but {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        if let Some(first) = inputs.first() {
            if inputs.iter().any(|x| x.len() != first.len()) {
                return Err(Error::invalid("inputs have inconsistent dimension"));
            }
        }
        if let Some(first) = outputs.first() {
            if outputs.iter().any(|y| y.len() != first.len()) || first.is_empty() {
                return Err(Error::invalid("outputs have inconsistent dimension"));
            }
        }
        Ok(Self { inputs, outputs })
    }

    pub fn push(&mut self, x: Vec<T>, y: Vec<T>) -> Result<()> {
        if let (Some(x0), Some(y0)) = (self.inputs.first(), self.outputs.first()) {
            if x.len() != x0.len() || y.len() != y0.len() {
                return Err(Error::invalid("pushed observation has the wrong shape"));
            }
        }
        self.inputs.push(x);
        self.outputs.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<T>] {
        &self.outputs
    }

    pub fn n_objectives(&self) -> usize {
        self.outputs.first().map_or(0, Vec::len)
    }

    /// Outputs of one objective.
    pub fn column(&self, l: usize) -> Vec<T> {
        self.outputs.iter().map(|y| y[l]).collect()
    }
}

/// Length-scale search settings for [`MultiGp::fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub noise_variance: f64,
    pub length_scale_min: f64,
    pub length_scale_max: f64,
    pub grid_points: usize,
    pub golden_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            noise_variance: DEFAULT_NOISE_VARIANCE,
            length_scale_min: 1e-2,
            length_scale_max: 1.0,
            grid_points: 25,
            golden_iterations: 30,
        }
    }
}

/// Posterior of a single objective's GP.
#[derive(Debug, Clone)]
pub struct GpPosterior<T> {
    inputs: Vec<Vec<T>>,
    targets: Vec<T>,
    params: KernelParams<T>,
    /// Per-observation noise variance.
    noise: Vec<T>,
    chol: Cholesky<T>,
    alpha: Vec<T>,
    jitter: T,
    dim: usize,
}

impl<T: Real> GpPosterior<T> {
    /// Conditions the prior on `(inputs, targets)`.
    pub fn new(inputs: Vec<Vec<T>>, targets: Vec<T>, params: KernelParams<T>) -> Result<Self> {
        let dim = inputs.first().map(Vec::len).unwrap_or(0);
        let noise = vec![params.noise_variance; inputs.len()];
        Self::with_dim(inputs, targets, noise, params, dim)
    }

    /// Prior with no observations over a `dim`-dimensional input space.
    pub fn prior(params: KernelParams<T>, dim: usize) -> Self {
        Self::with_dim(Vec::new(), Vec::new(), Vec::new(), params, dim).expect("empty factorization")
    }

    fn with_dim(
        inputs: Vec<Vec<T>>,
        targets: Vec<T>,
        noise: Vec<T>,
        params: KernelParams<T>,
        dim: usize,
    ) -> Result<Self> {
        if inputs.len() != targets.len() || inputs.len() != noise.len() {
            return Err(Error::invalid("inputs and targets differ in length"));
        }
        if inputs.iter().any(|x| x.len() != dim) {
            return Err(Error::invalid("inputs have inconsistent dimension"));
        }
        let gram = gram_with_noise(&inputs, &noise, &params);
        let (chol, jitter) = Cholesky::factor_with_jitter(&gram, inputs.len())?;
        let alpha = chol.solve(&targets);
        Ok(Self {
            inputs,
            targets,
            params,
            noise,
            chol,
            alpha,
            jitter,
            dim,
        })
    }

    pub fn params(&self) -> &KernelParams<T> {
        &self.params
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    pub fn noise_variances(&self) -> &[T] {
        &self.noise
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Jitter that had to be added to the diagonal on top of the noise.
    pub fn jitter(&self) -> T {
        self.jitter
    }

    /// Posterior mean and variance at `x`.
    pub fn predict(&self, x: &[T]) -> (T, T) {
        debug_assert_eq!(x.len(), self.dim);
        let prior_var = self.params.signal_variance;
        if self.inputs.is_empty() {
            return (T::zero(), prior_var);
        }
        let kx: Vec<T> = self
            .inputs
            .iter()
            .map(|xi| self.params.eval_unchecked(x, xi))
            .collect();
        let mean = kx.iter().zip(&self.alpha).map(|(a, b)| *a * *b).sum();
        let v = self.chol.solve_lower(&kx);
        let reduction: T = v.iter().map(|e| *e * *e).sum();
        let var = (prior_var - reduction).max(T::lit(VARIANCE_FLOOR)).min(prior_var);
        (mean, var)
    }

    /// Joint posterior mean and row-major covariance at `xs`.
    pub fn predict_joint(&self, xs: &[Vec<T>]) -> (Vec<T>, Vec<T>) {
        let m = xs.len();
        let mut cov = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..=i {
                let k = self.params.eval_unchecked(&xs[i], &xs[j]);
                cov[i * m + j] = k;
                cov[j * m + i] = k;
            }
        }
        if self.inputs.is_empty() {
            return (vec![T::zero(); m], cov);
        }
        let mut mean = Vec::with_capacity(m);
        let mut v = Vec::with_capacity(m);
        for x in xs {
            let kx: Vec<T> = self
                .inputs
                .iter()
                .map(|xi| self.params.eval_unchecked(x, xi))
                .collect();
            mean.push(kx.iter().zip(&self.alpha).map(|(a, b)| *a * *b).sum());
            v.push(self.chol.solve_lower(&kx));
        }
        for i in 0..m {
            for j in 0..=i {
                let r: T = v[i].iter().zip(&v[j]).map(|(a, b)| *a * *b).sum();
                cov[i * m + j] -= r;
                if i != j {
                    cov[j * m + i] -= r;
                }
            }
        }
        (mean, cov)
    }

    /// Log marginal likelihood `log p(y | X, θ)`.
    pub fn log_marginal_likelihood(&self) -> T {
        let n = T::from_usize(self.targets.len()).unwrap();
        let half = T::lit(0.5);
        let fit: T = self
            .targets
            .iter()
            .zip(&self.alpha)
            .map(|(a, b)| *a * *b)
            .sum();
        let log_2pi = T::lit((2.0 * std::f64::consts::PI).ln());
        -half * fit - half * self.chol.log_det() - half * n * log_2pi
    }

    /// Posterior after appending `(xs, ys)` with the same hyper-parameters.
    pub fn condition_on(&self, xs: &[Vec<T>], ys: &[T]) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.extend(xs.iter().cloned());
        let mut targets = self.targets.clone();
        targets.extend_from_slice(ys);
        let mut noise = self.noise.clone();
        noise.extend(xs.iter().map(|_| self.params.noise_variance));
        Self::with_dim(inputs, targets, noise, self.params, self.dim)
    }

    /// Like [`condition_on`](Self::condition_on) but treats `ys` as exact
    /// function values; only jitter is added for them.
    pub fn condition_on_exact(&self, xs: &[Vec<T>], ys: &[T]) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.extend(xs.iter().cloned());
        let mut targets = self.targets.clone();
        targets.extend_from_slice(ys);
        let mut noise = self.noise.clone();
        noise.extend(xs.iter().map(|_| T::zero()));
        Self::with_dim(inputs, targets, noise, self.params, self.dim)
    }
}

fn gram_with_noise<T: Real>(inputs: &[Vec<T>], noise: &[T], params: &KernelParams<T>) -> Vec<T> {
    let n = inputs.len();
    let mut gram = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..i {
            let k = params.eval_unchecked(&inputs[i], &inputs[j]);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
        gram[i * n + i] = params.signal_variance + noise[i];
    }
    gram
}

/// Log marginal likelihood of `targets` under the given hyper-parameters.
pub fn log_marginal_likelihood<T: Real>(
    inputs: &[Vec<T>],
    targets: &[T],
    params: KernelParams<T>,
) -> Result<T> {
    Ok(GpPosterior::new(inputs.to_vec(), targets.to_vec(), params)?.log_marginal_likelihood())
}

/// Maximizes the log marginal likelihood over `ℓ` on a log grid refined by golden section.
pub fn fit_length_scale<T: Real>(inputs: &[Vec<T>], targets: &[T], cfg: &FitConfig) -> Result<T> {
    let noise = T::lit(cfg.noise_variance);
    let score = |log_ls: f64| -> f64 {
        let params = match KernelParams::new(T::lit(log_ls.exp()), noise) {
            Ok(p) => p,
            Err(_) => return f64::NEG_INFINITY,
        };
        match log_marginal_likelihood(inputs, targets, params) {
            Ok(v) if v.is_finite() => v.as_f64(),
            _ => f64::NEG_INFINITY,
        }
    };
    let lo = cfg.length_scale_min.ln();
    let hi = cfg.length_scale_max.ln();
    let m = cfg.grid_points.max(2);
    let grid: Vec<f64> = (0..m)
        .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
        .collect();
    let scores: Vec<f64> = grid.iter().map(|g| score(*g)).collect();
    let (best_i, best_s) = scores
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| {
            if s > acc.1 {
                (i, s)
            } else {
                acc
            }
        });
    if !best_s.is_finite() {
        return Err(Error::numerical(
            "marginal likelihood not finite at any grid length scale",
        ));
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(m - 1)];
    let (g_x, g_s) = golden_section_max(score, a, b, cfg.golden_iterations);
    let best = if g_s > best_s { g_x } else { grid[best_i] };
    Ok(T::lit(best.exp()))
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`; returns the best point seen.
pub(crate) fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    iterations: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..iterations {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    best
}

/// One independent GP per objective.
#[derive(Debug, Clone)]
pub struct MultiGp<T> {
    objectives: Vec<GpPosterior<T>>,
}

impl<T: Real> MultiGp<T> {
    pub fn from_posteriors(objectives: Vec<GpPosterior<T>>) -> Result<Self> {
        let Some(first) = objectives.first() else {
            return Err(Error::invalid("at least one objective GP is required"));
        };
        if objectives.iter().any(|g| g.dim() != first.dim()) {
            return Err(Error::invalid("objective GPs disagree on input dimension"));
        }
        Ok(Self { objectives })
    }

    /// Fits every objective's length scale by marginal likelihood and caches the factorization.
    pub fn fit(dataset: &Dataset<T>, domain: &Domain<T>, cfg: &FitConfig) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::invalid("cannot fit a GP to an empty dataset"));
        }
        if !(cfg.noise_variance > 0.0) {
            return Err(Error::invalid("noise variance must be positive"));
        }
        if let Some(x) = dataset.inputs().iter().find(|x| !domain.contains(x)) {
            return Err(Error::invalid(format!("input {x:?} lies outside the domain")));
        }
        let noise = T::lit(cfg.noise_variance);
        let objectives = (0..dataset.n_objectives())
            .map(|l| {
                let y = dataset.column(l);
                let ls = fit_length_scale(dataset.inputs(), &y, cfg)?;
                GpPosterior::new(dataset.inputs().to_vec(), y, KernelParams::new(ls, noise)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_posteriors(objectives)
    }

    pub fn objectives(&self) -> &[GpPosterior<T>] {
        &self.objectives
    }

    pub fn n_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn dim(&self) -> usize {
        self.objectives[0].dim()
    }

    /// Per-objective posterior means and variances at `x`.
    pub fn predict(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        self.objectives.iter().map(|g| g.predict(x)).unzip()
    }

    /// Appends `(xs, ys[l])` to every objective.
    pub fn condition_on(&self, xs: &[Vec<T>], ys: &[Vec<T>]) -> Result<Self> {
        self.condition_each(xs, ys, |g, col| g.condition_on(xs, col))
    }

    /// Appends exact values `(xs, ys[l])` to every objective.
    pub fn condition_on_exact(&self, xs: &[Vec<T>], ys: &[Vec<T>]) -> Result<Self> {
        self.condition_each(xs, ys, |g, col| g.condition_on_exact(xs, col))
    }

    fn condition_each(
        &self,
        xs: &[Vec<T>],
        ys: &[Vec<T>],
        f: impl Fn(&GpPosterior<T>, &[T]) -> Result<GpPosterior<T>>,
    ) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid("conditioning inputs and outputs differ in length"));
        }
        let objectives = self
            .objectives
            .iter()
            .enumerate()
            .map(|(l, g)| {
                let col: Vec<T> = ys.iter().map(|y| y[l]).collect();
                f(g, &col)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { objectives })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_solve;

    #[test]
    fn joint_prediction_matches_marginals() {
        let xs = vec![vec![0.1], vec![0.4], vec![0.8]];
        let g: GpPosterior<f64> = GpPosterior::new(xs, vec![0.3, -0.2, 0.5], KernelParams::new(0.3, 1e-4).unwrap())
            .unwrap();
        let q = vec![vec![0.0], vec![0.25], vec![0.9]];
        let (mean, cov) = g.predict_joint(&q);
        for (i, x) in q.iter().enumerate() {
            let (m, v) = g.predict(x);
            assert!((mean[i] - m).abs() < 1e-12);
            assert!((cov[i * 3 + i] - v).abs() < 1e-12);
        }
        assert_eq!(cov[1], cov[3]);
    }
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(ls: f64) -> KernelParams<f64> {
        KernelParams::new(ls, 1e-4).unwrap()
    }

    #[test]
    fn kernel_values() {
        let p = params(0.1);
        assert_eq!(p.eval(&[0.3, 0.2], &[0.3, 0.2]).unwrap(), 1.0);
        let k = p.eval(&[0.0], &[0.1]).unwrap();
        assert!((k - (-0.5f64).exp()).abs() < 1e-15);
        assert!((k - 0.60653).abs() < 1e-5);
        let far = p.eval(&[0.0], &[10.0]).unwrap();
        assert!(far >= 0.0 && far < 1e-300);
        assert!(p.eval(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn kernel_is_symmetric() {
        let p = params(0.3);
        let a = [0.1, 0.7, 0.4];
        let b = [0.9, 0.2, 0.5];
        assert_eq!(p.eval(&a, &b).unwrap(), p.eval(&b, &a).unwrap());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(KernelParams::new(0.0, 1e-4).is_err());
        assert!(KernelParams::new(0.1, 0.0).is_err());
    }

    #[test]
    fn single_point_evidence_closed_form() {
        let noise = 1e-4;
        let gp = GpPosterior::new(vec![vec![0.5]], vec![0.0], params(0.2)).unwrap();
        let expected = -0.5 * (2.0 * std::f64::consts::PI * (1.0 + noise)).ln();
        assert!((gp.log_marginal_likelihood() - expected).abs() < 1e-14);
    }

    #[test]
    fn single_point_prediction_closed_form() {
        let gp = GpPosterior::new(vec![vec![0.4, 0.6]], vec![1.0], params(0.2)).unwrap();
        let (m, v) = gp.predict(&[0.4, 0.6]);
        assert!((m - 1.0 / 1.0001).abs() < 1e-12);
        assert!((v - (1.0 - 1.0 / 1.0001)).abs() < 1e-12);
    }

    #[test]
    fn far_prediction_reverts_to_prior() {
        let gp = GpPosterior::new(
            vec![vec![0.0], vec![0.05]],
            vec![1.0, -0.5],
            params(0.01),
        )
        .unwrap();
        let (m, v) = gp.predict(&[0.9]);
        assert!(m.abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn prediction_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let d = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=50);
            let xs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen()).collect())
                .collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = params(rng.gen_range(0.1..0.8));
            let gp = GpPosterior::new(xs.clone(), ys.clone(), p).unwrap();
            let mut gram = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] = p.eval(&xs[i], &xs[j]).unwrap();
                }
                gram[i * n + i] += 1e-4;
            }
            for _ in 0..20 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen()).collect();
                let k: Vec<f64> = xs.iter().map(|xi| p.eval(&x, xi).unwrap()).collect();
                let a = dense_solve(&gram, n, &ys).unwrap();
                let b = dense_solve(&gram, n, &k).unwrap();
                let mean: f64 = k.iter().zip(&a).map(|(p, q)| p * q).sum();
                let var = 1.0 - k.iter().zip(&b).map(|(p, q)| p * q).sum::<f64>();
                let (m, v) = gp.predict(&x);
                assert!((m - mean).abs() < 1e-8, "{m} vs {mean}");
                assert!((v - var.max(VARIANCE_FLOOR)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn fit_rejects_empty_dataset() {
        let ds = Dataset::<f64>::default();
        assert!(MultiGp::fit(&ds, &Domain::unit(1), &FitConfig::default()).is_err());
    }

    #[test]
    fn fit_rejects_out_of_domain_input() {
        let ds = Dataset::new(vec![vec![1.5]], vec![vec![0.0, 1.0]]).unwrap();
        assert!(MultiGp::fit(&ds, &Domain::unit(1), &FitConfig::default()).is_err());
    }

    #[test]
    fn conditioning_matches_refit() {
        let base = GpPosterior::new(vec![vec![0.1], vec![0.5]], vec![0.3, -0.2], params(0.2))
            .unwrap();
        let cond = base.condition_on(&[vec![0.8]], &[1.0]).unwrap();
        let direct = GpPosterior::new(
            vec![vec![0.1], vec![0.5], vec![0.8]],
            vec![0.3, -0.2, 1.0],
            params(0.2),
        )
        .unwrap();
        assert_eq!(cond.predict(&[0.33]), direct.predict(&[0.33]));
    }

    #[test]
    fn golden_section_finds_quadratic_peak() {
        let (x, _) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 60);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn domain_unit_round_trip() {
        let d = Domain::new(vec![-4.0, 0.0], vec![4.0, 2.0]).unwrap();
        let x = d.from_unit(&[0.25, 0.5]);
        assert_eq!(x, vec![-2.0, 1.0]);
        assert_eq!(d.to_unit(&x), vec![0.25, 0.5]);
    }
}
