use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{entry_state, lb_map_from_states, lb_naive_mc_from_states, EntryState};
use crate::benchmarks::make_synthetic_gp;
use crate::error::{Error, Result};
use crate::geometry::{
    decompose_dominated, decompose_dominating, hypervolume, non_dominated_indices,
    DEFAULT_MAX_CELLS,
};
use crate::gp::{GpPosterior, KernelParams, DEFAULT_NOISE_VARIANCE};
use crate::linalg::Cholesky;

/// Volume of `{f ∈ [0,1]^L : Σ f ≤ 1}`, i.e. `1/L!`.
pub fn simplex_volume(objectives: usize) -> f64 {
    (1..=objectives).fold(1.0, |acc, k| acc / k as f64)
}

/// One frontier of the truncation-gap study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub objectives: usize,
    pub size: usize,
    pub seed: u64,
    pub true_volume: f64,
    pub over_volume: f64,
    pub under_volume: f64,
    pub over_ratio: f64,
    pub under_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub objectives: usize,
    pub size: usize,
    pub seeds: usize,
    pub over_ratio: f64,
    pub under_ratio: f64,
    /// `under_ratio − over_ratio`.
    pub gap: f64,
}

/// Uniform points on the probability simplex.
pub fn simplex_frontier<R: Rng + ?Sized>(objectives: usize, size: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..size)
        .map(|_| {
            let e: Vec<f64> = (0..objectives).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Compares the over- and under-truncated regions of a finite sample of the
/// simplex frontier with the region dominated by the whole simplex, inside `[0,1]^L`.
pub fn gap_study(objectives: usize, sizes: &[usize], seeds: &[u64]) -> Result<Vec<GapRow>> {
    if objectives < 2 {
        return Err(Error::invalid("gap study needs at least two objectives"));
    }
    if sizes.iter().any(|s| *s == 0) {
        return Err(Error::invalid("frontier sizes must be positive"));
    }
    let true_volume = simplex_volume(objectives);
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|s| seeds.iter().map(move |k| (*s, *k)))
        .collect();
    jobs.into_par_iter()
        .map(|(size, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(objectives as u64 * 1_000_003 + size as u64);
            let front = simplex_frontier(objectives, size, &mut rng);
            let over_volume = hypervolume(&front, &vec![0.0; objectives])?;
            let flipped: Vec<Vec<f64>> = front
                .iter()
                .map(|p| p.iter().map(|v| -v).collect())
                .collect();
            let under_volume = 1.0 - hypervolume(&flipped, &vec![-1.0; objectives])?;
            Ok(GapRow {
                objectives,
                size,
                seed,
                true_volume,
                over_volume,
                under_volume,
                over_ratio: over_volume / true_volume,
                under_ratio: under_volume / true_volume,
            })
        })
        .collect()
}

/// Seed averages per `(objectives, size)`, in first-seen order.
pub fn summarize_gap(rows: &[GapRow]) -> Vec<GapSummary> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.objectives, r.size)) {
            keys.push((r.objectives, r.size));
        }
    }
    keys.into_iter()
        .map(|(objectives, size)| {
            let sel: Vec<&GapRow> = rows
                .iter()
                .filter(|r| r.objectives == objectives && r.size == size)
                .collect();
            let n = sel.len() as f64;
            let over_ratio = sel.iter().map(|r| r.over_ratio).sum::<f64>() / n;
            let under_ratio = sel.iter().map(|r| r.under_ratio).sum::<f64>() / n;
            GapSummary {
                objectives,
                size,
                seeds: sel.len(),
                over_ratio,
                under_ratio,
                gap: under_ratio - over_ratio,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorStudyConfig {
    pub seeds: Vec<u64>,
    pub sample_sizes: Vec<usize>,
    pub truth_samples: usize,
    pub grid: usize,
    pub training_points: usize,
    pub length_scale: f64,
    pub lambda: f64,
}

impl Default for EstimatorStudyConfig {
    fn default() -> Self {
        Self {
            seeds: (0..50).collect(),
            sample_sizes: vec![10, 100, 1000],
            truth_samples: 100_000,
            grid: 100,
            training_points: 5,
            length_scale: 0.2,
            lambda: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyEstimator {
    NaiveMc,
    MapR1,
    /// MAP with `r = √(10/K)`.
    MapSqrt,
}

impl StudyEstimator {
    pub const ALL: [StudyEstimator; 3] = [Self::NaiveMc, Self::MapR1, Self::MapSqrt];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NaiveMc => "naive-mc",
            Self::MapR1 => "map-r1",
            Self::MapSqrt => "map-sqrt",
        }
    }

    pub fn r(&self, k: usize) -> Option<f64> {
        match self {
            Self::NaiveMc => None,
            Self::MapR1 => Some(1.0),
            Self::MapSqrt => Some((10.0 / k as f64).sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRow {
    pub samples: usize,
    pub estimator: StudyEstimator,
    /// MSE against the pseudo ground truth, averaged over seeds.
    pub mse: f64,
    pub mse_se: f64,
    pub seeds: usize,
}

/// Posterior of a 1-d, two-objective toy on a candidate grid, with exact
/// joint draws of both objectives over the grid.
struct GridPosterior {
    mean: Vec<Vec<f64>>,
    std: Vec<Vec<f64>>,
    chol: Vec<Cholesky<f64>>,
    grid: usize,
}

impl GridPosterior {
    fn new(cfg: &EstimatorStudyConfig, seed: u64) -> Result<Self> {
        let truth = make_synthetic_gp(1, 2, cfg.length_scale, 1000, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(11);
        let xs: Vec<Vec<f64>> = (0..cfg.training_points).map(|_| vec![rng.gen::<f64>()]).collect();
        let ys: Vec<Vec<f64>> = xs.iter().map(|x| truth.evaluate(x)).collect();
        let grid: Vec<Vec<f64>> = (0..cfg.grid)
            .map(|i| vec![i as f64 / (cfg.grid.max(2) - 1) as f64])
            .collect();
        let params = KernelParams::new(cfg.length_scale, DEFAULT_NOISE_VARIANCE)?;
        let mut out = Self {
            mean: vec![Vec::new(); cfg.grid],
            std: vec![Vec::new(); cfg.grid],
            chol: Vec::new(),
            grid: cfg.grid,
        };
        for l in 0..2 {
            let gp = GpPosterior::new(xs.clone(), ys.iter().map(|y| y[l]).collect(), params)?;
            let (_, cov) = gp.predict_joint(&grid);
            for (i, x) in grid.iter().enumerate() {
                let (m, v) = gp.predict(x);
                out.mean[i].push(m);
                out.std[i].push(v.sqrt());
            }
            out.chol.push(Cholesky::factor_with_jitter(&cov, cfg.grid)?.0);
        }
        Ok(out)
    }

    /// States of every grid candidate for one joint draw.
    fn draw_states<R: Rng>(&self, rng: &mut R) -> Result<Vec<EntryState<f64>>> {
        let m = self.grid;
        let mut f = vec![vec![0.0; 2]; m];
        for l in 0..2 {
            let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let lz = self.chol[l].mul_lower(&z);
            for i in 0..m {
                f[i][l] = self.mean[i][l] + lz[i];
            }
        }
        // Every other point of the sampled frontier, so that part of the
        // frontier is unseen as it is with a finite solver population.
        let mut front: Vec<Vec<f64>> = non_dominated_indices(&f).into_iter().map(|i| f[i].clone()).collect();
        front.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        let kept: Vec<Vec<f64>> = front.into_iter().step_by(2).collect();
        let over = decompose_dominated(&kept, DEFAULT_MAX_CELLS)?;
        let flipped = decompose_dominating(&kept, DEFAULT_MAX_CELLS)?;
        Ok((0..m)
            .map(|i| entry_state(&over, &flipped, &self.mean[i], &self.std[i], &f[i]))
            .collect())
    }
}

struct SeedResult {
    /// Per `(K, estimator)`, MSE over the grid.
    mse: Vec<Vec<f64>>,
}

fn estimator_seed(cfg: &EstimatorStudyConfig, seed: u64) -> Result<SeedResult> {
    let post = GridPosterior::new(cfg, seed)?;
    let m = cfg.grid;
    let lambda = cfg.lambda;

    let mut truth_rng = ChaCha8Rng::seed_from_u64(seed);
    truth_rng.set_stream(12);
    let mut truth = vec![0.0; m];
    for _ in 0..cfg.truth_samples {
        let states = post.draw_states(&mut truth_rng)?;
        for (acc, s) in truth.iter_mut().zip(&states) {
            *acc += lb_naive_mc_from_states(std::slice::from_ref(s), lambda)?;
        }
    }
    truth.iter_mut().for_each(|v| *v /= cfg.truth_samples as f64);

    let mut est_rng = ChaCha8Rng::seed_from_u64(seed);
    est_rng.set_stream(13);
    let mut mse = Vec::with_capacity(cfg.sample_sizes.len());
    for &k in &cfg.sample_sizes {
        let draws: Vec<Vec<EntryState<f64>>> = (0..k)
            .map(|_| post.draw_states(&mut est_rng))
            .collect::<Result<_>>()?;
        let mut row = Vec::with_capacity(StudyEstimator::ALL.len());
        for est in StudyEstimator::ALL {
            let mut sq = 0.0;
            for (i, t) in truth.iter().enumerate() {
                let column: Vec<EntryState<f64>> = draws.iter().map(|d| d[i]).collect();
                let v = match est.r(k) {
                    None => lb_naive_mc_from_states(&column, lambda)?,
                    Some(r) => lb_map_from_states(&column, lambda, r)?,
                };
                sq += (v - t).powi(2);
            }
            row.push(sq / m as f64);
        }
        mse.push(row);
    }
    Ok(SeedResult { mse })
}

/// MSE of the lower-bound estimators against a large-sample naive estimate on
/// a one-dimensional two-objective GP toy.
pub fn estimator_study(cfg: &EstimatorStudyConfig) -> Result<Vec<EstimatorRow>> {
    if cfg.seeds.is_empty() || cfg.sample_sizes.is_empty() {
        return Err(Error::invalid("estimator study needs seeds and sample sizes"));
    }
    if cfg.grid < 2 || cfg.training_points == 0 || cfg.truth_samples == 0 {
        return Err(Error::invalid("estimator study grid, training set and truth must be non-empty"));
    }
    if cfg.sample_sizes.iter().any(|k| *k == 0) {
        return Err(Error::invalid("sample sizes must be positive"));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda <= 1.0) {
        return Err(Error::invalid("lambda must lie in (0, 1]"));
    }
    let per_seed = cfg
        .seeds
        .par_iter()
        .map(|s| estimator_seed(cfg, *s))
        .collect::<Result<Vec<_>>>()?;
    let n = per_seed.len() as f64;
    let mut rows = Vec::new();
    for (ki, &k) in cfg.sample_sizes.iter().enumerate() {
        for (ei, est) in StudyEstimator::ALL.into_iter().enumerate() {
            let vals: Vec<f64> = per_seed.iter().map(|s| s.mse[ki][ei]).collect();
            let mean = vals.iter().sum::<f64>() / n;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            rows.push(EstimatorRow {
                samples: k,
                estimator: est,
                mse: mean,
                mse_se: (var / n).sqrt(),
                seeds: vals.len(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_volumes() {
        assert_eq!(simplex_volume(2), 0.5);
        assert!((simplex_volume(3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gap_ratios_bracket_one() {
        let rows = gap_study(2, &[5, 200], &[0, 1]).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert!(r.over_ratio <= 1.0 && r.under_ratio >= 1.0, "{r:?}");
        }
        let s = summarize_gap(&rows);
        assert_eq!(s.len(), 2);
        assert!(s[1].gap < s[0].gap);
        assert!(gap_study(1, &[5], &[0]).is_err());
    }

    #[test]
    fn small_estimator_study_runs() {
        let cfg = EstimatorStudyConfig {
            seeds: vec![0, 1],
            sample_sizes: vec![10, 20],
            truth_samples: 300,
            grid: 20,
            ..Default::default()
        };
        let rows = estimator_study(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.mse.is_finite() && r.mse >= 0.0));
        // r = √(10/K) coincides with r = 1 at K = 10
        assert_eq!(rows[1].mse, rows[2].mse);
    }

    #[test]
    fn grid_draws_stay_in_under_region() {
        let cfg = EstimatorStudyConfig {
            grid: 30,
            ..Default::default()
        };
        let post = GridPosterior::new(&cfg, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut outside_over = 0;
        for _ in 0..50 {
            for s in post.draw_states(&mut rng).unwrap() {
                assert!(s.in_under);
                outside_over += usize::from(!s.in_over);
            }
        }
        assert!(outside_over > 0);
    }
}
