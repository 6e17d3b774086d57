//! Frontier-truncation acquisition: sample sets, lower-bound estimators,
//! parallel and noisy variants, and the baseline acquisitions.

mod baselines;
mod estimators;
mod noisy;
mod parallel;

pub use baselines::{
    dirichlet_weights, expected_improvement, parego_acquisition, random_acquisition,
    scalarize, ParegoModel, PAREGO_RHO,
};
pub use estimators::{
    lb_map, lb_map_from_states, lb_naive_mc, lb_naive_mc_from_states, optimize_lambda,
    optimize_lambda_from_states, pi_lower_bound, pi_lower_bound_from_states, theta_map,
    Estimator, LambdaPolicy, LOG_FLOOR,
};
pub use noisy::{lb_noisy, noisy_partition, posterior_given_observation, DEFAULT_NOISE_DRAWS};
pub use parallel::{cmi_parallel, FantasySet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    decompose_dominated, decompose_dominating, truncation_quantities, CellDecomposition,
    TruncationQuantities, DEFAULT_MAX_CELLS,
};
use crate::gp::{Domain, MultiGp};
use crate::moo::{nsga2_solve, Nsga2Config, ParetoSet};
use crate::sampler::{draw_path_seeded, SampledPath};
use crate::scalar::Real;

/// One sampled function and its Pareto frontier, with both decompositions cached.
#[derive(Debug, Clone)]
pub struct SampleEntry<T> {
    pub frontier: ParetoSet<T>,
    pub path: SampledPath<T>,
    pub over_cells: CellDecomposition<T>,
    pub flipped_cells: CellDecomposition<T>,
    pub max_cells: usize,
}

impl<T: Real> SampleEntry<T> {
    pub fn new(frontier: ParetoSet<T>, path: SampledPath<T>, max_cells: usize) -> Result<Self> {
        if frontier.is_empty() {
            return Err(Error::invalid("sampled frontier is empty"));
        }
        let over_cells = decompose_dominated(frontier.points(), max_cells)?;
        let flipped_cells = decompose_dominating(frontier.points(), max_cells)?;
        Ok(Self {
            frontier,
            path,
            over_cells,
            flipped_cells,
            max_cells,
        })
    }

    /// This entry with `points` of its own path added to the frontier where
    /// the solver missed them. Unchanged when every point is already covered.
    pub fn with_points(&self, inputs: &[Vec<T>], points: &[Vec<T>]) -> Result<Self> {
        if points.iter().all(|p| self.over_cells.frontier_dominates_or_equals(p)) {
            return Ok(self.clone());
        }
        let mut all = self.frontier.points().to_vec();
        all.extend(points.iter().cloned());
        let frontier = match self.frontier.inputs() {
            Some(xs) => {
                let mut xs = xs.to_vec();
                xs.extend(inputs.iter().cloned());
                ParetoSet::from_points_with_inputs(&all, &xs)?
            }
            None => ParetoSet::from_points(&all)?,
        };
        Self::new(frontier, self.path.clone(), self.max_cells)
    }

    /// Truncation quantities and membership of `f_tilde` under `N(mean, diag(std²))`.
    pub fn state(&self, mean: &[T], std: &[T], f_tilde: &[T]) -> EntryState<T> {
        entry_state(&self.over_cells, &self.flipped_cells, mean, std, f_tilde)
    }
}

#[derive(Debug, Clone)]
pub struct AcquisitionSampleSet<T> {
    entries: Vec<SampleEntry<T>>,
}

impl<T: Real> AcquisitionSampleSet<T> {
    pub fn from_entries(entries: Vec<SampleEntry<T>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("a sample set needs at least one entry"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[SampleEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-entry states at `x` under the predictive distribution of `gps`.
    pub fn states(&self, x: &[T], gps: &MultiGp<T>) -> Result<Vec<EntryState<T>>> {
        check_point(x, gps)?;
        let (mean, std) = predictive(gps, x);
        Ok(self
            .entries
            .iter()
            .map(|e| e.state(&mean, &std, &e.path.evaluate_unchecked(x)))
            .collect())
    }
}

/// What the estimators need from one entry at one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryState<T> {
    pub quantities: TruncationQuantities<T>,
    /// `f̃(x) ∈ A_O`.
    pub in_over: bool,
    /// `f̃(x) ∈ A_U`.
    pub in_under: bool,
}

pub fn entry_state<T: Real>(
    over: &CellDecomposition<T>,
    flipped: &CellDecomposition<T>,
    mean: &[T],
    std: &[T],
    f_tilde: &[T],
) -> EntryState<T> {
    let in_over = over.frontier_dominates_or_equals(f_tilde);
    EntryState {
        quantities: truncation_quantities(over, flipped, mean, std),
        in_over,
        in_under: in_over || !flipped.dominates_or_equals_frontier(f_tilde),
    }
}

/// Settings for [`prepare_samples`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub n_samples: usize,
    pub n_features: usize,
    pub nsga2: Nsga2Config,
    pub max_cells: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n_samples: 10,
            n_features: crate::sampler::ACQUISITION_FEATURES,
            nsga2: Nsga2Config::default(),
            max_cells: DEFAULT_MAX_CELLS,
        }
    }
}

/// Draws `K` posterior paths, solves each for its Pareto frontier and
/// decomposes it. Entries are independent and computed in parallel; the
/// result depends only on `seed`.
pub fn prepare_samples<T: Real>(
    gps: &MultiGp<T>,
    domain: &Domain<T>,
    cfg: &SampleConfig,
    seed: u64,
) -> Result<AcquisitionSampleSet<T>> {
    if cfg.n_samples == 0 {
        return Err(Error::invalid("at least one frontier sample is required"));
    }
    if domain.dim() != gps.dim() {
        return Err(Error::invalid("domain and GP dimensions differ"));
    }
    cfg.nsga2.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, u64)> = (0..cfg.n_samples).map(|_| (rng.gen(), rng.gen())).collect();
    let entries = seeds
        .into_par_iter()
        .map(|(path_seed, solver_seed)| {
            let path = draw_path_seeded(gps, cfg.n_features, path_seed)?;
            let frontier = nsga2_solve(
                |x| path.evaluate_unchecked(x),
                domain,
                &cfg.nsga2.with_seed(solver_seed),
            )?;
            SampleEntry::new(frontier, path, cfg.max_cells)
        })
        .collect::<Result<Vec<_>>>()?;
    AcquisitionSampleSet::from_entries(entries)
}

pub(crate) fn check_point<T: Real>(x: &[T], gps: &MultiGp<T>) -> Result<()> {
    if x.len() != gps.dim() {
        return Err(Error::invalid(format!(
            "candidate has dimension {}, GP expects {}",
            x.len(),
            gps.dim()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("candidate has non-finite coordinates"));
    }
    Ok(())
}

pub(crate) fn predictive<T: Real>(gps: &MultiGp<T>, x: &[T]) -> (Vec<T>, Vec<T>) {
    let (mean, var) = gps.predict(x);
    (mean, var.into_iter().map(|v| v.sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{Dataset, FitConfig};

    pub(crate) fn toy_gps() -> (MultiGp<f64>, Domain<f64>) {
        let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0, (i * 3 % 6) as f64 / 5.0]).collect();
        let ys: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| vec![(3.0 * x[0]).sin() + x[1], (2.0 * x[1]).cos() - x[0]])
            .collect();
        let domain = Domain::unit(2);
        let gps = MultiGp::fit(&Dataset::new(xs, ys).unwrap(), &domain, &FitConfig::default()).unwrap();
        (gps, domain)
    }

    pub(crate) fn small_cfg(k: usize) -> SampleConfig {
        SampleConfig {
            n_samples: k,
            n_features: 100,
            nsga2: Nsga2Config {
                population: 20,
                generations: 30,
                ..Default::default()
            },
            max_cells: DEFAULT_MAX_CELLS,
        }
    }

    #[test]
    fn prepare_is_deterministic() {
        let (gps, dom) = toy_gps();
        let a = prepare_samples(&gps, &dom, &small_cfg(3), 5).unwrap();
        let b = prepare_samples(&gps, &dom, &small_cfg(3), 5).unwrap();
        assert_eq!(a.len(), 3);
        for (ea, eb) in a.entries().iter().zip(b.entries()) {
            assert_eq!(ea.frontier, eb.frontier);
            assert_eq!(ea.path, eb.path);
        }
    }

    #[test]
    fn frontiers_are_non_dominated_and_nested() {
        let (gps, dom) = toy_gps();
        let s = prepare_samples(&gps, &dom, &small_cfg(4), 11).unwrap();
        for e in s.entries() {
            assert!(e.frontier.is_valid());
        }
        for i in 0..20 {
            let x = vec![(i as f64 * 0.37) % 1.0, (i as f64 * 0.61) % 1.0];
            for st in s.states(&x, &gps).unwrap() {
                assert!(st.quantities.z_over <= st.quantities.z_under);
                assert!(!st.in_over || st.in_under);
            }
        }
    }

    #[test]
    fn frontier_points_are_in_over_region() {
        let (gps, dom) = toy_gps();
        let s = prepare_samples(&gps, &dom, &small_cfg(2), 3).unwrap();
        let e = &s.entries()[0];
        let xs = e.frontier.inputs().unwrap();
        let (mean, std) = predictive(&gps, &xs[0]);
        let st = e.state(&mean, &std, &e.path.evaluate(&xs[0]).unwrap());
        assert!(st.in_over && st.in_under);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (gps, dom) = toy_gps();
        assert!(prepare_samples(&gps, &dom, &small_cfg(0), 1).is_err());
        let s = prepare_samples(&gps, &dom, &small_cfg(1), 1).unwrap();
        assert!(s.states(&[0.5], &gps).is_err());
        assert!(s.states(&[0.5, f64::NAN], &gps).is_err());
        assert!(AcquisitionSampleSet::<f64>::from_entries(vec![]).is_err());
    }
}
