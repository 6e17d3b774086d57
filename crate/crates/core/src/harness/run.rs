use std::cell::RefCell;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::{
    cmi_parallel, dirichlet_weights, lb_noisy, optimize_lambda_from_states, parego_acquisition,
    AcquisitionSampleSet, Estimator, FantasySet, LambdaPolicy, ParegoModel, SampleEntry,
    PAREGO_RHO,
};
use crate::benchmarks::{reference_frontier, Problem};
use crate::direct::{direct_maximize, DirectConfig};
use crate::error::{Error, Result};
use crate::gp::{Dataset, Domain, FitConfig, MultiGp};
use crate::moo::nsga2_solve;
use crate::sampler::draw_path_seeded;

use super::config::{RunConfig, Strategy};
use super::metrics::RhvScale;

/// Run-level facts written at the top of every history file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub problem: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub dim: usize,
    pub objectives: usize,
    pub iterations: usize,
    pub initial_points: usize,
    pub batch_size: usize,
    pub samples: usize,
    pub reference_point: Vec<f64>,
    pub reference_hypervolume: f64,
    pub tool_version: String,
}

/// One observation. `iteration = 0` marks the initial design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub batch_index: usize,
    pub x: Vec<f64>,
    /// Noiseless objective values.
    pub f: Vec<f64>,
    /// Observed values (equal to `f` without observation noise).
    pub y: Vec<f64>,
    pub lambda: Option<f64>,
    pub acquisition: Option<f64>,
    /// Hypervolume of everything observed so far, from the noiseless values.
    pub hypervolume: f64,
    pub rhv: f64,
}

/// Wall-clock seconds per phase of one iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub iteration: usize,
    pub fit: f64,
    pub sampling: f64,
    pub nsga2: f64,
    pub qhv: f64,
    pub acquisition: f64,
    pub evaluation: f64,
    pub total: f64,
}

impl PhaseTimings {
    pub fn phase_sum(&self) -> f64 {
        self.fit + self.sampling + self.nsga2 + self.qhv + self.acquisition + self.evaluation
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub meta: RunMeta,
    pub records: Vec<IterationRecord>,
    pub timings: Vec<PhaseTimings>,
}

impl RunHistory {
    pub fn observations(&self) -> usize {
        self.records.len()
    }

    pub fn final_rhv(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.rhv)
    }

    pub fn final_hypervolume(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.hypervolume)
    }

    /// RHV after each iteration, index 0 being the initial design.
    pub fn rhv_by_iteration(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.records {
            if r.iteration < out.len() {
                out[r.iteration] = r.rhv;
            } else {
                out.resize(r.iteration, out.last().copied().unwrap_or(0.0));
                out.push(r.rhv);
            }
        }
        out
    }
}

/// A run that stopped early, with whatever was recorded before the error.
#[derive(Debug)]
pub struct RunFailure {
    pub history: Option<RunHistory>,
    pub error: Error,
}

pub fn run_bo(cfg: &RunConfig) -> Result<RunHistory> {
    run_bo_partial(cfg).map_err(|f| f.error)
}

/// Like [`run_bo`], but keeps the partial history on failure.
pub fn run_bo_partial(cfg: &RunConfig) -> std::result::Result<RunHistory, RunFailure> {
    let fail = |error| RunFailure {
        history: None,
        error,
    };
    cfg.validate().map_err(fail)?;
    let problem = cfg.problem.build().map_err(fail)?;
    let reference = reference_frontier(&problem, &cfg.reference, cfg.reference_cache.as_deref())
        .map_err(fail)?;
    let scale = RhvScale::new(&reference).map_err(fail)?;
    let meta = RunMeta {
        problem: problem.id().to_string(),
        strategy: cfg.strategy,
        seed: cfg.seed,
        dim: problem.dim(),
        objectives: problem.n_objectives(),
        iterations: cfg.iterations,
        initial_points: cfg.initial_points,
        batch_size: cfg.batch_size,
        samples: cfg.samples,
        reference_point: scale.reference_point.clone(),
        reference_hypervolume: scale.reference_hypervolume,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut loop_state = Loop::new(cfg, problem, scale);
    let outcome = loop_state.run();
    let history = RunHistory {
        meta,
        records: loop_state.records,
        timings: loop_state.timings,
    };
    match outcome {
        Ok(()) => Ok(history),
        Err(error) => Err(RunFailure {
            history: Some(history),
            error,
        }),
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

struct Pick {
    x: Vec<f64>,
    lambda: Option<f64>,
    acquisition: Option<f64>,
}

struct Loop<'a> {
    cfg: &'a RunConfig,
    problem: Problem,
    domain: Domain<f64>,
    scale: RhvScale,
    init_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    acq_rng: ChaCha8Rng,
    records: Vec<IterationRecord>,
    timings: Vec<PhaseTimings>,
}

impl<'a> Loop<'a> {
    fn new(cfg: &'a RunConfig, problem: Problem, scale: RhvScale) -> Self {
        Self {
            cfg,
            domain: problem.domain(),
            problem,
            scale,
            init_rng: stream(cfg.seed, 1),
            noise_rng: stream(cfg.seed, 2),
            acq_rng: stream(cfg.seed, 3),
            records: Vec::new(),
            timings: Vec::new(),
        }
    }

    fn run(&mut self) -> Result<()> {
        let d = self.problem.dim();
        for _ in 0..self.cfg.initial_points {
            let x: Vec<f64> = (0..d).map(|_| self.init_rng.gen::<f64>()).collect();
            self.observe(
                0,
                0,
                Pick {
                    x,
                    lambda: None,
                    acquisition: None,
                },
            )?;
        }
        for t in 1..=self.cfg.iterations {
            let start = Instant::now();
            let mut timings = PhaseTimings {
                iteration: t,
                ..Default::default()
            };
            let picks = self.select(&mut timings)?;
            let eval_start = Instant::now();
            for (b, pick) in picks.into_iter().enumerate() {
                self.observe(t, b, pick)?;
            }
            timings.evaluation = eval_start.elapsed().as_secs_f64();
            timings.total = start.elapsed().as_secs_f64();
            self.timings.push(timings);
        }
        Ok(())
    }

    fn observe(&mut self, iteration: usize, batch_index: usize, pick: Pick) -> Result<()> {
        let f = self.problem.try_evaluate(&pick.x)?;
        let y: Vec<f64> = if self.cfg.noise.sd > 0.0 {
            f.iter()
                .map(|v| v + self.cfg.noise.sd * self.noise_rng.sample::<f64, _>(StandardNormal))
                .collect()
        } else {
            f.clone()
        };
        let mut observed: Vec<Vec<f64>> = self.records.iter().map(|r| r.f.clone()).collect();
        observed.push(f.clone());
        let hypervolume = self.scale.hypervolume(&observed)?;
        self.records.push(IterationRecord {
            iteration,
            batch_index,
            x: pick.x,
            f,
            y,
            lambda: pick.lambda,
            acquisition: pick.acquisition,
            hypervolume,
            rhv: hypervolume / self.scale.reference_hypervolume,
        });
        Ok(())
    }

    /// Observations as the models see them: centered, and scaled to unit
    /// variance unless observation noise is configured.
    fn dataset(&self) -> Result<Dataset<f64>> {
        let xs: Vec<Vec<f64>> = self.records.iter().map(|r| r.x.clone()).collect();
        let mut ys: Vec<Vec<f64>> = self.records.iter().map(|r| r.y.clone()).collect();
        if self.cfg.standardize {
            let n = ys.len() as f64;
            for l in 0..self.problem.n_objectives() {
                let mean = ys.iter().map(|y| y[l]).sum::<f64>() / n;
                let var = ys.iter().map(|y| (y[l] - mean).powi(2)).sum::<f64>() / n;
                let sd = if self.cfg.noise.sd > 0.0 || var.sqrt() < 1e-12 {
                    1.0
                } else {
                    var.sqrt()
                };
                for y in &mut ys {
                    y[l] = (y[l] - mean) / sd;
                }
            }
        }
        Dataset::new(xs, ys)
    }

    fn fit_config(&self) -> FitConfig {
        let mut fit = self.cfg.fit;
        if self.cfg.noise.sd > 0.0 {
            fit.noise_variance = fit.noise_variance.max(self.cfg.noise.sd.powi(2));
        }
        fit
    }

    fn direct_config(&self) -> DirectConfig {
        self.cfg
            .direct
            .unwrap_or_else(|| DirectConfig::for_dim(self.problem.dim()))
    }

    fn select(&mut self, timings: &mut PhaseTimings) -> Result<Vec<Pick>> {
        match self.cfg.strategy {
            Strategy::Random => {
                let d = self.problem.dim();
                let picks = (0..self.cfg.batch_size)
                    .map(|_| Pick {
                        x: (0..d).map(|_| self.acq_rng.gen::<f64>()).collect(),
                        lambda: None,
                        acquisition: None,
                    })
                    .collect();
                Ok(picks)
            }
            Strategy::Parego => self.select_parego(timings),
            s => {
                let (policy, estimator) = match s {
                    Strategy::PfevMap => (
                        self.cfg.lambda.clone(),
                        Estimator::Map { r: self.cfg.map_r },
                    ),
                    Strategy::PfevMc => (self.cfg.lambda.clone(), Estimator::NaiveMc),
                    Strategy::PfevLambda1 => {
                        (LambdaPolicy::fixed(1.0), Estimator::Map { r: self.cfg.map_r })
                    }
                    _ => (LambdaPolicy::fixed(1e-3), Estimator::Map { r: self.cfg.map_r }),
                };
                self.select_pfev(timings, &policy, estimator)
            }
        }
    }

    fn select_parego(&mut self, timings: &mut PhaseTimings) -> Result<Vec<Pick>> {
        let data = self.dataset()?;
        let fit = self.fit_config();
        let mut picks = Vec::with_capacity(self.cfg.batch_size);
        for _ in 0..self.cfg.batch_size {
            let t0 = Instant::now();
            let w: Vec<f64> = dirichlet_weights(self.problem.n_objectives(), &mut self.acq_rng);
            let model = ParegoModel::fit(&data, &self.domain, w, PAREGO_RHO, &fit)?;
            timings.fit += t0.elapsed().as_secs_f64();
            let t1 = Instant::now();
            let best = direct_maximize(
                |x: &[f64]| parego_acquisition(x, &model),
                &self.domain,
                &self.direct_config(),
            )?;
            timings.acquisition += t1.elapsed().as_secs_f64();
            picks.push(Pick {
                x: best.x,
                lambda: None,
                acquisition: Some(best.value),
            });
        }
        Ok(picks)
    }

    fn select_pfev(
        &mut self,
        timings: &mut PhaseTimings,
        policy: &LambdaPolicy,
        estimator: Estimator,
    ) -> Result<Vec<Pick>> {
        let t0 = Instant::now();
        let gps = MultiGp::fit(&self.dataset()?, &self.domain, &self.fit_config())?;
        timings.fit = t0.elapsed().as_secs_f64();

        let seeds: Vec<(u64, u64)> = (0..self.cfg.samples)
            .map(|_| (self.acq_rng.gen(), self.acq_rng.gen()))
            .collect();
        let noise_seed: u64 = self.acq_rng.gen();

        let t1 = Instant::now();
        let paths = seeds
            .par_iter()
            .map(|(s, _)| draw_path_seeded(&gps, self.cfg.features, *s))
            .collect::<Result<Vec<_>>>()?;
        timings.sampling = t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        let frontiers = paths
            .par_iter()
            .zip(&seeds)
            .map(|(path, (_, s))| {
                nsga2_solve(
                    |x| path.evaluate_unchecked(x),
                    &self.domain,
                    &self.cfg.nsga2.with_seed(*s),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        timings.nsga2 = t2.elapsed().as_secs_f64();

        let t3 = Instant::now();
        let entries = frontiers
            .into_par_iter()
            .zip(paths)
            .map(|(f, p)| SampleEntry::new(f, p, self.cfg.max_cells))
            .collect::<Result<Vec<_>>>()?;
        let samples = AcquisitionSampleSet::from_entries(entries)?;
        timings.qhv = t3.elapsed().as_secs_f64();

        let t4 = Instant::now();
        let direct = self.direct_config();
        let mut pending: Vec<Vec<f64>> = Vec::new();
        let mut picks = Vec::with_capacity(self.cfg.batch_size);
        for _ in 0..self.cfg.batch_size {
            let fantasies = FantasySet::new(pending.clone(), &samples, &gps)?;
            let failure: RefCell<Option<Error>> = RefCell::new(None);
            let guard = |r: Result<f64>| match r {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NEG_INFINITY
                }
            };
            let best = if self.cfg.noise.aware {
                let noise_var = self.cfg.noise.sd.powi(2);
                direct_maximize(
                    |x: &[f64]| {
                        guard(noisy_value(x, &samples, &gps, policy, noise_var, self.cfg.noise.draws, noise_seed))
                    },
                    &self.domain,
                    &direct,
                )?
            } else {
                direct_maximize(
                    |x: &[f64]| guard(cmi_parallel(x, &fantasies, &samples, &gps, policy, estimator)),
                    &self.domain,
                    &direct,
                )?
            };
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            let states = fantasies.states(&best.x, &samples, &gps)?;
            let (lambda, _) = optimize_lambda_from_states(&states, policy, estimator)?;
            pending.push(best.x.clone());
            picks.push(Pick {
                x: best.x,
                lambda: Some(lambda),
                acquisition: Some(best.value),
            });
        }
        timings.acquisition = t4.elapsed().as_secs_f64();
        Ok(picks)
    }
}

fn noisy_value(
    x: &[f64],
    samples: &AcquisitionSampleSet<f64>,
    gps: &MultiGp<f64>,
    policy: &LambdaPolicy,
    noise_var: f64,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for l in &policy.grid {
        best = best.max(lb_noisy(x, *l, samples, gps, noise_var, draws, seed)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{ProblemSpec, ReferenceConfig};
    use crate::moo::Nsga2Config;

    pub(crate) fn quick(strategy: Strategy, iterations: usize) -> RunConfig {
        RunConfig {
            problem: ProblemSpec::SyntheticGp {
                d: 2,
                objectives: 2,
                length_scale: 0.2,
                features: 200,
                seed: 3,
            },
            strategy,
            iterations,
            samples: 3,
            features: 100,
            nsga2: Nsga2Config {
                population: 12,
                generations: 15,
                ..Default::default()
            },
            direct: Some(DirectConfig {
                max_evaluations: 60,
                ..Default::default()
            }),
            reference: ReferenceConfig {
                generations: 60,
                population: 20,
                seed: 0,
            },
            ..Default::default()
        }
    }

    #[test]
    fn random_bookkeeping() {
        let h = run_bo(&quick(Strategy::Random, 20)).unwrap();
        assert_eq!(h.observations(), 25);
        assert_eq!(h.timings.len(), 20);
        assert_eq!(h.rhv_by_iteration().len(), 21);
    }

    #[test]
    fn hypervolume_never_decreases() {
        for s in Strategy::ALL {
            let h = run_bo(&quick(s, 4)).unwrap();
            assert_eq!(h.observations(), 9, "{s}");
            for w in h.records.windows(2) {
                assert!(w[1].hypervolume >= w[0].hypervolume);
            }
            assert!(h.records.iter().all(|r| r.rhv >= 0.0));
            if s.is_pfev() {
                assert!(h.records[5..].iter().all(|r| r.lambda.is_some()));
            }
        }
    }

    #[test]
    fn fixed_lambda_ablations_record_their_lambda() {
        let h = run_bo(&quick(Strategy::PfevLambda1, 2)).unwrap();
        assert!(h.records[5..].iter().all(|r| r.lambda == Some(1.0)));
        let h = run_bo(&quick(Strategy::PfevLambdaMin, 2)).unwrap();
        assert!(h.records[5..].iter().all(|r| r.lambda == Some(1e-3)));
    }

    #[test]
    fn same_seed_same_history() {
        let cfg = quick(Strategy::PfevMap, 3);
        let a = run_bo(&cfg).unwrap();
        let b = run_bo(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.meta, b.meta);
    }

    #[test]
    fn batch_and_noise() {
        let mut cfg = quick(Strategy::PfevMap, 2);
        cfg.batch_size = 2;
        let h = run_bo(&cfg).unwrap();
        assert_eq!(h.observations(), 9);
        assert_eq!(h.records[6].batch_index, 1);
        let mut cfg = quick(Strategy::PfevMap, 2);
        cfg.noise.sd = 0.1;
        cfg.noise.aware = true;
        cfg.noise.draws = 1;
        let h = run_bo(&cfg).unwrap();
        assert!(h.records.iter().any(|r| r.y != r.f));
    }

    #[test]
    fn invalid_config_fails_without_history() {
        let cfg = RunConfig {
            iterations: 0,
            ..Default::default()
        };
        let f = run_bo_partial(&cfg).unwrap_err();
        assert!(f.history.is_none());
        assert!(matches!(f.error, Error::Config(_)));
    }
}
