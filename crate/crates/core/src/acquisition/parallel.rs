use crate::error::{Error, Result};
use crate::gp::MultiGp;
use crate::scalar::Real;

use super::estimators::{optimize_lambda_from_states, Estimator, LambdaPolicy};
use super::{check_point, predictive, AcquisitionSampleSet, EntryState, SampleEntry};

/// Pending inputs of a batch and, per sample entry, the GP conditioned on the
/// entry's own (exact) path values at those inputs. An entry whose frontier
/// misses one of its fantasies gets that value merged into its frontier.
#[derive(Debug, Clone)]
pub struct FantasySet<T> {
    pending: Vec<Vec<T>>,
    fantasies: Vec<Vec<Vec<T>>>,
    conditioned: Vec<MultiGp<T>>,
    entries: Vec<SampleEntry<T>>,
}

impl<T: Real> FantasySet<T> {
    pub fn empty() -> Self {
        Self {
            pending: Vec::new(),
            fantasies: Vec::new(),
            conditioned: Vec::new(),
            entries: Vec::new(),
        }
    }

    pub fn new(
        pending: Vec<Vec<T>>,
        samples: &AcquisitionSampleSet<T>,
        base: &MultiGp<T>,
    ) -> Result<Self> {
        if pending.is_empty() {
            return Ok(Self::empty());
        }
        for x in &pending {
            check_point(x, base)?;
        }
        let mut fantasies = Vec::with_capacity(samples.len());
        let mut conditioned = Vec::with_capacity(samples.len());
        let mut entries = Vec::with_capacity(samples.len());
        for e in samples.entries() {
            let ys = e.path.evaluate_batch(&pending)?;
            conditioned.push(base.condition_on_exact(&pending, &ys)?);
            entries.push(e.with_points(&pending, &ys)?);
            fantasies.push(ys);
        }
        Ok(Self {
            pending,
            fantasies,
            conditioned,
            entries,
        })
    }

    pub fn pending(&self) -> &[Vec<T>] {
        &self.pending
    }

    /// Fantasized outputs of entry `k` at the pending inputs.
    pub fn fantasies(&self, k: usize) -> Option<&[Vec<T>]> {
        self.fantasies.get(k).map(|v| v.as_slice())
    }

    /// Posterior used for entry `k`: the conditioned one, or `base` when nothing is pending.
    pub fn posterior<'a>(&'a self, k: usize, base: &'a MultiGp<T>) -> &'a MultiGp<T> {
        self.conditioned.get(k).unwrap_or(base)
    }

    /// Sample entry `k` as used under the fantasies.
    pub fn entry<'a>(&'a self, k: usize, samples: &'a AcquisitionSampleSet<T>) -> Option<&'a SampleEntry<T>> {
        self.entries.get(k).or_else(|| samples.entries().get(k))
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Per-entry states at `x` under the per-entry conditioned posteriors.
    pub fn states(
        &self,
        x: &[T],
        samples: &AcquisitionSampleSet<T>,
        base: &MultiGp<T>,
    ) -> Result<Vec<EntryState<T>>> {
        if self.is_empty() {
            return samples.states(x, base);
        }
        if self.conditioned.len() != samples.len() {
            return Err(Error::invalid("fantasy set was built for a different sample set"));
        }
        check_point(x, base)?;
        Ok(self
            .entries
            .iter()
            .zip(&self.conditioned)
            .map(|(e, g)| {
                let (mean, std) = predictive(g, x);
                e.state(&mean, &std, &e.path.evaluate_unchecked(x))
            })
            .collect())
    }
}

/// Conditional lower bound given the pending batch, maximized over `λ`.
pub fn cmi_parallel<T: Real>(
    x: &[T],
    pending: &FantasySet<T>,
    samples: &AcquisitionSampleSet<T>,
    base: &MultiGp<T>,
    policy: &LambdaPolicy,
    estimator: Estimator,
) -> Result<T> {
    let states = pending.states(x, samples, base)?;
    Ok(optimize_lambda_from_states(&states, policy, estimator)?.1)
}
