use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{golden_section_max, MultiGp};
use crate::scalar::Real;

use super::{AcquisitionSampleSet, EntryState};

/// Floor applied to the mixture ratio before the log for samples outside `A_U`.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Estimator {
    NaiveMc,
    Map { r: f64 },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Map { r: 1.0 }
    }
}

impl Estimator {
    pub fn value<T: Real>(&self, states: &[EntryState<T>], lambda: T) -> Result<T> {
        match *self {
            Estimator::NaiveMc => lb_naive_mc_from_states(states, lambda),
            Estimator::Map { r } => lb_map_from_states(states, lambda, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaPolicy {
    pub grid: Vec<f64>,
    pub refine: bool,
    pub refine_iterations: usize,
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        let mut grid = vec![1e-3];
        grid.extend((1..=10).map(|i| i as f64 / 10.0));
        Self {
            grid,
            refine: false,
            refine_iterations: 30,
        }
    }
}

impl LambdaPolicy {
    /// A policy that only evaluates the given `λ`.
    pub fn fixed(lambda: f64) -> Self {
        Self {
            grid: vec![lambda],
            refine: false,
            refine_iterations: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("lambda grid is empty"));
        }
        if let Some(l) = self.grid.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
            return Err(Error::invalid(format!("lambda {l} is outside (0, 1]")));
        }
        Ok(())
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("lambda {lambda} is outside (0, 1]")))
    }
}

fn zeta_eta<T: Real>(s: &EntryState<T>, lambda: T) -> (T, T) {
    let q = &s.quantities;
    let eta = lambda / q.z_under;
    (eta + (T::one() - lambda) / q.z_over, eta)
}

/// `(r p̂ + 𝕀) / (r + 1)`.
pub fn theta_map<T: Real>(p_hat: T, indicator: bool, r: f64) -> T {
    let ind = if indicator { T::one() } else { T::zero() };
    let r = T::lit(r);
    (r * p_hat + ind) / (r + T::one())
}

pub fn lb_naive_mc_from_states<T: Real>(states: &[EntryState<T>], lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    if states.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    let floor = T::lit(LOG_FLOOR).max(T::prob_floor());
    let sum: T = states
        .iter()
        .map(|s| {
            let (zeta, eta) = zeta_eta(s, lambda);
            let v = if s.in_over {
                zeta
            } else if s.in_under {
                eta
            } else {
                T::zero()
            };
            v.max(floor).ln()
        })
        .sum();
    Ok(sum / T::lit(states.len() as f64))
}

pub fn lb_map_from_states<T: Real>(states: &[EntryState<T>], lambda: T, r: f64) -> Result<T> {
    check_lambda(lambda)?;
    if states.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    if !(r >= 0.0) {
        return Err(Error::invalid("MAP prior weight must be non-negative"));
    }
    let sum: T = states
        .iter()
        .map(|s| {
            let (zeta, eta) = zeta_eta(s, lambda);
            let theta = theta_map(s.quantities.p_hat, s.in_over, r);
            theta * zeta.ln() + (T::one() - theta) * eta.ln()
        })
        .sum();
    Ok(sum / T::lit(states.len() as f64))
}

pub fn pi_lower_bound_from_states<T: Real>(states: &[EntryState<T>]) -> T {
    let sum: T = states.iter().map(|s| T::one() - s.quantities.z_under).sum();
    sum / T::lit(states.len().max(1) as f64)
}

/// Maximizes the estimator over the policy's grid, optionally refining
/// inside the best bracket. Returns `(λ*, value*)`.
pub fn optimize_lambda_from_states<T: Real>(
    states: &[EntryState<T>],
    policy: &LambdaPolicy,
    estimator: Estimator,
) -> Result<(T, T)> {
    policy.validate()?;
    let mut best = (T::lit(policy.grid[0]), T::neg_infinity());
    let mut best_i = 0;
    for (i, l) in policy.grid.iter().enumerate() {
        let v = estimator.value(states, T::lit(*l))?;
        if v > best.1 || (i == 0 && best.1 == T::neg_infinity()) {
            best = (T::lit(*l), v);
            best_i = i;
        }
    }
    if policy.refine && policy.grid.len() > 1 {
        let mut sorted = policy.grid.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = sorted.iter().position(|g| *g == policy.grid[best_i]).unwrap();
        let a = sorted[pos.saturating_sub(1)];
        let b = sorted[(pos + 1).min(sorted.len() - 1)];
        let (lx, lv) = golden_section_max(
            |l| {
                estimator
                    .value(states, T::lit(l))
                    .map(|v| v.as_f64())
                    .unwrap_or(f64::NEG_INFINITY)
            },
            a,
            b,
            policy.refine_iterations,
        );
        if lv > best.1.as_f64() {
            let l = T::lit(lx);
            best = (l, estimator.value(states, l)?);
        }
    }
    Ok(best)
}

pub fn lb_naive_mc<T: Real>(
    x: &[T],
    lambda: T,
    samples: &AcquisitionSampleSet<T>,
    gps: &MultiGp<T>,
) -> Result<T> {
    check_lambda(lambda)?;
    lb_naive_mc_from_states(&samples.states(x, gps)?, lambda)
}

pub fn lb_map<T: Real>(
    x: &[T],
    lambda: T,
    r: f64,
    samples: &AcquisitionSampleSet<T>,
    gps: &MultiGp<T>,
) -> Result<T> {
    check_lambda(lambda)?;
    lb_map_from_states(&samples.states(x, gps)?, lambda, r)
}

pub fn pi_lower_bound<T: Real>(
    x: &[T],
    samples: &AcquisitionSampleSet<T>,
    gps: &MultiGp<T>,
) -> Result<T> {
    Ok(pi_lower_bound_from_states(&samples.states(x, gps)?))
}

pub fn optimize_lambda<T: Real>(
    x: &[T],
    samples: &AcquisitionSampleSet<T>,
    gps: &MultiGp<T>,
    policy: &LambdaPolicy,
    estimator: Estimator,
) -> Result<(T, T)> {
    optimize_lambda_from_states(&samples.states(x, gps)?, policy, estimator)
}
