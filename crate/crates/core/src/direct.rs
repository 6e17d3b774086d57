//! DIRECT (dividing rectangles) global maximizer over a box.
//!
//! Deterministic: rectangles are trisected along their longest sides, and the
//! potentially optimal set is chosen per size class with the usual
//! Lipschitz-constant / `ε` rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::Domain;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirectConfig {
    pub max_evaluations: usize,
    pub max_iterations: usize,
    pub epsilon: f64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 600,
            max_iterations: 100_000,
            epsilon: 1e-4,
        }
    }
}

impl DirectConfig {
    /// Default budget for a `d`-dimensional acquisition maximization: `200 (d + 1)`.
    pub fn for_dim(d: usize) -> Self {
        Self {
            max_evaluations: 200 * (d + 1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::invalid("DIRECT needs at least one evaluation"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid("DIRECT epsilon must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
struct Rect {
    center: Vec<f64>,
    levels: Vec<u32>,
    value: f64,
}

impl Rect {
    fn size(&self) -> f64 {
        0.5 * self
            .levels
            .iter()
            .map(|k| 3f64.powi(-2 * *k as i32))
            .sum::<f64>()
            .sqrt()
    }

    fn size_key(&self) -> Vec<u32> {
        let mut k = self.levels.clone();
        k.sort_unstable();
        k
    }
}

/// Maximizes `f` over `domain`. Never exceeds `cfg.max_evaluations` calls.
pub fn direct_maximize<T, F>(f: F, domain: &Domain<T>, cfg: &DirectConfig) -> Result<DirectResult<T>>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    cfg.validate()?;
    let d = domain.dim();
    let eval = |u: &[f64]| -> f64 {
        let x: Vec<T> = domain.from_unit(&u.iter().map(|v| T::lit(*v)).collect::<Vec<_>>());
        let v = f(&x).as_f64();
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let c0 = vec![0.5; d];
    let v0 = eval(&c0);
    let mut evaluations = 1;
    let mut best = (c0.clone(), v0);
    let mut rects = vec![Rect {
        center: c0,
        levels: vec![0; d],
        value: v0,
    }];
    let mut iterations = 0;

    'outer: while iterations < cfg.max_iterations && evaluations < cfg.max_evaluations {
        iterations += 1;
        let selected = potentially_optimal(&rects, best.1, cfg.epsilon);
        if selected.is_empty() {
            break;
        }
        for idx in selected {
            let rect = rects[idx].clone();
            let min_level = *rect.levels.iter().min().unwrap();
            let dims: Vec<usize> = (0..d).filter(|&i| rect.levels[i] == min_level).collect();
            if evaluations + 2 * dims.len() > cfg.max_evaluations {
                break 'outer;
            }
            let delta = 3f64.powi(-(min_level as i32 + 1));
            let mut samples: Vec<(usize, Vec<f64>, f64, Vec<f64>, f64)> = Vec::new();
            for &i in &dims {
                let mut lo = rect.center.clone();
                lo[i] -= delta;
                let mut hi = rect.center.clone();
                hi[i] += delta;
                let fl = eval(&lo);
                let fh = eval(&hi);
                evaluations += 2;
                for (c, v) in [(&lo, fl), (&hi, fh)] {
                    if v > best.1 {
                        best = (c.clone(), v);
                    }
                }
                samples.push((i, lo, fl, hi, fh));
            }
            // best side first, so the most promising children get the largest boxes
            samples.sort_by(|a, b| {
                b.2.max(b.4)
                    .partial_cmp(&a.2.max(a.4))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let mut levels = rect.levels.clone();
            for (i, lo, fl, hi, fh) in samples {
                levels[i] += 1;
                rects.push(Rect {
                    center: lo,
                    levels: levels.clone(),
                    value: fl,
                });
                rects.push(Rect {
                    center: hi,
                    levels: levels.clone(),
                    value: fh,
                });
            }
            rects[idx].levels = levels;
        }
    }
    let x: Vec<T> = domain.from_unit(&best.0.iter().map(|v| T::lit(*v)).collect::<Vec<_>>());
    Ok(DirectResult {
        x,
        value: T::lit(best.1),
        evaluations,
        iterations,
    })
}

/// Indices of potentially optimal rectangles, largest first.
fn potentially_optimal(rects: &[Rect], f_max: f64, epsilon: f64) -> Vec<usize> {
    // best rectangle of each size class
    let mut classes: Vec<(Vec<u32>, f64, usize)> = Vec::new();
    for (i, r) in rects.iter().enumerate() {
        let key = r.size_key();
        match classes.iter_mut().find(|c| c.0 == key) {
            Some(c) => {
                if r.value > rects[c.2].value {
                    c.2 = i;
                }
            }
            None => classes.push((key, r.size(), i)),
        }
    }
    classes.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let pts: Vec<(f64, f64, usize)> = classes
        .iter()
        .map(|c| (c.1, rects[c.2].value, c.2))
        .collect();
    let threshold = f_max + epsilon * f_max.abs();
    let mut out = Vec::new();
    for (j, &(dj, fj, idx)) in pts.iter().enumerate() {
        if fj == f64::NEG_INFINITY {
            continue;
        }
        let k_low = pts[..j]
            .iter()
            .map(|&(di, fi, _)| (fi - fj) / (dj - di))
            .fold(f64::NEG_INFINITY, f64::max);
        let k_high = pts[j + 1..]
            .iter()
            .map(|&(di, fi, _)| (fj - fi) / (di - dj))
            .fold(f64::INFINITY, f64::min);
        if k_high <= 0.0 || k_low > k_high {
            continue;
        }
        if k_high.is_finite() && fj + k_high * dj < threshold {
            continue;
        }
        out.push(idx);
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_1d() {
        let cfg = DirectConfig {
            max_evaluations: 500,
            ..Default::default()
        };
        let r = direct_maximize(|x: &[f64]| -(x[0] - 0.5).powi(2), &Domain::unit(1), &cfg)
            .unwrap();
        assert!((r.x[0] - 0.5).abs() <= 1e-2);
        assert!(r.evaluations <= 500);
    }

    #[test]
    fn constant_returns_first_center() {
        let cfg = DirectConfig {
            max_evaluations: 50,
            ..Default::default()
        };
        let r = direct_maximize(|_x: &[f64]| 3.25, &Domain::unit(3), &cfg).unwrap();
        assert_eq!(r.value, 3.25);
        assert_eq!(r.x, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn off_center_optimum() {
        let cfg = DirectConfig {
            max_evaluations: 400,
            ..Default::default()
        };
        let dom = Domain::new(vec![-2.0], vec![3.0]).unwrap();
        let r = direct_maximize(|x: &[f64]| -(x[0] - 2.2).abs(), &dom, &cfg).unwrap();
        assert!((r.x[0] - 2.2).abs() < 1e-2, "{:?}", r.x);
    }

    #[test]
    fn invalid_budget() {
        let cfg = DirectConfig {
            max_evaluations: 0,
            ..Default::default()
        };
        assert!(direct_maximize(|_x: &[f64]| 0.0, &Domain::unit(1), &cfg).is_err());
    }
}
