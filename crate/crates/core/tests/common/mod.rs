#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hypervolume by inclusion-exclusion over all `2^n − 1` non-empty subsets.
pub fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let n = points.len();
    let l = reference.len();
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut corner = vec![f64::INFINITY; l];
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for j in 0..l {
                    corner[j] = corner[j].min(p[j]);
                }
            }
        }
        let vol: f64 = corner
            .iter()
            .zip(reference)
            .map(|(c, r)| (c - r).max(0.0))
            .product();
        if mask.count_ones() % 2 == 1 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

/// `f` is dominated by or equal to some frontier point.
pub fn in_over(front: &[Vec<f64>], f: &[f64]) -> bool {
    front.iter().any(|p| f.iter().zip(p).all(|(a, b)| a <= b))
}

/// `f` does not dominate-or-equal any frontier point.
pub fn in_under(front: &[Vec<f64>], f: &[f64]) -> bool {
    !front.iter().any(|p| f.iter().zip(p).all(|(a, b)| a >= b))
}

/// Monte Carlo estimate and standard error of `P(member(f))` for `f ~ N(mean, diag(std²))`.
pub fn mc_probability(
    mean: &[f64],
    std: &[f64],
    n: usize,
    rng: &mut ChaCha8Rng,
    member: impl Fn(&[f64]) -> bool,
) -> (f64, f64) {
    let mut f = vec![0.0; mean.len()];
    let mut hits = 0usize;
    for _ in 0..n {
        for j in 0..mean.len() {
            f[j] = mean[j] + std[j] * rng.sample::<f64, _>(StandardNormal);
        }
        if member(&f) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Mutually non-dominated random points (rejection on a random frontier draw).
pub fn random_front(rng: &mut ChaCha8Rng, size: usize, l: usize) -> Vec<Vec<f64>> {
    let pts: Vec<Vec<f64>> = (0..size)
        .map(|_| (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    pts.iter()
        .filter(|p| {
            !pts.iter().any(|q| {
                q.iter().zip(p.iter()).all(|(a, b)| a >= b) && q.iter().zip(p.iter()).any(|(a, b)| a > b)
            })
        })
        .cloned()
        .collect()
}
