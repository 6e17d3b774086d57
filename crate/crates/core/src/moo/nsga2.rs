use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dominates;
use crate::gp::Domain;
use crate::scalar::Real;

use super::ParetoSet;

/// NSGA-II settings. `mutation_prob = None` means `1/d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nsga2Config {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    pub seed: u64,
}

impl Default for Nsga2Config {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 1000,
            crossover_prob: 0.9,
            crossover_eta: 15.0,
            mutation_prob: None,
            mutation_eta: 20.0,
            seed: 0,
        }
    }
}

impl Nsga2Config {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || self.population % 2 != 0 {
            return Err(Error::invalid(format!(
                "population must be even and at least 4, got {}",
                self.population
            )));
        }
        if self.generations == 0 {
            return Err(Error::invalid("at least one generation is required"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Fronts of the fast non-dominated sort, best first (maximization).
pub fn fast_non_dominated_sort<T: Real>(objs: &[Vec<T>]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    let mut fronts: Vec<Vec<usize>> = vec![Vec::new()];
    for p in 0..n {
        for q in p + 1..n {
            if dominates(&objs[p], &objs[q]) {
                dominated_by[p].push(q);
                count[q] += 1;
            } else if dominates(&objs[q], &objs[p]) {
                dominated_by[q].push(p);
                count[p] += 1;
            }
        }
    }
    for (p, c) in count.iter().enumerate() {
        if *c == 0 {
            fronts[0].push(p);
        }
    }
    let mut i = 0;
    while !fronts[i].is_empty() {
        let mut next = Vec::new();
        for &p in &fronts[i] {
            for &q in &dominated_by[p] {
                count[q] -= 1;
                if count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(next);
        i += 1;
    }
    fronts.pop();
    fronts
}

/// Crowding distance of each member of `front`, aligned with `front`.
pub fn crowding_distance<T: Real>(objs: &[Vec<T>], front: &[usize]) -> Vec<T> {
    let m = front.len();
    let mut dist = vec![T::zero(); m];
    if m <= 2 {
        return vec![T::infinity(); m];
    }
    let dim = objs[front[0]].len();
    let mut order: Vec<usize> = (0..m).collect();
    for l in 0..dim {
        order.sort_by(|&a, &b| {
            objs[front[a]][l]
                .partial_cmp(&objs[front[b]][l])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let lo = objs[front[order[0]]][l];
        let hi = objs[front[order[m - 1]]][l];
        dist[order[0]] = T::infinity();
        dist[order[m - 1]] = T::infinity();
        let span = hi - lo;
        if span <= T::zero() {
            continue;
        }
        for k in 1..m - 1 {
            let gap = objs[front[order[k + 1]]][l] - objs[front[order[k - 1]]][l];
            dist[order[k]] += gap / span;
        }
    }
    dist
}

struct Ranked<T> {
    rank: Vec<usize>,
    crowding: Vec<T>,
}

fn rank_population<T: Real>(objs: &[Vec<T>]) -> (Vec<Vec<usize>>, Ranked<T>) {
    let fronts = fast_non_dominated_sort(objs);
    let mut rank = vec![0; objs.len()];
    let mut crowding = vec![T::zero(); objs.len()];
    for (r, front) in fronts.iter().enumerate() {
        let cd = crowding_distance(objs, front);
        for (k, &i) in front.iter().enumerate() {
            rank[i] = r;
            crowding[i] = cd[k];
        }
    }
    (fronts, Ranked { rank, crowding })
}

fn tournament<T: Real>(ranked: &Ranked<T>, n: usize, rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    if ranked.rank[a] != ranked.rank[b] {
        return if ranked.rank[a] < ranked.rank[b] { a } else { b };
    }
    if ranked.crowding[b] > ranked.crowding[a] {
        b
    } else {
        a
    }
}

fn sbx<T: Real>(
    p1: &[T],
    p2: &[T],
    domain: &Domain<T>,
    cfg: &Nsga2Config,
    rng: &mut ChaCha8Rng,
) -> (Vec<T>, Vec<T>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.gen::<f64>() > cfg.crossover_prob {
        return (c1, c2);
    }
    let eta = cfg.crossover_eta;
    for i in 0..p1.len() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let (a, b) = (p1[i].as_f64(), p2[i].as_f64());
        if (a - b).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if a < b { (a, b) } else { (b, a) };
        let (yl, yu) = (domain.lower[i].as_f64(), domain.upper[i].as_f64());
        let r: f64 = rng.gen();
        let betaq = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if r <= 1.0 / alpha {
                (r * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - r * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let bq1 = betaq(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
        let bq2 = betaq(1.0 + 2.0 * (yu - y2) / (y2 - y1));
        let v1 = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(yl, yu);
        let v2 = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(yl, yu);
        if rng.gen::<f64>() <= 0.5 {
            c1[i] = T::lit(v2);
            c2[i] = T::lit(v1);
        } else {
            c1[i] = T::lit(v1);
            c2[i] = T::lit(v2);
        }
    }
    (c1, c2)
}

fn polynomial_mutation<T: Real>(
    x: &mut [T],
    domain: &Domain<T>,
    prob: f64,
    eta: f64,
    rng: &mut ChaCha8Rng,
) {
    for (i, xi) in x.iter_mut().enumerate() {
        if rng.gen::<f64>() >= prob {
            continue;
        }
        let (yl, yu) = (domain.lower[i].as_f64(), domain.upper[i].as_f64());
        let y = xi.as_f64();
        let d1 = (y - yl) / (yu - yl);
        let d2 = (yu - y) / (yu - yl);
        let r: f64 = rng.gen();
        let pow = 1.0 / (eta + 1.0);
        let deltaq = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta + 1.0);
            val.powf(pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - val.powf(pow)
        };
        *xi = T::lit((y + deltaq * (yu - yl)).clamp(yl, yu));
    }
}

/// Runs NSGA-II maximizing every component of `objective` over `domain` and
/// returns the non-dominated subset of the final population with its inputs.
pub fn nsga2_solve<T, F>(objective: F, domain: &Domain<T>, cfg: &Nsga2Config) -> Result<ParetoSet<T>>
where
    T: Real,
    F: Fn(&[T]) -> Vec<T>,
{
    cfg.validate()?;
    let d = domain.dim();
    let n = cfg.population;
    let mutation_prob = cfg.mutation_prob.unwrap_or(1.0 / d as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pop: Vec<Vec<T>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|i| {
                    let u = T::lit(rng.gen::<f64>());
                    domain.lower[i] + u * (domain.upper[i] - domain.lower[i])
                })
                .collect()
        })
        .collect();
    let mut objs: Vec<Vec<T>> = pop.iter().map(|x| objective(x)).collect();
    let (_, mut ranked) = rank_population(&objs);

    for _ in 0..cfg.generations {
        let mut children = Vec::with_capacity(n);
        while children.len() < n {
            let a = tournament(&ranked, n, &mut rng);
            let b = tournament(&ranked, n, &mut rng);
            let (mut c1, mut c2) = sbx(&pop[a], &pop[b], domain, cfg, &mut rng);
            polynomial_mutation(&mut c1, domain, mutation_prob, cfg.mutation_eta, &mut rng);
            polynomial_mutation(&mut c2, domain, mutation_prob, cfg.mutation_eta, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        let child_objs: Vec<Vec<T>> = children.iter().map(|x| objective(x)).collect();
        pop.extend(children);
        objs.extend(child_objs);

        let (fronts, _) = rank_population(&objs);
        let mut next: Vec<usize> = Vec::with_capacity(n);
        for front in &fronts {
            if next.len() + front.len() <= n {
                next.extend_from_slice(front);
            } else {
                let cd = crowding_distance(&objs, front);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| {
                    cd[b].partial_cmp(&cd[a]).unwrap_or(std::cmp::Ordering::Equal)
                });
                next.extend(order.iter().take(n - next.len()).map(|&k| front[k]));
            }
            if next.len() == n {
                break;
            }
        }
        pop = next.iter().map(|&i| pop[i].clone()).collect();
        objs = next.iter().map(|&i| objs[i].clone()).collect();
        ranked = rank_population(&objs).1;
    }
    ParetoSet::from_points_with_inputs(&objs, &pop)
}
