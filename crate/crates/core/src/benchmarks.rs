//! Ground-truth problems: GP-sampled synthetic functions, the classical
//! analytic benchmarks, combinations of both, and reference frontiers.
//!
//! Every problem is exposed on the unit box and is maximized. The analytic
//! benchmarks are minimization problems in their usual form, so their outputs
//! are negated; FES3 is already written in maximization form and is kept as is.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{Domain, GpPosterior, KernelParams, MultiGp, DEFAULT_NOISE_VARIANCE};
use crate::moo::{non_dominated_filter, nsga2_solve, Nsga2Config, ParetoSet};
use crate::sampler::{draw_path_seeded, SYNTHETIC_FEATURES};

type EvalFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// How a problem was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ProblemMetadata {
    pub seed: Option<u64>,
    pub length_scale: Option<f64>,
    /// Per objective: whether the raw formula was negated to maximize.
    pub negated: Vec<bool>,
}

#[derive(Clone)]
pub struct Problem {
    name: String,
    id: String,
    dim: usize,
    n_objectives: usize,
    raw_domain: Domain<f64>,
    raw: EvalFn,
    sign: Vec<f64>,
    metadata: ProblemMetadata,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("dim", &self.dim)
            .field("n_objectives", &self.n_objectives)
            .field("raw_domain", &self.raw_domain)
            .field("metadata", &self.metadata)
            .finish()
    }
}

impl Problem {
    fn new(
        name: &str,
        id: String,
        raw_domain: Domain<f64>,
        n_objectives: usize,
        raw: EvalFn,
        negated: Vec<bool>,
        seed: Option<u64>,
        length_scale: Option<f64>,
    ) -> Self {
        Self {
            name: name.to_string(),
            id,
            dim: raw_domain.dim(),
            n_objectives,
            raw_domain,
            raw,
            sign: negated.iter().map(|n| if *n { -1.0 } else { 1.0 }).collect(),
            metadata: ProblemMetadata {
                seed,
                length_scale,
                negated,
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Identifier that includes every parameter, used for cache keys.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn domain(&self) -> Domain<f64> {
        Domain::unit(self.dim)
    }

    pub fn raw_domain(&self) -> &Domain<f64> {
        &self.raw_domain
    }

    pub fn metadata(&self) -> &ProblemMetadata {
        &self.metadata
    }

    /// Objective values (maximized) at a point of the unit box.
    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let raw = (self.raw)(&self.raw_domain.from_unit(x));
        raw.iter().zip(&self.sign).map(|(v, s)| v * s).collect()
    }

    /// The formula as written, at a point of the original domain.
    pub fn raw_evaluate(&self, x: &[f64]) -> Vec<f64> {
        (self.raw)(x)
    }

    pub fn try_evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "{} expects {} inputs, got {}",
                self.id,
                self.dim,
                x.len()
            )));
        }
        Ok(self.evaluate(x))
    }
}

/// Independent prior GP samples on `[0,1]^d` built from `n_features` random features.
pub fn make_synthetic_gp(
    d: usize,
    n_objectives: usize,
    length_scale: f64,
    n_features: usize,
    seed: u64,
) -> Result<Problem> {
    if d == 0 {
        return Err(Error::invalid("synthetic problem needs d >= 1"));
    }
    if n_objectives < 2 {
        return Err(Error::invalid("synthetic problem needs at least two objectives"));
    }
    let params = KernelParams::new(length_scale, DEFAULT_NOISE_VARIANCE)?;
    let prior =
        MultiGp::from_posteriors((0..n_objectives).map(|_| GpPosterior::prior(params, d)).collect())?;
    let path = draw_path_seeded(&prior, n_features, seed)?;
    let id = format!("synthetic-gp-d{d}-l{n_objectives}-ls{length_scale}-D{n_features}-s{seed}");
    Ok(Problem::new(
        "synthetic-gp",
        id,
        Domain::unit(d),
        n_objectives,
        Arc::new(move |x| path.evaluate_unchecked(x)),
        vec![false; n_objectives],
        Some(seed),
        Some(length_scale),
    ))
}

/// Named benchmark at its default input dimension.
pub fn make_named(name: &str) -> Result<Problem> {
    make_named_with_dim(name, None)
}

/// Named benchmark; `d` overrides the input dimension where the formula allows it.
pub fn make_named_with_dim(name: &str, d: Option<usize>) -> Result<Problem> {
    let key = name.to_ascii_lowercase();
    let default_d = match key.as_str() {
        "fonseca" | "viennet" => 2,
        "kursawe" | "fes1" | "fes2" | "fes3" => 3,
        _ => return Err(Error::invalid(format!("unknown benchmark {name:?}"))),
    };
    let d = d.unwrap_or(default_d);
    if d == 0 || (key == "viennet" && d != 2) || (key == "kursawe" && d < 2) {
        return Err(Error::invalid(format!("{name} does not support d = {d}")));
    }
    let id = if d == default_d {
        key.clone()
    } else {
        format!("{key}-d{d}")
    };
    let boxed = |lo: f64, hi: f64| Domain::new(vec![lo; d], vec![hi; d]).expect("valid box");
    let (domain, l, raw, negated): (Domain<f64>, usize, EvalFn, bool) = match key.as_str() {
        "fonseca" => (boxed(-4.0, 4.0), 2, Arc::new(fonseca), true),
        "kursawe" => (boxed(-5.0, 5.0), 2, Arc::new(kursawe), true),
        "viennet" => (boxed(-3.0, 3.0), 3, Arc::new(viennet), true),
        "fes1" => (boxed(0.0, 1.0), 2, Arc::new(fes1), true),
        "fes2" => (boxed(0.0, 1.0), 3, Arc::new(fes2), true),
        _ => (boxed(0.0, 1.0), 4, Arc::new(fes3), false),
    };
    Ok(Problem::new(&key, id, domain, l, raw, vec![negated; l], None, None))
}

/// Concatenates the objectives of problems sharing an input dimension.
pub fn make_combined(a: &Problem, b: &Problem) -> Result<Problem> {
    if a.dim != b.dim {
        return Err(Error::invalid(format!(
            "cannot combine {} (d = {}) with {} (d = {})",
            a.id, a.dim, b.id, b.dim
        )));
    }
    let (pa, pb) = (a.clone(), b.clone());
    let raw: EvalFn = Arc::new(move |x| {
        let mut v = pa.evaluate(x);
        v.extend(pb.evaluate(x));
        v
    });
    Ok(Problem::new(
        &format!("{}+{}", a.name, b.name),
        format!("{}+{}", a.id, b.id),
        Domain::unit(a.dim),
        a.n_objectives + b.n_objectives,
        raw,
        vec![false; a.n_objectives + b.n_objectives],
        None,
        None,
    ))
}

/// `(−‖x‖², −‖x − e₁‖²)` on `[0,1]^d`; its frontier is `v = (1 − √u)²` in
/// minimization form, with hypervolume `5/6` against `(−1, −1)`.
pub fn make_bi_sphere(d: usize) -> Result<Problem> {
    if d == 0 {
        return Err(Error::invalid("bi-sphere needs d >= 1"));
    }
    let raw: EvalFn = Arc::new(|x: &[f64]| {
        let a: f64 = x.iter().map(|v| v * v).sum();
        let b: f64 = a - 2.0 * x[0] + 1.0;
        vec![a, b]
    });
    Ok(Problem::new(
        "bi-sphere",
        format!("bi-sphere-d{d}"),
        Domain::unit(d),
        2,
        raw,
        vec![true; 2],
        None,
        None,
    ))
}

fn fonseca(x: &[f64]) -> Vec<f64> {
    let c = 1.0 / (x.len() as f64).sqrt();
    let a: f64 = x.iter().map(|v| (v - c).powi(2)).sum();
    let b: f64 = x.iter().map(|v| (v + c).powi(2)).sum();
    vec![1.0 - (-a).exp(), 1.0 - (-b).exp()]
}

fn kursawe(x: &[f64]) -> Vec<f64> {
    let f1 = x
        .windows(2)
        .map(|w| -10.0 * (-0.2 * (w[0] * w[0] + w[1] * w[1]).sqrt()).exp())
        .sum();
    let f2 = x
        .iter()
        .map(|v| v.abs().powf(0.8) + 5.0 * v.powi(3).sin())
        .sum();
    vec![f1, f2]
}

fn viennet(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    let r = a * a + b * b;
    vec![
        0.5 * r + r.sin(),
        (3.0 * a - 2.0 * b + 4.0).powi(2) / 8.0 + (a - b + 1.0).powi(2) / 27.0 + 15.0,
        1.0 / (r + 1.0) - 1.1 * (-r).exp(),
    ]
}

fn indexed(x: &[f64]) -> impl Iterator<Item = (f64, f64)> + '_ {
    x.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v))
}

fn fes_cos_term(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    indexed(x)
        .map(|(i, v)| (v - 0.5 * (10.0 * PI * i / d).cos() - 0.5).powi(2))
        .sum()
}

fn fes_sin_cos_term(x: &[f64]) -> f64 {
    indexed(x)
        .map(|(i, v)| {
            let (s, c) = ((i - 1.0).sin(), (i - 1.0).cos());
            (v - s * s * c * c).abs().sqrt()
        })
        .sum()
}

fn fes1(x: &[f64]) -> Vec<f64> {
    let d = x.len() as f64;
    let f1 = indexed(x)
        .map(|(i, v)| (v - ((i / d).powi(2) / 3.0).exp()).abs().sqrt())
        .sum();
    vec![f1, fes_cos_term(x)]
}

fn fes2(x: &[f64]) -> Vec<f64> {
    let f3 = indexed(x)
        .map(|(i, v)| (v - 0.25 * (i - 1.0).cos() * (2.0 * i - 2.0).cos() - 0.5).abs().sqrt())
        .sum();
    vec![fes_cos_term(x), fes_sin_cos_term(x), f3]
}

fn fes3(x: &[f64]) -> Vec<f64> {
    let d = x.len() as f64;
    let f1: f64 = indexed(x)
        .map(|(i, v)| (v - (i / d).powi(2).exp() / 3.0).abs().sqrt())
        .sum();
    let f3: f64 = indexed(x)
        .map(|(i, v)| (v - (0.25 * (i - 1.0).cos() * (2.0 * i - 1.0).cos() - 0.5)).abs().sqrt())
        .sum();
    let f4: f64 = indexed(x)
        .map(|(i, v)| (v - 0.5 * (1000.0 * PI * i / d).sin() - 0.5).powi(2))
        .sum();
    vec![-f1, -fes_sin_cos_term(x), -f3, -f4]
}

/// Declarative problem description used by run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProblemSpec {
    SyntheticGp {
        d: usize,
        objectives: usize,
        length_scale: f64,
        #[serde(default = "default_synthetic_features")]
        features: usize,
        seed: u64,
    },
    Named {
        name: String,
        #[serde(default)]
        d: Option<usize>,
    },
    Combined {
        parts: Vec<ProblemSpec>,
    },
    BiSphere {
        d: usize,
    },
}

fn default_synthetic_features() -> usize {
    SYNTHETIC_FEATURES
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::SyntheticGp {
                d,
                objectives,
                length_scale,
                features,
                seed,
            } => make_synthetic_gp(*d, *objectives, *length_scale, *features, *seed),
            ProblemSpec::Named { name, d } => make_named_with_dim(name, *d),
            ProblemSpec::Combined { parts } => {
                let mut it = parts.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::invalid("combined problem has no parts"))?;
                let mut acc = first.build()?;
                for p in it {
                    acc = make_combined(&acc, &p.build()?)?;
                }
                Ok(acc)
            }
            ProblemSpec::BiSphere { d } => make_bi_sphere(*d),
        }
    }

    /// Parses `fonseca`, `fes3+kursawe` and similar shorthands.
    pub fn parse_named(s: &str) -> Result<Self> {
        let parts: Vec<ProblemSpec> = s
            .split('+')
            .map(|p| ProblemSpec::Named {
                name: p.trim().to_string(),
                d: None,
            })
            .collect();
        let spec = if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            ProblemSpec::Combined { parts }
        };
        spec.build()?;
        Ok(spec)
    }
}

/// Budget of the long solver run that stands in for the true frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReferenceConfig {
    pub generations: usize,
    pub population: usize,
    pub seed: u64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            generations: 10_000,
            population: 100,
            seed: 0,
        }
    }
}

const CACHE_MAGIC: &str = "# pfev-reference-frontier v1";

pub fn reference_cache_path(dir: &Path, problem: &Problem, cfg: &ReferenceConfig) -> PathBuf {
    let safe: String = problem
        .id()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    dir.join(format!(
        "{safe}_s{}_g{}_p{}.txt",
        cfg.seed, cfg.generations, cfg.population
    ))
}

/// Long NSGA-II run on the true problem, optionally cached under `cache_dir`.
pub fn reference_frontier(
    problem: &Problem,
    cfg: &ReferenceConfig,
    cache_dir: Option<&Path>,
) -> Result<ParetoSet<f64>> {
    let path = cache_dir.map(|d| reference_cache_path(d, problem, cfg));
    if let Some(p) = &path {
        if p.exists() {
            return read_reference(p, problem, cfg);
        }
    }
    let solver = Nsga2Config {
        population: cfg.population,
        generations: cfg.generations,
        seed: cfg.seed,
        ..Nsga2Config::default()
    };
    let front = nsga2_solve(|x| problem.evaluate(x), &problem.domain(), &solver)?;
    if let Some(p) = &path {
        write_reference(p, problem, cfg, &front)?;
    }
    Ok(front)
}

fn header(problem: &Problem, cfg: &ReferenceConfig) -> Vec<String> {
    vec![
        CACHE_MAGIC.to_string(),
        format!("# problem {}", problem.id()),
        format!("# seed {}", cfg.seed),
        format!("# generations {}", cfg.generations),
        format!("# population {}", cfg.population),
        format!("# tool_version {}", env!("CARGO_PKG_VERSION")),
    ]
}

fn write_reference(
    path: &Path,
    problem: &Problem,
    cfg: &ReferenceConfig,
    front: &ParetoSet<f64>,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = header(problem, cfg).join("\n");
    text.push('\n');
    for p in front.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn read_reference(path: &Path, problem: &Problem, cfg: &ReferenceConfig) -> Result<ParetoSet<f64>> {
    let text = fs::read_to_string(path)?;
    let expected = header(problem, cfg);
    let mut lines = text.lines();
    for want in &expected[..5] {
        let got = lines.next().unwrap_or_default();
        if got != want {
            return Err(Error::Parse(format!(
                "{}: header line {got:?} does not match {want:?}",
                path.display()
            )));
        }
    }
    let mut points = Vec::new();
    for line in lines {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let p = line
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{}: {e} in {line:?}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        if p.len() != problem.n_objectives() {
            return Err(Error::Parse(format!(
                "{}: expected {} values per line, got {}",
                path.display(),
                problem.n_objectives(),
                p.len()
            )));
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::Parse(format!("{}: no frontier points", path.display())));
    }
    Ok(non_dominated_filter(&points))
}
