mod common;

use common::rng;
use pfev::benchmarks::{
    make_bi_sphere, make_named, make_synthetic_gp, reference_frontier, ReferenceConfig,
};
use pfev::geometry::hypervolume;
use rand::Rng;

/// Ensemble statistics over independent problem seeds at fixed probe points:
/// 200 seeds x 50 points = 10^4 draws.
#[test]
fn synthetic_objectives_look_like_unit_prior_draws() {
    let mut r = rng(100);
    let probes: Vec<[f64; 2]> = (0..50).map(|_| [r.gen(), r.gen()]).collect();
    let mut ys = Vec::new();
    for seed in 0..200 {
        let p = make_synthetic_gp(2, 2, 0.1, 1000, seed).unwrap();
        ys.extend(probes.iter().map(|x| p.evaluate(x)));
    }
    let n = ys.len() as f64;
    let second = |a: usize, b: usize| ys.iter().map(|y| y[a] * y[b]).sum::<f64>() / n;
    let (v0, v1, c) = (second(0, 0), second(1, 1), second(0, 1));
    let corr = c / (v0 * v1).sqrt();
    assert!((0.7..=1.3).contains(&v0) && (0.7..=1.3).contains(&v1), "{v0} {v1}");
    assert!(corr.abs() <= 0.1, "{corr}");
}

#[test]
fn bi_sphere_reference_hypervolume() {
    let p = make_bi_sphere(2).unwrap();
    let cfg = ReferenceConfig {
        generations: 300,
        population: 100,
        seed: 0,
    };
    let front = reference_frontier(&p, &cfg, None).unwrap();
    let hv = hypervolume(front.points(), &[-1.0, -1.0]).unwrap();
    assert!((hv / (5.0 / 6.0) - 1.0).abs() < 0.01, "{hv}");
}

#[test]
fn cached_frontier_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = make_named("kursawe").unwrap();
    let cfg = ReferenceConfig {
        generations: 40,
        population: 30,
        seed: 5,
    };
    let fresh = reference_frontier(&p, &cfg, Some(dir.path())).unwrap();
    let cached = reference_frontier(&p, &cfg, Some(dir.path())).unwrap();
    assert_eq!(fresh.points(), cached.points());
}

#[test]
fn fonseca_reference_has_converged() {
    let p = make_named("fonseca").unwrap();
    let hv = |generations| {
        let cfg = ReferenceConfig {
            generations,
            population: 100,
            seed: 0,
        };
        let f = reference_frontier(&p, &cfg, None).unwrap();
        hypervolume(f.points(), &[-1.0, -1.0]).unwrap()
    };
    let (a, b) = (hv(500), hv(1000));
    assert!(((b - a) / b).abs() < 0.005, "{a} {b}");
}
