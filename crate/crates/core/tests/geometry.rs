mod common;

use common::*;
use pfev::geometry::{
    decompose_dominated, decompose_dominating, hypervolume, truncation_quantities,
    DEFAULT_MAX_CELLS,
};
use proptest::prelude::*;
use rand::Rng;

fn front_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=4).prop_flat_map(|l| prop::collection::vec(prop::collection::vec(-1.0..1.0f64, l), 1..=6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hypervolume_matches_inclusion_exclusion(front in front_strategy()) {
        let l = front[0].len();
        let reference = vec![-1.0; l];
        let hv = hypervolume(&front, &reference).unwrap();
        let ie = hv_inclusion_exclusion(&front, &reference);
        prop_assert!((hv - ie).abs() <= 1e-9, "{hv} vs {ie}");
    }

    #[test]
    fn cells_partition_the_dominated_region(front in front_strategy(), probes in prop::collection::vec(prop::collection::vec(-1.5..1.5f64, 4), 40)) {
        let l = front[0].len();
        let over = decompose_dominated(&front, DEFAULT_MAX_CELLS).unwrap();
        let flipped = decompose_dominating(&front, DEFAULT_MAX_CELLS).unwrap();
        let cells = over.cells();
        for probe in &probes {
            let f = &probe[..l];
            let hits = cells.iter().filter(|c| c.contains(f)).count();
            prop_assert!(hits <= 1, "cells overlap");
            prop_assert_eq!(hits == 1, in_over(&front, f));
            prop_assert_eq!(flipped.contains(f), !in_under(&front, f));
        }
        // frontier points themselves lie on both boundaries
        for p in &front {
            prop_assert!(over.contains(p));
            prop_assert!(flipped.contains(p));
        }
        let reference = vec![-1.0; l];
        let vol: f64 = cells.iter().map(|c| c.clipped_volume(&reference)).sum();
        prop_assert!((vol - hypervolume(&front, &reference).unwrap()).abs() <= 1e-9);
    }
}

#[test]
fn z_values_against_monte_carlo() {
    let mut r = rng(21);
    for _ in 0..20 {
        let l = r.gen_range(2..=4);
        let n = r.gen_range(1..=8);
        let front = random_front(&mut r, n, l);
        let mean: Vec<f64> = (0..l).map(|_| r.gen_range(-1.0..1.0)).collect();
        let std: Vec<f64> = (0..l).map(|_| r.gen_range(0.1..1.0)).collect();
        let over = decompose_dominated(&front, DEFAULT_MAX_CELLS).unwrap();
        let flipped = decompose_dominating(&front, DEFAULT_MAX_CELLS).unwrap();
        let q = truncation_quantities(&over, &flipped, &mean, &std);
        let (po, se_o) = mc_probability(&mean, &std, 100_000, &mut r, |f| in_over(&front, f));
        let (pu, se_u) = mc_probability(&mean, &std, 100_000, &mut r, |f| in_under(&front, f));
        assert!((q.z_over - po).abs() <= 4.0 * se_o + 1e-12, "{} {po}", q.z_over);
        assert!((q.z_under - pu).abs() <= 4.0 * se_u + 1e-12, "{} {pu}", q.z_under);
    }
}

#[test]
fn far_tails_keep_precision() {
    let front = vec![vec![0.0, 0.0]];
    let over = decompose_dominated(&front, DEFAULT_MAX_CELLS).unwrap();
    // P(f1 ≤ 0, f2 ≤ 0) with mean 10σ above: Φ(−10)²
    let p = over.probability(&[10.0, 10.0], &[1.0, 1.0]);
    let phi: f64 = 7.619853024160527e-24;
    assert!((p / (phi * phi) - 1.0).abs() < 1e-9, "{p}");
}
