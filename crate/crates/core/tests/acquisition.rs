use pfev::acquisition::{
    dirichlet_weights, expected_improvement, lb_map_from_states, lb_naive_mc_from_states,
    optimize_lambda_from_states, prepare_samples, scalarize, Estimator, LambdaPolicy,
    SampleConfig, PAREGO_RHO,
};
use pfev::gp::{Dataset, Domain, FitConfig, MultiGp};
use pfev::moo::Nsga2Config;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model() -> (MultiGp<f64>, Domain<f64>) {
    let xs: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64 / 6.0, ((i * 5) % 7) as f64 / 6.0]).collect();
    let ys: Vec<Vec<f64>> = xs.iter().map(|x| vec![(4.0 * x[0]).sin() - x[1], x[0] * x[1]]).collect();
    let dom = Domain::unit(2);
    let gps = MultiGp::fit(&Dataset::new(xs, ys).unwrap(), &dom, &FitConfig::default()).unwrap();
    (gps, dom)
}

fn cfg() -> SampleConfig {
    SampleConfig {
        n_samples: 6,
        n_features: 150,
        nsga2: Nsga2Config {
            population: 20,
            generations: 25,
            ..Default::default()
        },
        ..Default::default()
    }
}

#[test]
fn map_without_prior_weight_is_the_naive_estimator_inside_a_u() {
    let (gps, dom) = model();
    let s = prepare_samples(&gps, &dom, &cfg(), 3).unwrap();
    let mut checked = 0;
    for i in 0..30 {
        let x = [(i % 6) as f64 / 5.0, (i / 6) as f64 / 4.0];
        let states = s.states(&x, &gps).unwrap();
        if !states.iter().all(|st| st.in_under) {
            continue;
        }
        for l in [0.001, 0.3, 1.0] {
            let a = lb_map_from_states(&states, l, 0.0).unwrap();
            let b = lb_naive_mc_from_states(&states, l).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn lambda_search_returns_the_grid_maximum() {
    let (gps, dom) = model();
    let s = prepare_samples(&gps, &dom, &cfg(), 4).unwrap();
    let policy = LambdaPolicy::default();
    for x in [[0.2, 0.2], [0.9, 0.1], [0.5, 0.95]] {
        let states = s.states(&x, &gps).unwrap();
        let (l, v) = optimize_lambda_from_states(&states, &policy, Estimator::default()).unwrap();
        let grid_max = policy
            .grid
            .iter()
            .map(|g| lb_map_from_states(&states, *g, 1.0).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(v, grid_max);
        assert!(policy.grid.contains(&l));
        let refined = LambdaPolicy {
            refine: true,
            ..LambdaPolicy::default()
        };
        let (_, vr) = optimize_lambda_from_states(&states, &refined, Estimator::default()).unwrap();
        assert!(vr >= v);
    }
}

#[test]
fn same_seed_same_samples() {
    let (gps, dom) = model();
    let a = prepare_samples(&gps, &dom, &cfg(), 9).unwrap();
    let b = prepare_samples(&gps, &dom, &cfg(), 9).unwrap();
    for (ea, eb) in a.entries().iter().zip(b.entries()) {
        assert_eq!(ea.frontier.points(), eb.frontier.points());
    }
}

proptest! {
    #[test]
    fn dirichlet_weights_lie_on_the_simplex(seed in 0u64..1000, n in 2usize..6) {
        let w: Vec<f64> = dirichlet_weights(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(w.iter().all(|v| *v >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalarization_is_monotone(f in prop::collection::vec(-2.0..2.0f64, 3), bump in 0.0..1.0f64, j in 0usize..3) {
        let w = [0.2, 0.5, 0.3];
        let mut g = f.clone();
        g[j] += bump;
        prop_assert!(scalarize(&g, &w, PAREGO_RHO) >= scalarize(&f, &w, PAREGO_RHO));
    }

    #[test]
    fn expected_improvement_dominates_plain_improvement(mean in -3.0..3.0f64, var in 1e-6..4.0f64, best in -3.0..3.0f64) {
        let ei = expected_improvement(mean, var, best);
        prop_assert!(ei >= 0.0);
        prop_assert!(ei + 1e-12 >= (mean - best).max(0.0));
    }
}
