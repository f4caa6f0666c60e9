use proptest::prelude::*;
use stockcast::tuner::{grid_optimize, stepwise_optimize, Param, SearchSpace};

fn param(name: &str, candidates: &[f64], default: f64) -> Param {
    Param {
        name: name.into(),
        candidates: candidates.to_vec(),
        default,
    }
}

#[test]
fn separable_objective_reaches_global_optimum() {
    let space = SearchSpace::new(vec![param("x", &[-1.0, 0.0, 1.0], -1.0), param("y", &[-2.0, 0.0, 2.0], 2.0)]).unwrap();
    let log = stepwise_optimize(|c: &[f64]| c[0] * c[0] + c[1] * c[1], &space);
    assert_eq!(log.best_config, vec![0.0, 0.0]);
    assert_eq!(log.best_value, 0.0);
}

#[test]
fn hand_traced_non_separable_path() {
    let space = SearchSpace::new(vec![param("x", &[0.0, 1.0], 0.0), param("y", &[0.0, 1.0], 1.0)]).unwrap();
    let log = stepwise_optimize(|c: &[f64]| (c[0] - c[1]).powi(2), &space);
    let path: Vec<(Vec<f64>, f64)> = log.trials.iter().map(|t| (t.config.clone(), t.objective)).collect();
    assert_eq!(
        path,
        vec![
            (vec![0.0, 1.0], 1.0),
            (vec![1.0, 1.0], 0.0),
            (vec![1.0, 0.0], 1.0),
            (vec![1.0, 1.0], 0.0),
        ]
    );
    assert_eq!(log.best_config, vec![1.0, 1.0]);
    assert_eq!(log.best_value, 0.0);
}

#[test]
fn single_parameter_matches_grid() {
    let space = SearchSpace::new(vec![param("x", &[4.0, -1.0, 2.0, 0.5], 2.0)]).unwrap();
    let f = |c: &[f64]| (c[0] - 0.7).abs();
    let a = stepwise_optimize(f, &space);
    let b = grid_optimize(f, &space, 10).unwrap();
    assert_eq!(a.trials, b.trials);
    assert_eq!(a.best_config, b.best_config);
}

fn space_strategy() -> impl Strategy<Value = SearchSpace> {
    prop::collection::vec(prop::collection::vec(-5i32..5, 1..5), 1..4).prop_map(|grids| {
        let params = grids
            .into_iter()
            .enumerate()
            .map(|(i, mut g)| {
                g.sort();
                g.dedup();
                let c: Vec<f64> = g.iter().map(|&v| v as f64).collect();
                param(&format!("p{i}"), &c, c[c.len() / 2])
            })
            .collect();
        SearchSpace::new(params).unwrap()
    })
}

proptest! {
    #[test]
    fn counts_dominance_and_determinism(space in space_strategy(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = |c: &[f64]| c.iter().enumerate().map(|(i, v)| (v - a * i as f64).powi(2) + b * v * c[0]).sum::<f64>();
        let step = stepwise_optimize(f, &space);
        let grid = grid_optimize(f, &space, 10_000).unwrap();
        prop_assert_eq!(step.trials.len(), space.stepwise_count());
        prop_assert_eq!(grid.trials.len(), space.grid_count());
        prop_assert!(grid.best_value <= step.best_value);
        let min = step.trials.iter().map(|t| t.objective).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(step.best_value, min);
        prop_assert_eq!(stepwise_optimize(f, &space), step);
    }

    #[test]
    fn separable_stepwise_is_globally_optimal(space in space_strategy(), targets in prop::collection::vec(-5.0f64..5.0, 3)) {
        let f = |c: &[f64]| c.iter().zip(&targets).map(|(v, t)| (v - t).abs()).sum::<f64>();
        let step = stepwise_optimize(f, &space);
        let grid = grid_optimize(f, &space, 10_000).unwrap();
        prop_assert!((step.best_value - grid.best_value).abs() < 1e-12);
    }
}
