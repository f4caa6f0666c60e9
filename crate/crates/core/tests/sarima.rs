use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stockcast::sarima::{
    css_loss, fit, min_root_modulus, SarimaCoefficients, SarimaConfig, SarimaModel, SarimaOrder,
};

fn noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let z = noise(n, seed);
    let mut x = vec![z[0]];
    for t in 1..n {
        x.push(phi * x[t - 1] + z[t]);
    }
    x
}

fn coefs(phi: f64) -> SarimaCoefficients {
    SarimaCoefficients {
        phi: vec![phi],
        theta: vec![],
        seasonal_phi: vec![],
        seasonal_theta: vec![],
        intercept: 0.0,
    }
}

#[test]
fn true_parameters_beat_perturbations() {
    let y = ar1(0.5, 2000, 21);
    let order = SarimaOrder::new(1, 0, 0, 0, 0, 0, 1);
    let at_truth = css_loss(&coefs(0.5), &y, &order).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let perturbed = css_loss(&coefs(0.5 + sign * 0.2), &y, &order).unwrap();
        assert!(at_truth <= perturbed, "{at_truth} > {perturbed}");
    }
}

#[test]
fn default_orders_fit_on_seasonal_series() {
    let z = noise(2000, 8);
    let y: Vec<f64> = (0..2000)
        .map(|t| {
            let t_f = t as f64;
            100.0 + 0.02 * t_f + 3.0 * (2.0 * std::f64::consts::PI * t_f / 15.0).sin() + z[t]
        })
        .collect();
    let order = SarimaOrder::new(1, 1, 1, 3, 3, 1, 15);
    let model = fit(&y, order, &SarimaConfig::default()).unwrap();
    let c = &model.coefficients;
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    for poly in [c.phi.clone(), c.seasonal_phi.clone(), neg(&c.theta), neg(&c.seasonal_theta)] {
        assert!(min_root_modulus(&poly) > 1.0);
    }
    assert!(model.forecast(10).unwrap().iter().all(|v| v.is_finite()));
}

#[test]
fn forecast_matches_hand_unrolled_recursion() {
    // (1,1,1)(1,0,0,4): w_t = φ w_{t-1} + Φ w_{t-4} − φΦ w_{t-5} + e_t + θ e_{t-1}
    let (phi, sphi, theta) = (0.4, 0.3, -0.2);
    let model = SarimaModel {
        order: SarimaOrder::new(1, 1, 1, 1, 0, 0, 4),
        coefficients: SarimaCoefficients {
            phi: vec![phi],
            theta: vec![theta],
            seasonal_phi: vec![sphi],
            seasonal_theta: vec![],
            intercept: 0.0,
        },
        sigma2: 1.0,
        level_tail: vec![10.0],
        diff_tail: vec![0.5, -1.0, 2.0, 0.3, 1.1],
        resid_tail: vec![0.7],
    };
    let mut w = model.diff_tail.clone();
    let mut e = vec![0.0; 4];
    e.push(0.7);
    let mut level = 10.0;
    let mut expected = Vec::new();
    for _ in 0..10 {
        let n = w.len();
        let next = phi * w[n - 1] + sphi * w[n - 4] - phi * sphi * w[n - 5] + theta * e[n - 1];
        w.push(next);
        e.push(0.0);
        level += next;
        expected.push(level);
    }
    let got = model.forecast(10).unwrap();
    for (a, b) in got.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn ar_forecasts_approach_the_mean_monotonically() {
    for (seed, phi) in [(1u64, 0.8), (2, -0.6), (3, 0.3), (4, 0.95)] {
        let y: Vec<f64> = ar1(phi, 600, seed).iter().map(|v| v + 20.0).collect();
        let model = fit(&y, SarimaOrder::new(1, 0, 0, 0, 0, 0, 1), &SarimaConfig::default()).unwrap();
        let mean = model.coefficients.intercept;
        let f = model.forecast(30).unwrap();
        for pair in f.windows(2) {
            assert!((pair[1] - mean).abs() <= (pair[0] - mean).abs() + 1e-12);
        }
    }
}

#[test]
fn fitting_is_deterministic() {
    let y = ar1(0.3, 400, 6);
    let order = SarimaOrder::new(1, 0, 1, 0, 0, 0, 1);
    let cfg = SarimaConfig::default();
    assert_eq!(fit(&y, order, &cfg).unwrap(), fit(&y, order, &cfg).unwrap());
}
