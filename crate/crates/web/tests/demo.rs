use stockcast_web::{additive_csv, history_csv, sample, sarima_csv, sentiment_csv};

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn history_lists_every_bar() {
    let csv = history_csv(&sample("prices")).unwrap();
    assert_eq!(csv.lines().count(), 501);
    assert!(csv.starts_with("date,close\n2015-01-01,"));
}

#[test]
fn additive_band_brackets_the_mean() {
    let csv = additive_csv(&sample("prices"), 20, 10, 2, 0.8).unwrap();
    let r = rows(&csv);
    assert_eq!(r.len(), 20);
    assert!(csv.lines().nth(1).unwrap().starts_with("2016-12-01,"));
    for v in r {
        assert!(v[1] <= v[0] && v[0] <= v[2], "{v:?}");
    }
}

#[test]
fn sarima_forecast_has_horizon_rows() {
    let csv = sarima_csv(&sample("prices"), "1,1,1", "1,0,0,5", 15).unwrap();
    let r = rows(&csv);
    assert_eq!(r.len(), 15);
    assert!(r.iter().all(|v| v[0].is_finite()));
}

#[test]
fn bad_inputs_are_reported() {
    assert!(sarima_csv(&sample("prices"), "1,1", "0,0,0,1", 5).unwrap_err().contains("expected 3"));
    assert!(history_csv("date,open\nnot a row").is_err());
    assert!(history_csv("date,open,high,low,close,volume\n").is_err());
}

#[test]
fn sentiment_scores_are_bounded() {
    let csv = sentiment_csv(&sample("lexicon"), &sample("corpus"), &sample("documents")).unwrap();
    let r = rows(&csv);
    assert_eq!(r.len(), 60);
    assert!(r.iter().all(|v| (-1.0..=1.0).contains(&v[0])));
}
