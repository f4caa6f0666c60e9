//! Versioned text format for fitted additive models.

use chrono::NaiveDate;

use super::{AdditiveModel, HolidayEvent, HolidaySpec, SeasonalitySpec, TrendKind, TrendSpec};
use crate::textfmt::{Reader, Writer};
use crate::{Error, Result};

const MAGIC: &str = "stockcast-additive v1";

fn date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| Error::Format(format!("bad date `{s}`")))
}

fn token(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join("_")
}

pub(super) fn save(m: &AdditiveModel) -> String {
    let t = &m.trend;
    let mut w = Writer::new(MAGIC);
    w.field("origin", m.origin)
        .field("history_len", m.history_len)
        .field("last_date", m.last_date);
    match t.kind {
        TrendKind::Linear => w.field("trend", "linear"),
        TrendKind::Logistic { capacity } => w.field("trend", format!("logistic {capacity}")),
    };
    w.field("k", t.k)
        .field("m", t.m)
        .floats("changepoints", &t.changepoints)
        .floats("deltas", &t.deltas)
        .field("seasonalities", m.seasonalities.len());
    for s in &m.seasonalities {
        w.field("period", s.period).floats("a", &s.a).floats("b", &s.b);
    }
    w.field("holidays", m.holidays.events.len());
    for e in &m.holidays.events {
        let dates: Vec<String> = e.dates.iter().map(|d| d.to_string()).collect();
        w.field("holiday", format!("{} {} {}", token(&e.name), e.beta, dates.join(",")));
    }
    w.field("exogenous", m.exogenous_coefs.len());
    for (n, c) in m.exogenous_names.iter().zip(&m.exogenous_coefs) {
        w.field("regressor", format!("{} {c}", token(n)));
    }
    w.field("residual_sigma", m.residual_sigma);
    w.finish()
}

pub(super) fn load(text: &str) -> Result<AdditiveModel> {
    let mut r = Reader::new(text, MAGIC)?;
    let origin = date(r.field("origin")?)?;
    let history_len: usize = r.parse("history_len")?;
    let last_date = date(r.field("last_date")?)?;
    let kind = match r.field("trend")?.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["linear"] => TrendKind::Linear,
        ["logistic", c] => TrendKind::Logistic {
            capacity: c.parse().map_err(|_| Error::Format(format!("bad capacity `{c}`")))?,
        },
        other => return Err(Error::Format(format!("unknown trend `{}`", other.join(" ")))),
    };
    let k: f64 = r.parse("k")?;
    let m: f64 = r.parse("m")?;
    let changepoints = r.floats("changepoints")?;
    let deltas = r.floats_len("deltas", changepoints.len())?;
    let trend = TrendSpec::new(kind, k, m, changepoints, deltas).map_err(|e| Error::Format(e.to_string()))?;

    let n_seas: usize = r.parse("seasonalities")?;
    let mut seasonalities = Vec::with_capacity(n_seas);
    for _ in 0..n_seas {
        let period: f64 = r.parse("period")?;
        let a = r.floats("a")?;
        let b = r.floats_len("b", a.len())?;
        let s = SeasonalitySpec { period, a, b };
        s.validate().map_err(|e| Error::Format(e.to_string()))?;
        seasonalities.push(s);
    }

    let n_hol: usize = r.parse("holidays")?;
    let mut events = Vec::with_capacity(n_hol);
    for _ in 0..n_hol {
        let line = r.field("holiday")?;
        let mut parts = line.split_whitespace();
        let name = parts.next().ok_or_else(|| Error::Format("holiday without name".into()))?;
        let beta: f64 = parts
            .next()
            .and_then(|b| b.parse().ok())
            .ok_or_else(|| Error::Format(format!("holiday `{name}` without effect")))?;
        let dates = match parts.next() {
            Some(list) => list.split(',').map(date).collect::<Result<_>>()?,
            None => Default::default(),
        };
        events.push(HolidayEvent {
            name: name.to_string(),
            beta,
            dates,
        });
    }

    let n_exo: usize = r.parse("exogenous")?;
    let mut exogenous_names = Vec::with_capacity(n_exo);
    let mut exogenous_coefs = Vec::with_capacity(n_exo);
    for _ in 0..n_exo {
        let line = r.field("regressor")?;
        let (name, coef) = line
            .split_once(' ')
            .ok_or_else(|| Error::Format(format!("bad regressor line `{line}`")))?;
        exogenous_names.push(name.to_string());
        exogenous_coefs.push(coef.trim().parse().map_err(|_| Error::Format(format!("bad coefficient `{coef}`")))?);
    }
    let residual_sigma: f64 = r.parse("residual_sigma")?;
    if !(residual_sigma >= 0.0) {
        return Err(Error::Format("residual_sigma must be ≥ 0".into()));
    }
    Ok(AdditiveModel {
        trend,
        seasonalities,
        holidays: HolidaySpec { events },
        exogenous_names,
        exogenous_coefs,
        residual_sigma,
        origin,
        history_len,
        last_date,
    })
}
