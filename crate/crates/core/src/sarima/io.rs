//! Versioned text format for fitted SARIMA models.

use super::{SarimaCoefficients, SarimaModel, SarimaOrder};
use crate::textfmt::{Reader, Writer};
use crate::{Error, Result};

const MAGIC: &str = "stockcast-sarima v1";

pub(super) fn save(m: &SarimaModel) -> String {
    let o = &m.order;
    let c = &m.coefficients;
    let mut w = Writer::new(MAGIC);
    w.field(
        "order",
        format!("{} {} {} {} {} {} {}", o.p, o.d, o.q, o.seasonal_p, o.seasonal_d, o.seasonal_q, o.m),
    )
    .floats("phi", &c.phi)
    .floats("theta", &c.theta)
    .floats("seasonal_phi", &c.seasonal_phi)
    .floats("seasonal_theta", &c.seasonal_theta)
    .field("intercept", c.intercept)
    .field("sigma2", m.sigma2)
    .floats("level_tail", &m.level_tail)
    .floats("diff_tail", &m.diff_tail)
    .floats("resid_tail", &m.resid_tail);
    w.finish()
}

pub(super) fn load(text: &str) -> Result<SarimaModel> {
    let mut r = Reader::new(text, MAGIC)?;
    let nums: Vec<usize> = r
        .field("order")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Format(format!("bad order value `{t}`"))))
        .collect::<Result<_>>()?;
    let [p, d, q, sp, sd, sq, m] = nums[..] else {
        return Err(Error::Format("order needs 7 values".into()));
    };
    let order = SarimaOrder::new(p, d, q, sp, sd, sq, m);
    order.validate().map_err(|e| Error::Format(e.to_string()))?;
    let coefficients = SarimaCoefficients {
        phi: r.floats_len("phi", p)?,
        theta: r.floats_len("theta", q)?,
        seasonal_phi: r.floats_len("seasonal_phi", sp)?,
        seasonal_theta: r.floats_len("seasonal_theta", sq)?,
        intercept: r.parse("intercept")?,
    };
    let sigma2: f64 = r.parse("sigma2")?;
    let model = SarimaModel {
        order,
        coefficients,
        sigma2,
        level_tail: r.floats_len("level_tail", order.diff_span())?,
        diff_tail: r.floats_len("diff_tail", order.ar_span())?,
        resid_tail: r.floats_len("resid_tail", order.ma_span())?,
    };
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarima::{fit, SarimaConfig};

    #[test]
    fn round_trip_is_exact() {
        let y: Vec<f64> = (0..200).map(|t| (t as f64 * 0.7).sin() * 5.0 + t as f64 * 0.1).collect();
        let m = fit(&y, SarimaOrder::new(1, 1, 1, 1, 0, 0, 4), &SarimaConfig::default()).unwrap();
        let back = load(&save(&m)).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.forecast(6).unwrap(), m.forecast(6).unwrap());
    }
}
