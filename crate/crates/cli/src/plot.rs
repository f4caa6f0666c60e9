//! Static SVG forecast plots with a companion CSV of the plotted points.
//!
//! Actual values are black dots, the forecast is a solid line, and an
//! uncertainty band (when present) is a shaded area behind both.

use std::fmt::Write;

use chrono::NaiveDate;
use stockcast::evaluation::Band;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 44.0;

pub struct Plot<'a> {
    pub title: String,
    pub dates: &'a [NaiveDate],
    pub actual: Option<&'a [f64]>,
    pub predicted: &'a [f64],
    pub band: Option<&'a Band>,
}

impl Plot<'_> {
    fn value_range(&self) -> (f64, f64) {
        let mut all: Vec<f64> = self.predicted.to_vec();
        all.extend(self.actual.into_iter().flatten());
        if let Some(b) = self.band {
            all.extend(&b.lower);
            all.extend(&b.upper);
        }
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return (0.0, 1.0);
        }
        let pad = ((hi - lo) * 0.05).max(1e-9 + lo.abs() * 1e-3);
        (lo - pad, hi + pad)
    }

    fn x(&self, i: usize) -> f64 {
        let n = self.predicted.len().max(2) - 1;
        LEFT + (WIDTH - LEFT - RIGHT) * i as f64 / n as f64
    }

    pub fn svg(&self) -> String {
        let (lo, hi) = self.value_range();
        let y = |v: f64| TOP + (HEIGHT - TOP - BOTTOM) * (hi - v) / (hi - lo);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{LEFT}" y="20" font-size="14">{}</text>"#, escape(&self.title));
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        let _ = writeln!(s, r##"<path d="M{x0} {y0} V{y1} H{x1}" fill="none" stroke="#444"/>"##);
        for k in 0..=4 {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r##"<line x1="{x0}" x2="{x1}" y1="{yy:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{v:.2}</text>"##,
                yy = y(v),
                tx = x0 - 6.0,
                ty = y(v) + 4.0,
            );
        }
        if let (Some(first), Some(last)) = (self.dates.first(), self.dates.last()) {
            let _ = writeln!(s, r#"<text x="{x0}" y="{}" text-anchor="start">{first}</text>"#, y1 + 18.0);
            let _ = writeln!(s, r#"<text x="{x1}" y="{}" text-anchor="end">{last}</text>"#, y1 + 18.0);
        }
        if let Some(b) = self.band {
            let mut d = String::new();
            for (i, v) in b.upper.iter().enumerate() {
                let _ = write!(d, "{}{:.2} {:.2} ", if i == 0 { "M" } else { "L" }, self.x(i), y(*v));
            }
            for (i, v) in b.lower.iter().enumerate().rev() {
                let _ = write!(d, "L{:.2} {:.2} ", self.x(i), y(*v));
            }
            let _ = writeln!(s, r##"<path d="{}Z" fill="#87ceeb" fill-opacity="0.5" stroke="none"/>"##, d);
        }
        let pts: Vec<String> = self
            .predicted
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", self.x(i), y(*v)))
            .collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##, pts.join(" "));
        if let Some(actual) = self.actual {
            for (i, v) in actual.iter().enumerate() {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, self.x(i), y(*v));
            }
        }
        let _ = writeln!(
            s,
            r##"<text x="{}" y="20" text-anchor="end"><tspan fill="#1f4e9c">forecast</tspan>{}{}</text>"##,
            x1,
            if self.actual.is_some() { "  ● actual" } else { "" },
            if self.band.is_some() { r##"  <tspan fill="#87ceeb">interval</tspan>"## } else { "" },
        );
        s.push_str("</svg>\n");
        s
    }

    /// `date,actual,predicted,lower,upper`; absent columns are empty.
    pub fn points_csv(&self) -> String {
        let mut s = String::from("date,actual,predicted,lower,upper\n");
        for (i, d) in self.dates.iter().enumerate() {
            let actual = self.actual.map(|a| a[i].to_string()).unwrap_or_default();
            let (lower, upper) = self
                .band
                .map(|b| (b.lower[i].to_string(), b.upper[i].to_string()))
                .unwrap_or_default();
            let _ = writeln!(s, "{d},{actual},{},{lower},{upper}", self.predicted[i]);
        }
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
