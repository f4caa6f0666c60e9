//! Line-oriented `key value` reader/writer shared by the model file formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save/load cycle reproduces every value bit for bit.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::{Error, Result};

pub(crate) struct Writer {
    out: String,
}

impl Writer {
    pub(crate) fn new(magic: &str) -> Self {
        Self {
            out: format!("{magic}\n"),
        }
    }

    pub(crate) fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.out, "{key} {value}");
        self
    }

    pub(crate) fn floats(&mut self, key: &str, values: &[f64]) -> &mut Self {
        self.out.push_str(key);
        for v in values {
            let _ = write!(self.out, " {v}");
        }
        self.out.push('\n');
        self
    }

    pub(crate) fn finish(self) -> String {
        self.out
    }
}

pub(crate) struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(text: &'a str, magic: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, first)) if first.trim() == magic => Ok(Self { lines }),
            Some((_, first)) => Err(Error::Format(format!(
                "expected header `{magic}`, found `{}`",
                first.trim()
            ))),
            None => Err(Error::Format("empty model file".into())),
        }
    }

    /// Value part of the next line, which must start with `key`.
    pub(crate) fn field(&mut self, key: &str) -> Result<&'a str> {
        let (no, line) = self
            .lines
            .next()
            .ok_or_else(|| Error::Format(format!("missing `{key}`")))?;
        let line = line.trim_end();
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            None if line == key => Ok(""),
            _ => Err(Error::Format(format!(
                "line {}: expected `{key}`, found `{line}`",
                no + 1
            ))),
        }
    }

    pub(crate) fn parse<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        v.trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad value `{v}` for `{key}`")))
    }

    pub(crate) fn floats(&mut self, key: &str) -> Result<Vec<f64>> {
        let v = self.field(key)?;
        v.split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad number `{t}` in `{key}`")))
            })
            .collect()
    }

    pub(crate) fn floats_len(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let v = self.floats(key)?;
        if v.len() != len {
            return Err(Error::Format(format!(
                "`{key}` has {} values, expected {len}",
                v.len()
            )));
        }
        Ok(v)
    }
}

pub(crate) fn parse_opt_f64(s: &str) -> Result<Option<f64>> {
    match s.trim() {
        "none" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| Error::Format(format!("bad number `{t}`"))),
    }
}

pub(crate) fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}
