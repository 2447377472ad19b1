//! Number formatting and range parsing shared by the CLI and examples.

use crate::{Error, Result};

/// Format with `digits` significant digits, `%g` style: fixed notation for
/// exponents in [-5, digits), scientific otherwise, trailing zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Six significant digits, the CSV convention.
pub fn g6(x: f64) -> String {
    sig(x, 6)
}

/// Inclusive range `A:B:step`. Values are `A + k·step` for every k with
/// `A + k·step < B + step/2`, so `0:400:5` has 81 entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!("range `{s}` must be A:B:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("range `{s}`: `{p}` is not a number")))
        };
        let r = RangeSpec { start: num(parts[0])?, stop: num(parts[1])?, step: num(parts[2])? };
        if !(r.step > 0.0) || !r.start.is_finite() || !r.stop.is_finite() {
            return Err(Error::InvalidInput(format!("range `{s}`: step must be positive")));
        }
        if r.stop < r.start {
            return Err(Error::InvalidInput(format!("range `{s}`: B must not be below A")));
        }
        Ok(r)
    }

    pub fn values(&self) -> Vec<f64> {
        let t = (self.stop - self.start) / self.step + 0.5;
        let count = (t - 1e-9).ceil().max(1.0) as usize;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl std::str::FromStr for RangeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RangeSpec::parse(s)
    }
}
