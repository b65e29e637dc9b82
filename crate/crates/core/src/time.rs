//! Exact plan time.
//!
//! Native plans live on the integer clock-cycle grid, but plans produced by
//! external temporal planners carry epsilon-separated decimals. Both are held
//! as exact rationals so that interval comparisons never suffer from rounding.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Tolerance under which a parsed decimal is snapped to the integer grid.
pub const GRID_EPSILON: Rational64 = Rational64::new_raw(1, 1000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(Rational64);

impl Time {
    pub const ZERO: Time = Time(Rational64::new_raw(0, 1));

    pub fn from_int(cycles: i64) -> Self {
        Time(Rational64::from_integer(cycles))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Time(Rational64::new(numer, denom))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Integer value when the time sits on the clock grid.
    pub fn as_int(&self) -> Option<i64> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i64 {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn ratio(&self) -> Rational64 {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Snap to the nearest integer if within [`GRID_EPSILON`] of it.
    pub fn snapped(self) -> Self {
        let nearest = self.0.round();
        if (self.0 - nearest).abs() <= GRID_EPSILON {
            Time(nearest)
        } else {
            self
        }
    }
}

impl From<i64> for Time {
    fn from(v: i64) -> Self {
        Time::from_int(v)
    }
}

impl From<u32> for Time {
    fn from(v: u32) -> Self {
        Time::from_int(v as i64)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal time `{0}`")]
pub struct ParseTimeError(pub String);

impl FromStr for Time {
    type Err = ParseTimeError;

    /// Parses a non-negative decimal such as `12`, `0.500` or `3.`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTimeError(s.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        // Digits beyond 1e-12 cannot matter for clock cycles and would overflow.
        let frac_part = &frac_part[..frac_part.len().min(12)];
        let int_val: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let mut denom: i64 = 1;
        let mut numer: i64 = 0;
        for c in frac_part.chars() {
            denom *= 10;
            numer = numer * 10 + c.to_digit(10).unwrap() as i64;
        }
        let total = int_val
            .checked_mul(denom)
            .and_then(|v| v.checked_add(numer))
            .ok_or_else(err)?;
        Ok(Time(Rational64::new(total, denom)))
    }
}

impl fmt::Display for Time {
    /// Integers print bare; other values print as an exact decimal when the
    /// denominator allows it, else with six digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.as_int() {
            return write!(f, "{i}");
        }
        match exact_decimal(self.0) {
            Some(s) => f.write_str(&s),
            None => write!(f, "{:.6}", self.to_f64()),
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_int() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_f64(self.to_f64()),
        }
    }
}

/// Decimal expansion of a rational whose denominator has only factors 2 and 5.
pub(crate) fn exact_decimal(r: Rational64) -> Option<String> {
    let mut d = *r.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let digits = twos.max(fives);
    let scale = 10i64.checked_pow(digits)?;
    let scaled = r.numer().checked_mul(scale / r.denom())?;
    let neg = scaled < 0;
    let abs = scaled.unsigned_abs();
    let int = abs / scale as u64;
    let frac = abs % scale as u64;
    Some(format!(
        "{}{}.{:0width$}",
        if neg { "-" } else { "" },
        int,
        frac,
        width = digits as usize
    ))
}

/// Fixed three-decimal rendering used by the IPC plan format; falls back to
/// the exact expansion when three digits would lose precision.
pub fn ipc_decimal(t: Time) -> String {
    let thousandths = t.0 * Rational64::from_integer(1000);
    if thousandths.is_integer() {
        let v = thousandths.to_integer();
        format!("{}.{:03}", v / 1000, v % 1000)
    } else {
        exact_decimal(t.0).unwrap_or_else(|| format!("{:.9}", t.to_f64()))
    }
}
