//! Exact fixed-point time offsets.
//!
//! Offsets are stored as a signed count of nano-units (nine fractional decimal
//! digits). Decimal strings round-trip byte-for-byte through the canonical
//! formatting, which keeps every serialization deterministic.

use std::fmt;
use std::str::FromStr;

use crate::error::AgError;

const SCALE: i64 = 1_000_000_000;
const FRACTION_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Offset(i64);

impl Offset {
    pub const ZERO: Offset = Offset(0);
    pub const MIN: Offset = Offset(i64::MIN);
    pub const MAX: Offset = Offset(i64::MAX);
    /// Smallest representable positive offset.
    pub const EPSILON: Offset = Offset(1);

    pub const fn from_nanos(nanos: i64) -> Offset {
        Offset(nanos)
    }

    pub const fn from_secs(secs: i64) -> Offset {
        Offset(secs * SCALE)
    }

    pub const fn as_nanos(self) -> i64 {
        self.0
    }

    /// Converts from floating point, rounding to the nearest nano-unit.
    pub fn from_f64(value: f64) -> Result<Offset, AgError> {
        let scaled = (value * SCALE as f64).round();
        if !scaled.is_finite() || scaled.abs() >= i64::MAX as f64 {
            return Err(AgError::BadArgument(format!("offset {value} out of range")));
        }
        Ok(Offset(scaled as i64))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// `numerator / denominator` seconds, rounded to the nearest nano-unit.
    pub fn from_ratio(numerator: i64, denominator: i64) -> Result<Offset, AgError> {
        if denominator <= 0 {
            return Err(AgError::BadArgument(format!(
                "non-positive denominator {denominator}"
            )));
        }
        let scaled = numerator as i128 * SCALE as i128;
        let d = denominator as i128;
        let rounded = (2 * scaled + d).div_euclid(2 * d);
        i64::try_from(rounded)
            .map(Offset)
            .map_err(|_| AgError::BadArgument("offset out of range".into()))
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, other: Offset) -> Option<Offset> {
        self.0.checked_add(other.0).map(Offset)
    }

    pub fn checked_sub(self, other: Offset) -> Option<Offset> {
        self.0.checked_sub(other.0).map(Offset)
    }

    pub fn saturating_add(self, other: Offset) -> Offset {
        Offset(self.0.saturating_add(other.0))
    }

    pub fn saturating_sub(self, other: Offset) -> Offset {
        Offset(self.0.saturating_sub(other.0))
    }

    /// Absolute distance, saturating at [`Offset::MAX`].
    pub fn distance(self, other: Offset) -> Offset {
        let d = (self.0 as i128 - other.0 as i128).unsigned_abs();
        Offset(d.min(i64::MAX as u128) as i64)
    }

    /// Point `k/n` of the way from `self` to `end`, rounded toward `self`.
    pub fn lerp(self, end: Offset, k: i64, n: i64) -> Offset {
        debug_assert!(n > 0 && (0..=n).contains(&k));
        let span = end.0 as i128 - self.0 as i128;
        let step = (span * k as i128).div_euclid(n as i128);
        Offset((self.0 as i128 + step) as i64)
    }

    pub fn midpoint(self, end: Offset) -> Offset {
        self.lerp(end, 1, 2)
    }
}

impl fmt::Display for Offset {
    /// Canonical form: at least one fractional digit, no trailing zeros beyond it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let magnitude = (self.0 as i128).unsigned_abs();
        let whole = magnitude / SCALE as u128;
        let frac = magnitude % SCALE as u128;
        let mut digits = format!("{frac:09}");
        while digits.len() > 1 && digits.ends_with('0') {
            digits.pop();
        }
        let sign = if self.0 < 0 { "-" } else { "" };
        write!(f, "{sign}{whole}.{digits}")
    }
}

/// Error for decimal strings that are not valid offsets.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid offset {text:?}: {reason}")]
pub struct ParseOffsetError {
    pub text: String,
    pub reason: &'static str,
}

impl From<ParseOffsetError> for AgError {
    fn from(e: ParseOffsetError) -> Self {
        AgError::BadArgument(e.to_string())
    }
}

impl FromStr for Offset {
    type Err = ParseOffsetError;

    fn from_str(text: &str) -> Result<Offset, ParseOffsetError> {
        let err = |reason| ParseOffsetError {
            text: text.to_string(),
            reason,
        };
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(err("no digits"));
        }
        if !whole
            .bytes()
            .chain(frac.bytes())
            .all(|b| b.is_ascii_digit())
        {
            return Err(err("not a decimal number"));
        }
        if frac.len() > FRACTION_DIGITS {
            return Err(err("more than nine fractional digits"));
        }
        let whole: i128 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| err("out of range"))?
        };
        let mut frac_value: i128 = 0;
        for (i, b) in frac.bytes().enumerate() {
            frac_value += (b - b'0') as i128 * 10i128.pow((FRACTION_DIGITS - 1 - i) as u32);
        }
        let mut nanos = whole
            .checked_mul(SCALE as i128)
            .and_then(|w| w.checked_add(frac_value))
            .ok_or_else(|| err("out of range"))?;
        if negative {
            nanos = -nanos;
        }
        i64::try_from(nanos)
            .map(Offset)
            .map_err(|_| err("out of range"))
    }
}
