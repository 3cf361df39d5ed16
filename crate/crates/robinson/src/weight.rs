//! Exact dissimilarity values.
//!
//! Every algorithm in this crate branches on equalities such as
//! `d(x, y) == delta`, so values are never floating point. A [`Weight`] is a
//! non-negative integer; decimal inputs are scaled by a power of ten shared
//! by the whole matrix (see [`Scale`]).

use std::fmt;

use crate::error::{Error, Result};

/// A non-negative exact dissimilarity value, in units of `10^-scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(pub u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);

    pub fn raw(self) -> u64 {
        self.0
    }
}

impl From<u64> for Weight {
    fn from(v: u64) -> Self {
        Weight(v)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of decimal digits after the point carried by every weight of a
/// matrix. A scale of 0 means the weights are plain integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Scale(pub u32);

/// Largest supported scale; keeps `10^scale` and the scaled values in `u64`.
pub const MAX_SCALE: u32 = 18;

impl Scale {
    /// Render a weight as a decimal string, dropping trailing zeros of the
    /// fractional part.
    pub fn format(self, w: Weight) -> String {
        if self.0 == 0 {
            return w.0.to_string();
        }
        let pow = 10u64.pow(self.0);
        let int = w.0 / pow;
        let frac = w.0 % pow;
        if frac == 0 {
            return int.to_string();
        }
        let mut digits = format!("{:0width$}", frac, width = self.0 as usize);
        while digits.ends_with('0') {
            digits.pop();
        }
        format!("{int}.{digits}")
    }

    /// Parse a decimal string at this scale. Fails if the string has more
    /// fractional digits than the scale, is negative, or overflows.
    pub fn parse(self, s: &str) -> Result<Weight> {
        let dec = Decimal::parse(s)?;
        dec.rescale(self)
    }
}

/// A parsed non-negative decimal literal: `mantissa * 10^-frac_digits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decimal {
    pub mantissa: u128,
    pub frac_digits: u32,
}

impl Decimal {
    pub fn parse(s: &str) -> Result<Decimal> {
        let bad = || Error::InvalidWeight(s.to_string());
        let t = s.trim();
        let t = t.strip_prefix('+').unwrap_or(t);
        if t.is_empty() {
            return Err(bad());
        }
        let (int_part, frac_part) = match t.split_once('.') {
            Some((a, b)) => (a, b),
            None => (t, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > MAX_SCALE as usize {
            return Err(bad());
        }
        let mut mantissa: u128 = 0;
        for b in int_part.bytes().chain(frac_trimmed.bytes()) {
            mantissa = mantissa
                .checked_mul(10)
                .and_then(|m| m.checked_add((b - b'0') as u128))
                .ok_or_else(bad)?;
        }
        Ok(Decimal {
            mantissa,
            frac_digits: frac_trimmed.len() as u32,
        })
    }

    pub fn rescale(self, scale: Scale) -> Result<Weight> {
        let bad = || Error::InvalidWeight(format!("{} at scale {}", self, scale.0));
        if self.frac_digits > scale.0 {
            return Err(bad());
        }
        let factor = 10u128
            .checked_pow(scale.0 - self.frac_digits)
            .ok_or_else(bad)?;
        let v = self.mantissa.checked_mul(factor).ok_or_else(bad)?;
        u64::try_from(v).map(Weight).map_err(|_| bad())
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e-{}", self.mantissa, self.frac_digits)
    }
}

/// Parse a batch of decimal strings, choosing the smallest common scale
/// that represents all of them exactly.
pub fn parse_all(values: &[&str]) -> Result<(Scale, Vec<Weight>)> {
    let decs = values
        .iter()
        .map(|s| Decimal::parse(s))
        .collect::<Result<Vec<_>>>()?;
    let scale = Scale(decs.iter().map(|d| d.frac_digits).max().unwrap_or(0));
    let ws = decs
        .into_iter()
        .map(|d| d.rescale(scale))
        .collect::<Result<Vec<_>>>()?;
    Ok((scale, ws))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        let (scale, ws) = parse_all(&["0", "2", "1.5", "0.125", "3.10"]).unwrap();
        assert_eq!(scale, Scale(3));
        assert_eq!(
            ws,
            vec![
                Weight(0),
                Weight(2000),
                Weight(1500),
                Weight(125),
                Weight(3100)
            ]
        );
        let back: Vec<String> = ws.iter().map(|w| scale.format(*w)).collect();
        assert_eq!(back, vec!["0", "2", "1.5", "0.125", "3.1"]);
    }

    #[test]
    fn rejects_negative_and_garbage() {
        assert!(Decimal::parse("-1").is_err());
        assert!(Decimal::parse("1e3").is_err());
        assert!(Decimal::parse("").is_err());
        assert!(Decimal::parse(".").is_err());
        assert!(Decimal::parse("99999999999999999999999").is_ok());
        assert!(Scale(0).parse("99999999999999999999999").is_err());
    }

    #[test]
    fn parse_at_fixed_scale() {
        assert_eq!(Scale(2).parse("1.5").unwrap(), Weight(150));
        assert!(Scale(0).parse("1.5").is_err());
        assert_eq!(Scale(0).parse("7.000").unwrap(), Weight(7));
    }
}
