//! Exact rational numbers for consensus scores and accuracies.
//!
//! Scores are kept as unreduced fractions (`11/15` stays `11/15`, not a
//! float) so that threshold comparisons are exact and report rendering can
//! pick its own rounding rule per table.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative rational with a positive denominator.
///
/// Equality and ordering compare by value (`3/15 == 1/5`); the stored
/// numerator/denominator pair is preserved for display.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    num: u64,
    den: u64,
}

/// Error parsing a ratio from its textual forms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatioError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("invalid ratio literal: {0}")]
    Invalid(String),
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self, RatioError> {
        if den == 0 {
            return Err(RatioError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub const fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub const fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// True when the value lies in the half-open interval (0, 1].
    pub fn in_unit_interval_exclusive_zero(&self) -> bool {
        self.num > 0 && self.num <= self.den
    }

    /// Percentage with one decimal place, truncated toward zero.
    ///
    /// `10/15` renders as `"66.6"`, matching how trait consensus scores
    /// appear in profile tables.
    pub fn percent_floor_1dp(&self) -> String {
        let permille = self.num * 1000 / self.den;
        format!("{}.{}", permille / 10, permille % 10)
    }

    /// Percentage with one decimal place, rounded half up.
    pub fn percent_round_1dp(&self) -> String {
        let permille = (self.num * 2000 + self.den) / (2 * self.den);
        format!("{}.{}", permille / 10, permille % 10)
    }

    /// Percentage with two decimal places, rounded half up.
    ///
    /// `96/105` renders as `"91.43"`.
    pub fn percent_round_2dp(&self) -> String {
        let basis = (self.num * 20000 + self.den) / (2 * self.den);
        format!("{}.{:02}", basis / 100, basis % 100)
    }

    /// Parse `"k/n"`, a decimal such as `"0.2"`, or a bare integer.
    pub fn parse(text: &str) -> Result<Self, RatioError> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: u64 = num
                .trim()
                .parse()
                .map_err(|_| RatioError::Invalid(String::from(text)))?;
            let den: u64 = den
                .trim()
                .parse()
                .map_err(|_| RatioError::Invalid(String::from(text)))?;
            return Self::new(num, den);
        }
        if let Some((whole, frac)) = text.split_once('.') {
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RatioError::Invalid(String::from(text)));
            }
            let whole: u64 = if whole.is_empty() {
                0
            } else {
                whole
                    .parse()
                    .map_err(|_| RatioError::Invalid(String::from(text)))?
            };
            let frac_num: u64 = frac.parse().unwrap();
            let den = 10u64.pow(frac.len() as u32);
            return Self::new(whole * den + frac_num, den);
        }
        let whole: u64 = text
            .parse()
            .map_err(|_| RatioError::Invalid(String::from(text)))?;
        Self::new(whole, 1)
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        (self.num as u128) * (other.den as u128) == (other.num as u128) * (self.den as u128)
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * (other.den as u128)).cmp(&((other.num as u128) * (self.den as u128)))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{self}"))
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ratio::parse(&text).map_err(D::Error::custom)
    }
}
