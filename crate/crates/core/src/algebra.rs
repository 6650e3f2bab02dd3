//! Divisible aggregation operators.
//!
//! Every collection strategy is parameterized over an associative, commutative
//! `combine` with an identity, plus two ways of cutting a partial aggregate into
//! pieces: `split_even` (a piece that, combined with itself `n` times, gives the
//! original back) and `scale` (extract a fraction `k` of the value).
//!
//! Sum-like kinds divide arithmetically. Idempotent kinds (min, max) are
//! trivially divisible: every piece is the value itself.

use std::fmt;

use thiserror::Error;

/// A partial aggregate. Counts are fractional once split across paths.
pub type AggregationValue = f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("{kind} aggregation requires finite operands, got {value}")]
    NonFinite { kind: AggregationKind, value: f64 },
    #[error("even split into zero parts")]
    ZeroParts,
    #[error("extraction fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
}

/// Operations a divisible aggregation must provide.
///
/// The unchecked methods assume valid inputs and never fail; the simulator
/// uses them on its hot path. The checked free functions below validate first.
pub trait Divisible {
    fn identity(&self) -> AggregationValue;
    fn combine_unchecked(&self, a: AggregationValue, b: AggregationValue) -> AggregationValue;
    fn split_even_unchecked(&self, v: AggregationValue, parts: u32) -> AggregationValue;
    fn scale_unchecked(&self, v: AggregationValue, fraction: f64) -> AggregationValue;
    /// Whether `v` is an admissible operand.
    fn admits(&self, v: AggregationValue) -> bool;

    fn fold<I>(&self, values: I) -> AggregationValue
    where
        I: IntoIterator<Item = AggregationValue>,
    {
        values
            .into_iter()
            .fold(self.identity(), |acc, v| self.combine_unchecked(acc, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregationKind {
    Sum,
    Min,
    Max,
}

impl fmt::Display for AggregationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregationKind::Sum => "sum",
            AggregationKind::Min => "min",
            AggregationKind::Max => "max",
        })
    }
}

impl Divisible for AggregationKind {
    fn identity(&self) -> AggregationValue {
        match self {
            AggregationKind::Sum => 0.0,
            AggregationKind::Min => f64::INFINITY,
            AggregationKind::Max => f64::NEG_INFINITY,
        }
    }

    fn combine_unchecked(&self, a: AggregationValue, b: AggregationValue) -> AggregationValue {
        match self {
            AggregationKind::Sum => a + b,
            AggregationKind::Min => a.min(b),
            AggregationKind::Max => a.max(b),
        }
    }

    fn split_even_unchecked(&self, v: AggregationValue, parts: u32) -> AggregationValue {
        match self {
            AggregationKind::Sum => v / f64::from(parts),
            AggregationKind::Min | AggregationKind::Max => v,
        }
    }

    fn scale_unchecked(&self, v: AggregationValue, fraction: f64) -> AggregationValue {
        match self {
            AggregationKind::Sum => v * fraction,
            AggregationKind::Min | AggregationKind::Max => v,
        }
    }

    fn admits(&self, v: AggregationValue) -> bool {
        match self {
            AggregationKind::Sum => v.is_finite(),
            // the identity is the only admissible infinity
            AggregationKind::Min => !v.is_nan() && v != f64::NEG_INFINITY,
            AggregationKind::Max => !v.is_nan() && v != f64::INFINITY,
        }
    }
}

fn check(kind: AggregationKind, v: AggregationValue) -> Result<(), AlgebraError> {
    if kind.admits(v) {
        Ok(())
    } else {
        Err(AlgebraError::NonFinite { kind, value: v })
    }
}

/// `a ⊕ b`.
pub fn combine(
    kind: AggregationKind,
    a: AggregationValue,
    b: AggregationValue,
) -> Result<AggregationValue, AlgebraError> {
    check(kind, a)?;
    check(kind, b)?;
    Ok(kind.combine_unchecked(a, b))
}

/// `v ⊘ parts`: the piece which, combined with itself `parts` times, yields `v`.
pub fn split_even(
    kind: AggregationKind,
    v: AggregationValue,
    parts: u32,
) -> Result<AggregationValue, AlgebraError> {
    if parts == 0 {
        return Err(AlgebraError::ZeroParts);
    }
    check(kind, v)?;
    Ok(kind.split_even_unchecked(v, parts))
}

/// `v ⊗ fraction`: extracts a fraction in `[0, 1]` of `v`.
pub fn scale(
    kind: AggregationKind,
    v: AggregationValue,
    fraction: f64,
) -> Result<AggregationValue, AlgebraError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(AlgebraError::FractionOutOfRange(fraction));
    }
    check(kind, v)?;
    Ok(kind.scale_unchecked(v, fraction))
}
