//! Exact scalar expressions: polynomials and rational functions over a
//! coefficient field, the scalar grammar, and point evaluation.

pub mod coeff;
pub mod gcd;
pub mod monomial;
pub mod parse;
pub mod poly;
pub mod ratfun;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::Rational;

pub use parse::{eval_at, parse_expr, parse_scalar, render, Expr};
pub use ratfun::{degree_cap, set_degree_cap, DegreeCapExceeded};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("zero denominator at {pos}")]
    ZeroDenominator { pos: usize },
    #[error("{0}")]
    DegreeCap(DegreeCapExceeded),
    #[error("pole at the evaluation point")]
    Pole,
    #[error("chart mismatch: needs {expected} coordinates, point has {found}")]
    ChartMismatch { expected: usize, found: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}

impl From<DegreeCapExceeded> for ExprError {
    fn from(e: DegreeCapExceeded) -> Self {
        ExprError::DegreeCap(e)
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ChartInner {
    name: String,
    coords: Vec<String>,
}

/// A named coordinate system. Cheap to clone; equality is by name and coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart(Arc<ChartInner>);

impl Chart {
    pub fn new<S: AsRef<str>>(name: &str, coords: &[S]) -> Result<Chart, ExprError> {
        if coords.is_empty() {
            return Err(ExprError::InvalidChart(format!("chart '{name}' has no coordinates")));
        }
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        for (i, c) in coords.iter().enumerate() {
            if !is_identifier(c) {
                return Err(ExprError::InvalidChart(format!("'{c}' is not an identifier")));
            }
            if coords[..i].contains(c) {
                return Err(ExprError::InvalidChart(format!("duplicate coordinate '{c}'")));
            }
        }
        Ok(Chart(Arc::new(ChartInner { name: name.to_string(), coords })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn coords(&self) -> &[String] {
        &self.0.coords
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == coord)
    }

    /// Chart on the product, with this chart's coordinates first.
    pub fn product(&self, other: &Chart, name: &str) -> Result<Chart, ExprError> {
        let mut coords = self.coords().to_vec();
        coords.extend(other.coords().iter().cloned());
        Chart::new(name, &coords)
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.coords().join(", "))
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A point of a chart with exact rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPoint {
    chart: Chart,
    values: Vec<Rational>,
}

impl RationalPoint {
    pub fn new(chart: &Chart, values: Vec<Rational>) -> Result<Self, ExprError> {
        if values.len() != chart.dim() {
            return Err(ExprError::ChartMismatch { expected: chart.dim(), found: values.len() });
        }
        Ok(RationalPoint { chart: chart.clone(), values })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// Random point with coordinates in [-10, 10] and denominators at most 100.
pub fn random_point<R: Rng + ?Sized>(chart: &Chart, rng: &mut R) -> RationalPoint {
    let values = (0..chart.dim()).map(|_| random_rational(rng)).collect();
    RationalPoint { chart: chart.clone(), values }
}

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let den: i64 = rng.gen_range(1..=100);
    let num: i64 = rng.gen_range(-10 * den..=10 * den);
    Rational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_rejects_duplicates_and_empty() {
        assert!(Chart::new("M", &["x", "x"]).is_err());
        assert!(Chart::new::<&str>("M", &[]).is_err());
        assert!(Chart::new("M", &["x", "y1", "p_x"]).is_ok());
    }
}
