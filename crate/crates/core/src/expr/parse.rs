use num_bigint::BigInt;
use num_traits::Zero;

use super::{Chart, ExprError, RationalPoint};
use crate::{Rational, ScalarExpr};

/// Unreduced syntax tree, kept for evaluation independent of canonicalization.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Direct evaluation of the tree; `Pole` when some divisor vanishes.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        Ok(match self {
            Expr::Num(q) => q.clone(),
            Expr::Var(i) => point.get(*i).cloned().ok_or(ExprError::ChartMismatch {
                expected: *i + 1,
                found: point.len(),
            })?,
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b, _) => {
                let d = b.eval(point)?;
                if d.is_zero() {
                    return Err(ExprError::Pole);
                }
                a.eval(point)? / d
            }
            Expr::Pow(a, e) => num_traits::pow(a.eval(point)?, *e as usize),
        })
    }

    pub fn to_scalar(&self) -> Result<ScalarExpr, ExprError> {
        Ok(match self {
            Expr::Num(q) => ScalarExpr::constant(q.clone()),
            Expr::Var(i) => ScalarExpr::var(*i),
            Expr::Neg(a) => -a.to_scalar()?,
            Expr::Add(a, b) => a.to_scalar()?.checked_add(&b.to_scalar()?)?,
            Expr::Sub(a, b) => a.to_scalar()?.checked_sub(&b.to_scalar()?)?,
            Expr::Mul(a, b) => a.to_scalar()?.checked_mul(&b.to_scalar()?)?,
            Expr::Div(a, b, pos) => {
                let d = b.to_scalar()?;
                if d.is_zero() {
                    return Err(ExprError::ZeroDenominator { pos: *pos });
                }
                a.to_scalar()?.checked_div(&d)?
            }
            Expr::Pow(a, e) => a.to_scalar()?.checked_pow(*e)?,
        })
    }
}

pub fn parse_expr(src: &str, chart: &Chart) -> Result<Expr, ExprError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, chart };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses and canonicalizes an expression over the chart's coordinates.
pub fn parse_scalar(src: &str, chart: &Chart) -> Result<ScalarExpr, ExprError> {
    parse_expr(src, chart)?.to_scalar()
}

/// Exact value at a point of the same chart.
pub fn eval_at(f: &ScalarExpr, point: &RationalPoint) -> Result<Rational, ExprError> {
    if f.arity() > point.values().len() {
        return Err(ExprError::ChartMismatch { expected: f.arity(), found: point.values().len() });
    }
    f.eval(point.values()).ok_or(ExprError::Pole)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = if c == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs), at)
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.syntax("expected a natural exponent"));
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = text.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                msg: "exponent too large".to_string(),
            })?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = text.parse().expect("digits");
                Ok(Expr::Num(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.chart.index_of(name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(ExprError::UnknownIdentifier { name: name.to_string(), pos: start }),
                }
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

/// Renders with the chart's coordinate names; the output re-parses.
pub fn render(f: &ScalarExpr, chart: &Chart) -> String {
    f.render(chart.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn chart() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    #[test]
    fn difference_of_squares_cancels() {
        let c = chart();
        let f = parse_scalar("(x^2 - y^2)/(x - y)", &c).unwrap();
        assert_eq!(render(&f, &c), "x + y");
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let c = chart();
        let err = parse_scalar("x + z", &c).unwrap_err();
        assert_eq!(err, ExprError::UnknownIdentifier { name: "z".into(), pos: 4 });
    }

    #[test]
    fn zero_denominator_rejected() {
        let c = chart();
        let err = parse_scalar("x/(y - y)", &c).unwrap_err();
        assert!(matches!(err, ExprError::ZeroDenominator { pos: 1 }));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let c = chart();
        let f = parse_scalar("-x^2", &c).unwrap();
        let g = parse_scalar("0 - x*x", &c).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn eval_detects_pole() {
        let c = chart();
        let f = parse_scalar("1/x", &c).unwrap();
        let p = RationalPoint::new(&c, vec![Rational::zero(), Rational::one()]).unwrap();
        assert_eq!(eval_at(&f, &p), Err(ExprError::Pole));
    }
}
