use crate::expr::Chart;
use crate::scalar::Scalar;
use crate::tensor::{same_chart, TensorError};

/// A vector field `sum v^i d/dx^i` on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<S> {
    chart: Chart,
    comps: Vec<S>,
}

impl<S: Scalar> VectorField<S> {
    pub fn new(chart: &Chart, comps: Vec<S>) -> Result<Self, TensorError> {
        if comps.len() != chart.dim() {
            return Err(TensorError::Dimension {
                what: "vector field".into(),
                expected: chart.dim(),
                found: comps.len(),
            });
        }
        Ok(VectorField { chart: chart.clone(), comps })
    }

    pub(crate) fn raw(chart: &Chart, comps: Vec<S>) -> Self {
        debug_assert_eq!(comps.len(), chart.dim());
        VectorField { chart: chart.clone(), comps }
    }

    pub fn zero(chart: &Chart) -> Self {
        VectorField { chart: chart.clone(), comps: vec![S::zero(); chart.dim()] }
    }

    /// The coordinate field `d/dx^i`.
    pub fn coordinate(chart: &Chart, i: usize) -> Self {
        let mut v = Self::zero(chart);
        v.comps[i] = S::one();
        v
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn comps(&self) -> &[S] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &S {
        &self.comps[i]
    }

    /// Derivative of `f` along the field.
    pub fn apply(&self, f: &S) -> S {
        let mut acc = S::zero();
        for (i, vi) in self.comps.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let d = f.partial(i);
            if d.is_zero() {
                continue;
            }
            acc = acc + &(vi.clone() * &d);
        }
        acc
    }

    pub fn scale(&self, f: &S) -> Self {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|c| c.clone() * f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        VectorField { chart: self.chart.clone(), comps: self.comps.iter().map(|c| -c.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn render(&self) -> String {
        render_components(&self.chart, &self.comps, "d/d")
    }
}

pub(crate) fn render_components<S: Scalar>(chart: &Chart, comps: &[S], prefix: &str) -> String {
    let parts: Vec<String> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("({}){}{}", c.render(chart), prefix, chart.coords()[i]))
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// `[u, v]^i = u(v^i) - v(u^i)`.
pub fn lie_bracket<S: Scalar>(u: &VectorField<S>, v: &VectorField<S>) -> Result<VectorField<S>, TensorError> {
    same_chart(&u.chart, &v.chart)?;
    Ok(bracket(u, v))
}

pub(crate) fn bracket<S: Scalar>(u: &VectorField<S>, v: &VectorField<S>) -> VectorField<S> {
    let comps = (0..u.chart.dim()).map(|i| u.apply(&v.comps[i]) - &v.apply(&u.comps[i])).collect();
    VectorField { chart: u.chart.clone(), comps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    fn vf(c: &Chart, comps: &[&str]) -> VectorField<ScalarExpr> {
        VectorField::new(c, comps.iter().map(|s| parse_scalar(s, c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn rotation_and_dilation_commute() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let rot = vf(&c, &["-y", "x"]);
        let dil = vf(&c, &["x", "y"]);
        assert!(lie_bracket(&rot, &dil).unwrap().is_zero());
    }

    #[test]
    fn bracket_of_x_dy_and_dx() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let u = vf(&c, &["0", "x"]);
        let v = vf(&c, &["1", "0"]);
        assert_eq!(lie_bracket(&u, &v).unwrap(), vf(&c, &["0", "-1"]));
    }
}
