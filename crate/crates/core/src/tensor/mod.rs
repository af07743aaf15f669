//! Tensor calculus on a single chart.

pub mod compat;
pub mod endo;
pub mod field;
pub mod form;
pub mod lift;
pub mod map;

use thiserror::Error;

use crate::expr::{Chart, ExprError};
use crate::scalar::Scalar;

pub use compat::{compatible_pair, contract_form_with_tensor, CovariantTensor};
pub use endo::{deformed_bracket, nabla_r, nabla_r_star, nijenhuis_torsion, OneOneTensor, OneTwoTensor};
pub use field::{lie_bracket, VectorField};
pub use form::{exterior_derivative, interior, lie_derivative, DiffForm, Multivector};
pub use lift::{cotangent_lift, cotangent_lift_residual, tangent_lift, tangent_lift_self_test};
pub use map::{is_related, project_tensor, Projection, SmoothMap};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("chart mismatch: '{0}' vs '{1}'")]
    ChartMismatch(String, String),
    #[error("{what}: expected {expected} entries, found {found}")]
    Dimension { what: String, expected: usize, found: usize },
    #[error("degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("map '{0}' is not a coordinate projection")]
    NotProjection(String),
    #[error("tensor is not linear: {0}")]
    NotLinear(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("not antisymmetric: {0}")]
    NotAntisymmetric(String),
    #[error("unknown coordinate '{0}'")]
    UnknownCoordinate(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn same_chart(a: &Chart, b: &Chart) -> Result<(), TensorError> {
    if a == b {
        Ok(())
    } else {
        Err(TensorError::ChartMismatch(a.name().to_string(), b.name().to_string()))
    }
}

/// Partial derivative by coordinate name.
pub fn derive_partial<S: Scalar>(f: &S, chart: &Chart, coord: &str) -> Result<S, TensorError> {
    let i = chart.index_of(coord).ok_or_else(|| TensorError::UnknownCoordinate(coord.to_string()))?;
    Ok(f.partial(i))
}

/// A density `g dx^1 ^ ... ^ dx^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeDensity<S> {
    chart: Chart,
    density: S,
}

impl<S: Scalar> VolumeDensity<S> {
    pub fn new(chart: &Chart, density: S) -> Result<Self, TensorError> {
        if density.is_zero() {
            return Err(TensorError::Invalid("density is identically zero".into()));
        }
        Ok(VolumeDensity { chart: chart.clone(), density })
    }

    /// The coordinate density `dx^1 ^ ... ^ dx^n`.
    pub fn standard(chart: &Chart) -> Self {
        VolumeDensity { chart: chart.clone(), density: S::one() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn density(&self) -> &S {
        &self.density
    }

    /// Rescales by a nonvanishing function.
    pub fn times(&self, g: &S) -> Result<Self, TensorError> {
        Self::new(&self.chart, self.density.clone() * g)
    }

    /// `div(v) = (1/g) sum_i d_i(g v^i)`.
    pub fn divergence(&self, v: &VectorField<S>) -> Result<S, TensorError> {
        same_chart(&self.chart, v.chart())?;
        let mut acc = S::zero();
        for (i, vi) in v.comps().iter().enumerate() {
            acc = acc + &(self.density.clone() * vi).partial(i);
        }
        let inv = self.density.inv().ok_or_else(|| TensorError::Singular("density".into()))?;
        Ok(acc * &inv)
    }

    pub fn as_form(&self) -> DiffForm<S> {
        let n = self.chart.dim();
        DiffForm::from_terms(&self.chart, n, vec![((0..n).collect(), self.density.clone())])
            .expect("top form on its own chart")
    }
}
