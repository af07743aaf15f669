use crate::dirac::pn::{is_poisson_nijenhuis, poisson_hierarchy};
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::field::VectorField;
use crate::tensor::form::{DiffForm, Multivector};
use crate::tensor::{same_chart, TensorError, VolumeDensity};

/// `X = sum_i div_nu(pi-sharp dx^i) d/dx^i`.
pub fn modular_field<S: Scalar>(pi: &Multivector<S>, nu: &VolumeDensity<S>) -> Result<VectorField<S>, TensorError> {
    same_chart(pi.chart(), nu.chart())?;
    let chart = pi.chart();
    let comps = (0..chart.dim())
        .map(|i| nu.divergence(&pi.sharp(&DiffForm::differential(chart, i))))
        .collect::<Result<Vec<S>, _>>()?;
    VectorField::new(chart, comps)
}

/// `X_r = X_{pi_1} - r(X_pi)` with `pi_1` the first bivector of the hierarchy.
pub fn pn_modular_field<S: Scalar>(
    pi: &Multivector<S>,
    r: &OneOneTensor<S>,
    nu: &VolumeDensity<S>,
) -> Result<VectorField<S>, TensorError> {
    let rep = is_poisson_nijenhuis(pi, r)?;
    if let Some(c) = rep.first_failure() {
        return Err(TensorError::Invalid(format!("not Poisson-Nijenhuis: {}", c.name)));
    }
    let pi1 = poisson_hierarchy(pi, r, 1)?;
    Ok(modular_field(&pi1, nu)?.sub(&r.apply(&modular_field(pi, nu)?)))
}
