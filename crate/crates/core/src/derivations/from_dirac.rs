use super::{LieAlgebroidData, OneDerivation, TrivialBundle};
use crate::dirac::{courant_bracket, is_compatible_tensor, CourantSection, DiracStructure};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::{nabla_r, nabla_r_star, OneOneTensor};
use crate::tensor::field::VectorField;
use crate::tensor::{same_chart, TensorError};

/// `L` framed by its generators `s1, ..., sn`.
pub fn dirac_bundle<S: Scalar>(l: &DiracStructure<S>) -> Result<TrivialBundle, TensorError> {
    let frame: Vec<String> = (1..=l.chart().dim()).map(|a| format!("s{a}")).collect();
    TrivialBundle::new(&format!("L{}", l.chart().name()), l.chart(), &frame)
}

fn expand<S: Scalar>(l: &DiracStructure<S>, s: &CourantSection<S>, what: &str) -> Result<Vec<S>, TensorError> {
    l.expand(s).ok_or_else(|| {
        let locus = l.rank_locus();
        let locus = if locus.is_empty() { String::new() } else { format!(" (rank drops on {})", locus.join(", ")) };
        TensorError::Singular(format!("{what} cannot be expanded in the generator frame{locus}"))
    })
}

/// Anchor: tangent parts of the generators; structure functions: Courant brackets re-expanded.
pub fn dirac_algebroid<S: Scalar>(l: &DiracStructure<S>) -> Result<LieAlgebroidData<S>, TensorError> {
    let bundle = dirac_bundle(l)?;
    let g = l.generators();
    let anchor = g.iter().map(|s| s.v.clone()).collect();
    let mut structure = Vec::with_capacity(g.len());
    for (a, sa) in g.iter().enumerate() {
        let mut row = Vec::with_capacity(g.len());
        for (b, sb) in g.iter().enumerate() {
            let br = courant_bracket(sa, sb, l.twist())?;
            row.push(expand(l, &br, &format!("[s{}, s{}]", a + 1, b + 1))?);
        }
        structure.push(row);
    }
    LieAlgebroidData::new(bundle, anchor, structure)
}

/// `(D^r|_L, (r, r^*)|_L, r)` on the algebroid of `L`.
pub fn dirac_derivation<S: Scalar>(l: &DiracStructure<S>, r: &OneOneTensor<S>) -> Result<OneDerivation<S>, TensorError> {
    same_chart(l.chart(), r.chart())?;
    let rep = is_compatible_tensor(l, r)?;
    if let Some(c) = rep.first_failure() {
        return Err(TensorError::Invalid(format!("r is not compatible with L: {} fails", c.name)));
    }
    let chart = l.chart();
    let bundle = dirac_bundle(l)?;
    let g = l.generators();
    let columns = |f: &dyn Fn(&CourantSection<S>) -> Result<CourantSection<S>, TensorError>| -> Result<Matrix<S>, TensorError> {
        let cols = g
            .iter()
            .enumerate()
            .map(|(a, s)| expand(l, &f(s)?, &format!("image of s{}", a + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(linalg::transpose(&cols))
    };
    let ell = columns(&|s| Ok(CourantSection { v: r.apply(&s.v), alpha: r.transpose_apply(&s.alpha) }))?;
    let mut conn = Vec::with_capacity(chart.dim());
    for i in 0..chart.dim() {
        let e = VectorField::coordinate(chart, i);
        conn.push(columns(&|s| Ok(CourantSection { v: nabla_r(r, &e, &s.v)?, alpha: nabla_r_star(r, &e, &s.alpha)? }))?);
    }
    OneDerivation::new(bundle, conn, ell, r.clone())
}
