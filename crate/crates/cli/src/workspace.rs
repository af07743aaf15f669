//! Declarations and the objects they build, for any scalar type.

use std::collections::HashMap;

use nijenhuis_core::derivations::{
    derivation_of_tensor, dirac_algebroid, dirac_derivation, pullback_derivation, tensor_of_derivation, BundleMap,
    LieAlgebroidData, OneDerivation, TrivialBundle,
};
use nijenhuis_core::dirac::{CourantSection, DiracStructure};
use nijenhuis_core::expr::Chart;
use nijenhuis_core::morita::{InfAction, InfBibundle};
use nijenhuis_core::tensor::{
    cotangent_lift, tangent_lift, DiffForm, Multivector, OneOneTensor, SmoothMap, TensorError, VectorField, VolumeDensity,
};
use nijenhuis_core::{Scalar, ScalarExpr};

use crate::scenario::{LoadError, LoadErrorKind, Pos, Ref};

type Rows = Vec<Vec<ScalarExpr>>;

#[derive(Clone, Debug)]
pub(crate) enum TensorSrc {
    Identity,
    Matrix(Rows, Pos),
    Diag(Vec<ScalarExpr>, Pos),
    Scalar(ScalarExpr),
    TangentLift(Ref),
    CotangentLift(Ref),
    OfDerivation(Ref),
}

#[derive(Clone, Debug)]
pub(crate) enum AlgSrc {
    Tangent(Chart),
    Cotangent(Ref),
    Abelian(Ref),
    Dirac(Ref),
    Opposite(Ref),
    General { bundle: Ref, anchor: Rows, structure: Vec<Rows> },
}

#[derive(Clone, Debug)]
pub(crate) enum DerSrc {
    Explicit { bundle: Ref, conn: Vec<(Rows, Pos)>, ell: (Rows, Pos), r: Ref },
    Tensor { tensor: Ref, bundle: Ref },
    Dirac { dirac: Ref, r: Ref },
    Pullback { map: Ref, derivation: Ref, j: Ref },
}

#[derive(Clone, Debug)]
pub(crate) enum DiracSrc {
    Bivector(Ref),
    TwoForm(Ref),
    Opposite(Ref),
    Generators(Vec<(Vec<ScalarExpr>, Vec<ScalarExpr>)>),
}

#[derive(Clone, Debug)]
pub(crate) enum DeclKind {
    Chart(Chart),
    Scalar { chart: Chart, value: ScalarExpr },
    Vector { chart: Chart, comps: Vec<ScalarExpr> },
    Tensor { chart: Chart, src: TensorSrc },
    Form { chart: Chart, degree: usize, terms: Vec<(Vec<usize>, ScalarExpr)> },
    Multivector { chart: Chart, degree: usize, terms: Vec<(Vec<usize>, ScalarExpr)> },
    Density { chart: Chart, value: ScalarExpr },
    Map { source: Chart, target: Chart, formulas: Vec<ScalarExpr> },
    Bundle { base: Chart, frame: Vec<String> },
    BundleMap { source: Ref, target: Ref, matrix: Rows },
    Algebroid(AlgSrc),
    Derivation(DerSrc),
    Dirac { chart: Chart, src: DiracSrc, twist: Option<Ref> },
    Action { algebroid: Ref, moment: Ref, right: bool, table: Rows },
    Bibundle { left: Ref, right: Ref, varpi: Option<Ref>, j: Option<Ref> },
}

#[derive(Clone, Debug)]
pub(crate) struct Decl {
    pub name: String,
    pub pos: Pos,
    pub kind: DeclKind,
}

#[derive(Clone, Debug)]
pub(crate) enum Obj<S> {
    Chart(Chart),
    Scalar(S),
    Vector(VectorField<S>),
    Tensor(OneOneTensor<S>),
    Form(DiffForm<S>),
    Multivector(Multivector<S>),
    Density(VolumeDensity<S>),
    Map(SmoothMap<S>),
    Bundle(TrivialBundle),
    BundleMap(BundleMap<S>),
    Algebroid(LieAlgebroidData<S>),
    Derivation(OneDerivation<S>),
    Dirac(DiracStructure<S>),
    Action(InfAction<S>),
    Bibundle(InfBibundle<S>),
}

impl<S> Obj<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            Obj::Chart(_) => "chart",
            Obj::Scalar(_) => "scalar",
            Obj::Vector(_) => "vector field",
            Obj::Tensor(_) => "tensor",
            Obj::Form(_) => "form",
            Obj::Multivector(_) => "multivector",
            Obj::Density(_) => "density",
            Obj::Map(_) => "map",
            Obj::Bundle(_) => "bundle",
            Obj::BundleMap(_) => "bundle map",
            Obj::Algebroid(_) => "algebroid",
            Obj::Derivation(_) => "derivation",
            Obj::Dirac(_) => "Dirac structure",
            Obj::Action(_) => "action",
            Obj::Bibundle(_) => "bibundle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BuildError {
    pub kind: LoadErrorKind,
    pub pos: Option<Pos>,
    pub message: String,
}

impl BuildError {
    fn new(kind: LoadErrorKind, pos: Option<Pos>, message: impl Into<String>) -> Self {
        BuildError { kind, pos, message: message.into() }
    }

    pub fn tensor(e: TensorError, pos: Pos) -> Self {
        let kind = match e {
            TensorError::Dimension { .. } | TensorError::DegreeOverflow { .. } => LoadErrorKind::Dimension,
            _ => LoadErrorKind::Invalid,
        };
        Self::new(kind, Some(pos), e.to_string())
    }

    pub fn at(mut self, pos: Pos) -> Self {
        self.pos.get_or_insert(pos);
        self
    }

    pub fn into_load(self) -> LoadError {
        LoadError::new(self.kind, self.pos.unwrap_or_default(), self.message)
    }
}

impl From<BuildError> for LoadError {
    fn from(e: BuildError) -> Self {
        e.into_load()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Workspace<S> {
    objects: HashMap<String, Obj<S>>,
    order: Vec<String>,
}

impl<S> Default for Workspace<S> {
    fn default() -> Self {
        Workspace { objects: HashMap::new(), order: Vec::new() }
    }
}

macro_rules! getter {
    ($fn:ident, $variant:ident, $ty:ty, $what:literal) => {
        pub fn $fn(&self, r: &Ref) -> Result<&$ty, BuildError> {
            match self.get(r)? {
                Obj::$variant(x) => Ok(x),
                other => Err(BuildError::new(
                    LoadErrorKind::Invalid,
                    Some(r.pos),
                    format!("'{}' is a {}, expected a {}", r.name, other.kind(), $what),
                )),
            }
        }
    };
}

impl<S> Workspace<S> {
    pub fn contains(&self, name: &str) -> bool {
        self.objects.contains_key(name)
    }

    pub fn get(&self, r: &Ref) -> Result<&Obj<S>, BuildError> {
        self.objects.get(&r.name).ok_or_else(|| {
            BuildError::new(LoadErrorKind::UndefinedReference, Some(r.pos), format!("'{}' is not declared", r.name))
        })
    }

    fn insert(&mut self, name: &str, obj: Obj<S>) {
        self.order.push(name.to_string());
        self.objects.insert(name.to_string(), obj);
    }

    /// Objects in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Obj<S>)> {
        self.order.iter().map(|n| (n.as_str(), &self.objects[n]))
    }

    /// A chart, or the total space of a bundle.
    pub fn chart_of(&self, name: &str) -> Result<Chart, BuildError> {
        match self.objects.get(name) {
            Some(Obj::Chart(c)) => Ok(c.clone()),
            Some(Obj::Bundle(b)) => Ok(b.total_chart().clone()),
            Some(other) => Err(BuildError::new(
                LoadErrorKind::Invalid,
                None,
                format!("'{name}' is a {}, expected a chart or bundle", other.kind()),
            )),
            None => Err(BuildError::new(LoadErrorKind::UndefinedReference, None, format!("chart '{name}' is not declared"))),
        }
    }

    getter!(vector, Vector, VectorField<S>, "vector field");
    getter!(tensor, Tensor, OneOneTensor<S>, "tensor");
    getter!(form, Form, DiffForm<S>, "form");
    getter!(multivector, Multivector, Multivector<S>, "multivector");
    getter!(density, Density, VolumeDensity<S>, "density");
    getter!(map, Map, SmoothMap<S>, "map");
    getter!(bundle, Bundle, TrivialBundle, "bundle");
    getter!(bundle_map, BundleMap, BundleMap<S>, "bundle map");
    getter!(algebroid, Algebroid, LieAlgebroidData<S>, "algebroid");
    getter!(derivation, Derivation, OneDerivation<S>, "derivation");
    getter!(dirac, Dirac, DiracStructure<S>, "Dirac structure");
    getter!(action, Action, InfAction<S>, "action");
    getter!(bibundle, Bibundle, InfBibundle<S>, "bibundle");
}

fn conv<S: Scalar>(fs: &[ScalarExpr], chart: &Chart) -> Vec<S> {
    fs.iter().map(|f| S::from_expr(f, chart)).collect()
}

fn conv_rows<S: Scalar>(m: &Rows, chart: &Chart) -> Vec<Vec<S>> {
    m.iter().map(|r| conv(r, chart)).collect()
}

fn same_chart(got: &Chart, declared: &Chart, pos: Pos) -> Result<(), BuildError> {
    if got == declared {
        Ok(())
    } else {
        Err(BuildError::new(
            LoadErrorKind::Invalid,
            Some(pos),
            format!("the result lives on {}, not on the declared chart {}", got.name(), declared.name()),
        ))
    }
}

pub(crate) fn build<S: Scalar>(ws: &mut Workspace<S>, d: &Decl) -> Result<(), BuildError> {
    let obj = make(ws, d)?;
    ws.insert(&d.name, obj);
    Ok(())
}

fn make<S: Scalar>(ws: &Workspace<S>, d: &Decl) -> Result<Obj<S>, BuildError> {
    let te = |e: TensorError| BuildError::tensor(e, d.pos);
    Ok(match &d.kind {
        DeclKind::Chart(c) => Obj::Chart(c.clone()),
        DeclKind::Scalar { chart, value } => Obj::Scalar(S::from_expr(value, chart)),
        DeclKind::Vector { chart, comps } => Obj::Vector(VectorField::new(chart, conv(comps, chart)).map_err(te)?),
        DeclKind::Tensor { chart, src } => {
            let t = match src {
                TensorSrc::Identity => OneOneTensor::identity(chart),
                TensorSrc::Matrix(m, p) => {
                    OneOneTensor::new(chart, conv_rows(m, chart)).map_err(|e| BuildError::tensor(e, *p))?
                }
                TensorSrc::Diag(v, p) => OneOneTensor::diagonal(chart, conv(v, chart)).map_err(|e| BuildError::tensor(e, *p))?,
                TensorSrc::Scalar(f) => OneOneTensor::scalar(chart, S::from_expr(f, chart)),
                TensorSrc::TangentLift(r) => tangent_lift(ws.tensor(r)?),
                TensorSrc::CotangentLift(r) => cotangent_lift(ws.tensor(r)?).map_err(te)?,
                TensorSrc::OfDerivation(r) => tensor_of_derivation(ws.derivation(r)?).map_err(te)?,
            };
            same_chart(t.chart(), chart, d.pos)?;
            Obj::Tensor(t)
        }
        DeclKind::Form { chart, degree, terms } => Obj::Form(
            DiffForm::from_terms(chart, *degree, terms.iter().map(|(i, f)| (i.clone(), S::from_expr(f, chart))).collect())
                .map_err(te)?,
        ),
        DeclKind::Multivector { chart, degree, terms } => Obj::Multivector(
            Multivector::from_terms(chart, *degree, terms.iter().map(|(i, f)| (i.clone(), S::from_expr(f, chart))).collect())
                .map_err(te)?,
        ),
        DeclKind::Density { chart, value } => Obj::Density(VolumeDensity::new(chart, S::from_expr(value, chart)).map_err(te)?),
        DeclKind::Map { source, target, formulas } => {
            Obj::Map(SmoothMap::new(&d.name, source, target, conv(formulas, source)).map_err(te)?)
        }
        DeclKind::Bundle { base, frame } => Obj::Bundle(TrivialBundle::new(&d.name, base, frame).map_err(te)?),
        DeclKind::BundleMap { source, target, matrix } => {
            let (a, b) = (ws.bundle(source)?.clone(), ws.bundle(target)?.clone());
            let m = conv_rows(matrix, a.base());
            Obj::BundleMap(BundleMap::new(a, b, m).map_err(te)?)
        }
        DeclKind::Algebroid(src) => Obj::Algebroid(match src {
            AlgSrc::Tangent(c) => LieAlgebroidData::tangent(c),
            AlgSrc::Cotangent(r) => LieAlgebroidData::cotangent(ws.multivector(r)?).map_err(te)?,
            AlgSrc::Abelian(r) => LieAlgebroidData::abelian(ws.bundle(r)?.clone()),
            AlgSrc::Dirac(r) => dirac_algebroid(ws.dirac(r)?).map_err(te)?,
            AlgSrc::Opposite(r) => ws.algebroid(r)?.opposite(),
            AlgSrc::General { bundle, anchor, structure } => {
                let b = ws.bundle(bundle)?.clone();
                let base = b.base().clone();
                let anchor = anchor
                    .iter()
                    .map(|a| VectorField::new(&base, conv(a, &base)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(te)?;
                let c = structure.iter().map(|m| conv_rows(m, &base)).collect();
                LieAlgebroidData::new(b, anchor, c).map_err(te)?
            }
        }),
        DeclKind::Derivation(src) => Obj::Derivation(match src {
            DerSrc::Explicit { bundle, conn, ell, r } => {
                let b = ws.bundle(bundle)?.clone();
                let base = b.base().clone();
                let conn = conn.iter().map(|(m, _)| conv_rows(m, &base)).collect();
                let ell_m = conv_rows(&ell.0, &base);
                OneDerivation::new(b, conn, ell_m, ws.tensor(r)?.clone()).map_err(|e| BuildError::tensor(e, ell.1))?
            }
            DerSrc::Tensor { tensor, bundle } => derivation_of_tensor(ws.tensor(tensor)?, ws.bundle(bundle)?).map_err(te)?,
            DerSrc::Dirac { dirac, r } => dirac_derivation(ws.dirac(dirac)?, ws.tensor(r)?).map_err(te)?,
            DerSrc::Pullback { map, derivation, j } => {
                pullback_derivation(ws.map(map)?, ws.derivation(derivation)?, ws.tensor(j)?).map_err(te)?
            }
        }),
        DeclKind::Dirac { chart, src, twist } => {
            let eta = twist.as_ref().map(|t| ws.form(t).cloned()).transpose()?;
            let l = match src {
                DiracSrc::Bivector(r) => DiracStructure::graph_of_bivector(ws.multivector(r)?).map_err(te)?,
                DiracSrc::TwoForm(r) => match &eta {
                    Some(eta) => DiracStructure::graph_of_two_form_twisted(ws.form(r)?, eta).map_err(te)?,
                    None => DiracStructure::graph_of_two_form(ws.form(r)?).map_err(te)?,
                },
                DiracSrc::Opposite(r) => ws.dirac(r)?.opposite(),
                DiracSrc::Generators(g) => {
                    let gens = g
                        .iter()
                        .map(|(v, a)| {
                            let v = VectorField::new(chart, conv(v, chart))?;
                            let a = DiffForm::one_form(chart, conv(a, chart))?;
                            CourantSection::new(v, a)
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(te)?;
                    let eta = eta.clone().unwrap_or_else(|| DiffForm::zero(chart, 3));
                    DiracStructure::new(chart, gens, eta).map_err(te)?
                }
            };
            let l = match (&eta, src) {
                (Some(eta), DiracSrc::Bivector(_) | DiracSrc::Opposite(_)) => l.with_twist(eta.clone()).map_err(te)?,
                _ => l,
            };
            same_chart(l.chart(), chart, d.pos)?;
            Obj::Dirac(l)
        }
        DeclKind::Action { algebroid, moment, right, table } => {
            let alg = ws.algebroid(algebroid)?;
            let mu = ws.map(moment)?.clone();
            let space = mu.source().clone();
            let table = table
                .iter()
                .map(|c| VectorField::new(&space, conv(c, &space)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(te)?;
            let act = if *right { InfAction::right(alg, mu, table) } else { InfAction::new(alg.clone(), mu, table) };
            Obj::Action(act.map_err(te)?)
        }
        DeclKind::Bibundle { left, right, varpi, j } => {
            let mut b = InfBibundle::new(ws.action(left)?.clone(), ws.action(right)?.clone()).map_err(te)?;
            if let Some(v) = varpi {
                b = b.with_varpi(ws.form(v)?.clone()).map_err(te)?;
            }
            if let Some(j) = j {
                b = b.with_j(ws.tensor(j)?.clone()).map_err(te)?;
            }
            Obj::Bibundle(b)
        }
    })
}
