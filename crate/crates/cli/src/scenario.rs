//! Scenario files: a line-oriented list of `[section]` blocks.
//!
//! ```text
//! # comment
//! [chart R2]
//! coords = x, y
//!
//! [tensor N @ R2]
//! diag = y, x
//!
//! [check]
//! nijenhuis_torsion(N) = 0
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use nijenhuis_core::expr::{is_identifier, parse_scalar, Chart, ExprError};
use nijenhuis_core::ScalarExpr;

use crate::ops::{self, CheckSpec};
use crate::workspace::{build, Decl, DeclKind, Workspace};
use crate::workspace::{AlgSrc, DerSrc, DiracSrc, TensorSrc};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A name as written in the file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ref {
    pub name: String,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadErrorKind {
    Io,
    Parse,
    UndefinedReference,
    DuplicateName,
    Dimension,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadError {
    pub kind: LoadErrorKind,
    pub pos: Pos,
    pub message: String,
}

impl LoadError {
    pub fn new(kind: LoadErrorKind, pos: Pos, message: impl Into<String>) -> Self {
        LoadError { kind, pos, message: message.into() }
    }

    fn parse(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(LoadErrorKind::Parse, pos, message)
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            LoadErrorKind::Io => "io error",
            LoadErrorKind::Parse => "parse error",
            LoadErrorKind::UndefinedReference => "undefined reference",
            LoadErrorKind::DuplicateName => "duplicate name",
            LoadErrorKind::Dimension => "dimension error",
            LoadErrorKind::Invalid => "invalid declaration",
        };
        write!(f, "line {}, column {}: {what}: {}", self.pos.line, self.pos.col, self.message)
    }
}

impl std::error::Error for LoadError {}

/// A resolved scenario: declarations in file order and the check list.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub(crate) decls: Vec<Decl>,
    pub checks: Vec<CheckSpec>,
    pub(crate) exact: Workspace<ScalarExpr>,
}

impl Scenario {
    pub fn decl_names(&self) -> Vec<&str> {
        self.decls.iter().map(|d| d.name.as_str()).collect()
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::new(LoadErrorKind::Io, Pos::default(), format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
    parse_scenario(&name, &text)
}

#[derive(Debug)]
struct Line {
    key: String,
    key_pos: Pos,
    value: Option<(String, Pos)>,
}

#[derive(Debug)]
struct Section {
    kind: String,
    pos: Pos,
    name: Option<Ref>,
    at: Option<Ref>,
    arrow: Option<(Ref, Ref)>,
    lines: Vec<Line>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Column (1-based) of byte offset `off` in `line`.
fn col_of(line: &str, off: usize) -> usize {
    line[..off].chars().count() + 1
}

fn word(text: &str, line: usize, col: usize) -> Result<Ref, LoadError> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    let pos = Pos { line, col: col + text[..lead].chars().count() };
    if !is_identifier(t) {
        return Err(LoadError::parse(pos, format!("expected a name, found '{t}'")));
    }
    Ok(Ref { name: t.to_string(), pos })
}

fn parse_header(inner: &str, line: usize, col: usize) -> Result<Section, LoadError> {
    let pos = Pos { line, col };
    let inner_t = inner.trim_start();
    let lead = inner.len() - inner_t.len();
    let (kind, rest) = match inner_t.find(char::is_whitespace) {
        Some(i) => (&inner_t[..i], &inner_t[i..]),
        None => (inner_t, ""),
    };
    let rest_col = col + lead + kind.chars().count();
    let mut s = Section { kind: kind.to_string(), pos, name: None, at: None, arrow: None, lines: Vec::new() };
    if rest.trim().is_empty() {
        return Ok(s);
    }
    if let Some(i) = rest.find('@') {
        s.name = Some(word(&rest[..i], line, rest_col)?);
        s.at = Some(word(&rest[i + 1..], line, rest_col + rest[..=i].chars().count())?);
    } else if let Some(i) = rest.find(':') {
        s.name = Some(word(&rest[..i], line, rest_col)?);
        let tail = &rest[i + 1..];
        let tail_col = rest_col + rest[..=i].chars().count();
        let j = tail.find("->").ok_or_else(|| LoadError::parse(pos, "expected 'SOURCE -> TARGET'"))?;
        let a = word(&tail[..j], line, tail_col)?;
        let b = word(&tail[j + 2..], line, tail_col + tail[..j + 2].chars().count())?;
        s.arrow = Some((a, b));
    } else {
        s.name = Some(word(rest, line, rest_col)?);
    }
    Ok(s)
}

fn split_sections(text: &str) -> Result<Vec<Section>, LoadError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let lead = body.len() - body.trim_start().len();
        let t = body.trim();
        if t.starts_with('[') {
            if !t.ends_with(']') {
                return Err(LoadError::parse(Pos { line: line_no, col: col_of(body, lead) }, "unterminated section header"));
            }
            let inner = &t[1..t.len() - 1];
            out.push(parse_header(inner, line_no, col_of(body, lead) + 1)?);
            continue;
        }
        let Some(sec) = out.last_mut() else {
            return Err(LoadError::parse(Pos { line: line_no, col: col_of(body, lead) }, "content before the first section"));
        };
        let key_pos = Pos { line: line_no, col: col_of(body, lead) };
        if sec.kind == "check" {
            sec.lines.push(Line { key: t.to_string(), key_pos, value: None });
            continue;
        }
        match body.find('=') {
            Some(eq) => {
                let key = body[..eq].trim().to_string();
                let v = &body[eq + 1..];
                let vlead = v.len() - v.trim_start().len();
                let vpos = Pos { line: line_no, col: col_of(body, eq + 1 + vlead) };
                sec.lines.push(Line { key, key_pos, value: Some((v.trim().to_string(), vpos)) });
            }
            None => sec.lines.push(Line { key: t.to_string(), key_pos, value: None }),
        }
    }
    Ok(out)
}

/// Splits at top-level occurrences of `sep`, keeping the column of each piece.
pub(crate) fn split_top(text: &str, pos: Pos, sep: char) -> Vec<(String, Pos)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let push = |a: usize, b: usize, out: &mut Vec<(String, Pos)>| {
        let piece = &text[a..b];
        let lead = piece.len() - piece.trim_start().len();
        out.push((piece.trim().to_string(), Pos { line: pos.line, col: pos.col + text[..a + lead].chars().count() }));
    };
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                push(start, i, &mut out);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    push(start, text.len(), &mut out);
    out
}

struct Loader {
    ws: Workspace<ScalarExpr>,
    decls: Vec<Decl>,
    /// Named scalars, substituted textually into later expressions on the same chart.
    macros: HashMap<String, (Chart, String)>,
}

fn expr_error(e: ExprError, pos: Pos) -> LoadError {
    match e {
        ExprError::Syntax { pos: p, msg } => LoadError::parse(Pos { line: pos.line, col: pos.col + p }, msg),
        ExprError::UnknownIdentifier { name, pos: p } => LoadError::new(
            LoadErrorKind::UndefinedReference,
            Pos { line: pos.line, col: pos.col + p },
            format!("'{name}' is not a coordinate or scalar on this chart"),
        ),
        other => LoadError::new(LoadErrorKind::Invalid, pos, other.to_string()),
    }
}

impl Loader {
    fn expand(&self, text: &str, chart: &Chart) -> (String, bool) {
        let mut out = String::new();
        let mut changed = false;
        let cs: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_ascii_alphabetic() || c == '_' || c.is_ascii_digit() {
                let start = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_' || (c.is_ascii_digit() && cs[i] == '.')) {
                    i += 1;
                }
                let tok: String = cs[start..i].iter().collect();
                match self.macros.get(&tok) {
                    Some((mc, body)) if !c.is_ascii_digit() && chart.index_of(&tok).is_none() && mc == chart => {
                        out.push('(');
                        out.push_str(body);
                        out.push(')');
                        changed = true;
                    }
                    _ => out.push_str(&tok),
                }
            } else {
                out.push(c);
                i += 1;
            }
        }
        (out, changed)
    }

    fn expr(&self, text: &str, pos: Pos, chart: &Chart) -> Result<ScalarExpr, LoadError> {
        if text.is_empty() {
            return Err(LoadError::parse(pos, "missing expression"));
        }
        let (src, changed) = self.expand(text, chart);
        parse_scalar(&src, chart).map_err(|e| {
            let mut e = expr_error(e, pos);
            if changed {
                e.pos = pos;
            }
            e
        })
    }

    fn list(&self, text: &str, pos: Pos, chart: &Chart) -> Result<Vec<ScalarExpr>, LoadError> {
        split_top(text, pos, ',').into_iter().map(|(t, p)| self.expr(&t, p, chart)).collect()
    }

    fn matrix(&self, text: &str, pos: Pos, chart: &Chart) -> Result<Vec<Vec<ScalarExpr>>, LoadError> {
        split_top(text, pos, ';').into_iter().map(|(t, p)| self.list(&t, p, chart)).collect()
    }

    fn chart_at(&self, r: &Ref) -> Result<Chart, LoadError> {
        self.ws.chart_of(&r.name).map_err(|e| e.at(r.pos).into_load())
    }

    fn declare(&mut self, decl: Decl) -> Result<(), LoadError> {
        if self.ws.contains(&decl.name) {
            return Err(LoadError::new(LoadErrorKind::DuplicateName, decl.pos, format!("'{}' is already declared", decl.name)));
        }
        build(&mut self.ws, &decl).map_err(|e| e.into_load())?;
        self.decls.push(decl);
        Ok(())
    }
}

fn value_of(l: &Line) -> Result<(&str, Pos), LoadError> {
    match &l.value {
        Some((v, p)) => Ok((v.as_str(), *p)),
        None => Err(LoadError::parse(l.key_pos, format!("expected '{} = ...'", l.key))),
    }
}

fn refs(text: &str, pos: Pos) -> Result<Vec<Ref>, LoadError> {
    split_top(text, pos, ',').into_iter().map(|(t, p)| word(&t, p.line, p.col)).collect()
}

fn one_ref(text: &str, pos: Pos) -> Result<Ref, LoadError> {
    word(text, pos.line, pos.col)
}

fn require<'a>(s: &'a Section, what: &str) -> Result<&'a Ref, LoadError> {
    s.name.as_ref().ok_or_else(|| LoadError::parse(s.pos, format!("[{}] needs {what}", s.kind)))
}

fn require_at<'a>(s: &'a Section) -> Result<&'a Ref, LoadError> {
    s.at.as_ref().ok_or_else(|| LoadError::parse(s.pos, format!("[{} NAME @ CHART] needs a chart", s.kind)))
}

fn unknown_key(l: &Line, kind: &str) -> LoadError {
    LoadError::parse(l.key_pos, format!("unknown key '{}' in [{kind}]", l.key))
}

fn only_one<T>(slot: &mut Option<T>, v: T, l: &Line) -> Result<(), LoadError> {
    if slot.is_some() {
        return Err(LoadError::parse(l.key_pos, "the structure is already given in this section"));
    }
    *slot = Some(v);
    Ok(())
}

/// Coordinate indices from `dx^dy` (forms) or `d/dx^d/dy` (multivectors).
fn wedge_indices(key: &str, pos: Pos, chart: &Chart, prefix: &str) -> Result<Vec<usize>, LoadError> {
    let mut idx = Vec::new();
    for (part, p) in split_top(key, pos, '^') {
        let coord = part
            .strip_prefix(prefix)
            .ok_or_else(|| LoadError::parse(p, format!("expected '{prefix}COORD', found '{part}'")))?;
        let i = chart.index_of(coord.trim()).ok_or_else(|| {
            LoadError::new(LoadErrorKind::UndefinedReference, p, format!("'{coord}' is not a coordinate of {}", chart.name()))
        })?;
        idx.push(i);
    }
    Ok(idx)
}

impl Loader {
    fn section(&mut self, s: &Section) -> Result<(), LoadError> {
        let kind = match s.kind.as_str() {
            "chart" => {
                let name = require(s, "a name")?;
                let mut coords = None;
                for l in &s.lines {
                    match l.key.as_str() {
                        "coords" => {
                            let (v, p) = value_of(l)?;
                            only_one(&mut coords, refs(v, p)?, l)?;
                        }
                        _ => return Err(unknown_key(l, "chart")),
                    }
                }
                let coords = coords.ok_or_else(|| LoadError::parse(s.pos, "[chart] needs 'coords = ...'"))?;
                let names: Vec<&str> = coords.iter().map(|r| r.name.as_str()).collect();
                let c = Chart::new(&name.name, &names).map_err(|e| LoadError::new(LoadErrorKind::Invalid, s.pos, e.to_string()))?;
                return self.declare(Decl { name: name.name.clone(), pos: name.pos, kind: DeclKind::Chart(c) });
            }
            "scalar" => {
                let name = require(s, "a name")?;
                let chart = self.chart_at(require_at(s)?)?;
                let l = s.lines.iter().find(|l| l.key == "value").ok_or_else(|| LoadError::parse(s.pos, "[scalar] needs 'value = ...'"))?;
                let (v, p) = value_of(l)?;
                let f = self.expr(v, p, &chart)?;
                let (expanded, _) = self.expand(v, &chart);
                self.macros.insert(name.name.clone(), (chart.clone(), expanded));
                DeclKind::Scalar { chart, value: f }
            }
            "vector" => {
                let chart = self.chart_at(require_at(s)?)?;
                let l = s.lines.iter().find(|l| l.key == "comps").ok_or_else(|| LoadError::parse(s.pos, "[vector] needs 'comps = ...'"))?;
                let (v, p) = value_of(l)?;
                DeclKind::Vector { comps: self.list(v, p, &chart)?, chart }
            }
            "tensor" => {
                let chart = self.chart_at(require_at(s)?)?;
                let mut src = None;
                for l in &s.lines {
                    let t = match l.key.as_str() {
                        "identity" => TensorSrc::Identity,
                        "matrix" => {
                            let (v, p) = value_of(l)?;
                            TensorSrc::Matrix(self.matrix(v, p, &chart)?, p)
                        }
                        "diag" => {
                            let (v, p) = value_of(l)?;
                            TensorSrc::Diag(self.list(v, p, &chart)?, p)
                        }
                        "scalar" => {
                            let (v, p) = value_of(l)?;
                            TensorSrc::Scalar(self.expr(v, p, &chart)?)
                        }
                        "tangent_lift" => TensorSrc::TangentLift(one_ref(value_of(l)?.0, value_of(l)?.1)?),
                        "cotangent_lift" => TensorSrc::CotangentLift(one_ref(value_of(l)?.0, value_of(l)?.1)?),
                        "of_derivation" => TensorSrc::OfDerivation(one_ref(value_of(l)?.0, value_of(l)?.1)?),
                        _ => return Err(unknown_key(l, "tensor")),
                    };
                    only_one(&mut src, t, l)?;
                }
                let src = src.ok_or_else(|| LoadError::parse(s.pos, "[tensor] needs one of matrix, diag, scalar, identity, tangent_lift, cotangent_lift, of_derivation"))?;
                DeclKind::Tensor { chart, src }
            }
            "form" | "multivector" => {
                let chart = self.chart_at(require_at(s)?)?;
                let prefix = if s.kind == "form" { "d" } else { "d/d" };
                let mut degree = None;
                let mut terms = Vec::new();
                for l in &s.lines {
                    let (v, p) = value_of(l)?;
                    if l.key == "degree" {
                        let d: usize = v.parse().map_err(|_| LoadError::parse(p, "degree must be a non-negative integer"))?;
                        degree = Some((d, p));
                    } else if l.key == "value" {
                        terms.push((Vec::new(), self.expr(v, p, &chart)?));
                    } else {
                        terms.push((wedge_indices(&l.key, l.key_pos, &chart, prefix)?, self.expr(v, p, &chart)?));
                    }
                }
                let deg = match (degree, terms.first()) {
                    (Some((d, _)), _) => d,
                    (None, Some((idx, _))) => idx.len(),
                    (None, None) => return Err(LoadError::parse(s.pos, format!("[{}] without terms needs 'degree = k'", s.kind))),
                };
                if let Some((idx, _)) = terms.iter().find(|(idx, _)| idx.len() != deg) {
                    return Err(LoadError::new(LoadErrorKind::Dimension, s.pos, format!("term of degree {} in a degree {deg} {}", idx.len(), s.kind)));
                }
                if s.kind == "form" {
                    DeclKind::Form { chart, degree: deg, terms }
                } else {
                    DeclKind::Multivector { chart, degree: deg, terms }
                }
            }
            "density" => {
                let chart = self.chart_at(require_at(s)?)?;
                let l = s.lines.iter().find(|l| l.key == "value").ok_or_else(|| LoadError::parse(s.pos, "[density] needs 'value = ...'"))?;
                let (v, p) = value_of(l)?;
                DeclKind::Density { value: self.expr(v, p, &chart)?, chart }
            }
            "map" => {
                let (a, b) = s.arrow.as_ref().ok_or_else(|| LoadError::parse(s.pos, "[map NAME : SOURCE -> TARGET]"))?;
                let (src, tgt) = (self.chart_at(a)?, self.chart_at(b)?);
                let mut formulas: Vec<Option<ScalarExpr>> = vec![None; tgt.dim()];
                for l in &s.lines {
                    let i = tgt.index_of(&l.key).ok_or_else(|| {
                        LoadError::new(LoadErrorKind::UndefinedReference, l.key_pos, format!("'{}' is not a coordinate of {}", l.key, tgt.name()))
                    })?;
                    let (v, p) = value_of(l)?;
                    formulas[i] = Some(self.expr(v, p, &src)?);
                }
                let formulas = formulas
                    .into_iter()
                    .enumerate()
                    .map(|(i, f)| f.ok_or_else(|| LoadError::new(LoadErrorKind::Dimension, s.pos, format!("no formula for target coordinate '{}'", tgt.coords()[i]))))
                    .collect::<Result<Vec<_>, _>>()?;
                DeclKind::Map { source: src, target: tgt, formulas }
            }
            "bundle" => {
                let base = self.chart_at(require_at(s)?)?;
                let mut frame = None;
                for l in &s.lines {
                    let (v, p) = value_of(l)?;
                    let f = match l.key.as_str() {
                        "frame" => refs(v, p)?.into_iter().map(|r| r.name).collect(),
                        "kind" if v == "tangent" => base.coords().iter().map(|c| format!("{c}_dot")).collect(),
                        "kind" if v == "cotangent" => base.coords().iter().map(|c| format!("p_{c}")).collect(),
                        "kind" => return Err(LoadError::parse(p, "kind is 'tangent' or 'cotangent'")),
                        "rank" if v == "0" => Vec::new(),
                        _ => return Err(unknown_key(l, "bundle")),
                    };
                    only_one(&mut frame, f, l)?;
                }
                let frame = frame.ok_or_else(|| LoadError::parse(s.pos, "[bundle] needs 'frame = ...' or 'kind = ...'"))?;
                DeclKind::Bundle { base, frame }
            }
            "bundle_map" => {
                let (a, b) = s.arrow.clone().ok_or_else(|| LoadError::parse(s.pos, "[bundle_map NAME : E -> F]"))?;
                let base = self.ws.bundle(&a).map_err(|e| e.at(a.pos))?.base().clone();
                let l = s.lines.iter().find(|l| l.key == "matrix").ok_or_else(|| LoadError::parse(s.pos, "[bundle_map] needs 'matrix = ...'"))?;
                let (v, p) = value_of(l)?;
                DeclKind::BundleMap { source: a, target: b, matrix: self.matrix(v, p, &base)? }
            }
            "algebroid" => DeclKind::Algebroid(self.algebroid(s)?),
            "derivation" => DeclKind::Derivation(self.derivation(s)?),
            "dirac" => {
                let chart = self.chart_at(require_at(s)?)?;
                let mut src = None;
                let mut gens = Vec::new();
                let mut twist = None;
                for l in &s.lines {
                    let (v, p) = value_of(l)?;
                    match l.key.as_str() {
                        "bivector" => only_one(&mut src, DiracSrc::Bivector(one_ref(v, p)?), l)?,
                        "two_form" => only_one(&mut src, DiracSrc::TwoForm(one_ref(v, p)?), l)?,
                        "opposite" => only_one(&mut src, DiracSrc::Opposite(one_ref(v, p)?), l)?,
                        "twist" => twist = Some(one_ref(v, p)?),
                        "gen" => {
                            let halves = split_top(v, p, '|');
                            if halves.len() != 2 {
                                return Err(LoadError::parse(p, "generator is 'vector comps | form comps'"));
                            }
                            gens.push((self.list(&halves[0].0, halves[0].1, &chart)?, self.list(&halves[1].0, halves[1].1, &chart)?));
                        }
                        _ => return Err(unknown_key(l, "dirac")),
                    }
                }
                if !gens.is_empty() {
                    only_one(&mut src, DiracSrc::Generators(gens), &s.lines[0])?;
                }
                let src = src.ok_or_else(|| LoadError::parse(s.pos, "[dirac] needs bivector, two_form, opposite or gen lines"))?;
                DeclKind::Dirac { chart, src, twist }
            }
            "action" => {
                let mut alg = None;
                let mut moment = None;
                let mut right = false;
                let mut entries = Vec::new();
                for l in &s.lines {
                    let (v, p) = value_of(l)?;
                    match l.key.as_str() {
                        "algebroid" => alg = Some(one_ref(v, p)?),
                        "moment" => moment = Some(one_ref(v, p)?),
                        "side" => {
                            right = match v {
                                "left" => false,
                                "right" => true,
                                _ => return Err(LoadError::parse(p, "side is 'left' or 'right'")),
                            }
                        }
                        _ => entries.push(l),
                    }
                }
                let alg = alg.ok_or_else(|| LoadError::parse(s.pos, "[action] needs 'algebroid = ...'"))?;
                let moment = moment.ok_or_else(|| LoadError::parse(s.pos, "[action] needs 'moment = ...'"))?;
                let frame = self.ws.algebroid(&alg).map_err(|e| e.at(alg.pos))?.bundle().frame().to_vec();
                let space = self.ws.map(&moment).map_err(|e| e.at(moment.pos))?.source().clone();
                let mut table: Vec<Option<Vec<ScalarExpr>>> = vec![None; frame.len()];
                for l in entries {
                    let a = frame.iter().position(|f| *f == l.key).ok_or_else(|| {
                        LoadError::new(LoadErrorKind::UndefinedReference, l.key_pos, format!("'{}' is not a frame section of {}", l.key, alg.name))
                    })?;
                    let (v, p) = value_of(l)?;
                    table[a] = Some(match self.ws.vector(&Ref { name: v.to_string(), pos: p }) {
                        Ok(vf) if is_identifier(v) && vf.chart() == &space => vf.comps().to_vec(),
                        _ => self.list(v, p, &space)?,
                    });
                }
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(a, t)| t.ok_or_else(|| LoadError::new(LoadErrorKind::Dimension, s.pos, format!("no vector field for frame section '{}'", frame[a]))))
                    .collect::<Result<Vec<_>, _>>()?;
                DeclKind::Action { algebroid: alg, moment, right, table }
            }
            "bibundle" => {
                let (mut left, mut right, mut varpi, mut j) = (None, None, None, None);
                for l in &s.lines {
                    let (v, p) = value_of(l)?;
                    let r = one_ref(v, p)?;
                    match l.key.as_str() {
                        "left" => left = Some(r),
                        "right" => right = Some(r),
                        "varpi" => varpi = Some(r),
                        "J" => j = Some(r),
                        _ => return Err(unknown_key(l, "bibundle")),
                    }
                }
                let left = left.ok_or_else(|| LoadError::parse(s.pos, "[bibundle] needs 'left = ACTION'"))?;
                let right = right.ok_or_else(|| LoadError::parse(s.pos, "[bibundle] needs 'right = ACTION'"))?;
                DeclKind::Bibundle { left, right, varpi, j }
            }
            other => return Err(LoadError::parse(s.pos, format!("unknown section [{other}]"))),
        };
        let name = require(s, "a name")?;
        self.declare(Decl { name: name.name.clone(), pos: name.pos, kind })
    }

    fn algebroid(&self, s: &Section) -> Result<AlgSrc, LoadError> {
        let mut src = None;
        let mut bundle = None;
        let mut anchor = Vec::new();
        let mut bracket = Vec::new();
        for l in &s.lines {
            let (v, p) = value_of(l)?;
            let mut words = l.key.split_whitespace();
            match words.next() {
                Some("tangent") => only_one(&mut src, AlgSrc::Tangent(self.chart_at(&one_ref(v, p)?)?), l)?,
                Some("cotangent") => only_one(&mut src, AlgSrc::Cotangent(one_ref(v, p)?), l)?,
                Some("abelian") => only_one(&mut src, AlgSrc::Abelian(one_ref(v, p)?), l)?,
                Some("dirac") => only_one(&mut src, AlgSrc::Dirac(one_ref(v, p)?), l)?,
                Some("opposite") => only_one(&mut src, AlgSrc::Opposite(one_ref(v, p)?), l)?,
                Some("bundle") => bundle = Some(one_ref(v, p)?),
                Some("anchor") => anchor.push((words.map(str::to_string).collect::<Vec<_>>(), l, v, p)),
                Some("bracket") => bracket.push((words.map(str::to_string).collect::<Vec<_>>(), l, v, p)),
                _ => return Err(unknown_key(l, "algebroid")),
            }
        }
        if let Some(src) = src {
            return Ok(src);
        }
        let bundle = bundle.ok_or_else(|| LoadError::parse(s.pos, "[algebroid] needs tangent, cotangent, abelian, dirac, opposite or 'bundle = E'"))?;
        let b = self.ws.bundle(&bundle).map_err(|e| e.at(bundle.pos))?.clone();
        let (base, frame) = (b.base().clone(), b.frame().to_vec());
        let index = |name: &str, l: &Line| {
            frame.iter().position(|f| f == name).ok_or_else(|| {
                LoadError::new(LoadErrorKind::UndefinedReference, l.key_pos, format!("'{name}' is not a frame section of {}", bundle.name))
            })
        };
        let k = frame.len();
        let mut anchors = vec![vec![ScalarExpr::zero(); base.dim()]; k];
        for (w, l, v, p) in anchor {
            if w.len() != 1 {
                return Err(LoadError::parse(l.key_pos, "expected 'anchor SECTION = comps'"));
            }
            anchors[index(&w[0], l)?] = self.list(v, p, &base)?;
        }
        let zero = ScalarExpr::zero();
        let mut structure = vec![vec![vec![zero; k]; k]; k];
        for (w, l, v, p) in bracket {
            if w.len() != 2 {
                return Err(LoadError::parse(l.key_pos, "expected 'bracket A B = comps'"));
            }
            let (a, b2) = (index(&w[0], l)?, index(&w[1], l)?);
            let c = self.list(v, p, &base)?;
            structure[a][b2] = c.clone();
            structure[b2][a] = c.into_iter().map(|x| -x).collect();
        }
        Ok(AlgSrc::General { bundle, anchor: anchors, structure })
    }

    fn derivation(&self, s: &Section) -> Result<DerSrc, LoadError> {
        let mut keys: HashMap<&str, (&str, Pos)> = HashMap::new();
        let mut conn = Vec::new();
        for l in &s.lines {
            let (v, p) = value_of(l)?;
            if let Some(c) = l.key.strip_prefix("conn ") {
                conn.push((c.trim().to_string(), l, v, p));
                continue;
            }
            if !["bundle", "r", "ell", "tensor", "dirac", "pullback"].contains(&l.key.as_str()) {
                return Err(unknown_key(l, "derivation"));
            }
            keys.insert(l.key.as_str(), (v, p));
        }
        let get = |k: &str| keys.get(k).map(|&(v, p)| one_ref(v, p)).transpose();
        if let Some(&(v, p)) = keys.get("pullback") {
            let r = refs(v, p)?;
            if r.len() != 3 {
                return Err(LoadError::parse(p, "pullback = MAP, DERIVATION, J"));
            }
            return Ok(DerSrc::Pullback { map: r[0].clone(), derivation: r[1].clone(), j: r[2].clone() });
        }
        if let Some(l) = get("dirac")? {
            let r = get("r")?.ok_or_else(|| LoadError::parse(s.pos, "[derivation] with dirac needs 'r = TENSOR'"))?;
            return Ok(DerSrc::Dirac { dirac: l, r });
        }
        let bundle = get("bundle")?.ok_or_else(|| LoadError::parse(s.pos, "[derivation] needs 'bundle = E'"))?;
        if let Some(t) = get("tensor")? {
            return Ok(DerSrc::Tensor { tensor: t, bundle });
        }
        let b = self.ws.bundle(&bundle).map_err(|e| e.at(bundle.pos))?.clone();
        let base = b.base().clone();
        let r = get("r")?.ok_or_else(|| LoadError::parse(s.pos, "[derivation] needs 'r = TENSOR'"))?;
        let k = b.rank();
        let ell = match keys.get("ell") {
            Some(&(v, p)) => (self.matrix(v, p, &base)?, p),
            None => return Err(LoadError::parse(s.pos, "[derivation] needs 'ell = matrix'")),
        };
        let zero = || vec![vec![ScalarExpr::zero(); k]; k];
        let mut conns = vec![(zero(), s.pos); base.dim()];
        for (c, l, v, p) in conn {
            let i = base.index_of(&c).ok_or_else(|| {
                LoadError::new(LoadErrorKind::UndefinedReference, l.key_pos, format!("'{c}' is not a coordinate of {}", base.name()))
            })?;
            conns[i] = (self.matrix(v, p, &base)?, p);
        }
        Ok(DerSrc::Explicit { bundle, conn: conns, ell, r })
    }

    fn checks(&self, s: &Section) -> Result<Vec<CheckSpec>, LoadError> {
        s.lines.iter().map(|l| ops::parse_check(&l.key, l.key_pos, &self.ws)).collect()
    }
}

pub fn parse_scenario(name: &str, text: &str) -> Result<Scenario, LoadError> {
    let sections = split_sections(text)?;
    let mut loader = Loader { ws: Workspace::default(), decls: Vec::new(), macros: HashMap::new() };
    let mut checks = Vec::new();
    for s in &sections {
        if s.kind == "check" {
            checks.extend(loader.checks(s)?);
        } else {
            loader.section(s)?;
        }
    }
    Ok(Scenario { name: name.to_string(), decls: loader.decls, checks, exact: loader.ws })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[chart M]\ncoords = x, y\n\n[tensor Id @ M]\nidentity\n\n[check]\nnijenhuis_torsion(Id) = 0\n";

    fn err(text: &str) -> LoadError {
        parse_scenario("t", text).unwrap_err()
    }

    #[test]
    fn minimal_file_has_one_check() {
        let s = parse_scenario("minimal", MINIMAL).unwrap();
        assert_eq!(s.checks.len(), 1);
        assert_eq!(s.checks[0].op, "nijenhuis_torsion");
        assert_eq!(s.decl_names(), vec!["M", "Id"]);
    }

    #[test]
    fn undeclared_tensor_is_located() {
        let e = err("[chart M]\ncoords = x, y\n\n[check]\nnijenhuis_torsion(N7) = 0\n");
        assert_eq!(e.kind, LoadErrorKind::UndefinedReference);
        assert_eq!(e.pos, Pos { line: 5, col: 19 });
        assert!(e.to_string().contains("N7"), "{e}");
        assert!(e.to_string().starts_with("line 5, column 19"), "{e}");
    }

    #[test]
    fn two_by_three_matrix_is_a_dimension_error() {
        let e = err("[chart M]\ncoords = x, y\n\n[tensor N @ M]\nmatrix = 1, 2, 3; 4, 5, 6\n");
        assert_eq!(e.kind, LoadErrorKind::Dimension);
        assert_eq!(e.pos.line, 5);
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let e = err("[chart M]\ncoords = x, y\n\n[tensor M @ M]\nidentity\n");
        assert_eq!(e.kind, LoadErrorKind::DuplicateName);
        assert_eq!(e.pos.line, 4);
    }

    #[test]
    fn references_must_come_first() {
        let e = err("[tensor Id @ M]\nidentity\n\n[chart M]\ncoords = x, y\n");
        assert_eq!(e.kind, LoadErrorKind::UndefinedReference);
    }

    #[test]
    fn bad_expression_is_a_parse_error() {
        let e = err("[chart M]\ncoords = x, y\n\n[scalar f @ M]\nvalue = x + * y\n");
        assert_eq!(e.kind, LoadErrorKind::Parse);
        assert_eq!(e.pos.line, 5);
    }

    #[test]
    fn scalars_expand_in_later_expressions() {
        let text = "[chart M]\ncoords = x, y\n\n[scalar f @ M]\nvalue = x + y\n\n[tensor N @ M]\nscalar = f^2\n\n[tensor P @ M]\nscalar = x^2 + 2*x*y + y^2\n\n[check]\nnijenhuis_torsion(N) = 0\n";
        let s = parse_scenario("t", text).unwrap();
        let n = s.exact.tensor(&Ref { name: "N".into(), pos: Pos::default() }).unwrap();
        let p = s.exact.tensor(&Ref { name: "P".into(), pos: Pos::default() }).unwrap();
        assert_eq!(n, p);
    }

    #[test]
    fn checks_are_validated_at_load() {
        let base = "[chart M]\ncoords = x, y\n\n[tensor Id @ M]\nidentity\n\n[check]\n";
        assert_eq!(err(&format!("{base}no_such_op(Id)\n")).kind, LoadErrorKind::Parse);
        assert_eq!(err(&format!("{base}nijenhuis_torsion(Id, Id) = 0\n")).kind, LoadErrorKind::Dimension);
        assert_eq!(err(&format!("{base}nijenhuis_torsion(Id)\n")).kind, LoadErrorKind::Parse);
        assert_eq!(err(&format!("{base}is_poisson(Id)\n")).kind, LoadErrorKind::Invalid);
        assert_eq!(err(&format!("{base}nijenhuis_torsion(Id\n")).kind, LoadErrorKind::Parse);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header\n[chart M]  # trailing\ncoords = x, y # more\n\n\n[check]\n# nothing\n";
        let s = parse_scenario("t", text).unwrap();
        assert!(s.checks.is_empty());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let e = load_scenario(Path::new("/nonexistent/scenario.scn")).unwrap_err();
        assert_eq!(e.kind, LoadErrorKind::Io);
    }

    #[test]
    fn split_top_respects_parentheses() {
        let parts: Vec<String> = split_top("f(a, b), c", Pos::default(), ',').into_iter().map(|(s, _)| s).collect();
        assert_eq!(parts, vec!["f(a, b)", "c"]);
    }
}
