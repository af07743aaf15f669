//! Running a scenario: exact checks, then the sampling oracle.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nijenhuis_core::expr::{random_rational, Chart, DegreeCapExceeded};
use nijenhuis_core::jet::{at_point, set_jet_order, SamplePoint};
use nijenhuis_core::scalar::collect_divisors;
use nijenhuis_core::{CheckReport, Poly, Rational, SampleScalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ops::{execute, CheckSpec};
use crate::report::{CheckResult, OracleResult, Report, VerdictKind};
use crate::scenario::Scenario;
use crate::workspace::{build, Obj, Workspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// Sample points per check for the oracle; 0 disables it.
    pub sample: usize,
    /// Record wall time per check. Off gives byte-identical reports.
    pub timing: bool,
    /// Taylor order of the oracle's jets.
    pub jet_order: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, sample: 16, timing: true, jet_order: 4 }
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(e) = p.downcast_ref::<DegreeCapExceeded>() {
        format!("degree cap exceeded: {e}")
    } else if let Some(s) = p.downcast_ref::<&str>() {
        format!("internal error: {s}")
    } else if let Some(s) = p.downcast_ref::<String>() {
        format!("internal error: {s}")
    } else {
        "internal error".into()
    }
}

fn guarded<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| Err(panic_message(p)))
}

pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Report {
    let checks = s.checks.par_iter().enumerate().map(|(i, c)| run_check(s, i, c, opts)).collect();
    Report { scenario: s.name.clone(), seed: opts.seed, sample: opts.sample, checks }
}

fn run_check(s: &Scenario, index: usize, c: &CheckSpec, opts: &RunOptions) -> CheckResult {
    let start = Instant::now();
    let (res, divisors) = collect_divisors(|| guarded(|| execute(&s.exact, c)));
    let millis = if opts.timing { start.elapsed().as_millis().max(1) as u64 } else { 0 };
    let rep = match res {
        Ok(rep) => rep,
        Err(msg) => return CheckResult::error(index, &c.text, msg, millis),
    };
    let mut out = CheckResult::from_report(index, &c.text, &rep, millis);
    if opts.sample > 0 {
        let o = oracle(s, index, c, &rep, &divisors, opts);
        if let Some(d) = &o.disagreement {
            out.note = Some(format!("oracle disagrees with the exact result: {d}"));
            out.verdict = VerdictKind::Error;
        }
        out.oracle = Some(o);
        if opts.timing {
            out.millis = start.elapsed().as_millis().max(1) as u64;
        }
    }
    out
}

fn known_charts(ws: &Workspace<nijenhuis_core::ScalarExpr>) -> Vec<Chart> {
    let mut out: Vec<Chart> = Vec::new();
    for (_, o) in ws.iter() {
        let c = match o {
            Obj::Chart(c) => c.clone(),
            Obj::Bundle(b) => b.total_chart().clone(),
            _ => continue,
        };
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn lookup(values: &HashMap<String, Rational>, chart: &Chart, i: usize) -> Option<Rational> {
    values.get(&SamplePoint::key(chart, i)).or_else(|| values.get(&chart.coords()[i])).cloned()
}

/// Coordinates of every chart, with map targets placed at the image of their source.
fn sample_point(s: &Scenario, rng: &mut ChaCha8Rng) -> Option<SamplePoint> {
    let mut values: HashMap<String, Rational> = HashMap::new();
    for c in known_charts(&s.exact) {
        for name in c.coords() {
            values.entry(name.clone()).or_insert_with(|| random_rational(rng));
        }
    }
    for (_, o) in s.exact.iter() {
        let Obj::Map(m) = o else { continue };
        let src: Option<Vec<Rational>> = (0..m.source().dim()).map(|i| lookup(&values, m.source(), i)).collect();
        let src = src?;
        for (i, f) in m.formulas().iter().enumerate() {
            let v = f.eval(&src)?;
            let key = SamplePoint::key(m.target(), i);
            if values.get(&m.target().coords()[i]) != Some(&v) {
                values.entry(key).or_insert(v);
            }
        }
    }
    Some(SamplePoint { values, seed: rng.gen() })
}

fn on_divisor(s: &Scenario, p: &SamplePoint, divisors: &[Poly<Rational>]) -> bool {
    let charts = known_charts(&s.exact);
    divisors.iter().any(|d| {
        charts.iter().any(|c| {
            if d.arity() > c.dim() {
                return false;
            }
            let pt: Option<Vec<Rational>> = (0..c.dim()).map(|i| lookup(&p.values, c, i)).collect();
            pt.is_some_and(|pt| num_traits::Zero::is_zero(&d.eval(&pt)))
        })
    })
}

fn jet_run(s: &Scenario, c: &CheckSpec) -> Result<CheckReport, String> {
    let mut ws: Workspace<SampleScalar> = Workspace::default();
    for d in &s.decls {
        build(&mut ws, d).map_err(|e| e.message)?;
    }
    execute(&ws, c)
}

fn describe(p: &SamplePoint) -> String {
    let mut keys: Vec<&String> = p.values.keys().collect();
    keys.sort();
    keys.iter().map(|k| format!("{k} = {}", p.values[*k])).collect::<Vec<_>>().join(", ")
}

fn oracle(
    s: &Scenario,
    index: usize,
    c: &CheckSpec,
    exact: &CheckReport,
    divisors: &[Poly<Rational>],
    opts: &RunOptions,
) -> OracleResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(index as u64);
    set_jet_order(opts.jet_order);
    let mut out = OracleResult { points: opts.sample, agreed: 0, skipped: 0, disagreement: None };
    let confirmed: Vec<&str> = exact.clauses.iter().filter(|c| c.verdict.is_ok()).map(|c| c.name.as_str()).collect();
    for _ in 0..opts.sample {
        let Some(p) = sample_point(s, &mut rng) else {
            out.skipped += 1;
            continue;
        };
        if on_divisor(s, &p, divisors) {
            out.skipped += 1;
            continue;
        }
        let (res, degenerate) = at_point(p.clone(), || catch_unwind(AssertUnwindSafe(|| jet_run(s, c))));
        let rep = match res {
            Err(panic) => {
                out.disagreement = Some(format!("evaluation failed: {}", panic_message(panic)));
                break;
            }
            Ok(_) if degenerate => {
                out.skipped += 1;
                continue;
            }
            Ok(Err(_)) => {
                out.skipped += 1;
                continue;
            }
            Ok(Ok(rep)) => rep,
        };
        let bad = confirmed.iter().find_map(|name| match rep.clause(name) {
            Some(cl) if cl.verdict.is_ok() => None,
            Some(cl) => Some(format!("clause '{name}' is {} at {}", cl.verdict.label(), describe(&p))),
            None => Some(format!("clause '{name}' is missing at {}", describe(&p))),
        });
        if let Some(b) = bad {
            out.disagreement = Some(b);
            break;
        }
        out.agreed += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{emit_report, Format};
    use crate::scenario::parse_scenario;

    const PLANE: &str = "[chart M]\ncoords = x, y\n\n[tensor N @ M]\ndiag = y, x\n\n[tensor xId @ M]\nscalar = x\n\n\
                         [multivector pi @ M]\nd/dx^d/dy = 1\n\n[check]\nnijenhuis_torsion(N) = 0\nnijenhuis_torsion(xId) = 0\n\
                         is_poisson_nijenhuis(pi, xId)\n";

    fn opts(sample: usize) -> RunOptions {
        RunOptions { sample, timing: false, ..RunOptions::default() }
    }

    #[test]
    fn verdicts_in_check_order() {
        let s = parse_scenario("plane", PLANE).unwrap();
        let r = run_scenario(&s, &opts(0));
        let v: Vec<VerdictKind> = r.checks.iter().map(|c| c.verdict).collect();
        assert_eq!(v, vec![VerdictKind::Fail, VerdictKind::Pass, VerdictKind::Pass]);
        assert!(r.checks.iter().enumerate().all(|(i, c)| c.index == i));
        assert!(r.checks.iter().all(|c| c.oracle.is_none()));
    }

    #[test]
    fn oracle_confirms_passes() {
        let s = parse_scenario("plane", PLANE).unwrap();
        let r = run_scenario(&s, &opts(8));
        for c in &r.checks {
            let o = c.oracle.as_ref().unwrap();
            assert_eq!(o.points, 8);
            assert!(o.disagreement.is_none(), "{:?}", o.disagreement);
            assert_eq!(o.agreed + o.skipped, 8);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let s = parse_scenario("plane", PLANE).unwrap();
        let a = emit_report(&run_scenario(&s, &opts(4)), Format::Json);
        let b = emit_report(&run_scenario(&s, &opts(4)), Format::Json);
        assert_eq!(a, b);
    }

    #[test]
    fn map_targets_sit_at_the_image() {
        let text = "[chart P]\ncoords = a, b\n\n[chart M]\ncoords = x\n\n[map f : P -> M]\nx = a + b\n";
        let s = parse_scenario("t", text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_point(&s, &mut rng).unwrap();
        let a = p.values["a"].clone();
        let b = p.values["b"].clone();
        assert_eq!(p.values["M.x"], a + b);
    }

    #[test]
    fn panic_payloads_become_messages() {
        assert_eq!(panic_message(Box::new("boom")), "internal error: boom");
        let r: Result<(), String> = guarded(|| panic!("bad {}", 1));
        assert_eq!(r.unwrap_err(), "internal error: bad 1");
    }
}
