//! Running problems and assembling structured reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use symcore::{diff, normalize, Expr, Oracle, ProbeConfig};

use crate::classify::{attach, find_linear_symmetry, linear_symmetry, Classification};
use crate::error::{Error, Result};
use crate::ode::{LinearSymmetry, Outcome, TransformKind, Y};
use crate::problem::ProblemFile;
use crate::riccati::{self, RiccatiInfo};
use crate::solve::{check_solution, gradient_proportional, same_symmetry, verify_symmetry};

/// Integration call sites the pipeline may use.
pub const SITES: &[&str] = &[
    "compute_p",
    "fxqx_F",
    "fxqx_exp",
    "linear",
    "solution_s",
    "solution_r",
    "solution_H",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub seed: u64,
    pub probes: usize,
    pub tol: f64,
    /// Keep symbolic zero-test verdicts for later auditing.
    #[serde(skip)]
    pub audit: bool,
}

impl Default for Options {
    fn default() -> Options {
        let c = ProbeConfig::default();
        Options {
            seed: c.seed,
            probes: c.probes,
            tol: c.abs_tol,
            audit: false,
        }
    }
}

impl Options {
    pub fn oracle(&self) -> Oracle {
        let cfg = ProbeConfig {
            probes: self.probes,
            abs_tol: self.tol,
            rel_tol: self.tol,
            seed: self.seed,
            ..ProbeConfig::default()
        };
        if self.audit {
            Oracle::with_audit(cfg)
        } else {
            Oracle::new(cfg)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub kind: TransformKind,
    pub forward: String,
    pub inverse: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryText {
    pub xi: String,
    pub eta: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedText {
    pub determining: bool,
    pub solution: bool,
    pub probabilistic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectCheck {
    pub ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub phi: String,
    pub outcome: Outcome,
    pub case: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failed: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub i: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<String>,
    pub reduction: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reduced: Option<String>,
    pub symmetry: Option<SymmetryText>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub riccati: Option<RiccatiInfo>,
    pub solution: Option<String>,
    pub verified: VerifiedText,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expect: Option<ExpectCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroTests {
    pub symbolic: usize,
    pub probabilistic: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub file: Option<String>,
    pub params: Vec<String>,
    pub funcs: Vec<String>,
    pub branches: Vec<Branch>,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub seed: u64,
    pub probes: usize,
    pub tol: f64,
    pub integrate_call_sites: Vec<String>,
    pub zero_tests: ZeroTests,
    pub ms: u64,
}

impl Report {
    /// All expectations met and no errors.
    pub fn expect_ok(&self) -> bool {
        self.error.is_none()
            && self
                .branches
                .iter()
                .all(|b| b.expect.as_ref().is_none_or(|e| e.ok))
    }
}

/// Full strategy for one solved-form right-hand side.
pub fn classify_branch(o: &Oracle, phi: &Expr) -> Result<Classification> {
    let phi = normalize(phi);
    let pyy = diff(&diff(&phi, Y), Y);
    if o.is_zero(&pyy)? {
        let mut c = Classification::new(Outcome::DegenerateLinear);
        if let Some(s) = linear_symmetry(o, &phi)? {
            attach(o, &phi, &mut c, s)?;
        }
        return Ok(c);
    }
    if o.is_zero(&diff(&pyy, Y))? {
        return riccati::strategy(o, &phi);
    }
    find_linear_symmetry(o, &phi)
}

fn text(e: &Option<Expr>) -> Option<String> {
    e.as_ref().map(|e| e.to_string())
}

fn branch_of(phi: &Expr, c: &Classification) -> Branch {
    Branch {
        phi: phi.to_string(),
        outcome: c.outcome,
        case: c.case,
        failed: c.failed.clone(),
        a: text(&c.a),
        i: text(&c.i),
        p: text(&c.p),
        reduction: c
            .reduction
            .iter()
            .map(|t| Step {
                kind: t.kind,
                forward: t.forward.to_string(),
                inverse: t.inverse.to_string(),
            })
            .collect(),
        reduced: text(&c.reduced),
        symmetry: c.symmetry.as_ref().map(|s| SymmetryText {
            xi: s.xi.to_string(),
            eta: s.eta.to_string(),
        }),
        riccati: c.riccati.clone(),
        solution: text(&c.solution),
        verified: VerifiedText {
            determining: c.verified.determining,
            solution: c.verified.solution,
            probabilistic: c.verified.probabilistic,
        },
        expect: None,
        error: None,
    }
}

fn check_expect(o: &Oracle, pf: &ProblemFile, phi: &Expr, c: &Classification) -> Result<Option<ExpectCheck>> {
    if pf.expect.is_empty() {
        return Ok(None);
    }
    let mut bad = Vec::new();
    let ex = &pf.expect;
    if let Some(class) = ex.get("class") {
        let hit = class.split('|').map(str::trim).any(|k| {
            k == c.outcome.name() || c.case.is_some_and(|cs| cs.name() == k)
        });
        if !hit {
            bad.push(format!("class: expected {class}, got {}", c.outcome.name()));
        }
    }
    if let (Some(xi), Some(eta)) = (ex.get("xi"), ex.get("eta")) {
        let want = LinearSymmetry::new(pf.expr(xi)?, pf.expr(eta)?);
        if !verify_symmetry(o, phi, &want)?.ok {
            bad.push("expected symmetry fails the determining equation".into());
        }
        match &c.symmetry {
            None => bad.push("no symmetry found".into()),
            Some(s) => {
                let strict = ex.get("symmetry").is_some_and(|m| m == "projective");
                if !same_symmetry(o, s, &want)?.ok && (strict || !c.verified.determining) {
                    bad.push("symmetry not projectively equal to expected".into());
                }
            }
        }
    }
    if let Some(sol) = ex.get("solution") {
        let want = pf.expr(sol)?;
        if !check_solution(o, phi, &want)?.ok {
            bad.push("expected solution fails its check".into());
        }
        match &c.solution {
            None => bad.push("no solution".into()),
            Some(l) => {
                if !gradient_proportional(o, l, &want)?.ok {
                    bad.push("solution not gradient-proportional to expected".into());
                }
            }
        }
    }
    if let Some(step) = ex.get("step") {
        let got = c.riccati.as_ref().and_then(|r| r.step);
        if got.map(|s| s.to_string()).as_deref() != Some(step.as_str()) {
            bad.push(format!("step: expected {step}, got {got:?}"));
        }
    }
    for (key, got) in [("a", c.riccati.as_ref().and_then(|r| r.a.clone())), ("b", c.riccati.as_ref().and_then(|r| r.b.clone()))] {
        if let Some(w) = ex.get(key) {
            let ok = match got {
                Some(g) => o.is_zero(&(pf.expr(&g)? - pf.expr(w)?))?,
                None => false,
            };
            if !ok {
                bad.push(format!("{key}: expected {w}"));
            }
        }
    }
    if c.symmetry.is_some() && !c.verified.determining {
        bad.push("attached symmetry unverified".into());
    }
    Ok(Some(ExpectCheck {
        ok: bad.is_empty(),
        mismatches: bad,
    }))
}

fn summary_of(branches: &[Branch]) -> String {
    let mut tags: Vec<&str> = branches.iter().map(|b| b.outcome.name()).collect();
    tags.dedup();
    tags.join("+")
}

/// Classify every branch of a problem.
pub fn run(pf: &ProblemFile, opts: &Options) -> Report {
    run_with(pf, opts, &opts.oracle())
}

pub fn run_with(pf: &ProblemFile, opts: &Options, o: &Oracle) -> Report {
    let t0 = Instant::now();
    let mut report = Report {
        input: pf.ode_text.clone(),
        file: None,
        params: pf.params.clone(),
        funcs: pf.funcs.clone(),
        branches: Vec::new(),
        summary: String::new(),
        error: None,
        seed: opts.seed,
        probes: opts.probes,
        tol: opts.tol,
        integrate_call_sites: Vec::new(),
        zero_tests: ZeroTests::default(),
        ms: 0,
    };
    match pf.odes(o) {
        Err(e) => report.error = Some(e.to_string()),
        Ok(odes) => {
            for ode in odes {
                let b = match classify_branch(o, &ode.phi) {
                    Ok(c) => {
                        let mut b = branch_of(&ode.phi, &c);
                        match check_expect(o, pf, &ode.phi, &c) {
                            Ok(e) => b.expect = e,
                            Err(e) => {
                                b.expect = Some(ExpectCheck {
                                    ok: false,
                                    mismatches: vec![e.to_string()],
                                })
                            }
                        }
                        b
                    }
                    Err(e) => {
                        let mut b = branch_of(&ode.phi, &Classification::new(Outcome::NotInClass));
                        b.error = Some(e.to_string());
                        b.failed = Some(format!("error: {e}"));
                        if !pf.expect.is_empty() {
                            b.expect = Some(ExpectCheck {
                                ok: false,
                                mismatches: vec![e.to_string()],
                            });
                        }
                        b
                    }
                };
                report.branches.push(b);
            }
        }
    }
    report.summary = summary_of(&report.branches);
    let mut sites = o.sites();
    sites.sort();
    sites.dedup();
    report.integrate_call_sites = sites;
    report.zero_tests = ZeroTests {
        symbolic: o.symbolic_count(),
        probabilistic: o.probabilistic_count(),
    };
    report.ms = t0.elapsed().as_millis() as u64;
    report
}

/// FNV-1a, for per-file seeds that do not depend on the platform hasher.
pub fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub tag: String,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub files: usize,
    pub table: Vec<Row>,
    pub expect_failures: Vec<String>,
    pub reports: Vec<Report>,
}

pub fn problem_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Problem(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ode"))
        .collect();
    out.sort();
    Ok(out)
}

/// Row label for a branch, splitting the Riccati outcome by step.
pub fn row_tag(b: &Branch) -> String {
    match (b.outcome, b.riccati.as_ref().and_then(|r| r.step)) {
        (Outcome::Riccati, Some(s)) => format!("Riccati step {s}"),
        (o, _) => o.name().to_string(),
    }
}

pub fn corpus_run(dir: &Path, opts: &Options) -> Result<CorpusReport> {
    let files = problem_files(dir)?;
    let reports: Vec<Report> = files
        .par_iter()
        .map(|path| {
            let name = path.file_name().unwrap().to_string_lossy().to_string();
            let mut o = opts.clone();
            o.seed = opts.seed ^ fnv(&name);
            let mut r = match std::fs::read_to_string(path)
                .map_err(|e| Error::Problem(e.to_string()))
                .and_then(|t| ProblemFile::parse(&t))
            {
                Ok(pf) => run(&pf, &o),
                Err(e) => {
                    let mut r = run(&ProblemFile::default(), &o);
                    r.error = Some(e.to_string());
                    r
                }
            };
            r.file = Some(name);
            r
        })
        .collect();
    let mut table: std::collections::BTreeMap<String, usize> = Default::default();
    for r in &reports {
        for b in &r.branches {
            *table.entry(row_tag(b)).or_default() += 1;
        }
    }
    let expect_failures = reports
        .iter()
        .filter(|r| !r.expect_ok())
        .filter_map(|r| r.file.clone())
        .collect();
    Ok(CorpusReport {
        files: reports.len(),
        table: table.into_iter().map(|(tag, count)| Row { tag, count }).collect(),
        expect_failures,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv(""), 0xcbf29ce484222325);
        assert_eq!(fnv("a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn report_round_trips() {
        let pf = ProblemFile::parse("ode: y' = y^3 + y\nexpect.class: FxQxDirect\n").unwrap();
        let r = run(&pf, &Options::default());
        assert!(r.expect_ok(), "{r:?}");
        let s = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(r.integrate_call_sites.iter().all(|s| SITES.contains(&s.as_str())));
    }

    #[test]
    fn deterministic() {
        let pf = ProblemFile::parse("param a\nfunc f, g\node: x*y' + a*y - f(x)*g(x^a*y) = 0").unwrap();
        let mut a = run(&pf, &Options::default());
        let mut b = run(&pf, &Options::default());
        a.ms = 0;
        b.ms = 0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn empty_directory() {
        let dir = std::env::temp_dir().join(format!("symline-empty-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let c = corpus_run(&dir, &Options::default()).unwrap();
        assert_eq!(c.files, 0);
        assert!(c.table.is_empty() && c.expect_failures.is_empty());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
