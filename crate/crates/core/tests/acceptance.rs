use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use f128::f128;
use symcore::{diff, normalize, parse, Expr, Oracle, ProbeConfig, Verdict};
use symline::classify::{compute_a, compute_i};
use symline::corpus::{gen_gts, gen_nonmember, gen_riccati, Family, Template};
use symline::problem::ProblemFile;
use symline::report::{classify_branch, fnv, problem_files, run_with, Options};
use symline::riccati::{ans_p, extract_coeffs, integrability_residuals, invariants, Coeffs};
use symline::solve::{check_solution, gradient_proportional, same_symmetry, verify_symmetry};
use symline::{LinearSymmetry, Outcome};

fn oracle() -> Oracle {
    Oracle::new(ProbeConfig::default())
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn ex(text: &str, params: &[&str], funcs: &[&str]) -> Expr {
    parse(text, params, funcs).unwrap_or_else(|e| panic!("{text}: {e}"))
}

/// Zero, decided without probing.
fn exact_zero(o: &Oracle, e: &Expr) -> bool {
    matches!(o.zero_test(e), Ok(z) if z.zero && z.how == Verdict::Symbolic)
}

fn zero(o: &Oracle, e: &Expr) -> bool {
    o.is_zero(e).unwrap_or(false)
}

struct Checks {
    fails: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { fails: Vec::new() }
    }
    fn need(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.fails.push(what.into());
        }
    }
}

fn kamke_128() -> Checks {
    let mut r = Checks::new();
    let o = oracle();
    let (pa, fs) = (&["a"][..], &["f", "g"][..]);
    let phi = ex("(f(x)*g(x^a*y) - a*y)/x", pa, fs);
    let a = compute_a(&o, &phi).unwrap();
    r.need(exact_zero(&o, &(&a - ex("g''(x^a*y)/(x^a*g'''(x^a*y))", pa, fs))), "A");
    r.need(exact_zero(&o, &(compute_i(&a) - ex("a*y/x", pa, fs))), "I");
    let c = classify_branch(&o, &phi).unwrap();
    r.need(c.outcome == Outcome::CaseGeneral, format!("outcome {:?}", c.outcome));
    r.need(c.p.as_ref().is_some_and(|p| exact_zero(&o, &(p - ex("x^a", pa, fs)))), "p");
    r.need(
        c.reduced.as_ref().is_some_and(|u| exact_zero(&o, &(u - ex("g(y)*f(x)*x^a/x", pa, fs)))),
        "reduced ODE",
    );
    r.need(c.verified.determining && !c.verified.probabilistic, "symmetry not verified symbolically");
    match &c.solution {
        Some(lhs) => {
            let chk = check_solution(&o, &phi, lhs).unwrap();
            r.need(chk.ok && !chk.probabilistic, "solution check");
            let want = ex("Int(x^(a-1)*f(x), x) - IntTo(1/g(z), z, x^a*y)", pa, fs);
            let g = gradient_proportional(&o, lhs, &want).unwrap();
            r.need(g.ok && !g.probabilistic, "solution gradient");
        }
        None => r.need(false, "no solution"),
    }
    r
}

fn example_2() -> Checks {
    let mut r = Checks::new();
    let o = oracle();
    let pa = &["n"][..];
    let phi = ex(
        "(x^3*y^4 + 4*x^4*y^3 + 6*x^5*y^2 + 4*x^6*y + x^7)*(x^n + 1) - y/x - 2",
        pa,
        &[],
    );
    let a = compute_a(&o, &phi).unwrap();
    r.need(zero(&o, &(a - ex("(y + x)/2", pa, &[]))), "A");
    let known = LinearSymmetry::new(ex("1/(8*(x^n + 1))", pa, &[]), ex("-(y + 2*x)/(8*x*(x^n + 1))", pa, &[]));
    let v = verify_symmetry(&o, &phi, &known).unwrap();
    r.need(v.ok && !v.probabilistic, "reference symmetry");
    let c = classify_branch(&o, &phi).unwrap();
    r.need(c.outcome == Outcome::CaseAyy0, format!("outcome {:?}", c.outcome));
    match &c.symmetry {
        Some(s) => r.need(verify_symmetry(&o, &phi, s).unwrap().ok, "our symmetry"),
        None => r.need(false, "no symmetry"),
    }
    match &c.solution {
        Some(lhs) => r.need(check_solution(&o, &phi, lhs).unwrap().ok, "our solution"),
        None => r.need(false, "no solution"),
    }
    let sol = ex("x + 1/(3*x^3*(y + x)^3) + x^(1+n)/(1+n)", pa, &[]);
    r.need(check_solution(&o, &phi, &sol).unwrap().ok, "reference solution");
    r
}

fn example_3() -> Checks {
    let mut r = Checks::new();
    let o = oracle();
    let pa = &["a", "b", "c"][..];
    let phi = ex("b*exp(a*x*y)*x^a + (x^2 - 1)*y/x - 1/x^2 + ln(x) + c", pa, &[]);
    let a = compute_a(&o, &phi).unwrap();
    r.need(zero(&o, &(a - ex("1/(a*x)", pa, &[]))), "A");
    let c = classify_branch(&o, &phi).unwrap();
    r.need(c.outcome == Outcome::CaseAy0, format!("outcome {:?}", c.outcome));
    let known = LinearSymmetry::new(ex("1/x", pa, &[]), ex("-(x*y + 1)/x^3", pa, &[]));
    r.need(verify_symmetry(&o, &phi, &known).unwrap().ok, "reference symmetry");
    match &c.symmetry {
        Some(s) => {
            let same = same_symmetry(&o, s, &known).unwrap().ok;
            r.need(same || (c.verified.determining && c.verified.solution), "symmetry");
        }
        None => r.need(false, "no symmetry"),
    }
    r
}

fn kamke_394() -> Checks {
    let mut r = Checks::new();
    let o = oracle();
    let pf = ProblemFile::parse("ode: y'^2 + 2*x*y*y' + (x^2 - 4)*y^2 + 4*exp(-x^2) = 0\n").unwrap();
    let odes = pf.odes(&o).unwrap();
    r.need(odes.len() == 2, format!("{} branches", odes.len()));
    let want = LinearSymmetry::new(ex("1/2", &[], &[]), ex("-x*y/2", &[], &[]));
    for (k, ode) in odes.iter().enumerate() {
        let c = classify_branch(&o, &ode.phi).unwrap();
        match &c.symmetry {
            Some(s) => {
                r.need(same_symmetry(&o, s, &want).unwrap().ok, format!("branch {k} symmetry"));
                r.need(verify_symmetry(&o, &ode.phi, s).unwrap().ok, format!("branch {k} residual"));
            }
            None => r.need(false, format!("branch {k} has no symmetry")),
        }
        r.need(verify_symmetry(&o, &ode.phi, &want).unwrap().ok, format!("branch {k} reference"));
    }
    r
}

fn round_trip() -> (Checks, String) {
    let mut r = Checks::new();
    let o = oracle();
    let members = 120;
    for i in 0..members {
        let t = Template::ALL[i % Template::ALL.len()];
        let inst = gen_gts(t, 1000 + i as u64);
        let c = match classify_branch(&o, &inst.phi) {
            Ok(c) => c,
            Err(e) => {
                r.need(false, format!("{}: {e}", inst.name));
                continue;
            }
        };
        let tag = t.case();
        r.need(c.outcome == tag || c.case == Some(tag), format!("{}: {:?}", inst.name, c.outcome));
        let sym_ok = c.symmetry.as_ref().is_some_and(|s| verify_symmetry(&o, &inst.phi, s).unwrap().ok);
        r.need(sym_ok && c.verified.determining, format!("{}: symmetry", inst.name));
        r.need(c.verified.solution, format!("{}: solution", inst.name));
    }
    let controls = 24;
    let mut false_syms = 0;
    for i in 0..controls {
        let inst = gen_nonmember(5000 + i as u64);
        let c = match classify_branch(&o, &inst.phi) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if let Some(s) = &c.symmetry {
            if !verify_symmetry(&o, &inst.phi, s).unwrap().ok {
                false_syms += 1;
            }
        }
        r.need(
            matches!(c.outcome, Outcome::NotInClass | Outcome::DegenerateRiccatiPath),
            format!("{}: {:?}", inst.name, c.outcome),
        );
    }
    r.need(false_syms == 0, format!("{false_syms} false symmetries"));
    (r, format!("{members} members, {controls} controls"))
}

fn small<R: Rng>(rng: &mut R) -> i64 {
    let v = rng.gen_range(1..=4);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// `(c0 + c1 x + c2 x^2)/(x + d)` with small integer coefficients.
fn rational<R: Rng>(rng: &mut R) -> Expr {
    let x = Expr::sym("x");
    let num = Expr::int(small(rng)) + Expr::int(small(rng)) * &x + Expr::int(small(rng)) * Expr::powi(x.clone(), 2);
    num / (x + Expr::int(small(rng)))
}

fn invariant_law() -> Checks {
    let mut r = Checks::new();
    let o = oracle();
    let x = Expr::sym("x");
    let dx = |e: &Expr| diff(e, "x");
    for seed in 0..25u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a7 + seed);
        let c = Coeffs {
            f2: rational(&mut rng),
            f1: rational(&mut rng),
            f0: rational(&mut rng),
        };
        let pt = rational(&mut rng);
        // t = ft(x) with ft' = w
        let w = Expr::int(small(&mut rng).abs()) + Expr::int(small(&mut rng).abs()) * Expr::powi(x.clone(), 2);
        let before = invariants(&c);
        // u = pt y, t = ft(x)
        let g2 = normalize(&(&c.f2 / (&pt * &w)));
        let g1 = normalize(&((&c.f1 + dx(&pt) / &pt) / &w));
        let g0 = normalize(&(&pt * &c.f0 / &w));
        let dt = |e: &Expr| dx(e) / &w;
        let s2 = &g0 * &g2;
        let s3 = dt(&g0) * &g2 - dt(&g2) * &g0 - Expr::int(2) * &g0 * &g1 * &g2;
        let chini = Expr::powi(s3.clone(), 2) / Expr::powi(s2.clone(), 3);
        r.need(zero(&o, &(&s2 * Expr::powi(w.clone(), 2) - &before.s2)), format!("seed {seed}: s2 weight"));
        r.need(zero(&o, &(&s3 * Expr::powi(w.clone(), 3) - &before.s3)), format!("seed {seed}: s3 weight"));
        r.need(zero(&o, &(chini - &before.chini)), format!("seed {seed}: invariant"));
        // y scaling alone leaves both unchanged
        let h = Coeffs {
            f2: normalize(&(&c.f2 / &pt)),
            f1: normalize(&(&c.f1 + dx(&pt) / &pt)),
            f0: normalize(&(&pt * &c.f0)),
        };
        let scaled = invariants(&h);
        r.need(zero(&o, &(&scaled.chini - &before.chini)), format!("seed {seed}: scaled invariant"));
    }
    r
}

fn families() -> (Checks, String) {
    let mut r = Checks::new();
    let o = oracle();
    let per = 25;
    for family in [Family::ConstQ, Family::FP, Family::QP, Family::FQ] {
        for i in 0..per {
            let ri = gen_riccati(family, 7000 + i as u64);
            let name = &ri.instance.name;
            let c = match classify_branch(&o, &ri.instance.phi) {
                Ok(c) => c,
                Err(e) => {
                    r.need(false, format!("{name}: {e}"));
                    continue;
                }
            };
            let info = c.riccati.clone().unwrap_or_default();
            r.need(
                c.outcome == Outcome::Riccati && info.step == Some(family.step()),
                format!("{name}: {:?} step {:?}", c.outcome, info.step),
            );
            r.need(c.verified.determining, format!("{name}: symmetry"));
            if family != Family::FQ {
                continue;
            }
            let back = |s: &Option<String>| s.as_deref().map(|t| ex(t, &[], &[]));
            let (a, b) = (back(&info.a), back(&info.b));
            r.need(a.is_some_and(|a| zero(&o, &(a - &ri.a))), format!("{name}: a"));
            r.need(b.is_some_and(|b| zero(&o, &(b - &ri.b))), format!("{name}: b"));
            let cs = extract_coeffs(&o, &ri.instance.phi).unwrap();
            let p = ans_p(&cs, &invariants(&cs)).unwrap();
            let (r1, r2) = integrability_residuals(&cs, &p);
            r.need(zero(&o, &r1) && zero(&o, &r2), format!("{name}: integrability"));
        }
    }
    (r, format!("{per} per family"))
}

/// Probes run in quad precision: some verdicts in the corpus, zero and nonzero,
/// sit within 1e-9 of their largest intermediate in `f64`.
fn oracle_consistency() -> (Checks, String) {
    let mut r = Checks::new();
    let files = problem_files(&corpus_dir()).unwrap();
    let base = Options {
        audit: true,
        ..Options::default()
    };
    let tight = Oracle::new(ProbeConfig {
        probes: 8,
        abs_tol: 1e-24,
        rel_tol: 1e-24,
        ..ProbeConfig::default()
    });
    let loose = Oracle::new(ProbeConfig::default());
    let (mut checked, mut unprobeable, mut marginal) = (0usize, 0usize, 0usize);
    let mut seen = HashSet::new();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let pf = ProblemFile::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        let mut opts = base.clone();
        opts.seed ^= fnv(&name);
        let o = opts.oracle();
        run_with(&pf, &opts, &o);
        for entry in o.audit_entries() {
            if !seen.insert(entry.expr.clone()) {
                continue;
            }
            for seed in [0x5eed_0001u64, 0x5eed_0002] {
                match tight.probe_zero_in::<f128>(&entry.expr, None, seed) {
                    Ok(z) => {
                        checked += 1;
                        r.need(z == entry.zero, format!("{name}: {} (symbolic {})", entry.expr, entry.zero));
                        if loose.probe_zero(&entry.expr, None, seed).is_ok_and(|l| l != z) {
                            marginal += 1;
                        }
                    }
                    Err(_) => unprobeable += 1,
                }
            }
        }
    }
    (
        r,
        format!(
            "{} files, {} verdicts, {checked} quad-precision probes, {marginal} disagree with f64 probes, {unprobeable} without valid points",
            files.len(),
            seen.len()
        ),
    )
}

type Criterion = (&'static str, f64, Box<dyn Fn() -> (Checks, String)>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Kamke 128", 5.0, Box::new(|| (kamke_128(), String::new()))),
        ("Example 2", 10.0, Box::new(|| (example_2(), String::new()))),
        ("Example 3", 5.0, Box::new(|| (example_3(), String::new()))),
        ("Kamke 394", 5.0, Box::new(|| (kamke_394(), String::new()))),
        ("round trip", 120.0, Box::new(round_trip)),
        ("Riccati invariants", f64::INFINITY, Box::new(|| (invariant_law(), "25 ODEs".into()))),
        ("Riccati families", 180.0, Box::new(families)),
        ("oracle consistency", f64::INFINITY, Box::new(oracle_consistency)),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (out, note) = run();
        let secs = t0.elapsed().as_secs_f64();
        let mut fails = out.fails;
        if secs >= *limit {
            fails.push(format!("took {secs:.1}s, limit {limit}s"));
        }
        let verdict = if fails.is_empty() { "PASS" } else { "FAIL" };
        let note = if note.is_empty() { String::new() } else { format!(" ({note})") };
        println!("{verdict} {}. {name}: {secs:.2}s{note}", k + 1);
        for f in fails.iter().take(10) {
            println!("    {f}");
        }
        if !fails.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
