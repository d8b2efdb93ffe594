//! Seeded generators for class members, Riccati families and non-members.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symcore::upoly::UPoly;
use symcore::{diff, integrate, normalize, Expr, Rational};

use crate::ode::{x, y, LinearSymmetry, Outcome, X};
use crate::problem::ProblemFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    Poly3,
    Poly4,
    Poly5,
    Exp,
    LinExp,
}

impl Template {
    pub const ALL: [Template; 5] = [
        Template::Poly3,
        Template::Poly4,
        Template::Poly5,
        Template::Exp,
        Template::LinExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Poly3 => "poly3",
            Template::Poly4 => "poly4",
            Template::Poly5 => "poly5",
            Template::Exp => "exp",
            Template::LinExp => "linexp",
        }
    }

    pub fn case(self) -> Outcome {
        match self {
            Template::Poly3 => Outcome::CaseAyy0,
            Template::Poly4 | Template::Poly5 => Outcome::CaseGeneral,
            Template::Exp | Template::LinExp => Outcome::CaseAy0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `q' = 0`
    ConstQ,
    /// `f = p`
    FP,
    /// `q = p`
    QP,
    /// `f = q`
    FQ,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::ConstQ, Family::FP, Family::QP, Family::FQ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ConstQ => "riccati-q0",
            Family::FP => "riccati-fp",
            Family::QP => "riccati-qp",
            Family::FQ => "riccati-fq",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn step(self) -> u8 {
        match self {
            Family::ConstQ => 1,
            Family::FP | Family::QP => 2,
            Family::FQ => 3,
        }
    }
}

/// A generated ODE with its ground truth.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub phi: Expr,
    pub symmetry: Option<LinearSymmetry>,
    pub solution: Option<Expr>,
    pub problem: ProblemFile,
}

fn coeff<R: Rng>(rng: &mut R) -> i64 {
    *[-5i64, -4, -3, -2, -1, 1, 2, 3, 4, 5].choose(rng).unwrap()
}

fn c<R: Rng>(rng: &mut R) -> Expr {
    Expr::int(coeff(rng))
}

fn fprime<R: Rng>(rng: &mut R) -> Expr {
    match rng.gen_range(0..5) {
        0 => c(rng),
        1 => c(rng) * x(),
        2 => c(rng) / x(),
        3 => c(rng) * Expr::powi(x(), 2),
        _ => x() + c(rng),
    }
}

/// Non-constant rational function of `x`.
fn nonconst<R: Rng>(rng: &mut R) -> Expr {
    match rng.gen_range(0..5) {
        0 => c(rng) * x(),
        1 => Expr::powi(x(), 2) + c(rng),
        2 => c(rng) / x(),
        3 => x() + c(rng),
        _ => {
            let (a, b) = loop {
                let (a, b) = (coeff(rng), coeff(rng));
                if a != b {
                    break (a, b);
                }
            };
            (x() + a) / (x() + b)
        }
    }
}

fn qpart<R: Rng>(rng: &mut R) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::zero(),
        1 => c(rng),
        2 => c(rng) * x(),
        _ => c(rng) / x(),
    }
}

fn upoly_of(cs: &[i64]) -> UPoly {
    UPoly::new(cs.iter().map(|c| Rational::from_integer((*c).into())).collect())
}

/// Polynomial `G` of the given degree whose `G''/G'''` is not linear.
fn poly_g<R: Rng>(rng: &mut R, deg: usize) -> Vec<i64> {
    loop {
        let cs: Vec<i64> = (0..=deg).map(|_| coeff(rng)).collect();
        let g = upoly_of(&cs);
        let g2 = g.derivative().derivative();
        let g3 = g2.derivative();
        if deg == 3 || !g2.rem(&g3).is_zero() {
            return cs;
        }
    }
}

fn apply_g(t: Template, cs: &[i64], w: &Expr) -> Expr {
    match t {
        Template::Exp => Expr::exp(w.clone()),
        Template::LinExp => w + Expr::exp(w.clone()),
        _ => Expr::add(cs.iter().enumerate().map(|(i, c)| Expr::int(*c) * Expr::powi(w.clone(), i as i64))),
    }
}

/// Member of the invariant family of `[1/f', -(p' y + q')/(f' p)]`.
pub fn gen_gts(template: Template, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fp = fprime(&mut rng);
    let p = nonconst(&mut rng);
    let q = qpart(&mut rng);
    let deg = match template {
        Template::Poly4 => 4,
        Template::Poly5 => 5,
        _ => 3,
    };
    let cs = poly_g(&mut rng, deg);
    let w = &p * y() + &q;
    let (pp, qp) = (diff(&p, X), diff(&q, X));
    let phi = normalize(&(&fp / &p * apply_g(template, &cs, &w) - &qp / &p - &pp / &p * y()));
    let xi = Expr::recip(fp.clone());
    let eta = -((&pp * y() + &qp) / (&fp * &p));
    let f = integrate(&fp, X);
    let z = Expr::sym("z");
    let sol = f - Expr::int_to(Expr::recip(apply_g(template, &cs, &z)), "z", normalize(&w));
    let name = format!("gts_{}_{seed:04}", template.name());
    let mut pf = ProblemFile {
        ode_text: format!("y' = {phi}"),
        ..ProblemFile::default()
    };
    let sym = LinearSymmetry::new(xi, eta);
    pf.expect.insert("class".into(), template.case().name().into());
    pf.expect.insert("xi".into(), sym.xi.to_string());
    pf.expect.insert("eta".into(), sym.eta.to_string());
    pf.expect.insert("solution".into(), sol.to_string());
    Instance {
        name,
        phi,
        symmetry: Some(sym),
        solution: Some(sol),
        problem: pf,
    }
}

/// Riccati coefficients built from `f, p, q, a, b`.
pub fn fpq_coeffs(f: &Expr, p: &Expr, q: &Expr, a: &Expr, b: &Expr) -> (Expr, Expr, Expr) {
    let f2 = f.clone();
    let f1 = ((a + Expr::int(2) * q) * f - diff(p, X)) / p;
    let f0 = (((a + q) * q + b) * f - diff(q, X) * p) / Expr::powi(p.clone(), 2);
    (normalize(&f2), normalize(&f1), normalize(&f0))
}

pub struct RiccatiInstance {
    pub instance: Instance,
    pub family: Family,
    pub a: Expr,
    pub b: Expr,
    pub f: Expr,
    pub p: Expr,
    pub q: Expr,
}

fn draw_family<R: Rng>(rng: &mut R, family: Family) -> (Expr, Expr, Expr) {
    match family {
        Family::ConstQ => (nonconst(rng), nonconst(rng), c(rng)),
        Family::FP => {
            let f = nonconst(rng);
            (f.clone(), f, nonconst(rng))
        }
        Family::QP => {
            let p = nonconst(rng);
            (fprime(rng), p.clone(), p)
        }
        Family::FQ => {
            let f = nonconst(rng);
            (f.clone(), nonconst(rng), f)
        }
    }
}

/// The Chini invariant is not constant: sampled at two points.
fn invariant_varies(f2: &Expr, f1: &Expr, f0: &Expr) -> bool {
    let c = crate::riccati::Coeffs {
        f2: f2.clone(),
        f1: f1.clone(),
        f0: f0.clone(),
    };
    let inv = crate::riccati::invariants(&c);
    let at = |v: f64| {
        let mut a = symcore::Assignment::default();
        a.values.insert(X.to_string(), v);
        symcore::eval_f64(&inv.chini, &a).ok().map(|r| r.0)
    };
    match (at(0.731), at(1.913)) {
        (Some(u), Some(v)) => (u - v).abs() > 1e-6 * (1.0 + u.abs().max(v.abs())),
        _ => false,
    }
}

fn proportional(a: &Expr, b: &Expr) -> bool {
    let r = normalize(&(a / b));
    !r.contains_name(X)
}

/// `a - b` is constant.
fn shifted(a: &Expr, b: &Expr) -> bool {
    !normalize(&(a - b)).contains_name(X)
}

/// Member of one Riccati family; draws that also belong to an earlier family are redrawn.
pub fn gen_riccati(family: Family, seed: u64) -> RiccatiInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51cc);
    loop {
        let (f, p, q) = draw_family(&mut rng, family);
        let (a, b) = (Expr::int(rng.gen_range(-3..=3)), c(&mut rng));
        let (f2, f1, f0) = fpq_coeffs(&f, &p, &q, &a, &b);
        if f0.is_zero_literal() || f2.is_zero_literal() {
            continue;
        }
        let exclusive = match family {
            Family::ConstQ => true,
            Family::FP => invariant_varies(&f2, &f1, &f0) && !proportional(&q, &p) && !shifted(&q, &p),
            Family::QP => invariant_varies(&f2, &f1, &f0) && !proportional(&f, &p),
            Family::FQ => invariant_varies(&f2, &f1, &f0) && !proportional(&f, &p) && !shifted(&q, &p),
        };
        if !exclusive {
            continue;
        }
        let phi = normalize(&(&f2 * Expr::powi(y(), 2) + &f1 * y() + &f0));
        let sym = LinearSymmetry::new(&p / &f, -((diff(&p, X) * y() + diff(&q, X)) / &f));
        let name = format!("{}_{seed:04}", family.name());
        let mut pf = ProblemFile {
            ode_text: format!("y' = {phi}"),
            ..ProblemFile::default()
        };
        pf.expect.insert("class".into(), Outcome::Riccati.name().into());
        pf.expect.insert("step".into(), family.step().to_string());
        pf.expect.insert("xi".into(), sym.xi.to_string());
        pf.expect.insert("eta".into(), sym.eta.to_string());
        if family == Family::FQ {
            pf.expect.insert("a".into(), a.to_string());
            pf.expect.insert("b".into(), b.to_string());
        }
        return RiccatiInstance {
            instance: Instance {
                name,
                phi,
                symmetry: Some(sym),
                solution: None,
                problem: pf,
            },
            family,
            a,
            b,
            f,
            p,
            q,
        };
    }
}

/// ODEs outside the class, or Riccati ODEs outside the solvable families.
pub fn gen_nonmember(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0c0de);
    let k = c(&mut rng);
    let m = c(&mut rng);
    let pw = *[1i64, 3, -1, 2].choose(&mut rng).unwrap();
    let text = match seed % 6 {
        0 => format!("y^2 + {k}*x^{pw}").replace("^1", ""),
        1 => format!("x + {k}*exp(y^2)"),
        2 => format!("sin(x*y) + {k}"),
        3 => format!("y^4 + {k}*x"),
        4 => format!("y^3*(1 + {k}*x*ln(y))"),
        _ => format!("y^3 + {k}*x*y^3 + {m}*x"),
    };
    let phi = normalize(&symcore::parse(&text, &[], &[]).expect("template parses"));
    let mut pf = ProblemFile {
        ode_text: format!("y' = {phi}"),
        ..ProblemFile::default()
    };
    pf.expect.insert("class".into(), "NotInClass|DegenerateRiccatiPath".into());
    Instance {
        name: format!("nonmember_{seed:04}"),
        phi,
        symmetry: None,
        solution: None,
        problem: pf,
    }
}

/// `count` instances of a family named as on the command line:
/// `gts`, `nonmember`, or a Riccati family.
pub fn generate(kind: &str, count: usize, seed: u64) -> Option<Vec<Instance>> {
    let seeds = (0..count as u64).map(|i| seed + i);
    match kind {
        "gts" => Some(
            seeds
                .enumerate()
                .map(|(i, s)| gen_gts(Template::ALL[i % Template::ALL.len()], s))
                .collect(),
        ),
        "nonmember" => Some(seeds.map(gen_nonmember).collect()),
        _ => {
            let f = Family::from_name(kind)?;
            Some(seeds.map(|s| gen_riccati(f, s).instance).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{check_solution, verify_symmetry};
    use symcore::{Oracle, ProbeConfig};

    #[test]
    fn ground_truth_verifies() {
        let o = Oracle::new(ProbeConfig::default());
        for (i, t) in Template::ALL.iter().enumerate() {
            for s in 0..4 {
                let g = gen_gts(*t, (i * 100 + s) as u64);
                assert!(verify_symmetry(&o, &g.phi, g.symmetry.as_ref().unwrap()).unwrap().ok, "{}", g.phi);
                assert!(check_solution(&o, &g.phi, g.solution.as_ref().unwrap()).unwrap().ok);
            }
        }
        for f in Family::ALL {
            for s in 0..4 {
                let r = gen_riccati(f, s);
                let inst = &r.instance;
                assert!(verify_symmetry(&o, &inst.phi, inst.symmetry.as_ref().unwrap()).unwrap().ok);
            }
        }
    }

    #[test]
    fn files_parse_back() {
        let g = gen_gts(Template::Poly4, 7);
        let pf = ProblemFile::parse(&g.problem.render()).unwrap();
        let o = Oracle::new(ProbeConfig::default());
        let odes = pf.odes(&o).unwrap();
        assert_eq!(odes.len(), 1);
        assert!(o.is_zero(&(&odes[0].phi - &g.phi)).unwrap());
        let n = gen_nonmember(3);
        assert!(ProblemFile::parse(&n.problem.render()).is_ok());
    }
}
