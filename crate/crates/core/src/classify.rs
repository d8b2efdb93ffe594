//! Membership in the class of ODEs with a linear symmetry, and reduction to
//! the `[F(x), Q(x)]` form.

use serde::Serialize;
use symcore::{diff, normalize, Expr, Oracle};

use crate::error::{Error, Result};
use crate::fxqx::{self, FxQx};
use crate::ode::{quad, u, y, LinearSymmetry, LinearTransform, Outcome, TransformKind, X, Y};
use crate::riccati::RiccatiInfo;
use crate::solve::{implicit_solution, verify_symmetry};

/// Outcome of one branch.
#[derive(Clone, Debug)]
pub struct Classification {
    pub outcome: Outcome,
    /// Case of the reduction that was reached, if any.
    pub case: Option<Outcome>,
    /// The condition that failed, verbatim.
    pub failed: Option<String>,
    pub a: Option<Expr>,
    pub i: Option<Expr>,
    pub p: Option<Expr>,
    pub reduction: Vec<LinearTransform>,
    pub reduced: Option<Expr>,
    pub symmetry: Option<LinearSymmetry>,
    pub solution: Option<Expr>,
    pub verified: Verified,
    pub riccati: Option<RiccatiInfo>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verified {
    pub determining: bool,
    pub solution: bool,
    pub probabilistic: bool,
}

impl Classification {
    pub fn new(outcome: Outcome) -> Classification {
        Classification {
            outcome,
            case: None,
            failed: None,
            a: None,
            i: None,
            p: None,
            reduction: Vec::new(),
            reduced: None,
            symmetry: None,
            solution: None,
            verified: Verified::default(),
            riccati: None,
        }
    }

    pub fn not_in_class(mut self, why: &str) -> Classification {
        self.outcome = Outcome::NotInClass;
        self.failed = Some(why.to_string());
        self.symmetry = None;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Case {
    Ay0,
    /// `A = c0 + c1 y`
    Ayy0(Expr, Expr),
    General,
}

impl Case {
    pub fn outcome(&self) -> Outcome {
        match self {
            Case::Ay0 => Outcome::CaseAy0,
            Case::Ayy0(..) => Outcome::CaseAyy0,
            Case::General => Outcome::CaseGeneral,
        }
    }
}

/// `Phi_yy / Phi_yyy`.
pub fn compute_a(o: &Oracle, phi: &Expr) -> Result<Expr> {
    let p2 = diff(&diff(phi, Y), Y);
    let p3 = diff(&p2, Y);
    if o.is_zero(&p3)? {
        return Err(Error::DegenerateThirdDerivative);
    }
    Ok(normalize(&(p2 / p3)))
}

pub fn case_of(o: &Oracle, a: &Expr) -> Result<Case> {
    let ay = diff(a, Y);
    if o.is_zero(&ay)? {
        return Ok(Case::Ay0);
    }
    if o.is_zero(&diff(&ay, Y))? {
        if let Some(cs) = o.poly_parts(a, Y, 1)? {
            return Ok(Case::Ayy0(cs[0].clone(), cs[1].clone()));
        }
    }
    Ok(Case::General)
}

/// `A_yx / A_yy`.
pub fn compute_i(a: &Expr) -> Expr {
    let ay = diff(a, Y);
    normalize(&(diff(&ay, X) / diff(&ay, Y)))
}

/// `exp(int I_y dx)` for `I = c0 + c1 y`.
pub fn compute_p(o: &Oracle, c1: &Expr) -> Expr {
    normalize(&Expr::exp(quad(o, "compute_p", c1, X)))
}

pub fn transform_for(o: &Oracle, case: &Case, a: &Expr, p: Option<&Expr>) -> Result<LinearTransform> {
    let t = match case {
        Case::Ay0 => {
            let a = o.eliminate(a, Y);
            LinearTransform::new(TransformKind::Scale, y() / &a, &a * u())
        }
        Case::Ayy0(c0, c1) => LinearTransform::new(
            TransformKind::Log,
            Expr::ln(a.clone()),
            (Expr::exp(u()) - c0) / c1,
        ),
        Case::General => {
            let p = p.ok_or(Error::SingularTransform)?;
            LinearTransform::new(TransformKind::Multiply, p * y(), u() / p)
        }
    };
    if o.is_zero(&diff(&t.forward, Y))? {
        return Err(Error::SingularTransform);
    }
    Ok(t)
}

/// Pull a reduced symmetry back and rewrite `eta` as `P y + Q`.
pub fn pullback(o: &Oracle, t: &LinearTransform, s: &LinearSymmetry) -> Result<LinearSymmetry> {
    let back = t.pull_symmetry(s)?;
    match o.poly_parts(&back.eta, Y, 1)? {
        Some(cs) => Ok(LinearSymmetry::new(back.xi, &cs[0] + &cs[1] * y())),
        None => Err(Error::PullbackNotLinear),
    }
}

/// Symmetry `[0, exp(int c1)]` of `y' = c0 + c1 y`.
pub fn linear_symmetry(o: &Oracle, phi: &Expr) -> Result<Option<LinearSymmetry>> {
    let Some(cs) = o.poly_parts(phi, Y, 1)? else {
        return Ok(None);
    };
    let eta = Expr::exp(quad(o, "linear", &cs[1], X));
    Ok(Some(LinearSymmetry::new(Expr::zero(), eta)))
}

/// Attach a symmetry after checking it, then try for a solution.
pub fn attach(o: &Oracle, phi: &Expr, c: &mut Classification, s: LinearSymmetry) -> Result<bool> {
    let v = verify_symmetry(o, phi, &s)?;
    if !v.ok {
        return Ok(false);
    }
    c.verified.determining = true;
    c.verified.probabilistic |= v.probabilistic;
    c.symmetry = Some(s.clone());
    if let Ok(Some(lhs)) = implicit_solution(o, phi, &s) {
        let chk = crate::solve::check_solution(o, phi, &lhs)?;
        c.verified.solution = chk.ok;
        c.verified.probabilistic |= chk.probabilistic;
        if chk.ok {
            c.solution = Some(lhs);
        }
    }
    Ok(true)
}

/// Theorem-style membership test for an ODE with a nonvanishing third `y`-derivative.
pub fn find_linear_symmetry(o: &Oracle, phi: &Expr) -> Result<Classification> {
    let phi = normalize(phi);
    match fxqx::detect(o, &phi)? {
        FxQx::Found(s) => {
            let mut c = Classification::new(Outcome::FxQxDirect);
            if attach(o, &phi, &mut c, s)? {
                return Ok(c);
            }
        }
        FxQx::Linear => return Err(Error::DegenerateLinear),
        FxQx::Absent(_) => {}
    }
    let a = compute_a(o, &phi)?;
    let case = case_of(o, &a)?;
    let mut c = Classification::new(case.outcome());
    c.case = Some(case.outcome());
    c.a = Some(a.clone());
    let mut p = None;
    if case == Case::General {
        let i = compute_i(&a);
        c.i = Some(i.clone());
        let Some(cs) = o.poly_parts(&i, Y, 1)? else {
            return Ok(c.not_in_class("I nonlinear in y"));
        };
        let pe = compute_p(o, &cs[1]);
        c.p = Some(pe.clone());
        p = Some(pe);
    }
    let t = transform_for(o, &case, &a, p.as_ref())?;
    let reduced = t.push_ode(&phi);
    c.reduction.push(t.clone());
    c.reduced = Some(reduced.clone());
    let s = match fxqx::detect(o, &reduced)? {
        FxQx::Found(s) => s,
        FxQx::Linear => return Ok(c.not_in_class("reduced ODE linear")),
        FxQx::Absent(why) => return Ok(c.not_in_class(why)),
    };
    let back = pullback(o, &t, &s)?;
    if !attach(o, &phi, &mut c, back)? {
        return Ok(c.not_in_class("pulled-back symmetry residual nonzero"));
    }
    Ok(c)
}
