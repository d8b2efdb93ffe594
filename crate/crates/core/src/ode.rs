//! Shared domain types.

use serde::{Deserialize, Serialize};
use symcore::{diff, integrate, normalize, Expr, Oracle, Verdict};

use crate::error::Result;

pub const X: &str = "x";
pub const Y: &str = "y";
/// Dependent variable of a reduced ODE before it is renamed back to `y`.
pub const U: &str = "u";

pub fn x() -> Expr {
    Expr::sym(X)
}

pub fn y() -> Expr {
    Expr::sym(Y)
}

pub fn u() -> Expr {
    Expr::sym(U)
}

/// `y' = phi(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ode {
    pub phi: Expr,
    pub params: Vec<String>,
    pub funcs: Vec<String>,
}

impl Ode {
    pub fn new(phi: Expr) -> Ode {
        Ode {
            phi,
            params: Vec::new(),
            funcs: Vec::new(),
        }
    }

    pub fn with_phi(&self, phi: Expr) -> Ode {
        Ode {
            phi,
            params: self.params.clone(),
            funcs: self.funcs.clone(),
        }
    }
}

/// `[xi(x), eta = P(x) y + Q(x)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSymmetry {
    pub xi: Expr,
    pub eta: Expr,
}

impl LinearSymmetry {
    pub fn new(xi: Expr, eta: Expr) -> LinearSymmetry {
        LinearSymmetry {
            xi: normalize(&xi),
            eta: normalize(&eta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `y = A(x) u`
    Scale,
    /// `u = ln A(x, y)` with `A` linear in `y`
    Log,
    /// `y = u / p(x)`
    Multiply,
    /// `y = u - 1`
    Shift,
}

/// A change of dependent variable `u = forward(x, y)`, `y = inverse(x, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTransform {
    pub kind: TransformKind,
    pub forward: Expr,
    pub inverse: Expr,
}

impl LinearTransform {
    pub fn new(kind: TransformKind, forward: Expr, inverse: Expr) -> LinearTransform {
        LinearTransform {
            kind,
            forward: normalize(&forward),
            inverse: normalize(&inverse),
        }
    }

    /// The transformed right-hand side, written in `x` and `y`.
    pub fn push_ode(&self, phi: &Expr) -> Expr {
        let f = &self.forward;
        let total = diff(f, X) + diff(f, Y) * phi;
        let in_u = total.subst(Y, &self.inverse);
        normalize(&in_u.subst(U, &y()))
    }

    /// Pull a symmetry of the transformed ODE back to the original variables.
    pub fn pull_symmetry(&self, s: &LinearSymmetry) -> Result<LinearSymmetry> {
        let f = &self.forward;
        let fy = normalize(&diff(f, Y));
        if fy.is_zero_literal() {
            return Err(crate::error::Error::SingularTransform);
        }
        let eta_hat = s.eta.subst(Y, f);
        let eta = (eta_hat - &s.xi * diff(f, X)) / fy;
        Ok(LinearSymmetry::new(s.xi.clone(), eta))
    }

    /// Push a symmetry of the original ODE to the transformed variables.
    pub fn push_symmetry(&self, s: &LinearSymmetry) -> LinearSymmetry {
        let f = &self.forward;
        let eta = &s.xi * diff(f, X) + &s.eta * diff(f, Y);
        let eta = eta.subst(Y, &self.inverse).subst(U, &y());
        LinearSymmetry::new(s.xi.clone(), eta)
    }
}

/// Final tag of a classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    CaseAy0,
    CaseAyy0,
    CaseGeneral,
    FxQxDirect,
    /// Resolved by one of the Riccati strategy steps.
    Riccati,
    NotInClass,
    DegenerateLinear,
    DegenerateRiccatiPath,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::CaseAy0 => "CaseAy0",
            Outcome::CaseAyy0 => "CaseAyy0",
            Outcome::CaseGeneral => "CaseGeneral",
            Outcome::FxQxDirect => "FxQxDirect",
            Outcome::Riccati => "Riccati",
            Outcome::NotInClass => "NotInClass",
            Outcome::DegenerateLinear => "DegenerateLinear",
            Outcome::DegenerateRiccatiPath => "DegenerateRiccatiPath",
        }
    }

    pub fn from_name(s: &str) -> Option<Outcome> {
        [
            Outcome::CaseAy0,
            Outcome::CaseAyy0,
            Outcome::CaseGeneral,
            Outcome::FxQxDirect,
            Outcome::Riccati,
            Outcome::NotInClass,
            Outcome::DegenerateLinear,
            Outcome::DegenerateRiccatiPath,
        ]
        .into_iter()
        .find(|o| o.name() == s)
    }
}

/// Result of an identity check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub ok: bool,
    pub probabilistic: bool,
}

impl Check {
    pub fn zero(o: &Oracle, e: &Expr) -> Result<Check> {
        let z = o.zero_test(e)?;
        Ok(Check {
            ok: z.zero,
            probabilistic: z.how == Verdict::Probabilistic,
        })
    }

    pub fn and(self, other: Check) -> Check {
        Check {
            ok: self.ok && other.ok,
            probabilistic: self.probabilistic || other.probabilistic,
        }
    }
}

/// Antiderivative with the call site recorded for the audit trail.
pub fn quad(o: &Oracle, site: &str, e: &Expr, v: &str) -> Expr {
    o.record_site(site);
    integrate(e, v)
}
