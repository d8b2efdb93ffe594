//! Riccati ODEs `y' = f2 y^2 + f1 y + f0`: invariants and the solvable families.

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use symcore::poly::power_part;
use symcore::{diff, diff_n, normalize, Expr, Normal, Oracle};

use crate::classify::{attach, pullback, Classification};
use crate::error::{Error, Result};
use crate::fxqx::{self, FxQx};
use crate::ode::{u, y, LinearSymmetry, LinearTransform, Outcome, TransformKind, X, Y};

#[derive(Clone, Debug, PartialEq)]
pub struct Coeffs {
    pub f2: Expr,
    pub f1: Expr,
    pub f0: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invariants {
    pub s2: Expr,
    pub s3: Expr,
    pub s4: Expr,
    pub chini: Expr,
}

/// Riccati data attached to a report branch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RiccatiInfo {
    pub s2: String,
    pub s3: String,
    pub s4: String,
    pub chini: String,
    pub step: Option<u8>,
    pub method: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
}

pub fn extract_coeffs(o: &Oracle, phi: &Expr) -> Result<Coeffs> {
    let Some(cs) = o.poly_parts(phi, Y, 2)? else {
        return Err(Error::NotRiccati);
    };
    let c = Coeffs {
        f2: cs[2].clone(),
        f1: cs[1].clone(),
        f0: cs[0].clone(),
    };
    if o.is_zero(&c.f2)? {
        return Err(Error::NotRiccati);
    }
    if o.is_zero(&c.f0)? {
        return Err(Error::DegenerateBernoulli);
    }
    Ok(c)
}

pub fn invariants(c: &Coeffs) -> Invariants {
    let s2 = normalize(&(&c.f0 * &c.f2));
    let s3 = normalize(&(diff(&c.f0, X) * &c.f2 - diff(&c.f2, X) * &c.f0 - Expr::int(2) * &c.f0 * &c.f1 * &c.f2));
    let s4 = normalize(
        &((Expr::int(2) * &s2 * diff(&s3, X) - Expr::int(3) * &s3 * diff(&s2, X)
            + Expr::int(3) * Expr::powi(s3.clone(), 2))
            / (Expr::int(2) * &s2)),
    );
    let chini = normalize(&(Expr::powi(s3.clone(), 2) / Expr::powi(s2.clone(), 3)));
    Invariants { s2, s3, s4, chini }
}

/// `1/sqrt(s2)` up to a constant factor, with square factors pulled out of the root.
fn inv_sqrt(o: &Oracle, s2: &Expr) -> Result<Expr> {
    let n = Normal::of(s2)?;
    let (num, den) = (&n.rf.num, &n.rf.den);
    let (rn, mn) = power_part(num, 2);
    let (rd, md) = power_part(den, 2);
    let m = mn.mul(&md);
    let c = m.numeric_content();
    let m = m.scale(&c.recip());
    let mut m = n.ctx.poly_expr(&m);
    let outside = n.ctx.poly_expr(&rd.mul(&md)) / n.ctx.poly_expr(&rn);
    if c.is_negative() {
        m = -m;
    }
    if o.sample(&m).is_some_and(|v| v < 0.0) {
        m = -m;
    }
    Ok(normalize(&(outside / Expr::sqrt(m))))
}

/// Symmetry `[F, P y]` when the invariant is constant.
pub fn chini(o: &Oracle, c: &Coeffs, inv: &Invariants) -> Result<Option<LinearSymmetry>> {
    if !o.is_zero(&diff(&inv.chini, X))? {
        return Ok(None);
    }
    let xi = inv_sqrt(o, &inv.s2)?;
    let w = diff(&c.f0, X) * &c.f2 - &c.f0 * diff(&c.f2, X);
    let eta = &xi * w / (Expr::int(2) * &inv.s2) * y();
    Ok(Some(LinearSymmetry::new(xi, eta)))
}

/// Step 1: `[F, Q]`, then `[F, P y]`.
fn step_one(o: &Oracle, phi: &Expr) -> Result<Option<(LinearSymmetry, &'static str)>> {
    if let FxQx::Found(s) = fxqx::detect(o, phi)? {
        return Ok(Some((s, "fxqx")));
    }
    let c = match extract_coeffs(o, phi) {
        Ok(c) => c,
        Err(Error::NotRiccati | Error::DegenerateBernoulli) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(chini(o, &c, &invariants(&c))?.map(|s| (s, "chini")))
}

fn via_transform(o: &Oracle, phi: &Expr, t: &LinearTransform) -> Result<Option<(LinearSymmetry, &'static str)>> {
    let reduced = t.push_ode(phi);
    let Some((s, how)) = step_one(o, &reduced)? else {
        return Ok(None);
    };
    Ok(Some((pullback(o, t, &s)?, how)))
}

/// `y = u/f2`, then step 1 on the result.
pub fn case_fp(o: &Oracle, phi: &Expr, c: &Coeffs) -> Result<Option<(LinearSymmetry, &'static str)>> {
    let t = LinearTransform::new(TransformKind::Multiply, &c.f2 * y(), u() / &c.f2);
    via_transform(o, phi, &t)
}

/// `y = u - 1`, then step 1 on the result.
pub fn case_qp(o: &Oracle, phi: &Expr) -> Result<Option<(LinearSymmetry, &'static str)>> {
    let t = LinearTransform::new(TransformKind::Shift, y() + 1, u() - 1);
    via_transform(o, phi, &t)
}

/// Closed form for `p` in the `f = q` family.
pub fn ans_p(c: &Coeffs, inv: &Invariants) -> Result<Expr> {
    let (f2, s2, s3, s4) = (&c.f2, &inv.s2, &inv.s3, &inv.s4);
    let d = |e: &Expr, n: usize| diff_n(e, X, n);
    let den = normalize(&(s2 * (Expr::int(2) * s2 * d(s3, 1) - Expr::int(3) * s3 * d(s2, 1))));
    if den.is_zero_literal() {
        return Err(Error::ChiniDeferral);
    }
    let inner = (d(s2, 2) - s4) * s2 - Expr::int(8) * Expr::powi(s2.clone(), 3)
        - Expr::int(2) * Expr::powi(d(s2, 1), 2)
        + Expr::int(2) * Expr::powi(s3.clone(), 2);
    let num = f2
        * (Expr::int(3) * s2 * d(f2, 2) * d(s2, 1) - Expr::int(2) * Expr::powi(s2.clone(), 2) * d(f2, 3)
            + inner * d(f2, 1));
    Ok(normalize(&(num / den)))
}

/// The two constants of the `f = q` family for a given `p`.
pub fn sol_ab(c: &Coeffs, p: &Expr) -> (Expr, Expr) {
    let (f2, f1, f0) = (&c.f2, &c.f1, &c.f0);
    let pp = diff(p, X);
    let a = (f1 * p - Expr::int(2) * Expr::powi(f2.clone(), 2) + &pp) / f2;
    let b = (f0 * Expr::powi(p.clone(), 2)
        + f2 * (Expr::powi(f2.clone(), 2) - f1 * p - &pp)
        + diff(f2, X) * p)
        / f2;
    (normalize(&a), normalize(&b))
}

/// Residuals of the two integrability relations for `p`.
pub fn integrability_residuals(c: &Coeffs, p: &Expr) -> (Expr, Expr) {
    let (f2, f1, f0) = (&c.f2, &c.f1, &c.f0);
    let d = |e: &Expr| diff(e, X);
    let (f2p, pp) = (d(f2), d(p));
    let r1 = diff_n(f2, X, 2)
        - (f1 * &f2p - Expr::int(2) * f0 * &pp - p * d(f0)
            + (Expr::powi(f2p.clone(), 2) + p * f0 * &f2p) / f2);
    let r2 = diff_n(p, X, 2)
        - (Expr::int(2) * &f2p * f2 - &pp * f1 - p * d(f1) + (&f2p * &pp + p * f1 * &f2p) / f2);
    (r1, r2)
}

pub struct FqResult {
    pub symmetry: LinearSymmetry,
    pub a: Expr,
    pub b: Expr,
    pub p: Expr,
}

pub fn case_fq(o: &Oracle, c: &Coeffs, inv: &Invariants) -> Result<Option<FqResult>> {
    let p = ans_p(c, inv)?;
    if o.is_zero(&p)? {
        return Ok(None);
    }
    let (a, b) = sol_ab(c, &p);
    if !o.is_zero(&diff(&a, X))? || !o.is_zero(&diff(&b, X))? {
        return Ok(None);
    }
    let xi = &p / &c.f2;
    let eta = -((diff(&p, X) * y() + diff(&c.f2, X)) / &c.f2);
    Ok(Some(FqResult {
        symmetry: LinearSymmetry::new(xi, eta),
        a: o.eliminate(&a, X),
        b: o.eliminate(&b, X),
        p,
    }))
}

/// The three-step strategy; the first verified symmetry wins.
pub fn strategy(o: &Oracle, phi: &Expr) -> Result<Classification> {
    let phi = normalize(phi);
    let mut cl = Classification::new(Outcome::DegenerateRiccatiPath);
    let c = match extract_coeffs(o, &phi) {
        Ok(c) => c,
        Err(Error::DegenerateBernoulli) => {
            cl.failed = Some("f0 vanishes".into());
            return Ok(cl);
        }
        Err(e) => return Err(e),
    };
    let inv = invariants(&c);
    let mut info = RiccatiInfo {
        s2: inv.s2.to_string(),
        s3: inv.s3.to_string(),
        s4: inv.s4.to_string(),
        chini: inv.chini.to_string(),
        ..RiccatiInfo::default()
    };
    let mut fails: Vec<&str> = Vec::new();
    let found = |cl: &mut Classification, info: &mut RiccatiInfo, s: LinearSymmetry, step: u8, how: &str| -> Result<bool> {
        if attach(o, &phi, cl, s)? {
            cl.outcome = Outcome::Riccati;
            info.step = Some(step);
            info.method = Some(how.to_string());
            return Ok(true);
        }
        Ok(false)
    };
    if let Some((s, how)) = step_one(o, &phi)? {
        if found(&mut cl, &mut info, s, 1, how)? {
            cl.riccati = Some(info);
            return Ok(cl);
        }
    }
    fails.push("step 1: no [F, Q] or [F, P y] symmetry");
    if let Some((s, how)) = case_fp(o, &phi, &c)? {
        if found(&mut cl, &mut info, s, 2, &format!("f=p/{how}"))? {
            cl.riccati = Some(info);
            return Ok(cl);
        }
    }
    if let Some((s, how)) = case_qp(o, &phi)? {
        if found(&mut cl, &mut info, s, 2, &format!("q=p/{how}"))? {
            cl.riccati = Some(info);
            return Ok(cl);
        }
    }
    fails.push("step 2: f=p and q=p failed");
    match case_fq(o, &c, &inv) {
        Ok(Some(r)) => {
            info.a = Some(r.a.to_string());
            info.b = Some(r.b.to_string());
            cl.p = Some(r.p);
            if found(&mut cl, &mut info, r.symmetry, 3, "f=q")? {
                cl.riccati = Some(info);
                return Ok(cl);
            }
            fails.push("step 3: symmetry residual nonzero");
        }
        Ok(None) => fails.push("step 3: a or b not constant"),
        Err(Error::ChiniDeferral) => fails.push("step 3: constant invariant"),
        Err(e) => return Err(e),
    }
    info.a = None;
    info.b = None;
    cl.riccati = Some(info);
    cl.symmetry = None;
    cl.failed = Some(fails.join("; "));
    Ok(cl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ProbeConfig};

    fn p(s: &str) -> Expr {
        parse(s, &["c"], &[]).unwrap()
    }

    fn oracle() -> Oracle {
        Oracle::new(ProbeConfig::default())
    }

    #[test]
    fn invariants_of_simple_chini() {
        let o = oracle();
        let c = extract_coeffs(&o, &p("y^2 + c/x^2")).unwrap();
        let inv = invariants(&c);
        assert!(o.is_zero(&(&inv.s2 - p("c/x^2"))).unwrap());
        assert!(o.is_zero(&(&inv.s3 + p("2*c/x^3"))).unwrap());
        assert!(o.is_zero(&(&inv.chini - p("4/c"))).unwrap());
        let s = chini(&o, &c, &inv).unwrap().unwrap();
        let want = LinearSymmetry::new(p("x"), p("-y"));
        assert!(crate::solve::same_symmetry(&o, &s, &want).unwrap().ok);
    }

    #[test]
    fn extraction_errors() {
        let o = oracle();
        assert!(matches!(extract_coeffs(&o, &p("exp(y)")), Err(Error::NotRiccati)));
        assert!(matches!(extract_coeffs(&o, &p("y^2 + x*y")), Err(Error::DegenerateBernoulli)));
        let c = extract_coeffs(&o, &p("y^2 - y/x + 1/x^2")).unwrap();
        assert!(o.is_zero(&(&c.f1 + p("1/x"))).unwrap());
    }

    #[test]
    fn unsolved_riccati() {
        let o = oracle();
        let cl = strategy(&o, &p("y^2 + x")).unwrap();
        assert_eq!(cl.outcome, Outcome::DegenerateRiccatiPath);
        assert!(cl.symmetry.is_none());
    }

    #[test]
    fn f_equals_q_recovers_constants() {
        // p = x, f = x^2, a = 1, b = 1
        let o = oracle();
        let f = p("x^2");
        let pp = p("x");
        let (a, b) = (Expr::int(1), Expr::int(1));
        let f1 = (&a + Expr::int(2) * &f) * &f / &pp - diff(&pp, X) / &pp;
        let f0 = ((&a + &f) * &f + &b) * &f / Expr::powi(pp.clone(), 2) - diff(&f, X) / &pp;
        let phi = normalize(&(&f * Expr::powi(y(), 2) + f1 * y() + f0));
        let c = extract_coeffs(&o, &phi).unwrap();
        let inv = invariants(&c);
        let r = case_fq(&o, &c, &inv).unwrap().unwrap();
        assert!(o.is_zero(&(&r.p - &pp)).unwrap());
        assert!(o.is_zero(&(&r.a - &a)).unwrap());
        assert!(o.is_zero(&(&r.b - &b)).unwrap());
        let (r1, r2) = integrability_residuals(&c, &r.p);
        assert!(o.is_zero(&r1).unwrap() && o.is_zero(&r2).unwrap());
        let cl = strategy(&o, &phi).unwrap();
        assert_eq!(cl.outcome, Outcome::Riccati);
        assert_eq!(cl.riccati.unwrap().step, Some(3));
    }

    #[test]
    fn constant_invariant_defers() {
        let o = oracle();
        let c = extract_coeffs(&o, &p("y^2 + c/x^2")).unwrap();
        assert!(matches!(ans_p(&c, &invariants(&c)), Err(Error::ChiniDeferral)));
    }
}
