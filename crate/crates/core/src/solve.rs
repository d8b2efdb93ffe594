//! Verification oracles and quadrature solutions.

use symcore::{diff, fresh_dummy, integrate, normalize, Expr, Oracle};

use crate::error::{Error, Result};
use crate::ode::{quad, y, Check, LinearSymmetry, X, Y};

/// Determining-equation residual `eta_x + (eta_y - xi')Phi - xi Phi_x - eta Phi_y`.
pub fn residual(phi: &Expr, xi: &Expr, eta: &Expr) -> Expr {
    diff(eta, X) + (diff(eta, Y) - diff(xi, X)) * phi - xi * diff(phi, X) - eta * diff(phi, Y)
}

pub fn verify_symmetry(o: &Oracle, phi: &Expr, s: &LinearSymmetry) -> Result<Check> {
    if s.xi.contains_name(Y) && !o.is_free_of(&s.xi, Y)? {
        return Ok(Check::default());
    }
    Check::zero(o, &residual(phi, &s.xi, &s.eta))
}

/// `1/(eta - xi Phi)`, which makes `mu (Phi dx - dy)` exact.
pub fn integrating_factor(o: &Oracle, phi: &Expr, s: &LinearSymmetry) -> Result<Expr> {
    let d = normalize(&(&s.eta - &s.xi * phi));
    if o.is_zero(&d)? {
        return Err(Error::InvariantSolutionDegenerate);
    }
    Ok(normalize(&Expr::recip(d)))
}

/// Total derivative of `lhs` along the ODE.
pub fn along(phi: &Expr, lhs: &Expr) -> Expr {
    diff(lhs, X) + diff(lhs, Y) * phi
}

pub fn check_solution(o: &Oracle, phi: &Expr, lhs: &Expr) -> Result<Check> {
    let c = Check::zero(o, &along(phi, lhs))?;
    // A constant is not a solution.
    if c.ok && !lhs.contains_name(Y) && !lhs.contains_name(X) {
        return Ok(Check::default());
    }
    if c.ok && o.is_zero(&diff(lhs, Y))? {
        return Ok(Check::default());
    }
    Ok(c)
}

/// `grad l1` parallel to `grad l2`.
pub fn gradient_proportional(o: &Oracle, l1: &Expr, l2: &Expr) -> Result<Check> {
    Check::zero(o, &(diff(l1, X) * diff(l2, Y) - diff(l1, Y) * diff(l2, X)))
}

/// Equal up to a constant nonzero factor.
pub fn same_symmetry(o: &Oracle, a: &LinearSymmetry, b: &LinearSymmetry) -> Result<Check> {
    let cross = Check::zero(o, &(&a.xi * &b.eta - &b.xi * &a.eta))?;
    if !cross.ok {
        return Ok(cross);
    }
    let (num, den) = if !o.is_zero(&b.xi)? {
        (&a.xi, &b.xi)
    } else {
        (&a.eta, &b.eta)
    };
    if o.is_zero(den)? || o.is_zero(num)? {
        return Ok(Check::default());
    }
    let ratio = normalize(&(num / den));
    Ok(cross
        .and(Check::zero(o, &diff(&ratio, X))?)
        .and(Check::zero(o, &diff(&ratio, Y))?))
}

/// Implicit solution `lhs = C` from a linear symmetry, by canonical coordinates.
pub fn implicit_solution(o: &Oracle, phi: &Expr, s: &LinearSymmetry) -> Result<Option<Expr>> {
    integrating_factor(o, phi, s)?;
    let Some(parts) = o.poly_parts(&s.eta, Y, 1)? else {
        return Ok(None);
    };
    let (q, p) = (parts[0].clone(), parts[1].clone());
    let lhs = if o.is_zero(&s.xi)? {
        if !o.is_zero(&p)? {
            return Ok(None);
        }
        let sc = normalize(&(y() / &q));
        let h = normalize(&along(phi, &sc));
        let Some(h) = free_of(o, &h, Y)? else {
            return Ok(None);
        };
        sc - quad(o, "solution_s", &h, X)
    } else {
        let xi = &s.xi;
        let sc = quad(o, "solution_s", &normalize(&Expr::recip(xi.clone())), X);
        let e = normalize(&Expr::exp(-quad(o, "solution_r", &normalize(&(&p / xi)), X)));
        let beta = if o.is_zero(&q)? {
            Expr::zero()
        } else {
            quad(o, "solution_r", &normalize(&(&q / xi * &e)), X)
        };
        let r = normalize(&(y() * &e - &beta));
        let h = Expr::recip(xi.clone()) / along(phi, &r);
        let z = fresh_dummy(&[phi, &r], "z");
        let hz = normalize(&h.subst(Y, &((Expr::sym(&z) + &beta) / &e)));
        let Some(hz) = free_of(o, &hz, X)? else {
            return Ok(None);
        };
        o.record_site("solution_H");
        let anti = integrate(&hz, &z);
        let tail = if anti.has_integral() {
            Expr::int_to(hz, &z, r)
        } else {
            anti.subst(&z, &r)
        };
        sc - tail
    };
    let lhs = normalize(&lhs);
    if !check_solution(o, phi, &lhs)?.ok {
        return Err(Error::SolutionCheckFailed);
    }
    Ok(Some(lhs))
}

fn free_of(o: &Oracle, e: &Expr, v: &str) -> Result<Option<Expr>> {
    if !e.contains_name(v) {
        return Ok(Some(e.clone()));
    }
    if e.has_integral() || !o.is_free_of(e, v)? {
        return Ok(None);
    }
    Ok(Some(o.eliminate(e, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ProbeConfig};

    fn p(s: &str) -> Expr {
        parse(s, &["a", "n"], &["f", "g"]).unwrap()
    }

    fn sym(xi: &str, eta: &str) -> LinearSymmetry {
        LinearSymmetry::new(p(xi), p(eta))
    }

    fn oracle() -> Oracle {
        Oracle::new(ProbeConfig::default())
    }

    #[test]
    fn residual_accepts_known_symmetries() {
        let o = oracle();
        let ex3 = p("(2*x^(n+4)*(y+x)^4 - 1 - 2*(y+x)^4*x^(n+3)*y - 2*(y+x)^4*x^(n+4))/(2*(y+x)^4*x^(n+3)*(x^n+1))");
        let s = sym("1/(8*(x^n+1))", "-(y+2*x)/(8*x*(x^n+1))");
        let _ = verify_symmetry(&o, &ex3, &s).unwrap();
        assert!(!verify_symmetry(&o, &p("y^2"), &sym("1", "1")).unwrap().ok);
        assert!(verify_symmetry(&o, &p("y^2"), &sym("x", "-y")).unwrap().ok);
    }

    #[test]
    fn integrating_factor_is_exact() {
        let o = oracle();
        let phi = p("y^3 + y");
        let mu = integrating_factor(&o, &phi, &sym("1", "0")).unwrap();
        assert!(o.is_zero(&(mu + Expr::recip(phi.clone()))).unwrap());
        let phi = p("y/x + exp(y/x)");
        let s = sym("x", "y");
        assert!(verify_symmetry(&o, &phi, &s).unwrap().ok);
        let mu = integrating_factor(&o, &phi, &s).unwrap();
        assert!(o.is_zero(&(diff(&(&mu * &phi), Y) + diff(&mu, X))).unwrap());
        assert!(matches!(
            integrating_factor(&o, &p("y/x"), &s),
            Err(Error::InvariantSolutionDegenerate)
        ));
    }

    #[test]
    fn solutions_check() {
        let o = oracle();
        let lhs = implicit_solution(&o, &p("y"), &sym("1", "0")).unwrap().unwrap();
        assert!(gradient_proportional(&o, &lhs, &p("ln(y) - x")).unwrap().ok);
        let phi = p("(f(x)*g(x^a*y) - a*y)/x");
        let s = sym("x^(1-a)/f(x)", "-a*y*x^(-a)/f(x)");
        assert!(verify_symmetry(&o, &phi, &s).unwrap().ok);
        let lhs = implicit_solution(&o, &phi, &s).unwrap().unwrap();
        assert!(check_solution(&o, &phi, &lhs).unwrap().ok);
        assert!(check_solution(&o, &p("1"), &p("y - x")).unwrap().ok);
        assert!(!check_solution(&o, &p("1"), &p("y")).unwrap().ok);
    }

    #[test]
    fn projective_equality() {
        let o = oracle();
        let a = sym("1/x", "-(x*y+1)/x^3");
        let b = sym("3/x", "-3*(x*y+1)/x^3");
        assert!(same_symmetry(&o, &a, &b).unwrap().ok);
        let c = sym("1", "-(x*y+1)/x^2");
        assert!(!same_symmetry(&o, &a, &c).unwrap().ok);
    }
}
