//! Symmetries `[F(x), Q(x)]` of a solved-form ODE.

use symcore::{diff, normalize, Expr, Oracle};

use crate::error::Result;
use crate::ode::{quad, y, LinearSymmetry, X, Y};
use crate::solve::residual;

#[derive(Clone, Debug, PartialEq)]
pub enum FxQx {
    /// `xi = F`, `eta = Q`; `Q` is zero for separable input.
    Found(LinearSymmetry),
    /// `Phi_yy = 0`.
    Linear,
    Absent(&'static str),
}

/// `Phi_y / Phi_yy`, or `None` when `Phi_yy` vanishes.
pub fn compute_k(o: &Oracle, phi: &Expr) -> Result<Option<Expr>> {
    let py = diff(phi, Y);
    let pyy = diff(&py, Y);
    if o.is_zero(&pyy)? {
        return Ok(None);
    }
    Ok(Some(normalize(&(py / pyy))))
}

pub fn detect(o: &Oracle, phi: &Expr) -> Result<FxQx> {
    let Some(k) = compute_k(o, phi)? else {
        return Ok(FxQx::Linear);
    };
    let ky = normalize(&diff(&k, Y));
    let found = if o.is_zero(&ky)? {
        detect_ky_zero(o, phi, &k)?
    } else {
        detect_ky_nonzero(o, phi, &k, &ky)?
    };
    let FxQx::Found(s) = found else {
        return Ok(found);
    };
    if !o.is_zero(&residual(phi, &s.xi, &s.eta))? {
        return Ok(FxQx::Absent("fxqx: residual nonzero"));
    }
    Ok(FxQx::Found(s))
}

fn y_free(o: &Oracle, e: &Expr) -> Result<Option<Expr>> {
    let e = normalize(e);
    if !e.contains_name(Y) {
        return Ok(Some(e));
    }
    if !o.is_free_of(&e, Y)? || e.has_integral() {
        return Ok(None);
    }
    Ok(Some(o.eliminate(&e, Y)))
}

pub fn detect_ky_nonzero(o: &Oracle, phi: &Expr, k: &Expr, ky: &Expr) -> Result<FxQx> {
    let Some(ups) = y_free(o, &(diff(k, X) / ky))? else {
        return Ok(FxQx::Absent("fxqx: Upsilon depends on y"));
    };
    let den = normalize(&(phi + &ups));
    if o.is_zero(&den)? {
        return Ok(FxQx::Absent("fxqx: Phi + Upsilon vanishes"));
    }
    let w = (&ups * diff(phi, Y) - diff(&ups, X) - diff(phi, X)) / den;
    let Some(w) = y_free(o, &w)? else {
        return Ok(FxQx::Absent("fxqx: F integrand depends on y"));
    };
    let f = Expr::exp(quad(o, "fxqx_F", &w, X));
    let q = -(&ups * &f);
    Ok(FxQx::Found(LinearSymmetry::new(f, q)))
}

pub fn detect_ky_zero(o: &Oracle, phi: &Expr, k: &Expr) -> Result<FxQx> {
    if !o.is_free_of(k, X)? {
        return Ok(FxQx::Absent("fxqx: K not constant"));
    }
    let Some(kappa) = constant_value(o, k) else {
        return Ok(FxQx::Absent("fxqx: K not constant"));
    };
    let py = diff(phi, Y);
    let b = &kappa * &py * Expr::exp(-(y() / &kappa));
    let a = phi - &kappa * &py;
    let (Some(a), Some(b)) = (y_free(o, &a)?, y_free(o, &b)?) else {
        return Ok(FxQx::Absent("fxqx: A or B depends on y"));
    };
    if o.is_zero(&b)? {
        return Ok(FxQx::Absent("fxqx: B vanishes"));
    }
    let f = Expr::exp(-quad(o, "fxqx_exp", &(&a / &kappa), X)) / b;
    let q = &a * &f;
    Ok(FxQx::Found(LinearSymmetry::new(f, q)))
}

/// `K` as an expression free of `x` and `y`, rationalising a sampled value if needed.
fn constant_value(o: &Oracle, k: &Expr) -> Option<Expr> {
    let k = normalize(k);
    if !k.contains_name(X) && !k.contains_name(Y) {
        return Some(k);
    }
    let v = o.sample(&k)?;
    (1..=64i64).find_map(|d| {
        let n = (v * d as f64).round();
        ((n / d as f64 - v).abs() < 1e-9).then(|| Expr::rat(n as i64, d))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ProbeConfig};

    fn oracle() -> Oracle {
        Oracle::new(ProbeConfig::default())
    }

    fn found(phi: &str, params: &[&str], funcs: &[&str]) -> LinearSymmetry {
        let o = oracle();
        let phi = parse(phi, params, funcs).unwrap();
        match detect(&o, &phi).unwrap() {
            FxQx::Found(s) => s,
            other => panic!("{other:?}"),
        }
    }

    fn projective(s: &LinearSymmetry, xi: &str, eta: &str, params: &[&str]) -> bool {
        let o = oracle();
        let xi = parse(xi, params, &[]).unwrap();
        let eta = parse(eta, params, &[]).unwrap();
        o.is_zero(&(&s.xi * &eta - &xi * &s.eta)).unwrap()
    }

    #[test]
    fn exponential_pattern_uses_kappa() {
        let s = found("x + x^2*exp(2*y)", &[], &[]);
        assert!(projective(&s, "exp(-x^2)/x^2", "exp(-x^2)/x", &[]));
    }

    #[test]
    fn reduced_example_with_log_term() {
        let s = found(
            "y*x + a*b*x^(a+1)*exp(y) - a/x + a*x*(ln(x) + c)",
            &["a", "b", "c"],
            &[],
        );
        assert!(projective(&s, "1/x", "-a/x^2", &["a"]));
    }

    #[test]
    fn separable_gives_zero_eta() {
        let s = found("g(y)*f(x)*x^a/x", &["a"], &["f", "g"]);
        assert!(s.eta.is_zero_literal());
        let o = oracle();
        let want = parse("x/(f(x)*x^a)", &["a"], &["f"]).unwrap();
        assert!(o.is_zero(&(&s.xi - want)).unwrap());
    }

    #[test]
    fn riccati_fails_second_condition() {
        let o = oracle();
        let phi = parse("y^2 + x", &[], &[]).unwrap();
        assert_eq!(
            detect(&o, &phi).unwrap(),
            FxQx::Absent("fxqx: F integrand depends on y")
        );
    }

    #[test]
    fn linear_is_degenerate() {
        let o = oracle();
        let phi = parse("x*y + 1", &[], &[]).unwrap();
        assert_eq!(detect(&o, &phi).unwrap(), FxQx::Linear);
        assert!(compute_k(&o, &phi).unwrap().is_none());
    }
}
