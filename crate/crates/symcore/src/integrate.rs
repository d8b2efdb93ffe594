//! Table-driven antiderivatives with an unevaluated fallback.
//!
//! Rational functions of the integration variable (with coefficients in the
//! other kernels) go through polynomial division, Hermite reduction and the
//! Rothstein-Trager logarithmic part over rational residues. Other terms are
//! matched against power, exponential, logarithm and `u' h(u)` rules.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diff::diff;
use crate::expr::{Elem, Expr, Node};
use crate::poly::{Monomial, Poly};
use crate::ratfun::{normalize, Normal};
use crate::upoly::UPoly;
use crate::Rational as Q;

/// An antiderivative of `e` with respect to `v`. Always succeeds: terms
/// without a rule are returned as `Int(.., v)`.
pub fn integrate(e: &Expr, v: &str) -> Expr {
    let e = normalize(e);
    if e.is_zero_literal() {
        return Expr::zero();
    }
    if !e.contains_name(v) {
        return e * Expr::sym(v);
    }
    if let Some(r) = integrate_rational(&e, v) {
        return r;
    }
    if !matches!(e.node(), Node::Add(_)) {
        if let Some(r) = integrate_product(&e, v) {
            return r;
        }
    }
    let pieces: Vec<Expr> = match Normal::of(&e) {
        Ok(n) => {
            let den = n.den_expr();
            n.rf.num
                .terms()
                .into_iter()
                .map(|(m, q)| {
                    let t = n.ctx.poly_expr(&Poly::monomial(&m, q));
                    normalize(&(t / &den))
                })
                .collect()
        }
        Err(_) => vec![e.clone()],
    };
    if pieces.len() > 1 {
        let mut done = Vec::new();
        let mut left = Vec::new();
        for p in &pieces {
            let r = if p.contains_name(v) {
                integrate_product(p, v)
            } else {
                Some(p * Expr::sym(v))
            };
            match r {
                Some(r) => done.push(r),
                None => left.push(p.clone()),
            }
        }
        if !done.is_empty() {
            if !left.is_empty() {
                done.push(unevaluated(&Expr::add(left), v));
            }
            return Expr::add(done);
        }
    }
    unevaluated(&e, v)
}

fn unevaluated(e: &Expr, v: &str) -> Expr {
    let e = normalize(e);
    let (c, rest) = e.split_coeff();
    Expr::num(c) * Expr::int_of(rest, v)
}

// ---- products ------------------------------------------------------------

fn is_var(e: &Expr, v: &str) -> bool {
    matches!(e.node(), Node::Sym(n) if &**n == v)
}

fn is_minus_one(s: &Expr) -> bool {
    normalize(&(s + 1)).is_zero_literal()
}

/// `v^s` as `(s)`, with `v` itself giving exponent one.
fn power_of_var(f: &Expr, v: &str) -> Option<Expr> {
    if is_var(f, v) {
        return Some(Expr::one());
    }
    match f.node() {
        Node::Pow(b, s) if is_var(b, v) && !s.contains_name(v) => Some(s.clone()),
        _ => None,
    }
}

fn power_rule(u: &Expr, s: &Expr) -> Expr {
    if is_minus_one(s) {
        Expr::ln(u.clone())
    } else {
        Expr::pow(u.clone(), s + 1) / (s + 1)
    }
}

fn integrate_product(p: &Expr, v: &str) -> Option<Expr> {
    let (c, rest) = p.split_coeff();
    let (dep, free): (Vec<Expr>, Vec<Expr>) =
        rest.factors().into_iter().partition(|f| f.contains_name(v));
    let k = Expr::num(c) * Expr::mul(free);
    if dep.is_empty() {
        return Some(k * Expr::sym(v));
    }
    let d = Expr::mul(dep.clone());
    let r = match dep.len() {
        1 => single(&dep[0], v),
        2 => log_times_power(&dep, v),
        _ => None,
    }
    .or_else(|| chain(&d, &dep, v))?;
    Some(k * r)
}

fn single(f: &Expr, v: &str) -> Option<Expr> {
    if let Some(s) = power_of_var(f, v) {
        return Some(power_rule(&Expr::sym(v), &s));
    }
    match f.node() {
        Node::Elem(Elem::Ln, u) if is_var(u, v) => {
            Some(Expr::sym(v) * Expr::ln(u.clone()) - Expr::sym(v))
        }
        Node::Func { name, order, arg } if *order >= 1 && is_var(arg, v) => {
            Some(Expr::func(name, order - 1, arg.clone()))
        }
        _ => None,
    }
}

/// `v^s ln(v)`.
fn log_times_power(dep: &[Expr], v: &str) -> Option<Expr> {
    let (l, pw) = if matches!(dep[0].node(), Node::Elem(Elem::Ln, _)) {
        (&dep[0], &dep[1])
    } else {
        (&dep[1], &dep[0])
    };
    match l.node() {
        Node::Elem(Elem::Ln, u) if is_var(u, v) => {}
        _ => return None,
    }
    let s = power_of_var(pw, v)?;
    let x = Expr::sym(v);
    let lv = Expr::ln(x.clone());
    if is_minus_one(&s) {
        return Some(Expr::powi(lv, 2) / 2);
    }
    let s1 = &s + 1;
    Some(Expr::pow(x, s1.clone()) / &s1 * (lv - Expr::recip(s1)))
}

/// `u'(v) h(u)` patterns: the ratio of the integrand to `h(u) u'` must be free of `v`.
fn chain(d: &Expr, dep: &[Expr], v: &str) -> Option<Expr> {
    let mut candidates: Vec<(Expr, Expr, Expr)> = Vec::new(); // (h, u, H)
    for h in dep {
        match h.node() {
            Node::Func { name, order, arg } if *order >= 1 => {
                candidates.push((h.clone(), arg.clone(), Expr::func(name, order - 1, arg.clone())));
            }
            Node::Pow(u, s) if !s.contains_name(v) => {
                candidates.push((h.clone(), u.clone(), power_rule(u, s)));
            }
            Node::Elem(Elem::Exp, u) => candidates.push((h.clone(), u.clone(), h.clone())),
            Node::Elem(Elem::Ln, u) => {
                let big = u * Expr::ln(u.clone()) - u;
                candidates.push((h.clone(), u.clone(), big));
            }
            Node::Elem(Elem::Sin, u) => {
                candidates.push((h.clone(), u.clone(), -Expr::elem(Elem::Cos, u.clone())));
            }
            Node::Elem(Elem::Cos, u) => {
                candidates.push((h.clone(), u.clone(), Expr::elem(Elem::Sin, u.clone())));
            }
            Node::Func { .. } | Node::Sym(_) => {
                // h = u itself: integral u^2/2
                candidates.push((h.clone(), h.clone(), Expr::powi(h.clone(), 2) / 2));
            }
            _ => {}
        }
    }
    for (h, u, big) in candidates {
        let du = normalize(&diff(&u, v));
        if du.is_zero_literal() {
            continue;
        }
        let ratio = normalize(&(d / (h * du)));
        if !ratio.contains_name(v) {
            return Some(ratio * big);
        }
    }
    None
}

// ---- rational functions of v ---------------------------------------------

/// Integrand whose only dependence on `v` is through `v` itself, with a
/// denominator of the form `D_o * D_v(v)`.
fn integrate_rational(e: &Expr, v: &str) -> Option<Expr> {
    let n = Normal::of(e).ok()?;
    let ctx = &n.ctx;
    let vv = (0..ctx.kernels.len() as u32).find(|k| is_var(ctx.kernel_expr(*k), v))?;
    if ctx
        .kernels
        .iter()
        .any(|k| !is_var(&k.expr, v) && k.expr.contains_name(v))
    {
        return None;
    }
    // Split the denominator into a v-free factor and a polynomial in Q[v].
    let dcs = n.rf.den.coeffs_in(vv);
    let d_o = dcs.last().unwrap().clone();
    let mut dv = Vec::with_capacity(dcs.len());
    for c in &dcs {
        let q = c.div_exact(&d_o)?;
        dv.push(q.as_const()?.clone());
    }
    let dv = UPoly::new(dv);
    // Group numerator terms by their monomial in the other kernels.
    let mut groups: BTreeMap<Monomial, Vec<Q>> = BTreeMap::new();
    for (m, q) in n.rf.num.terms() {
        let k = m.iter().find(|(w, _)| *w == vv).map_or(0, |(_, e)| *e as usize);
        let rest: Monomial = m.into_iter().filter(|(w, _)| *w != vv).collect();
        let slot = groups.entry(rest).or_default();
        if slot.len() <= k {
            slot.resize(k + 1, Q::zero());
        }
        slot[k] += q;
    }
    let x = Expr::sym(v);
    let mut parts = Vec::new();
    for (m, cs) in groups {
        let mexpr = ctx.poly_expr(&Poly::monomial(&m, Q::one()));
        parts.push(mexpr * ratint(&UPoly::new(cs), &dv, &x));
    }
    Some(normalize(&Expr::recip(ctx.poly_expr(&d_o))) * Expr::add(parts))
}

pub fn upoly_expr(p: &UPoly, x: &Expr) -> Expr {
    Expr::add(
        p.0.iter()
            .enumerate()
            .map(|(i, c)| Expr::num(c.clone()) * Expr::powi(x.clone(), i as i64)),
    )
}

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Antiderivative of `a / d` over Q.
pub fn ratint(a: &UPoly, d: &UPoly, x: &Expr) -> Expr {
    let (q, r) = a.divrem(d);
    let mut out = Vec::new();
    for (i, c) in q.0.iter().enumerate() {
        let k = (i + 1) as i64;
        out.push(Expr::num(c / qi(k)) * Expr::powi(x.clone(), k));
    }
    if r.is_zero() {
        return Expr::add(out);
    }
    let (g, a1, d1) = hermite(&r, d);
    for (b, vj) in g {
        out.push(upoly_expr(&b, x) / upoly_expr(&vj, x));
    }
    if !a1.is_zero() {
        out.push(log_part(&a1, &d1, x));
    }
    Expr::add(out)
}

/// Hermite reduction of a proper fraction: rational part as `B / V^j`
/// pieces, plus `(A, D)` with `D` squarefree.
fn hermite(a: &UPoly, d: &UPoly) -> (Vec<(UPoly, UPoly)>, UPoly, UPoly) {
    let lc = d.lc();
    let mut a = a.scale(&lc.recip());
    let mut dd = d.monic();
    let sf = dd.squarefree();
    let mut g = Vec::new();
    for (idx, vi) in sf.iter().enumerate() {
        let i = idx + 1;
        if i < 2 || vi.deg() <= 0 {
            continue;
        }
        let u = dd.divrem(&vi.pow(i as u32)).0;
        let uv1 = u.mul(&vi.derivative());
        for j in (1..i).rev() {
            let rhs = a.scale(&-qi(j as i64).recip());
            let Some((b, c)) = UPoly::diophantine(&uv1, vi, &rhs) else {
                return (g, a, dd);
            };
            g.push((b.clone(), vi.pow(j as u32)));
            a = c.scale(&-qi(j as i64)).sub(&u.mul(&b.derivative()));
        }
        dd = u.mul(vi);
    }
    (g, a, dd)
}

/// Logarithmic part of `a / d` (`d` squarefree) over rational residues.
fn log_part(a: &UPoly, d: &UPoly, x: &Expr) -> Expr {
    let n = d.deg();
    let dp = d.derivative();
    // R(c) = res(d, a - c d'), interpolated from n + 1 integer values of c.
    let xs: Vec<Q> = (0..=n).map(qi).collect();
    let ys: Vec<Q> = xs
        .iter()
        .map(|c| d.resultant(&a.sub(&dp.scale(c))))
        .collect();
    let r = UPoly::interpolate(&xs, &ys);
    let roots = r.rational_roots().unwrap_or_default();
    let mut out = Vec::new();
    let mut covered = UPoly::constant(Q::one());
    let mut rest_num = a.clone();
    for c in roots {
        let gi = d.gcd(&a.sub(&dp.scale(&c)));
        if gi.deg() <= 0 {
            continue;
        }
        out.push(Expr::num(c.clone()) * Expr::ln(upoly_expr(&gi, x)));
        let cofactor = d.divrem(&gi).0;
        rest_num = rest_num.sub(&gi.derivative().mul(&cofactor).scale(&c));
        covered = covered.mul(&gi);
    }
    if covered.deg() < n {
        let (dr, rem) = d.divrem(&covered);
        let (ar, rem2) = rest_num.divrem(&covered);
        if rem.is_zero() && rem2.is_zero() && !ar.is_zero() {
            out.push(arctan_or_unevaluated(&ar, &dr, x));
        } else if !(rem.is_zero() && rem2.is_zero()) {
            let num = upoly_expr(a, x);
            let den = upoly_expr(d, x);
            return Expr::int_of(normalize(&(num / den)), &var_name(x));
        }
    }
    Expr::add(out)
}

fn var_name(x: &Expr) -> String {
    x.as_name().map(|n| n.to_string()).unwrap_or_default()
}

fn arctan_or_unevaluated(a: &UPoly, d: &UPoly, x: &Expr) -> Expr {
    if d.deg() == 2 && a.deg() <= 1 {
        let lc = d.lc();
        let p = d.coeff(1) / &lc;
        let q = d.coeff(0) / &lc;
        let alpha = a.coeff(1) / &lc;
        let beta = a.coeff(0) / &lc;
        let disc = qi(4) * &q - &p * &p;
        if disc.is_positive() {
            let monic = upoly_expr(&d.monic(), x);
            let root = Expr::sqrt(Expr::num(disc));
            let two = Q::one() + Q::one();
            let log_part = Expr::num(&alpha / &two) * Expr::ln(monic);
            let lin = Expr::num(two.clone()) * x + Expr::num(p.clone());
            let coeff = Expr::num((beta - &alpha * &p / &two) * &two) / &root;
            return log_part + coeff * Expr::elem(Elem::Arctan, lin / root);
        }
    }
    let num = upoly_expr(a, x);
    let den = upoly_expr(d, x);
    Expr::int_of(normalize(&(num / den)), &var_name(x))
}
