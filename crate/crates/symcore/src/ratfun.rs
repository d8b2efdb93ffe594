//! Rational normal form over kernels.
//!
//! An expression is rewritten as `num / den` with `num`, `den` polynomials in
//! kernel variables. Kernels are symbols, parameters and every maximal
//! non-rational subterm (function applications, integrals, symbolic powers,
//! elementary applications), each with its arguments normalized first.
//!
//! Symbolic powers are split by exponent terms so that `x^(a+1) = x^a * x`
//! and `exp(2*x + y) = exp(x)^2 * exp(y)`. Fractional powers become root
//! kernels `R` carrying the relation `R^q = M`, applied after every product;
//! square roots are also cleared from denominators.
//!
//! A kernel is *certified* when it is known to be algebraically independent
//! of all other certified kernels. A nonzero numerator over certified
//! kernels proves the expression nonzero without probing.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SymError};
use crate::expr::{exact_root, Elem, Expr, Node};
use crate::poly::{gcd, Poly};
use crate::Rational as Q;

#[derive(Clone, Debug)]
pub struct Kernel {
    pub expr: Expr,
    /// `(q, M)` for a root kernel with `R^q = M`.
    pub root: Option<(u32, Poly)>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatFun {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun {
    pub fn constant(q: Q) -> RatFun {
        RatFun {
            num: Poly::C(q),
            den: Poly::one(),
        }
    }

    pub fn zero() -> RatFun {
        RatFun::constant(Q::zero())
    }

    pub fn one() -> RatFun {
        RatFun::constant(Q::one())
    }

    pub fn poly(p: Poly) -> RatFun {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Ctx {
    pub kernels: Vec<Kernel>,
    index: HashMap<Expr, u32>,
    has_roots: bool,
    /// Common denominator of the coefficients of each exponent monomial.
    exp_den: HashMap<Expr, i64>,
}

impl Ctx {
    pub fn kernel_expr(&self, v: u32) -> &Expr {
        &self.kernels[v as usize].expr
    }

    pub fn var_of(&self, e: &Expr) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn is_certified(&self, p: &Poly) -> bool {
        p.vars()
            .iter()
            .all(|v| self.kernels[*v as usize].certified)
    }

    fn kernel(&mut self, expr: Expr, certified: bool) -> u32 {
        if let Some(&v) = self.index.get(&expr) {
            return v;
        }
        let v = self.kernels.len() as u32;
        self.kernels.push(Kernel {
            expr: expr.clone(),
            root: None,
            certified,
        });
        self.index.insert(expr, v);
        v
    }

    fn root_kernel(&mut self, expr: Expr, q: u32, m: Poly) -> u32 {
        if let Some(&v) = self.index.get(&expr) {
            return v;
        }
        let v = self.kernels.len() as u32;
        self.kernels.push(Kernel {
            expr: expr.clone(),
            root: Some((q, m)),
            certified: false,
        });
        self.index.insert(expr, v);
        self.has_roots = true;
        v
    }

    /// Exponentials `exp(c m)` with the same monomial `m` become integer
    /// powers of a single kernel `exp(m / L)`.
    fn scan_exps(&mut self, e: &Expr) {
        let mut args = Vec::new();
        e.walk(&mut |s| {
            if let Node::Elem(Elem::Exp, u) = s.node() {
                args.push(u.clone());
            }
        });
        for u in args {
            let Ok((nu, _)) = normalize_full(&u) else { continue };
            for t in nu.terms() {
                let (c, m) = t.split_coeff();
                let Some(d) = c.denom().to_i64() else { continue };
                let l = self.exp_den.entry(m).or_insert(1);
                *l = l.lcm(&d);
            }
        }
    }

    pub fn var(&mut self, e: &Expr, certified: bool) -> RatFun {
        RatFun::poly(Poly::var(self.kernel(e.clone(), certified)))
    }

    // ---- arithmetic -----------------------------------------------------

    pub fn reduce(&self, p: &Poly) -> Poly {
        if !self.has_roots {
            return p.clone();
        }
        let mut p = p.clone();
        for (v, k) in self.kernels.iter().enumerate().rev() {
            if let Some((q, m)) = &k.root {
                if p.deg(v as u32) >= *q {
                    p = p.reduce_power(v as u32, *q, m);
                }
            }
        }
        p
    }

    fn cancel(&self, num: Poly, den: Poly) -> Result<RatFun> {
        let num = self.reduce(&num);
        let den = self.reduce(&den);
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFun::zero());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let c = den.lnc().recip();
        Ok(RatFun {
            num: num.scale(&c),
            den: den.scale(&c),
        })
    }

    pub fn add(&self, a: &RatFun, b: &RatFun) -> Result<RatFun> {
        if a.is_zero() {
            return Ok(b.clone());
        }
        if b.is_zero() {
            return Ok(a.clone());
        }
        if a.den == b.den {
            if a.den.is_one() {
                return Ok(RatFun::poly(a.num.add(&b.num)));
            }
            return self.cancel(a.num.add(&b.num), a.den.clone());
        }
        let g = gcd(&a.den, &b.den);
        let ad = a.den.div_exact(&g).unwrap();
        let bd = b.den.div_exact(&g).unwrap();
        let num = a.num.mul(&bd).add(&b.num.mul(&ad));
        self.cancel(num, ad.mul(&bd).mul(&g))
    }

    pub fn neg(&self, a: &RatFun) -> RatFun {
        RatFun {
            num: a.num.neg(),
            den: a.den.clone(),
        }
    }

    pub fn sub(&self, a: &RatFun, b: &RatFun) -> Result<RatFun> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RatFun, b: &RatFun) -> Result<RatFun> {
        if a.is_zero() || b.is_zero() {
            return Ok(RatFun::zero());
        }
        if a.den.is_one() && b.den.is_one() && !self.has_roots {
            return Ok(RatFun::poly(a.num.mul(&b.num)));
        }
        let g1 = gcd(&a.num, &b.den);
        let g2 = gcd(&b.num, &a.den);
        let num = a.num.div_exact(&g1).unwrap().mul(&b.num.div_exact(&g2).unwrap());
        let den = a.den.div_exact(&g2).unwrap().mul(&b.den.div_exact(&g1).unwrap());
        if self.has_roots {
            return self.cancel(num, den);
        }
        let c = den.lnc().recip();
        Ok(RatFun {
            num: num.scale(&c),
            den: den.scale(&c),
        })
    }

    pub fn inv(&self, a: &RatFun) -> Result<RatFun> {
        let a_num = self.reduce(&a.num);
        if a_num.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        let c = a_num.lnc().recip();
        Ok(RatFun {
            num: a.den.scale(&c),
            den: a_num.scale(&c),
        })
    }

    pub fn powi(&self, a: &RatFun, n: i64) -> Result<RatFun> {
        if n == 0 {
            return Ok(RatFun::one());
        }
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let k = n.unsigned_abs() as u32;
        if self.has_roots {
            let mut acc = RatFun::one();
            for _ in 0..k {
                acc = self.mul(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(RatFun {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    // ---- conversion -----------------------------------------------------

    pub fn conv(&mut self, e: &Expr) -> Result<RatFun> {
        match e.node() {
            Node::Num(q) => Ok(RatFun::constant(q.clone())),
            Node::Sym(_) | Node::Param(_) => Ok(self.var(e, true)),
            Node::Add(ts) => {
                let mut acc = RatFun::zero();
                for t in ts {
                    let r = self.conv(t)?;
                    acc = self.add(&acc, &r)?;
                }
                Ok(acc)
            }
            Node::Mul(fs) => {
                let mut acc = RatFun::one();
                for f in fs {
                    let r = self.conv(f)?;
                    acc = self.mul(&acc, &r)?;
                }
                Ok(acc)
            }
            Node::Pow(b, x) => match x.node() {
                Node::Num(q) if q.is_integer() => {
                    let rb = self.conv(b)?;
                    self.powi(&rb, q.to_integer().to_i64().expect("exponent fits i64"))
                }
                Node::Num(q) => {
                    let rb = self.conv(b)?;
                    self.frac_pow(&rb, q)
                }
                _ => self.gen_pow(b, x),
            },
            Node::Elem(Elem::Exp, u) => self.conv_exp(u),
            Node::Elem(Elem::Ln, z) => {
                let (nz, _) = normalize_full(z)?;
                if nz.is_zero_literal() {
                    return Err(SymError::DivisionByZero);
                }
                let l = Expr::ln(nz.clone());
                if !matches!(l.node(), Node::Elem(Elem::Ln, _)) {
                    return self.conv(&l);
                }
                let cert = matches!(nz.node(), Node::Sym(_));
                Ok(self.var(&l, cert))
            }
            Node::Elem(k, a) => {
                let (na, _) = normalize_full(a)?;
                let ex = Expr::elem(*k, na);
                if !matches!(ex.node(), Node::Elem(..)) {
                    return self.conv(&ex);
                }
                Ok(self.var(&ex, false))
            }
            Node::Func { name, order, arg } => {
                let (na, cert) = normalize_full(arg)?;
                let has_sym = na.any(&|s| matches!(s.node(), Node::Sym(_)));
                let ex = Expr::func(name, *order, na);
                Ok(self.var(&ex, cert && has_sym))
            }
            Node::Int { integrand, var } => {
                let (nh, _) = normalize_full(integrand)?;
                let ex = Expr::int_of(nh, var);
                if ex.is_zero_literal() {
                    return Ok(RatFun::zero());
                }
                Ok(self.var(&ex, false))
            }
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => {
                let (nu, _) = normalize_full(upper)?;
                let mut taken = integrand.free_names();
                taken.remove(dummy);
                taken.extend(nu.free_names());
                let canon = std::iter::once("z".to_string())
                    .chain((1..).map(|i| format!("z{i}")))
                    .find(|c| !taken.iter().any(|t| &**t == c.as_str()))
                    .unwrap();
                let h = if **dummy == *canon {
                    integrand.clone()
                } else {
                    integrand.subst(dummy, &Expr::sym(&canon))
                };
                let (nh, _) = normalize_full(&h)?;
                let ex = Expr::int_to(nh, &canon, nu);
                if ex.is_zero_literal() {
                    return Ok(RatFun::zero());
                }
                Ok(self.var(&ex, false))
            }
        }
    }

    /// `base^(p/q)` for a rational function base.
    fn frac_pow(&mut self, rb: &RatFun, e: &Q) -> Result<RatFun> {
        if rb.is_zero() {
            return if e.is_positive() {
                Ok(RatFun::zero())
            } else {
                Err(SymError::DivisionByZero)
            };
        }
        let p = e.numer().to_i64().expect("exponent fits i64");
        let q = e.denom().to_u32().expect("root index fits u32");
        // (N/D)^(1/q) = (N * D^(q-1))^(1/q) / D
        let m = rb.num.mul(&rb.den.pow(q - 1));
        let root = self.root_of(&m, q)?;
        let den_inv = self.inv(&RatFun::poly(rb.den.clone()))?;
        let base = self.mul(&root, &den_inv)?;
        self.powi(&base, p)
    }

    /// `m^(1/q)` for a polynomial `m`.
    fn root_of(&mut self, m: &Poly, q: u32) -> Result<RatFun> {
        let c = m.numeric_content().abs();
        let mut rest = m.scale(&c.recip());
        let mut out = self.num_root(&c, q)?;
        for v in rest.vars() {
            let k = rest.min_deg(v);
            if k > 0 {
                rest = rest.div_exact(&Poly::var(v).pow(k)).unwrap();
                let r = self.var_frac_pow(v, &Q::new(BigInt::from(k), BigInt::from(q)))?;
                out = self.mul(&out, &r)?;
            }
        }
        if let Some(s) = rest.as_const() {
            let r = self.num_root(s, q)?;
            return self.mul(&out, &r);
        }
        let key = Expr::pow(self.poly_expr(&rest), Expr::rat(1, q as i64));
        let v = self.root_kernel(key, q, rest);
        self.mul(&out, &RatFun::poly(Poly::var(v)))
    }

    /// Rational `c^(1/q)`.
    fn num_root(&mut self, c: &Q, q: u32) -> Result<RatFun> {
        if c.is_zero() {
            return Ok(RatFun::zero());
        }
        if c.is_negative() {
            if q % 2 == 1 {
                let r = self.num_root(&-c, q)?;
                return Ok(self.neg(&r));
            }
            let key = Expr::pow(Expr::num(c.clone()), Expr::rat(1, q as i64));
            let v = self.root_kernel(key, q, Poly::C(c.clone()));
            return Ok(RatFun::poly(Poly::var(v)));
        }
        if let Some(r) = exact_root(c, q) {
            return Ok(RatFun::constant(r));
        }
        // c^(1/q) = (n * d^(q-1))^(1/q) / d, then pull out perfect q-th powers.
        let d = c.denom().clone();
        let mut n = c.numer() * num_traits::pow(d.clone(), q as usize - 1);
        let mut outside = BigInt::one();
        let mut p = BigInt::from(2);
        while p < BigInt::from(1000) && !n.is_one() {
            let pq = num_traits::pow(p.clone(), q as usize);
            while (&n % &pq).is_zero() {
                n /= &pq;
                outside *= &p;
            }
            p += 1;
        }
        let scale = Q::new(outside, d);
        if n.is_one() {
            return Ok(RatFun::constant(scale));
        }
        let nq = Q::from_integer(n);
        let key = Expr::pow(Expr::num(nq.clone()), Expr::rat(1, q as i64));
        let v = self.root_kernel(key, q, Poly::C(nq));
        Ok(RatFun::poly(Poly::var(v).scale(&scale)))
    }

    /// `x_v^c` for rational `c`, introducing a root kernel of `x_v` if needed.
    fn var_frac_pow(&mut self, v: u32, c: &Q) -> Result<RatFun> {
        let base = RatFun::poly(Poly::var(v));
        if c.is_integer() {
            return self.powi(&base, c.to_integer().to_i64().unwrap());
        }
        let p = c.numer().to_i64().unwrap();
        let q = c.denom().to_u32().unwrap();
        let whole = p.div_euclid(q as i64);
        let frac = p.rem_euclid(q as i64);
        let key = Expr::pow(self.kernel_expr(v).clone(), Expr::rat(1, q as i64));
        let r = self.root_kernel(key, q, Poly::var(v));
        let a = self.powi(&base, whole)?;
        let b = RatFun::poly(Poly::var(r).pow(frac as u32));
        self.mul(&a, &b)
    }

    /// `b^x` for a non-numeric exponent.
    fn gen_pow(&mut self, b: &Expr, x: &Expr) -> Result<RatFun> {
        let (nx, _) = normalize_full(x)?;
        if nx.is_num() {
            return self.conv(&Expr::pow(b.clone(), nx));
        }
        let (nb, _) = normalize_full(b)?;
        match nb.node() {
            Node::Num(q) if q.is_one() => return Ok(RatFun::one()),
            Node::Num(q) if q.is_zero() => return Ok(RatFun::zero()),
            Node::Mul(fs) => {
                let mut acc = RatFun::one();
                for f in fs {
                    let r = self.gen_pow(f, &nx)?;
                    acc = self.mul(&acc, &r)?;
                }
                return Ok(acc);
            }
            Node::Pow(b0, e0) => {
                return self.gen_pow(&b0.clone(), &Expr::mul([e0.clone(), nx]));
            }
            Node::Elem(Elem::Exp, u) => {
                return self.conv_exp(&Expr::mul([u.clone(), nx]));
            }
            _ => {}
        }
        let mut acc = RatFun::one();
        for t in nx.terms() {
            let (c, m) = t.split_coeff();
            let r = if m.is_one_literal() {
                self.conv(&Expr::pow(nb.clone(), Expr::num(c)))?
            } else {
                let cert = matches!(nb.node(), Node::Sym(_)) && is_param_monomial(&m);
                let v = self.kernel(Expr::pow(nb.clone(), m), cert);
                self.var_frac_pow(v, &c)?
            };
            acc = self.mul(&acc, &r)?;
        }
        Ok(acc)
    }

    fn conv_exp(&mut self, u: &Expr) -> Result<RatFun> {
        let (nu, _) = normalize_full(u)?;
        let mut acc = RatFun::one();
        for t in nu.terms() {
            let ex = Expr::exp(t);
            let r = match ex.node() {
                Node::Elem(Elem::Exp, arg) => {
                    let (c, m) = arg.split_coeff();
                    let cert = m.is_one_literal() || is_symbol_monomial(&m);
                    let l = self.exp_den.get(&m).copied().unwrap_or(1);
                    let base = Expr::exp(Expr::mul([Expr::rat(1, l), m]));
                    let v = self.kernel(base, cert);
                    self.var_frac_pow(v, &(c * Q::from_integer(BigInt::from(l))))?
                }
                _ => self.conv(&ex)?,
            };
            acc = self.mul(&acc, &r)?;
        }
        Ok(acc)
    }

    /// Apply root relations and clear square roots from the denominator.
    pub fn finish(&self, rf: RatFun) -> Result<RatFun> {
        if !self.has_roots {
            return Ok(rf);
        }
        let mut num = self.reduce(&rf.num);
        let mut den = self.reduce(&rf.den);
        for (v, k) in self.kernels.iter().enumerate().rev() {
            let v = v as u32;
            if !matches!(k.root, Some((2, _))) || !den.contains_var(v) {
                continue;
            }
            let cs = den.coeffs_in(v);
            if cs.len() != 2 {
                continue;
            }
            let conj = cs[0].sub(&cs[1].mul(&Poly::var(v)));
            num = self.reduce(&num.mul(&conj));
            den = self.reduce(&den.mul(&conj));
        }
        self.cancel(num, den)
    }

    // ---- back to expressions ----------------------------------------------

    pub fn poly_expr(&self, p: &Poly) -> Expr {
        Expr::add(p.terms().into_iter().map(|(m, q)| {
            let mut fs = vec![Expr::num(q)];
            for (v, e) in m {
                fs.push(Expr::powi(self.kernel_expr(v).clone(), e as i64));
            }
            Expr::mul(fs)
        }))
    }

    pub fn to_expr(&self, rf: &RatFun) -> Expr {
        if rf.den.is_one() {
            return self.poly_expr(&rf.num);
        }
        if let Some(d) = rf.den.as_const() {
            return self.poly_expr(&rf.num.scale(&d.recip()));
        }
        // Scale so that the coefficient of the last denominator term (ordered by
        // its non-numeric part) is one; this is independent of kernel numbering.
        let mut terms: Vec<(Expr, Q)> = rf
            .den
            .terms()
            .into_iter()
            .map(|(m, q)| {
                let rest = Expr::mul(
                    m.iter()
                        .map(|(v, e)| Expr::powi(self.kernel_expr(*v).clone(), *e as i64)),
                );
                let (c, rest) = rest.split_coeff();
                (rest, q * c)
            })
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let c = terms.last().unwrap().1.recip();
        let num = self.poly_expr(&rf.num.scale(&c));
        let den = self.poly_expr(&rf.den.scale(&c));
        Expr::mul([num, Expr::recip(den)])
    }
}

/// Product of parameters with integer exponents.
fn is_param_monomial(m: &Expr) -> bool {
    m.factors().iter().all(|f| match f.node() {
        Node::Param(_) => true,
        Node::Pow(b, e) => matches!(b.node(), Node::Param(_)) && e.is_integer_literal(),
        _ => false,
    })
}

/// Product of symbols and parameters with integer exponents.
fn is_symbol_monomial(m: &Expr) -> bool {
    m.factors().iter().all(|f| match f.node() {
        Node::Param(_) | Node::Sym(_) => true,
        Node::Pow(b, e) => {
            matches!(b.node(), Node::Param(_) | Node::Sym(_)) && e.is_integer_literal()
        }
        _ => false,
    })
}

/// The expression in normal form together with its kernel context.
#[derive(Clone, Debug)]
pub struct Normal {
    pub ctx: Ctx,
    pub rf: RatFun,
}

impl Normal {
    pub fn of(e: &Expr) -> Result<Normal> {
        let mut ctx = Ctx::default();
        ctx.scan_exps(e);
        let rf = ctx.conv(e)?;
        let rf = ctx.finish(rf)?;
        Ok(Normal { ctx, rf })
    }

    pub fn expr(&self) -> Expr {
        self.ctx.to_expr(&self.rf)
    }

    pub fn num_expr(&self) -> Expr {
        self.ctx.poly_expr(&self.rf.num)
    }

    pub fn den_expr(&self) -> Expr {
        self.ctx.poly_expr(&self.rf.den)
    }

    pub fn is_zero(&self) -> bool {
        self.rf.num.is_zero()
    }

    /// Every kernel in the numerator and denominator is certified independent.
    pub fn certified(&self) -> bool {
        self.ctx.is_certified(&self.rf.num) && self.ctx.is_certified(&self.rf.den)
    }
}

const CACHE_LIMIT: usize = 200_000;

thread_local! {
    static CACHE: RefCell<HashMap<Expr, Result<(Expr, bool)>>> = RefCell::new(HashMap::new());
}

/// Normal form plus whether all of its kernels are certified.
pub fn normalize_full(e: &Expr) -> Result<(Expr, bool)> {
    if matches!(e.node(), Node::Num(_) | Node::Sym(_) | Node::Param(_)) {
        return Ok((e.clone(), true));
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(e).cloned()) {
        return hit;
    }
    let out = Normal::of(e).map(|n| (n.expr(), n.certified()));
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > CACHE_LIMIT {
            c.clear();
        }
        c.insert(e.clone(), out.clone());
    });
    out
}

/// Canonical form; expressions that divide by zero are returned unchanged.
pub fn normalize(e: &Expr) -> Expr {
    normalize_full(e).map(|r| r.0).unwrap_or_else(|_| e.clone())
}

pub fn try_normalize(e: &Expr) -> Result<Expr> {
    normalize_full(e).map(|r| r.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::sym("x")
    }
    fn y() -> Expr {
        Expr::sym("y")
    }

    #[test]
    fn cancels_common_factor() {
        let e = (y() * y() - 1) / (y() - 1);
        assert_eq!(normalize(&e), y() + 1);
    }

    #[test]
    fn cancels_function_kernels() {
        let a = Expr::param("a");
        let xa = Expr::pow(x(), a.clone());
        let w = &xa * y();
        let g2 = Expr::func("g", 2, w.clone());
        let g3 = Expr::func("g", 3, w.clone());
        let e = (&g2 * &xa) / (&xa * &xa * &g3);
        let expect = g2 / (xa * g3);
        assert_eq!(normalize(&e), normalize(&expect));
        assert!(Normal::of(&e).unwrap().certified());
    }

    #[test]
    fn example_three_ratio() {
        let (a, b) = (Expr::param("a"), Expr::param("b"));
        let ex = Expr::exp(&a * x() * y());
        let xa = Expr::pow(x(), a.clone());
        let num = &ex * x() * x() * &a * &a * &b * &xa;
        let den = &ex * Expr::powi(x(), 3) * Expr::powi(a.clone(), 3) * &b * &xa;
        assert_eq!(normalize(&(num / den)), Expr::recip(a * x()));
    }

    #[test]
    fn symbolic_exponent_splitting() {
        let a = Expr::param("a");
        let e = Expr::pow(x(), &a + 1) - x() * Expr::pow(x(), a.clone());
        assert!(normalize(&e).is_zero_literal());
        let e = Expr::exp(x() * 2 + y()) - Expr::powi(Expr::exp(x()), 2) * Expr::exp(y());
        assert!(normalize(&e).is_zero_literal());
    }

    #[test]
    fn square_roots_reduce() {
        let s = Expr::sqrt(x() + 1);
        let e = &s * &s * &s - (x() + 1) * &s;
        assert!(normalize(&e).is_zero_literal());
        let e = Expr::recip(s.clone()) - &s / (x() + 1);
        assert!(normalize(&e).is_zero_literal());
        let e = Expr::sqrt(Expr::int(8)) - Expr::sqrt(Expr::int(2)) * 2;
        assert!(normalize(&e).is_zero_literal());
    }

    #[test]
    fn idempotent_on_quotients() {
        let e = (x() * 2 + 4) / (x() * x() * 3 - y());
        let n1 = normalize(&e);
        assert_eq!(normalize(&n1), n1);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let s = Expr::sqrt(x());
        let hidden = &s * &s - x();
        assert!(try_normalize(&Expr::recip(hidden)).is_err());
    }
}
