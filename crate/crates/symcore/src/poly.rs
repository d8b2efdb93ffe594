//! Sparse-recursive multivariate polynomials over Q.
//!
//! `V(v, cs)` is `sum cs[i] * x_v^i` where every `cs[i]` only mentions
//! variables with index below `v`. Constructors keep `cs.len() >= 2` with a
//! nonzero last coefficient, so structural equality is polynomial equality.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::Rational as Q;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Poly {
    C(Q),
    V(u32, Vec<Poly>),
}

/// Exponent vector as sorted `(var, exp)` pairs.
pub type Monomial = Vec<(u32, u32)>;

impl Poly {
    pub fn zero() -> Poly {
        Poly::C(Q::zero())
    }

    pub fn one() -> Poly {
        Poly::C(Q::one())
    }

    pub fn constant(q: Q) -> Poly {
        Poly::C(q)
    }

    pub fn var(v: u32) -> Poly {
        Poly::V(v, vec![Poly::zero(), Poly::one()])
    }

    fn mk(v: u32, mut cs: Vec<Poly>) -> Poly {
        while cs.last().is_some_and(Poly::is_zero) {
            cs.pop();
        }
        match cs.len() {
            0 => Poly::zero(),
            1 => cs.pop().unwrap(),
            _ => Poly::V(v, cs),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Poly::C(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Poly::C(q) if q.is_one())
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self {
            Poly::C(q) => Some(q),
            _ => None,
        }
    }

    pub fn main_var(&self) -> Option<u32> {
        match self {
            Poly::C(_) => None,
            Poly::V(v, _) => Some(*v),
        }
    }

    pub fn contains_var(&self, v: u32) -> bool {
        match self {
            Poly::C(_) => false,
            Poly::V(w, cs) => *w == v || (*w > v && cs.iter().any(|c| c.contains_var(v))),
        }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<u32>) {
        if let Poly::V(v, cs) = self {
            out.push(*v);
            for c in cs {
                c.collect_vars(out);
            }
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, q: &Q) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        match self {
            Poly::C(c) => Poly::C(c * q),
            Poly::V(v, cs) => Poly::V(*v, cs.iter().map(|c| c.scale(q)).collect()),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        match (self, o) {
            (Poly::C(a), Poly::C(b)) => Poly::C(a + b),
            (Poly::V(va, ca), Poly::V(vb, cb)) if va == vb => {
                let n = ca.len().max(cb.len());
                let cs = (0..n)
                    .map(|i| match (ca.get(i), cb.get(i)) {
                        (Some(x), Some(y)) => x.add(y),
                        (Some(x), None) | (None, Some(x)) => x.clone(),
                        (None, None) => unreachable!(),
                    })
                    .collect();
                Poly::mk(*va, cs)
            }
            _ => {
                let (hi, lo) = if self.main_var() > o.main_var() {
                    (self, o)
                } else {
                    (o, self)
                };
                let Poly::V(v, cs) = hi else { unreachable!() };
                let mut cs = cs.clone();
                cs[0] = cs[0].add(lo);
                Poly::mk(*v, cs)
            }
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        match (self, o) {
            (Poly::C(a), _) => o.scale(a),
            (_, Poly::C(b)) => self.scale(b),
            (Poly::V(va, ca), Poly::V(vb, cb)) if va == vb => {
                let mut cs = vec![Poly::zero(); ca.len() + cb.len() - 1];
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        if !y.is_zero() {
                            cs[i + j] = cs[i + j].add(&x.mul(y));
                        }
                    }
                }
                Poly::mk(*va, cs)
            }
            (Poly::V(va, ca), Poly::V(vb, _)) => {
                if va > vb {
                    Poly::mk(*va, ca.iter().map(|c| c.mul(o)).collect())
                } else {
                    o.mul(self)
                }
            }
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Degree in `v`.
    pub fn deg(&self, v: u32) -> u32 {
        match self {
            Poly::C(_) => 0,
            Poly::V(w, cs) if *w == v => (cs.len() - 1) as u32,
            Poly::V(w, cs) if *w > v => cs.iter().map(|c| c.deg(v)).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Total degree.
    pub fn total_deg(&self) -> u32 {
        match self {
            Poly::C(_) => 0,
            Poly::V(_, cs) => cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| i as u32 + c.total_deg())
                .max()
                .unwrap_or(0),
        }
    }

    /// Coefficients in `v`; they may mention variables above `v`.
    pub fn coeffs_in(&self, v: u32) -> Vec<Poly> {
        match self {
            Poly::V(w, cs) if *w == v => cs.clone(),
            Poly::V(w, cs) if *w > v => {
                let sub: Vec<Vec<Poly>> = cs.iter().map(|c| c.coeffs_in(v)).collect();
                let n = sub.iter().map(Vec::len).max().unwrap_or(1);
                (0..n)
                    .map(|j| {
                        Poly::mk(
                            *w,
                            sub.iter()
                                .map(|s| s.get(j).cloned().unwrap_or_else(Poly::zero))
                                .collect(),
                        )
                    })
                    .collect()
            }
            _ => vec![self.clone()],
        }
    }

    pub fn from_coeffs_in(v: u32, cs: &[Poly]) -> Poly {
        let x = Poly::var(v);
        let mut acc = Poly::zero();
        for c in cs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        acc
    }

    /// Leading coefficient in the main variable.
    pub fn lc(&self) -> Poly {
        match self {
            Poly::C(_) => self.clone(),
            Poly::V(_, cs) => cs.last().unwrap().clone(),
        }
    }

    /// The rational coefficient reached by following leading coefficients down.
    pub fn lnc(&self) -> Q {
        match self {
            Poly::C(q) => q.clone(),
            Poly::V(_, cs) => cs.last().unwrap().lnc(),
        }
    }

    /// Scale so the leading numeric coefficient is one.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lnc().recip())
    }

    /// Exact division; `None` if `o` does not divide `self`.
    pub fn div_exact(&self, o: &Poly) -> Option<Poly> {
        if o.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Poly::C(b) = o {
            return Some(self.scale(&b.recip()));
        }
        let v = o.main_var().unwrap();
        match self.main_var() {
            None => None,
            Some(w) if w < v => None,
            Some(w) if w > v => {
                let Poly::V(_, cs) = self else { unreachable!() };
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    out.push(c.div_exact(o)?);
                }
                Some(Poly::mk(w, out))
            }
            Some(_) => {
                let db = o.deg(v);
                let lb = o.lc();
                let mut r = self.clone();
                let mut q = Poly::zero();
                while !r.is_zero() && r.main_var() == Some(v) && r.deg(v) >= db {
                    let dr = r.deg(v);
                    let t = r.lc().div_exact(&lb)?;
                    let t = t.mul(&Poly::var(v).pow(dr - db));
                    q = q.add(&t);
                    r = r.sub(&t.mul(o));
                }
                if r.is_zero() {
                    Some(q)
                } else {
                    None
                }
            }
        }
    }

    /// Pseudo-remainder of `self` by `o` with respect to `o`'s main variable.
    fn prem(&self, o: &Poly, v: u32) -> Poly {
        let db = o.deg(v);
        let lb = o.coeffs_in(v).pop().unwrap();
        let mut r = self.clone();
        while !r.is_zero() && r.deg(v) >= db {
            let dr = r.deg(v);
            let lr = r.coeffs_in(v).pop().unwrap();
            let t = lr.mul(&Poly::var(v).pow(dr - db));
            r = r.mul(&lb).sub(&t.mul(o));
        }
        r
    }

    /// Content with respect to the main variable (a polynomial in lower variables).
    pub fn content(&self) -> Poly {
        match self {
            Poly::C(_) => self.clone(),
            Poly::V(_, cs) => {
                let mut g = Poly::zero();
                for c in cs.iter().rev() {
                    g = gcd(&g, c);
                    if g.is_one() {
                        break;
                    }
                }
                g
            }
        }
    }

    pub fn primitive_part(&self) -> Poly {
        let c = self.content();
        self.div_exact(&c).expect("content divides")
    }

    /// Largest rational `c` with `self / c` having integer coprime coefficients
    /// and positive leading numeric coefficient.
    pub fn numeric_content(&self) -> Q {
        let mut num = num_bigint::BigInt::zero();
        let mut den = num_bigint::BigInt::one();
        self.for_each_coeff(&mut |q| {
            num = num.gcd(q.numer());
            den = den.lcm(q.denom());
        });
        if num.is_zero() {
            return Q::one();
        }
        let c = Q::new(num, den);
        if self.lnc().is_negative() {
            -c
        } else {
            c
        }
    }

    pub fn for_each_coeff(&self, f: &mut dyn FnMut(&Q)) {
        match self {
            Poly::C(q) => {
                if !q.is_zero() {
                    f(q)
                }
            }
            Poly::V(_, cs) => {
                for c in cs {
                    c.for_each_coeff(f);
                }
            }
        }
    }

    /// All terms as (monomial, coefficient), monomial variables ascending.
    pub fn terms(&self) -> Vec<(Monomial, Q)> {
        let mut out = Vec::new();
        self.collect_terms(&mut Vec::new(), &mut out);
        for (m, _) in out.iter_mut() {
            m.sort_unstable();
        }
        out
    }

    fn collect_terms(&self, prefix: &mut Monomial, out: &mut Vec<(Monomial, Q)>) {
        match self {
            Poly::C(q) => {
                if !q.is_zero() {
                    out.push((prefix.clone(), q.clone()));
                }
            }
            Poly::V(v, cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        prefix.push((*v, i as u32));
                    }
                    c.collect_terms(prefix, out);
                    if i > 0 {
                        prefix.pop();
                    }
                }
            }
        }
    }

    pub fn from_terms(terms: &[(Monomial, Q)]) -> Poly {
        let mut acc = Poly::zero();
        for (m, q) in terms {
            acc = acc.add(&Poly::monomial(m, q.clone()));
        }
        acc
    }

    pub fn monomial(m: &[(u32, u32)], q: Q) -> Poly {
        let mut p = Poly::C(q);
        for (v, e) in m {
            p = p.mul(&Poly::var(*v).pow(*e));
        }
        p
    }

    pub fn num_terms(&self) -> usize {
        match self {
            Poly::C(q) => usize::from(!q.is_zero()),
            Poly::V(_, cs) => cs.iter().map(Poly::num_terms).sum(),
        }
    }

    /// Reduce with the relation `x_v^q = m`, where `m` only mentions variables below `v`.
    pub fn reduce_power(&self, v: u32, q: u32, m: &Poly) -> Poly {
        match self {
            Poly::C(_) => self.clone(),
            Poly::V(w, cs) if *w > v => {
                Poly::mk(*w, cs.iter().map(|c| c.reduce_power(v, q, m)).collect())
            }
            Poly::V(w, cs) if *w == v => {
                let q = q as usize;
                if cs.len() <= q {
                    return self.clone();
                }
                let mut cs = cs.clone();
                for i in (q..cs.len()).rev() {
                    let top = std::mem::replace(&mut cs[i], Poly::zero());
                    if !top.is_zero() {
                        cs[i - q] = cs[i - q].add(&top.mul(m));
                    }
                }
                cs.truncate(q);
                Poly::mk(v, cs)
            }
            _ => self.clone(),
        }
    }

    /// Substitute `x_v := r`.
    pub fn subst(&self, v: u32, r: &Poly) -> Poly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let cs = self.coeffs_in(v);
        let mut acc = Poly::zero();
        for c in cs.iter().rev() {
            acc = acc.mul(r).add(c);
        }
        acc
    }

    pub fn diff(&self, v: u32) -> Poly {
        let cs = self.coeffs_in(v);
        if cs.len() <= 1 {
            return Poly::zero();
        }
        let ds: Vec<Poly> = cs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Q::from_integer((i as i64).into())))
            .collect();
        Poly::from_coeffs_in(v, &ds)
    }

    /// Exponent of `v` dividing every term.
    pub fn min_deg(&self, v: u32) -> u32 {
        let cs = self.coeffs_in(v);
        cs.iter().position(|c| !c.is_zero()).unwrap_or(0) as u32
    }

    pub fn eval_map<T: Clone>(
        &self,
        vals: &BTreeMap<u32, T>,
        from_q: &dyn Fn(&Q) -> T,
        add: &dyn Fn(T, T) -> T,
        mul: &dyn Fn(T, T) -> T,
    ) -> T {
        match self {
            Poly::C(q) => from_q(q),
            Poly::V(v, cs) => {
                let x = vals[v].clone();
                let mut acc = cs.last().unwrap().eval_map(vals, from_q, add, mul);
                for c in cs.iter().rev().skip(1) {
                    acc = add(mul(acc, x.clone()), c.eval_map(vals, from_q, add, mul));
                }
                acc
            }
        }
    }
}

/// Greatest common divisor, normalized to leading numeric coefficient one.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.as_const().is_some() || b.as_const().is_some() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let va = a.main_var().unwrap();
    let vb = b.main_var().unwrap();
    if va > vb {
        return gcd(&a.content(), b);
    }
    if vb > va {
        return gcd(a, &b.content());
    }
    let v = va;
    let ca = a.content();
    let cb = b.content();
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.deg(v) < q.deg(v) {
        std::mem::swap(&mut p, &mut q);
    }
    // Cheap exits: one divides the other, or an image is coprime.
    if p.div_exact(&q).is_some() {
        return c.mul(&q).monic();
    }
    if coprime_image(&p, &q, v) {
        return c.monic();
    }
    loop {
        let r = p.prem(&q, v);
        if r.is_zero() {
            break;
        }
        if r.deg(v) == 0 || r.main_var() != Some(v) {
            q = Poly::one();
            break;
        }
        p = q;
        q = r.primitive_part();
        q = q.scale(&q.numeric_content().recip());
    }
    let g = if q.main_var() == Some(v) {
        q.primitive_part()
    } else {
        Poly::one()
    };
    c.mul(&g).monic()
}

/// True when `p` and `q` are certainly coprime in `v`: their images modulo a
/// prime at a point of the other variables keep their degrees and share no factor.
fn coprime_image(p: &Poly, q: &Poly, v: u32) -> bool {
    const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];
    let mut vars: Vec<u32> = p.vars().into_iter().chain(q.vars()).filter(|w| *w != v).collect();
    vars.sort_unstable();
    vars.dedup();
    for (attempt, m) in PRIMES.iter().copied().enumerate() {
        let vals: BTreeMap<u32, Option<u64>> = vars
            .iter()
            .enumerate()
            .map(|(i, w)| (*w, Some((1_000_003 * (i as u64 + 1) + 7_919 * attempt as u64) % m)))
            .collect();
        let image = |f: &Poly| -> Option<Vec<u64>> {
            f.coeffs_in(v)
                .iter()
                .map(|c| {
                    c.eval_map(
                        &vals,
                        &|q| mod_q(q, m),
                        &|a, b| Some((a? + b?) % m),
                        &|a, b| Some(mul_mod(a?, b?, m)),
                    )
                })
                .collect()
        };
        let (Some(ip), Some(iq)) = (image(p), image(q)) else {
            continue;
        };
        if ip.last() == Some(&0) || iq.last() == Some(&0) {
            continue;
        }
        return gcd_mod(ip, iq, m) == 0;
    }
    false
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn mod_q(q: &Q, m: u64) -> Option<u64> {
    let big = num_bigint::BigInt::from(m);
    let red = |n: &num_bigint::BigInt| -> u64 {
        let r = n.mod_floor(&big);
        r.to_u64_digits().1.first().copied().unwrap_or(0)
    };
    let d = red(q.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(red(q.numer()), pow_mod(d, m - 2, m), m))
}

/// Degree of the gcd of two dense polynomials over `Z/m`.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, m: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), m - 2, m);
        while a.len() >= b.len() {
            let k = mul_mod(*a.last().unwrap(), inv, m);
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                let t = mul_mod(k, *c, m);
                a[shift + i] = (a[shift + i] + m - t) % m;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Squarefree decomposition: `p = c * f[0] * f[1]^2 * f[2]^3 * ...` for a
/// rational constant `c`.
pub fn squarefree(p: &Poly) -> Vec<Poly> {
    let Some(v) = p.main_var() else {
        return Vec::new();
    };
    let cont = p.content();
    let pp = p.div_exact(&cont).expect("content divides");
    let mut out = yun(&pp, v);
    for (i, f) in squarefree(&cont).into_iter().enumerate() {
        if out.len() <= i {
            out.resize(i + 1, Poly::one());
        }
        out[i] = out[i].mul(&f);
    }
    out
}

fn yun(b: &Poly, v: u32) -> Vec<Poly> {
    let db = b.diff(v);
    let a = gcd(b, &db);
    let mut c = b.div_exact(&a).expect("gcd divides");
    let mut d = db.div_exact(&a).expect("gcd divides").sub(&c.diff(v));
    let mut out = Vec::new();
    while c.as_const().is_none() {
        let g = gcd(&c, &d);
        c = c.div_exact(&g).expect("gcd divides");
        d = d.div_exact(&g).expect("gcd divides").sub(&c.diff(v));
        out.push(g);
    }
    out
}

/// Split `p = r^q * rest` with `r` collecting every factor of multiplicity at least `q`.
pub fn power_part(p: &Poly, q: u32) -> (Poly, Poly) {
    let mut r = Poly::one();
    for (i, f) in squarefree(p).iter().enumerate() {
        let k = (i as u32 + 1) / q;
        if k > 0 {
            r = r.mul(&f.pow(k));
        }
    }
    let rest = p.div_exact(&r.pow(q)).expect("power part divides");
    (r, rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }
    fn c(n: i64) -> Poly {
        Poly::C(q(n))
    }

    #[test]
    fn arithmetic_roundtrip() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let a = x.add(&y).pow(3);
        let b = x.pow(3).add(&x.pow(2).mul(&y).scale(&q(3)));
        let rest = a.sub(&b);
        let expect = x.mul(&y.pow(2)).scale(&q(3)).add(&y.pow(3));
        assert_eq!(rest, expect);
    }

    #[test]
    fn squarefree_parts() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let f = x.add(&c(1));
        let g = y.sub(&x);
        let p = f.pow(2).mul(&g).mul(&y.pow(3)).scale(&q(3));
        let (r, rest) = power_part(&p, 2);
        assert_eq!(r.mul(&r).mul(&rest), p);
        assert_eq!(r.monic(), f.mul(&y).monic());
        assert_eq!(rest.monic(), g.mul(&y).monic());
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let y = Poly::var(1);
        let num = y.pow(2).sub(&c(1));
        let den = y.sub(&c(1));
        assert_eq!(gcd(&num, &den), den);
        assert_eq!(num.div_exact(&den).unwrap(), y.add(&c(1)));
    }

    #[test]
    fn multivariate_gcd() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let z = Poly::var(2);
        let g = x.mul(&y).add(&z).add(&c(2));
        let a = g.mul(&x.add(&z.pow(2)));
        let b = g.mul(&y.sub(&x).scale(&q(3)));
        assert_eq!(gcd(&a, &b), g);
    }

    #[test]
    fn reduce_square_root_relation() {
        // r^3 with r^2 = x + 1 becomes (x + 1) r
        let x = Poly::var(0);
        let r = Poly::var(1);
        let m = x.add(&c(1));
        assert_eq!(r.pow(3).reduce_power(1, 2, &m), m.mul(&r));
    }

    #[test]
    fn modular_image_decides_coprime() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let a = x.pow(12).add(&y.mul(&x).scale(&Q::new(7.into(), 3.into()))).add(&c(5));
        let b = x.pow(9).sub(&y.pow(2)).add(&c(1));
        assert!(coprime_image(&a, &b, 0));
        assert_eq!(gcd(&a, &b), c(1));
        let g = x.sub(&y);
        assert!(!coprime_image(&a.mul(&g), &b.mul(&g), 0));
        assert_eq!(gcd_mod(vec![1, 0, 1], vec![3, 1], 7), 0);
        assert_eq!(gcd_mod(vec![6, 0, 1], vec![1, 1], 7), 1);
    }
}
