//! Dense univariate polynomials over Q, used by the rational integrator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational as Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<Q>);

impl UPoly {
    pub fn new(mut cs: Vec<Q>) -> UPoly {
        while cs.last().is_some_and(Zero::is_zero) {
            cs.pop();
        }
        UPoly(cs)
    }

    pub fn zero() -> UPoly {
        UPoly(vec![])
    }

    pub fn constant(q: Q) -> UPoly {
        UPoly::new(vec![q])
    }

    pub fn x() -> UPoly {
        UPoly::new(vec![Q::zero(), Q::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports -1.
    pub fn deg(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn lc(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, q: &Q) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c * q).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut cs = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                cs[i + j] += a * b;
            }
        }
        UPoly::new(cs)
    }

    pub fn pow(&self, n: u32) -> UPoly {
        let mut r = UPoly::constant(Q::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn divrem(&self, o: &UPoly) -> (UPoly, UPoly) {
        assert!(!o.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let mut q = vec![Q::zero(); (self.deg() - o.deg()).max(0) as usize + 1];
        let lc = o.lc();
        while r.deg() >= o.deg() && !r.is_zero() {
            let k = (r.deg() - o.deg()) as usize;
            let t = r.lc() / &lc;
            q[k] = t.clone();
            let mut cs = r.0.clone();
            for (i, b) in o.0.iter().enumerate() {
                cs[i + k] -= &t * b;
            }
            cs.pop();
            r = UPoly::new(cs);
        }
        (UPoly::new(q), r)
    }

    pub fn rem(&self, o: &UPoly) -> UPoly {
        self.divrem(o).1
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(s, t, g)` with `s*self + t*o = g = gcd(self, o)` and `g` monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::constant(Q::one()), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::constant(Q::one()));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let lc = r0.lc();
        if lc.is_zero() {
            return (s0, t0, r0);
        }
        let inv = lc.recip();
        (s0.scale(&inv), t0.scale(&inv), r0.scale(&inv))
    }

    /// Solve `s*a + t*b = c` with `deg s < deg b`, assuming `gcd(a, b) = 1`.
    pub fn diophantine(a: &UPoly, b: &UPoly, c: &UPoly) -> Option<(UPoly, UPoly)> {
        let (s, _, g) = a.ext_gcd(b);
        if g.deg() != 0 {
            return None;
        }
        let s = s.mul(c).rem(b);
        let (t, r) = c.sub(&s.mul(a)).divrem(b);
        if !r.is_zero() {
            return None;
        }
        Some((s, t))
    }

    /// Yun's square-free decomposition: `[a1, a2, ...]` with `self = lc * prod ai^i`.
    pub fn squarefree(&self) -> Vec<UPoly> {
        let f = self.monic();
        let d = f.derivative();
        let mut a = f.gcd(&d);
        if a.deg() <= 0 {
            return vec![f];
        }
        let mut b = f.divrem(&a).0;
        let mut c = d.divrem(&a).0;
        let mut out = Vec::new();
        loop {
            let dd = c.sub(&b.derivative());
            if b.deg() <= 0 {
                break;
            }
            a = b.gcd(&dd);
            out.push(a.clone());
            b = b.divrem(&a).0;
            c = dd.divrem(&a).0;
        }
        while out.last().is_some_and(|p| p.deg() <= 0) {
            out.pop();
        }
        out
    }

    /// Resultant via the Euclidean algorithm over Q.
    pub fn resultant(&self, o: &UPoly) -> Q {
        if self.is_zero() || o.is_zero() {
            return Q::zero();
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        let mut res = Q::one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return res * num_traits::pow(b.lc(), da as usize);
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return Q::zero();
            }
            let dr = r.deg();
            // res(a, b) = (-1)^(da*db) * lc(b)^(da - dr) * res(b, r)
            if (da * db) % 2 == 1 {
                res = -res;
            }
            res *= num_traits::pow(b.lc(), (da - dr) as usize);
            a = b;
            b = r;
        }
    }

    /// Lagrange interpolation through `(xs[i], ys[i])`.
    pub fn interpolate(xs: &[Q], ys: &[Q]) -> UPoly {
        let mut acc = UPoly::zero();
        for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = UPoly::constant(yi.clone());
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    let lin = UPoly::new(vec![-xj.clone(), Q::one()]);
                    basis = basis.mul(&lin).scale(&(xi - xj).recip());
                }
            }
            acc = acc.add(&basis);
        }
        acc
    }

    /// Distinct rational roots, found with the rational root theorem.
    /// Returns `None` when coefficients are too large to enumerate divisors.
    pub fn rational_roots(&self) -> Option<Vec<Q>> {
        if self.deg() <= 0 {
            return Some(vec![]);
        }
        let mut p = self.clone();
        let mut roots = Vec::new();
        if p.0[0].is_zero() {
            roots.push(Q::zero());
            let k = p.0.iter().position(|c| !c.is_zero()).unwrap();
            p = UPoly::new(p.0[k..].to_vec());
        }
        if p.deg() <= 0 {
            return Some(roots);
        }
        let lcm = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.0.iter().map(|c| (c * &lcm).to_integer()).collect();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let d0 = divisors(&a0)?;
        let dn = divisors(&an)?;
        for num in &d0 {
            for den in &dn {
                for sign in [1i64, -1] {
                    let cand = Q::new(num * BigInt::from(sign), den.clone());
                    if !roots.contains(&cand) && p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            out.push(BigInt::from(i));
            if i * i != n {
                out.push(BigInt::from(n / i));
            }
        }
        i += 1;
        if i > 2_000_000 {
            return None;
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(cs: &[i64]) -> UPoly {
        UPoly::new(cs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    #[test]
    fn squarefree_splits_multiplicities() {
        // (x-1)^2 (x+2)
        let f = up(&[-1, 1]).pow(2).mul(&up(&[2, 1]));
        let sf = f.squarefree();
        assert_eq!(sf, vec![up(&[2, 1]), up(&[-1, 1])]);
    }

    #[test]
    fn resultant_detects_common_root() {
        assert!(up(&[-1, 0, 1]).resultant(&up(&[-1, 1])).is_zero());
        // res(x^2 + 1, x - 2) = 5
        assert_eq!(
            up(&[1, 0, 1]).resultant(&up(&[-2, 1])),
            Q::from_integer(5.into())
        );
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3)
        let f = up(&[-1, 2]).mul(&up(&[3, 1]));
        let roots = f.rational_roots().unwrap();
        assert_eq!(roots, vec![Q::from_integer((-3).into()), Q::new(1.into(), 2.into())]);
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let f = up(&[3, -2, 0, 1]);
        let xs: Vec<Q> = (0..4).map(|i| Q::from_integer(i.into())).collect();
        let ys: Vec<Q> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(UPoly::interpolate(&xs, &ys), f);
    }
}
