//! Numeric evaluation at a probe assignment, generic over the float type.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, Sign};
use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;

use crate::expr::{Elem, Expr, Node};

/// Concrete stand-in for an arbitrary function:
/// `c0 + c1 z + c2 z^2 + c3 z^3 + c4 exp(c5 z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncInstance {
    pub c: [f64; 6],
}

impl FuncInstance {
    pub fn random<R: Rng>(rng: &mut R) -> FuncInstance {
        let mut c = [0.0; 6];
        for ci in c.iter_mut().take(5) {
            *ci = signed_in(rng, 0.5, 2.0);
        }
        c[5] = signed_in(rng, 0.3, 1.0);
        FuncInstance { c }
    }

    /// The `k`-th derivative at `z`.
    pub fn eval<T: Float + FromPrimitive>(&self, k: u32, z: T) -> T {
        let c = |i: usize| T::from_f64(self.c[i]).unwrap();
        let t = |v: f64| T::from_f64(v).unwrap();
        let e = c(4) * c(5).powi(k as i32) * (c(5) * z).exp();
        let poly = match k {
            0 => c(0) + c(1) * z + c(2) * z * z + c(3) * z * z * z,
            1 => c(1) + t(2.0) * c(2) * z + t(3.0) * c(3) * z * z,
            2 => t(2.0) * c(2) + t(6.0) * c(3) * z,
            3 => t(6.0) * c(3),
            _ => T::zero(),
        };
        poly + e
    }
}

fn signed_in<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Values for free names and instances for arbitrary functions.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    pub values: BTreeMap<String, f64>,
    pub funcs: BTreeMap<String, FuncInstance>,
    pub seed: u64,
}

/// Why a point could not be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Singular {
    /// Division by a value of magnitude below 1e-8, or a non-finite result.
    Pole,
    /// A free name without a value.
    Unbound,
}

pub struct Evaluator<'a, T> {
    a: &'a Assignment,
    /// Largest magnitude seen at any subterm.
    pub max_mag: T,
}

impl<'a, T: Float + FromPrimitive> Evaluator<'a, T> {
    pub fn new(a: &'a Assignment) -> Self {
        Evaluator {
            a,
            max_mag: T::zero(),
        }
    }

    fn lookup(&self, name: &str) -> Option<T> {
        self.a.values.get(name).and_then(|v| T::from_f64(*v))
    }

    fn check(&mut self, v: T) -> Result<T, Singular> {
        if !v.is_finite() {
            return Err(Singular::Pole);
        }
        let m = v.abs();
        if m > self.max_mag {
            self.max_mag = m;
        }
        Ok(v)
    }

    pub fn eval(&mut self, e: &Expr) -> Result<T, Singular> {
        let tiny = T::from_f64(1e-8).unwrap();
        let v = match e.node() {
            Node::Num(q) => big::<T>(q.numer()) / big::<T>(q.denom()),
            Node::Sym(n) | Node::Param(n) => self.lookup(n).ok_or(Singular::Unbound)?,
            Node::Add(ts) => {
                let mut acc = T::zero();
                for t in ts {
                    acc = acc + self.eval(t)?;
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = T::one();
                for f in fs {
                    acc = acc * self.eval(f)?;
                }
                acc
            }
            Node::Pow(b, x) => {
                let bv = self.eval(b)?;
                if let Some(q) = x.as_num() {
                    if q.is_integer() {
                        let n = q.to_integer().to_i32().ok_or(Singular::Pole)?;
                        if n < 0 && bv.abs() < tiny {
                            return Err(Singular::Pole);
                        }
                        return self.check(bv.powi(n));
                    }
                }
                let xv = self.eval(x)?;
                if bv.abs() < tiny && xv < T::zero() {
                    return Err(Singular::Pole);
                }
                // Odd roots of negative numbers stay real.
                if bv < T::zero() {
                    if let Some(q) = x.as_num() {
                        let d = q.denom().to_i64().unwrap_or(2);
                        if d % 2 == 1 {
                            let r = (-bv).powf(xv);
                            let odd = q.numer().to_i64().unwrap_or(0) % 2 != 0;
                            return self.check(if odd { -r } else { r });
                        }
                    }
                }
                bv.powf(xv)
            }
            Node::Elem(k, u) => {
                let uv = self.eval(u)?;
                match k {
                    Elem::Exp => uv.exp(),
                    Elem::Ln => {
                        if uv.abs() < tiny {
                            return Err(Singular::Pole);
                        }
                        uv.ln()
                    }
                    Elem::Sin => uv.sin(),
                    Elem::Cos => uv.cos(),
                    Elem::Tan => {
                        if uv.cos().abs() < tiny {
                            return Err(Singular::Pole);
                        }
                        uv.tan()
                    }
                    Elem::Arctan => uv.atan(),
                }
            }
            Node::Func { name, order, arg } => {
                let z = self.eval(arg)?;
                let inst = self.a.funcs.get(&**name).ok_or(Singular::Unbound)?;
                inst.eval(*order, z)
            }
            Node::Int { .. } | Node::IntTo { .. } => self.opaque(e)?,
        };
        self.check(v)
    }

    /// Integrals are probed as independent pseudo-random functions of their
    /// free names, keyed by the node and the seed.
    fn opaque(&mut self, e: &Expr) -> Result<T, Singular> {
        let mut h = DefaultHasher::new();
        e.hash(&mut h);
        self.a.seed.hash(&mut h);
        for n in e.free_names() {
            let v = self.lookup(&n).ok_or(Singular::Unbound)?;
            v.to_f64().unwrap_or(0.0).to_bits().hash(&mut h);
        }
        let bits = h.finish();
        let unit = (bits >> 11) as f64 / (1u64 << 53) as f64;
        Ok(T::from_f64(0.5 + 1.5 * unit).unwrap())
    }
}

/// An integer in `T`, exact whenever `T` has the bits.
fn big<T: Float + FromPrimitive>(n: &BigInt) -> T {
    if let Some(v) = n.to_i64() {
        return T::from_i64(v).unwrap();
    }
    let (sign, digits) = n.to_u64_digits();
    let base = T::from_f64(18446744073709551616.0).unwrap();
    let m = digits
        .iter()
        .rev()
        .fold(T::zero(), |acc, d| acc * base + T::from_u64(*d).unwrap());
    if sign == Sign::Minus {
        -m
    } else {
        m
    }
}

/// Evaluate `e` at `a` in `f64`, returning the value and the largest magnitude seen.
pub fn eval_f64(e: &Expr, a: &Assignment) -> Result<(f64, f64), Singular> {
    let mut ev = Evaluator::<f64>::new(a);
    let v = ev.eval(e)?;
    Ok((v, ev.max_mag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn function_instance_derivatives_agree_with_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = FuncInstance::random(&mut rng);
        let h = 1e-6;
        for k in 0..4 {
            let fd = (f.eval::<f64>(k, 1.0 + h) - f.eval::<f64>(k, 1.0 - h)) / (2.0 * h);
            assert!((fd - f.eval::<f64>(k + 1, 1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn generic_over_float_width() {
        let x = Expr::sym("x");
        let e = Expr::powi(x.clone(), 2) + Expr::rat(1, 2);
        let mut a = Assignment::default();
        a.values.insert("x".into(), 1.5);
        let v32 = Evaluator::<f32>::new(&a).eval(&e).unwrap();
        let v64 = Evaluator::<f64>::new(&a).eval(&e).unwrap();
        assert!((v32 as f64 - v64).abs() < 1e-6);
        assert_eq!(v64, 2.75);
    }

    #[test]
    fn poles_are_reported() {
        let x = Expr::sym("x");
        let mut a = Assignment::default();
        a.values.insert("x".into(), 0.0);
        assert_eq!(eval_f64(&Expr::recip(x), &a), Err(Singular::Pole));
    }
}
