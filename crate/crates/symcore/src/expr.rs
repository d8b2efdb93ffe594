//! Immutable expression trees with light canonicalization.
//!
//! Every constructor flattens nested sums and products, folds rational
//! constants, collects like terms and like bases, and keeps children sorted
//! under the derived total order on [`Node`]. The variant order of `Node`
//! is the kernel order used everywhere: constants < symbols < parameters <
//! sums < products < powers < elementary applications < arbitrary-function
//! applications < integrals.
//!
//! Symbolic powers and logarithms assume positive real bases
//! (`(x^a)^b = x^(a*b)`, `ln(x^a) = a*ln(x)`), which matches the real
//! probing domain used by the zero oracle.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

pub type Name = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Arctan,
}

impl Elem {
    pub fn name(self) -> &'static str {
        match self {
            Elem::Exp => "exp",
            Elem::Ln => "ln",
            Elem::Sin => "sin",
            Elem::Cos => "cos",
            Elem::Tan => "tan",
            Elem::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Elem> {
        Some(match name {
            "exp" => Elem::Exp,
            "ln" => Elem::Ln,
            "sin" => Elem::Sin,
            "cos" => Elem::Cos,
            "tan" => Elem::Tan,
            "arctan" => Elem::Arctan,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Num(Rational),
    Sym(Name),
    Param(Name),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Elem(Elem, Expr),
    Func { name: Name, order: u32, arg: Expr },
    Int { integrand: Expr, var: Name },
    IntTo { integrand: Expr, dummy: Name, upper: Expr },
}

struct Inner {
    node: Node,
    hash: u64,
}

#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn raw(node: Node) -> Expr {
        let mut h = DefaultHasher::new();
        node.hash(&mut h);
        Expr(Arc::new(Inner {
            hash: h.finish(),
            node,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    // ---- atoms ----------------------------------------------------------

    pub fn num(q: Rational) -> Expr {
        Expr::raw(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(name: &str) -> Expr {
        Expr::raw(Node::Sym(Arc::from(name)))
    }

    pub fn param(name: &str) -> Expr {
        Expr::raw(Node::Param(Arc::from(name)))
    }

    pub fn func(name: &str, order: u32, arg: Expr) -> Expr {
        Expr::raw(Node::Func {
            name: Arc::from(name),
            order,
            arg,
        })
    }

    pub fn int_of(integrand: Expr, var: &str) -> Expr {
        if integrand.is_zero_literal() {
            return Expr::zero();
        }
        Expr::raw(Node::Int {
            integrand,
            var: Arc::from(var),
        })
    }

    pub fn int_to(integrand: Expr, dummy: &str, upper: Expr) -> Expr {
        if integrand.is_zero_literal() {
            return Expr::zero();
        }
        Expr::raw(Node::IntTo {
            integrand,
            dummy: Arc::from(dummy),
            upper,
        })
    }

    // ---- queries --------------------------------------------------------

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_num(&self) -> bool {
        matches!(self.node(), Node::Num(_))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_one())
    }

    pub fn is_integer_literal(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_integer())
    }

    /// Symbol or parameter name, if this is one.
    pub fn as_name(&self) -> Option<&Name> {
        match self.node() {
            Node::Sym(n) | Node::Param(n) => Some(n),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Sym(_) | Node::Param(_) => vec![],
            Node::Add(ts) | Node::Mul(ts) => ts.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Elem(_, a) => vec![a],
            Node::Func { arg, .. } => vec![arg],
            Node::Int { integrand, .. } => vec![integrand],
            Node::IntTo {
                integrand, upper, ..
            } => vec![integrand, upper],
        }
    }

    /// Free symbol and parameter names. Integration dummies of `IntTo` are bound;
    /// the variable of `Int` is free (the node is a function of it).
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self.node() {
            Node::Sym(n) | Node::Param(n) => {
                out.insert(n.clone());
            }
            Node::Int { integrand, var } => {
                integrand.collect_names(out);
                out.insert(var.clone());
            }
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => {
                let mut inner = BTreeSet::new();
                integrand.collect_names(&mut inner);
                inner.remove(dummy);
                out.extend(inner);
                upper.collect_names(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_names(out);
                }
            }
        }
    }

    pub fn contains_name(&self, name: &str) -> bool {
        match self.node() {
            Node::Sym(n) | Node::Param(n) => &**n == name,
            Node::Num(_) => false,
            Node::Int { integrand, var } => &**var == name || integrand.contains_name(name),
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => upper.contains_name(name) || (&**dummy != name && integrand.contains_name(name)),
            _ => self.children().into_iter().any(|c| c.contains_name(name)),
        }
    }

    /// Names of arbitrary functions applied anywhere in the tree.
    pub fn func_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Node::Func { name, .. } = e.node() {
                out.insert(name.clone());
            }
        });
        out
    }

    pub fn param_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Node::Param(n) = e.node() {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn has_integral(&self) -> bool {
        self.any(&|e| matches!(e.node(), Node::Int { .. } | Node::IntTo { .. }))
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    /// Split a term into its rational coefficient and the remaining factor.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Num(q) => (q.clone(), Expr::one()),
            Node::Mul(fs) => match fs[0].node() {
                Node::Num(q) => {
                    let rest = &fs[1..];
                    let rest = if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::raw(Node::Mul(rest.to_vec()))
                    };
                    (q.clone(), rest)
                }
                _ => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// `(base, exponent)` view of a factor.
    pub fn as_base_exp(&self) -> (Expr, Expr) {
        match self.node() {
            Node::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::one()),
        }
    }

    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(ts) => ts.clone(),
            _ if self.is_zero_literal() => vec![],
            _ => vec![self.clone()],
        }
    }

    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Mul(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    // ---- canonicalizing constructors -------------------------------------

    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut coeffs: BTreeMap<Expr, Rational> = BTreeMap::new();
        fn push(t: Expr, constant: &mut Rational, coeffs: &mut BTreeMap<Expr, Rational>) {
            match t.node() {
                Node::Num(q) => *constant += q,
                Node::Add(ts) => {
                    for s in ts {
                        push(s.clone(), constant, coeffs);
                    }
                }
                _ => {
                    let (c, rest) = t.split_coeff();
                    *coeffs.entry(rest).or_insert_with(Rational::zero) += c;
                }
            }
        }
        for t in terms {
            push(t, &mut constant, &mut coeffs);
        }
        let mut out = Vec::with_capacity(coeffs.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in coeffs {
            if !c.is_zero() {
                out.push(scale_raw(c, rest));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(Node::Add(out)),
        }
    }

    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut pending: Vec<Expr> = factors.into_iter().collect();
        let mut coeff = Rational::one();
        // Re-merge a few times: collecting a base can produce a product
        // (e.g. sqrt(x*y)^2 = x*y) whose factors merge with the others.
        for _round in 0..4 {
            let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
            fn push(
                f: &Expr,
                coeff: &mut Rational,
                bases: &mut BTreeMap<Expr, Vec<Expr>>,
            ) {
                match f.node() {
                    Node::Num(q) => *coeff *= q,
                    Node::Mul(fs) => {
                        for g in fs {
                            push(g, coeff, bases);
                        }
                    }
                    _ => {
                        let (b, e) = f.as_base_exp();
                        bases.entry(b).or_default().push(e);
                    }
                }
            }
            for f in &pending {
                push(f, &mut coeff, &mut bases);
            }
            if coeff.is_zero() {
                return Expr::zero();
            }
            let mut out = Vec::with_capacity(bases.len());
            let mut again = false;
            for (b, es) in bases {
                let p = if es.len() == 1 {
                    let e = es.into_iter().next().unwrap();
                    if e.is_one_literal() {
                        b
                    } else {
                        Expr::pow(b, e)
                    }
                } else {
                    Expr::pow(b, Expr::add(es))
                };
                match p.node() {
                    Node::Num(q) => coeff *= q,
                    Node::Mul(_) => {
                        again = true;
                        out.push(p);
                    }
                    _ => out.push(p),
                }
            }
            if coeff.is_zero() {
                return Expr::zero();
            }
            if again {
                pending = out;
                continue;
            }
            return build_mul(coeff, out);
        }
        let mut out = vec![];
        for p in pending {
            out.extend(p.factors());
        }
        out.sort();
        build_mul(coeff, out)
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if exp.is_zero_literal() {
            return Expr::one();
        }
        if exp.is_one_literal() {
            return base;
        }
        if base.is_one_literal() {
            return Expr::one();
        }
        match (base.node(), exp.node()) {
            (Node::Num(b), Node::Num(e)) => return num_pow(b, e),
            (Node::Num(b), _) if b.is_zero() => return Expr::zero(),
            (Node::Pow(b0, e0), _) => {
                return Expr::pow(b0.clone(), Expr::mul([e0.clone(), exp]));
            }
            (Node::Elem(Elem::Exp, u), _) => {
                return Expr::exp(Expr::mul([u.clone(), exp]));
            }
            (Node::Mul(fs), Node::Num(e)) if e.is_integer() => {
                return Expr::mul(fs.iter().map(|f| Expr::pow(f.clone(), exp.clone())));
            }
            (Node::Mul(fs), _) => {
                let exp_is_num = exp.is_num();
                let all_positive = fs.iter().all(|f| match f.node() {
                    Node::Num(q) => q.is_positive(),
                    _ => true,
                });
                // Symbolic exponents distribute over products (positive bases);
                // numeric fractional exponents only pull out the positive coefficient.
                if !exp_is_num && all_positive {
                    return Expr::mul(fs.iter().map(|f| Expr::pow(f.clone(), exp.clone())));
                }
                if let Node::Num(c) = fs[0].node() {
                    if c.is_positive() {
                        let rest = Expr::raw(Node::Mul(fs[1..].to_vec()));
                        let rest = if fs.len() == 2 { fs[1].clone() } else { rest };
                        return Expr::mul([
                            Expr::pow(fs[0].clone(), exp.clone()),
                            Expr::raw(Node::Pow(rest, exp)),
                        ]);
                    }
                }
            }
            _ => {}
        }
        Expr::raw(Node::Pow(base, exp))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::mul([Expr::int(-1), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add([a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::mul([a, Expr::pow(b, Expr::int(-1))])
    }

    pub fn recip(e: Expr) -> Expr {
        Expr::pow(e, Expr::int(-1))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::int(n))
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::pow(e, Expr::rat(1, 2))
    }

    pub fn exp(u: Expr) -> Expr {
        match u.node() {
            Node::Num(q) if q.is_zero() => Expr::one(),
            Node::Elem(Elem::Ln, z) => z.clone(),
            Node::Add(ts) => Expr::mul(ts.iter().map(|t| Expr::exp(t.clone()))),
            Node::Mul(fs) => {
                let logs: Vec<usize> = fs
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| matches!(f.node(), Node::Elem(Elem::Ln, _)))
                    .map(|(i, _)| i)
                    .collect();
                if logs.len() == 1 {
                    let i = logs[0];
                    let Node::Elem(_, z) = fs[i].node() else {
                        unreachable!()
                    };
                    let rest: Vec<Expr> = fs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, f)| f.clone())
                        .collect();
                    return Expr::pow(z.clone(), Expr::mul(rest));
                }
                Expr::raw(Node::Elem(Elem::Exp, u))
            }
            _ => Expr::raw(Node::Elem(Elem::Exp, u)),
        }
    }

    pub fn ln(z: Expr) -> Expr {
        match z.node() {
            Node::Num(q) if q.is_one() => Expr::zero(),
            Node::Elem(Elem::Exp, u) => u.clone(),
            Node::Pow(b, e) if matches!(b.node(), Node::Sym(_)) => {
                Expr::mul([e.clone(), Expr::ln(b.clone())])
            }
            _ => Expr::raw(Node::Elem(Elem::Ln, z)),
        }
    }

    pub fn elem(kind: Elem, arg: Expr) -> Expr {
        match kind {
            Elem::Exp => Expr::exp(arg),
            Elem::Ln => Expr::ln(arg),
            _ if arg.is_zero_literal() => match kind {
                Elem::Cos => Expr::one(),
                _ => Expr::zero(),
            },
            _ => Expr::raw(Node::Elem(kind, arg)),
        }
    }

    // ---- substitution ---------------------------------------------------

    /// Capture-free replacement of the symbol/parameter `name` by `r`.
    pub fn subst(&self, name: &str, r: &Expr) -> Expr {
        if !self.contains_name(name) {
            return self.clone();
        }
        match self.node() {
            Node::Num(_) => self.clone(),
            Node::Sym(n) | Node::Param(n) => {
                if &**n == name {
                    r.clone()
                } else {
                    self.clone()
                }
            }
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.subst(name, r))),
            Node::Mul(fs) => Expr::mul(fs.iter().map(|f| f.subst(name, r))),
            Node::Pow(b, e) => Expr::pow(b.subst(name, r), e.subst(name, r)),
            Node::Elem(k, a) => Expr::elem(*k, a.subst(name, r)),
            Node::Func { name: f, order, arg } => Expr::func(f, *order, arg.subst(name, r)),
            Node::Int { integrand, var } => {
                if &**var == name || r.contains_name(var) {
                    // Rewrite as an integral to an upper bound so the integration
                    // variable becomes bound before substituting.
                    let dummy = fresh_dummy(&[integrand, r], "z");
                    let bound = Expr::int_to(
                        integrand.subst(var, &Expr::sym(&dummy)),
                        &dummy,
                        Expr::sym(var),
                    );
                    bound.subst(name, r)
                } else {
                    Expr::int_of(integrand.subst(name, r), var)
                }
            }
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => {
                let upper = upper.subst(name, r);
                if &**dummy == name {
                    return Expr::int_to(integrand.clone(), dummy, upper);
                }
                if r.contains_name(dummy) {
                    let fresh = fresh_dummy(&[integrand, r, &upper], "z");
                    let renamed = integrand.subst(dummy, &Expr::sym(&fresh));
                    return Expr::int_to(renamed.subst(name, r), &fresh, upper);
                }
                Expr::int_to(integrand.subst(name, r), dummy, upper)
            }
        }
    }

    /// Structural replacement of a whole subexpression.
    pub fn replace(&self, target: &Expr, with: &Expr) -> Expr {
        if self == target {
            return with.clone();
        }
        match self.node() {
            Node::Num(_) | Node::Sym(_) | Node::Param(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.replace(target, with))),
            Node::Mul(fs) => Expr::mul(fs.iter().map(|f| f.replace(target, with))),
            Node::Pow(b, e) => Expr::pow(b.replace(target, with), e.replace(target, with)),
            Node::Elem(k, a) => Expr::elem(*k, a.replace(target, with)),
            Node::Func { name, order, arg } => {
                Expr::func(name, *order, arg.replace(target, with))
            }
            Node::Int { integrand, var } => Expr::int_of(integrand.replace(target, with), var),
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => Expr::int_to(
                integrand.replace(target, with),
                dummy,
                upper.replace(target, with),
            ),
        }
    }

    /// Rebuild bottom-up through the canonicalizing constructors.
    pub fn rebuild(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) | Node::Param(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(Expr::rebuild)),
            Node::Mul(fs) => Expr::mul(fs.iter().map(Expr::rebuild)),
            Node::Pow(b, e) => Expr::pow(b.rebuild(), e.rebuild()),
            Node::Elem(k, a) => Expr::elem(*k, a.rebuild()),
            Node::Func { name, order, arg } => Expr::func(name, *order, arg.rebuild()),
            Node::Int { integrand, var } => Expr::int_of(integrand.rebuild(), var),
            Node::IntTo {
                integrand,
                dummy,
                upper,
            } => Expr::int_to(integrand.rebuild(), dummy, upper.rebuild()),
        }
    }
}

/// A dummy name not occurring in any of `exprs`.
pub fn fresh_dummy(exprs: &[&Expr], stem: &str) -> String {
    let mut used = BTreeSet::new();
    for e in exprs {
        e.walk(&mut |s| match s.node() {
            Node::Sym(n) | Node::Param(n) => {
                used.insert(n.to_string());
            }
            Node::IntTo { dummy, .. } => {
                used.insert(dummy.to_string());
            }
            _ => {}
        });
    }
    if !used.contains(stem) {
        return stem.to_string();
    }
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !used.contains(c))
        .unwrap()
}

fn scale_raw(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    if rest.is_one_literal() {
        return Expr::num(c);
    }
    let mut fs = vec![Expr::num(c)];
    fs.extend(rest.factors());
    Expr::raw(Node::Mul(fs))
}

fn build_mul(coeff: Rational, mut out: Vec<Expr>) -> Expr {
    if out.is_empty() {
        return Expr::num(coeff);
    }
    if coeff.is_one() && out.len() == 1 {
        return out.pop().unwrap();
    }
    if out.len() == 1 {
        if let Node::Add(ts) = out[0].node() {
            let ts = ts.clone();
            return Expr::add(ts.into_iter().map(|t| {
                let (c, r) = t.split_coeff();
                scale_raw(c * &coeff, r)
            }));
        }
    }
    if !coeff.is_one() {
        out.insert(0, Expr::num(coeff));
    }
    Expr::raw(Node::Mul(out))
}

fn num_pow(b: &Rational, e: &Rational) -> Expr {
    if e.is_integer() {
        let n = e.to_integer();
        if b.is_zero() {
            return if n.is_positive() {
                Expr::zero()
            } else {
                Expr::raw(Node::Pow(Expr::num(b.clone()), Expr::num(e.clone())))
            };
        }
        let k = n.abs().to_u32().expect("exponent too large");
        let p = num_traits::pow(b.clone(), k as usize);
        return Expr::num(if n.is_negative() { p.recip() } else { p });
    }
    if !b.is_positive() {
        return Expr::raw(Node::Pow(Expr::num(b.clone()), Expr::num(e.clone())));
    }
    // b^(n + p/q) = b^n * (b^(1/q))^p
    let n = e.floor();
    let frac = e - &n;
    let q = frac.denom().to_u32().expect("root index too large");
    let p = frac.numer().clone();
    let int_part = num_pow(b, &n);
    match exact_root(b, q) {
        Some(r) => {
            let rp = num_traits::pow(r, p.to_usize().unwrap());
            Expr::mul([int_part, Expr::num(rp)])
        }
        None => {
            let root = Expr::raw(Node::Pow(Expr::num(b.clone()), Expr::num(frac)));
            match int_part.as_num() {
                Some(c) if c.is_one() => root,
                Some(c) => build_mul(c.clone(), vec![root]),
                None => Expr::mul([int_part, root]),
            }
        }
    }
}

/// Exact `q`-th root of a non-negative rational, when it exists.
pub fn exact_root(b: &Rational, q: u32) -> Option<Rational> {
    if b.is_negative() {
        return None;
    }
    let n = b.numer().nth_root(q);
    let d = b.denom().nth_root(q);
    if num_traits::pow(n.clone(), q as usize) == *b.numer()
        && num_traits::pow(d.clone(), q as usize) == *b.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::num(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self, rhs.clone())
            }
        }
        impl ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $f(self.clone(), rhs)
            }
        }
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $f(self.clone(), rhs.clone())
            }
        }
        impl ops::$tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                $f(self, Expr::int(rhs))
            }
        }
        impl ops::$tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                $f(self.clone(), Expr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add([a, b]));
binop!(Sub, sub, Expr::sub);
binop!(Mul, mul, |a, b| Expr::mul([a, b]));
binop!(Div, div, Expr::div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
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
    fn like_terms_collect() {
        let e = x() + y() + x() * 2 - y();
        assert_eq!(e, x() * 3);
        assert_eq!(x() - x(), Expr::zero());
    }

    #[test]
    fn like_bases_collect() {
        let e = x() * x() * Expr::recip(x());
        assert_eq!(e, x());
        let s = Expr::sqrt(x() + 1);
        assert_eq!(&s * &s, x() + 1);
    }

    #[test]
    fn rational_folding() {
        let e = Expr::rat(2, 4) * y() + Expr::zero();
        assert_eq!(e, Expr::rat(1, 2) * y());
        assert_eq!(Expr::pow(Expr::int(4), Expr::rat(1, 2)), Expr::int(2));
        assert_eq!(Expr::pow(Expr::int(8), Expr::rat(-2, 3)), Expr::rat(1, 4));
    }

    #[test]
    fn exp_ln_rules() {
        let a = Expr::param("a");
        assert_eq!(Expr::exp(&a * Expr::ln(x())), Expr::pow(x(), a.clone()));
        assert_eq!(Expr::ln(Expr::pow(x(), a.clone())), a * Expr::ln(x()));
        assert_eq!(Expr::ln(Expr::exp(y())), y());
        assert_eq!(Expr::exp(Expr::zero()), Expr::one());
    }

    #[test]
    fn substitution_binds_integration_variable() {
        let f = Expr::func("f", 0, x());
        let i = Expr::int_of(f, "x");
        let s = i.subst("x", &(y() * 2));
        match s.node() {
            Node::IntTo { upper, dummy, .. } => {
                assert_eq!(upper, &(y() * 2));
                assert_eq!(&**dummy, "z");
            }
            other => panic!("expected IntTo, got {other:?}"),
        }
        assert_eq!(x().subst("x", &x()), x());
    }

    #[test]
    fn free_names_skip_bound_dummy() {
        let g = Expr::func("g", 0, Expr::sym("z"));
        let e = Expr::int_to(Expr::recip(g), "z", x() * y());
        let names: Vec<String> = e.free_names().iter().map(|n| n.to_string()).collect();
        assert_eq!(names, vec!["x", "y"]);
    }
}
