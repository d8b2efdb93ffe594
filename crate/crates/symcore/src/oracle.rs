//! Hybrid zero-testing: rational normal form first, numeric probing second.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diff::{diff, diff_n};
use crate::error::{Result, SymError};
use crate::eval::{Assignment, Evaluator, FuncInstance, Singular};
use num_traits::{Float, FromPrimitive};
use crate::expr::{Expr, Node};
use crate::ratfun::{normalize, try_normalize, Normal, RatFun};

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub probes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub seed: u64,
    /// Attempts allowed per requested probe point.
    pub retries_per_probe: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            probes: 8,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            seed: 1,
            retries_per_probe: 25,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Symbolic,
    Probabilistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroTest {
    pub zero: bool,
    pub how: Verdict,
}

/// A symbolic verdict kept for later cross-checking by probing.
#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub expr: Expr,
    pub zero: bool,
}

#[derive(Debug, Default)]
pub struct Oracle {
    pub cfg: ProbeConfig,
    symbolic: AtomicUsize,
    probabilistic: AtomicUsize,
    audit: Option<Mutex<Vec<AuditEntry>>>,
    sites: Mutex<Vec<String>>,
}

impl Oracle {
    pub fn new(cfg: ProbeConfig) -> Oracle {
        Oracle {
            cfg,
            ..Oracle::default()
        }
    }

    /// Keep every symbolic verdict for [`Oracle::audit_entries`].
    pub fn with_audit(cfg: ProbeConfig) -> Oracle {
        Oracle {
            cfg,
            audit: Some(Mutex::new(Vec::new())),
            ..Oracle::default()
        }
    }

    pub fn symbolic_count(&self) -> usize {
        self.symbolic.load(Ordering::Relaxed)
    }

    pub fn probabilistic_count(&self) -> usize {
        self.probabilistic.load(Ordering::Relaxed)
    }

    pub fn audit_entries(&self) -> Vec<AuditEntry> {
        self.audit
            .as_ref()
            .map(|m| m.lock().unwrap().clone())
            .unwrap_or_default()
    }

    pub fn record_site(&self, site: &str) {
        self.sites.lock().unwrap().push(site.to_string());
    }

    pub fn sites(&self) -> Vec<String> {
        self.sites.lock().unwrap().clone()
    }

    fn note_symbolic(&self, e: &Expr, zero: bool) -> ZeroTest {
        self.symbolic.fetch_add(1, Ordering::Relaxed);
        if let Some(a) = &self.audit {
            a.lock().unwrap().push(AuditEntry {
                expr: e.clone(),
                zero,
            });
        }
        ZeroTest {
            zero,
            how: Verdict::Symbolic,
        }
    }

    pub fn zero_test(&self, e: &Expr) -> Result<ZeroTest> {
        if let Node::Num(q) = e.node() {
            return Ok(self.note_symbolic(e, num_traits::Zero::is_zero(q)));
        }
        if self.clearly_nonzero(e) {
            self.probabilistic.fetch_add(1, Ordering::Relaxed);
            return Ok(ZeroTest {
                zero: false,
                how: Verdict::Probabilistic,
            });
        }
        let (num, den) = match Normal::of(e) {
            Ok(n) => {
                if n.is_zero() {
                    return Ok(self.note_symbolic(e, true));
                }
                if n.certified() {
                    return Ok(self.note_symbolic(e, false));
                }
                (n.num_expr(), Some(n.den_expr()))
            }
            Err(_) => (e.clone(), None),
        };
        let zero = self.probe_zero(&num, den.as_ref(), self.cfg.seed)?;
        self.probabilistic.fetch_add(1, Ordering::Relaxed);
        Ok(ZeroTest {
            zero,
            how: Verdict::Probabilistic,
        })
    }

    /// A value far above rounding noise at one of two sample points. Skips
    /// normalization of large expressions that are plainly nonzero.
    fn clearly_nonzero(&self, e: &Expr) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.cfg.seed ^ 0xfa57, e));
        let names = probe_names(e, None);
        let mut tried = 0;
        for _ in 0..8 {
            let a = random_assignment(&mut rng, &names);
            let mut ev = Evaluator::<f64>::new(&a);
            if let Ok(v) = ev.eval(e) {
                if v.abs() > 1e-6 * (1.0 + ev.max_mag) {
                    return true;
                }
                tried += 1;
                if tried == 2 {
                    break;
                }
            }
        }
        false
    }

    pub fn is_zero(&self, e: &Expr) -> Result<bool> {
        Ok(self.zero_test(e)?.zero)
    }

    /// Probe `num` (optionally guarded by `den`) at `probes` random points.
    pub fn probe_zero(&self, num: &Expr, den: Option<&Expr>, seed: u64) -> Result<bool> {
        self.probe_zero_in::<f64>(num, den, seed)
    }

    /// [`Oracle::probe_zero`] evaluated in `T`; the points are the same for every `T`.
    pub fn probe_zero_in<T: Float + FromPrimitive>(&self, num: &Expr, den: Option<&Expr>, seed: u64) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, num));
        let names = probe_names(num, den);
        let needed = self.cfg.probes;
        let budget = needed * self.cfg.retries_per_probe;
        let tiny = T::from_f64(1e-8).unwrap();
        let abs_tol = T::from_f64(self.cfg.abs_tol).unwrap();
        let rel_tol = T::from_f64(self.cfg.rel_tol).unwrap();
        let mut valid = 0;
        for _ in 0..budget {
            let a = random_assignment(&mut rng, &names);
            if let Some(d) = den {
                match Evaluator::<T>::new(&a).eval(d) {
                    Ok(v) if v.abs() >= tiny => {}
                    _ => continue,
                }
            }
            let mut ev = Evaluator::<T>::new(&a);
            match ev.eval(num) {
                Ok(v) => {
                    valid += 1;
                    if v.abs() > abs_tol + rel_tol * ev.max_mag {
                        return Ok(false);
                    }
                    if valid >= needed {
                        return Ok(true);
                    }
                }
                Err(Singular::Pole) => continue,
                Err(Singular::Unbound) => continue,
            }
        }
        Err(SymError::ProbeFailure { valid, needed })
    }

    pub fn is_free_of(&self, e: &Expr, v: &str) -> Result<bool> {
        if !e.contains_name(v) {
            return Ok(true);
        }
        self.is_zero(&diff(e, v))
    }

    /// A value of `e` at one valid probe point.
    pub fn sample(&self, e: &Expr) -> Option<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.cfg.seed ^ 0x5eed, e));
        let names = probe_names(e, None);
        for _ in 0..self.cfg.retries_per_probe * 4 {
            let a = random_assignment(&mut rng, &names);
            if let Ok(v) = Evaluator::<f64>::new(&a).eval(e) {
                return Some(v);
            }
        }
        None
    }

    /// Remove `v` from an expression that is free of it up to probing, by
    /// substituting a value at which the expression is well defined.
    pub fn eliminate(&self, e: &Expr, v: &str) -> Expr {
        let e = normalize(e);
        if !e.contains_name(v) {
            return e;
        }
        for cand in [
            Expr::zero(),
            Expr::one(),
            Expr::int(2),
            Expr::rat(1, 2),
            Expr::int(3),
            Expr::rat(1, 3),
        ] {
            let Ok(s) = try_normalize(&e.subst(v, &cand)) else {
                continue;
            };
            if self.sample(&s).is_some() {
                return s;
            }
        }
        e
    }

    /// Coefficients `[c0, .., c_maxdeg]` of `e` as a polynomial in `v`, or
    /// `None` when `e` is not such a polynomial.
    pub fn poly_parts(&self, e: &Expr, v: &str, maxdeg: usize) -> Result<Option<Vec<Expr>>> {
        let mut out = vec![Expr::zero(); maxdeg + 1];
        if !e.contains_name(v) {
            out[0] = normalize(e);
            return Ok(Some(out));
        }
        if let Ok(n) = Normal::of(e) {
            let ctx = &n.ctx;
            let var = (0..ctx.kernels.len() as u32)
                .find(|k| ctx.kernel_expr(*k).as_name().is_some_and(|s| &**s == v));
            let others_free = ctx
                .kernels
                .iter()
                .all(|k| k.expr.as_name().is_some_and(|s| &**s == v) || !k.expr.contains_name(v));
            if let (Some(var), true) = (var, others_free) {
                if !n.rf.den.contains_var(var) {
                    let cs = n.rf.num.coeffs_in(var);
                    let coeff = |c: &crate::poly::Poly| {
                        normalize(&ctx.to_expr(&RatFun {
                            num: c.clone(),
                            den: n.rf.den.clone(),
                        }))
                    };
                    for c in cs.iter().skip(maxdeg + 1) {
                        if !self.is_zero(&coeff(c))? {
                            return Ok(None);
                        }
                    }
                    for (i, c) in cs.iter().take(maxdeg + 1).enumerate() {
                        out[i] = coeff(c);
                    }
                    return Ok(Some(out));
                }
            }
        }
        if !self.is_zero(&diff_n(e, v, maxdeg + 1))? {
            return Ok(None);
        }
        let mut rest = e.clone();
        let mut fact = 1i64;
        for k in 1..=maxdeg {
            fact *= k as i64;
        }
        for k in (0..=maxdeg).rev() {
            let dk = diff_n(&rest, v, k) / Expr::int(fact);
            let ck = self.eliminate(&dk, v);
            rest = rest - &ck * Expr::powi(Expr::sym(v), k as i64);
            out[k] = ck;
            if k > 0 {
                fact /= k as i64;
            }
        }
        Ok(Some(out))
    }
}

fn mix(seed: u64, e: &Expr) -> u64 {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    e.hash(&mut h);
    h.finish()
}

/// Free symbols, parameters and functions needing values.
pub struct ProbeNames {
    pub symbols: BTreeSet<String>,
    pub params: BTreeSet<String>,
    pub funcs: BTreeSet<String>,
}

pub fn probe_names(e: &Expr, extra: Option<&Expr>) -> ProbeNames {
    let mut names = ProbeNames {
        symbols: BTreeSet::new(),
        params: BTreeSet::new(),
        funcs: BTreeSet::new(),
    };
    for x in std::iter::once(e).chain(extra) {
        for n in x.free_names() {
            names.symbols.insert(n.to_string());
        }
        x.walk(&mut |s| match s.node() {
            Node::Param(n) => {
                names.params.insert(n.to_string());
            }
            Node::Func { name, .. } => {
                names.funcs.insert(name.to_string());
            }
            // Dummies bound by integrals still need values for nested evaluation.
            Node::Sym(n) => {
                names.symbols.insert(n.to_string());
            }
            _ => {}
        });
    }
    for p in &names.params {
        names.symbols.remove(p);
    }
    names
}

/// Symbols in [0.3, 2.2]; parameters in [-3, 3] away from 0 and the integers.
pub fn random_assignment<R: Rng>(rng: &mut R, names: &ProbeNames) -> Assignment {
    let mut a = Assignment {
        seed: rng.gen(),
        ..Assignment::default()
    };
    for s in &names.symbols {
        a.values.insert(s.clone(), rng.gen_range(0.3..2.2));
    }
    for p in &names.params {
        let v = loop {
            let v: f64 = rng.gen_range(-3.0..3.0);
            if v.abs() >= 0.1 && (v - v.round()).abs() >= 0.05 {
                break v;
            }
        };
        a.values.insert(p.clone(), v);
    }
    for f in &names.funcs {
        a.funcs.insert(f.clone(), FuncInstance::random(rng));
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn oracle() -> Oracle {
        Oracle::new(ProbeConfig::default())
    }

    #[test]
    fn symbolic_zero_and_nonzero() {
        let o = oracle();
        let e = parse("y^2 - y*y + 1", &[], &[]).unwrap();
        let t = o.zero_test(&e).unwrap();
        assert_eq!((t.zero, t.how), (false, Verdict::Symbolic));
        let e = parse("a*y/x", &["a"], &[]).unwrap();
        let d = diff(&e, "y") - parse("a/x", &["a"], &[]).unwrap();
        assert_eq!(o.zero_test(&d).unwrap().how, Verdict::Symbolic);
        assert!(o.is_zero(&d).unwrap());
    }

    #[test]
    fn probing_decides_transcendental_identities() {
        let o = oracle();
        let e = parse("sin(x)^2 + cos(x)^2 - 1", &[], &[]).unwrap();
        let t = o.zero_test(&e).unwrap();
        assert!(t.zero);
        assert_eq!(t.how, Verdict::Probabilistic);
        let e = parse("sin(x)^2 + cos(x)^2 - 1 + 1/1000000", &[], &[]).unwrap();
        assert!(!o.is_zero(&e).unwrap());
    }

    #[test]
    fn free_of() {
        let o = oracle();
        let y_free = parse("Int(f(x), x)", &[], &["f"]).unwrap();
        assert!(o.is_free_of(&y_free, "y").unwrap());
        assert!(!o.is_free_of(&parse("y + x", &[], &[]).unwrap(), "y").unwrap());
    }

    #[test]
    fn poly_parts_examples() {
        let o = oracle();
        let e = parse("a*y/x", &["a"], &[]).unwrap();
        let parts = o.poly_parts(&e, "y", 1).unwrap().unwrap();
        assert_eq!(parts[0], Expr::zero());
        assert_eq!(parts[1], parse("a/x", &["a"], &[]).unwrap());
        let e = parse("f(x)*y^2", &[], &["f"]).unwrap();
        let parts = o.poly_parts(&e, "y", 2).unwrap().unwrap();
        assert_eq!(parts[2], parse("f(x)", &[], &["f"]).unwrap());
        assert!(o.poly_parts(&parse("exp(y)", &[], &[]).unwrap(), "y", 2).unwrap().is_none());
    }

    #[test]
    fn poly_parts_through_square_roots() {
        let o = oracle();
        // y is only inside a kernel, but the expression is still linear in y.
        let e = parse("sqrt(x^2 + 1)*y + sqrt(x)", &[], &[]).unwrap();
        let parts = o.poly_parts(&e, "y", 1).unwrap().unwrap();
        assert!(o.is_zero(&(parts[1].clone() - parse("sqrt(x^2+1)", &[], &[]).unwrap())).unwrap());
        let e = parse("sqrt(y^2 + 1)", &[], &[]).unwrap();
        assert!(o.poly_parts(&e, "y", 2).unwrap().is_none());
    }

    #[test]
    fn singular_expressions_fail_to_probe() {
        let o = oracle();
        let e = parse("ln(-1 - x^2)", &[], &[]).unwrap();
        assert!(matches!(o.zero_test(&e), Err(SymError::ProbeFailure { .. })));
    }
}
