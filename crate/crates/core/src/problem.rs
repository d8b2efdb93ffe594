//! Problem files: declarations, one ODE statement, optional expectations.

use std::collections::BTreeMap;

use symcore::poly::power_part;
use symcore::expr::exact_root;
use symcore::{normalize, parse_in, Expr, Normal, Oracle, Scope};

use crate::error::{Error, Result};
use crate::ode::Ode;

pub const YPRIME: &str = "y'";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProblemFile {
    pub params: Vec<String>,
    pub funcs: Vec<String>,
    /// The statement as written, `lhs = rhs`.
    pub ode_text: String,
    /// `expect.<key>: <value>` lines.
    pub expect: BTreeMap<String, String>,
}

/// Names used by the solver itself: the variables, the reduced variable and the
/// integration dummy.
const RESERVED: [&str; 4] = ["x", "y", "u", "z"];

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile> {
        let mut pf = ProblemFile::default();
        let mut seen_ode = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| Error::Problem(format!("line {}: {m}", n + 1));
            if let Some(rest) = line.strip_prefix("param ") {
                pf.params.extend(names(rest));
            } else if let Some(rest) = line.strip_prefix("func ") {
                pf.funcs.extend(names(rest));
            } else if let Some(rest) = line.strip_prefix("ode:") {
                if seen_ode {
                    return Err(err("more than one ode statement"));
                }
                seen_ode = true;
                pf.ode_text = rest.trim().to_string();
            } else if let Some(rest) = line.strip_prefix("expect.") {
                let (k, v) = rest.split_once(':').ok_or_else(|| err("expected `expect.key: value`"))?;
                pf.expect.insert(k.trim().to_string(), v.trim().to_string());
            } else {
                return Err(err("unrecognised directive"));
            }
        }
        if !seen_ode {
            return Err(Error::Problem("no ode statement".into()));
        }
        let mut declared = std::collections::BTreeSet::new();
        for n in pf.params.iter().chain(&pf.funcs) {
            if RESERVED.contains(&n.as_str()) {
                return Err(Error::Problem(format!("`{n}` is reserved")));
            }
            if !declared.insert(n) {
                return Err(Error::Problem(format!("`{n}` declared twice")));
            }
        }
        Ok(pf)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        if !self.params.is_empty() {
            s += &format!("param {}\n", self.params.join(", "));
        }
        if !self.funcs.is_empty() {
            s += &format!("func {}\n", self.funcs.join(", "));
        }
        s += &format!("ode: {}\n", self.ode_text);
        for (k, v) in &self.expect {
            s += &format!("expect.{k}: {v}\n");
        }
        s
    }

    pub fn scope(&self, yprime: bool) -> Scope {
        let mut sc = Scope::new(
            ["x", "y"],
            self.params.iter().map(String::as_str),
            self.funcs.iter().map(String::as_str),
        );
        sc.allow_yprime = yprime;
        sc
    }

    /// Parse an expression in this file's scope (no `y'`).
    pub fn expr(&self, text: &str) -> Result<Expr> {
        Ok(parse_in(text, &self.scope(false))?)
    }

    /// `lhs - rhs` of the statement.
    pub fn statement(&self) -> Result<Expr> {
        let (l, r) = self
            .ode_text
            .split_once('=')
            .ok_or_else(|| Error::Problem("ode statement needs `=`".into()))?;
        let sc = self.scope(true);
        Ok(parse_in(l, &sc)? - parse_in(r, &sc)?)
    }

    pub fn odes(&self, o: &Oracle) -> Result<Vec<Ode>> {
        Ok(solve_for_yprime(o, &self.statement()?)?
            .into_iter()
            .map(|phi| Ode {
                phi,
                params: self.params.clone(),
                funcs: self.funcs.clone(),
            })
            .collect())
    }
}

fn names(s: &str) -> impl Iterator<Item = String> + '_ {
    s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty())
}

/// Solved forms of `e = 0` for `y'`: one branch if linear, two if quadratic.
pub fn solve_for_yprime(o: &Oracle, e: &Expr) -> Result<Vec<Expr>> {
    if !e.contains_name(YPRIME) {
        return Err(Error::NotAnOde);
    }
    let Some(cs) = o.poly_parts(e, YPRIME, 2)? else {
        return Err(Error::UnsupportedDegree(3));
    };
    let (c0, c1, c2) = (&cs[0], &cs[1], &cs[2]);
    if o.is_zero(c2)? {
        if o.is_zero(c1)? {
            return Err(Error::NotAnOde);
        }
        return Ok(vec![normalize(&(-(c0 / c1)))]);
    }
    let disc = normalize(&(c1 * c1 - Expr::int(4) * c2 * c0));
    let root = sqrt_simplified(&disc)?;
    let two = Expr::int(2) * c2;
    Ok(vec![
        normalize(&((-c1 + &root) / &two)),
        normalize(&((-c1 - &root) / &two)),
    ])
}

/// `sqrt(e)` with square factors of the numerator and denominator moved outside.
pub fn sqrt_simplified(e: &Expr) -> Result<Expr> {
    let n = Normal::of(e)?;
    let (rn, mn) = power_part(&n.rf.num, 2);
    let (rd, md) = power_part(&n.rf.den, 2);
    let cn = mn.numeric_content();
    let cd = md.numeric_content();
    let inside = n.ctx.poly_expr(&mn.scale(&cn.recip())) * n.ctx.poly_expr(&md.scale(&cd.recip()));
    let mut c = cn * cd;
    let mut outside = n.ctx.poly_expr(&rn) / (n.ctx.poly_expr(&rd) * n.ctx.poly_expr(&md));
    if let Some(r) = exact_root(&c, 2) {
        outside = outside * Expr::num(r);
        c = num_traits::One::one();
    }
    let inside = normalize(&(inside * Expr::num(c)));
    Ok(normalize(&(outside * Expr::sqrt(inside))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::ProbeConfig;

    #[test]
    fn parses_directives() {
        let pf = ProblemFile::parse(
            "# Kamke 128\nparam a\nfunc f, g\node: x*y' + a*y - f(x)*g(x^a*y) = 0\nexpect.class: CaseGeneral\n",
        )
        .unwrap();
        assert_eq!(pf.params, vec!["a"]);
        assert_eq!(pf.funcs, vec!["f", "g"]);
        assert_eq!(pf.expect["class"], "CaseGeneral");
        assert_eq!(ProblemFile::parse(&pf.render()).unwrap(), pf);
        assert!(ProblemFile::parse("param a\n").is_err());
        assert!(ProblemFile::parse("ode: y' = 1\node: y' = 2\n").is_err());
        assert!(ProblemFile::parse("param z\node: y' = z\n").is_err());
        assert!(ProblemFile::parse("param a\nfunc a\node: y' = a\n").is_err());
    }

    #[test]
    fn branches() {
        let o = Oracle::new(ProbeConfig::default());
        let pf = ProblemFile::parse("ode: y'*x - y = 0").unwrap();
        let b = solve_for_yprime(&o, &pf.statement().unwrap()).unwrap();
        assert_eq!(b.len(), 1);
        assert!(o.is_zero(&(&b[0] - pf.expr("y/x").unwrap())).unwrap());
        let pf = ProblemFile::parse("ode: y'^3 = y").unwrap();
        assert_eq!(
            solve_for_yprime(&o, &pf.statement().unwrap()),
            Err(Error::UnsupportedDegree(3))
        );
        let pf = ProblemFile::parse("ode: y = x").unwrap();
        assert_eq!(solve_for_yprime(&o, &pf.statement().unwrap()), Err(Error::NotAnOde));
        let pf = ProblemFile::parse("ode: y'^2 + 2*x*y*y' + (x^2-4)*y^2 + 4*exp(-x^2) = 0").unwrap();
        let b = solve_for_yprime(&o, &pf.statement().unwrap()).unwrap();
        assert_eq!(b.len(), 2);
        let want = pf.expr("-x*y + 2*sqrt(y^2 - exp(-x^2))").unwrap();
        let hit = b.iter().any(|e| o.is_zero(&(e - &want)).unwrap_or(false));
        assert!(hit, "{} | {}", b[0], b[1]);
    }
}
