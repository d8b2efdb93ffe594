//! ASCII rendering in the input grammar, so that `parse(render(e)) == e`.

use std::fmt::{self, Display, Write};

use num_traits::{One, Signed};

use crate::expr::{Expr, Node};
use crate::Rational;

// Precedence contexts.
const SUM: u8 = 0;
const PRODUCT: u8 = 1;
const POWER: u8 = 2;

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, SUM);
        f.write_str(&s)
    }
}

fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    match e.node() {
        Node::Num(q) => write_num(out, q, ctx),
        Node::Sym(n) | Node::Param(n) => out.push_str(n),
        Node::Add(ts) => {
            let open = ctx > SUM;
            if open {
                out.push('(');
            }
            for (i, t) in ts.iter().enumerate() {
                let (c, rest) = t.split_coeff();
                if i == 0 {
                    write_expr(out, t, SUM);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    write_term(out, &-c, &rest);
                } else {
                    out.push_str(" + ");
                    write_expr(out, t, SUM);
                }
            }
            if open {
                out.push(')');
            }
        }
        Node::Mul(_) => {
            let (c, rest) = e.split_coeff();
            let open = ctx >= POWER || (ctx == PRODUCT && c.is_negative());
            if open {
                out.push('(');
            }
            if c.is_negative() && !coeff_trails(&c, &rest) {
                out.push('-');
                write_term(out, &-c, &rest);
            } else {
                write_term(out, &c, &rest);
            }
            if open {
                out.push(')');
            }
        }
        Node::Pow(b, x) => {
            if let Some(q) = x.as_num() {
                if *q == Rational::new(1.into(), 2.into()) {
                    out.push_str("sqrt(");
                    write_expr(out, b, SUM);
                    out.push(')');
                    return;
                }
                if q.is_negative() {
                    // A lone reciprocal renders as a quotient.
                    let open = ctx >= POWER;
                    if open {
                        out.push('(');
                    }
                    write_term(out, &Rational::one(), e);
                    if open {
                        out.push(')');
                    }
                    return;
                }
            }
            write_expr(out, b, POWER + 1);
            out.push('^');
            write_exponent(out, x);
        }
        Node::Elem(k, a) => {
            out.push_str(k.name());
            out.push('(');
            write_expr(out, a, SUM);
            out.push(')');
        }
        Node::Func { name, order, arg } => {
            out.push_str(name);
            for _ in 0..*order {
                out.push('\'');
            }
            out.push('(');
            write_expr(out, arg, SUM);
            out.push(')');
        }
        Node::Int { integrand, var } => {
            let _ = write!(out, "Int({integrand}, {var})");
        }
        Node::IntTo {
            integrand,
            dummy,
            upper,
        } => {
            let _ = write!(out, "IntTo({integrand}, {dummy}, {upper})");
        }
    }
}

fn write_num(out: &mut String, q: &Rational, ctx: u8) {
    let neg = q.is_negative();
    let frac = !q.is_integer();
    let open = (neg && ctx > SUM) || (frac && ctx >= POWER);
    if open {
        out.push('(');
    }
    let _ = write!(out, "{}", q.numer());
    if frac {
        let _ = write!(out, "/{}", q.denom());
    }
    if open {
        out.push(')');
    }
}

fn write_exponent(out: &mut String, x: &Expr) {
    let atomic = match x.node() {
        Node::Sym(_) | Node::Param(_) => true,
        Node::Num(q) => q.is_integer() && !q.is_negative(),
        _ => false,
    };
    if atomic {
        write_expr(out, x, POWER);
    } else {
        out.push('(');
        write_expr(out, x, SUM);
        out.push(')');
    }
}

/// A coefficient in front of a sum would be distributed into it when
/// parsed back, so it is written last.
fn coeff_trails(c: &Rational, rest: &Expr) -> bool {
    let fs = rest.factors();
    !c.is_one() && fs.len() >= 2 && fs.iter().any(|f| matches!(f.node(), Node::Add(_)))
}

/// Render `c * rest` as `numerator / denominator`. The leading form needs `c > 0`.
fn write_term(out: &mut String, c: &Rational, rest: &Expr) {
    if coeff_trails(c, rest) {
        write_term(out, &Rational::one(), rest);
        out.push('*');
        write_num(out, c, PRODUCT);
        return;
    }
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for f in rest.factors() {
        if f.is_one_literal() {
            continue;
        }
        match f.node() {
            Node::Pow(b, x) if x.as_num().is_some_and(|q| q.is_negative()) => {
                den.push(Expr::pow(b.clone(), -x.clone()));
            }
            _ => num.push(f),
        }
    }
    let cn = Rational::from_integer(c.numer().clone());
    let cd = Rational::from_integer(c.denom().clone());
    let mut parts: Vec<String> = Vec::new();
    if !cn.is_one() || num.is_empty() {
        parts.push(cn.numer().to_string());
    }
    for f in &num {
        let mut s = String::new();
        write_expr(&mut s, f, PRODUCT);
        parts.push(s);
    }
    out.push_str(&parts.join("*"));
    let mut dparts: Vec<String> = Vec::new();
    // A number times a sum would be expanded when parsed back.
    let trailing = den.iter().any(|f| matches!(f.node(), Node::Add(_)));
    if !cd.is_one() && !trailing {
        dparts.push(cd.numer().to_string());
    }
    for f in &den {
        let mut s = String::new();
        write_expr(&mut s, f, PRODUCT);
        dparts.push(s);
    }
    match dparts.len() {
        0 => {}
        1 => {
            out.push('/');
            // A single factor must bind tighter than the division.
            if den.len() == 1 && matches!(den[0].node(), Node::Mul(_)) {
                let _ = write!(out, "({})", dparts[0]);
            } else {
                out.push_str(&dparts[0]);
            }
        }
        _ => {
            let _ = write!(out, "/({})", dparts.join("*"));
        }
    }
    if trailing && !cd.is_one() {
        let _ = write!(out, "/{}", cd.numer());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_quotients_and_powers() {
        let x = Expr::sym("x");
        let y = Expr::sym("y");
        let a = Expr::param("a");
        assert_eq!((x.clone() / (y.clone() + 1)).to_string(), "x/(1 + y)");
        assert_eq!((Expr::rat(-1, 2) * &x / &y).to_string(), "-x/(2*y)");
        assert_eq!(Expr::pow(x.clone(), &a - 1).to_string(), "x^(-1 + a)");
        assert_eq!(Expr::sqrt(&x + 1).to_string(), "sqrt(1 + x)");
        assert_eq!(Expr::func("g", 2, &x * &y).to_string(), "g''(x*y)");
        assert_eq!((x.clone() - y.clone() * 3).to_string(), "x - 3*y");
        assert_eq!((Expr::rat(1, 2) / (&x + 1)).to_string(), "1/(1 + x)/2");
    }
}
