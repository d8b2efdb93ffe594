use crate::expr::{Elem, Expr, Node};

/// Partial derivative with respect to the symbol or parameter `v`.
pub fn diff(e: &Expr, v: &str) -> Expr {
    if !e.contains_name(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(n) | Node::Param(n) => {
            if &**n == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::add(ts.iter().map(|t| diff(t, v))),
        Node::Mul(fs) => Expr::add((0..fs.len()).filter_map(|i| {
            let d = diff(&fs[i], v);
            if d.is_zero_literal() {
                return None;
            }
            let mut parts: Vec<Expr> = fs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, f)| f.clone())
                .collect();
            parts.push(d);
            Some(Expr::mul(parts))
        })),
        Node::Pow(b, x) => {
            if !x.contains_name(v) {
                Expr::mul([x.clone(), Expr::pow(b.clone(), x - 1), diff(b, v)])
            } else {
                let inner = diff(x, v) * Expr::ln(b.clone()) + x * diff(b, v) / b;
                e * inner
            }
        }
        Node::Elem(k, u) => {
            let du = diff(u, v);
            let outer = match k {
                Elem::Exp => e.clone(),
                Elem::Ln => Expr::recip(u.clone()),
                Elem::Sin => Expr::elem(Elem::Cos, u.clone()),
                Elem::Cos => -Expr::elem(Elem::Sin, u.clone()),
                Elem::Tan => Expr::powi(e.clone(), 2) + 1,
                Elem::Arctan => Expr::recip(Expr::powi(u.clone(), 2) + 1),
            };
            outer * du
        }
        Node::Func { name, order, arg } => Expr::func(name, order + 1, arg.clone()) * diff(arg, v),
        Node::Int { integrand, var } => {
            if &**var == v {
                integrand.clone()
            } else {
                Expr::int_of(diff(integrand, v), var)
            }
        }
        Node::IntTo {
            integrand,
            dummy,
            upper,
        } => {
            let boundary = integrand.subst(dummy, upper) * diff(upper, v);
            if &**dummy == v {
                boundary
            } else {
                boundary + Expr::int_to(diff(integrand, v), dummy, upper.clone())
            }
        }
    }
}

pub fn diff_n(e: &Expr, v: &str, n: usize) -> Expr {
    let mut d = e.clone();
    for _ in 0..n {
        d = diff(&d, v);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::normalize;

    #[test]
    fn chain_rule_on_arbitrary_function() {
        let x = Expr::sym("x");
        let y = Expr::sym("y");
        let xa = Expr::pow(x, Expr::param("a"));
        let g = Expr::func("g", 0, &xa * &y);
        assert_eq!(diff(&g, "y"), &xa * Expr::func("g", 1, xa.clone() * y));
    }

    #[test]
    fn fundamental_theorem_for_unevaluated_integrals() {
        let x = Expr::sym("x");
        let h = Expr::func("f", 0, x.clone()) * &x;
        assert_eq!(diff(&Expr::int_of(h.clone(), "x"), "x"), h);
    }

    #[test]
    fn integral_to_bound() {
        let x = Expr::sym("x");
        let y = Expr::sym("y");
        let z = Expr::sym("z");
        let g = Expr::recip(Expr::func("g", 0, z));
        let e = Expr::int_to(g, "z", &x * &y);
        let d = diff(&e, "y");
        assert_eq!(normalize(&d), normalize(&(x.clone() / Expr::func("g", 0, x * y))));
    }
}
