//! Pratt parser for the expression grammar.
//!
//! Binding powers: `+ -` 1/2, `* /` 3/4, prefix minus 5, `^` 7/6 (right
//! associative). Juxtaposition is rejected.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Result, SymError};
use crate::expr::{Elem, Expr};
use crate::Rational;

/// Names visible to the parser.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub symbols: BTreeSet<String>,
    pub params: BTreeSet<String>,
    pub funcs: BTreeSet<String>,
    /// Accept `y'` as the symbol named `y'`.
    pub allow_yprime: bool,
}

impl Scope {
    pub fn new<'a>(
        symbols: impl IntoIterator<Item = &'a str>,
        params: impl IntoIterator<Item = &'a str>,
        funcs: impl IntoIterator<Item = &'a str>,
    ) -> Scope {
        Scope {
            symbols: symbols.into_iter().map(String::from).collect(),
            params: params.into_iter().map(String::from).collect(),
            funcs: funcs.into_iter().map(String::from).collect(),
            allow_yprime: false,
        }
    }
}

/// Parse with symbols `x`, `y` plus the given parameters and functions.
pub fn parse(text: &str, params: &[&str], funcs: &[&str]) -> Result<Expr> {
    let scope = Scope::new(["x", "y"], params.iter().copied(), funcs.iter().copied());
    parse_in(text, &scope)
}

pub fn parse_in(text: &str, scope: &Scope) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        scope,
        provisional: Vec::new(),
        len: text.len(),
    };
    let e = p.expr(0)?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(p.error_at(t.pos, "operator or end of input")),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String, u32),
    Op(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut int_part = BigInt::zero();
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                int_part = int_part * 10 + (bytes[i] - b'0');
                i += 1;
            }
            let mut value = Rational::from_integer(int_part);
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let mut scale = Rational::one();
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    scale /= Rational::from_integer(10.into());
                    value += &scale * Rational::from_integer((bytes[i] - b'0').into());
                    i += 1;
                }
            }
            out.push(Token {
                tok: Tok::Num(value),
                pos: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = text[start..i].to_string();
            let mut primes = 0;
            while i < bytes.len() && bytes[i] == b'\'' {
                primes += 1;
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(name, primes),
                pos: start,
            });
            continue;
        }
        if "+-*/^(),".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                pos: start,
            });
            i += 1;
            continue;
        }
        return Err(SymError::Syntax {
            pos: start,
            expected: "number, name, operator or parenthesis".into(),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
    /// Names used inside an integral before its variable is known.
    provisional: Vec<BTreeSet<String>>,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.len, |t| t.pos)
    }

    fn error_at(&self, pos: usize, expected: &str) -> SymError {
        SymError::Syntax {
            pos,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        match self.peek() {
            Some(Token { tok: Tok::Op(c), .. }) if *c == op => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_at(self.here(), &format!("`{op}`"))),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        while let Some(t) = self.peek() {
            let op = match &t.tok {
                Tok::Op(c) if "+-*/^".contains(*c) => *c,
                Tok::Op(_) => break,
                _ => return Err(self.error_at(t.pos, "operator (juxtaposition is not allowed)")),
            };
            let (lbp, rbp) = match op {
                '+' | '-' => (1, 2),
                '*' | '/' => (3, 4),
                _ => (7, 6),
            };
            if lbp < min_bp {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                '/' => lhs / rhs,
                _ => Expr::pow(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let pos = self.here();
        let Some(t) = self.next() else {
            return Err(self.error_at(pos, "expression"));
        };
        match t.tok {
            Tok::Num(q) => Ok(Expr::num(q)),
            Tok::Op('-') => Ok(-self.expr(5)?),
            Tok::Op('+') => self.expr(5),
            Tok::Op('(') => {
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(_) => Err(self.error_at(pos, "expression")),
            Tok::Ident(name, primes) => self.ident(name, primes, pos),
        }
    }

    fn is_call(&self) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Op('('), .. }))
    }

    fn ident(&mut self, name: String, primes: u32, pos: usize) -> Result<Expr> {
        if self.is_call() {
            self.pos += 1;
            return self.call(name, primes, pos);
        }
        if primes > 0 {
            if self.scope.allow_yprime && name == "y" && primes == 1 {
                return Ok(Expr::sym("y'"));
            }
            return Err(self.error_at(pos + name.len(), "operator (derivatives are only allowed in ODE statements)"));
        }
        if self.scope.symbols.contains(&name) {
            return Ok(Expr::sym(&name));
        }
        if self.scope.params.contains(&name) {
            return Ok(Expr::param(&name));
        }
        if let Some(top) = self.provisional.last_mut() {
            if !self.scope.funcs.contains(&name) && Elem::from_name(&name).is_none() {
                top.insert(name.clone());
                return Ok(Expr::sym(&name));
            }
        }
        Err(SymError::UnknownIdentifier(name))
    }

    fn call(&mut self, name: String, primes: u32, pos: usize) -> Result<Expr> {
        if name == "Int" || name == "IntTo" {
            return self.integral(&name);
        }
        let arg = self.expr(0)?;
        self.expect(')')?;
        if primes == 0 {
            if name == "sqrt" {
                return Ok(Expr::sqrt(arg));
            }
            if let Some(k) = Elem::from_name(&name) {
                return Ok(Expr::elem(k, arg));
            }
        }
        if self.scope.funcs.contains(&name) {
            return Ok(Expr::func(&name, primes, arg));
        }
        if primes > 0 && Elem::from_name(&name).is_some() {
            return Err(self.error_at(pos, "declared function name"));
        }
        Err(SymError::UnknownIdentifier(name))
    }

    fn integral(&mut self, which: &str) -> Result<Expr> {
        self.provisional.push(BTreeSet::new());
        let integrand = self.expr(0);
        let used = self.provisional.pop().unwrap();
        let integrand = integrand?;
        self.expect(',')?;
        let pos = self.here();
        let var = match self.next() {
            Some(Token {
                tok: Tok::Ident(n, 0),
                ..
            }) => n,
            _ => return Err(self.error_at(pos, "integration variable name")),
        };
        if let Some(stray) = used.iter().find(|u| **u != var) {
            // Unknown names outside the integration variable propagate outward.
            match self.provisional.last_mut() {
                Some(outer) => {
                    outer.insert(stray.clone());
                }
                None => return Err(SymError::UnknownIdentifier(stray.clone())),
            }
        }
        if which == "Int" {
            self.expect(')')?;
            return Ok(Expr::int_of(integrand, &var));
        }
        self.expect(',')?;
        let upper = self.expr(0)?;
        self.expect(')')?;
        Ok(Expr::int_to(integrand, &var, upper))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_functions_and_params() {
        let e = parse("f(x)*g(x^a*y)", &["a"], &["f", "g"]).unwrap();
        let x = Expr::sym("x");
        let expect = Expr::func("f", 0, x.clone())
            * Expr::func("g", 0, Expr::pow(x, Expr::param("a")) * Expr::sym("y"));
        assert_eq!(e, expect);
    }

    #[test]
    fn folds_constants() {
        let e = parse("(2/4)*y + 0", &[], &[]).unwrap();
        assert_eq!(e, Expr::rat(1, 2) * Expr::sym("y"));
        assert_eq!(parse("0.25*x", &[], &[]).unwrap(), Expr::rat(1, 4) * Expr::sym("x"));
    }

    #[test]
    fn rejects_derivative_outside_odes() {
        assert!(matches!(parse("x*y'", &[], &[]), Err(SymError::Syntax { .. })));
    }

    #[test]
    fn rejects_juxtaposition_and_unknown_names() {
        assert!(matches!(parse("2 x", &[], &[]), Err(SymError::Syntax { .. })));
        assert_eq!(
            parse("x + b", &[], &[]),
            Err(SymError::UnknownIdentifier("b".into()))
        );
    }

    #[test]
    fn precedence() {
        let x = Expr::sym("x");
        assert_eq!(parse("-x^2", &[], &[]).unwrap(), -Expr::powi(x.clone(), 2));
        assert_eq!(
            parse("2^3^2", &[], &[]).unwrap(),
            Expr::int(512)
        );
        assert_eq!(parse("1 - x - x", &[], &[]).unwrap(), Expr::int(1) - x * 2);
    }

    #[test]
    fn integrals_bind_their_variable() {
        let e = parse("IntTo(1/g(z), z, x*y)", &[], &["g"]).unwrap();
        assert_eq!(e.free_names().len(), 2);
        assert!(parse("IntTo(1/g(w), z, x)", &[], &["g"]).is_err());
    }

    #[test]
    fn derivative_notation() {
        let e = parse("g''(x)", &[], &["g"]).unwrap();
        assert_eq!(e, Expr::func("g", 2, Expr::sym("x")));
    }
}
