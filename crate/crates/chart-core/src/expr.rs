//! Potential expressions, grammar version 1.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | ident | ident "(" expr ")" | "(" expr ")" | "|" expr "|" "^" "2"
//! ident   := q<k> | qb<k> | t | i | pi | <parameter>
//! funcs   := ln exp dilog conj re im abs2 sinh cosh
//! ```
//!
//! `q<k>` is the k-th chart coordinate (1-based), `qb<k>` its conjugate and
//! `t` the flow time. Exponents that are integers use repeated products.

use crate::ad::CJet;
use crate::error::{GkError, Result};
use crate::linalg::c;
use crate::potential::{check_real, Jet2, PotentialFn};
use crate::tensor::ChartPoint;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const GRAMMAR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Coord(usize),
    CoordBar(usize),
    Time,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    PowInt(Box<Node>, i32),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Ln,
    Exp,
    Dilog,
    Conj,
    Re,
    Im,
    Abs2,
    Sinh,
    Cosh,
}

impl Func {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "dilog" => Func::Dilog,
            "conj" => Func::Conj,
            "re" => Func::Re,
            "im" => Func::Im,
            "abs2" => Func::Abs2,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let save = i;
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text = &src[start..i];
            let v = text
                .parse::<f64>()
                .map_err(|_| GkError::Parse { offset: start, message: format!("bad number '{text}'") })?;
            out.push((start, Tok::Num(v)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()|".contains(ch) {
            out.push((i, Tok::Op(ch)));
            i += 1;
        } else {
            return Err(GkError::Parse { offset: i, message: format!("unexpected character '{ch}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    n: usize,
    params: &'a BTreeMap<String, f64>,
    end: usize,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(GkError::Parse { offset: self.offset(), message: message.into() })
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{op}'"))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let exponent = self.unary()?;
        if let Some(k) = integer_const(&exponent) {
            return Ok(Node::PowInt(Box::new(base), k));
        }
        Ok(Node::Pow(Box::new(base), Box::new(exponent)))
    }

    fn primary(&mut self) -> Result<Node> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Const(c(v, 0.0))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op('|') => {
                let e = self.expr()?;
                self.expect('|')?;
                self.expect('^')?;
                match self.toks.get(self.pos) {
                    Some((_, Tok::Num(v))) if *v == 2.0 => {
                        self.pos += 1;
                        Ok(Node::Call(Func::Abs2, Box::new(e)))
                    }
                    _ => self.err("only |expr|^2 is supported"),
                }
            }
            Tok::Ident(name) => {
                if self.peek_op() == Some('(') {
                    let Some(f) = Func::from_name(&name) else {
                        self.pos -= 1;
                        return self.err(format!("unknown function '{name}'"));
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                self.ident(&name)
            }
            Tok::Op(op) => {
                self.pos -= 1;
                self.err(format!("unexpected '{op}'"))
            }
        }
    }

    fn ident(&mut self, name: &str) -> Result<Node> {
        let coord = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix)?.parse::<usize>().ok()
        };
        if let Some(k) = coord("qb") {
            return self.coord_index(k).map(Node::CoordBar);
        }
        if let Some(k) = coord("q") {
            return self.coord_index(k).map(Node::Coord);
        }
        match name {
            "t" => Ok(Node::Time),
            "i" => Ok(Node::Const(c(0.0, 1.0))),
            "pi" => Ok(Node::Const(c(std::f64::consts::PI, 0.0))),
            _ => match self.params.get(name) {
                Some(v) => Ok(Node::Const(c(*v, 0.0))),
                None => {
                    self.pos -= 1;
                    self.err(format!("unknown identifier '{name}'"))
                }
            },
        }
    }

    fn coord_index(&mut self, k: usize) -> Result<usize> {
        if k == 0 || k > self.n {
            self.pos -= 1;
            return self.err(format!("coordinate index {k} outside 1..={}", self.n));
        }
        Ok(k - 1)
    }
}

fn integer_const(node: &Node) -> Option<i32> {
    let v = match node {
        Node::Const(z) if z.im == 0.0 => z.re,
        Node::Neg(inner) => match inner.as_ref() {
            Node::Const(z) if z.im == 0.0 => -z.re,
            _ => return None,
        },
        _ => return None,
    };
    (v.fract() == 0.0 && v.abs() < 1e6).then_some(v as i32)
}

/// A parsed expression over chart coordinates and time.
#[derive(Debug, Clone)]
pub struct Expr {
    pub source: String,
    pub n: usize,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str, n: usize, params: &BTreeMap<String, f64>) -> Result<Self> {
        let toks = tokenize(source)?;
        let mut p = Parser { toks, pos: 0, n, params, end: source.len() };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(Self { source: source.to_string(), n, root })
    }

    pub fn uses_time(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Time => true,
                Node::Const(_) | Node::Coord(_) | Node::CoordBar(_) => false,
                Node::Neg(a) | Node::PowInt(a, _) | Node::Call(_, a) => walk(a),
                Node::Bin(_, a, b) | Node::Pow(a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.root)
    }

    /// Evaluates on seeded coordinate jets at time t.
    pub fn eval(&self, q: &[CJet], t: f64) -> CJet {
        eval_node(&self.root, q, t)
    }

    /// Plain complex evaluation.
    pub fn eval_value(&self, coords: &[Complex64], t: f64) -> Complex64 {
        let q: Vec<CJet> = coords.iter().map(|z| CJet::constant(*z, 0)).collect();
        self.eval(&q, t).value()
    }
}

fn eval_node(node: &Node, q: &[CJet], t: f64) -> CJet {
    let nv = q.first().map(|x| x.nvars()).unwrap_or(0);
    match node {
        Node::Const(z) => CJet::constant(*z, nv),
        Node::Coord(k) => q[*k].clone(),
        Node::CoordBar(k) => q[*k].conj(),
        Node::Time => CJet::real(t, nv),
        Node::Neg(a) => -eval_node(a, q, t),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval_node(a, q, t), eval_node(b, q, t));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => x / y,
            }
        }
        Node::PowInt(a, k) => {
            let x = eval_node(a, q, t);
            let mut acc = CJet::real(1.0, nv);
            for _ in 0..k.unsigned_abs() {
                acc = acc * x.clone();
            }
            if *k < 0 {
                acc.recip()
            } else {
                acc
            }
        }
        Node::Pow(a, b) => (eval_node(b, q, t) * eval_node(a, q, t).ln()).exp(),
        Node::Call(f, a) => {
            let x = eval_node(a, q, t);
            match f {
                Func::Ln => x.ln(),
                Func::Exp => x.exp(),
                Func::Dilog => x.dilog(),
                Func::Conj => x.conj(),
                Func::Re => (x.clone() + x.conj()).scale(c(0.5, 0.0)),
                Func::Im => (x.clone() - x.conj()).scale(c(0.0, -0.5)),
                Func::Abs2 => x.abs2(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
            }
        }
    }
}

impl PotentialFn {
    /// Potential defined by an expression at a fixed time.
    pub fn from_expr(expr: Expr, t: f64) -> Self {
        let name = expr.source.clone();
        let n = expr.n;
        let expr = Arc::new(expr);
        PotentialFn::from_eval(name, n, move |z: &ChartPoint| {
            let q = CJet::seed(&z.coords);
            let k = expr.eval(&q, t);
            check_real(&k, z)?;
            Ok(Jet2::from_cjet(&k))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::eval_jet2;

    fn parse(s: &str) -> Result<Expr> {
        let mut p = BTreeMap::new();
        p.insert("C".to_string(), 2.0);
        Expr::parse(s, 2, &p)
    }

    #[test]
    fn precedence_and_powers() {
        let e = parse("1 + 2*3^2 - -4/2").unwrap();
        assert_eq!(e.eval_value(&[c(0.0, 0.0); 2], 0.0), c(21.0, 0.0));
        let e = parse("2^-1").unwrap();
        assert_eq!(e.eval_value(&[c(0.0, 0.0); 2], 0.0), c(0.5, 0.0));
    }

    #[test]
    fn coordinates_conjugates_and_modulus() {
        let e = parse("q1*qb1 - |q1|^2 + abs2(q2) - q2*conj(q2)").unwrap();
        let v = e.eval_value(&[c(0.3, 0.4), c(-1.0, 2.0)], 0.0);
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn parameters_and_time() {
        let e = parse("t*|q1|^2/C").unwrap();
        assert!(e.uses_time());
        assert_eq!(e.eval_value(&[c(1.0, 1.0), c(0.0, 0.0)], 0.5), c(0.5, 0.0));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("q1 + foo") {
            Err(GkError::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse("q3").is_err());
        assert!(parse("(q1").is_err());
        assert!(parse("q1 q2").is_err());
        assert!(parse("bogus(q1)").is_err());
    }

    #[test]
    fn expression_potential_matches_catalog() {
        let e = parse("|q1|^2/C - dilog(-|q2|^2)").unwrap();
        let k = PotentialFn::from_expr(e, 0.0);
        let z = ChartPoint::new(vec![c(0.2, -0.1), c(0.5, 0.3)]).unwrap();
        let a = eval_jet2(&k, &z).unwrap();
        let b = eval_jet2(&crate::potential::catalog::dilog_complete(2.0), &z).unwrap();
        assert!((a.value - b.value).abs() < 1e-14);
        assert!(crate::linalg::frob_c(&(&a.ddbar - &b.ddbar)) < 1e-14);
    }
}
