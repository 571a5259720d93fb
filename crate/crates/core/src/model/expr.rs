//! A small expression language for complex-valued functions of `t`.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | '+' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 't' | 'i' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func  := exp | sin | cos | sqrt | log
//! ```
//!
//! Literals are kept as decimal text and rounded only at evaluation time, so
//! the same expression evaluates correctly at any precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::scalar::{Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(String),
    Var,
    I,
    Pi,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Parsed expression together with its source text.
#[derive(Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens: &tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in `{src}`")));
        }
        Ok(Expr { source: src.trim().to_string(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        !mentions_var(&self.root)
    }

    pub fn eval(&self, t: &Cplx) -> Cplx {
        eval(&self.root, t, t.prec())
    }

    pub fn eval_real(&self, t: &Real) -> Cplx {
        self.eval(&Cplx::from_real(t))
    }

    /// Value of a constant expression at `prec` bits.
    pub fn constant(&self, prec: u32) -> Result<Cplx> {
        if !self.is_constant() {
            return Err(Error::Parse(format!("`{}` is not a constant", self.source)));
        }
        Ok(self.eval(&Cplx::zero(prec)))
    }

    /// Pre-rounds literals to `prec` bits for repeated evaluation.
    pub fn compile(&self, prec: u32) -> CompiledExpr {
        CompiledExpr { root: compile(&self.root, prec), prec }
    }

    /// `factor * (self)`.
    pub fn scaled(&self, factor: &str) -> Result<Expr> {
        Expr::parse(&format!("({factor})*({})", self.source))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.source)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// An [`Expr`] with literals already rounded to a fixed precision.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    root: CNode,
    prec: u32,
}

#[derive(Debug, Clone)]
enum CNode {
    Val(Cplx),
    Var,
    Neg(Box<CNode>),
    Add(Box<CNode>, Box<CNode>),
    Sub(Box<CNode>, Box<CNode>),
    Mul(Box<CNode>, Box<CNode>),
    Div(Box<CNode>, Box<CNode>),
    PowI(Box<CNode>, i64),
    Pow(Box<CNode>, Box<CNode>),
    Call(Func, Box<CNode>),
}

impl CompiledExpr {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn eval(&self, t: &Cplx) -> Cplx {
        ceval(&self.root, t)
    }

    pub fn eval_real(&self, t: &Real) -> Cplx {
        ceval(&self.root, &Cplx::from_real(t))
    }
}

fn compile(n: &Node, prec: u32) -> CNode {
    let b = |x: &Node| Box::new(compile(x, prec));
    match n {
        Node::Num(s) => CNode::Val(Cplx::from_real(&Real::parse(s, prec).expect("validated at parse time"))),
        Node::Var => CNode::Var,
        Node::I => CNode::Val(Cplx::i(prec)),
        Node::Pi => CNode::Val(Cplx::from_real(&Real::pi(prec))),
        Node::Neg(a) => CNode::Neg(b(a)),
        Node::Add(x, y) => CNode::Add(b(x), b(y)),
        Node::Sub(x, y) => CNode::Sub(b(x), b(y)),
        Node::Mul(x, y) => CNode::Mul(b(x), b(y)),
        Node::Div(x, y) => CNode::Div(b(x), b(y)),
        Node::Pow(x, y) => match integer_literal(y) {
            Some(k) => CNode::PowI(b(x), k),
            None => CNode::Pow(b(x), b(y)),
        },
        Node::Call(f, a) => CNode::Call(*f, b(a)),
    }
}

fn ceval(n: &CNode, t: &Cplx) -> Cplx {
    match n {
        CNode::Val(v) => v.clone(),
        CNode::Var => t.clone(),
        CNode::Neg(a) => -ceval(a, t),
        CNode::Add(a, b) => ceval(a, t) + ceval(b, t),
        CNode::Sub(a, b) => ceval(a, t) - ceval(b, t),
        CNode::Mul(a, b) => ceval(a, t) * ceval(b, t),
        CNode::Div(a, b) => ceval(a, t) / ceval(b, t),
        CNode::PowI(a, k) => ceval(a, t).powi(*k),
        CNode::Pow(a, b) => ceval(a, t).powc(&ceval(b, t)),
        CNode::Call(f, a) => {
            let x = ceval(a, t);
            match f {
                Func::Exp => x.exp(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => x.sqrt(),
                Func::Log => x.ln(),
            }
        }
    }
}

/// Parses a constant real expression such as `"0.7"` or `"-1/3"`.
pub fn parse_real(src: &str, prec: u32) -> Result<Real> {
    let z = Expr::parse(src)?.constant(prec)?;
    if !z.im().is_zero() {
        return Err(Error::Parse(format!("`{src}` is not real")));
    }
    Ok(z.re())
}

fn mentions_var(n: &Node) -> bool {
    match n {
        Node::Var => true,
        Node::Num(_) | Node::I | Node::Pi => false,
        Node::Neg(a) | Node::Call(_, a) => mentions_var(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            mentions_var(a) || mentions_var(b)
        }
    }
}

fn integer_literal(n: &Node) -> Option<i64> {
    match n {
        Node::Num(s) if s.chars().all(|c| c.is_ascii_digit()) && s.len() < 10 => s.parse().ok(),
        Node::Neg(a) => integer_literal(a).map(|k| -k),
        _ => None,
    }
}

fn eval(n: &Node, t: &Cplx, prec: u32) -> Cplx {
    match n {
        Node::Num(s) => Cplx::from_real(&Real::parse(s, prec).expect("validated at parse time")),
        Node::Var => t.clone(),
        Node::I => Cplx::i(prec),
        Node::Pi => Cplx::from_real(&Real::pi(prec)),
        Node::Neg(a) => -eval(a, t, prec),
        Node::Add(a, b) => eval(a, t, prec) + eval(b, t, prec),
        Node::Sub(a, b) => eval(a, t, prec) - eval(b, t, prec),
        Node::Mul(a, b) => eval(a, t, prec) * eval(b, t, prec),
        Node::Div(a, b) => eval(a, t, prec) / eval(b, t, prec),
        Node::Pow(a, b) => {
            let base = eval(a, t, prec);
            match integer_literal(b) {
                Some(k) => base.powi(k),
                None => base.powc(&eval(b, t, prec)),
            }
        }
        Node::Call(f, a) => {
            let x = eval(a, t, prec);
            match f {
                Func::Exp => x.exp(),
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => x.sqrt(),
                Func::Log => x.ln(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit: String = chars[start..i].iter().collect();
            if Real::parse(&lit, 64).is_none() {
                return Err(Error::Parse(format!("bad number `{lit}`")));
            }
            out.push(Tok::Num(lit));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Node::Mul(lhs.into(), rhs.into()) } else { Node::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(self.unary()?.into()))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Num(s)) => Ok(Node::Num(s)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "t" => return Ok(Node::Var),
                    "i" => return Ok(Node::I),
                    "pi" => return Ok(Node::Pi),
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    "log" => Func::Log,
                    other => return Err(Error::Parse(format!("unknown identifier `{other}`"))),
                };
                match self.next() {
                    Some(Tok::LParen) => {}
                    _ => return Err(Error::Parse(format!("`{name}` must be followed by `(`"))),
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Node::Call(func, arg.into()))
            }
            Some(tok) => Err(Error::Parse(format!("unexpected token {tok:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::RParen) => Ok(()),
            _ => Err(Error::Parse("missing `)`".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, re: f64, im: f64) -> Cplx {
        Expr::parse(src).unwrap().eval(&Cplx::from_f64(re, im, 200))
    }

    #[test]
    fn precedence() {
        assert!((at("1+2*3^2", 0.0, 0.0) - 19.0).abs() < 1e-50);
        assert!((at("-2^2", 0.0, 0.0) + 4.0).abs() < 1e-50);
        assert!((at("2^3^2", 0.0, 0.0) - 512.0).abs() < 1e-50);
        assert!((at("(1+t)/2", 3.0, 0.0) - 2.0).abs() < 1e-50);
    }

    #[test]
    fn complex_functions() {
        // exp(i t) at t = pi/2 is i
        let z = Expr::parse("exp(i*t)").unwrap().eval_real(&(Real::pi(200) / 2.0));
        assert!((z - Cplx::i(200)).abs() < 1e-50);
        assert!((at("sqrt(t)", -4.0, 0.0) - Cplx::from_f64(0.0, 2.0, 200)).abs() < 1e-50);
        assert!((at("sin(t)^2+cos(t)^2", 0.3, 0.7) - 1.0).abs() < 1e-50);
    }

    #[test]
    fn literals_follow_precision() {
        let e = Expr::parse("0.1").unwrap();
        let lo = e.constant(64).unwrap().re();
        let hi = e.constant(512).unwrap().re();
        assert!((hi - &Real::ratio(1, 10, 512)).abs() < 1e-150);
        assert!((lo.with_prec(512) - Real::ratio(1, 10, 512)).abs() > 1e-150);
        assert!((parse_real("1/120", 256).unwrap() * 120.0 - 1.0).abs() < 1e-70);
        assert!((parse_real("1e-3", 256).unwrap() - Real::ratio(1, 1000, 256)).abs() < 1e-75);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("foo(t)").is_err());
        assert!(Expr::parse("(1+t").is_err());
        assert!(Expr::parse("1 $ 2").is_err());
        assert!(parse_real("t", 64).is_err());
        assert!(parse_real("i", 64).is_err());
    }

    #[test]
    fn compiled_agrees() {
        let e = Expr::parse("7*pi*exp(i*t) + (t-0.7)^6/120 + t^0.5").unwrap();
        let c = e.compile(256);
        let t = Cplx::from_f64(0.3, -0.2, 256);
        assert!((e.eval(&t) - c.eval(&t)).abs() < 1e-70);
    }

    #[test]
    fn scaling_wraps_source() {
        let e = Expr::parse("t+1").unwrap().scaled("3").unwrap();
        assert_eq!(e.source(), "(3)*(t+1)");
        assert!(!e.is_constant());
    }
}
