//! Arithmetic expressions over named variables, dyadic literals and the
//! named constant `third`, compiled to either backend.
//!
//! Grammar, loosest first: `+`/`-`, `*`, `^n`, unary `-`. Named functions
//! are `neg`, `abs`, `mid`, `pow`, `add`, `mul`. Literals are `a`, `a/2^b`
//! or dyadic decimals such as `0.375`. Binary `-` parses as `a + neg(b)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::boehm::approx::{offset_for, pow_width_factor};
use crate::boehm::{
    abs_code, add_codes, join_prime, mul_codes, neg_code, pow_code, third, Approximator, CFunction,
    DyadicCode, TBEncoding, TernaryCode,
};
use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};
use crate::signed_digit::{self as sd, SDStream};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Lit(Dyadic),
    /// Named exact constant such as `third`.
    Const(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Mid(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Abs(Box<Expr>),
}

pub const NAMED_CONSTANTS: &[&str] = &["third"];

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn lit(d: Dyadic) -> Self {
        Expr::Lit(d)
    }

    pub fn neg(a: Expr) -> Self {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::add(a, Expr::neg(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn mid(a: Expr, b: Expr) -> Self {
        Expr::Mid(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: u32) -> Self {
        Expr::Pow(Box::new(a), n)
    }

    pub fn abs(a: Expr) -> Self {
        Expr::Abs(Box::new(a))
    }

    /// Free variable names in first-occurrence order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Lit(_) | Expr::Const(_) => {}
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Mid(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces every occurrence of variable `name` by `by`.
    pub fn substitute(&self, name: &str, by: &Expr) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(name, by));
        match self {
            Expr::Var(v) if v == name => by.clone(),
            Expr::Var(_) | Expr::Lit(_) | Expr::Const(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Abs(a) => Expr::Abs(s(a)),
            Expr::Pow(a, n) => Expr::Pow(s(a), *n),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Mid(a, b) => Expr::Mid(s(a), s(b)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) | Expr::Const(v) => write!(f, "{v}"),
            Expr::Lit(d) if d.is_negative() => write!(f, "(-{})", d.abs()),
            Expr::Lit(d) => write!(f, "{d}"),
            Expr::Neg(a) => write!(f, "neg({a})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Pow(a, n) => write!(f, "pow({a}, {n})"),
            Expr::Mid(a, b) => write!(f, "mid({a}, {b})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Ge,
    /// Closeness at level `ε`.
    Close,
}

/// `lhs op rhs`; the keyword `eps` denotes the constant zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Close => "==",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit()
            || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit())
        {
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            // `a/2^b` is a single literal token.
            if src[i..].starts_with("/2^") {
                i += 3;
                if i < b.len() && b[i] == b'-' {
                    i += 1;
                }
                let e0 = i;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if e0 == i {
                    return Err(ErsError::Parse {
                        pos: i,
                        msg: "expected exponent after /2^".into(),
                    });
                }
            }
            out.push((start, Tok::Num(src[start..i].to_string())));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        let two = src.get(i..i + 2).unwrap_or("");
        let sym: &'static str = match two {
            "<=" => "<=",
            ">=" => ">=",
            "==" => "==",
            _ => match c {
                '+' => "+",
                '-' => "-",
                '*' => "*",
                '^' => "^",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '/' => {
                    return Err(ErsError::Parse {
                        pos: i,
                        msg: "division is only allowed as a/2^b".into(),
                    })
                }
                _ => {
                    return Err(ErsError::Parse {
                        pos: i,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            },
        };
        i += sym.len();
        out.push((start, Tok::Sym(sym)));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(ErsError::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected {s:?}"))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat("-") {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.power()?;
        while self.eat("*") {
            acc = Expr::mul(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.eat("^") {
            let n = self.exponent()?;
            return Ok(Expr::pow(base, n));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => match s.parse::<u32>() {
                Ok(n) if n >= 1 => {
                    self.pos += 1;
                    Ok(n)
                }
                _ => self.err("exponent must be a positive integer"),
            },
            _ => self.err("expected exponent"),
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            if let Some(Tok::Num(_)) = self.peek() {
                if let Expr::Lit(d) = self.atom()? {
                    return Ok(Expr::Lit(-d));
                }
            }
            return Ok(Expr::neg(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                let d = s.parse::<Dyadic>().map_err(|e| ErsError::Parse {
                    pos: at,
                    msg: e.to_string(),
                })?;
                Ok(Expr::Lit(d))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat("(") {
                    return self.call(&name, at);
                }
                if NAMED_CONSTANTS.contains(&name.as_str()) {
                    Ok(Expr::Const(name))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.err("expected an expression"),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Expr> {
        let e = match name {
            "neg" | "abs" => {
                let a = self.expr()?;
                if name == "neg" {
                    Expr::neg(a)
                } else {
                    Expr::abs(a)
                }
            }
            "pow" => {
                let a = self.expr()?;
                self.expect(",")?;
                let n = self.exponent()?;
                Expr::pow(a, n)
            }
            "mid" | "add" | "mul" => {
                let a = self.expr()?;
                self.expect(",")?;
                let b = self.expr()?;
                match name {
                    "mid" => Expr::mid(a, b),
                    "add" => Expr::add(a, b),
                    _ => Expr::mul(a, b),
                }
            }
            _ => {
                return Err(ErsError::Parse {
                    pos: at,
                    msg: format!("unknown function {name:?}"),
                })
            }
        };
        self.expect(")")?;
        Ok(e)
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_comparison(src: &str) -> Result<Comparison> {
    let mut p = Parser::new(src)?;
    let lhs = p.expr()?;
    let op = if p.eat("<=") {
        CmpOp::Le
    } else if p.eat(">=") {
        CmpOp::Ge
    } else if p.eat("==") {
        CmpOp::Close
    } else {
        return p.err("expected <=, >= or ==");
    };
    let rhs = p.expr()?;
    p.finish()?;
    let zero_eps = |e: Expr| e.substitute("eps", &Expr::Lit(Dyadic::zero()));
    Ok(Comparison {
        lhs: zero_eps(lhs),
        op,
        rhs: zero_eps(rhs),
    })
}

// ---------------------------------------------------------------------------
// Boehm backend

/// Extra levels at which named constants are read relative to the inputs.
pub const CONST_EXTRA_LEVELS: i64 = 8;

#[derive(Clone)]
enum Node {
    Var(usize),
    Lit(DyadicCode),
    Tb(TBEncoding),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Mid(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Abs(Box<Node>),
}

fn lower(e: &Expr, vars: &[String], env: &HashMap<String, TBEncoding>) -> Result<Node> {
    let l = |x: &Expr| lower(x, vars, env).map(Box::new);
    Ok(match e {
        Expr::Var(v) => match vars.iter().position(|x| x == v) {
            Some(i) => Node::Var(i),
            None => match env.get(v) {
                Some(t) => Node::Tb(t.clone()),
                None => return Err(ErsError::Invalid(format!("unbound variable {v:?}"))),
            },
        },
        Expr::Lit(d) => Node::Lit(DyadicCode::point(d)),
        Expr::Const(c) => match (c.as_str(), env.get(c)) {
            (_, Some(t)) => Node::Tb(t.clone()),
            ("third", None) => Node::Tb(third()),
            _ => return Err(ErsError::Invalid(format!("unknown constant {c:?}"))),
        },
        Expr::Neg(a) => Node::Neg(l(a)?),
        Expr::Abs(a) => Node::Abs(l(a)?),
        Expr::Pow(a, n) => Node::Pow(l(a)?, *n),
        Expr::Add(a, b) => Node::Add(l(a)?, l(b)?),
        Expr::Mul(a, b) => Node::Mul(l(a)?, l(b)?),
        Expr::Mid(a, b) => Node::Mid(l(a)?, l(b)?),
    })
}

fn eval(n: &Node, args: &[DyadicCode], const_level: i64) -> DyadicCode {
    let ev = |x: &Node| eval(x, args, const_level);
    match n {
        Node::Var(i) => args[*i].clone(),
        Node::Lit(c) => c.clone(),
        Node::Tb(t) => TernaryCode {
            k: t.at(const_level),
            p: const_level,
        }
        .to_dyadic_code(),
        Node::Neg(a) => neg_code(&ev(a)),
        Node::Abs(a) => abs_code(&ev(a)),
        Node::Pow(a, k) => pow_code(&ev(a), *k),
        Node::Add(a, b) => add_codes(&ev(a), &ev(b)),
        Node::Mul(a, b) => mul_codes(&ev(a), &ev(b)),
        Node::Mid(a, b) => {
            let s = add_codes(&ev(a), &ev(b));
            DyadicCode {
                k: s.k,
                c: s.c,
                p: s.p + 1,
            }
        }
    }
}

/// Interval and width multipliers `(vars, constants)` of a node.
fn analyse(n: &Node, b: &[DyadicCode], cl: i64) -> (DyadicCode, Dyadic, Dyadic) {
    let an = |x: &Node| analyse(x, b, cl);
    let zero = Dyadic::zero;
    match n {
        Node::Var(i) => (b[*i].clone(), Dyadic::one(), zero()),
        Node::Lit(c) => (c.clone(), zero(), zero()),
        Node::Tb(_) => (eval(n, b, cl), zero(), Dyadic::one()),
        Node::Neg(a) => {
            let (i, v, c) = an(a);
            (neg_code(&i), v, c)
        }
        Node::Abs(a) => {
            let (i, v, c) = an(a);
            (abs_code(&i), v, c)
        }
        Node::Pow(a, k) => {
            let (i, v, c) = an(a);
            let f = pow_width_factor(&i.magnitude(), *k);
            (pow_code(&i, *k), &f * &v, &f * &c)
        }
        Node::Add(x, y) | Node::Mid(x, y) => {
            let (i1, v1, c1) = an(x);
            let (i2, v2, c2) = an(y);
            let s = add_codes(&i1, &i2);
            if let Node::Mid(..) = n {
                let h = Dyadic::from_parts(1, 1);
                (
                    DyadicCode {
                        k: s.k,
                        c: s.c,
                        p: s.p + 1,
                    },
                    &(&v1 + &v2) * &h,
                    &(&c1 + &c2) * &h,
                )
            } else {
                (s, &v1 + &v2, &c1 + &c2)
            }
        }
        Node::Mul(x, y) => {
            let (i1, v1, c1) = an(x);
            let (i2, v2, c2) = an(y);
            let (m1, m2) = (i1.magnitude(), i2.magnitude());
            let v = &(&m1 * &v2) + &(&m2 * &v1);
            let c = &(&m1 * &c2) + &(&m2 * &c1);
            (mul_codes(&i1, &i2), v, c)
        }
    }
}

/// Interval approximator of a compiled expression.
#[derive(Clone)]
pub struct ExprApprox {
    root: Node,
    arity: usize,
}

impl ExprApprox {
    fn const_level(args: &[DyadicCode]) -> i64 {
        args.iter().map(|a| a.p).max().unwrap_or(0).max(0) + CONST_EXTRA_LEVELS
    }
}

impl Approximator for ExprApprox {
    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, args: &[DyadicCode]) -> DyadicCode {
        eval(&self.root, args, Self::const_level(args))
    }

    fn offsets(&self, bounds: &[DyadicCode]) -> Vec<i64> {
        let (_, v, c) = analyse(&self.root, bounds, Self::const_level(bounds));
        let scale = Dyadic::from_parts(1, CONST_EXTRA_LEVELS);
        let o = offset_for(&(&v + &(&c * &scale)));
        vec![o; self.arity]
    }
}

/// Compiles `e` over the ordered variables `vars`. Variables absent from
/// `vars` are looked up in `env` as constants.
pub fn compile_boehm_with(
    e: &Expr,
    vars: &[&str],
    env: &HashMap<String, TBEncoding>,
) -> Result<CFunction> {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let root = lower(e, &vars, env)?;
    Ok(CFunction::from_arc(Arc::new(ExprApprox {
        root,
        arity: vars.len(),
    })))
}

pub fn compile_boehm(e: &Expr, vars: &[&str]) -> Result<CFunction> {
    compile_boehm_with(e, vars, &HashMap::new())
}

/// Smallest ternary code covering the image of `codes` under `f`.
pub fn image_code(f: &CFunction, codes: &[TernaryCode]) -> TernaryCode {
    join_prime(&f.bound(codes))
}

// ---------------------------------------------------------------------------
// Signed-digit backend

#[derive(Clone)]
enum SdNode {
    Var(usize),
    Stream(SDStream),
    Neg(Box<SdNode>),
    Mid(Box<SdNode>, Box<SdNode>),
    Mul(Box<SdNode>, Box<SdNode>),
    Pow(Box<SdNode>, u32),
}

/// A compiled signed-digit function with its composed modulus.
#[derive(Clone)]
pub struct SdFunction {
    root: SdNode,
    arity: usize,
}

fn lower_sd(e: &Expr, vars: &[String]) -> Result<SdNode> {
    let l = |x: &Expr| lower_sd(x, vars).map(Box::new);
    Ok(match e {
        Expr::Var(v) => match vars.iter().position(|x| x == v) {
            Some(i) => SdNode::Var(i),
            None => return Err(ErsError::Invalid(format!("unbound variable {v:?}"))),
        },
        Expr::Lit(d) => SdNode::Stream(sd::from_dyadic(d)?),
        Expr::Const(c) if c == "third" => SdNode::Stream(sd::third()),
        Expr::Const(c) => return Err(ErsError::Invalid(format!("unknown constant {c:?}"))),
        Expr::Neg(a) => SdNode::Neg(l(a)?),
        Expr::Mid(a, b) => SdNode::Mid(l(a)?, l(b)?),
        Expr::Mul(a, b) => SdNode::Mul(l(a)?, l(b)?),
        Expr::Pow(a, n) => SdNode::Pow(l(a)?, *n),
        Expr::Add(..) => {
            return Err(ErsError::Unsupported(
                "addition unavailable on signed-digit backend".into(),
            ))
        }
        Expr::Abs(_) => {
            return Err(ErsError::Unsupported(
                "abs unavailable on signed-digit backend".into(),
            ))
        }
    })
}

fn apply_sd(n: &SdNode, args: &[SDStream]) -> SDStream {
    let ap = |x: &SdNode| apply_sd(x, args);
    match n {
        SdNode::Var(i) => args[*i].clone(),
        SdNode::Stream(s) => s.clone(),
        SdNode::Neg(a) => sd::neg(&ap(a)),
        SdNode::Mid(a, b) => sd::mid(&ap(a), &ap(b)),
        SdNode::Mul(a, b) => sd::mul(&ap(a), &ap(b)),
        SdNode::Pow(a, k) => {
            let x = ap(a);
            let mut r = x.clone();
            for _ in 1..*k {
                r = sd::mul(&x, &r);
            }
            r
        }
    }
}

fn need_sd(n: &SdNode, eps: usize) -> usize {
    match n {
        SdNode::Var(_) => eps,
        SdNode::Stream(_) => 0,
        SdNode::Neg(a) => need_sd(a, sd::modulus::neg(eps)),
        SdNode::Mid(a, b) => {
            let (d1, d2) = sd::modulus::mid(eps);
            need_sd(a, d1).max(need_sd(b, d2))
        }
        SdNode::Mul(a, b) => {
            let (d1, d2) = sd::modulus::mul(eps);
            need_sd(a, d1).max(need_sd(b, d2))
        }
        SdNode::Pow(a, k) => {
            if *k <= 1 {
                return need_sd(a, eps);
            }
            let (d1, d2) = sd::modulus::mul(eps);
            need_sd(a, d1).max(need_sd(&SdNode::Pow(a.clone(), k - 1), d2))
        }
    }
}

impl SdFunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, args: &[SDStream]) -> SDStream {
        assert_eq!(args.len(), self.arity, "arity mismatch");
        apply_sd(&self.root, args)
    }

    /// Prefix length of every argument that fixes `ε` output digits.
    pub fn modulus(&self, eps: usize) -> usize {
        need_sd(&self.root, eps)
    }
}

pub fn compile_sd(e: &Expr, vars: &[&str]) -> Result<SdFunction> {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    Ok(SdFunction {
        root: lower_sd(e, &vars)?,
        arity: vars.len(),
    })
}
