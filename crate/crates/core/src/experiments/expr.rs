//! Integer-valued arithmetic over scenario variables.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | atom
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := floor | ceil | ln | sqrt
//! ```
//!
//! Arithmetic stays in exact rationals until `ln` or an irrational `sqrt`
//! forces a switch to `f64`, so `floor(0.03*n)` is exact for every `n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(BigRational),
    Var(String),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Floor,
    Ceil,
    Ln,
    Sqrt,
}

/// A parsed expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
}

/// Variable bindings.
pub type Env = BTreeMap<&'static str, u64>;

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Exact(BigRational),
    Approx(f64),
}

impl Value {
    fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Approx(x) => *x,
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, String> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(format!("unexpected `{}`", p.tokens[p.pos]));
        }
        Ok(Self {
            src: src.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    /// Evaluates to a non-negative integer.
    pub fn eval(&self, env: &Env) -> Result<u64, String> {
        match eval(&self.root, env)? {
            Value::Exact(r) => {
                if !r.is_integer() {
                    return Err(format!(
                        "`{}` is not an integer ({r}); use floor or ceil",
                        self.src
                    ));
                }
                if r.is_negative() {
                    return Err(format!("`{}` is negative ({r})", self.src));
                }
                r.to_integer()
                    .to_u64()
                    .ok_or_else(|| format!("`{}` does not fit in 64 bits", self.src))
            }
            Value::Approx(x) => {
                if !x.is_finite() || x.fract() != 0.0 {
                    return Err(format!(
                        "`{}` is not an integer ({x}); use floor or ceil",
                        self.src
                    ));
                }
                if x < 0.0 {
                    return Err(format!("`{}` is negative ({x})", self.src));
                }
                if x >= u64::MAX as f64 {
                    return Err(format!("`{}` does not fit in 64 bits", self.src));
                }
                Ok(x as u64)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

fn eval(node: &Node, env: &Env) -> Result<Value, String> {
    Ok(match node {
        Node::Num(r) => Value::Exact(r.clone()),
        Node::Var(name) => match env.get(name.as_str()) {
            Some(&v) => Value::Exact(BigRational::from_integer(v.into())),
            None => return Err(format!("unknown variable `{name}`")),
        },
        Node::Neg(a) => match eval(a, env)? {
            Value::Exact(r) => Value::Exact(-r),
            Value::Approx(x) => Value::Approx(-x),
        },
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, env)?, eval(b, env)?);
            if let (Value::Exact(x), Value::Exact(y)) = (&a, &b) {
                Value::Exact(match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => {
                        if y.is_zero() {
                            return Err("division by zero".into());
                        }
                        x / y
                    }
                })
            } else {
                let (x, y) = (a.to_f64(), b.to_f64());
                Value::Approx(match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => {
                        if y == 0.0 {
                            return Err("division by zero".into());
                        }
                        x / y
                    }
                })
            }
        }
        Node::Call(func, a) => {
            let a = eval(a, env)?;
            match (func, a) {
                (Func::Floor, Value::Exact(r)) => Value::Exact(r.floor()),
                (Func::Ceil, Value::Exact(r)) => Value::Exact(r.ceil()),
                (Func::Floor, Value::Approx(x)) => Value::Approx(x.floor()),
                (Func::Ceil, Value::Approx(x)) => Value::Approx(x.ceil()),
                (Func::Sqrt, v) => {
                    if v.to_f64() < 0.0 {
                        return Err("sqrt of a negative value".into());
                    }
                    match exact_sqrt(&v) {
                        Some(r) => Value::Exact(r),
                        None => Value::Approx(v.to_f64().sqrt()),
                    }
                }
                (Func::Ln, v) => {
                    let x = v.to_f64();
                    if x <= 0.0 {
                        return Err("ln of a non-positive value".into());
                    }
                    if x == 1.0 {
                        Value::Exact(BigRational::zero())
                    } else {
                        Value::Approx(x.ln())
                    }
                }
            }
        }
    })
}

/// Square root of a rational whose numerator and denominator are perfect
/// squares.
fn exact_sqrt(v: &Value) -> Option<BigRational> {
    let Value::Exact(r) = v else { return None };
    let (num, den) = (r.numer(), r.denom());
    let (sn, sd): (BigInt, BigInt) = (num.sqrt(), den.sqrt());
    (&sn * &sn == *num && &sd * &sd == *den).then(|| BigRational::new(sn, sd))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigRational),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(r) => write!(f, "{r}"),
            Token::Ident(s) => f.write_str(s),
            Token::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<Token>, String> {
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
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(decimal(&text)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected character `{c}` at offset {i}"));
        }
    }
    if out.is_empty() {
        return Err("empty expression".into());
    }
    Ok(out)
}

/// Parses a decimal literal exactly, e.g. `0.03` as 3/100.
fn decimal(text: &str) -> Result<BigRational, String> {
    let bad = || format!("malformed number `{text}`");
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(BigRational::new(num, den))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(t) => format!("expected `{c}`, found `{t}`"),
                None => format!("expected `{c}` at end of input"),
            })
        }
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, String> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, String> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(r)) => {
                self.pos += 1;
                Ok(Node::Num(r))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "floor" => Some(Func::Floor),
                    "ceil" => Some(Func::Ceil),
                    "ln" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                match func {
                    Some(f) => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(Node::Call(f, Box::new(arg)))
                    }
                    None => Ok(Node::Var(name)),
                }
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => Err(format!("unexpected `{t}`")),
            None => Err("unexpected end of expression".into()),
        }
    }
}
