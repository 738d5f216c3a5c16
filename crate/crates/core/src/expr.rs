//! Small arithmetic expression language used by JSON descriptions of custom
//! weights, functions and kernels.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | call | '(' expr ')'
//! call    := name '(' expr (',' expr)* ')'
//! ```
//!
//! Variables: `x0, x1, ...` and `y0, y1, ...` (coordinates), `g` (family
//! index), constants `pi` and `e`. Functions: `pow, exp, ln, sqrt, abs, sin,
//! cos, min, max`, and `norm(x)` / `norm(y)` for the Euclidean norm.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    X(usize),
    Y(usize),
    Index,
    NormX,
    NormY,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Min,
    Max,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// Parsed expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

/// Variable values for one evaluation.
#[derive(Clone, Copy, Debug)]
pub struct Bindings<'a, T> {
    pub x: &'a [T],
    pub y: &'a [T],
    pub index: Option<T>,
}

impl<'a, T> Bindings<'a, T> {
    pub fn x(x: &'a [T]) -> Self {
        Self {
            x,
            y: &[],
            index: None,
        }
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expr(format!(
                "unexpected trailing input in `{source}`"
            )));
        }
        Ok(Self {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Highest `x` / `y` coordinate index referenced, or `None` if unused.
    pub fn max_indices(&self) -> (Option<usize>, Option<usize>) {
        fn walk(n: &Node, acc: &mut (Option<usize>, Option<usize>)) {
            match n {
                Node::X(i) => acc.0 = Some(acc.0.map_or(*i, |m| m.max(*i))),
                Node::Y(i) => acc.1 = Some(acc.1.map_or(*i, |m| m.max(*i))),
                Node::Neg(a) => walk(a, acc),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b) => {
                    walk(a, acc);
                    walk(b, acc);
                }
                Node::Call(_, args) => args.iter().for_each(|a| walk(a, acc)),
                _ => {}
            }
        }
        let mut acc = (None, None);
        walk(&self.root, &mut acc);
        acc
    }

    /// Checks that every referenced coordinate exists for the given dimensions.
    pub fn check_dims(&self, x_dim: usize, y_dim: usize) -> Result<()> {
        let (mx, my) = self.max_indices();
        if mx.is_some_and(|i| i >= x_dim) || my.is_some_and(|i| i >= y_dim) {
            return Err(Error::Expr(format!(
                "`{}` references coordinates beyond x-dimension {x_dim} / y-dimension {y_dim}",
                self.source
            )));
        }
        Ok(())
    }

    pub fn eval<T: Scalar>(&self, b: &Bindings<'_, T>) -> T {
        eval_node(&self.root, b)
    }
}

fn eval_node<T: Scalar>(n: &Node, b: &Bindings<'_, T>) -> T {
    match n {
        Node::Num(v) => T::lit(*v),
        Node::X(i) => b.x.get(*i).copied().unwrap_or_else(T::nan),
        Node::Y(i) => b.y.get(*i).copied().unwrap_or_else(T::nan),
        Node::Index => b.index.unwrap_or_else(T::nan),
        Node::NormX => crate::scalar::euclidean_norm(b.x),
        Node::NormY => crate::scalar::euclidean_norm(b.y),
        Node::Neg(a) => -eval_node(a, b),
        Node::Add(l, r) => eval_node(l, b) + eval_node(r, b),
        Node::Sub(l, r) => eval_node(l, b) - eval_node(r, b),
        Node::Mul(l, r) => eval_node(l, b) * eval_node(r, b),
        Node::Div(l, r) => eval_node(l, b) / eval_node(r, b),
        Node::Pow(l, r) => pow(eval_node(l, b), eval_node(r, b)),
        Node::Call(f, args) => {
            let a = eval_node(&args[0], b);
            match f {
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs => a.abs(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Min => a.min(eval_node(&args[1], b)),
                Func::Max => a.max(eval_node(&args[1], b)),
            }
        }
    }
}

fn pow<T: Scalar>(base: T, e: T) -> T {
    if e.fract().is_zero() && e.abs() < T::lit(64.0) {
        base.powi(e.to_i32().unwrap_or(0))
    } else {
        base.powf(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
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
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expr(format!("bad number `{text}`")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Expr(format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.eat('^') {
            Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn primary(&mut self) -> Result<Node> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    self.call(&name)
                } else {
                    variable(&name)
                }
            }
            other => Err(Error::Expr(format!("unexpected token {other:?}"))),
        }
    }

    fn call(&mut self, name: &str) -> Result<Node> {
        if name == "norm" {
            let arg = match self.tokens.get(self.pos) {
                Some(Token::Ident(v)) if v == "x" => Node::NormX,
                Some(Token::Ident(v)) if v == "y" => Node::NormY,
                _ => return Err(Error::Expr("norm() takes `x` or `y`".into())),
            };
            self.pos += 1;
            self.expect(')')?;
            return Ok(arg);
        }
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        if name == "pow" {
            if args.len() != 2 {
                return Err(Error::Expr("pow() takes two arguments".into()));
            }
            let e = args.pop().expect("two args");
            let b = args.pop().expect("two args");
            return Ok(Node::Pow(Box::new(b), Box::new(e)));
        }
        let f = match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return Err(Error::Expr(format!("unknown function `{name}`"))),
        };
        if args.len() != f.arity() {
            return Err(Error::Expr(format!(
                "{name}() takes {} argument(s)",
                f.arity()
            )));
        }
        Ok(Node::Call(f, args))
    }
}

fn variable(name: &str) -> Result<Node> {
    match name {
        "g" => return Ok(Node::Index),
        "pi" => return Ok(Node::Num(std::f64::consts::PI)),
        "e" => return Ok(Node::Num(std::f64::consts::E)),
        _ => {}
    }
    let (head, tail) = name.split_at(1);
    if let Ok(i) = tail.parse::<usize>() {
        match head {
            "x" => return Ok(Node::X(i)),
            "y" => return Ok(Node::Y(i)),
            _ => {}
        }
    }
    Err(Error::Expr(format!("unknown variable `{name}`")))
}
