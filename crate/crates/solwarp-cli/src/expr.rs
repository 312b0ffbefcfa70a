//! Scalar-field expression language: variables x1..xn, literals, the four
//! arithmetic operators, `^` with constant exponents, unary minus, the
//! usual transcendental functions and the built-in `norm2(x)`.
//!
//! Precedence, tightest first: `^` (right-associative), unary `-`,
//! `*` `/`, `+` `-`. Exponents are restricted to constant subexpressions
//! so jets stay well-defined when the base can be nonpositive.

use std::collections::BTreeMap;
use std::fmt;

use solwarp_core::chart::ScalarField;
use solwarp_core::jets::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the declared variable list.
    Var(usize, String),
    /// Sum of squares of all declared variables.
    Norm2,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Exponent folded to a constant at parse time.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError {
                    pos: start,
                    message: format!("malformed number `{s}`"),
                })?;
                out.push((start, Tok::Num(v)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    pos: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

const MAX_NESTING: usize = 256;

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
    vars: &'a [String],
    consts: &'a BTreeMap<String, f64>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            got => Err(ParseError {
                pos,
                message: format!("expected {what}, found {got:?}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        // bounded recursion keeps adversarial nesting from blowing the stack
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError {
                pos: self.here(),
                message: format!("expression nests deeper than {MAX_NESTING} levels"),
            });
        }
        let result = self.expr_inner();
        self.depth -= 1;
        result
    }

    fn expr_inner(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError {
                pos: self.here(),
                message: format!("expression nests deeper than {MAX_NESTING} levels"),
            });
        }
        let result = self.factor_inner();
        self.depth -= 1;
        result
    }

    fn factor_inner(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            // fold a literal so printing "-2" round-trips to the same tree
            return Ok(match inner {
                Expr::Num(v) => Expr::Num(-v),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let caret_pos = self.here();
            self.bump();
            let exponent = self.factor()?;
            let value = const_eval(&exponent).ok_or_else(|| ParseError {
                pos: caret_pos,
                message: "exponent of `^` must be a constant expression".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), value));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident(pos, name),
            got => Err(ParseError {
                pos,
                message: format!("expected a value, found {got:?}"),
            }),
        }
    }

    fn ident(&mut self, pos: usize, name: String) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if name == "norm2" {
            self.expect(Tok::LParen, "`(` after norm2")?;
            let arg_pos = self.here();
            match self.bump() {
                Some(Tok::Ident(v)) if v == "x" => {}
                got => {
                    return Err(ParseError {
                        pos: arg_pos,
                        message: format!("norm2 takes the coordinate vector `x`, found {got:?}"),
                    })
                }
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::Norm2);
        }
        if let Some(idx) = self.vars.iter().position(|v| *v == name) {
            return Ok(Expr::Var(idx, name));
        }
        if let Some(value) = self.consts.get(&name) {
            return Ok(Expr::Num(*value));
        }
        Err(ParseError {
            pos,
            message: format!(
                "unknown identifier `{name}`; declared variables: {}",
                self.vars.join(", ")
            ),
        })
    }
}

fn const_eval(e: &Expr) -> Option<f64> {
    Some(match e {
        Expr::Num(v) => *v,
        Expr::Var(..) | Expr::Norm2 => return None,
        Expr::Neg(a) => -const_eval(a)?,
        Expr::Add(a, b) => const_eval(a)? + const_eval(b)?,
        Expr::Sub(a, b) => const_eval(a)? - const_eval(b)?,
        Expr::Mul(a, b) => const_eval(a)? * const_eval(b)?,
        Expr::Div(a, b) => const_eval(a)? / const_eval(b)?,
        Expr::Pow(a, p) => const_eval(a)?.powf(*p),
        Expr::Call(f, a) => {
            let v = const_eval(a)?;
            match f {
                Func::Exp => v.exp(),
                Func::Log => v.ln(),
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Sinh => v.sinh(),
                Func::Cosh => v.cosh(),
                Func::Sqrt => v.sqrt(),
            }
        }
    })
}

/// Parse an expression over the declared variables, substituting bound
/// constants by value.
pub fn parse_expr(
    text: &str,
    vars: &[String],
    consts: &BTreeMap<String, f64>,
) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError {
            pos: 0,
            message: "empty expression".into(),
        });
    }
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.len(),
        depth: 0,
        vars,
        consts,
    };
    let e = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(ParseError {
            pos: parser.here(),
            message: "trailing input after expression".into(),
        });
    }
    Ok(e)
}

/// Default variable names x1..xn.
pub fn coordinate_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

impl Expr {
    pub fn eval_jet(&self, seeds: &[Jet2]) -> Jet2 {
        let d = seeds[0].dim();
        match self {
            Expr::Num(v) => Jet2::constant(*v, d),
            Expr::Var(i, _) => seeds[*i],
            Expr::Norm2 => {
                let mut s = Jet2::constant(0.0, d);
                for x in seeds {
                    s = s + x.abs2();
                }
                s
            }
            Expr::Neg(a) => -a.eval_jet(seeds),
            Expr::Add(a, b) => a.eval_jet(seeds) + b.eval_jet(seeds),
            Expr::Sub(a, b) => a.eval_jet(seeds) - b.eval_jet(seeds),
            Expr::Mul(a, b) => a.eval_jet(seeds) * b.eval_jet(seeds),
            Expr::Div(a, b) => a.eval_jet(seeds) / b.eval_jet(seeds),
            Expr::Pow(a, p) => a.eval_jet(seeds).powf(*p),
            Expr::Call(f, a) => {
                let v = a.eval_jet(seeds);
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => v.log(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// Plain f64 evaluation, used to cross-check the jet value lane.
    pub fn eval_value(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i, _) => x[*i],
            Expr::Norm2 => x.iter().map(|v| v * v).sum(),
            Expr::Neg(a) => -a.eval_value(x),
            Expr::Add(a, b) => a.eval_value(x) + b.eval_value(x),
            Expr::Sub(a, b) => a.eval_value(x) - b.eval_value(x),
            Expr::Mul(a, b) => a.eval_value(x) * b.eval_value(x),
            Expr::Div(a, b) => a.eval_value(x) / b.eval_value(x),
            Expr::Pow(a, p) => a.eval_value(x).powf(*p),
            Expr::Call(f, a) => {
                let v = a.eval_value(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sinh => v.sinh(),
                    Func::Cosh => v.cosh(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// Package the expression as a chart scalar field.
    pub fn into_field(self, dim: usize) -> ScalarField {
        ScalarField::new(dim, move |seeds| self.eval_jet(seeds))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Num(v) if *v < 0.0 => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.precedence();
        if me < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(_, name) => write!(f, "{name}"),
            Expr::Norm2 => write!(f, "norm2(x)"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(a, p) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^{p}")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Evaluate an expression as a jet at a point, converting domain faults
/// into point-attributed errors.
pub fn eval_expr_jet(expr: &Expr, x: &[f64]) -> solwarp_core::Result<Jet2> {
    let seeds = Jet2::seed_point(x)?;
    expr.eval_jet(&seeds).into_result(x)
}
