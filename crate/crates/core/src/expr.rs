//! Scalar field expressions over the chart coordinates `t` and `x`.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (("+"|"-") term)*
//! term  := unary (("*"|"/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := NUMBER | "t" | "x" | "pi" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC  := "sin"|"cos"|"tan"|"exp"|"log"|"abs"|"sqrt"
//! ```
//!
//! `^` is right-associative and `log` is the natural logarithm.

use std::fmt;

use crate::jet::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply<S: Scalar>(self, u: &S) -> S {
        match self {
            Func::Sin => u.sin(),
            Func::Cos => u.cos(),
            Func::Tan => u.tan(),
            Func::Exp => u.exp(),
            Func::Log => u.ln(),
            Func::Abs => u.abs(),
            Func::Sqrt => u.sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    X,
    Pi,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdent { pos: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("`{op}` produced a non-finite value")]
pub struct EvalError {
    pub op: String,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        if src.trim().is_empty() {
            return Err(ParseError::Empty);
        }
        let tokens = tokenize(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            end: src.len(),
        };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected {tok}"),
            }),
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        self.eval_with(&t, &x)
    }

    /// Evaluates over any [`Scalar`], e.g. jets for exact derivatives.
    /// Every intermediate value must be finite.
    pub fn eval_with<S: Scalar>(&self, t: &S, x: &S) -> Result<S, EvalError> {
        let out = match self {
            Expr::Num(c) => S::constant(*c),
            Expr::T => t.clone(),
            Expr::X => x.clone(),
            Expr::Pi => S::constant(std::f64::consts::PI),
            Expr::Neg(e) => -e.eval_with(t, x)?,
            Expr::Call(f, e) => {
                let u = e.eval_with(t, x)?;
                let v = f.apply(&u);
                check(v, f.name())?
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval_with(t, x)?;
                let b = b.eval_with(t, x)?;
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.pow(&b),
                };
                check(v, op.symbol())?
            }
        };
        Ok(out)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Binary(BinOp::Pow, ..) => 4,
            // negation always prints parenthesized, so it behaves like an atom
            _ => 5,
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{})", -c)
            }
            Expr::Num(c) => write!(f, "{c}"),
            Expr::T => write!(f, "t"),
            Expr::X => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(e) => {
                write!(f, "(-")?;
                e.write_prec(f, 3)?;
                write!(f, ")")
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.write_prec(f, 0)?;
                write!(f, ")")
            }
            Expr::Binary(op, a, b) => {
                let (lmin, rmin) = match op {
                    BinOp::Add | BinOp::Sub => (1, 2),
                    BinOp::Mul | BinOp::Div => (2, 3),
                    BinOp::Pow => (5, 4),
                };
                a.write_prec(f, lmin)?;
                match op {
                    BinOp::Pow => write!(f, "^")?,
                    _ => write!(f, " {} ", op.symbol())?,
                }
                b.write_prec(f, rmin)
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

fn check<S: Scalar>(v: S, op: &str) -> Result<S, EvalError> {
    if v.value().is_finite() {
        Ok(v)
    } else {
        Err(EvalError { op: op.to_string() })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "number {v}"),
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Op(c) => write!(f, "`{c}`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when a digit follows `e`, `e+` or `e-`
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: format!("malformed number `{text}`"),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Token::Op(c),
                '(' => Token::LParen,
                ')' => Token::RParen,
                _ => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push((start, tok));
            i += c.len_utf8();
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Token)> {
        self.tokens.get(self.pos).map(|(p, t)| (*p, t))
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some((_, Token::Op(c))) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.bump() {
            Some((_, Token::RParen)) => Ok(()),
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                msg: format!("expected `)`, found {tok}"),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: "expected `)`, found end of input".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some((_, Token::Num(v))) => Ok(Expr::Num(v)),
            Some((_, Token::LParen)) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some((pos, Token::Ident(name))) => match name.as_str() {
                "t" => Ok(Expr::T),
                "x" => Ok(Expr::X),
                "pi" => Ok(Expr::Pi),
                other => {
                    let func = Func::from_name(other).ok_or_else(|| ParseError::UnknownIdent {
                        pos,
                        name: other.to_string(),
                    })?;
                    match self.bump() {
                        Some((_, Token::LParen)) => {}
                        Some((p, tok)) => {
                            return Err(ParseError::Syntax {
                                pos: p,
                                msg: format!("expected `(` after `{other}`, found {tok}"),
                            })
                        }
                        None => {
                            return Err(ParseError::Syntax {
                                pos: self.end,
                                msg: format!("expected `(` after `{other}`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            Some((pos, tok)) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected {tok}"),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ev(src: &str, t: f64, x: f64) -> f64 {
        Expr::parse(src).unwrap().eval(t, x).unwrap()
    }

    #[test]
    fn sum_of_squares() {
        assert!((ev("t^2 + x^2", 0.6, 0.8) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_quarter_turn() {
        assert!(ev("cos(2*pi*x)", 0.0, 0.25).abs() < 1e-15);
    }

    #[test]
    fn null_curve_expression() {
        // sin(pi/4) + cos(pi/4) = sqrt(2), so the value is -ln(2) / (2 pi)
        let want = -std::f64::consts::LN_2 / (2.0 * PI);
        let got = ev("-(1/pi)*log(abs(sin(pi*x)+cos(pi*x)))", 0.0, 0.25);
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        assert!((got + 0.110318).abs() < 1e-6);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("1.5e1 + .5 + 2E-1", 0.0, 0.0), 15.7);
        assert_eq!(ev("t*x", 3.0, 4.0), 12.0);
    }

    #[test]
    fn error_positions() {
        assert_eq!(Expr::parse("   "), Err(ParseError::Empty));
        assert_eq!(
            Expr::parse("t + y"),
            Err(ParseError::UnknownIdent {
                pos: 4,
                name: "y".into()
            })
        );
        assert!(matches!(Expr::parse("(t + x"), Err(ParseError::Syntax { pos: 6, .. })));
        assert!(matches!(Expr::parse("t + * x"), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(Expr::parse("t x"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(Expr::parse("sin t"), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(Expr::parse("t # 2"), Err(ParseError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("log(abs(x))").unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap_err().op, "log");
        let e = Expr::parse("sqrt(t)").unwrap();
        assert!(e.eval(-1.0, 0.0).is_err());
        let e = Expr::parse("1/x").unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap_err().op, "/");
    }

    #[test]
    fn printing_is_minimal_but_faithful() {
        let cases = [
            ("t^2 + x^2", "t^2 + x^2"),
            ("-(1/pi)*log(abs(sin(pi*x)+cos(pi*x)))", "(-(1 / pi)) * log(abs(sin(pi * x) + cos(pi * x)))"),
            ("1-(2-3)", "1 - (2 - 3)"),
            ("(2^3)^2", "(2^3)^2"),
            ("2^3^2", "2^3^2"),
            ("-t^2", "(-t^2)"),
        ];
        for (src, want) in cases {
            assert_eq!(Expr::parse(src).unwrap().to_string(), want);
        }
        assert_eq!(Expr::Num(-3.0).to_string(), "(-3)");
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..10.0).prop_map(Expr::Num),
            Just(Expr::T),
            Just(Expr::X),
            Just(Expr::Pi),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp), Just(Func::Abs)],
                    inner.clone()
                )
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, a, b)| Expr::Binary(op, Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(), pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 100)) {
            let printed = e.to_string();
            let reparsed = Expr::parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
            for (t, x) in pts {
                let a = e.eval(t, x);
                let b = reparsed.eval(t, x);
                match (a, b) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
                }
            }
        }
    }
}
