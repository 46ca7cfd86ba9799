//! Boolean expressions over `x1..xn`.
//!
//! Precedence from tightest to loosest: `!`, `&`, `^`, `|`. Binary operators
//! associate to the left.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(bool),
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0, end: text.len() + 1 };
        let e = p.or()?;
        match p.tokens.get(p.pos) {
            None => Ok(e),
            Some((t, col)) => Err(ExprError {
                column: *col,
                message: format!("unexpected {t}"),
            }),
        }
    }

    pub fn eval(&self, value: &impl Fn(usize) -> bool) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => value(*i),
            Expr::Not(e) => !e.eval(value),
            Expr::And(a, b) => a.eval(value) && b.eval(value),
            Expr::Xor(a, b) => a.eval(value) ^ b.eval(value),
            Expr::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    /// Indices of the variables that occur in the expression.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => {
                out.insert(*i);
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::Xor(..) => 2,
            Expr::And(..) => 3,
            Expr::Not(_) | Expr::Var(_) | Expr::Const(_) => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left operands may share the parent's level (left associativity);
        // right operands need strictly tighter binding.
        let side = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Const(b) => write!(f, "{}", u8::from(*b)),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Not(e) => {
                f.write_str("!")?;
                side(f, e, 4)
            }
            Expr::And(a, b) | Expr::Xor(a, b) | Expr::Or(a, b) => {
                let (op, p) = match self {
                    Expr::And(..) => ("&", 3),
                    Expr::Xor(..) => ("^", 2),
                    _ => ("|", 1),
                };
                side(f, a, p)?;
                write!(f, " {op} ")?;
                side(f, b, p + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Var(usize),
    Const(bool),
    Not,
    And,
    Xor,
    Or,
    Open,
    Close,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Var(i) => write!(f, "`x{i}`"),
            Token::Const(b) => write!(f, "`{}`", u8::from(*b)),
            Token::Not => f.write_str("`!`"),
            Token::And => f.write_str("`&`"),
            Token::Xor => f.write_str("`^`"),
            Token::Or => f.write_str("`|`"),
            Token::Open => f.write_str("`(`"),
            Token::Close => f.write_str("`)`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let col = i + 1;
        let tok = match bytes[i] {
            b' ' | b'\t' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Not,
            b'&' => Token::And,
            b'^' => Token::Xor,
            b'|' => Token::Or,
            b'(' => Token::Open,
            b')' => Token::Close,
            b'0' => Token::Const(false),
            b'1' => Token::Const(true),
            b'x' => {
                let start = i + 1;
                let mut end = start;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let idx = text[start..end].parse::<usize>().ok().filter(|&v| v > 0);
                let Some(idx) = idx else {
                    return Err(ExprError {
                        column: col,
                        message: "variable names are x1, x2, ...".into(),
                    });
                };
                out.push((Token::Var(idx), col));
                i = end;
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError {
                    column: col,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|t| t.0)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn binary(
        &mut self,
        op: Token,
        next: fn(&mut Parser) -> Result<Expr, ExprError>,
        build: fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Expr, ExprError> {
        let mut lhs = next(self)?;
        while self.peek() == Some(op) {
            self.pos += 1;
            let rhs = next(self)?;
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ExprError> {
        self.binary(Token::Or, Parser::xor, Expr::Or)
    }

    fn xor(&mut self) -> Result<Expr, ExprError> {
        self.binary(Token::Xor, Parser::and, Expr::Xor)
    }

    fn and(&mut self) -> Result<Expr, ExprError> {
        self.binary(Token::And, Parser::unary, Expr::And)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        let col = self.column();
        let Some(tok) = self.peek() else {
            return Err(ExprError {
                column: col,
                message: "unexpected end of expression".into(),
            });
        };
        self.pos += 1;
        match tok {
            Token::Not => Ok(Expr::Not(Box::new(self.unary()?))),
            Token::Var(i) => Ok(Expr::Var(i)),
            Token::Const(b) => Ok(Expr::Const(b)),
            Token::Open => {
                let e = self.or()?;
                if self.peek() != Some(Token::Close) {
                    return Err(ExprError {
                        column: self.column(),
                        message: format!("missing `)` for `(` at column {col}"),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(ExprError {
                column: col,
                message: format!("unexpected {other}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth(e: &Expr, vars: &[usize]) -> Vec<bool> {
        (0..1u32 << vars.len())
            .map(|row| {
                e.eval(&|i| {
                    let pos = vars.iter().position(|&v| v == i).unwrap();
                    row >> pos & 1 == 1
                })
            })
            .collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("x1 | x2 & x3").unwrap();
        assert_eq!(e, Expr::parse("x1 | (x2 & x3)").unwrap());
        let e = Expr::parse("x1 ^ x2 & x3 | x4").unwrap();
        assert_eq!(e, Expr::parse("(x1 ^ (x2 & x3)) | x4").unwrap());
        let e = Expr::parse("!x1 & x2").unwrap();
        assert_eq!(e, Expr::parse("(!x1) & x2").unwrap());
        let e = Expr::parse("x1 ^ x2 ^ x3").unwrap();
        assert!(matches!(e, Expr::Xor(ref a, _) if matches!(**a, Expr::Xor(..))));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "x1 | x2 & x3",
            "!(x1 | x2)",
            "(x6 & (x3 | x5)) | x14",
            "x1 & (x2 ^ x3) | !!x4",
            "x1 | (x2 | x3)",
            "0 | 1 & x2",
        ] {
            let e = Expr::parse(s).unwrap();
            let back = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(e, back, "{s} -> {e}");
        }
        assert_eq!(Expr::parse("x1 | (x2 | x3)").unwrap().to_string(), "x1 | (x2 | x3)");
        assert_eq!(Expr::parse("(x1 | x2) | x3").unwrap().to_string(), "x1 | x2 | x3");
    }

    #[test]
    fn evaluation() {
        let e = Expr::parse("!(x4 | x11)").unwrap();
        assert_eq!(truth(&e, &[4, 11]), vec![true, false, false, false]);
        assert_eq!(e.vars().into_iter().collect::<Vec<_>>(), vec![4, 11]);
        let c = Expr::parse("x1 & !x1").unwrap();
        assert_eq!(truth(&c, &[1]), vec![false, false]);
    }

    #[test]
    fn errors_point_at_columns() {
        assert_eq!(Expr::parse("x1 & ").unwrap_err().column, 6);
        assert_eq!(Expr::parse("x1 $ x2").unwrap_err().column, 4);
        assert_eq!(Expr::parse("(x1 | x2").unwrap_err().column, 9);
        assert_eq!(Expr::parse("x0").unwrap_err().column, 1);
        assert_eq!(Expr::parse("x1 x2").unwrap_err().column, 4);
    }
}
