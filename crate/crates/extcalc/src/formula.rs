//! A tiny degree-formula language for the command line: integers, the
//! symbols `p`, `q`, `n`, the operators `+`, `*`, `^`, and parentheses.
//! That is enough to spell every internal degree the scans need
//! (`p^n*q+(p+2)*q`, `2*p*q+q`, ...), and nothing more.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unexpected character {0:?} in degree formula")]
    BadChar(char),
    #[error("unexpected end of degree formula")]
    UnexpectedEnd,
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("formula uses the symbol n but no n value was supplied")]
    MissingN,
    #[error("arithmetic overflow while evaluating the degree formula")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(i64),
    P,
    Q,
    N,
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn uses_n(&self) -> bool {
        match self {
            Expr::N => true,
            Expr::Num(_) | Expr::P | Expr::Q => false,
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Pow(a, b) => a.uses_n() || b.uses_n(),
        }
    }

    pub fn eval(&self, p: u32, n: Option<i64>) -> Result<i64, FormulaError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::P => p as i64,
            Expr::Q => 2 * (p as i64 - 1),
            Expr::N => n.ok_or(FormulaError::MissingN)?,
            Expr::Add(a, b) => a
                .eval(p, n)?
                .checked_add(b.eval(p, n)?)
                .ok_or(FormulaError::Overflow)?,
            Expr::Mul(a, b) => a
                .eval(p, n)?
                .checked_mul(b.eval(p, n)?)
                .ok_or(FormulaError::Overflow)?,
            Expr::Pow(a, b) => {
                let base = a.eval(p, n)?;
                let exp = b.eval(p, n)?;
                if !(0..=63).contains(&exp) {
                    return Err(FormulaError::Overflow);
                }
                base.checked_pow(exp as u32).ok_or(FormulaError::Overflow)?
            }
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::P => write!(f, "p"),
            Expr::Q => write!(f, "q"),
            Expr::N => write!(f, "n"),
            Expr::Add(a, b) => write!(f, "{a}+{b}"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Pow(a, b) => write!(f, "{a}^{b}"),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Clone)]
enum Token {
    Num(i64),
    P,
    Q,
    N,
    Plus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>, FormulaError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut v: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|x| x.checked_add(digit as i64))
                            .ok_or(FormulaError::Overflow)?;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Num(v));
            }
            'p' => {
                chars.next();
                out.push(Token::P);
            }
            'q' => {
                chars.next();
                out.push(Token::Q);
            }
            'n' => {
                chars.next();
                out.push(Token::N);
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            other => return Err(FormulaError::BadChar(other)),
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

    fn next(&mut self) -> Result<Token, FormulaError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or(FormulaError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.term()?;
        while self.peek() == Some(&Token::Plus) {
            self.next()?;
            acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, FormulaError> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Token::Star) {
            self.next()?;
            acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr, FormulaError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.next()?;
            // right-associative
            let exp = self.power()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, FormulaError> {
        match self.next()? {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::P => Ok(Expr::P),
            Token::Q => Ok(Expr::Q),
            Token::N => Ok(Expr::N),
            Token::Open => {
                let inner = self.expr()?;
                match self.next()? {
                    Token::Close => Ok(inner),
                    t => Err(FormulaError::UnexpectedToken(format!("{t:?}"))),
                }
            }
            t => Err(FormulaError::UnexpectedToken(format!("{t:?}"))),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr, FormulaError> {
    let mut p = Parser {
        tokens: tokenize(s)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(FormulaError::UnexpectedToken(format!(
            "{:?}",
            p.tokens[p.pos]
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_scan_degrees() {
        let e = parse("p^n*q+(p+2)*q").unwrap();
        assert!(e.uses_n());
        assert_eq!(e.eval(5, Some(3)).unwrap(), 1056);
        assert_eq!(e.eval(5, Some(10)).unwrap(), 78125056);
        assert_eq!(parse("2*p*q+q").unwrap().eval(5, None).unwrap(), 88);
        assert_eq!(parse("88").unwrap().eval(5, None).unwrap(), 88);
        assert_eq!(parse(" p ^ 2 ").unwrap().eval(5, None).unwrap(), 25);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse("p-n"), Err(FormulaError::BadChar('-'))));
        assert!(parse("p^").is_err());
        assert!(parse("(p+2").is_err());
        assert!(parse("5 5").is_err());
        assert!(matches!(
            parse("p^n").unwrap().eval(5, None),
            Err(FormulaError::MissingN)
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        // ^ binds tighter than *, which binds tighter than +
        assert_eq!(parse("2*p^2+1").unwrap().eval(5, None).unwrap(), 51);
        assert_eq!(parse("2^2^3").unwrap().eval(5, None).unwrap(), 256); // right-assoc
    }
}
