//! Hand-rolled s-expression parser for utility functions.
//!
//! Grammar: atoms are decimal literals or `p<k>` with k >= 1; forms are
//! `(+ e...)`, `(- e e)`, `(* e...)`, `(pow e <int>)`, `(max e e...)`,
//! `(min e e...)`, `(neg e)`. Anything else is rejected with the character
//! position of the offending token.

use super::{UtilityError, UtilityExpr};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, UtilityError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            '(' => {
                tokens.push((Token::LParen, pos));
                chars.next();
            }
            ')' => {
                tokens.push((Token::RParen, pos));
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                tokens.push((Token::Atom(atom), pos));
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    index: usize,
    end: usize,
}

impl Parser {
    fn error(&self, position: usize, message: impl Into<String>) -> UtilityError {
        UtilityError::Parse {
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.index)
    }

    fn next(&mut self) -> Result<(Token, usize), UtilityError> {
        let token = self
            .tokens
            .get(self.index)
            .cloned()
            .ok_or_else(|| self.error(self.end, "unexpected end of input"))?;
        self.index += 1;
        Ok(token)
    }

    fn parse_expr(&mut self) -> Result<UtilityExpr, UtilityError> {
        match self.next()? {
            (Token::Atom(atom), pos) => self.parse_atom(&atom, pos),
            (Token::LParen, pos) => self.parse_form(pos),
            (Token::RParen, pos) => Err(self.error(pos, "unexpected ')'")),
        }
    }

    fn parse_atom(&self, atom: &str, pos: usize) -> Result<UtilityExpr, UtilityError> {
        if let Some(index_text) = atom.strip_prefix('p') {
            if let Ok(k) = index_text.parse::<usize>() {
                if k >= 1 {
                    return Ok(UtilityExpr::Var(k - 1));
                }
                return Err(self.error(pos, "objective index must be at least 1"));
            }
        }
        atom.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(UtilityExpr::Const)
            .ok_or_else(|| self.error(pos, format!("expected number or p<k>, found `{atom}`")))
    }

    fn parse_form(&mut self, open_pos: usize) -> Result<UtilityExpr, UtilityError> {
        let (op, op_pos) = match self.next()? {
            (Token::Atom(op), pos) => (op, pos),
            (token, pos) => {
                return Err(self.error(pos, format!("expected operator, found `{token:?}`")))
            }
        };

        // `pow` takes an expression and a bare integer exponent.
        if op == "pow" {
            let base = self.parse_expr()?;
            let (token, pos) = self.next()?;
            let exponent = match token {
                Token::Atom(text) => text
                    .parse::<u32>()
                    .map_err(|_| self.error(pos, "exponent must be a non-negative integer"))?,
                _ => return Err(self.error(pos, "exponent must be a non-negative integer")),
            };
            self.expect_rparen()?;
            return Ok(UtilityExpr::Pow(Box::new(base), exponent));
        }

        let mut args = Vec::new();
        while !matches!(self.peek(), Some((Token::RParen, _)) | None) {
            args.push(self.parse_expr()?);
        }
        self.expect_rparen()?;

        let arity = |min: usize, exact: Option<usize>| -> Result<(), UtilityError> {
            if args.len() < min || exact.is_some_and(|n| args.len() != n) {
                Err(self.error(
                    open_pos,
                    format!("operator `{op}` got {} argument(s)", args.len()),
                ))
            } else {
                Ok(())
            }
        };

        match op.as_str() {
            "+" => {
                arity(1, None)?;
                Ok(UtilityExpr::Add(args))
            }
            "-" => {
                arity(2, Some(2))?;
                let mut it = args.into_iter();
                Ok(UtilityExpr::Sub(
                    Box::new(it.next().unwrap()),
                    Box::new(it.next().unwrap()),
                ))
            }
            "*" => {
                arity(1, None)?;
                Ok(UtilityExpr::Mul(args))
            }
            "max" => {
                arity(2, None)?;
                Ok(UtilityExpr::Max(args))
            }
            "min" => {
                arity(2, None)?;
                Ok(UtilityExpr::Min(args))
            }
            "neg" => {
                arity(1, Some(1))?;
                Ok(UtilityExpr::Neg(Box::new(args.into_iter().next().unwrap())))
            }
            _ => Err(self.error(op_pos, format!("unknown operator `{op}`"))),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), UtilityError> {
        match self.next()? {
            (Token::RParen, _) => Ok(()),
            (_, pos) => Err(self.error(pos, "expected ')'")),
        }
    }
}

/// Parses an s-expression utility function.
pub fn parse_utility(text: &str) -> Result<UtilityExpr, UtilityError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        index: 0,
        end: text.chars().count(),
    };
    if parser.peek().is_none() {
        return Err(parser.error(0, "empty input"));
    }
    let expr = parser.parse_expr()?;
    if let Some(&(_, pos)) = parser.peek() {
        return Err(parser.error(pos, "trailing input after expression"));
    }
    Ok(expr)
}
