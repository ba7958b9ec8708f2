//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := number | var | 'inv' '(' expr ')' | 'T' '(' expr ')'
//!         | '(' expr ')' | matrix
//! var    := 'x' digits
//! matrix := '[' row (';' row)* ']'
//! row    := expr (',' expr)*
//! ```
//!
//! Whitespace is insignificant. A leading sign on an expression is
//! accepted as a convenience.

use crate::ncalg::expr::RationalExpr;
use crate::ncalg::NcalgError;
use crate::scalar::{real, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Var(usize),
    Inv,
    Transpose,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, NcalgError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            '[' => {
                tokens.push((Token::LBracket, i));
                i += 1;
            }
            ']' => {
                tokens.push((Token::RBracket, i));
                i += 1;
            }
            ',' => {
                tokens.push((Token::Comma, i));
                i += 1;
            }
            ';' => {
                tokens.push((Token::Semi, i));
                i += 1;
            }
            '+' => {
                tokens.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                tokens.push((Token::Star, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| NcalgError::Parse {
                    position: start,
                    message: format!("invalid number '{}'", s),
                })?;
                tokens.push((Token::Number(v), start));
            }
            'x' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(NcalgError::Parse {
                        position: start,
                        message: "variable needs an index, e.g. x1".into(),
                    });
                }
                let idx: usize = text[digits_start..i].parse().map_err(|_| NcalgError::Parse {
                    position: start,
                    message: "variable index out of range".into(),
                })?;
                tokens.push((Token::Var(idx), start));
            }
            'i' if text[i..].starts_with("inv") => {
                tokens.push((Token::Inv, i));
                i += 3;
            }
            'T' => {
                tokens.push((Token::Transpose, i));
                i += 1;
            }
            _ => {
                return Err(NcalgError::Parse {
                    position: i,
                    message: format!("unexpected character '{}'", c),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a, T: Scalar> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    g: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Scalar> Parser<'a, T> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or_else(|| self.tokens.last().map(|(_, p)| p + 1).unwrap_or(0))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Token) -> Result<(), NcalgError> {
        let position = self.position();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            other => Err(NcalgError::Parse {
                position,
                message: format!("expected {:?}, found {:?}", tok, other),
            }),
        }
    }

    fn parse_expr(&mut self) -> Result<RationalExpr<T>, NcalgError> {
        let mut negate_first = false;
        match self.peek() {
            Some(Token::Plus) => {
                self.bump();
            }
            Some(Token::Minus) => {
                self.bump();
                negate_first = true;
            }
            _ => {}
        }
        let first = self.parse_term()?;
        let mut terms = vec![if negate_first {
            first.scalar_mul(-T::one())
        } else {
            first
        }];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    terms.push(self.parse_term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    terms.push(t.scalar_mul(-T::one()));
                }
                _ => break,
            }
        }
        RationalExpr::sum(terms)
    }

    fn parse_term(&mut self) -> Result<RationalExpr<T>, NcalgError> {
        let mut factors = vec![self.parse_factor()?];
        while self.peek() == Some(&Token::Star) {
            self.bump();
            factors.push(self.parse_factor()?);
        }
        RationalExpr::product(factors)
    }

    fn parse_factor(&mut self) -> Result<RationalExpr<T>, NcalgError> {
        let position = self.position();
        match self.bump() {
            Some(Token::Number(v)) => Ok(RationalExpr::scalar(real::<T>(v), self.g)),
            Some(Token::Var(j)) => {
                if j < 1 || j > self.g {
                    return Err(NcalgError::Parse {
                        position,
                        message: format!("variable x{} out of range 1..={}", j, self.g),
                    });
                }
                RationalExpr::variable(j, self.g)
            }
            Some(Token::Inv) => {
                self.expect(Token::LParen)?;
                let inner = self.parse_expr()?;
                self.expect(Token::RParen)?;
                RationalExpr::inverse(inner)
            }
            Some(Token::Transpose) => {
                self.expect(Token::LParen)?;
                let inner = self.parse_expr()?;
                self.expect(Token::RParen)?;
                Ok(RationalExpr::transpose_node(inner))
            }
            Some(Token::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::LBracket) => {
                let mut rows = vec![self.parse_row()?];
                while self.peek() == Some(&Token::Semi) {
                    self.bump();
                    rows.push(self.parse_row()?);
                }
                self.expect(Token::RBracket)?;
                RationalExpr::block_matrix(rows)
            }
            other => Err(NcalgError::Parse {
                position,
                message: format!("expected a factor, found {:?}", other),
            }),
        }
    }

    fn parse_row(&mut self) -> Result<Vec<RationalExpr<T>>, NcalgError> {
        let mut row = vec![self.parse_expr()?];
        while self.peek() == Some(&Token::Comma) {
            self.bump();
            row.push(self.parse_expr()?);
        }
        Ok(row)
    }
}

/// Parses `text` into a rational expression over `g` variables. Inverse
/// nodes are validated for invertibility at zero during construction.
pub fn parse_expression<T: Scalar>(text: &str, g: usize) -> Result<RationalExpr<T>, NcalgError> {
    assert!(g >= 1, "need at least one variable");
    let tokens = lex(text)?;
    let mut parser = Parser::<T> {
        tokens: &tokens,
        pos: 0,
        g,
        _marker: std::marker::PhantomData,
    };
    let expr = parser.parse_expr()?;
    if parser.pos != tokens.len() {
        return Err(NcalgError::Parse {
            position: parser.position(),
            message: "trailing input after expression".into(),
        });
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::expr::ExprNode;
    use crate::ncalg::word::Word;
    use crate::ncalg::NcalgError;

    #[test]
    fn parses_product_with_inverse() {
        let e = parse_expression::<f64>("x1*inv(1 - x2*x1)", 2).unwrap();
        match e.node() {
            ExprNode::Product(fs) => {
                assert_eq!(fs.len(), 2);
                assert!(matches!(fs[0].node(), ExprNode::Poly(_)));
                assert!(matches!(fs[1].node(), ExprNode::Inverse(_)));
            }
            other => panic!("expected product, got {:?}", other),
        }
    }

    #[test]
    fn like_terms_collapse_to_poly() {
        let e = parse_expression::<f64>("x1 + x1", 2).unwrap();
        match e.node() {
            ExprNode::Poly(p) => {
                assert_eq!(p.coefficient(&Word::letter(1))[(0, 0)], 2.0);
                assert_eq!(p.coeffs().len(), 1);
            }
            other => panic!("expected poly, got {:?}", other),
        }
    }

    #[test]
    fn inverse_of_zero_constant_term_fails() {
        let err = parse_expression::<f64>("inv(x1)", 1).unwrap_err();
        assert!(matches!(err, NcalgError::NotAnalyticAtZero { .. }));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_expression::<f64>("x1 + ", 1).unwrap_err();
        assert!(matches!(err, NcalgError::Parse { .. }));
    }

    #[test]
    fn out_of_range_variable_rejected() {
        assert!(parse_expression::<f64>("x3", 2).is_err());
    }

    #[test]
    fn matrix_literal_evaluates_blockwise() {
        use crate::ncalg::tuple::MatrixTuple;
        let e = parse_expression::<f64>("[1, x1; x1, 1]", 1).unwrap();
        assert_eq!(e.shape(), (2, 2));
        let x = MatrixTuple::scalars(&[0.5]);
        let v = e.eval(&x).unwrap();
        assert_eq!(v[(0, 0)], 1.0);
        assert_eq!(v[(0, 1)], 0.5);
        assert_eq!(v[(1, 0)], 0.5);
        assert_eq!(v[(1, 1)], 1.0);
    }

    #[test]
    fn scalar_broadcasts_against_matrix() {
        use crate::ncalg::tuple::MatrixTuple;
        let e = parse_expression::<f64>("1 + [0, x1; x1, 0]", 1).unwrap();
        let x = MatrixTuple::scalars(&[0.25]);
        let v = e.eval(&x).unwrap();
        assert_eq!(v[(0, 0)], 1.0);
        assert_eq!(v[(0, 1)], 0.25);
    }
}
