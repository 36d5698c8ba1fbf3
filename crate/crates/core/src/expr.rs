//! Connected-sum expressions such as `X(2) # Y(0) # Y(5)` or
//! `Z(4) # R22 # Y(2) # 12*CP2bar`.
//!
//! ```text
//! expr := term ('#' term)*
//! term := [INT '*'] NAME ['(' INT (',' INT)* ')']
//! ```
//!
//! Whitespace is ignored. [`FamilyExpression`] additionally accepts the
//! placeholder `l` in parameter position.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::catalog::{Catalog, NAMES};
use crate::manifolds::{ManifoldError, ManifoldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown catalog entry `{name}` at byte {offset}")]
    UnknownCatalogEntry { name: String, offset: usize },
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub multiplicity: u64,
    pub name: String,
    pub params: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumExpression {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Int(i64),
    Ell,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyTerm {
    pub multiplicity: u64,
    pub name: String,
    pub params: Vec<Param>,
}

/// A sum expression in which some parameters are the family parameter `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyExpression {
    pub terms: Vec<FamilyTerm>,
}

struct Parser<'a> {
    text: &'a str,
    /// (byte offset, char), whitespace removed
    chars: Vec<(usize, char)>,
    pos: usize,
    allow_ell: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, allow_ell: bool) -> Self {
        Self {
            text,
            chars: text
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            allow_ell,
        }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.text.len(), |&(o, _)| o)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ExprError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn int(&mut self) -> Result<i64, ExprError> {
        let start = self.offset();
        let neg = self.peek() == Some('-');
        if neg {
            self.pos += 1;
        }
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        let v: i64 = digits.parse().map_err(|_| ExprError::Syntax {
            offset: start,
            message: "integer out of range".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn param(&mut self) -> Result<Param, ExprError> {
        if self.allow_ell {
            let rest: String = self.chars[self.pos..]
                .iter()
                .take(3)
                .map(|&(_, c)| c)
                .collect();
            if rest == "ell" {
                self.pos += 3;
                return Ok(Param::Ell);
            }
            if rest.starts_with('l') {
                self.pos += 1;
                return Ok(Param::Ell);
            }
        }
        self.int().map(Param::Int)
    }

    fn term(&mut self) -> Result<FamilyTerm, ExprError> {
        let mut multiplicity = 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.offset();
            let digits = self.digits();
            multiplicity = digits.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                message: "multiplicity out of range".into(),
            })?;
            if multiplicity == 0 {
                return Err(ExprError::Syntax {
                    offset: start,
                    message: "multiplicity must be positive".into(),
                });
            }
            self.expect('*')?;
        }
        let start = self.offset();
        let mut name = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_alphanumeric) {
            name.push(c);
            self.pos += 1;
        }
        if name.is_empty() {
            return Err(self.error("expected a manifold name"));
        }
        if !NAMES.contains(&name.as_str()) {
            return Err(ExprError::UnknownCatalogEntry {
                name,
                offset: start,
            });
        }
        let mut params = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            params.push(self.param()?);
            while self.peek() == Some(',') {
                self.pos += 1;
                params.push(self.param()?);
            }
            self.expect(')')?;
        }
        Ok(FamilyTerm {
            multiplicity,
            name,
            params,
        })
    }

    fn expr(mut self) -> Result<Vec<FamilyTerm>, ExprError> {
        let mut terms = vec![self.term()?];
        while self.peek().is_some() {
            self.expect('#')?;
            terms.push(self.term()?);
        }
        Ok(terms)
    }
}

pub fn parse_expression(text: &str) -> Result<SumExpression, ExprError> {
    let terms = Parser::new(text, false).expr()?;
    Ok(SumExpression {
        terms: terms
            .into_iter()
            .map(|t| Term {
                multiplicity: t.multiplicity,
                name: t.name,
                params: t
                    .params
                    .into_iter()
                    .map(|p| match p {
                        Param::Int(v) => v,
                        Param::Ell => unreachable!("placeholder rejected by the parser"),
                    })
                    .collect(),
            })
            .collect(),
    })
}

impl FromStr for SumExpression {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

impl FromStr for FamilyExpression {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(FamilyExpression {
            terms: Parser::new(s, true).expr()?,
        })
    }
}

impl SumExpression {
    /// Number of summands after expanding multiplicities.
    pub fn summand_count(&self) -> u64 {
        self.terms.iter().map(|t| t.multiplicity).sum()
    }

    /// Connected sum of all summands, left to right.
    pub fn evaluate(&self, catalog: &Catalog) -> Result<ManifoldSpec, ExprError> {
        let mut acc: Option<ManifoldSpec> = None;
        for term in &self.terms {
            let piece = catalog.get(&term.name, &term.params)?;
            for _ in 0..term.multiplicity {
                acc = Some(match acc {
                    None => piece.clone(),
                    Some(m) => m.connected_sum(&piece),
                });
            }
        }
        let m = acc.expect("grammar requires at least one term");
        Ok(m.relabel(self.to_string()))
    }
}

impl FamilyExpression {
    pub fn instantiate(&self, ell: i64) -> SumExpression {
        SumExpression {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    multiplicity: t.multiplicity,
                    name: t.name.clone(),
                    params: t
                        .params
                        .iter()
                        .map(|p| match p {
                            Param::Int(v) => *v,
                            Param::Ell => ell,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn has_placeholder(&self) -> bool {
        self.terms.iter().any(|t| t.params.contains(&Param::Ell))
    }
}

fn write_term<P: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    multiplicity: u64,
    name: &str,
    params: &[P],
) -> fmt::Result {
    if multiplicity != 1 {
        write!(f, "{multiplicity}*")?;
    }
    f.write_str(name)?;
    if !params.is_empty() {
        let ps: Vec<String> = params.iter().map(ToString::to_string).collect();
        write!(f, "({})", ps.join(","))?;
    }
    Ok(())
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::Ell => f.write_str("l"),
        }
    }
}

impl fmt::Display for SumExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" # ")?;
            }
            write_term(f, t.multiplicity, &t.name, &t.params)?;
        }
        Ok(())
    }
}

impl fmt::Display for FamilyExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" # ")?;
            }
            write_term(f, t.multiplicity, &t.name, &t.params)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let e = parse_expression("X(2) # Y(0) # Y(5)").unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[2].params, [5]);

        let e = parse_expression("4*K3 # 5*S2xS2").unwrap();
        assert_eq!(
            e.terms
                .iter()
                .map(|t| (t.multiplicity, t.name.as_str()))
                .collect::<Vec<_>>(),
            [(4, "K3"), (5, "S2xS2")]
        );

        let e = parse_expression("Z(4) # R22 # Y(2) # 12*CP2bar").unwrap();
        assert_eq!(e.terms.len(), 4);
        assert_eq!(e.summand_count(), 15);
    }

    #[test]
    fn printing_is_canonical() {
        for (input, canon) in [
            ("X( 2 )#Y(0)  #Y(5)", "X(2) # Y(0) # Y(5)"),
            ("1*K3", "K3"),
            ("2 * CP2 # CP2bar", "2*CP2 # CP2bar"),
        ] {
            let once = parse_expression(input).unwrap().to_string();
            assert_eq!(once, canon);
            assert_eq!(parse_expression(&once).unwrap().to_string(), once);
        }
    }

    #[test]
    fn syntax_errors_report_offsets() {
        let cases = [
            ("X(2) # ", 7),
            ("X(2) Y(0)", 5),
            ("0*K3", 0),
            ("3 K3", 2),
            ("X(2", 3),
            ("X(a)", 2),
            ("# K3", 0),
        ];
        for (text, offset) in cases {
            match parse_expression(text) {
                Err(ExprError::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert_eq!(
            parse_expression("K3 # Q(1)"),
            Err(ExprError::UnknownCatalogEntry {
                name: "Q".into(),
                offset: 5
            })
        );
        assert!(matches!(
            parse_expression("Y(l)"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn evaluation() {
        let c = Catalog::builtin();
        let m = parse_expression("Z(4) # R22 # Y(2) # 12*CP2bar")
            .unwrap()
            .evaluate(&c)
            .unwrap();
        assert_eq!(m.pieces().len(), 3);
        assert_eq!(m.blowups(), 12);
        assert_eq!((m.b_plus(), m.b_minus()), (7 + 3 + 3, 18 + 14 + 19 + 12));
        assert_eq!(m.label(), "Z(4) # R22 # Y(2) # 12*CP2bar");

        assert!(matches!(
            parse_expression("X(1)").unwrap().evaluate(&c),
            Err(ExprError::Manifold(
                ManifoldError::ParameterOutOfRange { .. }
            ))
        ));
    }

    #[test]
    fn families() {
        let f: FamilyExpression = "X(2) # Y(0) # Y(l)".parse().unwrap();
        assert!(f.has_placeholder());
        assert_eq!(f.to_string(), "X(2) # Y(0) # Y(l)");
        assert_eq!(f.instantiate(4).to_string(), "X(2) # Y(0) # Y(4)");
        let f: FamilyExpression = "Z(4)#Y(ell)#14*CP2bar".parse().unwrap();
        assert_eq!(f.to_string(), "Z(4) # Y(l) # 14*CP2bar");
    }
}
