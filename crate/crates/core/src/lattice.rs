//! Unimodular symmetric bilinear forms over the integers, stored as block
//! multisets (`<1>`, `<-1>`, `H`, `±E8`) and classified by rank, signature
//! and parity.
//!
//! Indefinite unimodular forms are determined up to isomorphism by those
//! three numbers, so nothing here ever builds a Gram matrix. Definite forms
//! are only handled when they are diagonal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(
        "definite form `{0}` contains E8 or H blocks; only diagonal definite forms are classified"
    )]
    UnsupportedDefinite(UnimodularForm),
    #[error("cannot parse form `{text}` at byte {offset}: {message}")]
    Syntax {
        text: String,
        offset: usize,
        message: String,
    },
}

/// A formal direct sum `e8·E8 ⊕ hyperbolic·H ⊕ pos_diag·<1> ⊕ neg_diag·<-1>`.
///
/// `e8` is signed: a negative count means copies of `-E8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UnimodularForm {
    pub pos_diag: u64,
    pub neg_diag: u64,
    pub hyperbolic: u64,
    pub e8: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
    ZeroRank,
}

/// Stable isomorphism data of a unimodular form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormClass {
    pub rank: u64,
    pub signature: i64,
    pub parity: Parity,
    pub definiteness: Definiteness,
}

impl UnimodularForm {
    pub const ZERO: UnimodularForm = UnimodularForm {
        pos_diag: 0,
        neg_diag: 0,
        hyperbolic: 0,
        e8: 0,
    };

    pub fn new(e8: i64, hyperbolic: u64, pos_diag: u64, neg_diag: u64) -> Self {
        Self {
            pos_diag,
            neg_diag,
            hyperbolic,
            e8,
        }
    }

    /// `a·E8 ⊕ b·H`.
    pub fn even(e8: i64, hyperbolic: u64) -> Self {
        Self::new(e8, hyperbolic, 0, 0)
    }

    /// `p·<1> ⊕ q·<-1>`.
    pub fn diagonal(pos: u64, neg: u64) -> Self {
        Self::new(0, 0, pos, neg)
    }

    pub fn rank(&self) -> u64 {
        self.pos_diag + self.neg_diag + 2 * self.hyperbolic + 8 * self.e8.unsigned_abs()
    }

    pub fn signature(&self) -> i64 {
        self.pos_diag as i64 - self.neg_diag as i64 + 8 * self.e8
    }

    /// Dimension of a maximal positive subspace.
    pub fn b_plus(&self) -> u64 {
        self.pos_diag + self.hyperbolic + 8 * self.e8.max(0) as u64
    }

    /// Dimension of a maximal negative subspace.
    pub fn b_minus(&self) -> u64 {
        self.neg_diag + self.hyperbolic + 8 * (-self.e8).max(0) as u64
    }

    pub fn parity(&self) -> Parity {
        if self.pos_diag == 0 && self.neg_diag == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn definiteness(&self) -> Definiteness {
        match (self.b_plus(), self.b_minus()) {
            (0, 0) => Definiteness::ZeroRank,
            (_, 0) => Definiteness::Positive,
            (0, _) => Definiteness::Negative,
            _ => Definiteness::Indefinite,
        }
    }

    fn has_even_blocks(&self) -> bool {
        self.hyperbolic != 0 || self.e8 != 0
    }

    /// Block-wise direct sum.
    ///
    /// Opposite-sign E8 blocks cancel in pairs; each cancelled pair
    /// `E8 ⊕ -E8` is rewritten as the isomorphic `8H`, so rank and signature
    /// stay additive.
    pub fn direct_sum(&self, other: &UnimodularForm) -> UnimodularForm {
        let cancelled = if self.e8.signum() * other.e8.signum() < 0 {
            self.e8.unsigned_abs().min(other.e8.unsigned_abs())
        } else {
            0
        };
        UnimodularForm {
            pos_diag: self.pos_diag + other.pos_diag,
            neg_diag: self.neg_diag + other.neg_diag,
            hyperbolic: self.hyperbolic + other.hyperbolic + 8 * cancelled,
            e8: self.e8 + other.e8,
        }
    }

    /// `n`-fold direct sum of `self` (the zero form for `n = 0`).
    pub fn times(&self, n: u64) -> UnimodularForm {
        (0..n).fold(UnimodularForm::ZERO, |acc, _| acc.direct_sum(self))
    }

    pub fn classify(&self) -> Result<FormClass, LatticeError> {
        let definiteness = self.definiteness();
        if matches!(
            definiteness,
            Definiteness::Positive | Definiteness::Negative
        ) && self.has_even_blocks()
        {
            return Err(LatticeError::UnsupportedDefinite(*self));
        }
        Ok(FormClass {
            rank: self.rank(),
            signature: self.signature(),
            parity: self.parity(),
            definiteness,
        })
    }

    pub fn is_isomorphic(&self, other: &UnimodularForm) -> Result<bool, LatticeError> {
        // definite forms that classify are diagonal, so the class decides
        // there too
        Ok(self.classify()? == other.classify()?)
    }

    /// Canonical `aE8 + bH` representative of an even indefinite form.
    pub fn even_normal_form(&self) -> Option<UnimodularForm> {
        let class = self.classify().ok()?;
        if class.parity != Parity::Even || class.definiteness != Definiteness::Indefinite {
            return None;
        }
        FormClass::even_normal_form(&class)
    }

    /// Rokhlin check: the form of a closed smooth spin 4-manifold has
    /// signature divisible by 16. Returns a warning message when violated.
    pub fn realizability_warning(&self) -> Option<String> {
        if self.is_even() && self.signature() % 16 != 0 {
            Some(format!(
                "warning (realizability heuristic): even form `{self}` has signature {} not divisible by 16, so it is not the form of a smooth closed spin 4-manifold",
                self.signature()
            ))
        } else {
            None
        }
    }
}

impl FormClass {
    fn even_normal_form(&self) -> Option<UnimodularForm> {
        if self.parity != Parity::Even || self.signature % 8 != 0 {
            return None;
        }
        let e8 = self.signature / 8;
        let rest = self.rank.checked_sub(8 * e8.unsigned_abs())?;
        if rest % 2 != 0 {
            return None;
        }
        Some(UnimodularForm::even(e8, rest / 2))
    }
}

impl fmt::Display for UnimodularForm {
    /// Canonical text, e.g. `-4E8 + 11H + 1<-1>`; the zero form prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.e8 != 0 {
            parts.push(format!("{}E8", self.e8));
        }
        if self.hyperbolic != 0 {
            parts.push(format!("{}H", self.hyperbolic));
        }
        if self.pos_diag != 0 {
            parts.push(format!("{}<1>", self.pos_diag));
        }
        if self.neg_diag != 0 {
            parts.push(format!("{}<-1>", self.neg_diag));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl FromStr for UnimodularForm {
    type Err = LatticeError;

    /// Parses `aE8 + bH + p<1> + q<-1>` in any order, whitespace-insensitive.
    /// Coefficients default to 1; only the E8 coefficient may be negative.
    /// Repeated terms accumulate through `direct_sum`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |offset: usize, message: &str| LatticeError::Syntax {
            text: text.to_string(),
            offset,
            message: message.to_string(),
        };
        // (byte offset in `text`, char) with whitespace dropped
        let chars: Vec<(usize, char)> = text
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        if chars.is_empty() {
            return Err(err(0, "empty form"));
        }
        if chars.len() == 1 && chars[0].1 == '0' {
            return Ok(UnimodularForm::ZERO);
        }
        let offset_at = |i: usize| chars.get(i).map_or(text.len(), |&(o, _)| o);
        let mut form = UnimodularForm::ZERO;
        let mut i = 0;
        loop {
            let term_start = i;
            let mut negative = false;
            if let Some((_, '-')) = chars.get(i) {
                negative = true;
                i += 1;
            }
            let digits_start = i;
            while chars.get(i).is_some_and(|(_, c)| c.is_ascii_digit()) {
                i += 1;
            }
            let coeff: u64 = if i == digits_start {
                1
            } else {
                let s: String = chars[digits_start..i].iter().map(|&(_, c)| c).collect();
                s.parse()
                    .map_err(|_| err(offset_at(digits_start), "coefficient out of range"))?
            };
            let rest: String = chars[i..].iter().map(|&(_, c)| c).collect();
            let (block, len) = if rest.starts_with("E8") {
                ("E8", 2)
            } else if rest.starts_with('H') {
                ("H", 1)
            } else if rest.starts_with("<1>") {
                ("<1>", 3)
            } else if rest.starts_with("<-1>") {
                ("<-1>", 4)
            } else {
                return Err(err(offset_at(i), "expected one of E8, H, <1>, <-1>"));
            };
            if negative && block != "E8" {
                return Err(err(
                    offset_at(term_start),
                    "only E8 blocks take a negative coefficient",
                ));
            }
            let summand = match block {
                "E8" => {
                    let c = i64::try_from(coeff)
                        .map_err(|_| err(offset_at(digits_start), "coefficient out of range"))?;
                    UnimodularForm::even(if negative { -c } else { c }, 0)
                }
                "H" => UnimodularForm::even(0, coeff),
                "<1>" => UnimodularForm::diagonal(coeff, 0),
                _ => UnimodularForm::diagonal(0, coeff),
            };
            form = form.direct_sum(&summand);
            i += len;
            match chars.get(i) {
                None => break,
                Some((_, '+')) => i += 1,
                Some(&(o, _)) => return Err(err(o, "expected `+` between terms")),
            }
            if i >= chars.len() {
                return Err(err(text.len(), "dangling `+`"));
            }
        }
        Ok(form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> UnimodularForm {
        UnimodularForm::even(-2, 3)
    }

    #[test]
    fn direct_sum_of_k3_forms() {
        let sum = k3().direct_sum(&k3());
        assert_eq!(sum, UnimodularForm::even(-4, 6));
    }

    #[test]
    fn direct_sum_matches_form_of_m2l() {
        let x2 = UnimodularForm::even(-4, 11);
        let sum = x2.direct_sum(&k3().times(2));
        assert_eq!(sum, UnimodularForm::even(-8, 17));
        assert_eq!(sum.rank(), 98);
        assert_eq!(sum.signature(), -64);
        // independent summation of the blocks
        assert_eq!(sum.rank(), 54 + 22 + 22);
        assert_eq!(sum.signature(), -32 - 16 - 16);
    }

    #[test]
    fn zero_is_identity() {
        let f = UnimodularForm::new(-3, 5, 2, 7);
        assert_eq!(f.direct_sum(&UnimodularForm::ZERO), f);
        assert_eq!(UnimodularForm::ZERO.direct_sum(&f), f);
    }

    #[test]
    fn opposite_e8_blocks_become_hyperbolic() {
        let s = UnimodularForm::even(1, 0).direct_sum(&UnimodularForm::even(-3, 1));
        assert_eq!(s, UnimodularForm::even(-2, 9));
        assert_eq!(s.rank(), 8 + 24 + 2);
        assert_eq!(s.signature(), 8 - 24);
    }

    #[test]
    fn classify_examples() {
        let c = k3().classify().unwrap();
        assert_eq!(
            c,
            FormClass {
                rank: 22,
                signature: -16,
                parity: Parity::Even,
                definiteness: Definiteness::Indefinite
            }
        );
        assert_eq!((k3().b_plus(), k3().b_minus()), (3, 19));

        let c = UnimodularForm::even(-4, 11).classify().unwrap();
        assert_eq!((c.rank, c.signature, c.parity), (54, -32, Parity::Even));

        let c = UnimodularForm::diagonal(1, 0).classify().unwrap();
        assert_eq!(c.definiteness, Definiteness::Positive);
        assert_eq!((c.rank, c.signature, c.parity), (1, 1, Parity::Odd));

        let c = UnimodularForm::ZERO.classify().unwrap();
        assert_eq!(c.definiteness, Definiteness::ZeroRank);
        assert_eq!(c.parity, Parity::Even);
    }

    #[test]
    fn definite_even_blocks_are_rejected() {
        let f = UnimodularForm::even(-2, 0);
        assert!(matches!(
            f.classify(),
            Err(LatticeError::UnsupportedDefinite(_))
        ));
        let f = UnimodularForm::new(-1, 0, 0, 1);
        assert!(f.is_isomorphic(&f).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let x2 = UnimodularForm::even(-4, 11);
        let two_k3_five_s2s2 = k3().times(2).direct_sum(&UnimodularForm::even(0, 5));
        assert!(x2.is_isomorphic(&two_k3_five_s2s2).unwrap());

        let cp2 = UnimodularForm::diagonal(1, 0);
        let cp2bar = UnimodularForm::diagonal(0, 1);
        assert!(!cp2.is_isomorphic(&cp2bar).unwrap());

        let odd = UnimodularForm::diagonal(3, 19);
        assert!(!k3().is_isomorphic(&odd).unwrap());
        assert_eq!(k3().rank(), odd.rank());
        assert_eq!(k3().signature(), odd.signature());

        // definite against indefinite with the same diagonal part
        let cp2_k3 = cp2.direct_sum(&k3());
        assert!(!cp2_k3.is_isomorphic(&cp2).unwrap());
        assert!(!cp2.is_isomorphic(&cp2_k3).unwrap());
    }

    #[test]
    fn mixed_presentation_normalizes() {
        // <1> ⊕ E8 ⊕ <-1> is odd indefinite, same class as 9<1> ⊕ <-1>
        let mixed = UnimodularForm::new(1, 0, 1, 1);
        assert!(mixed
            .is_isomorphic(&UnimodularForm::diagonal(9, 1))
            .unwrap());
        assert_eq!(
            UnimodularForm::even(-2, 3).even_normal_form(),
            Some(UnimodularForm::even(-2, 3))
        );
        assert_eq!(UnimodularForm::diagonal(3, 19).even_normal_form(), None);
    }

    #[test]
    fn rokhlin_warning() {
        assert!(k3().realizability_warning().is_none());
        let w = UnimodularForm::even(-1, 3).realizability_warning().unwrap();
        assert!(w.contains("warning"));
        assert!(UnimodularForm::diagonal(1, 0)
            .realizability_warning()
            .is_none());
    }

    #[test]
    fn text_round_trip() {
        for text in [
            "-4E8 + 11H",
            "1<1>",
            "0",
            "-2E8 + 3H + 1<-1>",
            "2E8 + 1H + 3<1> + 4<-1>",
        ] {
            let f: UnimodularForm = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        let f: UnimodularForm = " -2 E8+3H+<-1> ".parse().unwrap();
        assert_eq!(f, UnimodularForm::new(-2, 3, 0, 1));
        let f: UnimodularForm = "E8 + -1E8".parse().unwrap();
        assert_eq!(f, UnimodularForm::even(0, 8));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        match "3H + 2Q".parse::<UnimodularForm>() {
            Err(LatticeError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!("-3H".parse::<UnimodularForm>().is_err());
        assert!("3H +".parse::<UnimodularForm>().is_err());
        assert!("".parse::<UnimodularForm>().is_err());
        assert!("3H 2E8".parse::<UnimodularForm>().is_err());
    }
}
