//! Monopole classes of connected sums of symplectic manifolds, via Bauer's
//! connected-sum theorem for the stable cohomotopy invariant together with
//! Taubes' non-vanishing for canonical classes, and the bandwidth invariant.
//!
//! Everything reported here is a certified *subset* of the true monopole
//! set, so bandwidths are lower bounds.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::classes::{ClassError, CohClass, GeneratorBasis};
use crate::expr::{ExprError, FamilyExpression};
use crate::manifolds::{InducedBasis, ManifoldSpec, SymplecticPiece};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonopoleError {
    #[error("piece `{name}` has b+ = {b_plus}, not 3 mod 4")]
    InadmissiblePiece { name: String, b_plus: u64 },
    #[error("Bauer's theorem covers at most 3 summands, got {0}")]
    TooManyPieces(usize),
    #[error("need at least 2 symplectic summands, got {0}")]
    TooFewPieces(usize),
    #[error("c1^2 = {c1_squared} and tau = {tau} are not congruent mod 8")]
    CongruenceViolation { c1_squared: i64, tau: i64 },
    #[error("class set is not closed under negation: missing -({0})")]
    NotNegationClosed(String),
    #[error("difference of `{0}` and `{1}` is not certified even")]
    OddDifference(String, String),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MonopoleSource {
    /// ±c₁(X) ± c₁(Y) on X # Y.
    BauerDouble,
    /// ±c₁(X) ± c₁(Y) ± c₁(Z) on X # Y # Z.
    BauerTriple,
    /// Caller-supplied classes.
    Declared,
}

/// What the generating theorem was applied to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    /// (piece name, b₊) for each summand.
    pub pieces: Vec<(String, u64)>,
    pub blowups: u64,
}

#[derive(Debug, Clone)]
enum Shape {
    /// All sums Σ ±tᵢ over nonzero summands with pairwise disjoint support.
    SignedSums(Vec<CohClass>),
    /// Sorted, deduplicated.
    Explicit(Vec<CohClass>),
}

#[derive(Debug, Clone)]
pub struct MonopoleSet {
    basis: Arc<GeneratorBasis>,
    shape: Shape,
    source: MonopoleSource,
    evidence: Option<Admissibility>,
}

/// A certified lower bound on the bandwidth, with the pair of classes that
/// realizes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bandwidth {
    pub lower_bound: u64,
    pub witness: Option<(CohClass, CohClass)>,
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BW >= {}", self.lower_bound)?;
        if let Some((a, b)) = &self.witness {
            write!(f, " (a = {a}, b = {b})")?;
        }
        Ok(())
    }
}

fn disjoint_supports(summands: &[CohClass]) -> bool {
    let mut seen = BTreeSet::new();
    summands
        .iter()
        .flat_map(|t| t.coeffs().keys())
        .all(|&i| seen.insert(i))
}

impl MonopoleSet {
    /// Wraps an explicit list of classes, checking negation closure and that
    /// all pairwise differences are certified even.
    pub fn from_classes(
        basis: &Arc<GeneratorBasis>,
        classes: impl IntoIterator<Item = CohClass>,
    ) -> Result<Self, MonopoleError> {
        let set: BTreeSet<CohClass> = classes.into_iter().collect();
        for c in &set {
            if !set.contains(&c.negate()) {
                return Err(MonopoleError::NotNegationClosed(c.to_string()));
            }
        }
        let v: Vec<CohClass> = set.into_iter().collect();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                if a.sub(b)?.divisibility() % 2 != 0 {
                    return Err(MonopoleError::OddDifference(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(Self {
            basis: Arc::clone(basis),
            shape: Shape::Explicit(v),
            source: MonopoleSource::Declared,
            evidence: None,
        })
    }

    fn signed_sums(
        basis: Arc<GeneratorBasis>,
        summands: Vec<CohClass>,
        source: MonopoleSource,
        evidence: Admissibility,
    ) -> Self {
        let summands: Vec<CohClass> = summands.into_iter().filter(|t| !t.is_zero()).collect();
        debug_assert!(disjoint_supports(&summands));
        Self {
            basis,
            shape: Shape::SignedSums(summands),
            source,
            evidence: Some(evidence),
        }
    }

    pub fn basis(&self) -> &Arc<GeneratorBasis> {
        &self.basis
    }

    pub fn source(&self) -> MonopoleSource {
        self.source
    }

    pub fn evidence(&self) -> Option<&Admissibility> {
        self.evidence.as_ref()
    }

    /// Number of distinct classes; `None` if it does not fit in a u128.
    pub fn len(&self) -> Option<u128> {
        match &self.shape {
            Shape::SignedSums(t) => 1u128.checked_shl(t.len() as u32),
            Shape::Explicit(v) => Some(v.len() as u128),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.shape, Shape::Explicit(v) if v.is_empty())
    }

    pub fn contains(&self, class: &CohClass) -> bool {
        match &self.shape {
            Shape::Explicit(v) => v.binary_search(class).is_ok(),
            Shape::SignedSums(summands) => {
                let mut covered = 0;
                for t in summands {
                    let sign = match t.coeffs().iter().next() {
                        Some((&i, &c)) if class.coeff(i) == c => 1,
                        Some((&i, &c)) if class.coeff(i) == -c => -1,
                        _ => return false,
                    };
                    if t.coeffs().iter().any(|(&i, &c)| class.coeff(i) != sign * c) {
                        return false;
                    }
                    covered += t.coeffs().len();
                }
                covered == class.coeffs().len()
            }
        }
    }

    /// Enumerates every class. Exponential in the number of summands for
    /// Bauer sets; check [`MonopoleSet::len`] first.
    pub fn classes(&self) -> Vec<CohClass> {
        match &self.shape {
            Shape::Explicit(v) => v.clone(),
            Shape::SignedSums(summands) => {
                let n = summands.len();
                assert!(n < 32, "refusing to enumerate 2^{n} classes");
                let mut out: Vec<CohClass> = (0u64..1 << n)
                    .map(|mask| {
                        let terms = summands.iter().enumerate().flat_map(|(j, t)| {
                            let s = if mask >> j & 1 == 1 { -1 } else { 1 };
                            t.coeffs().iter().map(move |(&i, &c)| (i, s * c))
                        });
                        CohClass::from_terms(&self.basis, terms)
                    })
                    .collect();
                out.sort();
                out
            }
        }
    }

    /// Sorted class strings.
    pub fn to_strings(&self) -> Vec<String> {
        let mut v: Vec<String> = self.classes().iter().map(|c| c.to_string()).collect();
        v.sort();
        v
    }

    /// Largest n such that two distinct classes differ by a multiple of 2n,
    /// over the classes known here; 0 when the set is contained in {0}.
    pub fn bandwidth(&self) -> Bandwidth {
        match &self.shape {
            Shape::Explicit(v) => bandwidth_by_pairs(v),
            Shape::SignedSums(summands) => {
                // a − b = 2·Σ_{i∈S} ±tᵢ over the summands where the signs
                // differ; with disjoint supports its divisibility is the gcd
                // over S, which is largest for a single summand.
                let best = summands
                    .iter()
                    .enumerate()
                    .max_by_key(|(i, t)| (t.divisibility(), std::cmp::Reverse(*i)));
                match best {
                    None => Bandwidth {
                        lower_bound: 0,
                        witness: None,
                    },
                    Some((_, t)) => {
                        let a = summands.iter().skip(1).fold(summands[0].clone(), |acc, s| {
                            acc.add(s).expect("same basis")
                        });
                        let b = a.sub(&t.scale(2)).expect("same basis");
                        Bandwidth {
                            lower_bound: t.divisibility(),
                            witness: Some((a, b)),
                        }
                    }
                }
            }
        }
    }
}

/// Bandwidth of an explicit class list by checking every unordered pair.
pub fn bandwidth_by_pairs(classes: &[CohClass]) -> Bandwidth {
    let mut best = Bandwidth {
        lower_bound: 0,
        witness: None,
    };
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            if a == b {
                continue;
            }
            let d = a.sub(b).expect("classes share a basis").divisibility() / 2;
            if d > best.lower_bound {
                best = Bandwidth {
                    lower_bound: d,
                    witness: Some((a.clone(), b.clone())),
                };
            }
        }
    }
    best
}

pub fn check_admissible(pieces: &[SymplecticPiece]) -> Result<(), MonopoleError> {
    match pieces.len() {
        n if n < 2 => return Err(MonopoleError::TooFewPieces(n)),
        n if n > 3 => return Err(MonopoleError::TooManyPieces(n)),
        _ => {}
    }
    for p in pieces {
        if !p.b_plus_is_3_mod_4() {
            return Err(MonopoleError::InadmissiblePiece {
                name: p.name.clone(),
                b_plus: p.b_plus,
            });
        }
    }
    Ok(())
}

/// {ε₁c₁(P₁) + ε₂c₁(P₂) [+ ε₃c₁(P₃)] + Σ δⱼEⱼ : all signs ±1} on
/// P₁ # P₂ [# P₃] # k·CP2bar, blow-ups attached to the first piece.
pub fn bauer_monopole_set(
    pieces: &[SymplecticPiece],
    blowups: u64,
) -> Result<MonopoleSet, MonopoleError> {
    check_admissible(pieces)?;
    let induced = InducedBasis::new(pieces, blowups)?;
    let source = if pieces.len() == 2 {
        MonopoleSource::BauerDouble
    } else {
        MonopoleSource::BauerTriple
    };
    let evidence = Admissibility {
        pieces: pieces.iter().map(|p| (p.name.clone(), p.b_plus)).collect(),
        blowups,
    };
    let summands = induced.c1.into_iter().chain(induced.exceptional).collect();
    Ok(MonopoleSet::signed_sums(
        induced.basis,
        summands,
        source,
        evidence,
    ))
}

/// [`bauer_monopole_set`] for the pieces and blow-ups of a manifold record.
pub fn monopole_set_of(manifold: &ManifoldSpec) -> Result<MonopoleSet, MonopoleError> {
    bauer_monopole_set(manifold.pieces(), manifold.blowups())
}

/// Formal dimension index d = (c₁² − τ)/8 of a spin^c structure.
pub fn bf_index(c1_squared: i64, tau: i64) -> Result<i64, MonopoleError> {
    let diff = c1_squared - tau;
    if diff.rem_euclid(8) != 0 {
        return Err(MonopoleError::CongruenceViolation { c1_squared, tau });
    }
    Ok(diff / 8)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRow {
    pub ell: i64,
    pub expression: String,
    /// Certified lower bound on the bandwidth.
    pub bandwidth_lower_bound: u64,
    pub witness: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyVerdict {
    /// Bounds grow strictly and linearly in l, so the bandwidth is
    /// unbounded along the family.
    UnboundedCertified,
    NotCertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCertificate {
    pub family: String,
    pub rows: Vec<FamilyRow>,
    pub verdict: FamilyVerdict,
}

fn linear_and_increasing(rows: &[FamilyRow]) -> bool {
    if rows.len() < 2 {
        return false;
    }
    let (l0, b0) = (rows[0].ell as i128, rows[0].bandwidth_lower_bound as i128);
    let (l1, b1) = (rows[1].ell as i128, rows[1].bandwidth_lower_bound as i128);
    if b1 <= b0 {
        return false;
    }
    rows.iter().all(|r| {
        (r.bandwidth_lower_bound as i128 - b0) * (l1 - l0) == (b1 - b0) * (r.ell as i128 - l0)
    })
}

/// Bandwidth lower bounds along a one-parameter family of sums. Rows are
/// sorted by l; the l values are evaluated in parallel.
pub fn family_certificate(
    family: &FamilyExpression,
    ells: &[i64],
    catalog: &Catalog,
) -> Result<FamilyCertificate, MonopoleError> {
    let mut ells: Vec<i64> = ells.to_vec();
    ells.sort_unstable();
    ells.dedup();
    let rows = ells
        .par_iter()
        .map(|&ell| {
            let expr = family.instantiate(ell);
            let manifold = expr.evaluate(catalog)?;
            let bw = monopole_set_of(&manifold)?.bandwidth();
            Ok(FamilyRow {
                ell,
                expression: expr.to_string(),
                bandwidth_lower_bound: bw.lower_bound,
                witness: bw.witness.map(|(a, b)| (a.to_string(), b.to_string())),
            })
        })
        .collect::<Result<Vec<_>, MonopoleError>>()?;
    let verdict = if linear_and_increasing(&rows) {
        FamilyVerdict::UnboundedCertified
    } else {
        FamilyVerdict::NotCertified
    };
    Ok(FamilyCertificate {
        family: family.to_string(),
        rows,
        verdict,
    })
}
