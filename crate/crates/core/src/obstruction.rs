//! Hitchin–Thorpe trichotomy and the curvature-estimate obstructions to
//! Einstein metrics on sums of symplectic manifolds.
//!
//! For `M = P₁ # … # Pₙ # k·CP2bar` (n = 2 or 3, each b₊ ≡ 3 mod 4) an
//! Einstein metric forces (2χ+3τ)(M) > ⅔·α² with α = Σ c₁(Pᵢ). Using
//! (2χ+3τ)(M) = S − 4(n−1) − k, where S = Σ c₁²(Pᵢ), this fails exactly when
//! 3(k + 4(n−1)) ≥ S. All comparisons are made with denominators cleared.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::manifolds::{EinsteinCitation, ManifoldSpec, SymplecticPiece};
use crate::monopole::{check_admissible, MonopoleError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error(transparent)]
    Inadmissible(#[from] MonopoleError),
    #[error("estimate does not apply to `{piece}`: {reason}")]
    NotApplicable { piece: String, reason: String },
    #[error("ambiguous decomposition: {0}")]
    AmbiguousDecomposition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HtStatus {
    /// 2χ < 3|τ|: no Einstein metric in either orientation.
    Violated,
    /// 2χ = 3|τ|.
    Boundary,
    /// 2χ > 3|τ|.
    StrictlySatisfied,
}

impl fmt::Display for HtStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HtStatus::Violated => "violated",
            HtStatus::Boundary => "boundary",
            HtStatus::StrictlySatisfied => "strictly-satisfied",
        })
    }
}

fn ht_from(chi: i64, tau: i64) -> HtStatus {
    match (2 * chi).cmp(&(3 * tau.abs())) {
        std::cmp::Ordering::Less => HtStatus::Violated,
        std::cmp::Ordering::Equal => HtStatus::Boundary,
        std::cmp::Ordering::Greater => HtStatus::StrictlySatisfied,
    }
}

pub fn hitchin_thorpe(m: &ManifoldSpec) -> HtStatus {
    ht_from(m.chi(), m.tau())
}

/// 2χ − 3|τ|.
pub fn hitchin_thorpe_margin(m: &ManifoldSpec) -> i64 {
    2 * m.chi() - 3 * m.tau().abs()
}

/// The inequality a certificate rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionTheorem {
    /// X # Y # k·CP2bar: 3(k+4) ≥ c₁²(X) + c₁²(Y).
    TwoSummands,
    /// X # Y # Z # k·CP2bar: 3(k+8) ≥ c₁²(X) + c₁²(Y) + c₁²(Z).
    ThreeSummands,
    /// The k = 0 case: Σc₁² ≤ 12 for two summands, ≤ 24 for three.
    NoBlowups,
    /// Single symplectic piece with c₁² > 0 blown up k times: 3k ≥ c₁².
    SingleBlowup,
}

impl ObstructionTheorem {
    /// Left-hand side of `lhs ≥ rhs` for `k` blow-ups.
    fn lhs(self, summands: usize, k: u64) -> i64 {
        match self {
            ObstructionTheorem::SingleBlowup => 3 * k as i64,
            _ => 3 * (k as i64 + 4 * (summands as i64 - 1)),
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            ObstructionTheorem::TwoSummands => "3(k+4) >= c1^2(X) + c1^2(Y)",
            ObstructionTheorem::ThreeSummands => "3(k+8) >= c1^2(X) + c1^2(Y) + c1^2(Z)",
            ObstructionTheorem::NoBlowups => "sum of c1^2 <= 12 (two summands) or <= 24 (three)",
            ObstructionTheorem::SingleBlowup => "3k >= c1^2(X)",
        }
    }
}

impl fmt::Display for ObstructionTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObstructionTheorem::TwoSummands => "two-summands",
            ObstructionTheorem::ThreeSummands => "three-summands",
            ObstructionTheorem::NoBlowups => "no-blowups",
            ObstructionTheorem::SingleBlowup => "single-blowup",
        })
    }
}

/// An evaluated instance `lhs ≥ rhs` of one of the inequalities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub theorem: ObstructionTheorem,
    /// (piece name, c₁²)
    pub pieces: Vec<(String, i64)>,
    pub k: u64,
    pub lhs: i64,
    pub rhs: i64,
}

impl Certificate {
    fn new(theorem: ObstructionTheorem, pieces: &[SymplecticPiece], k: u64) -> Self {
        let pieces: Vec<(String, i64)> = pieces
            .iter()
            .map(|p| (p.name.clone(), p.c1_squared))
            .collect();
        let rhs = pieces.iter().map(|(_, c)| c).sum();
        Self {
            lhs: theorem.lhs(pieces.len(), k),
            rhs,
            theorem,
            pieces,
            k,
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }

    /// Recomputes both sides from the recorded data.
    pub fn verify(&self) -> bool {
        let rhs: i64 = self.pieces.iter().map(|(_, c)| c).sum();
        let summands_ok = match self.theorem {
            ObstructionTheorem::TwoSummands => self.pieces.len() == 2,
            ObstructionTheorem::ThreeSummands => self.pieces.len() == 3,
            ObstructionTheorem::NoBlowups => matches!(self.pieces.len(), 2 | 3) && self.k == 0,
            ObstructionTheorem::SingleBlowup => self.pieces.len() == 1 && rhs > 0,
        };
        summands_ok
            && rhs == self.rhs
            && self.theorem.lhs(self.pieces.len(), self.k) == self.lhs
            && self.lhs >= rhs
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .pieces
            .iter()
            .map(|(n, c)| format!("c1^2({n})={c}"))
            .collect();
        let rel = if self.holds() { ">=" } else { "<" };
        write!(
            f,
            "[{}] {} {rel} {} with k = {} ({})",
            self.theorem,
            self.lhs,
            self.rhs,
            self.k,
            terms.join(", ")
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Obstructed,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Obstructed => "Obstructed",
            Status::Unknown => "Unknown",
        })
    }
}

/// Outcome of an obstruction query. Never claims existence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// The evaluated inequality (a certificate when `Obstructed`).
    pub instance: Option<Certificate>,
    pub hitchin_thorpe: Option<HtStatus>,
    pub einstein_known: Option<EinsteinCitation>,
    pub notes: Vec<String>,
}

/// Flat record used for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub status: Status,
    pub theorem: Option<ObstructionTheorem>,
    pub lhs: Option<i64>,
    pub rhs: Option<i64>,
    pub pieces: Vec<(String, i64)>,
    pub k: Option<u64>,
    pub hitchin_thorpe: Option<HtStatus>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn from_instance(instance: Certificate, hitchin_thorpe: Option<HtStatus>) -> Self {
        let status = if instance.holds() {
            Status::Obstructed
        } else {
            Status::Unknown
        };
        let notes = if status == Status::Unknown {
            vec!["inequality not met; the method cannot decide".to_string()]
        } else {
            Vec::new()
        };
        Self {
            status,
            instance: Some(instance),
            hitchin_thorpe,
            einstein_known: None,
            notes,
        }
    }

    fn unknown(note: impl Into<String>, hitchin_thorpe: Option<HtStatus>) -> Self {
        Self {
            status: Status::Unknown,
            instance: None,
            hitchin_thorpe,
            einstein_known: None,
            notes: vec![note.into()],
        }
    }

    pub fn is_obstructed(&self) -> bool {
        self.status == Status::Obstructed
    }

    /// The certificate, only when obstructed.
    pub fn certificate(&self) -> Option<&Certificate> {
        self.instance.as_ref().filter(|_| self.is_obstructed())
    }

    /// An obstructed verdict must carry a certificate that re-verifies.
    pub fn reverify(&self) -> bool {
        match self.status {
            Status::Obstructed => self.certificate().is_some_and(Certificate::verify),
            Status::Unknown => true,
        }
    }

    pub fn record(&self) -> VerdictRecord {
        let inst = self.instance.as_ref();
        let mut notes = self.notes.clone();
        if let Some(c) = self.einstein_known {
            notes.push(format!("einstein_known: {c}"));
        }
        VerdictRecord {
            status: self.status,
            theorem: inst.map(|c| c.theorem),
            lhs: inst.map(|c| c.lhs),
            rhs: inst.map(|c| c.rhs),
            pieces: inst.map(|c| c.pieces.clone()).unwrap_or_default(),
            k: inst.map(|c| c.k),
            hitchin_thorpe: self.hitchin_thorpe,
            notes,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.status)?;
        if let Some(c) = &self.instance {
            write!(f, " {c}")?;
        }
        for n in &self.notes {
            write!(f, "; {n}")?;
        }
        Ok(())
    }
}

/// χ and τ of `P₁ # … # Pₙ # k·CP2bar`, by additivity.
fn sum_chi_tau(pieces: &[SymplecticPiece], k: u64) -> (i64, i64) {
    let n = pieces.len() as i64;
    let chi = pieces.iter().map(SymplecticPiece::chi).sum::<i64>() - 2 * (n - 1) + k as i64;
    let tau = pieces.iter().map(SymplecticPiece::tau).sum::<i64>() - k as i64;
    (chi, tau)
}

pub fn einstein_obstruction(
    pieces: &[SymplecticPiece],
    k: u64,
) -> Result<Verdict, ObstructionError> {
    check_admissible(pieces)?;
    let theorem = if pieces.len() == 2 {
        ObstructionTheorem::TwoSummands
    } else {
        ObstructionTheorem::ThreeSummands
    };
    let (chi, tau) = sum_chi_tau(pieces, k);
    Ok(Verdict::from_instance(
        Certificate::new(theorem, pieces, k),
        Some(ht_from(chi, tau)),
    ))
}

/// [`einstein_obstruction`] with no blow-ups.
pub fn corollary_non(pieces: &[SymplecticPiece]) -> Result<Verdict, ObstructionError> {
    check_admissible(pieces)?;
    let (chi, tau) = sum_chi_tau(pieces, 0);
    Ok(Verdict::from_instance(
        Certificate::new(ObstructionTheorem::NoBlowups, pieces, 0),
        Some(ht_from(chi, tau)),
    ))
}

/// `X # k·CP2bar` for a symplectic X with b₊ ≥ 2 and c₁² > 0 has no
/// Einstein metric once 3k ≥ c₁²(X). Catalog pieces are taken to be
/// minimal.
pub fn blowup_obstruction(piece: &SymplecticPiece, k: u64) -> Result<Verdict, ObstructionError> {
    let not_applicable = |reason: &str| ObstructionError::NotApplicable {
        piece: piece.name.clone(),
        reason: reason.to_string(),
    };
    if piece.b_plus < 2 {
        return Err(not_applicable("needs b+ >= 2"));
    }
    if piece.c1_squared <= 0 {
        return Err(not_applicable("needs c1^2 > 0"));
    }
    let pieces = std::slice::from_ref(piece);
    let (chi, tau) = sum_chi_tau(pieces, k);
    Ok(Verdict::from_instance(
        Certificate::new(ObstructionTheorem::SingleBlowup, pieces, k),
        Some(ht_from(chi, tau)),
    ))
}

/// (2χ + 3τ)(M), the topological side of the Gauss–Bonnet-type identity
/// that Einstein metrics bound below by ⅔·α².
pub fn gauss_bonnet_defect(m: &ManifoldSpec) -> i64 {
    2 * m.chi() + 3 * m.tau()
}

/// The same quantity from the summands: Σc₁² − 4(n−1) − k.
pub fn gauss_bonnet_defect_from_pieces(pieces: &[SymplecticPiece], k: u64) -> i64 {
    let s: i64 = pieces.iter().map(|p| p.c1_squared).sum();
    s - 4 * (pieces.len() as i64 - 1) - k as i64
}

/// Everything `check-einstein` reports about one manifold.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub label: String,
    pub hitchin_thorpe: HtStatus,
    pub verdict: Verdict,
    pub einstein_known: Option<EinsteinCitation>,
}

impl Assessment {
    /// True when some check rules out Einstein metrics.
    pub fn nonexistence(&self) -> bool {
        self.hitchin_thorpe == HtStatus::Violated || self.verdict.is_obstructed()
    }
}

/// Picks the obstruction matching the manifold's symplectic pieces and
/// blow-ups and evaluates it.
pub fn assess(m: &ManifoldSpec) -> Result<Assessment, ObstructionError> {
    let ht = hitchin_thorpe(m);
    let pieces = m.pieces();
    let k = m.blowups();
    let covers_all = pieces.iter().map(|p| p.b_plus).sum::<u64>() == m.b_plus()
        && pieces.iter().map(|p| p.b_minus).sum::<u64>() + k == m.b_minus();
    let mut verdict = if !covers_all {
        Verdict::unknown(
            "some summands are neither symplectic pieces nor CP2bar",
            Some(ht),
        )
    } else {
        match pieces.len() {
            0 => Verdict::unknown("no symplectic summands", Some(ht)),
            1 => match blowup_obstruction(&pieces[0], k) {
                Ok(v) => v,
                Err(e) => Verdict::unknown(e.to_string(), Some(ht)),
            },
            2 | 3 => match einstein_obstruction(pieces, k) {
                Ok(v) => v,
                Err(e) => Verdict::unknown(e.to_string(), Some(ht)),
            },
            n => {
                return Err(ObstructionError::AmbiguousDecomposition(format!(
                    "{n} symplectic summands; group them into at most 3 pieces"
                )))
            }
        }
    };
    verdict.einstein_known = m.einstein_known();
    if ht == HtStatus::Violated {
        verdict
            .notes
            .push("Hitchin-Thorpe inequality violated: no Einstein metric".into());
    }
    Ok(Assessment {
        label: m.label().to_string(),
        hitchin_thorpe: ht,
        verdict,
        einstein_known: m.einstein_known(),
    })
}
