//! Invariant records of simply connected smooth 4-manifolds and the
//! connected-sum / blow-up calculus on them.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassError, CohClass, GeneratorBasis};
use crate::lattice::{LatticeError, UnimodularForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifoldError {
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),
    #[error("parameters {params:?} out of range for `{name}`: {reason}")]
    ParameterOutOfRange {
        name: String,
        params: Vec<i64>,
        reason: String,
    },
    #[error("inconsistent invariants for `{name}`: {reason}")]
    Inconsistent { name: String, reason: String },
    #[error("catalog file: {0}")]
    CatalogFile(String),
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// Where an Einstein metric is known to exist for some smooth structure in
/// the homeotype. Informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EinsteinCitation {
    /// Ricci-flat Kähler metric on K3 (Calabi conjecture).
    Yau,
    /// Kähler–Einstein metric on a surface with ample canonical bundle.
    AubinYau,
}

impl fmt::Display for EinsteinCitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EinsteinCitation::Yau => "Yau",
            EinsteinCitation::AubinYau => "AubinYau",
        })
    }
}

/// A symplectic summand, carrying its canonical first Chern class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticPiece {
    /// Display label, e.g. `X_2`.
    pub name: String,
    /// c₁ over a basis local to the piece.
    pub c1: CohClass,
    pub c1_squared: i64,
    pub b_plus: u64,
    pub b_minus: u64,
}

impl SymplecticPiece {
    pub fn chi(&self) -> i64 {
        2 + self.b_plus as i64 + self.b_minus as i64
    }

    pub fn tau(&self) -> i64 {
        self.b_plus as i64 - self.b_minus as i64
    }

    /// c₁² = 2χ + 3τ, b₊ odd, and the stored class has the stored square.
    pub fn validate(&self) -> Result<(), ManifoldError> {
        let bad = |reason: String| ManifoldError::Inconsistent {
            name: self.name.clone(),
            reason,
        };
        let expected = 2 * self.chi() + 3 * self.tau();
        if self.c1_squared != expected {
            return Err(bad(format!(
                "c1^2 = {} but 2chi + 3tau = {expected}",
                self.c1_squared
            )));
        }
        if self.b_plus.is_multiple_of(2) {
            return Err(bad(format!(
                "b+ = {} is even, impossible for an almost-complex simply connected manifold",
                self.b_plus
            )));
        }
        let sq = self.c1.square()?;
        if sq != self.c1_squared {
            return Err(bad(format!("c1 squares to {sq}, not {}", self.c1_squared)));
        }
        Ok(())
    }

    /// Bauer's hypothesis on each summand.
    pub fn b_plus_is_3_mod_4(&self) -> bool {
        self.b_plus % 4 == 3
    }
}

/// Basis of H² of `P₁ # … # Pₙ # k·CP2bar`: one block per piece, one block
/// per exceptional class.
#[derive(Debug, Clone)]
pub struct InducedBasis {
    pub basis: Arc<GeneratorBasis>,
    /// c₁ of each piece, pushed forward into the summed basis.
    pub c1: Vec<CohClass>,
    /// E₁ … E_k, each with square −1.
    pub exceptional: Vec<CohClass>,
}

impl InducedBasis {
    pub fn new(pieces: &[SymplecticPiece], blowups: u64) -> Result<Self, ClassError> {
        let mut basis = GeneratorBasis::new();
        let mut maps = Vec::with_capacity(pieces.len());
        let mut seen: Vec<&str> = Vec::new();
        for piece in pieces {
            let copies = seen.iter().filter(|n| **n == piece.name).count();
            seen.push(&piece.name);
            let label = if copies == 0 {
                piece.name.clone()
            } else {
                format!("{}.{}", piece.name, copies + 1)
            };
            let local = piece.c1.basis();
            let mut blocks = std::collections::HashMap::new();
            let mut map = Vec::with_capacity(local.len());
            for g in local.generators() {
                let block = *blocks.entry(g.block).or_insert_with(|| basis.new_block());
                map.push(basis.push(
                    format!("{}({label})", g.name),
                    block,
                    g.square,
                    g.divisibility,
                    g.opaque,
                )?);
            }
            let gens = local.generators();
            for i in 0..local.len() {
                for j in i + 1..local.len() {
                    if gens[i].block != gens[j].block {
                        continue;
                    }
                    if let Ok(v) = local.pairing(i, j) {
                        basis.declare_pairing(map[i], map[j], v)?;
                    }
                }
            }
            maps.push(map);
        }
        let mut e_index = Vec::new();
        for j in 1..=blowups {
            e_index.push(basis.push_isolated(format!("E{j}"), -1, 1, false)?);
        }
        let basis = Arc::new(basis);
        let c1 = pieces
            .iter()
            .zip(&maps)
            .map(|(p, map)| {
                CohClass::from_terms(&basis, p.c1.coeffs().iter().map(|(&i, &c)| (map[i], c)))
            })
            .collect();
        let exceptional = e_index
            .into_iter()
            .map(|i| CohClass::generator(&basis, i))
            .collect();
        Ok(Self {
            basis,
            c1,
            exceptional,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharNumbers {
    pub chi: i64,
    pub tau: i64,
    pub two_chi_plus_three_tau: i64,
    /// (χ + τ)/4, exact.
    #[serde(serialize_with = "ser_ratio")]
    pub todd_genus: Ratio<i64>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Invariants of a smooth simply connected closed 4-manifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifoldSpec {
    label: String,
    b_plus: u64,
    b_minus: u64,
    spin: bool,
    form: UnimodularForm,
    pieces: Vec<SymplecticPiece>,
    blowups: u64,
    einstein_known: Option<EinsteinCitation>,
}

/// The intersection form forced by (b₊, b₋, spin) on a simply connected
/// smooth manifold, up to isomorphism.
pub fn form_for(
    label: &str,
    b_plus: u64,
    b_minus: u64,
    spin: bool,
) -> Result<UnimodularForm, ManifoldError> {
    let bad = |reason: String| ManifoldError::Inconsistent {
        name: label.to_string(),
        reason,
    };
    let tau = b_plus as i64 - b_minus as i64;
    if spin {
        if tau % 8 != 0 {
            return Err(bad(format!(
                "spin but signature {tau} is not divisible by 8"
            )));
        }
        let e8 = tau / 8;
        let rest = (b_plus + b_minus)
            .checked_sub(8 * e8.unsigned_abs())
            .ok_or_else(|| bad("rank too small for an even form".into()))?;
        Ok(UnimodularForm::even(e8, rest / 2))
    } else {
        if b_plus + b_minus == 0 {
            return Err(bad("non-spin with b2 = 0".into()));
        }
        Ok(UnimodularForm::diagonal(b_plus, b_minus))
    }
}

impl ManifoldSpec {
    /// Record with no symplectic pieces, form derived from (b₊, b₋, spin).
    pub fn from_invariants(
        label: impl Into<String>,
        b_plus: u64,
        b_minus: u64,
        spin: bool,
    ) -> Result<Self, ManifoldError> {
        let label = label.into();
        let form = form_for(&label, b_plus, b_minus, spin)?;
        Ok(Self {
            label,
            b_plus,
            b_minus,
            spin,
            form,
            pieces: Vec::new(),
            blowups: 0,
            einstein_known: None,
        })
    }

    pub fn sphere() -> Self {
        Self::from_invariants("S4", 0, 0, true).expect("S4 invariants are consistent")
    }

    pub(crate) fn with_piece(mut self, piece: SymplecticPiece) -> Self {
        self.pieces.push(piece);
        self
    }

    pub(crate) fn with_blowups(mut self, blowups: u64) -> Self {
        self.blowups = blowups;
        self
    }

    pub(crate) fn with_einstein(mut self, c: Option<EinsteinCitation>) -> Self {
        self.einstein_known = c;
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn b_plus(&self) -> u64 {
        self.b_plus
    }
    pub fn b_minus(&self) -> u64 {
        self.b_minus
    }
    pub fn spin(&self) -> bool {
        self.spin
    }
    pub fn form(&self) -> &UnimodularForm {
        &self.form
    }
    pub fn pieces(&self) -> &[SymplecticPiece] {
        &self.pieces
    }
    pub fn blowups(&self) -> u64 {
        self.blowups
    }
    pub fn einstein_known(&self) -> Option<EinsteinCitation> {
        self.einstein_known
    }

    pub fn chi(&self) -> i64 {
        2 + self.b_plus as i64 + self.b_minus as i64
    }

    pub fn tau(&self) -> i64 {
        self.b_plus as i64 - self.b_minus as i64
    }

    pub fn char_numbers(&self) -> CharNumbers {
        let (chi, tau) = (self.chi(), self.tau());
        CharNumbers {
            chi,
            tau,
            two_chi_plus_three_tau: 2 * chi + 3 * tau,
            todd_genus: Ratio::new(chi + tau, 4),
        }
    }

    /// χ, τ, form and spin flag agree with each other.
    pub fn check_consistency(&self) -> Result<(), ManifoldError> {
        let bad = |reason: String| ManifoldError::Inconsistent {
            name: self.label.clone(),
            reason,
        };
        if self.form.rank() != self.b_plus + self.b_minus {
            return Err(bad(format!(
                "form rank {} != b+ + b- = {}",
                self.form.rank(),
                self.b_plus + self.b_minus
            )));
        }
        if self.form.signature() != self.tau() {
            return Err(bad(format!(
                "form signature {} != tau = {}",
                self.form.signature(),
                self.tau()
            )));
        }
        if self.form.is_even() != self.spin {
            return Err(bad("form parity disagrees with the spin flag".into()));
        }
        if self.spin && self.blowups > 0 {
            return Err(bad("spin with CP2bar summands".into()));
        }
        Ok(())
    }

    pub fn connected_sum(&self, other: &ManifoldSpec) -> ManifoldSpec {
        ManifoldSpec {
            label: format!("{} # {}", self.label, other.label),
            b_plus: self.b_plus + other.b_plus,
            b_minus: self.b_minus + other.b_minus,
            spin: self.spin && other.spin,
            form: self.form.direct_sum(&other.form),
            pieces: self.pieces.iter().chain(&other.pieces).cloned().collect(),
            blowups: self.blowups + other.blowups,
            einstein_known: None,
        }
    }

    /// `self # k·CP2bar`.
    pub fn blow_up(&self, k: u64) -> ManifoldSpec {
        if k == 0 {
            return self.clone();
        }
        let suffix = if k == 1 {
            "CP2bar".to_string()
        } else {
            format!("{k}*CP2bar")
        };
        ManifoldSpec {
            label: format!("{} # {suffix}", self.label),
            b_plus: self.b_plus,
            b_minus: self.b_minus + k,
            spin: false,
            form: self.form.direct_sum(&UnimodularForm::diagonal(0, k)),
            pieces: self.pieces.clone(),
            blowups: self.blowups + k,
            einstein_known: None,
        }
    }

    /// Basis of H² made of the pieces' generators and the exceptional
    /// classes E₁ … E_k of the folded-in CP2bar summands.
    pub fn class_basis(&self) -> Result<InducedBasis, ClassError> {
        InducedBasis::new(&self.pieces, self.blowups)
    }

    /// For a single symplectic piece blown up k times: the canonical class
    /// c₁ + E₁ + … + E_k of the blow-up and its square c₁² − k.
    pub fn blown_up_canonical_class(&self) -> Option<Result<(CohClass, i64), ClassError>> {
        if self.pieces.len() != 1 {
            return None;
        }
        Some((|| {
            let ib = self.class_basis()?;
            let mut c = ib.c1[0].clone();
            for e in &ib.exceptional {
                c = c.add(e)?;
            }
            let sq = self.pieces[0].c1_squared - self.blowups as i64;
            Ok((c, sq))
        })())
    }

    /// Homeomorphic iff the intersection forms are isomorphic.
    pub fn homeomorphic(&self, other: &ManifoldSpec) -> Result<bool, LatticeError> {
        self.form.is_isomorphic(&other.form)
    }

    /// `n`-fold connected sum of copies (`S4` for `n = 0`).
    pub fn times(&self, n: u64) -> ManifoldSpec {
        match n {
            0 => ManifoldSpec::sphere(),
            _ => (1..n).fold(self.clone(), |acc, _| acc.connected_sum(self)),
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
