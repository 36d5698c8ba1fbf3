//! Building blocks: K3, S2xS2, CP2, CP2bar, the Gompf families X_k and Z_i,
//! the homotopy K3 surfaces Y_l, R22, and the double branched covers BC_p.
//!
//! Entries are axiomatic invariant data. Each record is checked for
//! internal consistency (c₁² = 2χ + 3τ, b₊ odd for symplectic pieces,
//! parity against spin) whenever it is turned into a [`ManifoldSpec`].
//! A TOML catalog file can add entries or override built-in ones.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classes::{CohClass, GeneratorBasis};
use crate::manifolds::{form_for, EinsteinCitation, ManifoldError, ManifoldSpec, SymplecticPiece};

/// Environment variable naming an alternative catalog file.
pub const CATALOG_ENV: &str = "FOURFOLD_CATALOG";

/// Names accepted in sum expressions.
pub const NAMES: [&str; 9] = ["K3", "S2xS2", "CP2", "CP2bar", "X", "Y", "Z", "R22", "BC"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRecord {
    pub name: String,
    #[serde(default)]
    pub params: Vec<i64>,
    pub b_plus: u64,
    pub b_minus: u64,
    pub spin: bool,
    /// Present iff the entry is a symplectic piece.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1_squared: Option<i64>,
    /// Certified divisor of c₁; 0 means c₁ = 0.
    #[serde(default = "one")]
    pub c1_divisibility: u64,
    /// When set, c₁ = c1_divisibility · g for a declared generator with
    /// this name; otherwise c₁ is an opaque generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1_generator: Option<String>,
    #[serde(default)]
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub einstein_known: Option<EinsteinCitation>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    entry: Vec<CatalogRecord>,
}

fn display_label(name: &str, params: &[i64]) -> String {
    match params {
        [] => name.to_string(),
        ps => {
            let joined: Vec<String> = ps.iter().map(i64::to_string).collect();
            format!("{name}_{}", joined.join(","))
        }
    }
}

/// Double cover of CP2 branched over a smooth curve of degree 2p:
/// χ = 2·3 − χ(curve), τ = 2·1 − (2p)²/2. Used only as a cross-check.
fn branched_cover_chi_tau(p: i64) -> (i64, i64) {
    let d = 2 * p;
    let genus = (d - 1) * (d - 2) / 2;
    (6 - (2 - 2 * genus), 2 - d * d / 2)
}

impl CatalogRecord {
    pub fn label(&self) -> String {
        display_label(&self.name, &self.params)
    }

    fn chi(&self) -> i64 {
        2 + self.b_plus as i64 + self.b_minus as i64
    }

    fn tau(&self) -> i64 {
        self.b_plus as i64 - self.b_minus as i64
    }

    fn piece(&self) -> Result<Option<SymplecticPiece>, ManifoldError> {
        let Some(c1_squared) = self.c1_squared else {
            return Ok(None);
        };
        let label = self.label();
        let bad = |reason: String| ManifoldError::Inconsistent {
            name: label.clone(),
            reason,
        };
        let d = self.c1_divisibility;
        let mut basis = GeneratorBasis::new();
        let coeff = match (&self.c1_generator, d) {
            (Some(g), 0) => {
                basis.push_isolated(g.clone(), 0, 1, false)?;
                0
            }
            (None, 0) => 0,
            (Some(g), d) => {
                let dd = (d * d) as i64;
                if c1_squared % dd != 0 {
                    return Err(bad(format!(
                        "c1^2 = {c1_squared} is not divisible by {d}^2"
                    )));
                }
                basis.push_isolated(g.clone(), c1_squared / dd, 1, false)?;
                d as i64
            }
            (None, d) => {
                if c1_squared % (d * d) as i64 != 0 {
                    return Err(bad(format!(
                        "c1^2 = {c1_squared} is not divisible by {d}^2"
                    )));
                }
                basis.push_isolated("c1", c1_squared, d, true)?;
                1
            }
        };
        if coeff == 0 && c1_squared != 0 {
            return Err(bad(format!("c1 = 0 but c1^2 = {c1_squared}")));
        }
        let basis = Arc::new(basis);
        let c1 = if coeff == 0 {
            CohClass::zero(&basis)
        } else {
            CohClass::from_terms(&basis, [(0, coeff)])
        };
        Ok(Some(SymplecticPiece {
            name: label,
            c1,
            c1_squared,
            b_plus: self.b_plus,
            b_minus: self.b_minus,
        }))
    }

    /// Checks the record and returns any warning-level findings.
    pub fn validate(&self) -> Result<Vec<String>, ManifoldError> {
        let label = self.label();
        let bad = |reason: String| ManifoldError::Inconsistent {
            name: label.clone(),
            reason,
        };
        let form = form_for(&label, self.b_plus, self.b_minus, self.spin)?;
        let mut warnings = Vec::new();
        if self.spin {
            if let Some(w) = form.realizability_warning() {
                warnings.push(format!("{label}: {w}"));
            }
        }
        if let Some(piece) = self.piece()? {
            piece.validate()?;
        }
        if self.name == "CP2bar" && (self.b_plus, self.b_minus, self.spin) != (0, 1, false) {
            return Err(bad("CP2bar must have (b+, b-, spin) = (0, 1, false)".into()));
        }
        if self.name == "BC" {
            if let [p] = self.params[..] {
                let (chi, tau) = branched_cover_chi_tau(p);
                if (chi, tau) != (self.chi(), self.tau()) {
                    return Err(bad(format!(
                        "double-cover formulas give (chi, tau) = ({chi}, {tau}), record has ({}, {})",
                        self.chi(),
                        self.tau()
                    )));
                }
            }
        }
        Ok(warnings)
    }

    pub fn to_spec(&self) -> Result<ManifoldSpec, ManifoldError> {
        self.validate()?;
        let mut spec =
            ManifoldSpec::from_invariants(self.label(), self.b_plus, self.b_minus, self.spin)?
                .with_einstein(self.einstein_known);
        if let Some(piece) = self.piece()? {
            spec = spec.with_piece(piece);
        }
        if self.name == "CP2bar" {
            spec = spec.with_blowups(1);
        }
        spec.check_consistency()?;
        Ok(spec)
    }
}

fn out_of_range(name: &str, params: &[i64], reason: &str) -> ManifoldError {
    ManifoldError::ParameterOutOfRange {
        name: name.to_string(),
        params: params.to_vec(),
        reason: reason.to_string(),
    }
}

/// Built-in entry generated from the family formulas.
pub fn builtin_record(name: &str, params: &[i64]) -> Result<CatalogRecord, ManifoldError> {
    let rec = |b_plus: i64, b_minus: i64, spin, c1_squared, c1_divisibility, provenance: &str| {
        CatalogRecord {
            name: name.to_string(),
            params: params.to_vec(),
            b_plus: b_plus as u64,
            b_minus: b_minus as u64,
            spin,
            c1_squared,
            c1_divisibility,
            c1_generator: None,
            provenance: provenance.to_string(),
            einstein_known: None,
        }
    };
    let fixed = |params: &[i64]| -> Result<(), ManifoldError> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(out_of_range(name, params, "takes no parameters"))
        }
    };
    let single = |params: &[i64]| -> Result<i64, ManifoldError> {
        match params {
            [p] => Ok(*p),
            _ => Err(out_of_range(name, params, "takes exactly one parameter")),
        }
    };
    Ok(match name {
        "K3" => {
            fixed(params)?;
            CatalogRecord {
                einstein_known: Some(EinsteinCitation::Yau),
                ..rec(
                    3,
                    19,
                    true,
                    Some(0),
                    0,
                    "Kummer surface; Ricci-flat Kähler metric by Yau",
                )
            }
        }
        "S2xS2" => {
            fixed(params)?;
            rec(1, 1, true, Some(8), 2, "product of spheres, c1 = 2(a + b)")
        }
        "CP2" => {
            fixed(params)?;
            rec(1, 0, false, Some(9), 3, "complex projective plane, c1 = 3h")
        }
        "CP2bar" => {
            fixed(params)?;
            rec(0, 1, false, None, 1, "CP2 with reversed orientation")
        }
        "X" => {
            let k = single(params)?;
            if k < 2 {
                return Err(out_of_range(name, params, "X_k needs k >= 2"));
            }
            rec(
                4 * k + 3,
                20 * k + 3,
                true,
                Some(16),
                1,
                "Gompf symplectic spin manifold with (chi, tau) = (24k+8, -16k)",
            )
        }
        "Y" => {
            let ell = single(params)?;
            if ell < 0 {
                return Err(out_of_range(name, params, "Y_l needs l >= 0"));
            }
            CatalogRecord {
                c1_generator: Some("f".into()),
                einstein_known: None,
                ..rec(
                    3,
                    19,
                    true,
                    Some(0),
                    2 * ell as u64,
                    "Kummer surface after a logarithmic transform of order 2l+1; c1 = 2l f",
                )
            }
        }
        "Z" => {
            let i = single(params)?;
            if i < 2 {
                return Err(out_of_range(name, params, "Z_i needs i >= 2"));
            }
            rec(
                2 * i - 1,
                2 * i + 10,
                false,
                Some(8 * i - 11),
                1,
                "Gompf symplectic manifold with Todd genus i and c1^2 = 8i - 11",
            )
        }
        "R22" => {
            fixed(params)?;
            rec(
                3,
                14,
                false,
                Some(5),
                1,
                "Gompf symplectic manifold R(2,2) with b+ = 3, b- = 14",
            )
        }
        "BC" => {
            let p = single(params)?;
            if p < 6 || p % 4 != 2 {
                return Err(out_of_range(
                    name,
                    params,
                    "BC_p needs p >= 6 and p = 2 mod 4",
                ));
            }
            CatalogRecord {
                einstein_known: Some(EinsteinCitation::AubinYau),
                ..rec(
                    p * p - 3 * p + 3,
                    3 * p * p - 3 * p + 1,
                    false,
                    Some(2 * (p - 3) * (p - 3)),
                    1,
                    "double cover of CP2 branched over a smooth curve of degree 2p; ample canonical bundle",
                )
            }
        }
        _ => return Err(ManifoldError::UnknownCatalogEntry(name.to_string())),
    })
}

/// Built-in families plus any records loaded from a catalog file.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    overrides: BTreeMap<(String, Vec<i64>), CatalogRecord>,
    warnings: Vec<String>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::default()
    }

    /// Built-in catalog extended by the `[[entry]]` records of a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self, ManifoldError> {
        let file: CatalogFile =
            toml::from_str(text).map_err(|e| ManifoldError::CatalogFile(e.to_string()))?;
        let mut catalog = Self::builtin();
        for record in file.entry {
            catalog.warnings.extend(record.validate()?);
            record.to_spec()?;
            catalog
                .overrides
                .insert((record.name.clone(), record.params.clone()), record);
        }
        Ok(catalog)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ManifoldError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ManifoldError::CatalogFile(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Honors `FOURFOLD_CATALOG` when set.
    pub fn from_env() -> Result<Self, ManifoldError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) if !path.is_empty() => Self::from_path(path),
            _ => Ok(Self::builtin()),
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn record(&self, name: &str, params: &[i64]) -> Result<CatalogRecord, ManifoldError> {
        match self.overrides.get(&(name.to_string(), params.to_vec())) {
            Some(r) => Ok(r.clone()),
            None => builtin_record(name, params),
        }
    }

    pub fn get(&self, name: &str, params: &[i64]) -> Result<ManifoldSpec, ManifoldError> {
        self.record(name, params)?.to_spec()
    }

    pub fn records_to_toml(records: &[CatalogRecord]) -> String {
        let file = CatalogFile {
            entry: records.to_vec(),
        };
        toml::to_string(&file).expect("catalog records serialize")
    }
}
