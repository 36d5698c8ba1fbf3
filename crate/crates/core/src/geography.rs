//! Geography in the (m, n) plane of `m·CP2 # n·CP2bar`: which points the
//! non-existence theorems claim, and which of them the engine can back with
//! an explicit witness manifold that re-verifies end to end.
//!
//! Claimed regions (denominators cleared):
//!
//! | tag     | hypothesis            | region          | witness                          |
//! |---------|-----------------------|-----------------|----------------------------------|
//! | `prop6` | m odd                 | 3n > 7m + 24    | Z_i # k·CP2bar                   |
//! | `molti` | m ≡ 2 (4), m ≥ 6      | 3n > 7m + 48    | Z_2j # Y_l # k·CP2bar            |
//! | `lots`  | m ≡ 1 (4), m ≥ 9      | 3n > 7m + 36    | Z_2j # R22 # Y_l # k·CP2bar      |
//!
//! Near the boundary the displayed witnesses need more room than the claimed
//! region gives, so claimed and certified are reported separately.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::expr::{ExprError, SumExpression, Term};
use crate::lattice::LatticeError;
use crate::manifolds::{ManifoldError, ManifoldSpec};
use crate::monopole::{monopole_set_of, MonopoleError};
use crate::obstruction::{
    blowup_obstruction, corollary_non, einstein_obstruction, hitchin_thorpe, hitchin_thorpe_margin,
    HtStatus, ObstructionError, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeographyError {
    #[error("unknown theorem tag `{0}` (expected prop6, molti, lots or spin)")]
    UnknownTheorem(String),
    #[error("parameters out of range for {theorem}: {reason}")]
    ParameterOutOfRange { theorem: TheoremTag, reason: String },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Manifold(#[from] ManifoldError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Obstruction(#[from] ObstructionError),
    #[error(transparent)]
    Monopole(#[from] MonopoleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremTag {
    Prop6,
    Molti,
    Lots,
    Spin,
}

impl TheoremTag {
    pub const REGIONS: [TheoremTag; 3] = [TheoremTag::Prop6, TheoremTag::Molti, TheoremTag::Lots];

    /// Whether (m, n) lies in the claimed region. `Spin` has no region in
    /// this plane.
    pub fn claims(self, m: u64, n: u64) -> bool {
        let (m, n) = (m as i64, n as i64);
        match self {
            TheoremTag::Prop6 => m % 2 == 1 && 3 * n > 7 * m + 24,
            TheoremTag::Molti => m % 4 == 2 && m >= 6 && 3 * n > 7 * m + 48,
            TheoremTag::Lots => m % 4 == 1 && m >= 9 && 3 * n > 7 * m + 36,
            TheoremTag::Spin => false,
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremTag::Prop6 => "prop6",
            TheoremTag::Molti => "molti",
            TheoremTag::Lots => "lots",
            TheoremTag::Spin => "spin",
        })
    }
}

impl FromStr for TheoremTag {
    type Err = GeographyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prop6" => Ok(TheoremTag::Prop6),
            "molti" => Ok(TheoremTag::Molti),
            "lots" => Ok(TheoremTag::Lots),
            "spin" => Ok(TheoremTag::Spin),
            other => Err(GeographyError::UnknownTheorem(other.to_string())),
        }
    }
}

/// Strict Hitchin–Thorpe for χ = 2+m+n, τ = m−n.
pub fn strict_ht(m: u64, n: u64) -> bool {
    let (m, n) = (m as i64, n as i64);
    2 * (2 + m + n) > 3 * (m - n).abs()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Gap {
    /// The blow-up count solved from (m, n) is negative.
    NegativeBlowups {
        k: i64,
    },
    /// The witness exists but its obstruction inequality fails.
    ObstructionThresholdMissed {
        lhs: i64,
        rhs: i64,
    },
    /// The family index solved from m has no catalog entry.
    OutOfRange {
        reason: String,
    },
    NotHomeomorphic,
    BandwidthShort {
        got: u64,
        wanted: u64,
    },
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::NegativeBlowups { k } => write!(f, "NegativeBlowups(k={k})"),
            Gap::ObstructionThresholdMissed { lhs, rhs } => {
                write!(f, "ObstructionThresholdMissed({lhs}<{rhs})")
            }
            Gap::OutOfRange { reason } => write!(f, "OutOfRange({reason})"),
            Gap::NotHomeomorphic => f.write_str("NotHomeomorphic"),
            Gap::BandwidthShort { got, wanted } => write!(f, "BandwidthShort({got}<{wanted})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessOutcome {
    Certified,
    Gap(Gap),
}

/// Results of re-verifying a constructed witness.
#[derive(Debug, Clone)]
pub struct WitnessChecks {
    pub manifold: ManifoldSpec,
    pub homeomorphic: bool,
    pub verdict: Verdict,
    pub bandwidth_lower_bound: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub theorem: TheoremTag,
    pub m: u64,
    pub n: u64,
    pub ell: i64,
    pub expression: Option<SumExpression>,
    pub checks: Option<WitnessChecks>,
    pub outcome: WitnessOutcome,
}

impl Witness {
    pub fn is_certified(&self) -> bool {
        self.outcome == WitnessOutcome::Certified
    }
}

fn term(multiplicity: u64, name: &str, params: &[i64]) -> Term {
    Term {
        multiplicity,
        name: name.to_string(),
        params: params.to_vec(),
    }
}

/// `m·CP2 # n·CP2bar` (S4 when both are zero).
pub fn target(m: u64, n: u64, catalog: &Catalog) -> Result<ManifoldSpec, ManifoldError> {
    let label = format!("{m}*CP2 # {n}*CP2bar");
    let base = if m == 0 {
        ManifoldSpec::sphere()
    } else {
        catalog.get("CP2", &[])?.times(m)
    };
    Ok(base.blow_up(n).relabel(label))
}

/// Builds the witness for `theorem` at (m, n) and re-verifies it: the
/// homeotype through intersection forms, the obstruction inequality, and
/// for `molti`/`lots`/`spin` a bandwidth of at least 2l.
pub fn witness(
    m: u64,
    n: u64,
    theorem: TheoremTag,
    ell: i64,
    catalog: &Catalog,
) -> Result<Witness, GeographyError> {
    let out_of_range = |reason: &str| GeographyError::ParameterOutOfRange {
        theorem,
        reason: reason.to_string(),
    };
    if ell < 0 {
        return Err(out_of_range("l must be non-negative"));
    }
    let (mi, ni) = (m as i64, n as i64);
    // (fixed terms, blow-up count)
    let (mut terms, k) = match theorem {
        TheoremTag::Prop6 => {
            if m % 2 != 1 {
                return Err(out_of_range("m must be odd"));
            }
            if m < 3 {
                let w = Witness {
                    theorem,
                    m,
                    n,
                    ell,
                    expression: None,
                    checks: None,
                    outcome: WitnessOutcome::Gap(Gap::OutOfRange {
                        reason: "Z_i needs i = (m+1)/2 >= 2".into(),
                    }),
                };
                return Ok(w);
            }
            (vec![term(1, "Z", &[(mi + 1) / 2])], ni - mi - 11)
        }
        TheoremTag::Molti => {
            if m % 4 != 2 || m < 6 {
                return Err(out_of_range("m must be 2 mod 4 and at least 6"));
            }
            let j = (mi - 2) / 4;
            (
                vec![term(1, "Z", &[2 * j]), term(1, "Y", &[ell])],
                ni - mi - 27,
            )
        }
        TheoremTag::Lots => {
            if m % 4 != 1 || m < 9 {
                return Err(out_of_range("m must be 1 mod 4 and at least 9"));
            }
            let j = (mi - 5) / 4;
            (
                vec![
                    term(1, "Z", &[2 * j]),
                    term(1, "R22", &[]),
                    term(1, "Y", &[ell]),
                ],
                ni - mi - 38,
            )
        }
        TheoremTag::Spin => {
            // X_{N-2} # Y_0 # Y_l has (b+, b-) = (4N+1, 20N+1)
            if m % 4 != 1 || m < 17 || n != 5 * m - 4 {
                return Err(out_of_range("(m, n) must be (4N+1, 20N+1) with N >= 4"));
            }
            let big_n = (mi - 1) / 4;
            (
                vec![
                    term(1, "X", &[big_n - 2]),
                    term(1, "Y", &[0]),
                    term(1, "Y", &[ell]),
                ],
                0,
            )
        }
    };
    if k < 0 {
        return Ok(Witness {
            theorem,
            m,
            n,
            ell,
            expression: None,
            checks: None,
            outcome: WitnessOutcome::Gap(Gap::NegativeBlowups { k }),
        });
    }
    if k > 0 {
        terms.push(term(k as u64, "CP2bar", &[]));
    }
    let expression = SumExpression { terms };
    let manifold = expression.evaluate(catalog)?;
    let reference = match theorem {
        TheoremTag::Spin => spin_target((mi - 1) / 4, catalog)?,
        _ => target(m, n, catalog)?,
    };
    let homeomorphic =
        manifold.b_plus() == m && manifold.b_minus() == n && manifold.homeomorphic(&reference)?;
    let verdict = match theorem {
        TheoremTag::Prop6 => blowup_obstruction(&manifold.pieces()[0], manifold.blowups())?,
        TheoremTag::Spin => corollary_non(manifold.pieces())?,
        _ => einstein_obstruction(manifold.pieces(), manifold.blowups())?,
    };
    let bandwidth_lower_bound = match theorem {
        TheoremTag::Prop6 => None,
        _ => Some(monopole_set_of(&manifold)?.bandwidth().lower_bound),
    };
    let wanted = 2 * ell as u64;
    let outcome = if !homeomorphic {
        WitnessOutcome::Gap(Gap::NotHomeomorphic)
    } else if !(verdict.is_obstructed() && verdict.reverify()) {
        let inst = verdict.instance.as_ref().expect("evaluated instance");
        WitnessOutcome::Gap(Gap::ObstructionThresholdMissed {
            lhs: inst.lhs,
            rhs: inst.rhs,
        })
    } else if bandwidth_lower_bound.is_some_and(|b| b < wanted) {
        WitnessOutcome::Gap(Gap::BandwidthShort {
            got: bandwidth_lower_bound.unwrap_or(0),
            wanted,
        })
    } else {
        WitnessOutcome::Certified
    };
    Ok(Witness {
        theorem,
        m,
        n,
        ell,
        expression: Some(expression),
        checks: Some(WitnessChecks {
            manifold,
            homeomorphic,
            verdict,
            bandwidth_lower_bound,
        }),
        outcome,
    })
}

/// `N·K3 # (N+1)·S2xS2`.
fn spin_target(big_n: i64, catalog: &Catalog) -> Result<ManifoldSpec, ManifoldError> {
    let k3 = catalog.get("K3", &[])?.times(big_n as u64);
    let s = catalog.get("S2xS2", &[])?.times(big_n as u64 + 1);
    Ok(k3.connected_sum(&s))
}

/// Every check behind "N·K3 # (N+1)·S2xS2 carries infinitely many smooth
/// structures without Einstein metrics", evaluated for one member
/// `X_{N-2} # Y_0 # Y_l` of the family.
#[derive(Debug, Clone)]
pub struct SpinFamilyReport {
    pub n: i64,
    pub ell: i64,
    pub manifold: ManifoldSpec,
    pub homeomorphic_to_target: bool,
    pub chi: i64,
    pub tau: i64,
    pub chi_matches: bool,
    pub tau_matches: bool,
    pub hitchin_thorpe: HtStatus,
    pub ht_margin: i64,
    pub verdict: Verdict,
    pub bandwidth_lower_bound: u64,
    pub bandwidth_witness: Option<(String, String)>,
}

impl SpinFamilyReport {
    pub fn certified(&self) -> bool {
        self.homeomorphic_to_target
            && self.chi_matches
            && self.tau_matches
            && self.hitchin_thorpe == HtStatus::StrictlySatisfied
            && self.verdict.is_obstructed()
            && self.verdict.reverify()
            && self.bandwidth_lower_bound >= 2 * self.ell as u64
    }
}

pub fn spin_family(
    n: i64,
    ell: i64,
    catalog: &Catalog,
) -> Result<SpinFamilyReport, GeographyError> {
    if n < 4 {
        return Err(GeographyError::ParameterOutOfRange {
            theorem: TheoremTag::Spin,
            reason: format!("n = {n} gives X_{} but X_k needs k >= 2", n - 2),
        });
    }
    if ell < 0 {
        return Err(GeographyError::ParameterOutOfRange {
            theorem: TheoremTag::Spin,
            reason: "l must be non-negative".into(),
        });
    }
    let expression = SumExpression {
        terms: vec![
            term(1, "X", &[n - 2]),
            term(1, "Y", &[0]),
            term(1, "Y", &[ell]),
        ],
    };
    let manifold = expression.evaluate(catalog)?;
    let homeomorphic_to_target = manifold.homeomorphic(&spin_target(n, catalog)?)?;
    let verdict = corollary_non(manifold.pieces())?;
    let bw = monopole_set_of(&manifold)?.bandwidth();
    let (chi, tau) = (manifold.chi(), manifold.tau());
    Ok(SpinFamilyReport {
        n,
        ell,
        homeomorphic_to_target,
        chi,
        tau,
        chi_matches: chi == 24 * n + 4,
        tau_matches: tau == -16 * n,
        hitchin_thorpe: hitchin_thorpe(&manifold),
        ht_margin: hitchin_thorpe_margin(&manifold),
        verdict,
        bandwidth_lower_bound: bw.lower_bound,
        bandwidth_witness: bw.witness.map(|(a, b)| (a.to_string(), b.to_string())),
        manifold,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionReport {
    pub m: u64,
    pub n: u64,
    pub claimed: BTreeSet<TheoremTag>,
    /// Certified tags with the witness expression.
    pub certified: BTreeMap<TheoremTag, String>,
    /// Claimed tags the witness construction could not back.
    pub gaps: BTreeMap<TheoremTag, Gap>,
    pub strict_ht: bool,
}

pub fn region_membership(m: u64, n: u64) -> RegionReport {
    RegionReport {
        m,
        n,
        claimed: TheoremTag::REGIONS
            .into_iter()
            .filter(|t| t.claims(m, n))
            .collect(),
        certified: BTreeMap::new(),
        gaps: BTreeMap::new(),
        strict_ht: strict_ht(m, n),
    }
}

/// Region membership plus a certification attempt for each claimed tag.
pub fn certify_point(m: u64, n: u64, ell: i64, catalog: &Catalog) -> RegionReport {
    let mut report = region_membership(m, n);
    for &tag in &report.claimed.clone() {
        match witness(m, n, tag, ell, catalog) {
            Ok(w) => match (&w.outcome, &w.expression) {
                (WitnessOutcome::Certified, Some(e)) => {
                    report.certified.insert(tag, e.to_string());
                }
                (WitnessOutcome::Gap(g), _) => {
                    report.gaps.insert(tag, g.clone());
                }
                (WitnessOutcome::Certified, None) => unreachable!(),
            },
            Err(e) => {
                report.gaps.insert(
                    tag,
                    Gap::OutOfRange {
                        reason: e.to_string(),
                    },
                );
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub certify: bool,
    pub ell: i64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            certify: false,
            ell: 1,
        }
    }
}

/// One report per grid point, in lexicographic (m, n) order.
pub fn scan(
    m_range: std::ops::RangeInclusive<u64>,
    n_range: std::ops::RangeInclusive<u64>,
    options: ScanOptions,
    catalog: &Catalog,
) -> Vec<RegionReport> {
    let points: Vec<(u64, u64)> = m_range
        .flat_map(|m| n_range.clone().map(move |n| (m, n)))
        .collect();
    points
        .par_iter()
        .map(|&(m, n)| {
            if options.certify {
                certify_point(m, n, options.ell, catalog)
            } else {
                region_membership(m, n)
            }
        })
        .collect()
}

pub const CSV_HEADER: [&str; 8] = [
    "m",
    "n",
    "claimed_prop6",
    "claimed_molti",
    "claimed_lots",
    "strict_ht",
    "certified",
    "witness",
];

/// CSV with the columns of [`CSV_HEADER`]; multiple certified tags are
/// joined with `;`.
pub fn reports_to_csv(reports: &[RegionReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        let certified: Vec<String> = r.certified.keys().map(ToString::to_string).collect();
        let witnesses: Vec<&str> = r.certified.values().map(String::as_str).collect();
        w.write_record([
            r.m.to_string(),
            r.n.to_string(),
            r.claimed.contains(&TheoremTag::Prop6).to_string(),
            r.claimed.contains(&TheoremTag::Molti).to_string(),
            r.claimed.contains(&TheoremTag::Lots).to_string(),
            r.strict_ht.to_string(),
            certified.join(";"),
            witnesses.join(";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn reports_to_json(reports: &[RegionReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
