//! Regression harness: every quantitative claim the engine reproduces, each
//! evaluated from catalog data through the public operations and compared
//! against the closed-form expectation.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::catalog::Catalog;
use crate::geography::{spin_family, strict_ht, witness, TheoremTag};
use crate::lattice::UnimodularForm;
use crate::manifolds::{EinsteinCitation, ManifoldSpec};
use crate::monopole::monopole_set_of;
use crate::obstruction::{assess, hitchin_thorpe, HtStatus};

pub const TAGS: [&str; 8] = [
    "xk", "spin", "zi", "prop6", "molti", "lots", "example", "boundary",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub tag: &'static str,
    pub claim: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: computed {} expected {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.tag,
            self.claim,
            self.computed,
            self.expected
        )
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown reproduce tag `{0}` (expected one of xk, spin, zi, prop6, molti, lots, example, boundary)")]
pub struct UnknownTag(pub String);

struct Rows {
    tag: &'static str,
    rows: Vec<Row>,
}

impl Rows {
    fn check(
        &mut self,
        claim: impl Into<String>,
        computed: impl fmt::Display,
        expected: impl fmt::Display,
    ) {
        let (computed, expected) = (computed.to_string(), expected.to_string());
        self.rows.push(Row {
            tag: self.tag,
            claim: claim.into(),
            pass: computed == expected,
            computed,
            expected,
        });
    }

    fn error(
        &mut self,
        claim: impl Into<String>,
        err: impl fmt::Display,
        expected: impl fmt::Display,
    ) {
        self.rows.push(Row {
            tag: self.tag,
            claim: claim.into(),
            computed: format!("error: {err}"),
            expected: expected.to_string(),
            pass: false,
        });
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    num_integer::Integer::div_ceil(&a, &b)
}

fn target_sum(catalog: &Catalog, parts: &[(&str, u64)]) -> Result<ManifoldSpec, String> {
    let mut acc = ManifoldSpec::sphere();
    for &(name, count) in parts {
        if count > 0 {
            let m = catalog.get(name, &[]).map_err(|e| e.to_string())?;
            acc = acc.connected_sum(&m.times(count));
        }
    }
    Ok(acc)
}

fn xk(catalog: &Catalog, out: &mut Rows) {
    for k in 2..=10i64 {
        let claim = format!("X_{k} invariants");
        let expected = format!(
            "chi={} tau={} b+={} c1^2=16 form={}",
            24 * k + 8,
            -16 * k,
            4 * k + 3,
            UnimodularForm::even(-2 * k, 4 * k as u64 + 3)
        );
        let x = match catalog.get("X", &[k]) {
            Ok(x) => x,
            Err(e) => {
                out.error(claim, e, expected);
                continue;
            }
        };
        let c1sq = x
            .pieces()
            .first()
            .map(|p| p.c1_squared.to_string())
            .unwrap_or("none".into());
        out.check(
            claim,
            format!(
                "chi={} tau={} b+={} c1^2={} form={}",
                x.chi(),
                x.tau(),
                x.b_plus(),
                c1sq,
                x.form()
            ),
            expected,
        );
        let claim = format!("X_{k} homeomorphic to {k}*K3 # {}*S2xS2", k + 3);
        match target_sum(catalog, &[("K3", k as u64), ("S2xS2", k as u64 + 3)]) {
            Ok(t) => match x.homeomorphic(&t) {
                Ok(h) => out.check(claim, h, true),
                Err(e) => out.error(claim, e, true),
            },
            Err(e) => out.error(claim, e, true),
        }
    }
}

fn spin(catalog: &Catalog, out: &mut Rows) {
    for n in 4..=12i64 {
        for ell in 1..=5i64 {
            let claim = format!("X_{} # Y_0 # Y_{ell}", n - 2);
            let expected = format!(
                "chi={} tau={} margin=8 ht=strictly-satisfied obstructed 16<=24 bw=2l={} pair=ok homeo=true",
                24 * n + 4,
                -16 * n,
                2 * ell
            );
            let r = match spin_family(n, ell, catalog) {
                Ok(r) => r,
                Err(e) => {
                    out.error(claim, e, expected);
                    continue;
                }
            };
            let cert = match r.verdict.certificate() {
                Some(c) if r.verdict.reverify() => format!("obstructed {}<={}", c.rhs, c.lhs),
                _ => format!("{}", r.verdict.status),
            };
            // the bound must come from an actual pair of basic classes
            let pair = monopole_set_of(&r.manifold)
                .ok()
                .and_then(|set| {
                    let bw = set.bandwidth();
                    let (a, b) = bw.witness?;
                    let ok = set.contains(&a)
                        && set.contains(&b)
                        && a.sub(&b).ok()?.divisibility() == 2 * bw.lower_bound;
                    Some(ok)
                })
                .unwrap_or(false);
            out.check(
                claim,
                format!(
                    "chi={} tau={} margin={} ht={} {} bw=2l={} pair={} homeo={}",
                    r.chi,
                    r.tau,
                    r.ht_margin,
                    r.hitchin_thorpe,
                    cert,
                    r.bandwidth_lower_bound,
                    if pair { "ok" } else { "missing" },
                    r.homeomorphic_to_target
                ),
                expected,
            );
        }
    }
}

fn zi(catalog: &Catalog, out: &mut Rows) {
    for i in 2..=10i64 {
        let claim = format!("Z_{i} invariants");
        let expected = format!(
            "todd={} c1^2={} b+={} b-={}",
            Ratio::from_integer(i),
            8 * i - 11,
            2 * i - 1,
            2 * i + 10
        );
        match catalog.get("Z", &[i]) {
            Ok(z) => {
                let c1sq = z
                    .pieces()
                    .first()
                    .map(|p| p.c1_squared.to_string())
                    .unwrap_or("none".into());
                out.check(
                    claim,
                    format!(
                        "todd={} c1^2={} b+={} b-={}",
                        z.char_numbers().todd_genus,
                        c1sq,
                        z.b_plus(),
                        z.b_minus()
                    ),
                    expected,
                );
            }
            Err(e) => out.error(claim, e, expected),
        }
    }
}

fn prop6(catalog: &Catalog, out: &mut Rows) {
    for m in [3i64, 5, 7, 9, 11] {
        let n = m + 11 + ceil_div(4 * m - 7, 3);
        let claim = format!("Z_{} # k*CP2bar at (m, n) = ({m}, {n})", (m + 1) / 2);
        let ht_expected = n < 5 * m + 4;
        let expected = format!("certified b=({m},{n}) strict_ht={ht_expected}");
        match witness(m as u64, n as u64, TheoremTag::Prop6, 1, catalog) {
            Ok(w) => {
                let (state, b, ht) = match &w.checks {
                    Some(c) => (
                        if w.is_certified() {
                            "certified".to_string()
                        } else {
                            format!("{:?}", w.outcome)
                        },
                        format!("({},{})", c.manifold.b_plus(), c.manifold.b_minus()),
                        hitchin_thorpe(&c.manifold) == HtStatus::StrictlySatisfied,
                    ),
                    None => (format!("{:?}", w.outcome), "none".into(), false),
                };
                out.check(claim, format!("{state} b={b} strict_ht={ht}"), expected);
            }
            Err(e) => out.error(claim, e, expected),
        }
    }
}

fn molti(catalog: &Catalog, out: &mut Rows) {
    for m in [6i64, 10, 14] {
        let n = (m + 27).max(ceil_div(7 * m + 49, 3));
        let mut bounds = Vec::new();
        for ell in 1..=4i64 {
            let claim = format!("molti witness at (m, n) = ({m}, {n}), l = {ell}");
            let expected = format!("certified bw>={}", 2 * ell);
            match witness(m as u64, n as u64, TheoremTag::Molti, ell, catalog) {
                Ok(w) => {
                    let bw = w.checks.as_ref().and_then(|c| c.bandwidth_lower_bound);
                    bounds.push(bw.unwrap_or(0));
                    let state = if w.is_certified() {
                        "certified".to_string()
                    } else {
                        match &w.outcome {
                            crate::geography::WitnessOutcome::Gap(g) => g.to_string(),
                            _ => unreachable!(),
                        }
                    };
                    let shown = match bw {
                        Some(b) if b >= 2 * ell as u64 => format!("bw>={}", 2 * ell),
                        Some(b) => format!("bw={b}"),
                        None => "bw=none".into(),
                    };
                    out.check(claim, format!("{state} {shown}"), expected);
                }
                Err(e) => {
                    bounds.push(0);
                    out.error(claim, e, expected);
                }
            }
        }
        let increasing = bounds.windows(2).all(|w| w[0] < w[1]);
        out.check(
            format!("molti bandwidth strictly increasing in l at m = {m} ({bounds:?})"),
            increasing,
            true,
        );
    }
}

fn lots(catalog: &Catalog, out: &mut Rows) {
    let claim = "R22 c1^2 from (b+, b-) = (3, 14)";
    match catalog.get("R22", &[]) {
        Ok(r) => {
            let derived = 2 * (2 + 3 + 14) + 3 * (3 - 14);
            let c1sq = r.pieces().first().map(|p| p.c1_squared).unwrap_or(i64::MIN);
            out.check(
                claim,
                format!("b=({},{}) c1^2={c1sq}", r.b_plus(), r.b_minus()),
                format!("b=(3,14) c1^2={derived}"),
            );
        }
        Err(e) => out.error(claim, e, "b=(3,14) c1^2=5"),
    }
    for m in [9i64, 13] {
        let j = (m - 5) / 4;
        let n = m + 38 + 0.max(ceil_div(16 * j - 30, 3));
        let claim = format!("lots witness at (m, n) = ({m}, {n})");
        match witness(m as u64, n as u64, TheoremTag::Lots, 1, catalog) {
            Ok(w) => {
                let b = w
                    .checks
                    .as_ref()
                    .map(|c| format!("({},{})", c.manifold.b_plus(), c.manifold.b_minus()))
                    .unwrap_or("none".into());
                let state = if w.is_certified() {
                    "certified".to_string()
                } else {
                    format!("{:?}", w.outcome)
                };
                out.check(
                    claim,
                    format!("{state} b={b}"),
                    format!("certified b=({m},{n})"),
                );
            }
            Err(e) => out.error(claim, e, "certified"),
        }
    }
}

fn example(catalog: &Catalog, out: &mut Rows) {
    for p in [6i64, 10] {
        let (m, n) = (p * p - 3 * p + 3, 3 * p * p - 3 * p + 1);
        let claim = format!("double cover BC_{p} at (m, n) = ({m}, {n})");
        let expected = format!(
            "lots={} strict_ht=true b=({m},{n}) c1^2={} 2chi+3tau={}",
            true,
            2 * (p - 3) * (p - 3),
            2 * (p - 3) * (p - 3)
        );
        let in_lots = TheoremTag::Lots.claims(m as u64, n as u64);
        let ht = strict_ht(m as u64, n as u64);
        match catalog.get("BC", &[p]) {
            Ok(bc) => {
                let c1sq = bc
                    .pieces()
                    .first()
                    .map(|p| p.c1_squared.to_string())
                    .unwrap_or("none".into());
                out.check(
                    claim,
                    format!(
                        "lots={in_lots} strict_ht={ht} b=({},{}) c1^2={c1sq} 2chi+3tau={}",
                        bc.b_plus(),
                        bc.b_minus(),
                        bc.char_numbers().two_chi_plus_three_tau
                    ),
                    expected,
                );
            }
            Err(e) => out.error(claim, e, expected),
        }
    }
}

/// (label, summands with multiplicity, expected status, expected citation)
type BoundaryCase = (
    &'static str,
    &'static [(&'static str, u64)],
    HtStatus,
    Option<EinsteinCitation>,
);

fn boundary(catalog: &Catalog, out: &mut Rows) {
    let cases: [BoundaryCase; 3] = [
        (
            "CP2 # 9*CP2bar",
            &[("CP2", 1), ("CP2bar", 9)],
            HtStatus::Boundary,
            None,
        ),
        (
            "K3",
            &[("K3", 1)],
            HtStatus::Boundary,
            Some(EinsteinCitation::Yau),
        ),
        ("K3 # K3", &[("K3", 2)], HtStatus::Violated, None),
    ];
    for (label, parts, ht, known) in cases {
        let show = |h: HtStatus, k: Option<EinsteinCitation>| match k {
            Some(c) => format!("{h} einstein_known={c}"),
            None => h.to_string(),
        };
        let expected = show(ht, known);
        let m = match parts {
            [(name, 1)] => catalog.get(name, &[]).map_err(|e| e.to_string()),
            _ => target_sum(catalog, parts),
        };
        match m {
            Ok(m) => {
                let known = assess(&m)
                    .ok()
                    .and_then(|a| a.einstein_known)
                    .or(m.einstein_known());
                out.check(label, show(hitchin_thorpe(&m), known), expected);
            }
            Err(e) => out.error(label, e, expected),
        }
    }
}

/// Runs the rows for `filter` (all tags when `None`).
pub fn run_reproduce(catalog: &Catalog, filter: Option<&str>) -> Result<Report, UnknownTag> {
    if let Some(f) = filter {
        if !TAGS.contains(&f) {
            return Err(UnknownTag(f.to_string()));
        }
    }
    type Section = fn(&Catalog, &mut Rows);
    let sections: [(&'static str, Section); 8] = [
        ("xk", xk),
        ("spin", spin),
        ("zi", zi),
        ("prop6", prop6),
        ("molti", molti),
        ("lots", lots),
        ("example", example),
        ("boundary", boundary),
    ];
    let mut report = Report::default();
    for (tag, run) in sections {
        if filter.is_some_and(|f| f != tag) {
            continue;
        }
        let mut rows = Rows {
            tag,
            rows: Vec::new(),
        };
        run(catalog, &mut rows);
        report.rows.extend(rows.rows);
    }
    Ok(report)
}
