//! Property suites shared by the `properties` and `acceptance` targets, plus
//! an independent lattice oracle: explicit Gram matrices, a random unimodular
//! change of basis, and Sylvester inertia by exact rational elimination.

#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use fourfold::catalog::Catalog;
use fourfold::classes::{CohClass, GeneratorBasis};
use fourfold::lattice::{Definiteness, LatticeError, Parity, UnimodularForm};
use fourfold::manifolds::{ManifoldSpec, SymplecticPiece};
use fourfold::monopole::{bandwidth_by_pairs, bauer_monopole_set};
use fourfold::obstruction::{
    blowup_obstruction, einstein_obstruction, gauss_bonnet_defect_from_pieces,
};

pub const CASES: u32 = 1000;

const E8_CARTAN: [[i64; 8]; 8] = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
];

pub type Gram = Vec<Vec<i64>>;

/// Block-diagonal Gram matrix of a form in its standard presentation.
pub fn gram(f: &UnimodularForm) -> Gram {
    let n = f.rank() as usize;
    let mut g = vec![vec![0; n]; n];
    let mut at = 0;
    let sign = f.e8.signum();
    for _ in 0..f.e8.unsigned_abs() {
        for i in 0..8 {
            for j in 0..8 {
                g[at + i][at + j] = sign * E8_CARTAN[i][j];
            }
        }
        at += 8;
    }
    for _ in 0..f.hyperbolic {
        g[at][at + 1] = 1;
        g[at + 1][at] = 1;
        at += 2;
    }
    for _ in 0..f.pos_diag {
        g[at][at] = 1;
        at += 1;
    }
    for _ in 0..f.neg_diag {
        g[at][at] = -1;
        at += 1;
    }
    g
}

/// e_i ← e_i + c·e_j, i.e. Pᵀ G P for an elementary unimodular P.
pub fn elementary(g: &mut Gram, i: usize, j: usize, c: i64) {
    let n = g.len();
    for k in 0..n {
        g[i][k] += c * g[j][k];
    }
    for k in 0..n {
        g[k][i] += c * g[k][j];
    }
}

/// Determinant, positive and negative inertia of a symmetric matrix by
/// symmetric Gaussian elimination over the rationals.
pub fn inertia(g: &Gram) -> (Ratio<i128>, usize, usize) {
    let n = g.len();
    let mut a: Vec<Vec<Ratio<i128>>> = g
        .iter()
        .map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect())
        .collect();
    let zero = Ratio::from_integer(0);
    let (mut pos, mut neg) = (0, 0);
    let mut det = Ratio::from_integer(1);
    let mut alive: Vec<usize> = (0..n).collect();
    while !alive.is_empty() {
        let pivot = match alive.iter().copied().find(|&i| a[i][i] != zero) {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; a nonzero off-diagonal
                // entry a[i][j] lets e_i + e_j have square 2·a[i][j]
                let hit = alive
                    .iter()
                    .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && a[i][j] != zero);
                match hit {
                    None => {
                        // remaining block is zero: degenerate
                        return (zero, pos, neg);
                    }
                    Some((i, j)) => {
                        // determinant unchanged by e_i += e_j
                        for k in 0..n {
                            let v = a[j][k];
                            a[i][k] += v;
                        }
                        for k in 0..n {
                            let v = a[k][j];
                            a[k][i] += v;
                        }
                        i
                    }
                }
            }
        };
        let p = a[pivot][pivot];
        det *= p;
        if p > zero {
            pos += 1;
        } else {
            neg += 1;
        }
        alive.retain(|&i| i != pivot);
        for &i in &alive {
            let factor = a[i][pivot] / p;
            if factor == zero {
                continue;
            }
            for &k in alive.iter().chain(std::iter::once(&pivot)) {
                let v = a[pivot][k];
                a[i][k] -= factor * v;
            }
            for &k in alive.iter().chain(std::iter::once(&pivot)) {
                let v = a[k][pivot];
                a[k][i] -= factor * v;
            }
        }
    }
    (det, pos, neg)
}

/// What the oracle expects `classify` to say about a Gram matrix.
#[derive(Debug, PartialEq, Eq)]
pub enum OracleClass {
    Class {
        rank: u64,
        signature: i64,
        parity: Parity,
        definiteness: Definiteness,
    },
    /// Definite and even: outside the supported range.
    Unsupported,
}

pub fn oracle_classify(g: &Gram) -> OracleClass {
    let (det, pos, neg) = inertia(g);
    assert!(
        det == Ratio::from_integer(1) || det == Ratio::from_integer(-1),
        "oracle input is not unimodular: det {det}"
    );
    let even = (0..g.len()).all(|i| g[i][i] % 2 == 0);
    let definiteness = match (pos, neg) {
        (0, 0) => Definiteness::ZeroRank,
        (_, 0) => Definiteness::Positive,
        (0, _) => Definiteness::Negative,
        _ => Definiteness::Indefinite,
    };
    if even
        && matches!(
            definiteness,
            Definiteness::Positive | Definiteness::Negative
        )
    {
        return OracleClass::Unsupported;
    }
    OracleClass::Class {
        rank: g.len() as u64,
        signature: pos as i64 - neg as i64,
        parity: if even { Parity::Even } else { Parity::Odd },
        definiteness,
    }
}

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(
        config.clone(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn form_strategy() -> impl Strategy<Value = UnimodularForm> {
    (-3i64..=3, 0u64..=4, 0u64..=4, 0u64..=4)
        .prop_map(|(e8, h, p, q)| UnimodularForm::new(e8, h, p, q))
}

/// Forms of rank at most 8.
fn small_form_strategy() -> impl Strategy<Value = UnimodularForm> {
    prop_oneof![
        prop_oneof![Just(1i64), Just(-1i64)].prop_map(|s| UnimodularForm::even(s, 0)),
        (0u64..=4, 0u64..=8, 0u64..=8)
            .prop_filter("rank <= 8", |(h, p, q)| 2 * h + p + q <= 8)
            .prop_map(|(h, p, q)| UnimodularForm::new(0, h, p, q)),
    ]
}

type Ops = Vec<(usize, usize, i64)>;

fn ops_strategy() -> impl Strategy<Value = Ops> {
    prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 0..8)
}

/// (name, params) of a catalog entry.
pub type Entry = (&'static str, Vec<i64>);

fn entry_strategy() -> impl Strategy<Value = Entry> {
    prop_oneof![
        Just(("K3", vec![])),
        Just(("S2xS2", vec![])),
        Just(("CP2", vec![])),
        Just(("CP2bar", vec![])),
        Just(("R22", vec![])),
        (2i64..=5).prop_map(|k| ("X", vec![k])),
        (0i64..=4).prop_map(|l| ("Y", vec![l])),
        (2i64..=8).prop_map(|i| ("Z", vec![i])),
        prop_oneof![Just(6i64), Just(10)].prop_map(|p| ("BC", vec![p])),
    ]
}

fn sum_strategy() -> impl Strategy<Value = Vec<Entry>> {
    prop::collection::vec(entry_strategy(), 1..=4)
}

/// Pieces with b₊ ≡ 3 mod 4.
fn admissible_entry() -> impl Strategy<Value = Entry> {
    prop_oneof![
        Just(("K3", vec![])),
        Just(("R22", vec![])),
        (2i64..=4).prop_map(|k| ("X", vec![k])),
        (0i64..=5).prop_map(|l| ("Y", vec![l])),
        (1i64..=5).prop_map(|h| ("Z", vec![2 * h])),
    ]
}

fn admissible_strategy(max_k: u64) -> impl Strategy<Value = (Vec<Entry>, u64)> {
    (prop::collection::vec(admissible_entry(), 2..=3), 0..=max_k)
}

pub fn build(entries: &[Entry]) -> ManifoldSpec {
    let c = Catalog::builtin();
    entries
        .iter()
        .map(|(n, p)| c.get(n, p).expect("catalog entry"))
        .reduce(|a, b| a.connected_sum(&b))
        .expect("nonempty")
}

pub fn pieces(entries: &[Entry]) -> Vec<SymplecticPiece> {
    let c = Catalog::builtin();
    entries
        .iter()
        .flat_map(|(n, p)| c.get(n, p).expect("catalog entry").pieces().to_vec())
        .collect()
}

fn form_additivity(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(
            &(form_strategy(), form_strategy(), form_strategy()),
            |(a, b, c)| {
                let ab = a.direct_sum(&b);
                prop_assert_eq!(ab.rank(), a.rank() + b.rank());
                prop_assert_eq!(ab.signature(), a.signature() + b.signature());
                prop_assert_eq!(ab.is_even(), a.is_even() && b.is_even());
                prop_assert_eq!(ab, b.direct_sum(&a));
                prop_assert_eq!(ab.direct_sum(&c), a.direct_sum(&b.direct_sum(&c)));
                prop_assert_eq!(a.direct_sum(&UnimodularForm::ZERO), a);
                // presentation change never changes the isomorphism class
                let g_ab = gram(&ab);
                let mut g_sum = gram(&a);
                let gb = gram(&b);
                let n = g_sum.len();
                for row in &mut g_sum {
                    row.resize(n + gb.len(), 0);
                }
                for row in &gb {
                    let mut r = vec![0; n];
                    r.extend(row);
                    g_sum.push(r);
                }
                if ab.rank() <= 24 {
                    prop_assert_eq!(inertia(&g_ab).1, inertia(&g_sum).1);
                    prop_assert_eq!(inertia(&g_ab).2, inertia(&g_sum).2);
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

fn classification_oracle(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(small_form_strategy(), ops_strategy()), |(f, ops)| {
            let mut g = gram(&f);
            let n = g.len();
            for (i, j, c) in ops {
                if n >= 2 && i % n != j % n {
                    elementary(&mut g, i % n, j % n, c);
                }
            }
            let expected = oracle_classify(&g);
            let got = f.classify();
            match (expected, got) {
                (OracleClass::Unsupported, Err(LatticeError::UnsupportedDefinite(_))) => {}
                (
                    OracleClass::Class {
                        rank,
                        signature,
                        parity,
                        definiteness,
                    },
                    Ok(c),
                ) => {
                    prop_assert_eq!(c.rank, rank);
                    prop_assert_eq!(c.signature, signature);
                    prop_assert_eq!(c.parity, parity);
                    prop_assert_eq!(c.definiteness, definiteness);
                }
                (e, g) => {
                    return Err(TestCaseError::fail(format!(
                        "{f}: oracle {e:?}, classify {g:?}"
                    )))
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn gauss_bonnet_additivity(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(sum_strategy(), sum_strategy(), 0u64..=20), |(a, b, k)| {
            let (ma, mb) = (build(&a), build(&b));
            let s = ma.connected_sum(&mb);
            let q = |m: &ManifoldSpec| 2 * m.chi() + 3 * m.tau();
            prop_assert_eq!(q(&s), q(&ma) + q(&mb) - 4);
            prop_assert_eq!(s.chi(), ma.chi() + mb.chi() - 2);
            prop_assert_eq!(s.tau(), ma.tau() + mb.tau());
            prop_assert_eq!(q(&s.blow_up(k)), q(&s) - k as i64);
            prop_assert_eq!(*s.form(), ma.form().direct_sum(mb.form()));
            prop_assert_eq!(s.char_numbers().two_chi_plus_three_tau, q(&s));
            prop_assert!(s.check_consistency().is_ok());
            // commutative and associative up to every recorded invariant
            let t = mb.connected_sum(&ma);
            prop_assert_eq!(
                (s.b_plus(), s.b_minus(), s.spin(), *s.form(), s.blowups()),
                (t.b_plus(), t.b_minus(), t.spin(), *t.form(), t.blowups())
            );
            prop_assert_eq!(s.pieces().len(), t.pieces().len());
            let mc = build(&b[..1]);
            let l = s.connected_sum(&mc);
            let r = ma.connected_sum(&mb.connected_sum(&mc));
            prop_assert_eq!(
                (
                    l.b_plus(),
                    l.b_minus(),
                    l.spin(),
                    *l.form(),
                    l.pieces().len()
                ),
                (
                    r.b_plus(),
                    r.b_minus(),
                    r.spin(),
                    *r.form(),
                    r.pieces().len()
                )
            );
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn monopole_invariants(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&admissible_strategy(2), |(entries, k)| {
            let ps = pieces(&entries);
            let set = bauer_monopole_set(&ps, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let classes = set.classes();
            let n = ps.len() as u32 + k as u32;
            prop_assert!(classes.len() as u128 <= 1u128 << n);
            prop_assert_eq!(set.len(), Some(classes.len() as u128));
            for a in &classes {
                prop_assert!(set.contains(a));
                prop_assert!(
                    set.contains(&a.negate()),
                    "not closed under negation: {}",
                    a
                );
                prop_assert!(!set.contains(&a.scale(3)) || a.is_zero());
            }
            for (i, a) in classes.iter().enumerate() {
                for b in &classes[i + 1..] {
                    prop_assert_eq!(a.sub(b).unwrap().divisibility() % 2, 0);
                }
            }
            let fast = set.bandwidth();
            let slow = bandwidth_by_pairs(&classes);
            prop_assert_eq!(fast.lower_bound, slow.lower_bound);
            if let Some((a, b)) = &fast.witness {
                prop_assert!(set.contains(a) && set.contains(b));
                prop_assert_eq!(a.sub(b).unwrap().divisibility(), 2 * fast.lower_bound);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn obstruction_monotone(runner: &mut TestRunner) -> Result<(), String> {
    let single = prop_oneof![
        (2i64..=10).prop_map(|i| ("Z", vec![i])),
        (2i64..=6).prop_map(|k| ("X", vec![k])),
        Just(("R22", vec![])),
        Just(("BC", vec![6])),
    ];
    runner
        .run(
            &(admissible_strategy(40), single, 0u64..=60),
            |((entries, k), one, j)| {
                let ps = pieces(&entries);
                let now = einstein_obstruction(&ps, k).unwrap();
                let next = einstein_obstruction(&ps, k + 1).unwrap();
                prop_assert!(!now.is_obstructed() || next.is_obstructed());
                prop_assert!(now.reverify() && next.reverify());
                // defect identity against the evaluated sum
                let m = build(&entries).blow_up(k);
                prop_assert_eq!(
                    gauss_bonnet_defect_from_pieces(&ps, k),
                    2 * m.chi() + 3 * m.tau()
                );
                let p = &pieces(&[one])[0];
                let now = blowup_obstruction(p, j).unwrap();
                let next = blowup_obstruction(p, j + 1).unwrap();
                prop_assert!(!now.is_obstructed() || next.is_obstructed());
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

fn homeomorphism_equivalence(runner: &mut TestRunner) -> Result<(), String> {
    let pool = prop_oneof![
        Just(("K3", vec![])),
        Just(("S2xS2", vec![])),
        Just(("CP2", vec![])),
        Just(("CP2bar", vec![])),
        Just(("Y", vec![0])),
        Just(("Y", vec![3])),
        Just(("X", vec![2])),
        Just(("Z", vec![2])),
    ];
    let sum = prop::collection::vec(pool, 1..=3);
    runner
        .run(&(sum.clone(), sum.clone(), sum), |(a, b, c)| {
            let (a, b, c) = (build(&a), build(&b), build(&c));
            let h = |x: &ManifoldSpec, y: &ManifoldSpec| x.homeomorphic(y).unwrap();
            prop_assert!(h(&a, &a));
            prop_assert_eq!(h(&a, &b), h(&b, &a));
            if h(&a, &b) && h(&b, &c) {
                prop_assert!(h(&a, &c));
            }
            // the invariants a homeomorphism must preserve
            if h(&a, &b) {
                prop_assert_eq!((a.chi(), a.tau(), a.spin()), (b.chi(), b.tau(), b.spin()));
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn class_algebra(runner: &mut TestRunner) -> Result<(), String> {
    let m = build(&[("X", vec![2]), ("Y", vec![3]), ("Z", vec![4])]).blow_up(3);
    let basis: Arc<GeneratorBasis> = m.class_basis().unwrap().basis;
    let n = basis.len();
    let class = prop::collection::vec(-6i64..=6, n);
    runner
        .run(&(class.clone(), class, -5i64..=5), |(x, y, s)| {
            let a = CohClass::from_terms(&basis, x.into_iter().enumerate());
            let b = CohClass::from_terms(&basis, y.into_iter().enumerate());
            let sq = |c: &CohClass| c.square().unwrap();
            let sum = a.add(&b).unwrap();
            let diff = a.sub(&b).unwrap();
            prop_assert_eq!(sq(&sum) + sq(&diff), 2 * sq(&a) + 2 * sq(&b));
            prop_assert_eq!((sq(&sum) - sq(&a) - sq(&b)) % 2, 0);
            prop_assert_eq!(sq(&a.scale(s)), s * s * sq(&a));
            prop_assert_eq!(
                a.scale(s).divisibility(),
                s.unsigned_abs() * a.divisibility()
            );
            prop_assert!(a.add(&a.negate()).unwrap().is_zero());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub type Suite = fn(&mut TestRunner) -> Result<(), String>;

pub const SUITES: [(&str, Suite); 7] = [
    ("form additivity", form_additivity),
    ("classification vs oracle, rank <= 8", classification_oracle),
    ("2chi+3tau additivity", gauss_bonnet_additivity),
    ("monopole-set invariants", monopole_invariants),
    ("obstruction monotone in k", obstruction_monotone),
    ("homeomorphism is an equivalence", homeomorphism_equivalence),
    ("class algebra", class_algebra),
];

pub fn run_suite(suite: Suite, cases: u32) -> Result<(), String> {
    suite(&mut runner(cases))
}
