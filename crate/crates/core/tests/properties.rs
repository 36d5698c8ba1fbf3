mod common;

use common::{run_suite, CASES, SUITES};

fn suite(name: &str) {
    let (_, f) = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .expect("known suite");
    if let Err(e) = run_suite(*f, CASES) {
        panic!("{name}: {e}");
    }
}

#[test]
fn form_additivity() {
    suite("form additivity");
}

#[test]
fn classification_matches_gram_oracle() {
    suite("classification vs oracle, rank <= 8");
}

#[test]
fn two_chi_plus_three_tau_additivity() {
    suite("2chi+3tau additivity");
}

#[test]
fn monopole_set_invariants() {
    suite("monopole-set invariants");
}

#[test]
fn obstruction_monotone_in_k() {
    suite("obstruction monotone in k");
}

#[test]
fn homeomorphism_is_an_equivalence() {
    suite("homeomorphism is an equivalence");
}

#[test]
fn class_algebra() {
    suite("class algebra");
}

#[test]
fn oracle_sanity() {
    use fourfold::lattice::UnimodularForm;
    use num_rational::Ratio;
    // det E8 = 1, det H = -1
    let (det, pos, neg) = common::inertia(&common::gram(&UnimodularForm::even(1, 0)));
    assert_eq!((det, pos, neg), (Ratio::from_integer(1), 8, 0));
    let (det, pos, neg) = common::inertia(&common::gram(&UnimodularForm::even(0, 1)));
    assert_eq!((det, pos, neg), (Ratio::from_integer(-1), 1, 1));
    let (_, pos, neg) = common::inertia(&common::gram(&UnimodularForm::even(-2, 3)));
    assert_eq!((pos, neg), (3, 19));
}
