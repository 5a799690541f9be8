mod common;

use qramp::gf::Field;
use qramp::schemes::SchemeParams;
use qramp::verify::{
    access_structure_report, leakage_demo_ogawa, strong_invariance, strong_security_check, strong_security_sweep,
    threshold_verdict, Analyzer, Caps, Claim, LeakageOutcome, Verdict, VerifyError, Witness,
};

fn caps() -> Caps {
    Caps::default()
}

#[test]
fn threshold_rule_holds_beyond_the_worked_examples() {
    let f5 = Field::new(5, 1).unwrap();
    let configs = [
        SchemeParams::ogawa(&f5, 3, 2, vec![1, 2, 3, 4]).unwrap(),
        SchemeParams::zm(&f5, 2, 1, vec![0, 1, 2], vec![3]).unwrap(),
        SchemeParams::zm(&Field::new(2, 3).unwrap(), 2, 1, vec![1, 2, 3], vec![4]).unwrap(),
    ];
    for p in configs {
        let rep = access_structure_report(&p, caps()).unwrap();
        assert!(rep.passed(), "{}", p.descriptor());
        for row in &rep.rows {
            assert_eq!(row.verdict, threshold_verdict(&p, row.subset.len()), "{:?}", row.subset);
        }
    }
}

#[test]
fn intermediate_sets_are_neither_forbidden_nor_qualified() {
    let p = common::zm_q7();
    let a = Analyzer::new(&p, caps()).unwrap();
    for subset in [[0, 1], [1, 3], [2, 3]] {
        let forb = a.is_forbidden(&subset).unwrap();
        assert!(!forb.forbidden);
        assert!(forb.witness.unwrap().recheck(&p, caps()).unwrap());
        let qual = a.is_qualified(&subset).unwrap();
        assert!(!qual.qualified);
        let w = qual.witness.expect("non-qualification is certified");
        assert_eq!(w.claim, Claim::NonOrthogonal);
        assert!(w.recheck(&p, caps()).unwrap());
    }
}

#[test]
fn qualified_sets_report_their_decoder() {
    let p = common::zm_q7();
    let a = Analyzer::new(&p, caps()).unwrap();
    let out = a.is_qualified(&[3, 0, 2]).unwrap();
    assert!(out.qualified);
    let t = out.transcript.unwrap();
    assert_eq!(t.decoder_shares, vec![0, 2, 3]);
    assert_eq!(t.probes_recovered, a.probes().states().len());
}

#[test]
fn zm_is_strongly_secure_on_a_second_field() {
    let f = Field::new(2, 3).unwrap();
    let p = SchemeParams::zm(&f, 3, 2, vec![1, 2, 3, 4], vec![5, 6]).unwrap();
    let sweep = strong_security_sweep(&p, caps()).unwrap();
    assert!(sweep.witness.is_none());
    assert!(sweep.pairs_checked > 0);
}

#[test]
fn strong_check_rejects_oversized_pairs_and_wrong_scheme() {
    let p = common::zm_q7();
    let err = strong_invariance(&p, &[0, 1, 2], &[0], caps()).unwrap_err();
    assert!(matches!(err, VerifyError::Precondition(_)), "{err}");
    assert!(strong_security_check(&common::ogawa_q4(), &[0], &[0], caps()).is_err());
    // Empty T is trivially invariant.
    assert!(strong_invariance(&p, &[0, 1, 2], &[], caps()).unwrap().is_none());
}

/// In F_7 the powers 3 and 4 share a square (2), which lets two shares of
/// this Ogawa configuration pin down one secret coordinate.
#[test]
fn ogawa_with_colliding_squares_leaks_a_coordinate() {
    let f = Field::new(7, 1).unwrap();
    let p = SchemeParams::ogawa(&f, 3, 2, vec![1, 2, 3, 4]).unwrap();
    let w = strong_invariance(&p, &[0, 1], &[0], caps()).unwrap().expect("leak");
    let back = Witness::from_text(&w.to_text()).unwrap();
    assert!(back.recheck(&p, caps()).unwrap());
    assert!(matches!(leakage_demo_ogawa(&p, caps()).unwrap(), LeakageOutcome::Witness(_)));
}

#[test]
fn leakage_search_is_vacuous_for_single_qudit_secrets() {
    assert!(matches!(leakage_demo_ogawa(&common::ogawa_q4(), caps()).unwrap(), LeakageOutcome::Vacuous));
}

#[test]
fn maximal_advance_sets_match_the_forbidden_threshold() {
    let f = Field::new(5, 1).unwrap();
    let p = SchemeParams::ogawa(&f, 3, 2, vec![1, 2, 3, 4]).unwrap();
    let rep = Analyzer::new(&p, caps()).unwrap().max_advance_check().unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    assert_eq!(threshold_verdict(&p, p.free()), Verdict::Forbidden);
    assert_ne!(threshold_verdict(&p, p.free() + 1), Verdict::Forbidden);
}
