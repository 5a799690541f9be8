//! Deliberately broken inputs must be caught by the verifiers.

mod common;

use qramp::qstate::{BasisMap, DensityMatrix, SparseState, Tuple, VerifiedMap};
use qramp::schemes::{advance_setup, encode, AdvanceSession, CompletionMap};
use qramp::verify::{equivalence_check_with, Analyzer, Caps, Claim, Witness};

/// Completion map with the images of two inputs exchanged. Still a
/// bijection, so it passes map verification; only the encoding is wrong.
struct Swapped {
    inner: CompletionMap,
    a: Vec<u32>,
    b: Vec<u32>,
}

impl BasisMap for Swapped {
    fn in_arity(&self) -> usize {
        self.inner.in_arity()
    }
    fn out_arity(&self) -> usize {
        self.inner.out_arity()
    }
    fn apply(&self, input: &[u32]) -> Tuple {
        if input == self.a.as_slice() {
            self.inner.apply(&self.b)
        } else if input == self.b.as_slice() {
            self.inner.apply(&self.a)
        } else {
            self.inner.apply(input)
        }
    }
}

/// Corrupts the session's own completion map.
fn swapped(session: &AdvanceSession, a: Vec<u32>, b: Vec<u32>) -> VerifiedMap<Swapped> {
    let m = Swapped { inner: session.completion().map().clone(), a, b };
    VerifiedMap::verify(m, session.params().field(), 1 << 20).unwrap()
}

#[test]
fn swapped_completion_outputs_are_caught() {
    let p = common::ogawa_q4();
    let session = advance_setup(&p, &[0], 1 << 16).unwrap();
    let map = swapped(&session, vec![0, 1], vec![2, 1]);
    let rep = equivalence_check_with(&session, &map, 0, 0).unwrap();
    assert!(!rep.passed());
    let fail = rep.failure.unwrap();
    // Secret 1 is the first basis secret touched by the swap.
    assert_eq!(fail.secret, SparseState::basis(p.field(), &[1]).unwrap());
    assert_ne!(fail.v1, fail.v2);
    assert_eq!(fail.v1.len(), 4);
    assert_eq!(fail.v2.len(), 4);
    assert_eq!(fail.direct, encode(&p, &fail.secret).unwrap());
}

#[test]
fn zm_swap_within_one_secret_is_caught() {
    let p = common::zm_q7();
    let session = advance_setup(&p, &[2], 1 << 16).unwrap();
    // Swap two inputs sharing the same secret (5, 6): the resulting state is
    // a relabeling inside one basis encoding and must still be detected.
    let map = swapped(&session, vec![0, 5, 6], vec![3, 5, 6]);
    let rep = equivalence_check_with(&session, &map, 0, 0).unwrap();
    let fail = rep.failure.expect("swap must change the encoding of (5, 6)");
    assert_eq!(fail.secret, SparseState::basis(p.field(), &[5, 6]).unwrap());
}

#[test]
fn tampered_witness_fails_recheck() {
    let p = common::ogawa_q4();
    let caps = Caps::default();
    let analyzer = Analyzer::new(&p, caps).unwrap();
    let w = analyzer.is_forbidden(&[0, 1]).unwrap().witness.expect("two shares are not forbidden");
    assert!(w.recheck(&p, caps).unwrap());

    // Claiming that identical states differ must not verify.
    let same = Witness { secret_b: w.secret_a.clone(), rho_b: w.rho_a.clone(), ..w.clone() };
    assert!(!same.recheck(&p, caps).unwrap());

    // A substituted density matrix no longer matches the recomputed one.
    let mixed = DensityMatrix::maximally_mixed(p.field(), w.subset.clone(), caps.dm).unwrap();
    let forged = Witness { rho_a: mixed, ..w.clone() };
    assert!(!forged.recheck(&p, caps).unwrap());

    // Non-orthogonal claims need orthogonal secrets.
    let bogus = Witness { claim: Claim::NonOrthogonal, secret_b: w.secret_a.clone(), rho_b: w.rho_a.clone(), ..w };
    assert!(!bogus.recheck(&p, caps).unwrap());
}

#[test]
fn forbidden_set_yields_no_witness() {
    let p = common::zm_q7();
    let out = Analyzer::new(&p, Caps::default()).unwrap().is_forbidden(&[3]).unwrap();
    assert!(out.forbidden);
    assert!(out.witness.is_none());
}
