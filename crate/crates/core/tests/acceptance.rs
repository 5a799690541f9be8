//! Acceptance suite: one PASS/FAIL line per criterion, each timed against
//! its limit. Runs without the libtest harness so the lines always show.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_traits::One;
use qramp::gf::Field;
use qramp::poly::{Interpolator, PointSet, Polynomial};
use qramp::qstate::amplitude::{self, ComplexRational};
use qramp::qstate::{states_equal, BasisIndex, DensityMatrix, SparseState, VerifiedMap};
use qramp::schemes::{
    advance_setup, coeff_set_zm, encode, encode_basis, g_poly, h_poly, CompletionMap, Decoder, SchemeParams,
};
use qramp::verify::{
    equivalence_check, leakage_demo_ogawa, strong_security_sweep, Analyzer, Caps, LeakageOutcome, ProbeFamily, Witness,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Ogawa (4,3,2,1): each basis secret encodes to the four expected kets.
fn criterion_1() -> Outcome {
    let p = common::ogawa_q4();
    let f = p.field();
    let a = f.primitive().value();
    let (a1, a2, a3) = (f.pow(a, 1), f.pow(a, 2), f.pow(a, 3));
    ensure(a3 == 1 && p.alphas().values() == [a1, a2, a3], || "α^3 must be 1".into())?;
    for s in 0..4 {
        let state = encode_basis(&p, &p.secret(&[s]).map_err(e)?).map_err(e)?;
        let got: BTreeSet<Vec<u32>> = state.support().map(|k| k.to_vec()).collect();
        let add = |x| f.add(s, x);
        let want: BTreeSet<Vec<u32>> = [
            vec![s, s, s],
            vec![add(a1), add(a2), add(1)],
            vec![add(a2), add(1), add(a1)],
            vec![add(1), add(a1), add(a2)],
        ]
        .into_iter()
        .collect();
        ensure(got == want, || format!("secret {s}: {got:?} != {want:?}"))?;
        ensure(state.scale_exp() == 1 && state.is_normalized(), || format!("secret {s}: scale_exp {}", state.scale_exp()))?;
        ensure(state.amplitudes().all(|(_, a)| *a == amplitude::one()), || "amplitudes must be 1".into())?;
    }
    Ok("4 secrets x 4 kets".into())
}

/// g_{r,s}(x) = ((r - s)/α_1) x + s and the completion map at (4,3,2,1).
fn criterion_2() -> Outcome {
    let p = common::ogawa_q4();
    let f = p.field();
    let [a1, a2, a3] = [p.alphas().values()[0], p.alphas().values()[1], p.alphas().values()[2]];
    let map = CompletionMap::new(&p).map_err(e)?;
    for (r, s) in (0..4).cartesian_product(0..4) {
        let slope = f.div(f.sub(r, s), a1).map_err(e)?;
        let g = g_poly(&p, &[r], &p.secret(&[s]).map_err(e)?).map_err(e)?;
        ensure(g.coeffs() == [s, slope], || format!("g_({r},{s}) = {:?}", g.coeffs()))?;
        let out = qramp::qstate::BasisMap::apply(&map, &[r, s]);
        let want = [f.add(f.mul(slope, a2), s), f.add(f.mul(slope, a3), s)];
        ensure(out[..] == want, || format!("U_enc({r},{s}) = {out:?}, want {want:?}"))?;
    }
    Ok("16 (r, s) pairs".into())
}

/// D_ZM(s) and the c_3 = 0 ket of the GF(7) example.
fn criterion_3() -> Outcome {
    let p = common::zm_q7();
    let f = p.field();
    let lin = |terms: &[(u32, u32)]| terms.iter().fold(0, |acc, &(c, x)| f.add(acc, f.mul(c, x)));
    for s in p.basis_secrets() {
        let [s1, s2] = [s.values()[0], s.values()[1]];
        let got: BTreeSet<Vec<u32>> = coeff_set_zm(&p, &s).map_err(e)?.into_iter().collect();
        let want: BTreeSet<Vec<u32>> =
            (0..7).map(|c3| vec![lin(&[(5, s1), (3, s2), (3, c3)]), lin(&[(3, s1), (4, s2), (3, c3)]), c3]).collect();
        ensure(got == want, || format!("D_ZM({s1},{s2}) mismatch"))?;
        let c0 = Polynomial::new(f, vec![lin(&[(5, s1), (3, s2)]), lin(&[(3, s1), (4, s2)]), 0]).map_err(e)?;
        let ket = c0.ev_map(p.alphas()).map_err(e)?;
        let want_ket =
            vec![lin(&[(2, s1), (6, s2)]), lin(&[(4, s1), (4, s2)]), lin(&[(3, s1), (5, s2)]), lin(&[(6, s1), (2, s2)])];
        ensure(ket == want_ket, || format!("c3=0 ket for ({s1},{s2}): {ket:?}"))?;
        let enc = encode_basis(&p, &s).map_err(e)?;
        ensure(enc.amplitude(&ket).is_some(), || "c3=0 ket missing from encoding".into())?;
    }
    Ok("49 secrets".into())
}

/// h_{r,s_1,s_2} coefficients in the GF(7) example.
fn criterion_4() -> Outcome {
    let p = common::zm_q7();
    let f = p.field();
    for (r, s1, s2) in (0..7).cartesian_product(0..7).cartesian_product(0..7).map(|((a, b), c)| (a, b, c)) {
        let h = h_poly(&p, &[r], &p.secret(&[s1, s2]).map_err(e)?).map_err(e)?;
        let want = [
            f.sub(f.sub(f.mul(3, r), s1), s2),
            f.sub(f.mul(4, s1), f.mul(4, r)),
            f.add(f.sub(r, f.mul(2, s1)), s2),
        ];
        ensure(h.coeffs() == want, || format!("h_({r},{s1},{s2}) = {:?}", h.coeffs()))?;
    }
    Ok("343 triples".into())
}

/// Direct versus advance encoding over a parameter sweep, for every
/// advance-shared set of the maximal size.
fn equivalence_sweep(configs: Vec<SchemeParams>) -> Outcome {
    let caps = Caps::default();
    let (mut runs, mut basis, mut superposed) = (0, 0, 0);
    for p in &configs {
        for (i, adv) in (0..p.n()).combinations(p.free()).enumerate() {
            let rep = equivalence_check(p, &adv, 10, 1000 + i as u64, caps).map_err(e)?;
            if let Some(f) = &rep.failure {
                return Err(format!(
                    "{} advanced {adv:?}: |V1|={} |V2|={} for secret {:?}",
                    p.descriptor(),
                    f.v1.len(),
                    f.v2.len(),
                    f.secret
                ));
            }
            ensure(rep.superposed_secrets >= 10, || "too few superposed secrets".into())?;
            runs += 1;
            basis += rep.basis_secrets;
            superposed += rep.superposed_secrets;
        }
    }
    Ok(format!("{} configurations, {runs} advanced sets, {basis} basis + {superposed} superposed secrets", configs.len()))
}

fn criterion_5() -> Outcome {
    equivalence_sweep(common::ogawa_sweep(&common::ACCEPTANCE_FIELDS, 7))
}

fn criterion_6() -> Outcome {
    equivalence_sweep(common::zm_sweep(&common::ACCEPTANCE_FIELDS, 7))
}

fn criterion_7() -> Outcome {
    let mut rows = 0;
    for p in [common::ogawa_q4(), common::zm_q7()] {
        let rep = Analyzer::new(&p, Caps::default()).and_then(|a| a.access_structure_report()).map_err(e)?;
        ensure(rep.rows.len() == 1 << p.n(), || "missing subsets".into())?;
        ensure(rep.size_determined, || format!("{}: verdict not a function of |S|", p.descriptor()))?;
        ensure(rep.thresholds_match, || format!("{}: thresholds differ", p.descriptor()))?;
        ensure(rep.duality_holds, || format!("{}: duality broken", p.descriptor()))?;
        for r in &rep.rows {
            if let Some(w) = &r.witness {
                let back = Witness::from_text(&w.to_text()).map_err(e)?;
                ensure(back.recheck(&p, Caps::default()).map_err(e)?, || format!("witness for {:?} fails", r.subset))?;
            }
        }
        rows += rep.rows.len();
    }
    Ok(format!("{rows} subsets classified"))
}

fn criterion_8() -> Outcome {
    let mut summary = Vec::new();
    for p in [common::ogawa_q4(), common::zm_q7()] {
        let rep = Analyzer::new(&p, Caps::default()).and_then(|a| a.max_advance_check()).map_err(e)?;
        ensure(rep.passed(), || format!("{}: {:?}", p.descriptor(), rep.failures))?;
        let expected_max = (0..p.n()).combinations(p.free()).count();
        let expected_above = (0..p.n()).combinations(p.free() + 1).count();
        ensure(rep.forbidden_at_max == expected_max && rep.not_forbidden_above == expected_above, || {
            format!("{}: {} / {}", p.descriptor(), rep.forbidden_at_max, rep.not_forbidden_above)
        })?;
        summary.push(format!("{}+{}", rep.forbidden_at_max, rep.not_forbidden_above));
    }
    Ok(format!("subsets checked {}", summary.join(", ")))
}

fn criterion_9() -> Outcome {
    let caps = Caps::default();
    let zm = common::zm_q7();
    let sweep = strong_security_sweep(&zm, caps).map_err(e)?;
    ensure(sweep.witness.is_none(), || format!("zm leaks: {:?}", sweep.witness.as_ref().map(|w| (&w.subset, &w.coords))))?;
    let f = Field::new(7, 1).unwrap();
    let g = f.primitive().value();
    let ogawa = SchemeParams::ogawa(&f, 3, 2, (1..=4).map(|i| f.pow(g, i)).collect()).map_err(e)?;
    let leak = match leakage_demo_ogawa(&ogawa, caps).map_err(e)? {
        LeakageOutcome::Witness(w) => {
            let back = Witness::from_text(&w.to_text()).map_err(e)?;
            ensure(back.recheck(&ogawa, caps).map_err(e)?, || "leakage witness fails its re-check".into())?;
            format!(
                "ogawa leak: shares {:?} learn coordinates {:?}",
                w.subset.iter().map(|i| i + 1).collect_vec(),
                w.coords.unwrap_or_default().iter().map(|i| i + 1).collect_vec()
            )
        }
        LeakageOutcome::Inconclusive { pairs_checked } => format!("ogawa search INCONCLUSIVE over {pairs_checked} pairs"),
        LeakageOutcome::Vacuous => return Err("L=2 search cannot be vacuous".into()),
    };
    Ok(format!("zm: {} (S, T) pairs invariant; {leak}", sweep.pairs_checked))
}

/// Exhaustive versions of the algebraic and quantum invariants.
fn criterion_10() -> Outcome {
    let mut checks = 0usize;
    // Field axioms, Frobenius, primitive order.
    for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let f = Field::new(p, m).map_err(e)?;
        let q = f.order();
        for a in 0..q {
            ensure(f.add(a, 0) == a && f.mul(a, 1) == a && f.add(a, f.neg(a)) == 0, || format!("GF({q}) identities at {a}"))?;
            if a != 0 {
                ensure(f.mul(a, f.inv(a).map_err(e)?) == 1, || format!("GF({q}) inverse of {a}"))?;
            }
            for b in 0..q {
                ensure(f.mul(a, b) == f.mul_reference(a, b), || format!("GF({q}) {a}·{b} disagrees with reference"))?;
                ensure(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), || format!("GF({q}) commutativity"))?;
                ensure(f.pow(f.add(a, b), p as u64) == f.add(f.pow(a, p as u64), f.pow(b, p as u64)), || {
                    format!("GF({q}) Frobenius at {a},{b}")
                })?;
                for c in 0..q {
                    ensure(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), || format!("GF({q}) + assoc"))?;
                    ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || format!("GF({q}) · assoc"))?;
                    ensure(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), || format!("GF({q}) distributivity"))?;
                    checks += 1;
                }
            }
        }
        let g = f.primitive().value();
        ensure(f.pow(g, (q - 1) as u64) == 1, || format!("GF({q}) primitive order"))?;
        for d in (1..q - 1).filter(|d| (q - 1) % d == 0) {
            ensure(f.pow(g, d as u64) != 1, || format!("GF({q}) primitive has order dividing {d}"))?;
        }
    }
    // Evaluation map: injective when points ≥ bound, surjective when ≤.
    for (p, m) in [(2, 2), (5, 1), (2, 3)] {
        let f = Field::new(p, m).map_err(e)?;
        for (bound, npts) in (1..=3usize).cartesian_product(1..=3usize) {
            let pts = PointSet::new(&f, (0..npts as u32).collect()).map_err(e)?;
            let images: BTreeSet<Vec<u32>> = f
                .tuples(bound)
                .map(|c| Polynomial::new(&f, c.to_vec()).and_then(|g| g.ev_map(&pts)))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            let domain = (f.order() as usize).pow(bound as u32);
            let codomain = (f.order() as usize).pow(npts as u32);
            if npts >= bound {
                ensure(images.len() == domain, || format!("ev not injective: bound {bound}, {npts} points"))?;
            }
            if npts <= bound {
                ensure(images.len() == codomain, || format!("ev not surjective: bound {bound}, {npts} points"))?;
            }
            checks += 1;
        }
        // Interpolation inverts evaluation on matching sizes.
        for npts in 1..=3usize {
            let pts = PointSet::new(&f, (1..=npts as u32).collect()).map_err(e)?;
            let interp = Interpolator::new(&pts).map_err(e)?;
            for c in f.tuples(npts) {
                let g = Polynomial::new(&f, c.to_vec()).map_err(e)?;
                let back = interp.interpolate(&g.ev_map(&pts).map_err(e)?).map_err(e)?;
                ensure(back == g, || format!("interpolation round trip failed for {c:?}"))?;
                checks += 1;
            }
        }
    }
    // Completion and decoding maps are bijections; encoder is linear and
    // every reduced state has unit trace.
    for p in common::ogawa_sweep(&[(2, 2), (5, 1)], 4).into_iter().chain(common::zm_sweep(&[(5, 1), (7, 1)], 4)) {
        let cap = 1 << 20;
        VerifiedMap::verify(CompletionMap::new(&p).map_err(e)?, p.field(), cap).map_err(e)?;
        for q in (0..p.n()).combinations(p.k()) {
            Decoder::new(&p, &q, cap).map_err(e)?;
        }
        let secrets: Vec<SparseState> = p.basis_secrets().map(|s| s.to_state(&p)).collect();
        for pair in secrets.iter().take(6).combinations(2) {
            let (a, b) = (pair[0], pair[1]);
            let (ca, cb) = (ComplexRational::new(amplitude::rational(3, 5), amplitude::rational(0, 1)), ComplexRational::new(amplitude::rational(0, 1), amplitude::rational(4, 5)));
            let mixed = SparseState::superpose(&[(ca.clone(), a), (cb.clone(), b)]).map_err(e)?;
            let lhs = encode(&p, &mixed).map_err(e)?;
            let rhs = SparseState::superpose(&[(ca, &encode(&p, a).map_err(e)?), (cb, &encode(&p, b).map_err(e)?)]).map_err(e)?;
            ensure(lhs == rhs && states_equal(&lhs, &rhs).map_err(e)?, || format!("{}: encoder not linear", p.descriptor()))?;
            checks += 1;
        }
    }
    for p in [common::ogawa_q4(), common::zm_q7()] {
        let probes = ProbeFamily::new(p.field(), p.l()).map_err(e)?;
        for (i, s) in probes.states().iter().enumerate().step_by(7) {
            let enc = encode(&p, s).map_err(e)?;
            for size in 0..=p.n() {
                for subset in (0..p.n()).combinations(size) {
                    let rho: DensityMatrix = enc.partial_trace(&subset, 1 << 13).map_err(e)?;
                    ensure(rho.trace().is_one() && rho.is_hermitian() && rho.passes_psd_spot_check(), || {
                        format!("probe {i} on {subset:?}: not a density matrix")
                    })?;
                    checks += 1;
                }
            }
        }
        let _ = BasisIndex::from_slice(&[]);
        let _ = advance_setup(&p, &[], 1 << 16).map_err(e)?;
    }
    Ok(format!("{checks} exhaustive cases"))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "ogawa golden state (4,3,2,1)", Duration::from_secs(1), criterion_1),
        (2, "g and U_enc closed forms (4,3,2,1)", Duration::from_secs(1), criterion_2),
        (3, "zm coefficient set and c3=0 ket (7,4,3,2)", Duration::from_secs(1), criterion_3),
        (4, "h closed form (7,4,3,2)", Duration::from_secs(1), criterion_4),
        (5, "advance = direct, ogawa sweep", Duration::from_secs(120), criterion_5),
        (6, "advance = direct, zm sweep", Duration::from_secs(120), criterion_6),
        (7, "access structure and duality", Duration::from_secs(60), criterion_7),
        (8, "maximal advance-shareable sets", Duration::from_secs(60), criterion_8),
        (9, "strong security sweep / ogawa leakage search", Duration::from_secs(300), criterion_9),
        (10, "property suites", Duration::from_secs(120), criterion_10),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded time limit")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {id:>2} {status} {name} [{:.2}s / {}s] {detail}", elapsed.as_secs_f64(), limit.as_secs());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
