//! Acceptance run: one line per criterion.
//!
//! A criterion listed in `KNOWN_DEVIATIONS` is expected to fail in the
//! recorded way; every other criterion must pass.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use endolab::archcmp::{verify_identity, ArchCase, GammaRange};
use endolab::dsconst::{random_regular_mu, vanishing_quantities, verify_vanishing, Parity};
use endolab::endoscopy::{verify_tau_k, EndoContext};
use endolab::exactnum::{verify_product_formula, Place, SquareClass};
use endolab::hecke::verify_satake;
use endolab::quadspace::{exists_global_form, is_quasi_split_local, QuadraticSpace};
use endolab::rootdata::{dominant_weights, verify_kostant, LeviLabel, RootDatum, Weight};
use endolab::signs::{verify_sign_invariants, verify_waldspurger};
use itertools::Itertools;
use num_bigint::BigInt;
use rand::SeedableRng;

/// Criteria expected to fail, with the reason recorded in the decisions log.
const KNOWN_DEVIATIONS: &[(usize, &str)] = &[(
    4,
    "exists_global_form(d, 1) is false for d = 6 mod 8: delta = 1 violates (-1)^m delta > 0 there, so the set is {3, 4, 5}",
)];

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, notes: vec![] }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(note.into());
        }
    }
}

fn vanishing_suite() -> Outcome {
    let mut out = Outcome::new();
    let runs = (3..=7).map(|r| (Parity::Odd, r)).chain([4, 6].map(|r| (Parity::Even, r)));
    for (parity, r) in runs {
        let rep = verify_vanishing(parity, r, 20, 2024).unwrap();
        out.require(rep.passed(), format!("{parity} r={r}: {} failures", rep.failures.len()));
    }
    out
}

/// Weights with coordinates at most 3: all of them for rank 3, otherwise
/// the extremes and a middle one.
fn arch_weights(d: usize) -> Vec<Weight> {
    let datum = RootDatum::for_dimension(d).unwrap();
    let all: Vec<Weight> = dominant_weights(&datum, 3).into_iter().filter(|w| w.coords().unwrap().iter().all(|&c| c >= 0)).collect();
    if d / 2 == 3 {
        return all;
    }
    let m = d / 2;
    let mut picked = vec![Weight::zero(m), Weight::integral(&[3, 2, 1, 0, 0][..m]), Weight::integral(&vec![3; m])];
    picked.retain(|w| all.contains(w));
    picked
}

fn arch_suite() -> Outcome {
    let mut out = Outcome::new();
    for d in 7..=10 {
        let weights = arch_weights(d);
        out.require(!weights.is_empty(), format!("no weights for d={d}"));
        for levi in [LeviLabel::M1, LeviLabel::M2, LeviLabel::M12] {
            if levi == LeviLabel::M2 && d % 2 == 0 {
                continue;
            }
            let ranges: &[GammaRange] = match levi {
                LeviLabel::M1 => &[GammaRange::Stated],
                _ => &[GammaRange::Stated, GammaRange::Vanishing],
            };
            for w in &weights {
                let case = ArchCase::new(levi, d, w.clone()).unwrap();
                for &range in ranges {
                    let rep = verify_identity(&case, range, 50, 11).unwrap();
                    out.require(rep.passed(), format!("{levi} d={d} lambda={w} {range:?}: {:?}", rep.failures.first()));
                }
            }
        }
    }
    out
}

fn satake_suite() -> Outcome {
    let mut out = Outcome::new();
    for d in 7..=10 {
        for a in 1..=3 {
            for p in [3, 5] {
                let rep = verify_satake(d, a, p).unwrap();
                out.require(rep.passed(), format!("d={d} a={a} p={p}: k {:?} h {:?}", rep.k_mismatches, rep.h_mismatches));
            }
        }
    }
    out
}

/// Every form over Q_p of dimension <= 10 with entries among the four square
/// classes, compared with the Witt oracle.
fn witt_sweep(p: i64) -> (usize, Vec<Vec<i64>>) {
    let u = common::nonresidue(p);
    let classes = [1, u, p, u * p];
    let mut checked = 0;
    let mut bad = Vec::new();
    for d in 1..=10 {
        for diag in classes.iter().copied().combinations_with_replacement(d) {
            let q = QuadraticSpace::from_ints(&diag).unwrap();
            let got = is_quasi_split_local(&q, Place::Prime(p as u64)).unwrap();
            checked += 1;
            if got != common::oracle_quasi_split(&diag, p) {
                bad.push(diag);
            }
        }
    }
    (checked, bad)
}

fn number_theory_suite() -> (Outcome, BTreeSet<usize>) {
    let mut out = Outcome::new();
    let pf = verify_product_formula(500, 10_000, 5).unwrap();
    out.require(pf.passed(), format!("product formula: {:?}", pf.failures));
    for p in [3, 5, 7] {
        let (checked, bad) = witt_sweep(p);
        out.require(checked == 1000 && bad.is_empty(), format!("Witt oracle at {p}: {} of {checked} disagree", bad.len()));
    }
    let stated: BTreeSet<usize> = [3, 4, 5, 6].into();
    let mut mismatched = BTreeSet::new();
    for d in 3..=64usize {
        let got = exists_global_form(d, &SquareClass::Global(BigInt::from(1))).unwrap();
        if got != stated.contains(&(d % 8)) {
            mismatched.insert(d);
        }
    }
    out.require(mismatched.is_empty(), format!("exists_global_form(d, 1) disagrees with d mod 8 in {{3,4,5,6}} at d = {mismatched:?}"));
    for d in [8usize, 16, 24] {
        for delta in [2i64, 3, 5, 6, 7, 10, 11, 14, 15, 21] {
            let got = exists_global_form(d, &SquareClass::Global(BigInt::from(delta))).unwrap();
            out.require(got, format!("no form for d={d} delta={delta}"));
        }
    }
    (out, mismatched)
}

fn invariant_suite() -> Outcome {
    let mut out = Outcome::new();
    let contexts = [EndoContext::RealR, EndoContext::LocalQp(2), EndoContext::LocalQp(3), EndoContext::GlobalQ(vec![3, 5])];
    let tau = verify_tau_k(7, 12, &contexts).unwrap();
    out.require(tau.passed(), format!("tau/k: {:?}", tau.failures));
    let signs = verify_sign_invariants(12).unwrap();
    out.require(signs.passed() && signs.type_ii_checked > 0, format!("signs: {:?}", signs.failures));
    let wal = verify_waldspurger(200, 6, 9).unwrap();
    out.require(wal.passed() && wal.configurations >= 200, format!("Waldspurger: {} failures", wal.failures.len()));
    out
}

fn kostant_suite() -> Outcome {
    let mut out = Outcome::new();
    let rep = verify_kostant(4, 2).unwrap();
    out.require(rep.passed() && rep.truncations_checked > 0, format!("Kostant: {:?}", rep.failures.first()));
    out
}

fn negative_controls() -> Outcome {
    let mut out = Outcome::new();
    // r = 2 is outside the vanishing claim: some sample must have N or M nonzero.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let witness = (0..20).any(|_| {
        let mu = random_regular_mu(2, &mut rng);
        (0..=1).any(|t| {
            (0..=2).any(|rp| {
                let v = vanishing_quantities(2, t, Parity::Odd, rp, &mu).unwrap();
                v.n != 0 || v.m.iter().any(|&x| x != 0)
            })
        })
    });
    out.require(witness, "r = 2 produced no nonvanishing witness");
    for (levi, d) in [(LeviLabel::M12, 8), (LeviLabel::M1, 7)] {
        let case = ArchCase::new(levi, d, Weight::zero(d / 2)).unwrap();
        let rep = verify_identity(&case, GammaRange::OutOfRange, 20, 13).unwrap();
        out.require(!rep.passed(), format!("{levi} d={d}: out-of-range samples all agreed"));
    }
    out
}

#[test]
fn acceptance() {
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut time = |n: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((n, name, o, start.elapsed().as_secs_f64()));
    };
    time(1, "vanishing sums", &vanishing_suite);
    time(2, "archimedean comparisons", &arch_suite);
    time(3, "computation at p", &satake_suite);
    let mismatched = std::cell::RefCell::new(BTreeSet::new());
    time(4, "number theory", &|| {
        let (o, m) = number_theory_suite();
        *mismatched.borrow_mut() = m;
        o
    });
    time(5, "invariants", &invariant_suite);
    time(6, "Kostant", &kostant_suite);
    time(7, "negative controls", &negative_controls);

    let mut unexpected = Vec::new();
    for (n, name, o, secs) in &results {
        let known = KNOWN_DEVIATIONS.iter().find(|(k, _)| k == n);
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        let tag = if known.is_some() { " (known deviation)" } else { "" };
        println!("criterion {n} [{name}]: {verdict}{tag} in {secs:.1}s");
        for note in &o.notes {
            println!("    {note}");
        }
        if o.passed == known.is_some() {
            unexpected.push(*n);
        }
    }
    let expected: BTreeSet<usize> = (3..=64).filter(|d| d % 8 == 6).collect();
    assert_eq!(*mismatched.borrow(), expected, "criterion 4 must fail exactly at d = 6 mod 8");
    let c4 = &results.iter().find(|r| r.0 == 4).unwrap().2;
    assert_eq!(c4.notes.len(), 1, "only the existence statement may fail: {:?}", c4.notes);
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
