//! Exact identities checked against frozen enumeration values.

use num_bigint::BigInt;
use num_rational::BigRational;
use percolab_core::cube::{check_increasing, Complement, Dictator, Threshold, UpClosure};
use percolab_core::events::Crossing;
use percolab_core::lattice::BoxSpec;
use percolab_core::montecarlo::origin_cluster_size;
use percolab_core::oracle::{self, nonnegative_on_grid, TruthTable, DEFAULT_CAP};
use percolab_core::poly::{binomial, ratio, DensePolynomial};
use percolab_core::rng::StreamKey;
use percolab_core::{Configuration, Event, LatticeGraph, Model, Sequential};
use proptest::prelude::*;

const LR11_COUNTS: [u64; 13] = [0, 0, 3, 34, 162, 422, 671, 690, 473, 218, 66, 12, 1];

fn b11() -> LatticeGraph {
    LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap()
}

#[test]
fn lr11_counts_match_frozen_enumeration() {
    let g = b11();
    let ev = Crossing::left_right(&g).unwrap();
    let ep = oracle::event_polynomial(&ev, DEFAULT_CAP, &Sequential).unwrap();
    assert_eq!(ep.counts, LR11_COUNTS);
    assert_eq!(ep.to_dense().unwrap().eval_ratio(1, 2), ratio(43, 64));
    // Direct average over the 4096 configurations.
    let hits = (0..1u64 << 12).filter(|&m| ev.occurs(&Configuration::from_mask(12, m))).count();
    assert_eq!(hits, 2752);
}

#[test]
fn lr11_russo_and_monotone_derivative() {
    let g = b11();
    let ev = Crossing::left_right(&g).unwrap();
    let report = oracle::verify_russo(&ev, DEFAULT_CAP, &Sequential).unwrap();
    assert!(report.equal);
    assert_eq!(report.derivative, report.pivotal_sum);
    assert!(nonnegative_on_grid(&report.derivative, 64));
}

#[test]
fn lr11_influences_respect_reflections() {
    let g = b11();
    let table = TruthTable::enumerate(&Crossing::left_right(&g).unwrap(), DEFAULT_CAP, &Sequential).unwrap();
    for map in [|a: [i32; 3]| [2 - a[0], a[1], a[2]], |a: [i32; 3]| [a[0], 2 - a[1], a[2]]] {
        let perm = g.carrier_permutation(map).unwrap();
        for (e, &img) in perm.iter().enumerate() {
            assert_eq!(table.influence_counts(e).unwrap(), table.influence_counts(img).unwrap());
        }
    }
    let maj = TruthTable::enumerate(&Threshold::majority3(), DEFAULT_CAP, &Sequential).unwrap();
    for e in 1..3 {
        assert_eq!(maj.influence_counts(0).unwrap(), maj.influence_counts(e).unwrap());
    }
}

#[test]
fn influence_equals_pivotality_for_increasing_events() {
    let g = b11();
    let table = TruthTable::enumerate(&Crossing::left_right(&g).unwrap(), DEFAULT_CAP, &Sequential).unwrap();
    for e in 0..12 {
        assert_eq!(table.influence_counts(e).unwrap(), table.pivotal_counts(e).unwrap());
    }
}

#[test]
fn chi_on_unit_box_matches_frozen_fraction() {
    let g = LatticeGraph::centered(Model::BondZ2, 1).unwrap();
    assert_eq!(g.carrier_len(), 12);
    // Σ_k (Σ_{|ω| = k} |C(0)|) p^k (1-p)^(12-k) at p = 1/4.
    let mut by_k = [0u64; 13];
    for m in 0..1u64 << 12 {
        let omega = Configuration::from_mask(12, m);
        by_k[m.count_ones() as usize] += origin_cluster_size(&g, &omega).unwrap() as u64;
    }
    let p = ratio(1, 4);
    let q = ratio(3, 4);
    let mut chi = BigRational::from_integer(BigInt::from(0));
    for (k, &c) in by_k.iter().enumerate() {
        let mut term = BigRational::from_integer(BigInt::from(c));
        for _ in 0..k {
            term *= &p;
        }
        for _ in k..12 {
            term *= &q;
        }
        chi += term;
    }
    assert_eq!(chi, BigRational::new(BigInt::from(10_925_739), BigInt::from(4_194_304)));
}

#[test]
fn complement_polynomials_sum_to_one() {
    for seed in 0..20 {
        let ev = UpClosure::random(7, 4, StreamKey::new(seed, 0));
        let a = oracle::event_polynomial(&ev, DEFAULT_CAP, &Sequential).unwrap();
        let c = oracle::event_polynomial(&Complement(&ev), DEFAULT_CAP, &Sequential).unwrap();
        assert_eq!(c, a.complement());
        assert_eq!(&a.to_dense().unwrap() + &c.to_dense().unwrap(), DensePolynomial::constant(1));
        let total: u64 = a.counts.iter().zip(&c.counts).map(|(x, y)| x + y).sum();
        assert_eq!(total, 1 << 7);
    }
}

#[test]
fn dictator_identity() {
    let r = oracle::verify_russo(&Dictator { size: 4, element: 2 }, DEFAULT_CAP, &Sequential).unwrap();
    assert!(r.equal);
    assert_eq!(r.derivative, DensePolynomial::constant(1));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, .. ProptestConfig::default() })]

    #[test]
    fn russo_holds_for_random_up_closures(n in 1usize..=10, m in 1usize..=8, seed in any::<u64>()) {
        let ev = UpClosure::random(n, m, StreamKey::new(seed, 1));
        prop_assert!(check_increasing(&ev, 1 << 12, seed).unwrap().increasing);
        let r = oracle::verify_russo(&ev, DEFAULT_CAP, &Sequential).unwrap();
        prop_assert!(r.equal);
        prop_assert!(nonnegative_on_grid(&r.derivative, 32));
        let ep = oracle::event_polynomial(&ev, DEFAULT_CAP, &Sequential).unwrap();
        for (k, &c) in ep.counts.iter().enumerate() {
            prop_assert!(i128::from(c) <= binomial(n, k));
        }
    }
}
