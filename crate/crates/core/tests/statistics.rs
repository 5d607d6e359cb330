//! Seeded Monte Carlo estimators against exact values and coupling
//! properties.

use percolab_core::events::Crossing;
use percolab_core::lattice::{BoxSpec, Roles};
use percolab_core::montecarlo::{
    configuration_at, coupled_curve, estimate_chi, estimate_event, estimate_theta, origin_cluster_size, uniforms,
};
use percolab_core::oracle::{TruthTable, DEFAULT_CAP};
use percolab_core::plaquette::{wgamma_exact, wgamma_in_region, LoopGamma, PlaquetteRegion};
use percolab_core::rsw::{influence_mc, talagrand_exact};
use percolab_core::{Event, LatticeGraph, Model, SamplerSpec, Sequential};

#[test]
fn lr11_influences_match_oracle() {
    let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(1, 1)).unwrap();
    let ev = Crossing::left_right(&g).unwrap();
    let table = TruthTable::enumerate(&ev, DEFAULT_CAP, &Sequential).unwrap();
    let prof = influence_mc(&ev, g.carrier_keys(), 0.5, &SamplerSpec::new(21, 20_000), &Sequential).unwrap();
    let mut total = 0.0;
    for (e, est) in prof.per_element.iter().enumerate() {
        let exact = table.influence(e, 0.5).unwrap();
        total += exact;
        assert!((est.value - exact).abs() <= 4.0 * est.stderr.max(1e-3), "edge {e}");
    }
    assert!((prof.total.value - total).abs() <= 4.0 * prof.total.stderr);
}

#[test]
fn chi_on_unit_box_matches_exact() {
    let exact = 10_925_739.0 / 4_194_304.0;
    let e = estimate_chi(Model::BondZ2, 0.25, 1, &SamplerSpec::new(5, 40_000), &Sequential).unwrap();
    assert!((e.value - exact).abs() <= 4.0 * e.stderr);
    let t = estimate_theta(Model::BondZ2, 0.25, 1, &SamplerSpec::new(5, 40_000), &Sequential).unwrap();
    assert!((t.value - 175.0 / 256.0).abs() <= 4.0 * t.stderr);
}

#[test]
fn theta_proxy_decreases_with_box_size() {
    let spec = SamplerSpec::new(8, 2000);
    let a = estimate_theta(Model::BondZ2, 0.6, 16, &spec, &Sequential).unwrap();
    let b = estimate_theta(Model::BondZ2, 0.6, 32, &spec, &Sequential).unwrap();
    assert!(b.value <= a.value);
    assert!(b.value > 0.0 && a.value < 1.0);
    // Pathwise: nested boxes share uniforms on common edges.
    let small = LatticeGraph::centered(Model::BondZ2, 4).unwrap();
    let large = LatticeGraph::centered(Model::BondZ2, 8).unwrap();
    let es = Crossing::new(&small, Roles::ORIGIN, Roles::OUTER).unwrap();
    let el = Crossing::new(&large, Roles::ORIGIN, Roles::OUTER).unwrap();
    for r in 0..500 {
        let key = spec.key(r);
        let hs = es.occurs(&configuration_at(&uniforms(small.carrier_keys(), key), 0.55));
        let hl = el.occurs(&configuration_at(&uniforms(large.carrier_keys(), key), 0.55));
        assert!(!hl || hs);
    }
}

#[test]
fn coupled_indicators_are_monotone_in_p() {
    let g = LatticeGraph::centered(Model::BondZ2, 6).unwrap();
    let ev = Crossing::new(&g, Roles::ORIGIN, Roles::OUTER).unwrap();
    let spec = SamplerSpec::new(3, 300);
    for r in 0..spec.replicas {
        let u = uniforms(g.carrier_keys(), spec.key(r));
        let mut prev_hit = false;
        let mut prev_size = 0;
        for k in 0..=20 {
            let omega = configuration_at(&u, k as f64 / 20.0);
            let hit = ev.occurs(&omega);
            let size = origin_cluster_size(&g, &omega).unwrap();
            assert!(hit || !prev_hit);
            assert!(size >= prev_size);
            prev_hit = hit;
            prev_size = size;
        }
    }
    let chi_lo = estimate_chi(Model::BondZ2, 0.3, 6, &spec, &Sequential).unwrap();
    let chi_hi = estimate_chi(Model::BondZ2, 0.4, 6, &spec, &Sequential).unwrap();
    assert!(chi_hi.value >= chi_lo.value);
}

#[test]
fn self_dual_crossing_at_one_half() {
    let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(4, 4)).unwrap();
    let ev = Crossing::left_right(&g).unwrap();
    let e = estimate_event(&ev, g.carrier_keys(), 0.5, &SamplerSpec::new(10, 4000), &Sequential).unwrap();
    assert!(e.value >= 0.5 - 4.0 * e.stderr);
    let curve = coupled_curve(&ev, g.carrier_keys(), &SamplerSpec::new(10, 4000), &Sequential).unwrap();
    assert_eq!(curve.value_at(0.5).value, e.value);
}

#[test]
fn wgamma_matches_exhaustive_value() {
    let gamma = LoopGamma { corner: [0, 0, 0], m: 1, n: 1 }.edges();
    for hi in [[1, 1, 1], [2, 1, 1], [1, 1, 2]] {
        let region = PlaquetteRegion::new([0, 0, 0], hi).unwrap();
        assert!(region.len() <= 20);
        let exact = wgamma_exact(&gamma, 0.3, &region, 24).unwrap();
        let est = wgamma_in_region(&gamma, 0.3, &region, &SamplerSpec::new(6, 20_000), &Sequential).unwrap();
        assert!((est.value - exact).abs() <= 4.0 * est.stderr, "{hi:?}: {} vs {exact}", est.value);
    }
}

#[test]
fn talagrand_ratio_for_small_crossing_is_positive() {
    let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 1)).unwrap();
    assert_eq!(g.carrier_len(), 22);
    let r = talagrand_exact(&Crossing::left_right(&g).unwrap(), 0.5, DEFAULT_CAP, &Sequential).unwrap();
    assert!(r.ratio > 0.0 && r.ratio.is_finite());
    assert!(r.max_influence <= r.total);
}
