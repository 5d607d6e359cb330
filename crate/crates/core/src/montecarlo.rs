//! Seeded sampling, coupled sweeps and cluster estimators.
//!
//! Replica `r` of a run with master seed `s` draws the uniform of carrier
//! element `i` from `StreamKey::new(s, r).uniform(key_i)`, where `key_i` is
//! the element's geometric key. Element `i` is open at density `p` iff that
//! uniform is below `p`. Configurations at different densities are
//! therefore ordered pathwise, and nested boxes see the same uniforms on
//! shared elements.

use alloc::vec::Vec;

use crate::clusters::clusters;
use crate::config::{Configuration, Probability};
use crate::cube::Event;
use crate::error::{Error, Result};
use crate::estimate::{Estimate, IntervalMethod};
use crate::events::Crossing;
use crate::exec::Executor;
use crate::lattice::{LatticeGraph, Model, Roles};
use crate::rng::StreamKey;

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplerSpec {
    pub master_seed: u64,
    pub replicas: u64,
}

impl SamplerSpec {
    pub fn new(master_seed: u64, replicas: u64) -> Self {
        SamplerSpec { master_seed, replicas }
    }

    pub fn key(&self, replica: u64) -> StreamKey {
        StreamKey::new(self.master_seed, replica)
    }

    /// The same replica count under an independent seed for `label`.
    pub fn labelled(&self, label: &str) -> Self {
        SamplerSpec { master_seed: crate::rng::label_seed(self.master_seed, label), replicas: self.replicas }
    }

    fn check(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::domain("replica count must be positive"));
        }
        Ok(())
    }
}

/// Element keys `0..n` for events on a bare ground set.
pub fn index_keys(n: usize) -> Vec<u64> {
    (0..n as u64).collect()
}

pub fn uniforms(keys: &[u64], key: StreamKey) -> Vec<f64> {
    keys.iter().map(|&k| key.uniform(k)).collect()
}

pub fn configuration_at(u: &[f64], p: f64) -> Configuration {
    let mut omega = Configuration::closed(u.len());
    for (i, &x) in u.iter().enumerate() {
        if x < p {
            omega.set(i, true);
        }
    }
    omega
}

/// A configuration of `graph`'s carrier at density `p` for one replica.
pub fn sample(graph: &LatticeGraph, p: f64, key: StreamKey) -> Result<Configuration> {
    Probability::new(p)?;
    Ok(configuration_at(&uniforms(graph.carrier_keys(), key), p))
}

/// Density at which an increasing event switches on for fixed uniforms.
///
/// The event occurs at `p` iff the returned threshold is `< p`. Events
/// already present at the empty configuration get `-1`, events absent
/// from the full configuration get `+∞`.
pub fn threshold<A: Event + ?Sized>(event: &A, u: &[f64]) -> f64 {
    let n = u.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| u[a].total_cmp(&u[b]));
    let mut omega = Configuration::closed(n);
    if event.occurs(&omega) {
        return -1.0;
    }
    let mut opened = 0usize;
    let mut advance = |omega: &mut Configuration, target: usize| {
        while opened < target {
            omega.set(order[opened], true);
            opened += 1;
        }
        while opened > target {
            opened -= 1;
            omega.set(order[opened], false);
        }
    };
    advance(&mut omega, n);
    if !event.occurs(&omega) {
        return f64::INFINITY;
    }
    // Smallest k in (lo, hi] with the first k elements opened giving A.
    let (mut lo, mut hi) = (0usize, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        advance(&mut omega, mid);
        if event.occurs(&omega) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    u[order[hi - 1]]
}

/// Per-replica switching densities of an increasing event under the
/// monotone coupling. `P̂_p(A) = #{r : t_r < p} / R`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledCurve {
    by_replica: Vec<f64>,
    sorted: Vec<f64>,
}

impl CoupledCurve {
    pub fn from_thresholds(by_replica: Vec<f64>) -> Self {
        let mut sorted = by_replica.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        CoupledCurve { by_replica, sorted }
    }

    pub fn replicas(&self) -> usize {
        self.sorted.len()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.by_replica
    }

    pub fn count_below(&self, p: f64) -> usize {
        self.sorted.partition_point(|&t| t < p)
    }

    pub fn value_at(&self, p: f64) -> Estimate {
        Estimate::proportion(self.count_below(p) as u64, self.sorted.len() as u64)
    }

    /// `inf{p ∈ [0,1] : P̂_p(A) ≥ level}`, or `None` if the curve stays below.
    pub fn first_reaching(&self, level: f64) -> Option<f64> {
        first_reaching(&self.sorted, level)
    }

    /// Bisection for the crossing of `level`, stopped when the bracket is
    /// no wider than `tol`. Returns `(lo, hi)` with `P̂_lo < level ≤ P̂_hi`.
    pub fn bisect(&self, level: f64, tol: f64) -> Result<(f64, f64)> {
        let r = self.sorted.len() as f64;
        let f = |p: f64| self.count_below(p) as f64 / r;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        if f(lo) >= level || f(hi) < level {
            return Err(Error::domain("level is not bracketed by the curve endpoints"));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi))
    }

    /// [`Self::first_reaching`] on consecutive replica batches, for
    /// batch-means standard errors. Batches whose curve never reaches
    /// `level` contribute 1.
    pub fn batch_first_reaching(&self, level: f64) -> Vec<f64> {
        batches(&self.by_replica)
            .map(|b| {
                let mut s = b.to_vec();
                s.sort_unstable_by(f64::total_cmp);
                first_reaching(&s, level).unwrap_or(1.0)
            })
            .collect()
    }
}

fn first_reaching(sorted: &[f64], level: f64) -> Option<f64> {
    let r = sorted.len();
    if r == 0 {
        return None;
    }
    let k = libm::ceil(level * r as f64).max(1.0) as usize;
    if k > r {
        return None;
    }
    let t = sorted[k - 1];
    if t.is_infinite() {
        None
    } else {
        Some(t.max(0.0))
    }
}

fn batches(values: &[f64]) -> impl Iterator<Item = &[f64]> {
    let size = values.len().div_ceil(BATCHES).max(1);
    values.chunks(size)
}

/// Standard error of the mean of batch statistics.
pub fn batch_stderr(stats: &[f64]) -> f64 {
    Estimate::mean(stats, f64::NEG_INFINITY, f64::INFINITY).stderr
}

/// Coupled curve of `event` whose elements carry the given keys.
pub fn coupled_curve<A, X>(event: &A, keys: &[u64], spec: &SamplerSpec, exec: &X) -> Result<CoupledCurve>
where
    A: Event + ?Sized,
    X: Executor,
{
    spec.check()?;
    if !event.declared_increasing() {
        return Err(Error::domain("coupled sweeps need an increasing event"));
    }
    if keys.len() != event.size() {
        return Err(Error::LengthMismatch { expected: event.size(), got: keys.len() });
    }
    let t = exec.map(spec.replicas as usize, |r| threshold(event, &uniforms(keys, spec.key(r as u64))));
    Ok(CoupledCurve::from_thresholds(t))
}

/// `P̂_p(A)` for an event on `keys`-indexed elements.
pub fn estimate_event<A, X>(event: &A, keys: &[u64], p: f64, spec: &SamplerSpec, exec: &X) -> Result<Estimate>
where
    A: Event + ?Sized,
    X: Executor,
{
    spec.check()?;
    Probability::new(p)?;
    if keys.len() != event.size() {
        return Err(Error::LengthMismatch { expected: event.size(), got: keys.len() });
    }
    let hits = exec.map(spec.replicas as usize, |r| event.occurs(&configuration_at(&uniforms(keys, spec.key(r as u64)), p)));
    Ok(Estimate::proportion(hits.iter().filter(|&&h| h).count() as u64, spec.replicas))
}

/// Finite-volume proxy for `θ(p)`: the origin is joined to the boundary of
/// `[-L, L]^d`. It bounds the infinite-volume quantity from above and is
/// nonincreasing in `L` under the coupling.
pub fn estimate_theta<X: Executor>(model: Model, p: f64, radius: u32, spec: &SamplerSpec, exec: &X) -> Result<Estimate> {
    let g = LatticeGraph::centered(model, radius)?;
    let ev = Crossing::new(&g, Roles::ORIGIN, Roles::OUTER)?;
    estimate_event(&ev, g.carrier_keys(), p, spec, exec)
}

/// Size of the origin's open cluster in `graph` (0 for a closed site).
pub fn origin_cluster_size(graph: &LatticeGraph, omega: &Configuration) -> Result<usize> {
    let o = graph.origin().ok_or_else(|| Error::domain("graph has no origin"))?;
    let c = clusters(graph, omega)?;
    Ok(if c.member[o] { c.size_of(o) } else { 0 })
}

/// Finite-volume proxy for `χ(p)`: mean size of the origin's open cluster
/// inside `[-L, L]^d`. It bounds the infinite-volume quantity from below.
pub fn estimate_chi<X: Executor>(model: Model, p: f64, radius: u32, spec: &SamplerSpec, exec: &X) -> Result<Estimate> {
    spec.check()?;
    Probability::new(p)?;
    let g = LatticeGraph::centered(model, radius)?;
    let sizes = exec.map(spec.replicas as usize, |r| {
        let omega = configuration_at(&uniforms(g.carrier_keys(), spec.key(r as u64)), p);
        origin_cluster_size(&g, &omega).map(|s| s as f64)
    });
    let sizes = sizes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Estimate::mean(&sizes, 0.0, g.vertex_count() as f64))
}

/// Junction counts of one configuration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Junctions {
    /// Open clusters with at least `threshold` vertices.
    pub large_clusters: usize,
    /// Vertices whose closed neighbourhood meets at least two of them.
    pub touching_two: usize,
    /// ... at least three of them.
    pub touching_three: usize,
}

/// Counts large clusters and the vertices adjacent to several of them.
/// Adjacency is lattice adjacency, independent of edge states.
pub fn junctions(graph: &LatticeGraph, omega: &Configuration, threshold: usize) -> Result<Junctions> {
    let c = clusters(graph, omega)?;
    let large: Vec<bool> = c.sizes.iter().map(|&s| s as usize >= threshold).collect();
    let mut out = Junctions {
        large_clusters: large
            .iter()
            .enumerate()
            .filter(|&(l, &big)| big && c.labels.iter().zip(&c.member).any(|(&x, &m)| m && x as usize == l))
            .count(),
        ..Junctions::default()
    };
    let mut seen: Vec<u32> = Vec::with_capacity(16);
    for v in 0..graph.vertex_count() {
        seen.clear();
        let nbrs = graph.neighbors(v).iter().map(|&(w, _)| w as usize);
        for w in core::iter::once(v).chain(nbrs) {
            let l = c.labels[w];
            if c.member[w] && large[l as usize] && !seen.contains(&l) {
                seen.push(l);
            }
        }
        out.touching_two += usize::from(seen.len() >= 2);
        out.touching_three += usize::from(seen.len() >= 3);
    }
    Ok(out)
}

/// Uniqueness diagnostics on `[-L, L]^d` with "large" meaning at least `L`
/// vertices. Large is a proxy for infinite: it overcounts distinct
/// infinite clusters near the box boundary, so the densities are biased
/// upward at small `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniquenessReport {
    pub radius: u32,
    pub p: f64,
    pub threshold: usize,
    /// Frequency of at least two large clusters in the box.
    pub multiple_large: Estimate,
    /// Mean number of large clusters.
    pub large_clusters: Estimate,
    /// Density of vertices adjacent to at least two distinct large clusters.
    pub density_two: Estimate,
    /// Density of vertices adjacent to at least three.
    pub density_three: Estimate,
}

pub fn uniqueness_diagnostics<X: Executor>(model: Model, p: f64, radius: u32, spec: &SamplerSpec, exec: &X) -> Result<UniquenessReport> {
    spec.check()?;
    Probability::new(p)?;
    if radius < 8 {
        return Err(Error::domain("uniqueness diagnostics need L >= 8"));
    }
    let g = LatticeGraph::centered(model, radius)?;
    let threshold = radius as usize;
    let per = exec.map(spec.replicas as usize, |r| {
        let omega = configuration_at(&uniforms(g.carrier_keys(), spec.key(r as u64)), p);
        junctions(&g, &omega, threshold)
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    let nv = g.vertex_count() as f64;
    let multiple = per.iter().filter(|j| j.large_clusters >= 2).count() as u64;
    let count: Vec<f64> = per.iter().map(|j| j.large_clusters as f64).collect();
    let two: Vec<f64> = per.iter().map(|j| j.touching_two as f64 / nv).collect();
    let three: Vec<f64> = per.iter().map(|j| j.touching_three as f64 / nv).collect();
    Ok(UniquenessReport {
        radius,
        p,
        threshold,
        multiple_large: Estimate::proportion(multiple, spec.replicas),
        large_clusters: Estimate::mean(&count, 0.0, f64::INFINITY),
        density_two: Estimate::mean(&two, 0.0, 1.0),
        density_three: Estimate::mean(&three, 0.0, 1.0),
    })
}

/// Batch-means estimate of a replica statistic computed per batch.
pub fn batch_estimate(stats: &[f64], point: f64, replicas: u64) -> Estimate {
    Estimate::normal(point, batch_stderr(stats), replicas, 0.0, 1.0).with_method(IntervalMethod::Batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{Dictator, Threshold};
    use crate::exec::Sequential;
    use crate::lattice::BoxSpec;

    #[test]
    fn sampling_extremes_and_frequency() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 2)).unwrap();
        let key = StreamKey::new(3, 0);
        assert_eq!(sample(&g, 0.0, key).unwrap().count_open(), 0);
        assert_eq!(sample(&g, 1.0, key).unwrap().count_open(), g.carrier_len());
        assert!(sample(&g, 1.5, key).is_err());
        let r = 100_000u64;
        let hits = (0..r).filter(|&i| sample(&g, 0.5, StreamKey::new(11, i)).unwrap().get(5)).count();
        let est = Estimate::proportion(hits as u64, r);
        assert!((est.value - 0.5).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn sampling_is_pure_and_coupled() {
        let g = LatticeGraph::build_box(Model::SiteZ2, BoxSpec::new(3, 3)).unwrap();
        let key = StreamKey::new(9, 4);
        assert_eq!(sample(&g, 0.4, key).unwrap(), sample(&g, 0.4, key).unwrap());
        let lo = sample(&g, 0.3, key).unwrap();
        let hi = sample(&g, 0.6, key).unwrap();
        assert!(lo.le(&hi));
    }

    #[test]
    fn thresholds_reproduce_direct_evaluation() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 2)).unwrap();
        let ev = Crossing::left_right(&g).unwrap();
        for r in 0..200 {
            let u = uniforms(g.carrier_keys(), StreamKey::new(1, r));
            let t = threshold(&ev, &u);
            assert!((0.0..1.0).contains(&t));
            for p in [0.1, 0.3, 0.45, 0.5, 0.55, 0.7, 0.9] {
                assert_eq!(ev.occurs(&configuration_at(&u, p)), t < p);
            }
            assert!(ev.occurs(&configuration_at(&u, t + 1e-12)));
            assert!(!ev.occurs(&configuration_at(&u, t)));
        }
    }

    #[test]
    fn curve_endpoints_and_bisection() {
        let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(2, 2)).unwrap();
        let ev = Crossing::left_right(&g).unwrap();
        let curve = coupled_curve(&ev, g.carrier_keys(), &SamplerSpec::new(5, 500), &Sequential).unwrap();
        assert_eq!(curve.value_at(0.0).value, 0.0);
        assert_eq!(curve.value_at(1.0).value, 1.0);
        let (lo, hi) = curve.bisect(0.5, libm::ldexp(1.0, -20)).unwrap();
        assert!(hi - lo <= libm::ldexp(1.0, -20));
        assert!(curve.value_at(lo).value < 0.5 && curve.value_at(hi).value >= 0.5);
        let mut prev = 0.0;
        for k in 0..=100 {
            let v = curve.value_at(k as f64 / 100.0).value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn dictator_curve_is_uniform_cdf() {
        let d = Dictator { size: 4, element: 2 };
        let curve = coupled_curve(&d, &index_keys(4), &SamplerSpec::new(2, 4000), &Sequential).unwrap();
        for p in [0.1, 0.5, 0.9] {
            let e = curve.value_at(p);
            assert!((e.value - p).abs() < 4.0 * e.stderr);
        }
        let maj = Threshold::majority3();
        let direct = estimate_event(&maj, &index_keys(3), 0.5, &SamplerSpec::new(2, 4000), &Sequential).unwrap();
        let curve = coupled_curve(&maj, &index_keys(3), &SamplerSpec::new(2, 4000), &Sequential).unwrap();
        assert_eq!(direct.value, curve.value_at(0.5).value);
    }

    #[test]
    fn theta_and_chi_extremes() {
        let spec = SamplerSpec::new(1, 50);
        assert_eq!(estimate_theta(Model::BondZ2, 0.0, 4, &spec, &Sequential).unwrap().value, 0.0);
        assert_eq!(estimate_theta(Model::BondZ2, 1.0, 4, &spec, &Sequential).unwrap().value, 1.0);
        assert_eq!(estimate_chi(Model::BondZ2, 0.0, 4, &spec, &Sequential).unwrap().value, 1.0);
        assert_eq!(estimate_chi(Model::BondZ2, 1.0, 2, &spec, &Sequential).unwrap().value, 25.0);
    }

    #[test]
    fn junction_extremes() {
        let spec = SamplerSpec::new(4, 5);
        let full = uniqueness_diagnostics(Model::BondZ2, 1.0, 8, &spec, &Sequential).unwrap();
        assert_eq!(full.large_clusters.value, 1.0);
        assert_eq!(full.density_two.value, 0.0);
        assert_eq!(full.density_three.value, 0.0);
        let empty = uniqueness_diagnostics(Model::BondZ2, 0.0, 8, &spec, &Sequential).unwrap();
        assert_eq!(empty.large_clusters.value, 0.0);
        assert_eq!(empty.multiple_large.value, 0.0);
        assert!(uniqueness_diagnostics(Model::BondZ2, 0.5, 4, &spec, &Sequential).is_err());
    }

    #[test]
    fn junctions_by_hand() {
        // Two horizontal open rows of length 4 at y = -1 and y = 1 in [-2,2]²;
        // vertices on y = 0 between them touch both.
        let g = LatticeGraph::centered(Model::BondZ2, 2).unwrap();
        let mut omega = Configuration::closed(g.carrier_len());
        for (i, e) in g.edges().iter().enumerate() {
            let a = g.coords(e[0] as usize);
            let b = g.coords(e[1] as usize);
            if a[1] == b[1] && a[1].abs() == 1 {
                omega.set(i, true);
            }
        }
        let j = junctions(&g, &omega, 5).unwrap();
        assert_eq!(j, Junctions { large_clusters: 2, touching_two: 5, touching_three: 0 });
    }
}
