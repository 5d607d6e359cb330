//! Plaquettes of the dual cubic lattice `Z³ + (½,½,½)`.
//!
//! A primal edge `e = (v, a)` joins `v` and `v + e_a`. Its plaquette `Π_e`
//! is the unit square through `v + e_a/2` orthogonal to `a`, occupied iff
//! `e` is closed. A dual edge `(w, b)` is the segment from `w + (½,½,½)`
//! to `w + (½,½,½) + e_b`.
//!
//! Spanning events are decided inside a finite region: the primal edges of
//! a vertex box. Restricting to a region can only lose spanning sets, so
//! probabilities computed in a region bound the unrestricted ones from
//! below and grow with the region.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::clusters::connects;
use crate::config::{Configuration, Probability};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exec::Executor;
use crate::gf2::{BitVector, XorBasis};
use crate::lattice::{pack_key, LatticeGraph, Model, Roles};
use crate::montecarlo::SamplerSpec;

/// Edge of `Z³` from `at` along axis `axis ∈ {0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimalEdge {
    pub at: [i32; 3],
    pub axis: u8,
}

/// Edge of `Z³*` from `at + (½,½,½)` along `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualEdge {
    pub at: [i32; 3],
    pub axis: u8,
}

impl DualEdge {
    /// Endpoints, as the integer parts of the two dual vertices.
    pub fn endpoints(&self) -> [[i32; 3]; 2] {
        let mut b = self.at;
        b[self.axis as usize] += 1;
        [self.at, b]
    }
}

/// The plaquette `Π_e`, identified by its primal edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Plaquette(pub PrimalEdge);

impl Plaquette {
    pub fn primal(&self) -> PrimalEdge {
        self.0
    }

    /// The four dual edges around `Π_e`.
    pub fn boundary(&self) -> [DualEdge; 4] {
        let PrimalEdge { at: v, axis: a } = self.0;
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let (bi, ci) = (b as usize, c as usize);
        let mut base = v;
        base[bi] -= 1;
        base[ci] -= 1;
        let shift = |mut w: [i32; 3], i: usize| {
            w[i] += 1;
            w
        };
        [
            DualEdge { at: base, axis: b },
            DualEdge { at: shift(base, ci), axis: b },
            DualEdge { at: base, axis: c },
            DualEdge { at: shift(base, bi), axis: c },
        ]
    }
}

/// An `m × n` rectangle of `Z³*` in a horizontal plane: corners from
/// `corner + (½,½,½)` to `corner + (m + ½, n + ½, ½)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LoopGamma {
    pub corner: [i32; 3],
    pub m: u32,
    pub n: u32,
}

impl LoopGamma {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain("loop sides must be positive"));
        }
        Ok(LoopGamma { corner: [0; 3], m, n })
    }

    pub fn area(&self) -> u32 {
        self.m * self.n
    }

    pub fn perimeter(&self) -> u32 {
        2 * (self.m + self.n)
    }

    pub fn edges(&self) -> Vec<DualEdge> {
        let [x, y, z] = self.corner;
        let (m, n) = (self.m as i32, self.n as i32);
        let mut out = Vec::with_capacity(self.perimeter() as usize);
        for i in 0..m {
            out.push(DualEdge { at: [x + i, y, z], axis: 0 });
            out.push(DualEdge { at: [x + i, y + n, z], axis: 0 });
        }
        for j in 0..n {
            out.push(DualEdge { at: [x, y + j, z], axis: 1 });
            out.push(DualEdge { at: [x + m, y + j, z], axis: 1 });
        }
        out
    }

    /// Primal `z`-edges whose plaquettes tile the flat disc bounded by `γ`.
    pub fn disc(&self) -> Vec<PrimalEdge> {
        let [x, y, z] = self.corner;
        let mut out = Vec::with_capacity(self.area() as usize);
        for j in 0..self.n as i32 {
            for i in 0..self.m as i32 {
                out.push(PrimalEdge { at: [x + 1 + i, y + 1 + j, z], axis: 2 });
            }
        }
        out
    }
}

/// Whether every dual vertex meets an even number of the given edges.
pub fn is_closed(edges: &[DualEdge]) -> bool {
    let mut deg: BTreeMap<[i32; 3], u32> = BTreeMap::new();
    let mut set: BTreeMap<DualEdge, u32> = BTreeMap::new();
    for e in edges {
        *set.entry(*e).or_default() += 1;
    }
    for (e, mult) in set {
        if mult % 2 == 1 {
            for v in e.endpoints() {
                *deg.entry(v).or_default() += 1;
            }
        }
    }
    deg.values().all(|d| d % 2 == 0)
}

/// The plaquettes of the primal edges inside a vertex box `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct PlaquetteRegion {
    lo: [i32; 3],
    hi: [i32; 3],
    plaquettes: Vec<Plaquette>,
    index: BTreeMap<PrimalEdge, usize>,
    dual_edges: Vec<DualEdge>,
    dual_index: BTreeMap<DualEdge, usize>,
    boundaries: Vec<[u32; 4]>,
    keys: Vec<u64>,
}

/// Plaquette chains in a region: GF(2) vectors over the plaquette index.
pub type PlaquetteChain = BitVector;

/// Largest region, in plaquettes, accepted by [`PlaquetteRegion::new`].
pub const MAX_PLAQUETTES: usize = 1 << 20;

impl PlaquetteRegion {
    pub fn new(lo: [i32; 3], hi: [i32; 3]) -> Result<Self> {
        if (0..3).any(|i| hi[i] < lo[i]) {
            return Err(Error::domain("region corners are out of order"));
        }
        let span = |i: usize| (i64::from(hi[i]) - i64::from(lo[i]) + 1) as u128;
        let approx = 3 * span(0) * span(1) * span(2);
        if approx > MAX_PLAQUETTES as u128 {
            return Err(Error::SizeLimit { requested: approx.min(usize::MAX as u128) as usize, limit: MAX_PLAQUETTES });
        }
        // Primal edges in row-major order (z, y, x), axis last, so that
        // neighbouring plaquettes get nearby dual-edge indices.
        let mut plaquettes = Vec::new();
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    for axis in 0..3u8 {
                        let at = [x, y, z];
                        if at[axis as usize] < hi[axis as usize] {
                            plaquettes.push(Plaquette(PrimalEdge { at, axis }));
                        }
                    }
                }
            }
        }
        let mut all: Vec<DualEdge> = plaquettes.iter().flat_map(|p| p.boundary()).collect();
        all.sort_unstable_by_key(|d| (d.at[2], d.at[1], d.at[0], d.axis));
        all.dedup();
        let dual_index: BTreeMap<DualEdge, usize> = all.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        let boundaries = plaquettes.iter().map(|p| p.boundary().map(|d| dual_index[&d] as u32)).collect();
        let index = plaquettes.iter().enumerate().map(|(i, p)| (p.0, i)).collect();
        let keys = plaquettes.iter().map(|p| pack_key(p.0.at, p.0.axis + 1)).collect();
        Ok(PlaquetteRegion { lo, hi, plaquettes, index, dual_edges: all, dual_index, boundaries, keys })
    }

    /// `[lo, hi]³`-style cube with `side` vertices per axis, anchored at 0.
    pub fn cube(side: u32) -> Result<Self> {
        if side == 0 {
            return Err(Error::domain("region side must be positive"));
        }
        let s = side as i32 - 1;
        Self::new([0; 3], [s; 3])
    }

    /// The vertex box of `γ`'s flat disc dilated by `margin`.
    pub fn around(gamma: &LoopGamma, margin: u32) -> Result<Self> {
        let [x, y, z] = gamma.corner;
        let m = margin as i32;
        Self::new([x + 1 - m, y + 1 - m, z - m], [x + gamma.m as i32 + m, y + gamma.n as i32 + m, z + 1 + m])
    }

    pub fn corners(&self) -> ([i32; 3], [i32; 3]) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plaquettes.is_empty()
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn dual_edges(&self) -> &[DualEdge] {
        &self.dual_edges
    }

    /// Geometric keys of the plaquettes' primal edges, shared with bond
    /// lattice graphs so the same seed opens the same edges.
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// `Π_e` for a primal edge of the region.
    pub fn dual_plaquette(&self, e: PrimalEdge) -> Result<Plaquette> {
        self.plaquette_index(e).map(|i| self.plaquettes[i])
    }

    pub fn plaquette_index(&self, e: PrimalEdge) -> Result<usize> {
        self.index.get(&e).copied().ok_or_else(|| Error::domain("edge lies outside the region"))
    }

    pub fn chain(&self, edges: &[PrimalEdge]) -> Result<PlaquetteChain> {
        let mut c = BitVector::zeros(self.len());
        for e in edges {
            c.toggle(self.plaquette_index(*e)?);
        }
        Ok(c)
    }

    /// Chain of plaquettes occupied under `omega`: closed primal edges.
    pub fn occupied(&self, omega: &Configuration) -> Result<PlaquetteChain> {
        if omega.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: omega.len() });
        }
        let mut c = BitVector::zeros(self.len());
        for i in 0..self.len() {
            if !omega.get(i) {
                c.set(i, true);
            }
        }
        Ok(c)
    }

    /// Boundary vector of plaquette `i` over the region's dual edges.
    pub fn plaquette_boundary(&self, i: usize) -> BitVector {
        BitVector::from_indices(self.dual_edges.len(), self.boundaries[i].iter().map(|&d| d as usize))
    }

    /// `∂F`: dual edges lying in an odd number of members of `F`.
    pub fn boundary(&self, chain: &PlaquetteChain) -> Result<BitVector> {
        if chain.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: chain.len() });
        }
        let mut out = BitVector::zeros(self.dual_edges.len());
        for i in chain.iter_ones() {
            for &d in &self.boundaries[i] {
                out.toggle(d as usize);
            }
        }
        Ok(out)
    }

    pub fn boundary_edges(&self, chain: &PlaquetteChain) -> Result<Vec<DualEdge>> {
        Ok(self.boundary(chain)?.iter_ones().map(|i| self.dual_edges[i]).collect())
    }

    /// Dual-edge vector of `edges` (taken mod 2), or `None` if one lies
    /// outside the region.
    pub fn dual_vector(&self, edges: &[DualEdge]) -> Option<BitVector> {
        let mut v = BitVector::zeros(self.dual_edges.len());
        for e in edges {
            v.toggle(*self.dual_index.get(e)?);
        }
        Some(v)
    }

    /// `W_γ` in the region: some set of occupied plaquettes has boundary
    /// exactly `γ`. Decided by GF(2) elimination of the occupied
    /// boundaries.
    pub fn spans(&self, gamma: &[DualEdge], occupied: &PlaquetteChain) -> Result<bool> {
        if !is_closed(gamma) {
            return Err(Error::domain("gamma is not a closed dual cycle"));
        }
        match self.dual_vector(gamma) {
            Some(target) => self.spans_target(&target, occupied),
            None => Ok(false),
        }
    }

    /// [`spans`](Self::spans) for a loop already converted with
    /// [`dual_vector`](Self::dual_vector).
    pub fn spans_target(&self, target: &BitVector, occupied: &PlaquetteChain) -> Result<bool> {
        if occupied.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: occupied.len() });
        }
        if target.len() != self.dual_edges.len() {
            return Err(Error::LengthMismatch { expected: self.dual_edges.len(), got: target.len() });
        }
        if target.is_zero() {
            return Ok(true);
        }
        Ok(if self.dual_edges.len() <= 128 { self.span_small(target, occupied) } else { self.span_general(target, occupied) })
    }

    /// Elimination in `u128` words for regions with at most 128 dual edges.
    fn span_small(&self, target: &BitVector, occupied: &PlaquetteChain) -> bool {
        let word = |v: &BitVector| v.words().iter().take(2).enumerate().fold(0u128, |acc, (i, &w)| acc | u128::from(w) << (64 * i));
        let mut rows = [0u128; 128];
        for i in occupied.iter_ones() {
            let mut v = self.boundaries[i].iter().fold(0u128, |acc, &d| acc ^ 1 << d);
            while v != 0 {
                let b = v.trailing_zeros() as usize;
                if rows[b] == 0 {
                    rows[b] = v;
                    break;
                }
                v ^= rows[b];
            }
        }
        let mut t = word(target);
        while t != 0 {
            let b = t.trailing_zeros() as usize;
            if rows[b] == 0 {
                return false;
            }
            t ^= rows[b];
        }
        true
    }

    fn span_general(&self, target: &BitVector, occupied: &PlaquetteChain) -> bool {
        let mut basis = XorBasis::new(self.dual_edges.len());
        for i in occupied.iter_ones() {
            basis.insert(self.plaquette_boundary(i));
        }
        basis.contains(target)
    }

    /// Spanning indicator for every occupied set, indexed by plaquette
    /// mask, by exhaustive enumeration: the sets `F` with `∂F = γ` are
    /// listed in Gray-code order, then closed upward.
    pub fn spans_exhaustive(&self, gamma: &[DualEdge], cap: usize) -> Result<Vec<bool>> {
        let k = self.len();
        if k > cap || k > 30 {
            return Err(Error::CapExceeded { size: k, cap: cap.min(30) });
        }
        if !is_closed(gamma) {
            return Err(Error::domain("gamma is not a closed dual cycle"));
        }
        let total = 1usize << k;
        let mut hit = vec![false; total];
        if let Some(target) = self.dual_vector(gamma) {
            let vecs: Vec<BitVector> = (0..k).map(|i| self.plaquette_boundary(i)).collect();
            let mut cur = BitVector::zeros(self.dual_edges.len());
            let mut gray = 0usize;
            hit[0] = cur == target;
            for step in 1..total {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                cur.xor_assign(&vecs[bit]);
                if cur == target {
                    hit[gray] = true;
                }
            }
            for bit in 0..k {
                for mask in 0..total {
                    if mask >> bit & 1 == 1 && hit[mask ^ (1 << bit)] {
                        hit[mask] = true;
                    }
                }
            }
        }
        Ok(hit)
    }
}

/// `P_p(W_γ)` in a region, with its negative logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WgammaEstimate {
    pub gamma: LoopGamma,
    pub p: f64,
    pub margin: u32,
    pub estimate: Estimate,
    /// `-ln P̂`, absent when no replica spanned.
    pub minus_log: Option<f64>,
    /// Delta-method error `se / P̂`.
    pub minus_log_stderr: Option<f64>,
    pub below_resolution: bool,
}

/// Monte Carlo `P_p(W_γ)` inside `PlaquetteRegion::around(γ, margin)`.
pub fn wgamma_probability<X: Executor>(gamma: &LoopGamma, p: f64, margin: u32, spec: &SamplerSpec, exec: &X) -> Result<WgammaEstimate> {
    let region = PlaquetteRegion::around(gamma, margin)?;
    let estimate = wgamma_in_region(&gamma.edges(), p, &region, spec, exec)?;
    let count = libm::round(estimate.value * spec.replicas as f64) as u64;
    let (minus_log, minus_log_stderr) =
        if count == 0 { (None, None) } else { (Some(-libm::log(estimate.value)), Some(estimate.stderr / estimate.value)) };
    Ok(WgammaEstimate { gamma: *gamma, p, margin, estimate, minus_log, minus_log_stderr, below_resolution: count == 0 })
}

/// Monte Carlo `P_p(W_γ)` for a closed dual chain in a given region.
pub fn wgamma_in_region<X: Executor>(
    gamma: &[DualEdge],
    p: f64,
    region: &PlaquetteRegion,
    spec: &SamplerSpec,
    exec: &X,
) -> Result<Estimate> {
    Probability::new(p)?;
    if spec.replicas == 0 {
        return Err(Error::domain("replica count must be positive"));
    }
    if !is_closed(gamma) {
        return Err(Error::domain("gamma is not a closed dual cycle"));
    }
    let hits = exec.map(spec.replicas as usize, |r| {
        let key = spec.key(r as u64);
        let mut occ = BitVector::zeros(region.len());
        for (i, &k) in region.keys().iter().enumerate() {
            if key.uniform(k) >= p {
                occ.set(i, true);
            }
        }
        region.spans(gamma, &occ)
    });
    let hits = hits.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Estimate::proportion(hits.iter().filter(|&&h| h).count() as u64, spec.replicas))
}

/// Exact `P_p(W_γ)` in a region by enumerating its plaquette states.
pub fn wgamma_exact(gamma: &[DualEdge], p: f64, region: &PlaquetteRegion, cap: usize) -> Result<f64> {
    Probability::new(p)?;
    let hit = region.spans_exhaustive(gamma, cap)?;
    let k = region.len();
    // Occupied with probability 1 - p.
    let mut counts = vec![0u64; k + 1];
    for (mask, &h) in hit.iter().enumerate() {
        if h {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    Ok(crate::poly::bernstein_eval(k, &counts, 1.0 - p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Regime {
    Area,
    Perimeter,
    /// Fewer than three loops above resolution.
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegimeFit {
    pub p: f64,
    pub points: usize,
    /// Residual sums of squares of `-ln P̂ = a + b·x` for `x` the area and
    /// the perimeter.
    pub area_rss: f64,
    pub perimeter_rss: f64,
    pub area_slope: f64,
    pub perimeter_slope: f64,
    pub preferred: Regime,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingProbe {
    pub rows: Vec<WgammaEstimate>,
    pub fits: Vec<RegimeFit>,
}

/// Least squares `y = a + b x`; returns `(b, rss)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x) * (y - a - b * x)).sum();
    (b, rss)
}

/// `-ln P̂(W_γ)` for each loop and density, and which of area and
/// perimeter explains it better at each density. Qualitative only.
pub fn scaling_probe<X: Executor>(gammas: &[LoopGamma], ps: &[f64], margin: u32, spec: &SamplerSpec, exec: &X) -> Result<ScalingProbe> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &p in ps {
        let mut xs_a = Vec::new();
        let mut xs_p = Vec::new();
        let mut ys = Vec::new();
        for g in gammas {
            let label = alloc::format!("wgamma-{}x{}", g.m, g.n);
            let w = wgamma_probability(g, p, margin, &spec.labelled(&label), exec)?;
            if let Some(y) = w.minus_log {
                xs_a.push(f64::from(g.area()));
                xs_p.push(f64::from(g.perimeter()));
                ys.push(y);
            }
            rows.push(w);
        }
        let (area_slope, area_rss) = line_fit(&xs_a, &ys);
        let (perimeter_slope, perimeter_rss) = line_fit(&xs_p, &ys);
        let preferred = if ys.len() < 3 {
            Regime::Unresolved
        } else if area_rss < perimeter_rss {
            Regime::Area
        } else {
            Regime::Perimeter
        };
        fits.push(RegimeFit { p, points: ys.len(), area_rss, perimeter_rss, area_slope, perimeter_slope, preferred });
    }
    Ok(ScalingProbe { rows, fits })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoexistenceReport {
    pub p: f64,
    pub side: u32,
    /// An open cluster joins the two `x`-faces.
    pub open: Estimate,
    /// A closed cluster joins them.
    pub closed: Estimate,
    pub both: Estimate,
}

/// Open and closed left–right spanning on the site-Z³ cube `[0, L]³`.
pub fn coexistence_check<X: Executor>(p: f64, side: u32, spec: &SamplerSpec, exec: &X) -> Result<CoexistenceReport> {
    Probability::new(p)?;
    if spec.replicas == 0 {
        return Err(Error::domain("replica count must be positive"));
    }
    let g = LatticeGraph::cube(Model::SiteZ3, side)?;
    let per = exec.map(spec.replicas as usize, |r| {
        let omega = crate::montecarlo::configuration_at(&crate::montecarlo::uniforms(g.carrier_keys(), spec.key(r as u64)), p);
        (connects(&g, &omega, true, Roles::LEFT, Roles::RIGHT), connects(&g, &omega, false, Roles::LEFT, Roles::RIGHT))
    });
    let count = |f: &dyn Fn(&(bool, bool)) -> bool| per.iter().filter(|x| f(x)).count() as u64;
    Ok(CoexistenceReport {
        p,
        side,
        open: Estimate::proportion(count(&|x| x.0), spec.replicas),
        closed: Estimate::proportion(count(&|x| x.1), spec.replicas),
        both: Estimate::proportion(count(&|x| x.0 && x.1), spec.replicas),
    })
}

/// Vertex boxes anchored at the origin, one per extent triple, with
/// between one and `max` plaquettes.
pub fn box_regions(max: usize) -> Result<Vec<PlaquetteRegion>> {
    let count = |a: usize, b: usize, c: usize| (a - 1) * b * c + a * (b - 1) * c + a * b * (c - 1);
    let mut out = Vec::new();
    for c in 1..=max + 1 {
        for b in 1..=max + 1 {
            for a in 1..=max + 1 {
                let k = count(a, b, c);
                if (1..=max).contains(&k) {
                    out.push(PlaquetteRegion::new([0; 3], [a as i32 - 1, b as i32 - 1, c as i32 - 1])?);
                }
            }
        }
    }
    Ok(out)
}

/// Closed dual loops to test in a region: every plaquette boundary, the
/// boundary of every pair of plaquettes sharing a dual edge, every flat
/// rectangle with sides at most 2 whose edges lie in the region, and one
/// unit loop outside it.
pub fn probe_loops(region: &PlaquetteRegion) -> Vec<Vec<DualEdge>> {
    let k = region.len();
    let mut out: Vec<Vec<DualEdge>> = (0..k).map(|i| region.plaquettes[i].boundary().to_vec()).collect();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&region.boundaries[i], &region.boundaries[j]);
            if a.iter().any(|d| b.contains(d)) {
                let mut pair = BitVector::zeros(k);
                pair.set(i, true);
                pair.set(j, true);
                out.push(region.boundary_edges(&pair).unwrap_or_default());
            }
        }
    }
    let (lo, hi) = region.corners();
    for m in 1..=2 {
        for n in 1..=2 {
            for z in lo[2] - 1..=hi[2] {
                for y in lo[1] - 1..=hi[1] {
                    for x in lo[0] - 1..=hi[0] {
                        let g = LoopGamma { corner: [x, y, z], m, n }.edges();
                        if region.dual_vector(&g).is_some() {
                            out.push(g);
                        }
                    }
                }
            }
        }
    }
    out.push(LoopGamma { corner: [hi[0] + 5, 0, 0], m: 1, n: 1 }.edges());
    for l in &mut out {
        l.sort_unstable();
    }
    out.sort();
    out.dedup();
    out
}

/// Outcome of comparing [`PlaquetteRegion::spans`] with the exhaustive
/// table over occupied sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpansAgreement {
    pub regions: usize,
    pub loops: usize,
    /// Individual decisions compared with the table.
    pub compared: u64,
    pub mismatches: u64,
}

/// Compares spanning decisions with `spans_exhaustive` for every probe
/// loop of every region. [`PlaquetteRegion::spans_target`] is checked on
/// every occupied set; the full [`PlaquetteRegion::spans`] call and the
/// general elimination path (used above 128 dual edges) on every
/// `stride`-th one.
pub fn spans_agreement<X: Executor>(regions: &[PlaquetteRegion], stride: usize, exec: &X) -> Result<SpansAgreement> {
    let stride = stride.max(1);
    let mut out = SpansAgreement { regions: regions.len(), ..SpansAgreement::default() };
    for r in regions {
        let k = r.len();
        for gamma in probe_loops(r) {
            let table = r.spans_exhaustive(&gamma, 30)?;
            let target = r.dual_vector(&gamma);
            const CHUNK: usize = 1 << 12;
            let per = exec.map(table.len().div_ceil(CHUNK), |c| {
                let (mut compared, mut bad) = (0u64, 0u64);
                let mut occ = BitVector::zeros(k);
                let start = c * CHUNK;
                for (mask, &want) in table.iter().enumerate().skip(start).take(CHUNK) {
                    for i in 0..k {
                        occ.set(i, mask >> i & 1 == 1);
                    }
                    let fast = match &target {
                        Some(t) => r.spans_target(t, &occ).ok(),
                        None => Some(false),
                    };
                    compared += 1;
                    bad += u64::from(fast != Some(want));
                    if mask % stride == 0 {
                        let full = r.spans(&gamma, &occ).ok();
                        let general = target.as_ref().is_some_and(|t| t.is_zero() || r.span_general(t, &occ));
                        compared += 2;
                        bad += u64::from(full != Some(want)) + u64::from(general != want);
                    }
                }
                (compared, bad)
            });
            out.loops += 1;
            out.compared += per.iter().map(|x| x.0).sum::<u64>();
            out.mismatches += per.iter().map(|x| x.1).sum::<u64>();
        }
    }
    Ok(out)
}

/// Outcome of the boundary-operator tests on random chains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryAlgebra {
    pub chains: usize,
    /// Pairs with `∂(F + G) ≠ ∂F + ∂G`.
    pub nonlinear: usize,
    /// Chains whose boundary has a dual vertex of odd degree.
    pub open_boundaries: usize,
    /// Closed surfaces (boundaries of dual cubes and their sums) with
    /// nonzero boundary.
    pub nonzero_closed: usize,
}

/// Linearity of `∂` and `∂∂ = 0` on `chains` random chain pairs in the
/// cube with `side` vertices per axis. The closed surfaces tested are the
/// six plaquettes around each interior vertex and random sums of them.
pub fn boundary_algebra(side: u32, chains: usize, key: crate::rng::StreamKey) -> Result<BoundaryAlgebra> {
    let r = PlaquetteRegion::cube(side)?;
    let mut rng = key.rng();
    let mut random_chain = |k: usize| BitVector::from_indices(k, (0..k).filter(|_| rng.next_u64() & 1 == 1));
    let mut out = BoundaryAlgebra { chains, ..BoundaryAlgebra::default() };
    for _ in 0..chains {
        let a = random_chain(r.len());
        let b = random_chain(r.len());
        let mut ab = a.clone();
        ab.xor_assign(&b);
        let mut sum = r.boundary(&a)?;
        sum.xor_assign(&r.boundary(&b)?);
        out.nonlinear += usize::from(r.boundary(&ab)? != sum);
        out.open_boundaries += usize::from(!is_closed(&r.boundary_edges(&a)?));
    }
    let s = side as i32 - 1;
    let mut stars = Vec::new();
    for z in 1..s {
        for y in 1..s {
            for x in 1..s {
                let v = [x, y, z];
                let mut edges = Vec::with_capacity(6);
                for a in 0..3u8 {
                    let mut lo = v;
                    lo[a as usize] -= 1;
                    edges.push(PrimalEdge { at: lo, axis: a });
                    edges.push(PrimalEdge { at: v, axis: a });
                }
                stars.push(r.chain(&edges)?);
            }
        }
    }
    let mut rng = key.child(1).rng();
    for t in 0..stars.len() + chains {
        let surface = if t < stars.len() {
            stars[t].clone()
        } else {
            let mut acc = BitVector::zeros(r.len());
            for st in &stars {
                if rng.next_u64() & 1 == 1 {
                    acc.xor_assign(st);
                }
            }
            acc
        };
        out.nonzero_closed += usize::from(!r.boundary(&surface)?.is_zero());
    }
    Ok(out)
}
