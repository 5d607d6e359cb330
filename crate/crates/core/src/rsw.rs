//! Box-crossing inequalities, critical points, influences and threshold
//! windows.

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::Probability;
use crate::cube::{Dictator, Event};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, IntervalMethod};
use crate::events::{AnnulusCircuit, Crossing};
use crate::exec::Executor;
use crate::lattice::{AnnulusSpec, BoxSpec, LatticeGraph, Model};
use crate::montecarlo::{batch_stderr, configuration_at, coupled_curve, estimate_event, index_keys, uniforms, CoupledCurve, SamplerSpec};
use crate::oracle::TruthTable;

/// Slack, in standard errors, granted to inequality checks.
pub const SIGMAS: f64 = 4.0;

/// `(1 - √(1-τ))³`, written as `(τ / (1 + √(1-τ)))³` to avoid cancellation
/// for small `τ`.
pub fn rsw_bound(tau: f64) -> f64 {
    let t = tau.clamp(0.0, 1.0);
    let x = t / (1.0 + libm::sqrt(1.0 - t));
    x * x * x
}

/// `d/dτ (1 - √(1-τ))³ = 3(1 - √(1-τ))² / (2√(1-τ))`.
pub fn rsw_bound_derivative(tau: f64) -> f64 {
    let s = libm::sqrt(1.0 - tau.clamp(0.0, 1.0));
    let x = tau.clamp(0.0, 1.0) / (1.0 + s);
    3.0 * x * x / (2.0 * s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RswReport {
    pub n: u32,
    pub p: f64,
    /// `P̂_p(LR(n, n))`.
    pub tau: Estimate,
    /// `P̂_p(LR(3n/2, n))`.
    pub lhs: Estimate,
    pub bound: f64,
    pub margin: f64,
    /// `√(se_lhs² + (f'(τ̂)·se_τ)²)`, the delta-method error of the margin.
    pub pooled_stderr: f64,
    pub pass: bool,
}

/// Compares `P̂_p(LR(3n/2, n))` with `(1 - √(1-τ̂))³` on bond-Z², the two
/// boxes sampled from independent streams.
pub fn rsw_check<X: Executor>(n: u32, p: f64, spec: &SamplerSpec, exec: &X) -> Result<RswReport> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::domain("rsw check needs a positive even n"));
    }
    Probability::new(p)?;
    let square = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(n, n))?;
    let rect = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(3 * n / 2, n))?;
    let tau = estimate_event(&Crossing::left_right(&square)?, square.carrier_keys(), p, &spec.labelled("square"), exec)?;
    let lhs = estimate_event(&Crossing::left_right(&rect)?, rect.carrier_keys(), p, &spec.labelled("rect"), exec)?;
    let bound = rsw_bound(tau.value);
    let margin = lhs.value - bound;
    let slope = if tau.stderr > 0.0 { rsw_bound_derivative(tau.value) * tau.stderr } else { 0.0 };
    let pooled_stderr = libm::sqrt(lhs.stderr * lhs.stderr + slope * slope);
    Ok(RswReport { n, p, tau, lhs, bound, margin, pooled_stderr, pass: margin >= -SIGMAS * pooled_stderr })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnulusRow {
    pub n: u32,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnulusScan {
    pub p: f64,
    pub rows: Vec<AnnulusRow>,
    /// `min_n (P̂(A_n) - 4·se)`.
    pub min_lower: f64,
    pub min_estimate: f64,
    /// Strictly decreasing estimates whose last step still drops by more
    /// than [`SIGMAS`] combined standard errors. A sequence that levels
    /// off after an initial lattice-scale drop does not count.
    pub decays: bool,
    /// `None` below `p = 1/2`, where the bound is not claimed.
    pub pass: Option<bool>,
}

/// `P̂_p(A_n)` for each `n` on bond-Z².
pub fn annulus_bound_scan<X: Executor>(p: f64, ns: &[u32], spec: &SamplerSpec, exec: &X) -> Result<AnnulusScan> {
    Probability::new(p)?;
    if ns.is_empty() {
        return Err(Error::domain("annulus scan needs at least one n"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let g = LatticeGraph::build_annulus(AnnulusSpec { n }, Model::BondZ2)?;
        let ev = AnnulusCircuit::new(&g)?;
        let label = alloc::format!("annulus-{n}");
        let estimate = estimate_event(&ev, g.carrier_keys(), p, &spec.labelled(&label), exec)?;
        rows.push(AnnulusRow { n, estimate });
    }
    let min_lower = rows.iter().map(|r| r.estimate.value - SIGMAS * r.estimate.stderr).fold(f64::INFINITY, f64::min);
    let min_estimate = rows.iter().map(|r| r.estimate.value).fold(f64::INFINITY, f64::min);
    let decays = decaying(&rows);
    let pass = (p >= 0.5).then_some(min_lower > 0.0 && !decays);
    Ok(AnnulusScan { p, rows, min_lower, min_estimate, decays, pass })
}

fn decaying(rows: &[AnnulusRow]) -> bool {
    let decreasing = rows.windows(2).all(|w| w[1].estimate.value < w[0].estimate.value);
    rows.len() >= 2 && decreasing && {
        let (a, b) = (rows[rows.len() - 2].estimate, rows[rows.len() - 1].estimate);
        a.value - b.value > SIGMAS * libm::hypot(a.stderr, b.stderr)
    }
}

/// Median-crossing density of `LR(n, n)` for one `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcRow {
    pub n: u32,
    pub estimate: f64,
    pub stderr: f64,
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PcEstimate {
    pub model: Model,
    pub rows: Vec<PcRow>,
    /// Estimate at the largest `n`.
    pub estimate: f64,
    pub stderr: f64,
}

/// Bisection tolerance for critical-point estimates.
pub const PC_TOLERANCE: f64 = 1.0 / (1u64 << 20) as f64;

/// For each `n`, the density where `P̂_p(LR(n, n))` crosses 1/2 under the
/// monotone coupling, found by bisection to within [`PC_TOLERANCE`].
pub fn estimate_pc<X: Executor>(model: Model, ns: &[u32], spec: &SamplerSpec, exec: &X) -> Result<PcEstimate> {
    if model.dims() != 2 {
        return Err(Error::domain("critical-point estimation uses planar crossings"));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::domain("critical-point estimation needs at least one n"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let g = LatticeGraph::build_box(model, BoxSpec::new(n, n))?;
        let ev = Crossing::left_right(&g)?;
        let label = alloc::format!("pc-{n}");
        let curve = coupled_curve(&ev, g.carrier_keys(), &spec.labelled(&label), exec)?;
        let bracket = curve.bisect(0.5, PC_TOLERANCE)?;
        let stderr = batch_stderr(&curve.batch_first_reaching(0.5));
        rows.push(PcRow { n, estimate: 0.5 * (bracket.0 + bracket.1), stderr, bracket });
    }
    let last = rows[rows.len() - 1];
    Ok(PcEstimate { model, estimate: last.estimate, stderr: last.stderr, rows })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InfluenceProfile {
    pub p: f64,
    /// Pivotality frequency of each element.
    pub per_element: Vec<Estimate>,
    /// `m̂_p`.
    pub max: f64,
    pub argmax: usize,
    /// `Σ_e Î(e)`, with the standard error of the per-replica pivotal count.
    pub total: Estimate,
}

/// Influences of an increasing event estimated as pivotality frequencies.
pub fn influence_mc<A, X>(event: &A, keys: &[u64], p: f64, spec: &SamplerSpec, exec: &X) -> Result<InfluenceProfile>
where
    A: Event + ?Sized,
    X: Executor,
{
    Probability::new(p)?;
    if spec.replicas == 0 {
        return Err(Error::domain("replica count must be positive"));
    }
    if keys.len() != event.size() {
        return Err(Error::LengthMismatch { expected: event.size(), got: keys.len() });
    }
    let per = exec.map(spec.replicas as usize, |r| {
        let omega = configuration_at(&uniforms(keys, spec.key(r as u64)), p);
        let mut out = Vec::new();
        event.pivotal_elements(&omega, &mut out);
        out
    });
    let mut counts = alloc::vec![0u64; keys.len()];
    let mut totals = Vec::with_capacity(per.len());
    for piv in &per {
        for &e in piv {
            counts[e] += 1;
        }
        totals.push(piv.len() as f64);
    }
    let per_element: Vec<Estimate> = counts.iter().map(|&c| Estimate::proportion(c, spec.replicas)).collect();
    let (argmax, max) =
        per_element.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, e)| if e.value > bv { (i, e.value) } else { (bi, bv) });
    Ok(InfluenceProfile { p, per_element, max, argmax, total: Estimate::mean(&totals, 0.0, keys.len() as f64) })
}

/// Russo's formula seen through Monte Carlo: total influence against the
/// symmetric difference quotient of the coupled curve, both from the same
/// replicas.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RussoShadow {
    pub p: f64,
    pub h: f64,
    pub total_influence: Estimate,
    pub derivative: Estimate,
    /// Mean of the paired per-replica difference.
    pub difference: Estimate,
    pub sigmas: f64,
    pub pass: bool,
}

pub fn russo_shadow<A, X>(event: &A, keys: &[u64], p: f64, h: f64, spec: &SamplerSpec, exec: &X) -> Result<RussoShadow>
where
    A: Event + ?Sized,
    X: Executor,
{
    Probability::new(p)?;
    if !(h > 0.0 && p - h >= 0.0 && p + h <= 1.0) {
        return Err(Error::domain("difference step must keep p ± h inside [0, 1]"));
    }
    if !event.declared_increasing() {
        return Err(Error::domain("russo shadow needs an increasing event"));
    }
    if spec.replicas < 2 {
        return Err(Error::domain("russo shadow needs at least two replicas"));
    }
    if keys.len() != event.size() {
        return Err(Error::LengthMismatch { expected: event.size(), got: keys.len() });
    }
    let per = exec.map(spec.replicas as usize, |r| {
        let u = uniforms(keys, spec.key(r as u64));
        let mut out = Vec::new();
        event.pivotal_elements(&configuration_at(&u, p), &mut out);
        let t = crate::montecarlo::threshold(event, &u);
        let fd = (f64::from(u8::from(t < p + h)) - f64::from(u8::from(t < p - h))) / (2.0 * h);
        (out.len() as f64, fd)
    });
    let piv: Vec<f64> = per.iter().map(|x| x.0).collect();
    let fd: Vec<f64> = per.iter().map(|x| x.1).collect();
    let diff: Vec<f64> = per.iter().map(|x| x.0 - x.1).collect();
    let inf = f64::INFINITY;
    let total_influence = Estimate::mean(&piv, 0.0, inf);
    let derivative = Estimate::mean(&fd, 0.0, inf);
    let difference = Estimate::mean(&diff, -inf, inf);
    let sigmas = 5.0;
    let pass = difference.value.abs() <= sigmas * difference.stderr;
    Ok(RussoShadow { p, h, total_influence, derivative, difference, sigmas, pass })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdWindow {
    pub family: String,
    pub n: u32,
    pub epsilon: f64,
    pub p_low: f64,
    pub p_high: f64,
    pub width: f64,
    /// Batch-means standard errors.
    pub p_low_stderr: f64,
    pub p_high_stderr: f64,
    pub width_stderr: f64,
    /// Median crossing `p₀`.
    pub p0: f64,
    /// `η̂ = m̂_{p₀}`, when measured.
    pub eta: Option<f64>,
    /// `c′` solving `ε = 1/(1 + (1/η̂)^{c′|p - p₀|})` at `p_low` and `p_high`.
    pub implied_c_low: Option<f64>,
    pub implied_c_high: Option<f64>,
}

impl ThresholdWindow {
    /// Records `η̂` and the window shape it implies.
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = Some(eta);
        let implied = |d: f64| {
            let lg = libm::log(1.0 / eta);
            (d > 0.0 && lg > 0.0 && lg.is_finite()).then(|| libm::log((1.0 - self.epsilon) / self.epsilon) / (d * lg))
        };
        self.implied_c_low = implied(self.p0 - self.p_low);
        self.implied_c_high = implied(self.p_high - self.p0);
        self
    }

    /// `self` narrower than `other` by more than `sigmas` combined errors.
    pub fn narrower_than(&self, other: &ThresholdWindow, sigmas: f64) -> bool {
        let se = libm::sqrt(self.width_stderr * self.width_stderr + other.width_stderr * other.width_stderr);
        other.width - self.width > sigmas * se
    }
}

/// Window `[p_low, p_high]` with `p_low = inf{p : P̂_p ≥ ε}` and
/// `p_high = inf{p : P̂_p ≥ 1 - ε}`.
pub fn threshold_window(curve: &CoupledCurve, family: &str, n: u32, epsilon: f64) -> Result<ThresholdWindow> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain("epsilon must lie in (0, 1/2)"));
    }
    let never = || Error::domain("curve never reaches the window level");
    let p_low = curve.first_reaching(epsilon).ok_or_else(never)?;
    let p_high = curve.first_reaching(1.0 - epsilon).ok_or_else(never)?;
    let p0 = curve.first_reaching(0.5).ok_or_else(never)?;
    let lows = curve.batch_first_reaching(epsilon);
    let highs = curve.batch_first_reaching(1.0 - epsilon);
    let widths: Vec<f64> = lows.iter().zip(&highs).map(|(l, h)| h - l).collect();
    Ok(ThresholdWindow {
        family: family.into(),
        n,
        epsilon,
        p_low,
        p_high,
        width: p_high - p_low,
        p_low_stderr: batch_stderr(&lows),
        p_high_stderr: batch_stderr(&highs),
        width_stderr: batch_stderr(&widths),
        p0,
        eta: None,
        implied_c_low: None,
        implied_c_high: None,
    })
}

/// Window of `LR(n, n)` on bond-Z² with its coupled curve; `η̂` is
/// measured from `eta_replicas` replicas at `p₀` (skipped when zero).
pub fn lr_window<X: Executor>(
    n: u32,
    epsilon: f64,
    spec: &SamplerSpec,
    eta_replicas: u64,
    exec: &X,
) -> Result<(ThresholdWindow, CoupledCurve)> {
    let g = LatticeGraph::build_box(Model::BondZ2, BoxSpec::new(n, n))?;
    let ev = Crossing::left_right(&g)?;
    let sub = spec.labelled(&alloc::format!("window-{n}"));
    let curve = coupled_curve(&ev, g.carrier_keys(), &sub, exec)?;
    let mut w = threshold_window(&curve, "lr", n, epsilon)?;
    if eta_replicas > 0 {
        let prof = influence_mc(&ev, g.carrier_keys(), w.p0, &SamplerSpec::new(sub.master_seed ^ 1, eta_replicas), exec)?;
        w = w.with_eta(prof.max);
    }
    Ok((w, curve))
}

pub fn lr_windows<X: Executor>(ns: &[u32], epsilon: f64, spec: &SamplerSpec, eta_replicas: u64, exec: &X) -> Result<Vec<ThresholdWindow>> {
    ns.iter().map(|&n| lr_window(n, epsilon, spec, eta_replicas, exec).map(|x| x.0)).collect()
}

/// Window of the dictator on `n` elements. Its curve is `p` itself, so
/// the width is `1 - 2ε` up to sampling error.
pub fn dictator_window<X: Executor>(n: usize, epsilon: f64, spec: &SamplerSpec, exec: &X) -> Result<(ThresholdWindow, CoupledCurve)> {
    let ev = Dictator { size: n, element: 0 };
    let sub = spec.labelled(&alloc::format!("dictator-{n}"));
    let curve = coupled_curve(&ev, &index_keys(n), &sub, exec)?;
    let w = threshold_window(&curve, "dictator", n as u32, epsilon)?;
    Ok((w, curve))
}

/// Evaluation points of a sweep table: 41 uniform points on `[0, 1]` plus
/// 20 points refining `[p₀ - 0.05, p₀ + 0.05]`.
pub fn sweep_points(curve: &CoupledCurve) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
    if let Some(p0) = curve.first_reaching(0.5) {
        let lo = (p0 - 0.05).max(0.0);
        let hi = (p0 + 0.05).min(1.0);
        pts.extend((0..20).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / 20.0));
    }
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TalagrandReport {
    pub p: f64,
    pub total: f64,
    pub probability: f64,
    pub max_influence: f64,
    /// `total / (P(1-P) ln(1/m))`.
    pub ratio: f64,
    pub method: IntervalMethod,
}

/// `Σ_e I(e) / (P(1-P) ln(1/m))`. Undefined at `P ∈ {0, 1}` and `m ∈ {0, 1}`.
pub fn talagrand_ratio(total: f64, probability: f64, max_influence: f64) -> Result<f64> {
    if probability <= 0.0 || probability >= 1.0 {
        return Err(Error::Undefined("event probability is 0 or 1"));
    }
    if max_influence <= 0.0 || max_influence >= 1.0 {
        return Err(Error::Undefined("maximal influence is 0 or 1"));
    }
    Ok(total / (probability * (1.0 - probability) * libm::log(1.0 / max_influence)))
}

/// The ratio from exact influences, by enumeration.
pub fn talagrand_exact<A, X>(event: &A, p: f64, cap: usize, exec: &X) -> Result<TalagrandReport>
where
    A: Event + ?Sized,
    X: Executor,
{
    Probability::new(p)?;
    let table = TruthTable::enumerate(event, cap, exec)?;
    let mut total = 0.0;
    let mut max_influence: f64 = 0.0;
    for e in 0..table.n() {
        let i = table.influence(e, p)?;
        total += i;
        max_influence = max_influence.max(i);
    }
    let probability = table.event_polynomial().eval(p);
    let ratio = talagrand_ratio(total, probability, max_influence)?;
    Ok(TalagrandReport { p, total, probability, max_influence, ratio, method: IntervalMethod::Exact })
}

/// The ratio from Monte Carlo influences and event probability.
pub fn talagrand_mc<A, X>(event: &A, keys: &[u64], p: f64, spec: &SamplerSpec, exec: &X) -> Result<TalagrandReport>
where
    A: Event + ?Sized,
    X: Executor,
{
    let prof = influence_mc(event, keys, p, spec, exec)?;
    let prob = estimate_event(event, keys, p, spec, exec)?;
    let ratio = talagrand_ratio(prof.total.value, prob.value, prof.max)?;
    Ok(TalagrandReport {
        p,
        total: prof.total.value,
        probability: prob.value,
        max_influence: prof.max,
        ratio,
        method: IntervalMethod::Normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{Dictator, Threshold};
    use crate::exec::Sequential;
    use crate::montecarlo::index_keys;

    #[test]
    fn bound_reference_values() {
        // High-precision references computed independently.
        let refs = [(0.0, 0.0), (0.25, 0.002_404_735_808_355_074_6), (0.5, 0.025_126_265_847_083_665), (0.75, 0.125), (1.0, 1.0)];
        for (tau, want) in refs {
            assert!((rsw_bound(tau) - want).abs() < 1e-12, "tau = {tau}");
        }
        let h = 1e-6;
        let fd = (rsw_bound(0.5 + h) - rsw_bound(0.5 - h)) / (2.0 * h);
        assert!((rsw_bound_derivative(0.5) - fd).abs() < 1e-8);
    }

    #[test]
    fn rsw_extremes() {
        let spec = SamplerSpec::new(1, 20);
        let one = rsw_check(4, 1.0, &spec, &Sequential).unwrap();
        assert_eq!((one.tau.value, one.bound, one.lhs.value, one.margin), (1.0, 1.0, 1.0, 0.0));
        assert!(one.pass);
        let zero = rsw_check(4, 0.0, &spec, &Sequential).unwrap();
        assert_eq!((zero.tau.value, zero.bound, zero.lhs.value, zero.margin), (0.0, 0.0, 0.0, 0.0));
        assert!(rsw_check(3, 0.5, &spec, &Sequential).is_err());
    }

    #[test]
    fn annulus_scan_extremes() {
        let spec = SamplerSpec::new(2, 10);
        let row = |n, v, se| AnnulusRow { n, estimate: Estimate::normal(v, se, 100, 0.0, 1.0) };
        assert!(decaying(&[row(1, 0.4, 0.01), row(2, 0.2, 0.01), row(4, 0.1, 0.01)]));
        assert!(!decaying(&[row(1, 0.4, 0.01), row(2, 0.2, 0.01), row(4, 0.19, 0.01)]));
        assert!(!decaying(&[row(1, 0.4, 0.01), row(2, 0.41, 0.01)]));
        let s = annulus_bound_scan(1.0, &[1, 2], &spec, &Sequential).unwrap();
        assert!(s.rows.iter().all(|r| r.estimate.value == 1.0));
        assert_eq!(s.pass, Some(true));
        let low = annulus_bound_scan(0.4, &[1], &spec, &Sequential).unwrap();
        assert_eq!(low.pass, None);
    }

    #[test]
    fn talagrand_cases() {
        let r = talagrand_exact(&Threshold::majority3(), 0.5, 24, &Sequential).unwrap();
        assert!((r.ratio - 8.656_170_245_333_781).abs() < 1e-12);
        assert!(matches!(talagrand_exact(&Dictator { size: 3, element: 0 }, 0.5, 24, &Sequential), Err(Error::Undefined(_))));
        assert!(talagrand_ratio(1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn influence_mc_simple_events() {
        let spec = SamplerSpec::new(8, 4000);
        let d = influence_mc(&Dictator { size: 3, element: 1 }, &index_keys(3), 0.3, &spec, &Sequential).unwrap();
        assert_eq!(d.per_element[1].value, 1.0);
        assert_eq!(d.per_element[0].value, 0.0);
        assert_eq!((d.argmax, d.max), (1, 1.0));
        let m = influence_mc(&Threshold::majority3(), &index_keys(3), 0.5, &spec, &Sequential).unwrap();
        for e in &m.per_element {
            assert!((e.value - 0.5).abs() < 4.0 * e.stderr);
        }
        assert!(m.max <= m.total.value);
    }

    #[test]
    fn window_of_dictator() {
        let d = Dictator { size: 2, element: 0 };
        let curve = coupled_curve(&d, &index_keys(2), &SamplerSpec::new(3, 10_000), &Sequential).unwrap();
        let w = threshold_window(&curve, "dictator", 2, 0.1).unwrap();
        assert!((w.width - 0.8).abs() < 0.04);
        assert!(w.p_low <= w.p0 && w.p0 <= w.p_high);
        let narrow = threshold_window(&curve, "dictator", 2, 0.4999).unwrap();
        assert!(narrow.width < 0.01);
        assert!(threshold_window(&curve, "dictator", 2, 0.5).is_err());
        assert!(threshold_window(&curve, "dictator", 2, 0.0).is_err());
        let w = w.with_eta(0.5);
        assert!(w.implied_c_low.unwrap() > 0.0);
    }

    #[test]
    fn sweep_grid_contains_uniform_points() {
        let curve = CoupledCurve::from_thresholds(alloc::vec![0.3, 0.5, 0.7]);
        let pts = sweep_points(&curve);
        assert!(pts.len() > 41);
        assert!(pts.contains(&0.0) && pts.contains(&1.0) && pts.contains(&0.475));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}
