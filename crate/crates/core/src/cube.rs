//! The product space `{0,1}^E`: events, flips and pivotality.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// An event `A ⊆ {0,1}^E` given by its indicator.
///
/// `declared_increasing` is a claim, not a proof; [`check_increasing`]
/// tests it. Implementations must be re-entrant since estimators evaluate
/// the same event from many workers.
pub trait Event: Sync {
    /// `|E|`.
    fn size(&self) -> usize;

    fn occurs(&self, omega: &Configuration) -> bool;

    fn declared_increasing(&self) -> bool {
        true
    }

    /// Writes into `out` the elements pivotal for the event at `omega`.
    ///
    /// The default re-evaluates the event once per candidate element.
    /// Geometric events override this with a single-pass computation.
    fn pivotal_elements(&self, omega: &Configuration, out: &mut Vec<usize>) {
        naive_pivotal_elements(self, omega, out);
    }
}

impl<E: Event + ?Sized> Event for &E {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        (**self).occurs(omega)
    }
    fn declared_increasing(&self) -> bool {
        (**self).declared_increasing()
    }
    fn pivotal_elements(&self, omega: &Configuration, out: &mut Vec<usize>) {
        (**self).pivotal_elements(omega, out)
    }
}

/// Pivotal elements by direct re-evaluation of `ω_e` and `ω^e`.
pub fn naive_pivotal_elements<A: Event + ?Sized>(event: &A, omega: &Configuration, out: &mut Vec<usize>) {
    out.clear();
    let here = event.occurs(omega);
    let mut scratch = omega.clone();
    for e in 0..omega.len() {
        let open = omega.get(e);
        if event.declared_increasing() {
            // For increasing A one of ω_e, ω^e is ω itself.
            if here == open {
                scratch.set(e, !open);
                if event.occurs(&scratch) != here {
                    out.push(e);
                }
                scratch.set(e, open);
            }
        } else {
            scratch.set(e, false);
            let down = event.occurs(&scratch);
            scratch.set(e, true);
            let up = event.occurs(&scratch);
            scratch.set(e, open);
            if !down && up {
                out.push(e);
            }
        }
    }
}

/// Event given by a closure.
pub struct MonotoneEvent<F> {
    name: String,
    size: usize,
    increasing: bool,
    predicate: F,
}

impl<F> MonotoneEvent<F>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    pub fn new(name: &str, size: usize, declared_increasing: bool, predicate: F) -> Self {
        MonotoneEvent { name: name.to_string(), size, increasing: declared_increasing, predicate }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl<F> Event for MonotoneEvent<F>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        (self.predicate)(omega)
    }
    fn declared_increasing(&self) -> bool {
        self.increasing
    }
}

/// `{ω : ω(element) = 1}`.
#[derive(Clone, Copy, Debug)]
pub struct Dictator {
    pub size: usize,
    pub element: usize,
}

impl Event for Dictator {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        omega.get(self.element)
    }
    fn pivotal_elements(&self, _omega: &Configuration, out: &mut Vec<usize>) {
        out.clear();
        out.push(self.element);
    }
}

/// At least `k` open elements. `Threshold { size: 3, k: 2 }` is majority-of-3.
#[derive(Clone, Copy, Debug)]
pub struct Threshold {
    pub size: usize,
    pub k: usize,
}

impl Threshold {
    pub fn majority3() -> Self {
        Threshold { size: 3, k: 2 }
    }
}

impl Event for Threshold {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        omega.count_open() >= self.k
    }
}

/// Odd number of open elements. Not increasing.
#[derive(Clone, Copy, Debug)]
pub struct Parity {
    pub size: usize,
}

impl Event for Parity {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        omega.count_open() % 2 == 1
    }
    fn declared_increasing(&self) -> bool {
        false
    }
}

/// The whole space `Ω`.
#[derive(Clone, Copy, Debug)]
pub struct Full {
    pub size: usize,
}

impl Event for Full {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, _omega: &Configuration) -> bool {
        true
    }
}

/// The empty event.
#[derive(Clone, Copy, Debug)]
pub struct Empty {
    pub size: usize,
}

impl Event for Empty {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, _omega: &Configuration) -> bool {
        false
    }
}

/// Complement `Aᶜ`; decreasing whenever `A` is increasing.
pub struct Complement<A>(pub A);

impl<A: Event> Event for Complement<A> {
    fn size(&self) -> usize {
        self.0.size()
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        !self.0.occurs(omega)
    }
    fn declared_increasing(&self) -> bool {
        false
    }
}

/// Up-closure of a set of generators: `ω ∈ A` iff `ω ≥ g` for some generator.
#[derive(Clone, Debug)]
pub struct UpClosure {
    size: usize,
    generators: Vec<Configuration>,
}

impl UpClosure {
    pub fn new(size: usize, generators: Vec<Configuration>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != size) {
            return Err(Error::LengthMismatch { expected: size, got: g.len() });
        }
        Ok(UpClosure { size, generators })
    }

    /// Up-closure of `m` uniformly random configurations on `size` elements.
    pub fn random(size: usize, m: usize, key: StreamKey) -> Self {
        let mut rng = key.rng();
        let generators = (0..m)
            .map(|_| {
                // Random density per generator so both sparse and dense
                // generators appear.
                let q = rng.next_f64();
                let bits: Vec<bool> = (0..size).map(|_| rng.next_f64() < q).collect();
                Configuration::from_bits(&bits)
            })
            .collect();
        UpClosure { size, generators }
    }

    pub fn generators(&self) -> &[Configuration] {
        &self.generators
    }
}

impl Event for UpClosure {
    fn size(&self) -> usize {
        self.size
    }
    fn occurs(&self, omega: &Configuration) -> bool {
        self.generators.iter().any(|g| g.le(omega))
    }
}

fn check_len<A: Event + ?Sized>(event: &A, omega: &Configuration) -> Result<()> {
    if omega.len() == event.size() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: event.size(), got: omega.len() })
    }
}

/// `e` is pivotal for `A` at `ω` iff `ω_e ∉ A` and `ω^e ∈ A`.
pub fn is_pivotal<A: Event + ?Sized>(event: &A, omega: &Configuration, e: usize) -> Result<bool> {
    check_len(event, omega)?;
    let down = omega.flip_down(e)?;
    let up = omega.flip_up(e)?;
    Ok(!event.occurs(&down) && event.occurs(&up))
}

/// Outcome of [`check_increasing`].
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityCheck {
    pub increasing: bool,
    pub exhaustive: bool,
    pub probes: usize,
    /// `(ω, ω^e)` with `ω ∈ A` and `ω^e ∉ A`.
    pub counterexample: Option<(Configuration, Configuration)>,
}

impl MonotonicityCheck {
    pub fn into_result(self) -> Result<()> {
        match self.counterexample {
            None => Ok(()),
            Some((lower, upper)) => Err(Error::NotIncreasing { lower: lower.to_string(), upper: upper.to_string() }),
        }
    }
}

/// Contract test for monotonicity.
///
/// Exhaustive over all single-flip pairs when `2^|E| <= budget`; otherwise
/// `budget` random single-flip probes at random densities. Single flips
/// suffice: the order on `{0,1}^E` is generated by them.
pub fn check_increasing<A: Event + ?Sized>(event: &A, budget: usize, seed: u64) -> Result<MonotonicityCheck> {
    if budget == 0 {
        return Err(Error::domain("monotonicity budget must be at least 1"));
    }
    let n = event.size();
    let exhaustive = n < 63 && (1usize << n) <= budget;
    if exhaustive {
        let table = truth_table_seq(event);
        let mut probes = 0;
        for mask in 0..(1u64 << n) {
            if !table[mask as usize] {
                continue;
            }
            for e in 0..n {
                if mask >> e & 1 == 0 {
                    probes += 1;
                    let up = mask | 1 << e;
                    if !table[up as usize] {
                        return Ok(MonotonicityCheck {
                            increasing: false,
                            exhaustive,
                            probes,
                            counterexample: Some((Configuration::from_mask(n, mask), Configuration::from_mask(n, up))),
                        });
                    }
                }
            }
        }
        return Ok(MonotonicityCheck { increasing: true, exhaustive, probes, counterexample: None });
    }

    let mut rng = StreamKey::new(seed, 0).rng();
    let mut omega = Configuration::closed(n);
    for probe in 0..budget {
        let q = rng.next_f64();
        for i in 0..n {
            omega.set(i, rng.next_f64() < q);
        }
        let e = rng.below(n as u64) as usize;
        omega.set(e, false);
        if event.occurs(&omega) {
            let up = omega.flip_up(e)?;
            if !event.occurs(&up) {
                return Ok(MonotonicityCheck { increasing: false, exhaustive, probes: probe + 1, counterexample: Some((omega, up)) });
            }
        }
    }
    Ok(MonotonicityCheck { increasing: true, exhaustive, probes: budget, counterexample: None })
}

fn truth_table_seq<A: Event + ?Sized>(event: &A) -> Vec<bool> {
    let n = event.size();
    let mut omega = Configuration::closed(n);
    let mut table = vec![false; 1 << n];
    for (mask, slot) in table.iter_mut().enumerate() {
        omega.set_mask(mask as u64);
        *slot = event.occurs(&omega);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_configs(n: usize) -> impl Iterator<Item = Configuration> {
        (0..1u64 << n).map(move |m| Configuration::from_mask(n, m))
    }

    #[test]
    fn dictator_pivotality() {
        let d = Dictator { size: 4, element: 1 };
        for omega in all_configs(4) {
            assert!(is_pivotal(&d, &omega, 1).unwrap());
            for e in [0, 2, 3] {
                assert!(!is_pivotal(&d, &omega, e).unwrap());
            }
        }
    }

    #[test]
    fn full_event_has_no_pivotal_elements() {
        let full = Full { size: 3 };
        for omega in all_configs(3) {
            for e in 0..3 {
                assert!(!is_pivotal(&full, &omega, e).unwrap());
            }
        }
    }

    #[test]
    fn majority_example() {
        let maj = Threshold::majority3();
        let omega = Configuration::from_bits(&[true, false, false]);
        assert!(is_pivotal(&maj, &omega, 1).unwrap());
        // element 0 is open; ω_0 = 000 ∉ A, ω^0 = 100 ∉ A
        assert!(!is_pivotal(&maj, &omega, 0).unwrap());
    }

    #[test]
    fn pivotal_requires_matching_length() {
        let maj = Threshold::majority3();
        assert!(matches!(is_pivotal(&maj, &Configuration::closed(4), 0), Err(Error::LengthMismatch { .. })));
        assert!(is_pivotal(&maj, &Configuration::closed(3), 3).is_err());
    }

    #[test]
    fn check_increasing_accepts_monotone_events() {
        assert!(check_increasing(&Dictator { size: 5, element: 2 }, 1 << 10, 0).unwrap().increasing);
        assert!(check_increasing(&Empty { size: 5 }, 1, 0).unwrap().increasing);
        assert!(check_increasing(&Empty { size: 5 }, 1 << 10, 0).unwrap().increasing);
        assert!(check_increasing(&Threshold::majority3(), 8, 0).unwrap().exhaustive);
    }

    #[test]
    fn parity_fails_with_explicit_pair() {
        let check = check_increasing(&Parity { size: 3 }, 8, 0).unwrap();
        assert!(check.exhaustive);
        assert!(!check.increasing);
        let (lo, hi) = check.counterexample.clone().unwrap();
        assert!(lo.le(&hi));
        assert_eq!(lo.hamming(&hi), 1);
        assert!(Parity { size: 3 }.occurs(&lo));
        assert!(!Parity { size: 3 }.occurs(&hi));
        assert!(check.into_result().is_err());
    }

    #[test]
    fn randomized_probes_catch_parity() {
        let check = check_increasing(&Parity { size: 40 }, 1000, 7).unwrap();
        assert!(!check.exhaustive);
        assert!(!check.increasing);
    }

    #[test]
    fn naive_pivotal_matches_definition() {
        let events: Vec<alloc::boxed::Box<dyn Event>> = vec![
            alloc::boxed::Box::new(Threshold::majority3()),
            alloc::boxed::Box::new(Parity { size: 3 }),
            alloc::boxed::Box::new(UpClosure::random(3, 2, StreamKey::new(1, 1))),
        ];
        let mut out = Vec::new();
        for ev in &events {
            for omega in all_configs(3) {
                ev.pivotal_elements(&omega, &mut out);
                let expected: Vec<usize> = (0..3).filter(|&e| is_pivotal(ev.as_ref(), &omega, e).unwrap()).collect();
                assert_eq!(out, expected);
            }
        }
    }

    #[test]
    fn exhaustive_check_classifies_every_small_event() {
        // All 2^(2^3) = 256 predicates on 3 elements; compare against a direct
        // pairwise definition of monotonicity.
        for truth in 0u32..256 {
            let ev = MonotoneEvent::new("t", 3, true, move |w: &Configuration| truth >> w.mask() & 1 == 1);
            let direct = (0..8u64).all(|a| (0..8u64).all(|b| a & !b != 0 || truth >> a & 1 == 0 || truth >> b & 1 == 1));
            assert_eq!(check_increasing(&ev, 8, 0).unwrap().increasing, direct, "truth table {truth:08b}");
        }
    }
}
