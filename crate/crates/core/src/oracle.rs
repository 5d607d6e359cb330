//! Exhaustive enumeration oracle.
//!
//! For small ground sets the indicator of an event is tabulated over all
//! `2^n` configurations. Event probabilities, pivotality and influence
//! polynomials are then exact integer count vectors, and Russo's formula
//! `d/dp P_p(A) = Σ_e P_p(e pivotal)` becomes a polynomial identity checked
//! coefficient by coefficient.

use alloc::vec::Vec;

use crate::config::Configuration;
use crate::cube::Event;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::poly::{bernstein_eval, DensePolynomial, EventPolynomial};

/// Default largest ground set the oracle will enumerate (2^24 configurations).
pub const DEFAULT_CAP: usize = 24;

const CHUNK_BITS: u32 = 16;

/// Indicator of an event over every configuration, indexed by bit mask
/// (element `i` ↔ bit `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    /// Tabulates `event`; the work is split into contiguous index ranges
    /// and merged in range order.
    pub fn enumerate<A, X>(event: &A, cap: usize, exec: &X) -> Result<Self>
    where
        A: Event + ?Sized,
        X: Executor,
    {
        let n = event.size();
        if n > cap || n > 40 {
            return Err(Error::CapExceeded { size: n, cap: cap.min(40) });
        }
        let total = 1u64 << n;
        let chunk = 1u64 << CHUNK_BITS.min(n as u32);
        let chunks = (total / chunk) as usize;
        let parts = exec.map(chunks, |c| {
            let start = c as u64 * chunk;
            let mut omega = Configuration::closed(n);
            let mut words = alloc::vec![0u64; (chunk as usize).div_ceil(64)];
            for off in 0..chunk {
                omega.set_mask(start + off);
                if event.occurs(&omega) {
                    words[(off / 64) as usize] |= 1 << (off % 64);
                }
            }
            words
        });
        let mut words = Vec::with_capacity((total as usize).div_ceil(64));
        for p in parts {
            words.extend(p);
        }
        Ok(TruthTable { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, mask: u64) -> bool {
        self.words[(mask / 64) as usize] >> (mask % 64) & 1 == 1
    }

    fn check(&self, e: usize) -> Result<()> {
        if e < self.n {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { element: e, size: self.n })
        }
    }

    pub fn event_polynomial(&self) -> EventPolynomial {
        let mut counts = alloc::vec![0u64; self.n + 1];
        for mask in 0..(1u64 << self.n) {
            if self.get(mask) {
                counts[mask.count_ones() as usize] += 1;
            }
        }
        EventPolynomial { n: self.n, counts }
    }

    /// Counts over the other `n-1` elements, by number open, of the
    /// configurations where `pred(1_A(ω_e), 1_A(ω^e))` holds.
    fn flip_counts(&self, e: usize, pred: impl Fn(bool, bool) -> bool) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.n];
        let bit = 1u64 << e;
        for mask in 0..(1u64 << self.n) {
            if mask & bit != 0 {
                continue;
            }
            if pred(self.get(mask), self.get(mask | bit)) {
                counts[mask.count_ones() as usize] += 1;
            }
        }
        counts
    }

    /// Counts of configurations of `E \ {e}` at which `e` is pivotal.
    pub fn pivotal_counts(&self, e: usize) -> Result<Vec<u64>> {
        self.check(e)?;
        Ok(self.flip_counts(e, |down, up| !down && up))
    }

    /// Counts of configurations of `E \ {e}` with `1_A(ω_e) ≠ 1_A(ω^e)`.
    pub fn influence_counts(&self, e: usize) -> Result<Vec<u64>> {
        self.check(e)?;
        Ok(self.flip_counts(e, |down, up| down != up))
    }

    /// `P_p(e is pivotal for A)` as an exact polynomial.
    pub fn pivotal_polynomial(&self, e: usize) -> Result<DensePolynomial> {
        DensePolynomial::from_bernstein(self.n - 1, &self.pivotal_counts(e)?)
    }

    /// `I_{A,p}(e) = P_p(1_A(ω_e) ≠ 1_A(ω^e))`.
    pub fn influence(&self, e: usize, p: f64) -> Result<f64> {
        let counts = self.influence_counts(e)?;
        Ok(bernstein_eval(self.n - 1, &counts, p))
    }

    /// First single-flip violation of monotonicity, if any.
    pub fn monotonicity_violation(&self) -> Option<(u64, u64)> {
        for mask in 0..(1u64 << self.n) {
            if !self.get(mask) {
                continue;
            }
            for e in 0..self.n {
                let up = mask | 1 << e;
                if up != mask && !self.get(up) {
                    return Some((mask, up));
                }
            }
        }
        None
    }

    /// Russo's formula as an exact polynomial identity.
    pub fn verify_russo(&self) -> Result<RussoReport> {
        if let Some((lo, hi)) = self.monotonicity_violation() {
            return Err(Error::NotIncreasing {
                lower: alloc::string::ToString::to_string(&Configuration::from_mask(self.n, lo)),
                upper: alloc::string::ToString::to_string(&Configuration::from_mask(self.n, hi)),
            });
        }
        let derivative = self.event_polynomial().to_dense()?.derivative();
        let pivotal = (0..self.n).map(|e| self.pivotal_polynomial(e)).collect::<Result<Vec<_>>>()?;
        let pivotal_sum = pivotal.iter().fold(DensePolynomial::zero(), |acc, q| &acc + q);
        Ok(RussoReport { n: self.n, equal: derivative == pivotal_sum, derivative, pivotal_sum, pivotal })
    }
}

/// Both sides of Russo's formula.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RussoReport {
    pub n: usize,
    /// `d/dp P_p(A)`.
    pub derivative: DensePolynomial,
    /// `Σ_e P_p(e pivotal)`.
    pub pivotal_sum: DensePolynomial,
    pub pivotal: Vec<DensePolynomial>,
    pub equal: bool,
}

pub fn event_polynomial<A: Event + ?Sized, X: Executor>(event: &A, cap: usize, exec: &X) -> Result<EventPolynomial> {
    Ok(TruthTable::enumerate(event, cap, exec)?.event_polynomial())
}

pub fn pivotal_polynomial<A: Event + ?Sized, X: Executor>(event: &A, e: usize, cap: usize, exec: &X) -> Result<DensePolynomial> {
    TruthTable::enumerate(event, cap, exec)?.pivotal_polynomial(e)
}

/// Fails with [`Error::NotIncreasing`] when the event is not increasing,
/// since the formula's hypothesis does not hold.
pub fn verify_russo<A: Event + ?Sized, X: Executor>(event: &A, cap: usize, exec: &X) -> Result<RussoReport> {
    TruthTable::enumerate(event, cap, exec)?.verify_russo()
}

pub fn influence_exact<A: Event + ?Sized, X: Executor>(event: &A, e: usize, p: f64, cap: usize, exec: &X) -> Result<f64> {
    crate::config::Probability::new(p)?;
    TruthTable::enumerate(event, cap, exec)?.influence(e, p)
}

/// True when `poly(k/grid) >= 0` for every `k = 0..=grid`, evaluated exactly.
pub fn nonnegative_on_grid(poly: &DensePolynomial, grid: i64) -> bool {
    use num_traits::Signed;
    (0..=grid).all(|k| !poly.eval_ratio(k, grid).is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{Dictator, Empty, Full, Parity, Threshold};
    use crate::exec::Sequential;
    use crate::poly::ratio;

    #[test]
    fn empty_and_full() {
        let e = event_polynomial(&Empty { size: 5 }, DEFAULT_CAP, &Sequential).unwrap();
        assert!(e.counts.iter().all(|&c| c == 0));
        assert!(e.to_dense().unwrap().is_zero());
        let f = event_polynomial(&Full { size: 5 }, DEFAULT_CAP, &Sequential).unwrap();
        assert_eq!(f.counts, alloc::vec![1, 5, 10, 10, 5, 1]);
        assert_eq!(f.total(), 32);
        assert_eq!(f.to_dense().unwrap(), DensePolynomial::constant(1));
    }

    #[test]
    fn single_dictator() {
        let ep = event_polynomial(&Dictator { size: 1, element: 0 }, DEFAULT_CAP, &Sequential).unwrap();
        assert_eq!(ep.counts, alloc::vec![0, 1]);
        assert_eq!(ep.to_dense().unwrap().coeffs(), &[0, 1]);
    }

    #[test]
    fn dictator_pivotal_polynomials() {
        let d = Dictator { size: 3, element: 0 };
        assert_eq!(pivotal_polynomial(&d, 0, DEFAULT_CAP, &Sequential).unwrap(), DensePolynomial::constant(1));
        assert!(pivotal_polynomial(&d, 2, DEFAULT_CAP, &Sequential).unwrap().is_zero());
        assert!(pivotal_polynomial(&d, 3, DEFAULT_CAP, &Sequential).is_err());
    }

    #[test]
    fn majority_pivotal_is_two_p_q() {
        let maj = Threshold::majority3();
        for e in 0..3 {
            let poly = pivotal_polynomial(&maj, e, DEFAULT_CAP, &Sequential).unwrap();
            // 2p(1-p) = 2p - 2p²
            assert_eq!(poly.coeffs(), &[0, 2, -2]);
        }
    }

    #[test]
    fn russo_for_majority() {
        let report = verify_russo(&Threshold::majority3(), DEFAULT_CAP, &Sequential).unwrap();
        assert!(report.equal);
        assert_eq!(report.derivative.coeffs(), &[0, 6, -6]);
    }

    #[test]
    fn russo_rejects_parity() {
        assert!(matches!(verify_russo(&Parity { size: 3 }, DEFAULT_CAP, &Sequential), Err(Error::NotIncreasing { .. })));
    }

    #[test]
    fn influences() {
        let maj = Threshold::majority3();
        assert!((influence_exact(&maj, 1, 0.5, DEFAULT_CAP, &Sequential).unwrap() - 0.5).abs() < 1e-15);
        for e in 0..3 {
            assert!((influence_exact(&Parity { size: 3 }, e, 0.5, DEFAULT_CAP, &Sequential).unwrap() - 1.0).abs() < 1e-15);
        }
        let d = Dictator { size: 2, element: 1 };
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(influence_exact(&d, 1, p, DEFAULT_CAP, &Sequential).unwrap(), 1.0);
        }
        assert!(influence_exact(&d, 0, 1.2, DEFAULT_CAP, &Sequential).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let err = event_polynomial(&Full { size: 25 }, DEFAULT_CAP, &Sequential).unwrap_err();
        assert_eq!(err, Error::CapExceeded { size: 25, cap: 24 });
        assert!(event_polynomial(&Full { size: 12 }, 10, &Sequential).is_err());
    }

    #[test]
    fn grid_nonnegativity() {
        let d = DensePolynomial::from_coeffs(alloc::vec![0, 6, -6]);
        assert!(nonnegative_on_grid(&d, 40));
        let neg = DensePolynomial::from_coeffs(alloc::vec![-1, 2]);
        assert!(!nonnegative_on_grid(&neg, 40));
        assert_eq!(d.eval_ratio(1, 2), ratio(3, 2));
    }
}
