//! Exact polynomials in `p`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

fn overflow() -> Error {
    Error::domain("polynomial coefficient overflow")
}

/// Univariate polynomial with integer coefficients in ascending degree.
/// Trailing zero coefficients are trimmed, so equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DensePolynomial {
    coeffs: Vec<i128>,
}

impl DensePolynomial {
    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: i128) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    /// Expands `Σ_k counts[k] p^k (1-p)^(n-k)` into the power basis.
    pub fn from_bernstein(n: usize, counts: &[u64]) -> Result<Self> {
        if counts.len() != n + 1 {
            return Err(Error::domain("count vector must have n + 1 entries"));
        }
        let mut coeffs = vec![0i128; n + 1];
        for (k, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let count = i128::from(count);
            // p^k (1-p)^(n-k) = Σ_i C(n-k, i) (-1)^i p^(k+i)
            for i in 0..=(n - k) {
                let term = count.checked_mul(binomial(n - k, i)).ok_or_else(overflow)?;
                let slot = &mut coeffs[k + i];
                *slot = if i % 2 == 0 { slot.checked_add(term) } else { slot.checked_sub(term) }.ok_or_else(overflow)?;
            }
        }
        Ok(Self::from_coeffs(coeffs))
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().enumerate().skip(1).map(|(j, &c)| c * j as i128).collect())
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, p: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * p + BigRational::from_integer(BigInt::from(*c));
        }
        acc
    }

    /// Exact value at `num / den`.
    pub fn eval_ratio(&self, num: i64, den: i64) -> BigRational {
        self.eval_exact(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Horner evaluation in floating point. Alternating power-basis
    /// coefficients lose precision for high degree; identity checks use
    /// [`Self::eval_exact`].
    pub fn eval_f64(&self, p: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c as f64)
    }
}

impl Add for &DensePolynomial {
    type Output = DensePolynomial;

    fn add(self, rhs: &DensePolynomial) -> DensePolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeffs.get(i).copied().unwrap_or(0) + rhs.coeffs.get(i).copied().unwrap_or(0)).collect();
        DensePolynomial::from_coeffs(coeffs)
    }
}

impl Add for DensePolynomial {
    type Output = DensePolynomial;

    fn add(self, rhs: DensePolynomial) -> DensePolynomial {
        &self + &rhs
    }
}

/// `p ↦ P_p(A)` stored as counts: `counts[k]` is the number of
/// configurations in `A` with exactly `k` open elements.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EventPolynomial {
    pub n: usize,
    pub counts: Vec<u64>,
}

impl EventPolynomial {
    pub fn new(n: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n + 1 {
            return Err(Error::domain("count vector must have n + 1 entries"));
        }
        if counts.iter().enumerate().any(|(k, &c)| i128::from(c) > binomial(n, k)) {
            return Err(Error::domain("count exceeds binomial coefficient"));
        }
        Ok(EventPolynomial { n, counts })
    }

    /// Number of configurations in the event.
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| u128::from(c)).sum()
    }

    /// `P_p(A)` by the Bernstein sum; every term is non-negative so the
    /// floating evaluation is stable.
    pub fn eval(&self, p: f64) -> f64 {
        bernstein_eval(self.n, &self.counts, p)
    }

    pub fn to_dense(&self) -> Result<DensePolynomial> {
        DensePolynomial::from_bernstein(self.n, &self.counts)
    }

    pub fn complement(&self) -> EventPolynomial {
        let counts = self.counts.iter().enumerate().map(|(k, &c)| binomial(self.n, k) as u64 - c).collect();
        EventPolynomial { n: self.n, counts }
    }
}

/// `Σ_k counts[k] p^k (1-p)^(n-k)`.
pub fn bernstein_eval(n: usize, counts: &[u64], p: f64) -> f64 {
    let q = 1.0 - p;
    counts.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| c as f64 * libm::pow(p, k as f64) * libm::pow(q, (n - k) as f64)).sum()
}

/// `p` as a rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
