//! Ground sets, configurations `ω ∈ {0,1}^E` and the density parameter.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Finite, indexed ground set `E`. Element `i` carries `labels[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    /// Ground set `{0, .., size-1}` labelled `e0, e1, ...`.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::domain("ground set must have at least one element"));
        }
        Ok(GroundSet { labels: (0..size).map(|i| format!("e{i}")).collect() })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::domain("ground set must have at least one element"));
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("ground set labels must be distinct"));
        }
        Ok(GroundSet { labels })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, element: usize) -> Option<&str> {
        self.labels.get(element).map(String::as_str)
    }

    pub fn check(&self, element: usize) -> Result<()> {
        if element < self.size() {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { element, size: self.size() })
        }
    }
}

/// Density `p ∈ [0, 1]` of the product measure.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(Error::domain(format!("probability {p} is outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// One open/closed state per ground-set element, packed into 64-bit words.
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Configuration {
    pub fn closed(len: usize) -> Self {
        Configuration { len, words: vec![0; word_count(len)] }
    }

    pub fn open(len: usize) -> Self {
        let mut c = Configuration { len, words: vec![!0; word_count(len)] };
        c.trim();
        c
    }

    /// Low `len` bits of `mask`; `len` must be at most 64.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= 64, "from_mask supports at most 64 elements");
        let mut c = Configuration::closed(len);
        c.set_mask(mask);
        c
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Configuration::closed(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.words[i / 64] |= 1 << (i % 64);
            }
        }
        c
    }

    /// Overwrites the first word with `mask`; used by enumeration loops.
    #[inline]
    pub fn set_mask(&mut self, mask: u64) {
        if let Some(w) = self.words.first_mut() {
            *w = mask;
        }
        self.trim();
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low 64 bits as an integer mask.
    pub fn mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, open: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % 64);
        if open {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    fn check(&self, e: usize) -> Result<()> {
        if e < self.len {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { element: e, size: self.len })
        }
    }

    /// `ω^e`: `ω` with element `e` forced open.
    pub fn flip_up(&self, e: usize) -> Result<Configuration> {
        self.check(e)?;
        let mut c = self.clone();
        c.set(e, true);
        Ok(c)
    }

    /// `ω_e`: `ω` with element `e` forced closed.
    pub fn flip_down(&self, e: usize) -> Result<Configuration> {
        self.check(e)?;
        let mut c = self.clone();
        c.set(e, false);
        Ok(c)
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Coordinatewise order `self ≤ other`.
    pub fn le(&self, other: &Configuration) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn hamming(&self, other: &Configuration) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    /// Indices of open elements in increasing order.
    pub fn iter_open(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    /// Complement: open and closed exchanged.
    pub fn complement(&self) -> Configuration {
        let mut c = Configuration { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        c.trim();
        c
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Bit string, element 0 first.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_up_sets_only_target() {
        let c = Configuration::closed(5);
        let up = c.flip_up(0).unwrap();
        assert_eq!(up.to_string(), "10000");
        assert_eq!(c.to_string(), "00000");
        assert_eq!(Configuration::open(5).flip_up(3).unwrap(), Configuration::open(5));
    }

    #[test]
    fn flip_up_on_twelve_elements() {
        let mut c = Configuration::from_mask(12, 0b1010_0101_0001);
        c.set(3, false);
        let up = c.flip_up(3).unwrap();
        assert!(up.get(3));
        assert_eq!(up.hamming(&c), 1);
    }

    #[test]
    fn flip_down_mirrors_flip_up() {
        assert_eq!(Configuration::open(4).flip_down(0).unwrap().to_string(), "0111");
        assert_eq!(Configuration::closed(4).flip_down(2).unwrap(), Configuration::closed(4));
        let c = Configuration::from_mask(6, 0b101101);
        for e in 0..6 {
            assert_eq!(c.flip_up(e).unwrap().flip_down(e).unwrap(), c.flip_down(e).unwrap());
        }
    }

    #[test]
    fn out_of_range_flip_is_an_error() {
        let c = Configuration::closed(3);
        assert_eq!(c.flip_up(3), Err(Error::ElementOutOfRange { element: 3, size: 3 }));
        assert!(c.flip_down(7).is_err());
    }

    #[test]
    fn multiword_configurations() {
        let mut c = Configuration::closed(130);
        c.set(0, true);
        c.set(64, true);
        c.set(129, true);
        assert_eq!(c.count_open(), 3);
        assert_eq!(c.iter_open().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(Configuration::open(130).count_open(), 130);
        assert_eq!(c.complement().count_open(), 127);
        assert!(c.le(&Configuration::open(130)));
        assert!(!Configuration::open(130).le(&c));
    }

    #[test]
    fn ground_set_validation() {
        assert!(GroundSet::new(0).is_err());
        assert_eq!(GroundSet::new(3).unwrap().label(2), Some("e2"));
        let dup = alloc::vec!["a".into(), "a".into()];
        assert!(GroundSet::with_labels(dup).is_err());
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(-0.0).is_ok());
    }
}
