//! Reference sequences for comparison: Zadoff-Chu and binary m-sequences,
//! extended by one trailing −1 to a length divisible by four.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::ComplexSequence;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `exp(−π√-1 · u · n(n+1) / N_zc)` for `n = 0..N_zc`.
pub fn zadoff_chu(n_zc: u64, root: u64) -> Result<ComplexSequence> {
    if n_zc.is_multiple_of(2) {
        return Err(Error::EvenZcLength(n_zc));
    }
    if root == 0 || gcd(root, n_zc) != 1 {
        return Err(Error::NonCoprimeRoot { root, length: n_zc });
    }
    let modulus = 2 * n_zc as u128;
    let values = (0..n_zc as u128)
        .map(|n| {
            // Reduce u·n(n+1) mod 2N exactly before touching floats.
            let r = (root as u128 % modulus) * (n * (n + 1) % modulus) % modulus;
            Complex64::from_polar(1.0, -PI * r as f64 / n_zc as f64)
        })
        .collect();
    Ok(ComplexSequence::from_trusted(values))
}

/// Appends a single −1.
pub fn extend_minus_one(a: &ComplexSequence) -> ComplexSequence {
    let mut values = a.values().to_vec();
    values.push(Complex64::new(-1.0, 0.0));
    ComplexSequence::from_trusted(values)
}

/// How LFSR output bits become ±1 chips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitMapping {
    /// 0 → +1, 1 → −1.
    #[default]
    ZeroToPlusOne,
    /// 0 → −1, 1 → +1.
    ZeroToMinusOne,
}

impl BitMapping {
    fn chip(self, bit: u8) -> f64 {
        match (self, bit) {
            (BitMapping::ZeroToPlusOne, 0) | (BitMapping::ZeroToMinusOne, 1) => 1.0,
            _ => -1.0,
        }
    }
}

/// Fibonacci LFSR output `s[k] = XOR_{t ∈ taps} s[k − t]` for `k ≥ d`, where
/// `d = max(taps)` and `s[0..d] = init`. Taps `{5, 2}` give
/// `s[k+5] = s[k+3] ⊕ s[k]`.
///
/// Fails unless the recurrence has full period `2^d − 1` from `init`, so a
/// successful call certifies the tap set as primitive.
pub fn m_sequence_bits(taps: &[usize], init: &[u8], n: usize) -> Result<Vec<u8>> {
    let degree = *taps
        .iter()
        .max()
        .ok_or_else(|| Error::Lfsr("tap set is empty".into()))?;
    if taps.contains(&0) || degree > 32 {
        return Err(Error::Lfsr(format!("taps {taps:?} must lie in 1..=32")));
    }
    if init.len() != degree {
        return Err(Error::Lfsr(format!(
            "initial state has {} bits, degree is {degree}",
            init.len()
        )));
    }
    if init.iter().any(|&b| b > 1) {
        return Err(Error::Lfsr("initial state must be binary".into()));
    }
    if init.iter().all(|&b| b == 0) {
        return Err(Error::Lfsr("initial state must be nonzero".into()));
    }
    let period = (1usize << degree) - 1;
    if n != period {
        return Err(Error::Lfsr(format!(
            "length {n} does not match 2^{degree} - 1 = {period}"
        )));
    }
    let mut s: Vec<u8> = init.to_vec();
    s.reserve(period);
    for k in degree..period + degree {
        let bit = taps.iter().fold(0, |acc, &t| acc ^ s[k - t]);
        s.push(bit);
    }
    // Full period: the register returns to `init` after `period` steps and
    // not before.
    let returns_at = (1..=period).find(|&k| s[k..k + degree] == *init);
    if returns_at != Some(period) {
        return Err(Error::Lfsr(format!(
            "taps {taps:?} are not primitive (period {})",
            returns_at.unwrap_or(0)
        )));
    }
    s.truncate(period);
    Ok(s)
}

/// Binary m-sequence as a ±1 sequence with 0 → +1, 1 → −1.
pub fn m_sequence(taps: &[usize], init: &[u8], n: usize) -> Result<ComplexSequence> {
    m_sequence_mapped(taps, init, n, BitMapping::ZeroToPlusOne)
}

pub fn m_sequence_mapped(
    taps: &[usize],
    init: &[u8],
    n: usize,
    mapping: BitMapping,
) -> Result<ComplexSequence> {
    let bits = m_sequence_bits(taps, init, n)?;
    let values = bits
        .into_iter()
        .map(|b| Complex64::new(mapping.chip(b), 0.0))
        .collect();
    Ok(ComplexSequence::from_trusted(values))
}

/// LFSR parameters for an m-sequence baseline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSequenceParams {
    pub taps: Vec<usize>,
    pub init: Vec<u8>,
    pub mapping: BitMapping,
}

impl MSequenceParams {
    pub fn degree(&self) -> usize {
        self.taps.iter().copied().max().unwrap_or(0)
    }

    /// Pinned parameters for the length-32 and length-64 comparison tables:
    /// taps {5, 2} / {6, 1}, register states (0,1,0,0,1) / (0,1,1,0,0,1),
    /// 0 → −1.
    pub fn table_default(degree: usize) -> Option<Self> {
        let (taps, init) = match degree {
            5 => (vec![5, 2], vec![0, 1, 0, 0, 1]),
            6 => (vec![6, 1], vec![0, 1, 1, 0, 0, 1]),
            _ => return None,
        };
        Some(Self {
            taps,
            init,
            mapping: BitMapping::ZeroToMinusOne,
        })
    }

    /// Extended baseline of length `2^d`.
    pub fn baseline(&self) -> Result<ComplexSequence> {
        let n = (1usize << self.degree()) - 1;
        Ok(extend_minus_one(&m_sequence_mapped(
            &self.taps,
            &self.init,
            n,
            self.mapping,
        )?))
    }
}

/// ZC baseline of final length `len`: base length `len − 1`, extended by −1.
pub fn zc_baseline(len: usize, root: u64) -> Result<ComplexSequence> {
    if len < 2 {
        return Err(Error::EvenZcLength(len.saturating_sub(1) as u64));
    }
    Ok(extend_minus_one(&zadoff_chu(len as u64 - 1, root)?))
}
