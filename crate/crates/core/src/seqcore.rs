//! Generalized Boolean functions over Z_q, the ψ map to complex sequences and
//! the quadratic (Golay-Davis-Jedwab) construction.
//!
//! Index convention: an integer `i = Σ 2^{k-1} i_k` is read LSB-first, so
//! variable `x_1` is bit 0 of `i` and `x_m` is bit `m-1`. Every sequence in the
//! crate is ordered `f(0), f(1), ..., f(2^m - 1)` under this convention.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported variable count (sequence length 2^24).
pub const MAX_VARIABLES: usize = 24;

/// Magnitude tolerance for the "zero or unimodular" entry invariant.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-12;

fn check_modulus(q: u32) -> Result<()> {
    if q < 2 || !q.is_multiple_of(2) {
        return Err(Error::OddModulus(q));
    }
    Ok(())
}

fn check_variables(m: usize, min: usize) -> Result<()> {
    if m < min || m > MAX_VARIABLES {
        return Err(Error::VariableCount {
            m,
            min,
            max: MAX_VARIABLES,
        });
    }
    Ok(())
}

/// A map `Z_2^m -> Z_q` stored as monomial coefficients.
///
/// Monomials are keyed by a bitmask (bit `k-1` set means `x_k` appears), so a
/// function's terms are canonical: coefficients are reduced mod q and zero
/// coefficients are dropped. Two functions compare equal iff they have the
/// same algebraic normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    q: u32,
    m: usize,
    terms: BTreeMap<u32, u32>,
}

impl BooleanFunction {
    /// The zero function on `m` variables.
    pub fn zero(q: u32, m: usize) -> Result<Self> {
        check_modulus(q)?;
        check_variables(m, 1)?;
        Ok(Self {
            q,
            m,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(q: u32, m: usize, c: u32) -> Result<Self> {
        let mut f = Self::zero(q, m)?;
        f.add_term(&[], c)?;
        Ok(f)
    }

    /// Adds `coeff · Π_{k in vars} x_k`, accumulating onto any existing term.
    /// Variables are 1-indexed; an empty slice is the constant term.
    pub fn add_term(&mut self, vars: &[usize], coeff: u32) -> Result<()> {
        let mut key = 0u32;
        for &v in vars {
            if v == 0 || v > self.m {
                return Err(Error::VariableIndex {
                    index: v,
                    m: self.m,
                });
            }
            key |= 1 << (v - 1);
        }
        let entry = self.terms.entry(key).or_insert(0);
        *entry = (*entry + coeff % self.q) % self.q;
        if *entry == 0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// Builder form of [`add_term`](Self::add_term).
    pub fn with_term(mut self, vars: &[usize], coeff: u32) -> Result<Self> {
        self.add_term(vars, coeff)?;
        Ok(self)
    }

    /// Returns `self + (q/2)·x_var`.
    pub fn plus_half_q(&self, var: usize) -> Result<Self> {
        self.clone().with_term(&[var], self.q / 2)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sequence length `2^m`.
    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient of the monomial over `vars` (0 when absent).
    pub fn coefficient(&self, vars: &[usize]) -> u32 {
        let key = vars
            .iter()
            .filter(|&&v| v >= 1 && v <= self.m)
            .fold(0u32, |k, &v| k | 1 << (v - 1));
        self.terms.get(&key).copied().unwrap_or(0)
    }

    /// Nonzero terms as (sorted 1-indexed variable list, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, u32)> + '_ {
        self.terms.iter().map(|(&key, &c)| {
            let vars = (0..self.m).filter(|b| key >> b & 1 == 1).map(|b| b + 1);
            (vars.collect(), c)
        })
    }

    pub fn eval(&self, i: usize) -> Result<u32> {
        eval_boolean(self, i)
    }

    fn eval_unchecked(&self, i: usize) -> u32 {
        let bits = i as u32;
        let sum: u64 = self
            .terms
            .iter()
            .filter(|(&key, _)| bits & key == key)
            .map(|(_, &c)| c as u64)
            .sum();
        (sum % self.q as u64) as u32
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (vars, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: String = vars.iter().map(|v| format!("x{v}")).collect();
            match (c, mono.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{mono}")?,
                _ => write!(f, "{c}{mono}")?,
            }
        }
        write!(f, " (mod {})", self.q)
    }
}

/// Evaluates `f` at the binary expansion of `i` (LSB = `x_1`).
pub fn eval_boolean(f: &BooleanFunction, i: usize) -> Result<u32> {
    if i >= f.len() {
        return Err(Error::IndexOutOfRange { index: i, m: f.m });
    }
    Ok(f.eval_unchecked(i))
}

/// The length-`2^m` phase vector `(f(0), ..., f(2^m - 1))`.
pub fn boolean_to_phases(f: &BooleanFunction) -> PhaseSequence {
    PhaseSequence {
        q: f.q,
        values: (0..f.len()).map(|i| f.eval_unchecked(i)).collect(),
    }
}

/// A vector over Z_q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseSequence {
    q: u32,
    values: Vec<u32>,
}

impl PhaseSequence {
    pub fn new(q: u32, values: Vec<u32>) -> Result<Self> {
        check_modulus(q)?;
        if let Some(&value) = values.iter().find(|&&v| v >= q) {
            return Err(Error::PhaseOutOfRange { value, q });
        }
        Ok(Self { q, values })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `ξ_q^p` with `ξ_q = exp(2π√-1/q)`. Multiples of a quarter turn are exact.
pub fn root_of_unity(q: u32, p: i64) -> Complex64 {
    let p = p.rem_euclid(q as i64);
    if (4 * p) % q as i64 == 0 {
        return match 4 * p / q as i64 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * p as f64 / q as f64)
}

/// Maps each phase `p` to `ξ_q^p`.
pub fn psi(p: &PhaseSequence) -> ComplexSequence {
    let values = p
        .values
        .iter()
        .map(|&v| root_of_unity(p.q, v as i64))
        .collect();
    ComplexSequence { values }
}

/// A complex sequence whose entries are zero (nulled subcarrier) or unimodular.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ComplexSequence {
    values: Vec<Complex64>,
}

impl ComplexSequence {
    /// Validates the zero-or-unimodular invariant.
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        for (index, v) in values.iter().enumerate() {
            let magnitude = v.norm();
            if magnitude != 0.0 && (magnitude - 1.0).abs() > UNIMODULAR_TOLERANCE {
                return Err(Error::NotUnimodular { index, magnitude });
            }
        }
        Ok(Self { values })
    }

    /// A ±1 sequence from signs (`true` = −1).
    pub fn from_signs(negative: impl IntoIterator<Item = bool>) -> Self {
        let values = negative
            .into_iter()
            .map(|n| Complex64::new(if n { -1.0 } else { 1.0 }, 0.0))
            .collect();
        Self { values }
    }

    /// A real sequence; entries must be 0 or ±1.
    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub(crate) fn from_trusted(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of nonzero entries (|Ω| for a masked sequence).
    pub fn support_len(&self) -> usize {
        self.values.iter().filter(|v| v.norm_sqr() > 0.0).count()
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Which construction a descriptor instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    /// π(m) = m and π(m−1) = m−1.
    #[serde(rename = "FamilyX", alias = "x", alias = "X")]
    FamilyX,
    /// π(m) = m−1 and π(m−1) = m.
    #[serde(rename = "FamilyY", alias = "y", alias = "Y")]
    FamilyY,
    /// Unconstrained quadratic GDJ construction.
    #[serde(rename = "PlainGDJ", alias = "gdj", alias = "GDJ")]
    PlainGdj,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::FamilyX => "FamilyX",
            FamilyKind::FamilyY => "FamilyY",
            FamilyKind::PlainGdj => "PlainGDJ",
        }
    }

    fn min_variables(self) -> usize {
        match self {
            FamilyKind::PlainGdj => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Deserialize, Serialize)]
struct RawDescriptor {
    theorem: FamilyKind,
    m: usize,
    q: u32,
    pi: Vec<usize>,
    c_k: Vec<u32>,
    c: u32,
}

/// Parameters `(kind, m, q, π, c_k, c)` of one quadratic construction.
///
/// `pi` is the 1-indexed image vector `(π(1), ..., π(m))`. Coefficients are
/// reduced mod q on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor", into = "RawDescriptor")]
pub struct FamilyDescriptor {
    theorem: FamilyKind,
    m: usize,
    q: u32,
    pi: Vec<usize>,
    c_k: Vec<u32>,
    c: u32,
}

impl TryFrom<RawDescriptor> for FamilyDescriptor {
    type Error = Error;

    fn try_from(raw: RawDescriptor) -> Result<Self> {
        if raw.m != raw.pi.len() {
            return Err(Error::InvalidPermutation(format!(
                "m = {} but pi has {} entries",
                raw.m,
                raw.pi.len()
            )));
        }
        Self::new(raw.theorem, raw.q, raw.pi, raw.c_k, raw.c)
    }
}

impl From<FamilyDescriptor> for RawDescriptor {
    fn from(d: FamilyDescriptor) -> Self {
        RawDescriptor {
            theorem: d.theorem,
            m: d.m,
            q: d.q,
            pi: d.pi,
            c_k: d.c_k,
            c: d.c,
        }
    }
}

impl FamilyDescriptor {
    pub fn new(theorem: FamilyKind, q: u32, pi: Vec<usize>, c_k: Vec<u32>, c: u32) -> Result<Self> {
        check_modulus(q)?;
        let m = pi.len();
        check_variables(m, theorem.min_variables())?;
        validate_permutation(&pi)?;
        if c_k.len() != m {
            return Err(Error::CoefficientCount {
                expected: m,
                got: c_k.len(),
            });
        }
        match theorem {
            FamilyKind::FamilyX if pi[m - 1] != m || pi[m - 2] != m - 1 => {
                return Err(Error::PermutationConstraint {
                    family: "FamilyX",
                    requirement: "pi(m) = m and pi(m-1) = m-1",
                })
            }
            FamilyKind::FamilyY if pi[m - 1] != m - 1 || pi[m - 2] != m => {
                return Err(Error::PermutationConstraint {
                    family: "FamilyY",
                    requirement: "pi(m) = m-1 and pi(m-1) = m",
                })
            }
            _ => {}
        }
        let c_k = c_k.into_iter().map(|v| v % q).collect();
        Ok(Self {
            theorem,
            m,
            q,
            pi,
            c_k,
            c: c % q,
        })
    }

    /// The canonical instance with zero coefficients: identity π for X and
    /// plain GDJ, identity with the last two entries swapped for Y.
    pub fn standard(theorem: FamilyKind, m: usize, q: u32) -> Result<Self> {
        check_variables(m, theorem.min_variables())?;
        let mut pi: Vec<usize> = (1..=m).collect();
        if theorem == FamilyKind::FamilyY {
            pi.swap(m - 2, m - 1);
        }
        Self::new(theorem, q, pi, vec![0; m], 0)
    }

    pub fn theorem(&self) -> FamilyKind {
        self.theorem
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn c_k(&self) -> &[u32] {
        &self.c_k
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    /// Sequence length `2^m`.
    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub(crate) fn validate_permutation(pi: &[usize]) -> Result<()> {
    let m = pi.len();
    let mut seen = vec![false; m + 1];
    for &p in pi {
        if p == 0 || p > m {
            return Err(Error::InvalidPermutation(format!(
                "entry {p} outside 1..={m}"
            )));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!("entry {p} repeated")));
        }
    }
    Ok(())
}

/// `a(x) = (q/2) Σ_{k<m} x_{π(k)} x_{π(k+1)} + Σ c_k x_k + c`.
pub fn gdj_quadratic(d: &FamilyDescriptor) -> BooleanFunction {
    let half = d.q / 2;
    let mut f = BooleanFunction::constant(d.q, d.m, d.c).expect("descriptor validated");
    for w in d.pi.windows(2) {
        f.add_term(&[w[0], w[1]], half)
            .expect("descriptor validated");
    }
    for (k, &ck) in d.c_k.iter().enumerate() {
        f.add_term(&[k + 1], ck).expect("descriptor validated");
    }
    f
}

/// The companions `(b, c, d)` of the quadratic `a`:
/// `b = a + (q/2)x_{π(1)}`, `c = a + (q/2)x_{π(m)}`,
/// `d = a + (q/2)x_{π(1)} + (q/2)x_{π(m)}`.
pub fn gdj_mates(
    d: &FamilyDescriptor,
    a: &BooleanFunction,
) -> Result<(BooleanFunction, BooleanFunction, BooleanFunction)> {
    if a.q != d.q || a.m != d.m {
        return Err(Error::Precondition(format!(
            "function over Z_{} with {} variables does not match descriptor (q = {}, m = {})",
            a.q, a.m, d.q, d.m
        )));
    }
    let first = d.pi[0];
    let last = d.pi[d.m - 1];
    let b = a.plus_half_q(first)?;
    let c = a.plus_half_q(last)?;
    let dd = b.plus_half_q(last)?;
    Ok((b, c, dd))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x1x2() -> BooleanFunction {
        BooleanFunction::zero(2, 2)
            .unwrap()
            .with_term(&[1, 2], 1)
            .unwrap()
    }

    fn path3() -> BooleanFunction {
        BooleanFunction::zero(2, 3)
            .unwrap()
            .with_term(&[1, 2], 1)
            .unwrap()
            .with_term(&[2, 3], 1)
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_boolean(&x1x2(), 3).unwrap(), 1);
        assert_eq!(eval_boolean(&x1x2(), 0).unwrap(), 0);
        // i = 6 -> (i1, i2, i3) = (0, 1, 1): x1x2 = 0, x2x3 = 1
        assert_eq!(eval_boolean(&path3(), 6).unwrap(), 1);
    }

    #[test]
    fn eval_out_of_range() {
        assert_eq!(
            eval_boolean(&x1x2(), 4),
            Err(Error::IndexOutOfRange { index: 4, m: 2 })
        );
    }

    #[test]
    fn phases_examples() {
        assert_eq!(boolean_to_phases(&x1x2()).values(), &[0, 0, 0, 1]);
        let one = BooleanFunction::constant(4, 1, 1).unwrap();
        assert_eq!(boolean_to_phases(&one).values(), &[1, 1]);
        assert_eq!(
            boolean_to_phases(&path3()).values(),
            &[0, 0, 0, 1, 0, 0, 1, 0]
        );
    }

    #[test]
    fn psi_examples() {
        let p = PhaseSequence::new(2, vec![0, 0, 0, 1]).unwrap();
        let s = psi(&p);
        let re: Vec<f64> = s.values().iter().map(|v| v.re).collect();
        assert_eq!(re, vec![1.0, 1.0, 1.0, -1.0]);
        assert!(s.values()[3].im.abs() < 1e-15);

        let s = psi(&PhaseSequence::new(4, vec![1]).unwrap());
        assert!((s.values()[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let s = psi(&PhaseSequence::new(2, vec![0; 4]).unwrap());
        assert!(s.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn odd_modulus_rejected() {
        assert_eq!(BooleanFunction::zero(3, 2), Err(Error::OddModulus(3)));
        assert!(PhaseSequence::new(5, vec![0]).is_err());
        assert!(PhaseSequence::new(4, vec![4]).is_err());
    }

    #[test]
    fn coefficients_are_canonical() {
        let f = BooleanFunction::zero(4, 2)
            .unwrap()
            .with_term(&[1], 7)
            .unwrap()
            .with_term(&[2, 1], 2)
            .unwrap()
            .with_term(&[1, 2], 2)
            .unwrap();
        let g = BooleanFunction::zero(4, 2)
            .unwrap()
            .with_term(&[1], 3)
            .unwrap();
        assert_eq!(f, g);
        assert_eq!(f.coefficient(&[1]), 3);
        assert!(f.clone().with_term(&[3], 1).is_err());
    }

    #[test]
    fn gdj_examples() {
        let d = FamilyDescriptor::standard(FamilyKind::PlainGdj, 2, 2).unwrap();
        let a = gdj_quadratic(&d);
        assert_eq!(a.terms().collect::<Vec<_>>(), vec![(vec![1, 2], 1)]);
        let (b, _, _) = gdj_mates(&d, &a).unwrap();
        assert_eq!(b, a.clone().with_term(&[1], 1).unwrap());

        let d = FamilyDescriptor::standard(FamilyKind::PlainGdj, 3, 2).unwrap();
        let a = gdj_quadratic(&d);
        assert_eq!(a, path3());
        let re: Vec<f64> = psi(&boolean_to_phases(&a))
            .values()
            .iter()
            .map(|v| v.re)
            .collect();
        assert_eq!(re, vec![1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn gdj_degenerate_single_variable() {
        let d = FamilyDescriptor::new(FamilyKind::PlainGdj, 4, vec![1], vec![0], 3).unwrap();
        let a = gdj_quadratic(&d);
        assert_eq!(a, BooleanFunction::constant(4, 1, 3).unwrap());
        let (b, c, dd) = gdj_mates(&d, &a).unwrap();
        assert_eq!(b, a.clone().with_term(&[1], 2).unwrap());
        assert_eq!(c, b);
        assert_eq!(dd, a);
    }

    #[test]
    fn descriptor_constraints() {
        assert!(
            FamilyDescriptor::new(FamilyKind::FamilyX, 2, vec![1, 3, 2], vec![0; 3], 0).is_err()
        );
        assert!(
            FamilyDescriptor::new(FamilyKind::FamilyY, 2, vec![1, 2, 3], vec![0; 3], 0).is_err()
        );
        assert!(
            FamilyDescriptor::new(FamilyKind::FamilyY, 2, vec![1, 3, 2], vec![0; 3], 0).is_ok()
        );
        assert!(matches!(
            FamilyDescriptor::new(FamilyKind::PlainGdj, 2, vec![1, 1, 2], vec![0; 3], 0),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            FamilyDescriptor::new(FamilyKind::PlainGdj, 2, vec![1, 2], vec![0; 3], 0),
            Err(Error::CoefficientCount {
                expected: 2,
                got: 3
            })
        ));
        let d = FamilyDescriptor::new(FamilyKind::PlainGdj, 4, vec![2, 1], vec![5, 6], 9).unwrap();
        assert_eq!(d.c_k(), &[1, 2]);
        assert_eq!(d.c(), 1);
    }

    #[test]
    fn descriptor_json() {
        let d = FamilyDescriptor::new(
            FamilyKind::FamilyY,
            4,
            vec![1, 2, 4, 3],
            vec![1, 2, 3, 0],
            1,
        )
        .unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"theorem":"FamilyY","m":4,"q":4,"pi":[1,2,4,3],"c_k":[1,2,3,0],"c":1}"#
        );
        let back: FamilyDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);

        let short: FamilyDescriptor =
            serde_json::from_str(r#"{"theorem":"x","m":3,"q":2,"pi":[1,2,3],"c_k":[0,0,0],"c":0}"#)
                .unwrap();
        assert_eq!(short.theorem(), FamilyKind::FamilyX);

        let bad = serde_json::from_str::<FamilyDescriptor>(
            r#"{"theorem":"x","m":3,"q":2,"pi":[2,1,3],"c_k":[0,0,0],"c":0}"#,
        );
        assert!(bad.is_err());
    }
}
