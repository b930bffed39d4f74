//! Resource-block masks over a four-RB chunk and the per-allocation PMEPR
//! report.
//!
//! A sequence of length `L = 4H` is split into four blocks of `H` subcarriers.
//! Mask `s = i_1 + 2 i_2 + 4 i_3 + 8 i_4` keeps block `k` iff `i_k = 1`; the
//! masked sequence keeps full length with explicit zeros.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::{pmepr_certified, pmepr_with, PmeprResult, Sampling};
use crate::error::{Error, Result};
use crate::seqcore::ComplexSequence;

/// Masks whose active blocks form one run.
pub const CONTIGUOUS: [u8; 10] = [1, 2, 3, 4, 6, 7, 8, 12, 14, 15];
/// Masks with a gap between active blocks.
pub const NON_CONTIGUOUS: [u8; 5] = [5, 9, 10, 11, 13];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskClass {
    Contiguous,
    NonContiguous,
}

/// One of the 15 nonzero allocation patterns `(i_1, i_2, i_3, i_4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RbMask(u8);

impl RbMask {
    pub fn new(s: u8) -> Result<Self> {
        if !(1..=15).contains(&s) {
            return Err(Error::MaskIndex(s));
        }
        Ok(Self(s))
    }

    /// From `(i_1, i_2, i_3, i_4)`.
    pub fn from_bits(bits: [bool; 4]) -> Result<Self> {
        let s = bits
            .iter()
            .enumerate()
            .fold(0u8, |s, (k, &b)| s | (b as u8) << k);
        Self::new(s)
    }

    /// All 15 masks in index order.
    pub fn all() -> impl Iterator<Item = RbMask> {
        (1..=15).map(RbMask)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn bits(self) -> [bool; 4] {
        [0, 1, 2, 3].map(|k| self.0 >> k & 1 == 1)
    }

    /// Whether block `k` (0-based) is allocated.
    pub fn is_active(self, block: usize) -> bool {
        block < 4 && self.0 >> block & 1 == 1
    }

    pub fn active_blocks(self) -> u32 {
        self.0.count_ones()
    }

    /// The mask with every block flipped; `None` for `s = 15`.
    pub fn complement(self) -> Option<RbMask> {
        RbMask::new(15 - self.0).ok()
    }

    pub fn class(self) -> MaskClass {
        classify_mask(self)
    }
}

impl fmt::Display for RbMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A_{}", self.0)
    }
}

pub fn classify_mask(mask: RbMask) -> MaskClass {
    if CONTIGUOUS.contains(&mask.0) {
        MaskClass::Contiguous
    } else {
        MaskClass::NonContiguous
    }
}

/// Block width `H = L/4`.
pub fn block_width(len: usize) -> Result<usize> {
    if len == 0 || !len.is_multiple_of(4) {
        return Err(Error::LengthNotDivisibleBy4(len));
    }
    Ok(len / 4)
}

/// Zeroes every block whose mask bit is clear.
pub fn apply_mask(a: &ComplexSequence, mask: RbMask) -> Result<ComplexSequence> {
    let h = block_width(a.len())?;
    let mut values = a.values().to_vec();
    for (k, block) in values.chunks_mut(h).enumerate() {
        if !mask.is_active(k) {
            block.fill(Default::default());
        }
    }
    Ok(ComplexSequence::from_trusted(values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaskPmepr {
    pub mask: RbMask,
    pub class: MaskClass,
    #[serde(flatten)]
    pub result: PmeprResult,
}

/// PMEPR of all 15 masked sequences plus the contiguous, non-contiguous and
/// overall maxima.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DsaPmeprReport {
    /// One entry per mask, ordered `A_1..A_15`.
    pub per_mask: Vec<MaskPmepr>,
    pub pmepr_c: f64,
    pub pmepr_nc: f64,
    pub pmepr_a: f64,
}

impl DsaPmeprReport {
    fn from_entries(per_mask: Vec<MaskPmepr>) -> Self {
        let (pmepr_c, pmepr_nc) = class_maxima(&per_mask);
        Self {
            per_mask,
            pmepr_c,
            pmepr_nc,
            pmepr_a: pmepr_c.max(pmepr_nc),
        }
    }

    pub fn get(&self, mask: RbMask) -> &PmeprResult {
        &self.per_mask[mask.index() as usize - 1].result
    }

    /// PMEPR of mask `s`. Panics if `s` is not in 1..=15.
    pub fn value(&self, s: u8) -> f64 {
        self.per_mask[s as usize - 1].result.pmepr
    }

    /// Whether the stored maxima agree with the per-mask entries.
    pub fn is_consistent(&self) -> bool {
        let (c, nc) = class_maxima(&self.per_mask);
        self.per_mask.len() == 15
            && self
                .per_mask
                .iter()
                .zip(RbMask::all())
                .all(|(e, m)| e.mask == m && e.class == m.class())
            && c == self.pmepr_c
            && nc == self.pmepr_nc
            && self.pmepr_a == c.max(nc)
    }

    pub fn csv_header() -> String {
        let mut cols = vec!["label".to_string()];
        cols.extend(RbMask::all().map(|m| m.to_string()));
        cols.extend(["PMEPR_C", "PMEPR_NC", "PMEPR_A"].map(String::from));
        cols.join(",")
    }

    /// One CSV row in full precision, matching [`csv_header`](Self::csv_header).
    pub fn to_csv_row(&self, label: &str) -> String {
        let mut cols = vec![label.to_string()];
        cols.extend(self.per_mask.iter().map(|e| e.result.pmepr.to_string()));
        cols.extend([self.pmepr_c, self.pmepr_nc, self.pmepr_a].map(|v| v.to_string()));
        cols.join(",")
    }
}

fn class_maxima(entries: &[MaskPmepr]) -> (f64, f64) {
    let max_of = |class| {
        entries
            .iter()
            .filter(|e| e.class == class)
            .map(|e| e.result.pmepr)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    (
        max_of(MaskClass::Contiguous),
        max_of(MaskClass::NonContiguous),
    )
}

fn build_report<F>(a: &ComplexSequence, eval: F) -> Result<DsaPmeprReport>
where
    F: Fn(&ComplexSequence) -> Result<PmeprResult> + Sync,
{
    block_width(a.len())?;
    let masks: Vec<RbMask> = RbMask::all().collect();
    let per_mask = masks
        .par_iter()
        .map(|&mask| {
            let result = eval(&apply_mask(a, mask)?)?;
            Ok(MaskPmepr {
                mask,
                class: mask.class(),
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DsaPmeprReport::from_entries(per_mask))
}

/// Full report with oversampled, refined PMEPR.
pub fn dsa_report(a: &ComplexSequence, oversampling: usize) -> Result<DsaPmeprReport> {
    dsa_report_with(
        a,
        Sampling::Oversampled {
            factor: oversampling,
            refine: true,
        },
    )
}

pub fn dsa_report_with(a: &ComplexSequence, sampling: Sampling) -> Result<DsaPmeprReport> {
    build_report(a, |s| pmepr_with(s, sampling))
}

/// Report at `2·oversampling` with a convergence certificate per mask.
pub fn dsa_report_certified(a: &ComplexSequence, oversampling: usize) -> Result<DsaPmeprReport> {
    build_report(a, |s| pmepr_certified(s, oversampling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::average_power;

    fn seq(v: &[f64]) -> ComplexSequence {
        ComplexSequence::from_reals(v).unwrap()
    }

    /// Independent contiguity test: active blocks form a single run.
    fn single_run(s: u8) -> bool {
        let shifted = s >> s.trailing_zeros();
        shifted & (shifted + 1) == 0
    }

    #[test]
    fn classification_matches_listing() {
        assert_eq!(
            classify_mask(RbMask::new(6).unwrap()),
            MaskClass::Contiguous
        );
        assert_eq!(
            classify_mask(RbMask::new(9).unwrap()),
            MaskClass::NonContiguous
        );
        assert_eq!(
            classify_mask(RbMask::new(15).unwrap()),
            MaskClass::Contiguous
        );
        for m in RbMask::all() {
            assert_eq!(
                m.class() == MaskClass::Contiguous,
                single_run(m.index()),
                "{m}"
            );
        }
        assert_eq!(RbMask::new(0), Err(Error::MaskIndex(0)));
        assert_eq!(RbMask::new(16), Err(Error::MaskIndex(16)));
        assert_eq!(
            RbMask::from_bits([false, true, true, false])
                .unwrap()
                .index(),
            6
        );
        assert!(RbMask::from_bits([false; 4]).is_err());
    }

    #[test]
    fn mask_examples() {
        let a = seq(&[1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
        let m5 = apply_mask(&a, RbMask::new(5).unwrap()).unwrap();
        assert_eq!(m5, seq(&[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]));
        assert_eq!(apply_mask(&a, RbMask::new(15).unwrap()).unwrap(), a);
        let m1 = apply_mask(&a, RbMask::new(1).unwrap()).unwrap();
        assert_eq!(m1, seq(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(average_power(&m5), 4.0);
    }

    #[test]
    fn mask_rejects_bad_length() {
        let a = seq(&[1.0, 1.0, 1.0]);
        assert_eq!(
            apply_mask(&a, RbMask::new(1).unwrap()),
            Err(Error::LengthNotDivisibleBy4(3))
        );
        assert!(dsa_report(&a, 128).is_err());
    }

    #[test]
    fn report_is_consistent_and_serializes() {
        let a = seq(&[1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
        let r = dsa_report(&a, 16).unwrap();
        assert!(r.is_consistent());
        assert_eq!(r.per_mask.len(), 15);
        let header = DsaPmeprReport::csv_header();
        assert!(header.starts_with("label,A_1,A_2,"));
        assert!(header.ends_with("A_15,PMEPR_C,PMEPR_NC,PMEPR_A"));
        assert_eq!(
            r.to_csv_row("x").split(',').count(),
            header.split(',').count()
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["per_mask"][4]["mask"], 5);
        assert_eq!(json["per_mask"][4]["class"], "non_contiguous");

        let mut broken = r.clone();
        broken.pmepr_a += 1.0;
        assert!(!broken.is_consistent());
    }
}
