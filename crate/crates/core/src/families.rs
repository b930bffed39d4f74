//! The two preamble families and their correlation verifiers.
//!
//! Both families are quadratic GDJ sequences whose permutation pins the last
//! two variables: Family X fixes `π(m−1) = m−1, π(m) = m`, Family Y swaps them.
//! Each instance carries the preamble `a`, its Golay partner `b`, and the
//! companions `d`, `e` used by the four-sequence CSS clauses. All masks are
//! applied identically to the four sequences.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::correlation::{detect_acp, is_css};
use crate::dsa::{apply_mask, RbMask};
use crate::error::{Error, Result};
use crate::seqcore::{
    boolean_to_phases, gdj_quadratic, psi, root_of_unity, BooleanFunction, ComplexSequence,
    FamilyDescriptor, FamilyKind, PhaseSequence,
};

/// A sequence kept in both phase and complex form.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub function: BooleanFunction,
    pub phases: PhaseSequence,
    pub sequence: ComplexSequence,
}

impl FamilyMember {
    fn from_function(function: BooleanFunction) -> Self {
        let phases = boolean_to_phases(&function);
        let sequence = psi(&phases);
        Self {
            function,
            phases,
            sequence,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyInstance {
    pub descriptor: FamilyDescriptor,
    /// Block width `2^{m−2}`.
    pub h: usize,
    pub a: FamilyMember,
    pub b: FamilyMember,
    pub d: FamilyMember,
    pub e: FamilyMember,
}

impl FamilyInstance {
    pub fn len(&self) -> usize {
        self.descriptor.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Materializes `a`, `b = a + (q/2)x_{π(1)}` and the companions
/// `d = a + (q/2)x_j`, `e = b + (q/2)x_j` with `j = m` for Family X,
/// `j = m−1` for Family Y and `j = π(m)` for a plain GDJ descriptor.
pub fn build_family(desc: &FamilyDescriptor) -> Result<FamilyInstance> {
    let m = desc.m();
    if m < 2 {
        return Err(Error::VariableCount {
            m,
            min: 2,
            max: crate::seqcore::MAX_VARIABLES,
        });
    }
    // Re-validate so hand-built descriptors cannot slip past the π constraint.
    let desc = FamilyDescriptor::new(
        desc.theorem(),
        desc.q(),
        desc.pi().to_vec(),
        desc.c_k().to_vec(),
        desc.c(),
    )?;
    let companion_var = match desc.theorem() {
        FamilyKind::FamilyX => m,
        FamilyKind::FamilyY => m - 1,
        FamilyKind::PlainGdj => desc.pi()[m - 1],
    };
    let a = gdj_quadratic(&desc);
    let b = a.plus_half_q(desc.pi()[0])?;
    let d = a.plus_half_q(companion_var)?;
    let e = b.plus_half_q(companion_var)?;
    Ok(FamilyInstance {
        h: 1 << (m - 2),
        a: FamilyMember::from_function(a),
        b: FamilyMember::from_function(b),
        d: FamilyMember::from_function(d),
        e: FamilyMember::from_function(e),
        descriptor: desc,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "GCP")]
    Gcp,
    #[serde(rename = "ACP")]
    Acp,
    #[serde(rename = "CSS4")]
    Css4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defect {
    pub mu: usize,
    pub value: Complex64,
}

/// Outcome of one theorem clause on one mask.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremVerdict {
    pub theorem: u8,
    pub clause: u8,
    pub mask: RbMask,
    pub relation: Relation,
    pub holds: bool,
    pub observed_defect: Option<Defect>,
    /// Largest deviation from the claimed identity.
    pub residual: f64,
}

impl Serialize for TheoremVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TheoremVerdict", 9)?;
        st.serialize_field("theorem", &self.theorem)?;
        st.serialize_field("clause", &self.clause)?;
        st.serialize_field("mask", &self.mask.index())?;
        st.serialize_field("relation", &self.relation)?;
        st.serialize_field("holds", &self.holds)?;
        st.serialize_field("mu", &self.observed_defect.map(|d| d.mu))?;
        st.serialize_field("defect_re", &self.observed_defect.map(|d| d.value.re))?;
        st.serialize_field("defect_im", &self.observed_defect.map(|d| d.value.im))?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

struct Masked {
    a: ComplexSequence,
    b: ComplexSequence,
    d: ComplexSequence,
    e: ComplexSequence,
}

fn masked(inst: &FamilyInstance, s: u8) -> Result<(RbMask, Masked)> {
    let mask = RbMask::new(s)?;
    Ok((
        mask,
        Masked {
            a: apply_mask(&inst.a.sequence, mask)?,
            b: apply_mask(&inst.b.sequence, mask)?,
            d: apply_mask(&inst.d.sequence, mask)?,
            e: apply_mask(&inst.e.sequence, mask)?,
        },
    ))
}

fn gcp_clause(
    inst: &FamilyInstance,
    theorem: u8,
    clause: u8,
    s: u8,
    tol: f64,
) -> Result<TheoremVerdict> {
    let (mask, m) = masked(inst, s)?;
    let check = is_css(&[m.a, m.b], tol)?;
    Ok(TheoremVerdict {
        theorem,
        clause,
        mask,
        relation: Relation::Gcp,
        holds: check.holds,
        observed_defect: None,
        residual: check.report.max_residual,
    })
}

fn css4_clause(
    inst: &FamilyInstance,
    theorem: u8,
    clause: u8,
    s: u8,
    tol: f64,
) -> Result<TheoremVerdict> {
    let (mask, m) = masked(inst, s)?;
    let check = is_css(&[m.a, m.b, m.d, m.e], tol)?;
    Ok(TheoremVerdict {
        theorem,
        clause,
        mask,
        relation: Relation::Css4,
        holds: check.holds,
        observed_defect: None,
        residual: check.report.max_residual,
    })
}

/// What an ACP clause claims about `R_A + R_B`.
struct AcpClaim {
    mu: usize,
    /// Exact defect value; `None` when only `|defect| = 2H` is claimed.
    value: Option<Complex64>,
}

fn acp_clause(
    inst: &FamilyInstance,
    theorem: u8,
    clause: u8,
    s: u8,
    claim: AcpClaim,
    tol: f64,
) -> Result<TheoremVerdict> {
    let (mask, m) = masked(inst, s)?;
    let h = inst.h as f64;
    let report = detect_acp(&m.a, &m.b, tol)?;
    let observed_defect = report
        .mu
        .zip(report.defect_value)
        .map(|(mu, value)| Defect { mu, value });
    // Three active blocks in each of two sequences.
    let energy_dev = (report.energy - 6.0 * h).abs();
    let defect_dev = match (observed_defect, claim.value) {
        (Some(d), Some(want)) => (d.value - want).norm(),
        (Some(d), None) => (d.value.norm() - 2.0 * h).abs(),
        (None, _) => 2.0 * h,
    };
    let residual = report.zero_energy.max(energy_dev).max(defect_dev);
    let holds = report.is_acp && report.mu == Some(claim.mu) && residual <= tol;
    Ok(TheoremVerdict {
        theorem,
        clause,
        mask,
        relation: Relation::Acp,
        holds,
        observed_defect,
        residual,
    })
}

fn require(inst: &FamilyInstance, kind: FamilyKind, operation: &'static str) -> Result<()> {
    if inst.descriptor.theorem() != kind {
        return Err(Error::WrongFamily {
            operation,
            expected: kind.name(),
        });
    }
    Ok(())
}

/// `ξ_q^{−(q/2)(s/7−1) − c} · 2H` for `s ∈ {7, 14}`.
fn contiguous_defect(inst: &FamilyInstance, s: u8, c: u32) -> Complex64 {
    let q = inst.descriptor.q() as i64;
    let ratio = (s / 7) as i64;
    root_of_unity(q as u32, -(q / 2) * (ratio - 1) - c as i64) * (2 * inst.h) as f64
}

/// Contiguous masks of Family X: ACPs at `τ = 2H` for `s = 7, 14`, GCPs for
/// `s = 3, 6, 12` and for the single blocks.
pub fn verify_theorem_1(inst: &FamilyInstance, tol: f64) -> Result<Vec<TheoremVerdict>> {
    require(inst, FamilyKind::FamilyX, "verify_theorem_1")?;
    let cm = inst.descriptor.c_k()[inst.descriptor.m() - 1];
    let mut out = Vec::with_capacity(9);
    for s in [7, 14] {
        let claim = AcpClaim {
            mu: 2 * inst.h,
            value: Some(contiguous_defect(inst, s, cm)),
        };
        out.push(acp_clause(inst, 1, 1, s, claim, tol)?);
    }
    for s in [3, 6, 12] {
        out.push(gcp_clause(inst, 1, 2, s, tol)?);
    }
    for s in [1, 2, 4, 8] {
        out.push(gcp_clause(inst, 1, 3, s, tol)?);
    }
    Ok(out)
}

/// Contiguous masks of Family Y: ACPs at `τ = H` for `s = 7, 14`, size-4 CSSs
/// for `s = 3, 12`, GCPs for `s = 6` and the single blocks.
pub fn verify_theorem_2(inst: &FamilyInstance, tol: f64) -> Result<Vec<TheoremVerdict>> {
    require(inst, FamilyKind::FamilyY, "verify_theorem_2")?;
    let cm1 = inst.descriptor.c_k()[inst.descriptor.m() - 2];
    let mut out = Vec::with_capacity(9);
    for s in [7, 14] {
        let claim = AcpClaim {
            mu: inst.h,
            value: Some(contiguous_defect(inst, s, cm1)),
        };
        out.push(acp_clause(inst, 2, 1, s, claim, tol)?);
    }
    for s in [3, 12] {
        out.push(css4_clause(inst, 2, 2, s, tol)?);
    }
    out.push(gcp_clause(inst, 2, 3, 6, tol)?);
    for s in [1, 2, 4, 8] {
        out.push(gcp_clause(inst, 2, 4, s, tol)?);
    }
    Ok(out)
}

/// Non-contiguous masks of Family X: ACPs (magnitude `2H` at `τ = 2H`) for
/// `s = 11, 13`, a GCP for `s = 9`, size-4 CSSs for `s = 5, 10`.
pub fn verify_theorem_3(inst: &FamilyInstance, tol: f64) -> Result<Vec<TheoremVerdict>> {
    require(inst, FamilyKind::FamilyX, "verify_theorem_3")?;
    let mut out = Vec::with_capacity(5);
    for s in [11, 13] {
        let claim = AcpClaim {
            mu: 2 * inst.h,
            value: None,
        };
        out.push(acp_clause(inst, 3, 1, s, claim, tol)?);
    }
    out.push(gcp_clause(inst, 3, 2, 9, tol)?);
    for s in [5, 10] {
        out.push(css4_clause(inst, 3, 3, s, tol)?);
    }
    Ok(out)
}

/// Non-contiguous masks of Family Y: ACPs (magnitude `2H` at `τ = H`) for
/// `s = 11, 13` and GCPs for `s = 5, 9, 10`.
pub fn verify_theorem_4(inst: &FamilyInstance, tol: f64) -> Result<Vec<TheoremVerdict>> {
    require(inst, FamilyKind::FamilyY, "verify_theorem_4")?;
    let mut out = Vec::with_capacity(5);
    for s in [11, 13] {
        let claim = AcpClaim {
            mu: inst.h,
            value: None,
        };
        out.push(acp_clause(inst, 4, 1, s, claim, tol)?);
    }
    for s in [5, 9, 10] {
        out.push(gcp_clause(inst, 4, 2, s, tol)?);
    }
    Ok(out)
}

/// Every clause that applies to the instance's family: Theorems 1 and 3 for
/// X, 2 and 4 for Y. Plain GDJ descriptors get the whole-sequence GCP check.
pub fn verify_family(inst: &FamilyInstance, tol: f64) -> Result<Vec<TheoremVerdict>> {
    match inst.descriptor.theorem() {
        FamilyKind::FamilyX => {
            let mut v = verify_theorem_1(inst, tol)?;
            v.extend(verify_theorem_3(inst, tol)?);
            Ok(v)
        }
        FamilyKind::FamilyY => {
            let mut v = verify_theorem_2(inst, tol)?;
            v.extend(verify_theorem_4(inst, tol)?);
            Ok(v)
        }
        FamilyKind::PlainGdj => Ok(vec![gcp_clause(inst, 0, 0, 15, tol)?]),
    }
}

/// Number of clauses [`verify_family`] emits for a family.
pub fn clause_count(kind: FamilyKind) -> usize {
    match kind {
        FamilyKind::FamilyX | FamilyKind::FamilyY => 14,
        FamilyKind::PlainGdj => 1,
    }
}

fn free_and_tail(kind: FamilyKind, m: usize) -> (Vec<usize>, Vec<usize>) {
    match kind {
        FamilyKind::FamilyX => ((1..=m - 2).collect(), vec![m - 1, m]),
        FamilyKind::FamilyY => ((1..=m - 2).collect(), vec![m, m - 1]),
        FamilyKind::PlainGdj => ((1..=m).collect(), vec![]),
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Size of the descriptor space for a family, saturating at `u128::MAX`.
pub fn family_space_size(kind: FamilyKind, m: usize, q: u32) -> u128 {
    let (free, _) = free_and_tail(kind, m);
    let perms = (1..=free.len() as u128).fold(1u128, |acc, k| acc.saturating_mul(k));
    let coeffs = (0..=m).fold(1u128, |acc, _| acc.saturating_mul(q as u128));
    perms.saturating_mul(coeffs)
}

/// Deterministic descriptor stream: the full space in lexicographic order
/// (permutation, then `c_k`, then `c`) when it has at most `limit` members,
/// otherwise `limit` distinct descriptors drawn uniformly with a ChaCha8
/// generator seeded by `seed`.
pub fn enumerate_families(
    kind: FamilyKind,
    m: usize,
    q: u32,
    limit: usize,
    seed: u64,
) -> Result<Vec<FamilyDescriptor>> {
    if limit == 0 {
        return Err(Error::Precondition("limit must be at least 1".into()));
    }
    // Validates q and m against the family's constraints.
    FamilyDescriptor::standard(kind, m, q)?;
    let (free, tail) = free_and_tail(kind, m);
    let assemble = |prefix: &[usize], c_k: Vec<u32>, c: u32| {
        let pi = prefix.iter().chain(&tail).copied().collect();
        FamilyDescriptor::new(kind, q, pi, c_k, c)
    };

    if family_space_size(kind, m, q) <= limit as u128 {
        let mut out = Vec::new();
        let mut prefix = free.clone();
        loop {
            let mut c_k = vec![0u32; m];
            'coeffs: loop {
                for c in 0..q {
                    out.push(assemble(&prefix, c_k.clone(), c)?);
                }
                // Odometer over c_k, last coefficient fastest.
                for k in (0..m).rev() {
                    c_k[k] += 1;
                    if c_k[k] < q {
                        continue 'coeffs;
                    }
                    c_k[k] = 0;
                }
                break;
            }
            if !next_permutation(&mut prefix) {
                break;
            }
        }
        return Ok(out);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(limit);
    let mut out = Vec::with_capacity(limit);
    while out.len() < limit {
        let mut prefix = free.clone();
        prefix.shuffle(&mut rng);
        let c_k = (0..m).map(|_| rng.gen_range(0..q)).collect();
        let c = rng.gen_range(0..q);
        let d = assemble(&prefix, c_k, c)?;
        if seen.insert(d.clone()) {
            out.push(d);
        }
    }
    Ok(out)
}
