//! Aperiodic correlations and the complementary-pair predicates (GCP, CSS,
//! ACP, Golay mate).
//!
//! All sums are direct O(L²) evaluations of the aperiodic definition. Zero
//! entries (nulled subcarriers) take part as literal zeros.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seqcore::ComplexSequence;

/// Default absolute tolerance `1e-9 · L` on complex magnitudes.
pub fn default_tolerance(len: usize) -> f64 {
    1e-9 * len.max(1) as f64
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Tolerance(tol));
    }
    Ok(())
}

fn check_lengths(a: &ComplexSequence, b: &ComplexSequence) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.len())
}

fn xcorr_unchecked(a: &[Complex64], b: &[Complex64], tau: isize) -> Complex64 {
    let len = a.len() as isize;
    if tau.abs() >= len {
        return Complex64::new(0.0, 0.0);
    }
    if tau >= 0 {
        let t = tau as usize;
        a[..a.len() - t]
            .iter()
            .zip(&b[t..])
            .map(|(x, y)| x * y.conj())
            .sum()
    } else {
        let t = (-tau) as usize;
        a[t..]
            .iter()
            .zip(&b[..b.len() - t])
            .map(|(x, y)| x * y.conj())
            .sum()
    }
}

/// `R_{a,b}(τ)`: `Σ a(i) b*(i+τ)` for τ ≥ 0, `Σ a(i−τ) b*(i)` for τ < 0, and
/// zero once `|τ| ≥ L`.
pub fn xcorr(a: &ComplexSequence, b: &ComplexSequence, tau: isize) -> Result<Complex64> {
    check_lengths(a, b)?;
    Ok(xcorr_unchecked(a.values(), b.values(), tau))
}

/// Cross-correlation at every shift `τ = 0..L−1`.
pub fn xcorr_vector(a: &ComplexSequence, b: &ComplexSequence) -> Result<CorrelationVector> {
    let len = check_lengths(a, b)?;
    let values = (0..len as isize)
        .map(|t| xcorr_unchecked(a.values(), b.values(), t))
        .collect();
    Ok(CorrelationVector { values })
}

/// Aperiodic autocorrelation indexed by shift `τ = 0..L−1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CorrelationVector {
    values: Vec<Complex64>,
}

impl CorrelationVector {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `R(0)`, the sequence energy.
    pub fn energy(&self) -> f64 {
        self.values.first().map_or(0.0, |v| v.re)
    }

    pub fn at(&self, tau: usize) -> Complex64 {
        self.values
            .get(tau)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

pub fn autocorr_vector(a: &ComplexSequence) -> CorrelationVector {
    let v = a.values();
    CorrelationVector {
        values: (0..v.len() as isize)
            .map(|t| xcorr_unchecked(v, v, t))
            .collect(),
    }
}

/// `Σ_k R_{a_k}(τ)` for `τ = 0..L−1`.
pub fn autocorr_sum(set: &[ComplexSequence]) -> Result<Vec<Complex64>> {
    let first = set.first().ok_or(Error::EmptySet)?;
    let mut total = vec![Complex64::new(0.0, 0.0); first.len()];
    for s in set {
        check_lengths(first, s)?;
        for (acc, r) in total.iter_mut().zip(autocorr_vector(s).values) {
            *acc += r;
        }
    }
    Ok(total)
}

/// Worst residual of a correlation identity over the checked shifts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Shift where `max_residual` occurs; `None` when no shift was checked.
    pub worst_shift: Option<usize>,
    /// Residual magnitude per shift, indexed from shift 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_shift: Option<Vec<f64>>,
}

impl ResidualReport {
    fn from_magnitudes(mags: Vec<f64>, first_shift: usize) -> Self {
        let (worst_shift, max_residual) =
            mags.iter()
                .enumerate()
                .skip(first_shift)
                .fold((None, 0.0), |(ws, mr), (t, &m)| {
                    if ws.is_none() || m > mr {
                        (Some(t), m)
                    } else {
                        (ws, mr)
                    }
                });
        Self {
            max_residual,
            worst_shift,
            per_shift: Some(mags),
        }
    }

    /// Drops the per-shift detail.
    pub fn brief(mut self) -> Self {
        self.per_shift = None;
        self
    }
}

/// Verdict of a complementarity check plus its residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Complementarity {
    pub holds: bool,
    pub report: ResidualReport,
}

/// `max_{1 ≤ τ < L} |Σ_i R_{a_i}(τ)| ≤ tol`.
pub fn is_css(set: &[ComplexSequence], tol: f64) -> Result<Complementarity> {
    check_tolerance(tol)?;
    let sums = autocorr_sum(set)?;
    let report = ResidualReport::from_magnitudes(sums.iter().map(|s| s.norm()).collect(), 1);
    Ok(Complementarity {
        holds: report.max_residual <= tol,
        report,
    })
}

pub fn is_gcp(a: &ComplexSequence, b: &ComplexSequence, tol: f64) -> Result<Complementarity> {
    is_css(&[a.clone(), b.clone()], tol)
}

/// Outcome of the almost-complementary-pair test.
///
/// `mu` is the dominant out-of-phase shift of `R_a + R_b` and `defect_value`
/// its value, reported whenever some shift exceeds the tolerance. `is_acp`
/// additionally requires that shift to be the only one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcpReport {
    pub is_acp: bool,
    pub mu: Option<usize>,
    pub defect_value: Option<Complex64>,
    /// Largest residual magnitude over nonzero shifts other than `mu`.
    pub zero_energy: f64,
    /// `R_a(0) + R_b(0)`.
    pub energy: f64,
}

pub fn detect_acp(a: &ComplexSequence, b: &ComplexSequence, tol: f64) -> Result<AcpReport> {
    check_tolerance(tol)?;
    check_lengths(a, b)?;
    let sums = autocorr_sum(&[a.clone(), b.clone()])?;
    let energy = sums.first().map_or(0.0, |v| v.re);
    let over: Vec<usize> = (1..sums.len()).filter(|&t| sums[t].norm() > tol).collect();
    let mu = over
        .iter()
        .copied()
        .max_by(|&x, &y| sums[x].norm().total_cmp(&sums[y].norm()));
    let zero_energy = (1..sums.len())
        .filter(|&t| Some(t) != mu)
        .map(|t| sums[t].norm())
        .fold(0.0, f64::max);
    Ok(AcpReport {
        is_acp: over.len() == 1,
        mu,
        defect_value: mu.map(|t| sums[t]),
        zero_energy,
        energy,
    })
}

/// `max_{0 ≤ τ < L} |R_{a,c}(τ) + R_{b,d}(τ)| ≤ tol`, after confirming both
/// pairs are GCPs. A pair failing the GCP precondition is an `Err`, distinct
/// from a mate check that simply does not hold.
pub fn is_golay_mate(
    pair1: (&ComplexSequence, &ComplexSequence),
    pair2: (&ComplexSequence, &ComplexSequence),
    tol: f64,
) -> Result<Complementarity> {
    check_tolerance(tol)?;
    let (a, b) = pair1;
    let (c, d) = pair2;
    check_lengths(a, b)?;
    check_lengths(a, c)?;
    check_lengths(a, d)?;
    if !is_gcp(a, b, tol)?.holds {
        return Err(Error::Precondition("first pair is not a GCP".into()));
    }
    if !is_gcp(c, d, tol)?.holds {
        return Err(Error::Precondition("second pair is not a GCP".into()));
    }
    let ac = xcorr_vector(a, c)?;
    let bd = xcorr_vector(b, d)?;
    let mags = ac
        .values()
        .iter()
        .zip(bd.values())
        .map(|(x, y)| (x + y).norm())
        .collect();
    let report = ResidualReport::from_magnitudes(mags, 0);
    Ok(Complementarity {
        holds: report.max_residual <= tol,
        report,
    })
}
