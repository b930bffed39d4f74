//! Envelope power of a multicarrier symbol and its peak-to-mean ratio.
//!
//! Time is the dimensionless fraction `t_frac = t/T = t·Δf` in `[0, 1)`. The
//! power `P(t)` has two algebraically identical forms: the correlation form
//! `R(0) + 2·Re Σ_{τ≥1} R(τ) e^{2π√-1 τ t}` and the spectral form
//! `|Σ_i a(i) e^{2π√-1 i t}|²`. Grids use the spectral form through an FFT;
//! the correlation form is kept as an independent cross-check.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::correlation::{autocorr_sum, autocorr_vector};
use crate::error::{Error, Result};
use crate::seqcore::ComplexSequence;

pub const DEFAULT_OVERSAMPLING: usize = 128;
pub const MIN_OVERSAMPLING: usize = 4;

/// How the supremum over `t` is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// The `L` points `t = n/L` of an L-point inverse DFT. No oversampling,
    /// no refinement: a lower bound on the true supremum.
    Critical,
    /// `factor · L` uniform points, optionally refined around local maxima.
    Oversampled { factor: usize, refine: bool },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Oversampled {
            factor: DEFAULT_OVERSAMPLING,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PmeprResult {
    pub pmepr: f64,
    /// `t/T` of the detected peak.
    pub peak_time_fraction: f64,
    pub average_power: f64,
    /// Grid points per subcarrier; 1 for the critical grid.
    pub oversampling_factor: usize,
    pub refined: bool,
    /// `|PMEPR(2k) − PMEPR(k)|` when a convergence certificate was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_delta: Option<f64>,
}

/// Correlation form of the instantaneous power,
/// `R(0) + 2 Re Σ_{τ≥1} R(τ) e^{−2π√-1 τ t}` with `R(τ) = Σ a_i a*_{i+τ}`.
pub fn instantaneous_power(a: &ComplexSequence, t_frac: f64) -> f64 {
    let r = autocorr_vector(a);
    let tail: Complex64 = r
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(tau, v)| v * Complex64::from_polar(1.0, -2.0 * PI * tau as f64 * t_frac))
        .sum();
    r.energy() + 2.0 * tail.re
}

/// Spectral (squared-magnitude) form of the instantaneous power.
pub fn spectral_power(a: &ComplexSequence, t_frac: f64) -> f64 {
    spectral_power_raw(a.values(), t_frac)
}

fn spectral_power_raw(values: &[Complex64], t_frac: f64) -> f64 {
    let step = Complex64::from_polar(1.0, 2.0 * PI * t_frac);
    // Horner from the top coefficient keeps the phase accurate without
    // recomputing exp per term.
    values
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc * step + v)
        .norm_sqr()
}

/// `R(0)`, the squared norm.
pub fn average_power(a: &ComplexSequence) -> f64 {
    a.values().iter().map(|v| v.norm_sqr()).sum()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// `P(n/points)` for `n = 0..points`.
pub fn power_grid(a: &ComplexSequence, points: usize) -> Result<Vec<f64>> {
    if points < 1 {
        return Err(Error::TracePoints(points));
    }
    // Fold entries modulo the grid size; exact because e^{2π√-1 k n/N} is
    // N-periodic in k.
    let mut buf = vec![Complex64::new(0.0, 0.0); points];
    for (k, v) in a.values().iter().enumerate() {
        buf[k % points] += v;
    }
    inverse_plan(points).process(&mut buf);
    Ok(buf.into_iter().map(|v| v.norm_sqr()).collect())
}

fn nonzero_average(a: &ComplexSequence) -> Result<f64> {
    let avg = average_power(a);
    if avg == 0.0 {
        return Err(Error::ZeroSequence);
    }
    Ok(avg)
}

/// Oversampled PMEPR: `oversampling · L` grid points, then (if `refine`)
/// parabolic interpolation around local maxima with exact re-evaluation at
/// each interpolated vertex.
pub fn pmepr(a: &ComplexSequence, oversampling: usize, refine: bool) -> Result<PmeprResult> {
    pmepr_with(
        a,
        Sampling::Oversampled {
            factor: oversampling,
            refine,
        },
    )
}

/// PMEPR on the critical grid `t = n/L`.
pub fn pmepr_critical(a: &ComplexSequence) -> Result<PmeprResult> {
    pmepr_with(a, Sampling::Critical)
}

pub fn pmepr_with(a: &ComplexSequence, sampling: Sampling) -> Result<PmeprResult> {
    let avg = nonzero_average(a)?;
    let (factor, refine) = match sampling {
        Sampling::Critical => (1, false),
        Sampling::Oversampled { factor, refine } => {
            if factor < MIN_OVERSAMPLING {
                return Err(Error::Oversampling(factor));
            }
            (factor, refine)
        }
    };
    let n = factor * a.len();
    let grid = power_grid(a, n)?;
    let (mut best_idx, mut best) = (0, grid[0]);
    for (i, &p) in grid.iter().enumerate() {
        if p > best {
            best_idx = i;
            best = p;
        }
    }
    let mut peak_t = best_idx as f64 / n as f64;
    if refine {
        let (t, p) = refine_peaks(a.values(), &grid, factor, best);
        if p > best {
            best = p;
            peak_t = t;
        }
    }
    Ok(PmeprResult {
        pmepr: best / avg,
        peak_time_fraction: peak_t.rem_euclid(1.0),
        average_power: avg,
        oversampling_factor: factor,
        refined: refine,
        convergence_delta: None,
    })
}

/// Oversampled PMEPR at `2·oversampling` carrying the difference to the value
/// at `oversampling` as a convergence certificate. Both passes are refined.
pub fn pmepr_certified(a: &ComplexSequence, oversampling: usize) -> Result<PmeprResult> {
    let coarse = pmepr(a, oversampling, true)?;
    let mut fine = pmepr(a, 2 * oversampling, true)?;
    fine.convergence_delta = Some((fine.pmepr - coarse.pmepr).abs());
    Ok(fine)
}

fn parabola_vertex(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-1.0, 1.0)
}

fn refine_peaks(values: &[Complex64], grid: &[f64], factor: usize, grid_max: f64) -> (f64, f64) {
    let n = grid.len();
    let h = 1.0 / n as f64;
    // P is a trigonometric polynomial of degree < L, so by Bernstein's
    // inequality a grid sample sits at most c·sup P below the peak it
    // brackets, c = (π²/2)/factor². Local maxima further down cannot win.
    let c = 0.5 * (PI / factor as f64).powi(2);
    let floor = grid_max * (1.0 - c / (1.0 - c).max(f64::EPSILON));
    let mut best = (0.0, f64::MIN);
    for i in 0..n {
        let mid = grid[i];
        if mid < floor {
            continue;
        }
        let left = grid[(i + n - 1) % n];
        let right = grid[(i + 1) % n];
        if mid < left || mid < right {
            continue;
        }
        let mut t = (i as f64 + parabola_vertex(left, mid, right)) * h;
        let mut p = spectral_power_raw(values, t);
        if p < mid {
            t = i as f64 * h;
            p = mid;
        }
        // Second pass at a quarter step around the first vertex.
        let step = h / 4.0;
        let l2 = spectral_power_raw(values, t - step);
        let r2 = spectral_power_raw(values, t + step);
        let t2 = t + parabola_vertex(l2, p, r2) * step;
        let p2 = spectral_power_raw(values, t2);
        for (tc, pc) in [(t, p), (t - step, l2), (t + step, r2), (t2, p2)] {
            if pc > best.1 {
                best = (tc, pc);
            }
        }
    }
    best
}

/// `P(t_n)/P_av` on the uniform grid `t_n = n/points`.
pub fn imepr_trace(a: &ComplexSequence, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::TracePoints(points));
    }
    let avg = nonzero_average(a)?;
    Ok(power_grid(a, points)?
        .into_iter()
        .map(|p| p / avg)
        .collect())
}

/// Right-hand side of the correlation-sum bound for member `member_index` of
/// `set`: `(Σ_k R_k(0) + 2 Σ_{τ≥1} |Σ_k R_k(τ)|) / R_i(0)`.
pub fn css_pmepr_bound(set: &[ComplexSequence], member_index: usize) -> Result<f64> {
    let member = set.get(member_index).ok_or_else(|| {
        Error::Precondition(format!(
            "member index {member_index} outside a set of {}",
            set.len()
        ))
    })?;
    let own = average_power(member);
    if own == 0.0 {
        return Err(Error::ZeroSequence);
    }
    let sums = autocorr_sum(set)?;
    let tail: f64 = sums.iter().skip(1).map(|s| s.norm()).sum();
    Ok((sums[0].re + 2.0 * tail) / own)
}
