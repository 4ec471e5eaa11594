//! Resonance parameter extraction: Lorentzian curve fits for loaded Q,
//! coupling coefficients from reflection dip depth, and unloaded Q.
//!
//! The fit model is an amplitude Lorentzian with constant baseline,
//!   y(f) = A·(w/2)² / ((f−f0)² + (w/2)²) + b,  w = FWHM,
//! solved by damped least squares with analytic derivatives: damping scales
//! the normal-equation diagonal, ×10 on a rejected step, ÷10 on an accepted
//! one, starting from 1e-3.

use crate::error::{Error, Result};
use crate::readout::{first_non_increasing, Spectrum};

/// Starting point for the iterative fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub f0: f64,
    pub fwhm: f64,
    pub amplitude: f64,
    pub baseline: f64,
}

/// Converged (or best-so-far) Lorentzian parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Line center, Hz.
    pub f0: f64,
    /// Full width at half maximum, Hz.
    pub fwhm: f64,
    /// f0 / fwhm. Derived.
    pub q_loaded: f64,
    /// Peak height above baseline, trace units (negative for dips).
    pub amplitude: f64,
    pub baseline: f64,
    /// RMS of the final residuals, trace units.
    pub residual_rms: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The fit model evaluated at one frequency.
pub fn lorentzian(f: f64, f0: f64, fwhm: f64, amplitude: f64, baseline: f64) -> f64 {
    let half = fwhm / 2.0;
    let d = f - f0;
    amplitude * half * half / (d * d + half * half) + baseline
}

fn check_trace(trace: &Spectrum, min_points: usize) -> Result<()> {
    if trace.frequencies.len() != trace.values.len() {
        return Err(Error::Validation(
            "trace has unequal frequency and value lengths".into(),
        ));
    }
    if trace.len() < min_points {
        return Err(Error::InsufficientData(format!(
            "trace has {} points, need at least {min_points}",
            trace.len()
        )));
    }
    if let Some(i) = first_non_increasing(&trace.frequencies) {
        return Err(Error::Validation(format!(
            "trace frequencies must be strictly increasing (sample {i})"
        )));
    }
    Ok(())
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Peak-based starting parameters: baseline from the median, f0 at the
/// largest |value − baseline| (lowest frequency wins ties), FWHM from the
/// half-maximum crossings by linear interpolation with a 10-grid-step
/// fallback.
pub fn estimate_initial(trace: &Spectrum) -> Result<InitialGuess> {
    check_trace(trace, 7)?;
    let baseline = median(&trace.values);
    let deviation: Vec<f64> = trace.values.iter().map(|v| v - baseline).collect();

    let mut peak = 0usize;
    for (i, d) in deviation.iter().enumerate() {
        if d.abs() > deviation[peak].abs() {
            peak = i;
        }
    }
    let amplitude = deviation[peak];
    if amplitude == 0.0 {
        return Err(Error::Domain("no peak found".into()));
    }
    let f0 = trace.frequencies[peak];

    let half = amplitude.abs() / 2.0;
    let crossing = |i: usize, j: usize| -> f64 {
        // |deviation| crosses `half` between samples i and j
        let (di, dj) = (deviation[i].abs(), deviation[j].abs());
        let t = if dj == di { 0.5 } else { (half - di) / (dj - di) };
        trace.frequencies[i] + t * (trace.frequencies[j] - trace.frequencies[i])
    };
    let mut left = None;
    for i in (0..peak).rev() {
        if deviation[i].abs() <= half {
            left = Some(crossing(i, i + 1));
            break;
        }
    }
    let mut right = None;
    for (i, d) in deviation.iter().enumerate().skip(peak + 1) {
        if d.abs() <= half {
            right = Some(crossing(i, i - 1));
            break;
        }
    }
    let step = (trace.frequencies[trace.len() - 1] - trace.frequencies[0])
        / (trace.len() - 1) as f64;
    let fwhm = match (left, right) {
        (Some(l), Some(r)) if r > l => r - l,
        _ => 10.0 * step,
    };
    Ok(InitialGuess {
        f0,
        fwhm,
        amplitude,
        baseline,
    })
}

/// Solves a 4×4 linear system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4]> {
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(Error::SingularStep(
                "normal equations are degenerate".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut sum = b[row];
        for k in row + 1..4 {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Ok(x)
}

fn sum_squared_residuals(trace: &Spectrum, p: &[f64; 4]) -> f64 {
    trace
        .frequencies
        .iter()
        .zip(&trace.values)
        .map(|(&f, &y)| {
            let r = y - lorentzian(f, p[0], p[1], p[2], p[3]);
            r * r
        })
        .sum()
}

const MAX_ITERATIONS: usize = 200;
const PARAM_REL_TOL: f64 = 1e-10;

/// Fits the Lorentzian model to a trace. Starts from `init` when given,
/// otherwise from [`estimate_initial`].
///
/// Stops when the relative change of every parameter on an accepted step
/// falls below 1e-10, or after 200 iterations (`converged` is then false
/// and the best parameters so far are returned).
pub fn fit_lorentzian(trace: &Spectrum, init: Option<InitialGuess>) -> Result<FitResult> {
    check_trace(trace, 4)?;
    let g = match init {
        Some(g) => g,
        None => estimate_initial(trace)?,
    };
    let mut p = [g.f0, g.fwhm, g.amplitude, g.baseline];
    let mut cost = sum_squared_residuals(trace, &p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    // Magnitude floors so the relative-step criterion stays meaningful for
    // parameters whose optimum is zero (a flat baseline, say): frequency-like
    // parameters scale with the grid, value-like ones with the trace values.
    let n = trace.len();
    let f_scale = trace.frequencies[0].abs().max(trace.frequencies[n - 1].abs());
    let f_span = trace.frequencies[n - 1] - trace.frequencies[0];
    let y_scale = trace
        .values
        .iter()
        .fold(f64::MIN_POSITIVE, |a, v| a.max(v.abs()));
    let param_scale = [f_scale, f_span, y_scale, y_scale];

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        let half = p[1] / 2.0;
        for (&f, &y) in trace.frequencies.iter().zip(&trace.values) {
            let d = f - p[0];
            let den = d * d + half * half;
            let shape = half * half / den;
            let residual = y - (p[2] * shape + p[3]);
            let jac = [
                2.0 * p[2] * half * half * d / (den * den),
                p[2] * half * d * d / (den * den),
                shape,
                1.0,
            ];
            for i in 0..4 {
                jtr[i] += jac[i] * residual;
                for j in 0..4 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }

        let mut damped = jtj;
        for i in 0..4 {
            damped[i][i] += lambda * jtj[i][i];
        }
        let delta = solve4(damped, jtr)?;

        let small = (0..4).all(|i| {
            delta[i].abs() <= PARAM_REL_TOL * p[i].abs().max(1e-3 * param_scale[i])
        });
        let trial = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2], p[3] + delta[3]];
        let trial_cost = sum_squared_residuals(trace, &trial);
        if trial_cost <= cost {
            p = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-15);
        } else {
            lambda *= 10.0;
        }
        // a negligible proposed step means there is nothing left to gain,
        // whether or not this one was accepted
        if small {
            converged = true;
            break;
        }
        if lambda > 1e15 {
            break;
        }
    }

    // the model is even in the width's sign; report it positive
    let fwhm = p[1].abs();
    Ok(FitResult {
        f0: p[0],
        fwhm,
        q_loaded: p[0] / fwhm,
        amplitude: p[2],
        baseline: p[3],
        residual_rms: (cost / trace.len() as f64).sqrt(),
        iterations,
        converged,
    })
}

/// Which side of critical coupling a reflection dip sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingBranch {
    Undercoupled,
    Overcoupled,
}

/// Port coupling coefficient from the reflection dip depth |S11| at
/// resonance: β = (1−|S11|)/(1+|S11|) undercoupled, (1+|S11|)/(1−|S11|)
/// overcoupled.
pub fn beta_from_reflection(s11_min_magnitude: f64, branch: CouplingBranch) -> Result<f64> {
    if !(0.0..=1.0).contains(&s11_min_magnitude) {
        return Err(Error::Domain(format!(
            "|S11| must be in [0, 1], got {s11_min_magnitude}"
        )));
    }
    match branch {
        CouplingBranch::Undercoupled => {
            Ok((1.0 - s11_min_magnitude) / (1.0 + s11_min_magnitude))
        }
        CouplingBranch::Overcoupled => {
            if s11_min_magnitude == 1.0 {
                return Err(Error::Domain(
                    "overcoupled branch is undefined at |S11| = 1".into(),
                ));
            }
            Ok((1.0 + s11_min_magnitude) / (1.0 - s11_min_magnitude))
        }
    }
}

/// Resonance dip depth |S11| for a given coupling coefficient; inverts
/// [`beta_from_reflection`].
pub fn reflection_from_beta(beta: f64, branch: CouplingBranch) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::Domain("beta must be >= 0".into()));
    }
    let s = match branch {
        CouplingBranch::Undercoupled => (1.0 - beta) / (1.0 + beta),
        CouplingBranch::Overcoupled => (beta - 1.0) / (beta + 1.0),
    };
    Ok(s.abs())
}

/// Unloaded quality factor Q0 = Q_L·(1 + β1 + β2).
pub fn unloaded_q(q_loaded: f64, beta1: f64, beta2: f64) -> f64 {
    q_loaded * (1.0 + beta1 + beta2)
}
