//! Readout-chain simulation: piezoelectrically driven mechanical response,
//! FM sidebands on the microwave carrier, and the phase-bridge mixer output
//! trace.
//!
//! The bridge is modeled as an ideal quadrature frequency discriminator with
//! flat response over the mechanical bandwidth and zero AM-to-voltage
//! leakage. The mechanical response is a single-pole linear resonance; the
//! simulator never saturates.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::AcousticMode;

/// Sinusoidal drive applied across the split posts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Drive amplitude, V.
    pub voltage_amplitude: f64,
    /// Drive frequency, Hz.
    pub frequency: f64,
}

impl DriveSpec {
    pub fn new(voltage_amplitude: f64, frequency: f64) -> Result<Self> {
        if voltage_amplitude < 0.0 {
            return Err(Error::Validation("voltage_amplitude must be >= 0".into()));
        }
        if frequency <= 0.0 {
            return Err(Error::Validation("drive frequency must be > 0".into()));
        }
        Ok(Self {
            voltage_amplitude,
            frequency,
        })
    }
}

/// Phase-bridge frequency discriminator.
///
/// The voltage-per-hertz sensitivity is K_φ·2·Q_L/f_c, the transmission
/// phase slope of a critically tuned resonator times the mixer gain.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorSpec {
    /// Mixer phase-to-voltage gain, V/rad.
    pub phase_gain_k_phi: f64,
    pub q_loaded: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    /// Voltage per unit cavity-frequency shift, V/Hz. Derived.
    pub sensitivity: f64,
}

impl DiscriminatorSpec {
    pub fn new(phase_gain_k_phi: f64, q_loaded: f64, f_c: f64) -> Result<Self> {
        if phase_gain_k_phi <= 0.0 || q_loaded <= 0.0 || f_c <= 0.0 {
            return Err(Error::Validation(
                "phase_gain_k_phi, q_loaded and f_c must all be > 0".into(),
            ));
        }
        Ok(Self {
            phase_gain_k_phi,
            q_loaded,
            f_c,
            sensitivity: discriminator_sensitivity(phase_gain_k_phi, q_loaded, f_c),
        })
    }
}

/// Discriminator sensitivity dV/df = K_φ·2·Q_L/f_c, V/Hz.
pub fn discriminator_sensitivity(phase_gain_k_phi: f64, q_loaded: f64, f_c: f64) -> f64 {
    phase_gain_k_phi * 2.0 * q_loaded / f_c
}

/// A sampled frequency-domain trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Strictly increasing sample frequencies, Hz.
    pub frequencies: Vec<f64>,
    /// Sample values (V for mixer traces, dimensionless for normalized ones).
    pub values: Vec<f64>,
    pub label: String,
}

impl Spectrum {
    pub fn new(frequencies: Vec<f64>, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if frequencies.len() != values.len() {
            return Err(Error::Validation(format!(
                "spectrum needs equal lengths, got {} frequencies and {} values",
                frequencies.len(),
                values.len()
            )));
        }
        if let Some(i) = first_non_increasing(&frequencies) {
            return Err(Error::Validation(format!(
                "spectrum frequencies must be strictly increasing (sample {i})"
            )));
        }
        Ok(Self {
            frequencies,
            values,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Index of the first sample whose frequency fails to increase, if any.
pub(crate) fn first_non_increasing(frequencies: &[f64]) -> Option<usize> {
    frequencies
        .windows(2)
        .position(|w| w[1] <= w[0])
        .map(|i| i + 1)
}

/// Steady-state response of the driven mode to a force F = k_m·V:
/// (displacement amplitude in m, phase lag in rad).
///
/// amplitude = (F/m_eff) / sqrt((ω_m²−ω_d²)² + (ω_d·ω_m/Q_m)²),
/// phase = atan2(ω_d·ω_m/Q_m, ω_m²−ω_d²), with ω = 2π·f.
pub fn driven_response(mode: &AcousticMode, k_m: f64, drive: &DriveSpec) -> (f64, f64) {
    let w_m = TAU * mode.f_m;
    let w_d = TAU * drive.frequency;
    let force = k_m * drive.voltage_amplitude;
    let re = w_m * w_m - w_d * w_d;
    let im = w_d * w_m / mode.q_m;
    let amplitude = (force / mode.m_eff) / re.hypot(im);
    (amplitude, im.atan2(re))
}

/// Bessel function of the first kind J_k(x) of integer order, by the
/// ascending power series. Accurate to better than 1e-12 for |x| ≲ 10, the
/// modulation indices this module deals in.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    for i in 1..=order {
        term *= half / i as f64;
    }
    let mut sum = term;
    let step = -(half * half);
    let mut m = 1.0;
    while m <= 400.0 {
        term *= step / (m * (m + order as f64));
        sum += term;
        if term.abs() < 1e-22 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// FM sideband spectrum together with its truncation diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSpectrum {
    pub spectrum: Spectrum,
    /// Modulation index β = peak_deviation / f_mod.
    pub modulation_index: f64,
    /// Set when |J_max_order(β)| > 1e-6, i.e. the kept orders miss
    /// significant power.
    pub truncation_significant: bool,
}

/// Sideband lines at f_c ± k·f_mod, k = 0..max_order, with relative
/// amplitudes |J_k(β)| where β = peak_deviation / f_mod.
pub fn fm_sideband_spectrum(
    f_c: f64,
    peak_deviation: f64,
    f_mod: f64,
    max_order: usize,
) -> Result<SidebandSpectrum> {
    if f_mod <= 0.0 {
        return Err(Error::Domain("f_mod must be > 0".into()));
    }
    if max_order < 1 {
        return Err(Error::Domain("max_order must be >= 1".into()));
    }
    if peak_deviation < 0.0 {
        return Err(Error::Domain("peak_deviation must be >= 0".into()));
    }
    let beta = peak_deviation / f_mod;
    let amplitudes: Vec<f64> = (0..=max_order)
        .map(|k| bessel_j(k as u32, beta).abs())
        .collect();

    let orders = -(max_order as i64)..=max_order as i64;
    let mut frequencies = Vec::with_capacity(2 * max_order + 1);
    let mut values = Vec::with_capacity(2 * max_order + 1);
    for k in orders {
        frequencies.push(f_c + k as f64 * f_mod);
        values.push(amplitudes[k.unsigned_abs() as usize]);
    }
    Ok(SidebandSpectrum {
        spectrum: Spectrum::new(frequencies, values, "fm_sidebands")?,
        modulation_index: beta,
        truncation_significant: amplitudes[max_order] > 1e-6,
    })
}

/// Mixer output line for a drive-frequency sweep at fixed voltage.
///
/// The line is a Lorentzian of FWHM f_m/Q_m centered on f_m whose peak
/// voltage is sensitivity · G · x_res, with x_res the on-resonance
/// [`driven_response`] amplitude; the peak is therefore linear in both the
/// drive voltage and the pull factor.
pub fn mixer_output_trace(
    mode: &AcousticMode,
    k_m: f64,
    disc: &DiscriminatorSpec,
    pull_factor_g: f64,
    drive_sweep: &[DriveSpec],
) -> Result<Spectrum> {
    if drive_sweep.is_empty() {
        return Err(Error::InsufficientData("empty drive sweep".into()));
    }
    let voltage = drive_sweep[0].voltage_amplitude;
    if drive_sweep
        .iter()
        .any(|d| d.voltage_amplitude != voltage)
    {
        return Err(Error::Domain(
            "all drives in a sweep must share the same voltage_amplitude".into(),
        ));
    }
    let frequencies: Vec<f64> = drive_sweep.iter().map(|d| d.frequency).collect();
    if let Some(i) = first_non_increasing(&frequencies) {
        return Err(Error::Domain(format!(
            "drive frequencies must be strictly increasing (sample {i})"
        )));
    }

    let on_resonance = DriveSpec {
        voltage_amplitude: voltage,
        frequency: mode.f_m,
    };
    let (x_res, _) = driven_response(mode, k_m, &on_resonance);
    let peak = disc.sensitivity * pull_factor_g * x_res;

    let half_width = mode.f_m / mode.q_m / 2.0;
    let values: Vec<f64> = frequencies
        .iter()
        .map(|&f| {
            let detuning = f - mode.f_m;
            peak * half_width * half_width / (detuning * detuning + half_width * half_width)
        })
        .collect();
    Spectrum::new(frequencies, values, format!("mixer_output {}", mode.label))
}

/// One mixer trace per drive voltage over a shared frequency grid.
///
/// Peak amplitudes are proportional to voltage; the linewidth is identical
/// across traces.
pub fn power_sweep(
    mode: &AcousticMode,
    k_m: f64,
    disc: &DiscriminatorSpec,
    pull_factor_g: f64,
    voltages: &[f64],
    freq_grid: &[f64],
) -> Result<Vec<Spectrum>> {
    if voltages.is_empty() {
        return Err(Error::InsufficientData("empty voltage list".into()));
    }
    if voltages[0] <= 0.0 || voltages.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "voltages must be positive and strictly ascending".into(),
        ));
    }
    voltages
        .iter()
        .map(|&v| {
            let drives: Vec<DriveSpec> = freq_grid
                .iter()
                .map(|&f| DriveSpec {
                    voltage_amplitude: v,
                    frequency: f,
                })
                .collect();
            let mut trace = mixer_output_trace(mode, k_m, disc, pull_factor_g, &drives)?;
            trace.label = format!("mixer_output {} at {v:e} V", mode.label);
            Ok(trace)
        })
        .collect()
}

/// Default simulation grid: f_m ± 10 linewidths, 2001 points.
pub fn default_frequency_grid(mode: &AcousticMode) -> Vec<f64> {
    frequency_grid(mode.f_m, mode.f_m / mode.q_m, 10.0, 2001)
}

/// Uniform grid spanning `center ± span_widths·fwhm` with `points` samples.
pub fn frequency_grid(center: f64, fwhm: f64, span_widths: f64, points: usize) -> Vec<f64> {
    let start = center - span_widths * fwhm;
    let step = 2.0 * span_widths * fwhm / (points - 1) as f64;
    (0..points).map(|i| start + i as f64 * step).collect()
}

/// Adds seeded white Gaussian noise with standard deviation
/// `relative_sigma · max|value|`. The same seed always produces the same
/// trace.
pub fn with_additive_noise(spectrum: &Spectrum, relative_sigma: f64, seed: u64) -> Spectrum {
    let scale = spectrum
        .values
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let sigma = relative_sigma * scale;
    if sigma <= 0.0 {
        return spectrum.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma is positive and finite");
    let values = spectrum
        .values
        .iter()
        .map(|v| v + normal.sample(&mut rng))
        .collect();
    Spectrum {
        frequencies: spectrum.frequencies.clone(),
        values,
        label: spectrum.label.clone(),
    }
}
