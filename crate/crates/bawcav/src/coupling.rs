//! Closed-form optomechanical and piezoelectric quantities: zero-point
//! fluctuation, piezoelectric coupling constant, motional current and
//! displacement, frequency pull factor, single-photon coupling rate and
//! cooperativity.
//!
//! All linewidths entering these formulas are cycle frequencies in Hz,
//! matching the rest of the crate; the cooperativity is invariant to that
//! choice as long as it is applied consistently.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::PhysicalConstants;

/// Which measurement path produced a coupling result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingSource {
    /// g0 computed from a measured pull factor: g0 = G · x_zpf.
    MeasuredPull,
    /// g0 taken from a published table; G implied as g0 / x_zpf.
    TableG0,
}

impl CouplingSource {
    pub fn label(&self) -> &'static str {
        match self {
            CouplingSource::MeasuredPull => "measured-G",
            CouplingSource::TableG0 => "table-g0",
        }
    }
}

impl fmt::Display for CouplingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Full coupling chain for one (acoustic mode, cavity mode) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    /// Zero-point fluctuation, m.
    pub x_zpf: f64,
    /// Frequency pull factor |dω_c/dx|, Hz/m.
    pub pull_factor_g: f64,
    /// Single-photon coupling rate, Hz.
    pub g0: f64,
    /// Single-photon cooperativity 4·g0² / (Γ_m·κ_c).
    pub c0: f64,
    pub source: CouplingSource,
}

impl CouplingResult {
    pub fn from_measured_pull(
        pull_factor_g: f64,
        x_zpf: f64,
        gamma_m: f64,
        kappa_c: f64,
    ) -> Result<Self> {
        let g0 = coupling_rate(pull_factor_g, x_zpf);
        Ok(Self {
            x_zpf,
            pull_factor_g,
            g0,
            c0: cooperativity(g0, gamma_m, kappa_c)?,
            source: CouplingSource::MeasuredPull,
        })
    }

    pub fn from_table_g0(g0: f64, x_zpf: f64, gamma_m: f64, kappa_c: f64) -> Result<Self> {
        if x_zpf <= 0.0 {
            return Err(Error::Domain("x_zpf must be > 0".into()));
        }
        Ok(Self {
            x_zpf,
            pull_factor_g: g0 / x_zpf,
            g0,
            c0: cooperativity(g0, gamma_m, kappa_c)?,
            source: CouplingSource::TableG0,
        })
    }
}

/// One point of a frequency-pull measurement: an imposed displacement and
/// the cavity shift it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullSample {
    /// Imposed displacement, m. Must be > 0.
    pub delta_x: f64,
    /// Measured cavity frequency shift, Hz.
    pub delta_f_c: f64,
}

/// Zero-point fluctuation x_zpf = sqrt(2ħ / (ω_m·m_eff)), m, with
/// ω_m = 2π·f_m.
///
/// This is the factor-2 convention used throughout this crate; see
/// [`conventional_zero_point_fluctuation`] for the sqrt(ħ/(2·m·ω)) variant,
/// which is exactly half.
pub fn zero_point_fluctuation(f_m: f64, m_eff: f64, constants: &PhysicalConstants) -> f64 {
    (2.0 * constants.hbar() / (TAU * f_m * m_eff)).sqrt()
}

/// The sqrt(ħ / (2·m_eff·ω_m)) convention, provided for comparison with
/// results quoted under it.
pub fn conventional_zero_point_fluctuation(
    f_m: f64,
    m_eff: f64,
    constants: &PhysicalConstants,
) -> f64 {
    (constants.hbar() / (2.0 * m_eff * TAU * f_m)).sqrt()
}

/// Piezoelectric coupling constant k_m = sqrt(ω_m·m_eff / (q_m·r_m)), C/m,
/// from the motional-branch circuit relations.
pub fn piezo_coupling_constant(f_m: f64, m_eff: f64, q_m: f64, r_m: f64) -> f64 {
    (TAU * f_m * m_eff / (q_m * r_m)).sqrt()
}

/// Motional current I = k_m·ω_m·x, A.
pub fn motional_current(k_m: f64, f_m: f64, displacement: f64) -> f64 {
    k_m * TAU * f_m * displacement
}

/// Displacement x = I / (k_m·ω_m), m, inverting [`motional_current`].
pub fn displacement_from_current(k_m: f64, f_m: f64, current: f64) -> Result<f64> {
    if k_m * f_m == 0.0 {
        return Err(Error::Domain(
            "displacement_from_current requires k_m and f_m to be nonzero".into(),
        ));
    }
    Ok(current / (k_m * TAU * f_m))
}

/// Frequency pull factor from (Δx, Δf_c) samples: the magnitude of the
/// least-squares slope through the origin.
pub fn pull_factor(samples: &[PullSample]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(
            "pull_factor needs at least 2 samples".into(),
        ));
    }
    if samples.iter().any(|s| s.delta_x <= 0.0) {
        return Err(Error::Domain("every delta_x must be > 0".into()));
    }
    let first = samples[0].delta_x;
    if samples.iter().all(|s| s.delta_x == first) {
        return Err(Error::Domain(
            "degenerate samples: all delta_x are equal".into(),
        ));
    }
    let sxy: f64 = samples.iter().map(|s| s.delta_x * s.delta_f_c).sum();
    let sxx: f64 = samples.iter().map(|s| s.delta_x * s.delta_x).sum();
    Ok((sxy / sxx).abs())
}

/// Single-photon coupling rate g0 = G·x_zpf, Hz.
pub fn coupling_rate(pull_factor_g: f64, x_zpf: f64) -> f64 {
    pull_factor_g * x_zpf
}

/// Single-photon cooperativity C0 = 4·g0² / (Γ_m·κ_c).
pub fn cooperativity(g0: f64, gamma_m: f64, kappa_c: f64) -> Result<f64> {
    if gamma_m <= 0.0 || kappa_c <= 0.0 {
        return Err(Error::Domain(
            "cooperativity requires positive linewidths".into(),
        ));
    }
    Ok(4.0 * g0 * g0 / (gamma_m * kappa_c))
}

/// Mechanical linewidth implied by a (g0, C0) pair: Γ_m = 4·g0² / (C0·κ_c),
/// Hz. Inverts [`cooperativity`].
pub fn implied_mechanical_linewidth(g0: f64, c0: f64, kappa_c: f64) -> Result<f64> {
    if c0 <= 0.0 || kappa_c <= 0.0 {
        return Err(Error::Domain(
            "implied linewidth requires positive c0 and kappa_c".into(),
        ));
    }
    Ok(4.0 * g0 * g0 / (c0 * kappa_c))
}

/// Ratio of electrical-energy fractions inside the mechanical mode volume
/// for two cavity geometries. Both fractions must lie in (0, 1].
pub fn overlap_ratio(fraction_split: f64, fraction_single: f64) -> Result<f64> {
    for (name, value) in [("fraction_split", fraction_split), ("fraction_single", fraction_single)]
    {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::Domain(format!(
                "{name} must be in (0, 1], got {value}"
            )));
        }
    }
    Ok(fraction_split / fraction_single)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rel_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constants() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn zero_point_fluctuation_matches_oracle() {
        let x = zero_point_fluctuation(8.3e6, 3.52e-7, &constants());
        assert!(rel_diff(x, 3.389633679132155e-18) < 1e-12);
        let x = zero_point_fluctuation(4.7e6, 4.15e-7, &constants());
        assert!(rel_diff(x, 4.148491138420401e-18) < 1e-12);
    }

    #[test]
    fn quadrupled_mass_halves_x_zpf() {
        let c = constants();
        let x1 = zero_point_fluctuation(8.3e6, 3.52e-7, &c);
        let x4 = zero_point_fluctuation(8.3e6, 4.0 * 3.52e-7, &c);
        assert!(rel_diff(2.0 * x4, x1) < 1e-12);
    }

    #[test]
    fn conventional_convention_is_exactly_half() {
        let c = constants();
        let full = zero_point_fluctuation(8.3e6, 3.52e-7, &c);
        let conv = conventional_zero_point_fluctuation(8.3e6, 3.52e-7, &c);
        assert!(rel_diff(2.0 * conv, full) < 1e-12);
    }

    #[test]
    fn piezo_coupling_constant_matches_oracle() {
        let k = piezo_coupling_constant(8.3e6, 3.52e-7, 1e6, 100.0);
        assert!(rel_diff(k, 4.2845016271972493e-4) < 1e-12);
        // quadrupling r_m halves k_m
        let k4 = piezo_coupling_constant(8.3e6, 3.52e-7, 1e6, 400.0);
        assert!(rel_diff(2.0 * k4, k) < 1e-12);
    }

    #[test]
    fn piezo_coupling_round_trips_to_mass() {
        let (f, m, q, r) = (8.3e6, 3.52e-7, 1e6, 100.0);
        let k = piezo_coupling_constant(f, m, q, r);
        let back = k * k * q * r / (TAU * f);
        assert!(rel_diff(back, m) < 1e-12);
    }

    #[test]
    fn motional_current_matches_oracle_and_inverts() {
        let i = motional_current(4.285e-4, 8.3e6, 1e-12);
        assert!(rel_diff(i, 2.235e-8) < 1e-3);
        assert_eq!(motional_current(4.285e-4, 8.3e6, 0.0), 0.0);

        let x = displacement_from_current(4.285e-4, 8.3e6, i).unwrap();
        assert!(rel_diff(x, 1e-12) < 1e-12);
        assert_eq!(displacement_from_current(4.285e-4, 8.3e6, 0.0).unwrap(), 0.0);
        assert!(displacement_from_current(0.0, 8.3e6, 1.0).is_err());
    }

    #[test]
    fn pull_factor_recovers_exact_slope() {
        let samples: Vec<PullSample> = [(1e-12, 44.0), (2e-12, 88.0), (3e-12, 132.0)]
            .iter()
            .map(|&(delta_x, delta_f_c)| PullSample { delta_x, delta_f_c })
            .collect();
        let g = pull_factor(&samples).unwrap();
        assert!(rel_diff(g, 4.4e13) < 1e-12);
        assert!(rel_diff(pull_factor(&samples[..2]).unwrap(), 4.4e13) < 1e-12);
    }

    #[test]
    fn pull_factor_with_noise_stays_within_two_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<PullSample> = (1..=20)
            .map(|i| {
                let delta_x = i as f64 * 1e-15;
                let noise = 1.0 + rng.gen_range(-0.01..0.01);
                PullSample {
                    delta_x,
                    delta_f_c: 4.4e13 * delta_x * noise,
                }
            })
            .collect();
        let g = pull_factor(&samples).unwrap();
        assert!(rel_diff(g, 4.4e13) < 0.02, "g = {g:e}");
    }

    #[test]
    fn pull_factor_error_paths() {
        let one = [PullSample { delta_x: 1e-15, delta_f_c: 44.0 }];
        assert!(matches!(
            pull_factor(&one),
            Err(Error::InsufficientData(_))
        ));
        let equal = [
            PullSample { delta_x: 1e-15, delta_f_c: 44.0 },
            PullSample { delta_x: 1e-15, delta_f_c: 45.0 },
        ];
        assert!(matches!(pull_factor(&equal), Err(Error::Domain(_))));
        let negative = [
            PullSample { delta_x: -1e-15, delta_f_c: 44.0 },
            PullSample { delta_x: 2e-15, delta_f_c: 88.0 },
        ];
        assert!(pull_factor(&negative).is_err());
    }

    #[test]
    fn coupling_rate_matches_oracle() {
        let x_zpf = zero_point_fluctuation(8.3e6, 3.52e-7, &constants());
        let g0 = coupling_rate(4.4e13, x_zpf);
        assert!(rel_diff(g0, 1.4914388188181483e-4) < 1e-12);
        assert_eq!(coupling_rate(0.0, x_zpf), 0.0);
    }

    #[test]
    fn cooperativity_unit_construction_and_inversion() {
        assert_eq!(cooperativity(1.0, 1.0, 4.0).unwrap(), 1.0);
        assert_eq!(cooperativity(0.0, 1.0, 4.0).unwrap(), 0.0);
        assert!(cooperativity(1.0, 0.0, 4.0).is_err());

        let gamma = implied_mechanical_linewidth(1.44e-5, 2.40e-17, 2.43e6).unwrap();
        assert!(rel_diff(gamma, 14.22222222222222) < 1e-12);
        let q_m = 4.7e6 / gamma;
        assert!(rel_diff(q_m, 330468.75) < 1e-12);
    }

    #[test]
    fn cooperativity_scaling_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g0 = rng.gen_range(1e-8..1e-2);
            let gamma = rng.gen_range(1e-2..1e3);
            let kappa = rng.gen_range(1e3..1e8);
            let a = rng.gen_range(0.1..10.0);
            let base = cooperativity(g0, gamma, kappa).unwrap();
            // degree 2 in g0
            let scaled = cooperativity(a * g0, gamma, kappa).unwrap();
            assert!(rel_diff(scaled, a * a * base) < 1e-9);
            // degree -1 in each linewidth
            let scaled = cooperativity(g0, a * gamma, kappa).unwrap();
            assert!(rel_diff(scaled, base / a) < 1e-9);
            let scaled = cooperativity(g0, gamma, a * kappa).unwrap();
            assert!(rel_diff(scaled, base / a) < 1e-9);
        }
    }

    #[test]
    fn dimensional_consistency_sweep() {
        // (f_m, m_eff) -> (a·f_m, m_eff/a) leaves omega·m_eff and hence
        // x_zpf and k_m invariant.
        let c = constants();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = rng.gen_range(1e5..1e8);
            let m = rng.gen_range(1e-9..1e-3);
            let a = rng.gen_range(0.01..100.0);
            let x1 = zero_point_fluctuation(f, m, &c);
            let x2 = zero_point_fluctuation(a * f, m / a, &c);
            assert!(rel_diff(x1, x2) < 1e-12);
            let k1 = piezo_coupling_constant(f, m, 1e6, 75.0);
            let k2 = piezo_coupling_constant(a * f, m / a, 1e6, 75.0);
            assert!(rel_diff(k1, k2) < 1e-12);
        }
    }

    #[test]
    fn pull_chain_invariant_under_uniform_rescale() {
        let c = constants();
        let x_zpf = zero_point_fluctuation(8.3e6, 3.52e-7, &c);
        let base: Vec<PullSample> = (1..=5)
            .map(|i| PullSample {
                delta_x: i as f64 * 1e-15,
                delta_f_c: 4.4e13 * i as f64 * 1e-15 * (1.0 + 0.001 * i as f64),
            })
            .collect();
        let scaled: Vec<PullSample> = base
            .iter()
            .map(|s| PullSample {
                delta_x: 3.7 * s.delta_x,
                delta_f_c: 3.7 * s.delta_f_c,
            })
            .collect();
        let g1 = coupling_rate(pull_factor(&base).unwrap(), x_zpf);
        let g2 = coupling_rate(pull_factor(&scaled).unwrap(), x_zpf);
        assert!(rel_diff(g1, g2) < 1e-12);
    }

    #[test]
    fn overlap_ratio_cases() {
        assert!(rel_diff(overlap_ratio(0.99, 0.05).unwrap(), 19.8) < 1e-12);
        assert_eq!(overlap_ratio(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(overlap_ratio(1.0, 0.25).unwrap(), 4.0);
        assert!(overlap_ratio(0.0, 0.5).is_err());
        assert!(overlap_ratio(0.5, 1.2).is_err());
    }

    #[test]
    fn measured_pull_result_keeps_g0_consistent() {
        let c = constants();
        let x_zpf = zero_point_fluctuation(8.3e6, 3.52e-7, &c);
        let r = CouplingResult::from_measured_pull(4.4e13, x_zpf, 4.76, 2.43e6).unwrap();
        assert!(rel_diff(r.g0, r.pull_factor_g * r.x_zpf) < 1e-12);
        assert_eq!(r.source.label(), "measured-G");

        let t = CouplingResult::from_table_g0(2.38e-6, x_zpf, 4.76, 2.43e6).unwrap();
        assert!(rel_diff(t.g0, t.pull_factor_g * t.x_zpf) < 1e-12);
        assert_eq!(t.source.label(), "table-g0");
    }
}
