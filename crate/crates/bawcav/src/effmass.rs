//! Effective modal mass by axisymmetric quadrature of the mode energy
//! integral m_eff = ρ ∫ |u(x)|² dV, with the displacement peak-normalized
//! to 1.
//!
//! The trapped-mode displacement is modeled as the separable analytic shape
//! u(r, z) = sin(n·π·z/t₀) · exp(−r²/r0²): a flat-plate thickness overtone
//! confined by a Gaussian envelope of waist r0. The volume element is the
//! axisymmetric 2πr dr dz, so for a waist well inside the crystal radius the
//! integral has the closed form ρ·π·r0²·t₀/4, which the tests use as the
//! independent oracle.

use crate::error::{Error, Result};
use crate::model::{CrystalGeometry, MaterialProperties};

/// Displacement normalization convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// max |u| over the crystal equals 1.
    #[default]
    PeakUnity,
}

/// Analytic trapped-mode shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeShapeSpec {
    /// Half-wave count of the thickness profile (z direction).
    pub overtone_n: u32,
    /// Gaussian 1/e radius of the displacement amplitude, m.
    pub envelope_waist_r0: f64,
    pub normalization: Normalization,
}

impl ModeShapeSpec {
    pub fn new(overtone_n: u32, envelope_waist_r0: f64) -> Result<Self> {
        if overtone_n == 0 {
            return Err(Error::Validation("overtone_n must be >= 1".into()));
        }
        if envelope_waist_r0 <= 0.0 {
            return Err(Error::Validation("envelope_waist_r0 must be > 0".into()));
        }
        Ok(Self {
            overtone_n,
            envelope_waist_r0,
            normalization: Normalization::PeakUnity,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadScheme {
    #[default]
    CompositeGauss,
}

/// Resolution of the 2D composite Gauss-Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub radial_points: usize,
    pub axial_points: usize,
    pub scheme: QuadScheme,
}

impl QuadratureSpec {
    pub fn new(radial_points: usize, axial_points: usize) -> Result<Self> {
        if radial_points < 16 || axial_points < 16 {
            return Err(Error::Validation(
                "quadrature needs at least 16 points per direction".into(),
            ));
        }
        Ok(Self {
            radial_points,
            axial_points,
            scheme: QuadScheme::CompositeGauss,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_points: 128,
            axial_points: 128,
            scheme: QuadScheme::CompositeGauss,
        }
    }
}

/// 8-point Gauss-Legendre abscissae (positive half) and weights on [-1, 1].
const GAUSS8_X: [f64; 4] = [
    0.1834346424956498,
    0.525532409916329,
    0.7966664774136267,
    0.9602898564975363,
];
const GAUSS8_W: [f64; 4] = [
    0.362683783378362,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Composite 8-point Gauss-Legendre nodes and weights on [a, b] with at
/// least `points` nodes.
fn composite_gauss(a: f64, b: f64, points: usize) -> Vec<(f64, f64)> {
    let panels = points.div_ceil(8);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = h / 2.0;
        for i in 0..4 {
            nodes.push((mid - half * GAUSS8_X[i], half * GAUSS8_W[i]));
            nodes.push((mid + half * GAUSS8_X[i], half * GAUSS8_W[i]));
        }
    }
    nodes
}

fn quadrature_pass(
    u: &impl Fn(f64, f64) -> f64,
    radius: f64,
    thickness: f64,
    density: f64,
    radial_points: usize,
    axial_points: usize,
) -> f64 {
    let r_nodes = composite_gauss(0.0, radius, radial_points);
    let z_nodes = composite_gauss(0.0, thickness, axial_points);
    let mut sum = 0.0;
    for &(r, wr) in &r_nodes {
        let mut inner = 0.0;
        for &(z, wz) in &z_nodes {
            let amp = u(r, z);
            inner += wz * amp * amp;
        }
        sum += wr * r * inner;
    }
    std::f64::consts::TAU * density * sum
}

/// Integrates ρ·|u|² over the cylinder r ∈ [0, radius], z ∈ [0, thickness]
/// with the axisymmetric volume element 2πr dr dz.
///
/// The result is accepted only if doubling the resolution changes it by at
/// most 1e-6 relative; the finer value is returned.
pub fn axisymmetric_modal_mass(
    u: impl Fn(f64, f64) -> f64,
    radius: f64,
    thickness: f64,
    density: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if radius <= 0.0 || thickness <= 0.0 || density <= 0.0 {
        return Err(Error::Domain(
            "radius, thickness and density must be > 0".into(),
        ));
    }
    let coarse = quadrature_pass(
        &u,
        radius,
        thickness,
        density,
        quad.radial_points,
        quad.axial_points,
    );
    let fine = quadrature_pass(
        &u,
        radius,
        thickness,
        density,
        quad.radial_points * 2,
        quad.axial_points * 2,
    );
    let change = if fine == 0.0 {
        coarse.abs()
    } else {
        ((fine - coarse) / fine).abs()
    };
    if change > 1e-6 {
        return Err(Error::NonConvergence(format!(
            "quadrature changed by {change:.3e} relative on resolution doubling"
        )));
    }
    Ok(fine)
}

/// Peak-normalized displacement u(r, z) of the analytic trapped mode.
///
/// Errors if (r, z) lies outside the crystal cross-section.
pub fn mode_shape(
    spec: &ModeShapeSpec,
    geometry: &CrystalGeometry,
    r: f64,
    z: f64,
) -> Result<f64> {
    let radius = geometry.radius();
    let thickness = geometry.center_thickness;
    if !(0.0..=radius).contains(&r) || !(0.0..=thickness).contains(&z) {
        return Err(Error::Domain(format!(
            "point (r = {r:e} m, z = {z:e} m) is outside the crystal \
             (radius {radius:e} m, thickness {thickness:e} m)"
        )));
    }
    if spec.envelope_waist_r0 > radius {
        return Err(Error::Domain(
            "envelope_waist_r0 exceeds the crystal radius".into(),
        ));
    }
    Ok(shape_value(spec, thickness, r, z))
}

fn shape_value(spec: &ModeShapeSpec, thickness: f64, r: f64, z: f64) -> f64 {
    let axial = (spec.overtone_n as f64 * std::f64::consts::PI * z / thickness).sin();
    let r0 = spec.envelope_waist_r0;
    axial * (-r * r / (r0 * r0)).exp()
}

/// Effective modal mass ρ ∫ |u|² dV of the analytic mode shape, kg.
pub fn effective_mass(
    spec: &ModeShapeSpec,
    geometry: &CrystalGeometry,
    material: &MaterialProperties,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if spec.envelope_waist_r0 > geometry.radius() {
        return Err(Error::Domain(
            "envelope_waist_r0 exceeds the crystal radius".into(),
        ));
    }
    let thickness = geometry.center_thickness;
    axisymmetric_modal_mass(
        |r, z| shape_value(spec, thickness, r, z),
        geometry.radius(),
        thickness,
        material.density,
        quad,
    )
}

/// Closed form ρ·π·r0²·t₀/4, exact in the limit of an untruncated envelope.
pub fn gaussian_mode_mass_closed_form(
    spec: &ModeShapeSpec,
    geometry: &CrystalGeometry,
    material: &MaterialProperties,
) -> f64 {
    let r0 = spec.envelope_waist_r0;
    material.density * std::f64::consts::PI * r0 * r0 * geometry.center_thickness / 4.0
}

/// Modal potential energy ½·m_eff·(2π·f_m)²·amplitude², J.
pub fn potential_energy(m_eff: f64, f_m: f64, amplitude: f64) -> f64 {
    let omega = std::f64::consts::TAU * f_m;
    0.5 * m_eff * omega * omega * amplitude * amplitude
}
