//! Domain types shared by every other module.
//!
//! All stored values are strict SI (Hz, kg, m, Ω, H, F); unit conversion
//! happens once, in the config loader. Linewidths (`kappa_c`, `gamma_m`) are
//! cycle frequencies in Hz, not rad/s, everywhere in this crate. Derived
//! fields (`q_unloaded`, `kappa_c`, `gamma_m`, `k_m`) are recomputed from
//! declared fields and never trusted from a file.
//!
//! All types are immutable value objects after construction; they are safe to
//! share and send between threads.

use std::fmt;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA).
pub const HBAR: f64 = 1.054571817e-34;

/// Relative tolerance for derived-field consistency.
pub const DERIVED_REL_TOL: f64 = 1e-12;

/// Relative tolerance for the motional-branch mass relation k_m²·L_m = m_eff.
pub const BVD_MASS_REL_TOL: f64 = 1e-9;

/// |a - b| relative to |b|.
pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        if a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((a - b) / b).abs()
    }
}

/// Fundamental constants used by the coupling formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar <= 0.0 {
            return Err(Error::Validation("hbar must be > 0".into()));
        }
        Ok(Self { hbar })
    }

    /// Reduced Planck constant, J·s.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: HBAR }
    }
}

/// Bulk material of the acoustic resonator.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialProperties {
    pub name: String,
    /// Mass density, kg/m³.
    pub density: f64,
}

impl MaterialProperties {
    pub fn new(name: impl Into<String>, density: f64) -> Result<Self> {
        if density <= 0.0 {
            return Err(Error::Validation("density must be > 0".into()));
        }
        Ok(Self {
            name: name.into(),
            density,
        })
    }

    /// Default material: z-cut lithium niobate.
    pub fn lithium_niobate() -> Self {
        Self {
            name: "LiNbO3".into(),
            density: 4650.0,
        }
    }
}

impl Default for MaterialProperties {
    fn default() -> Self {
        Self::lithium_niobate()
    }
}

/// Plano-convex crystal blank, all lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalGeometry {
    pub diameter: f64,
    pub center_thickness: f64,
    pub convex_radius: f64,
}

impl CrystalGeometry {
    pub fn new(diameter: f64, center_thickness: f64, convex_radius: f64) -> Result<Self> {
        let g = Self {
            diameter,
            center_thickness,
            convex_radius,
        };
        let violations = g.violations();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(Error::Validation(join_violations(&violations)))
        }
    }

    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }

    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let geo = "geometry";
        if self.diameter <= 0.0 {
            v.push(Violation::new(geo, "diameter must be > 0"));
        }
        if self.center_thickness <= 0.0 {
            v.push(Violation::new(geo, "center_thickness must be > 0"));
        }
        if self.convex_radius <= 0.0 {
            v.push(Violation::new(geo, "convex_radius must be > 0"));
        }
        if self.convex_radius <= self.center_thickness {
            v.push(Violation::new(
                geo,
                "convex_radius must be greater than center_thickness",
            ));
        }
        v
    }
}

impl Default for CrystalGeometry {
    /// 30 mm diameter, 2 mm centre thickness, 100 mm convex radius.
    fn default() -> Self {
        Self {
            diameter: 30e-3,
            center_thickness: 2e-3,
            convex_radius: 100e-3,
        }
    }
}

/// Polarization family of a trapped acoustic mode.
///
/// `Longitudinal` ("A") modes displace along the crystal z axis,
/// `Shear` ("B") modes in the x-y plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeFamily {
    Longitudinal,
    Shear,
}

impl ModeFamily {
    pub fn letter(&self) -> char {
        match self {
            ModeFamily::Longitudinal => 'A',
            ModeFamily::Shear => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'A' => Some(ModeFamily::Longitudinal),
            'B' => Some(ModeFamily::Shear),
            _ => None,
        }
    }
}

impl fmt::Display for ModeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// One trapped bulk acoustic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticMode {
    /// Unique label, e.g. "A5_0_0".
    pub label: String,
    pub family: ModeFamily,
    /// Overtone and transverse indices (n, m, p).
    pub indices: (u32, u32, u32),
    /// Resonance frequency, Hz.
    pub f_m: f64,
    /// Mechanical quality factor.
    pub q_m: f64,
    /// Effective modal mass, kg.
    pub m_eff: f64,
    /// Mechanical linewidth f_m / q_m, Hz. Derived.
    pub gamma_m: f64,
}

impl AcousticMode {
    pub fn new(
        label: impl Into<String>,
        family: ModeFamily,
        indices: (u32, u32, u32),
        f_m: f64,
        q_m: f64,
        m_eff: f64,
    ) -> Result<Self> {
        let mode = Self {
            label: label.into(),
            family,
            indices,
            f_m,
            q_m,
            m_eff,
            gamma_m: f_m / q_m,
        };
        let violations = mode.violations();
        if violations.is_empty() {
            Ok(mode)
        } else {
            Err(Error::Validation(join_violations(&violations)))
        }
    }

    /// Builds a mode from a label of the form `<A|B><n>_<m>_<p>`, e.g.
    /// "A5_0_0" or "B7_0_0".
    pub fn from_label(label: &str, f_m: f64, q_m: f64, m_eff: f64) -> Result<Self> {
        let (family, indices) = parse_mode_label(label)?;
        Self::new(label, family, indices, f_m, q_m, m_eff)
    }

    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let who = format!("mode {}", self.label);
        if self.f_m <= 0.0 {
            v.push(Violation::new(&who, "f_m must be > 0"));
        }
        if self.q_m <= 0.0 {
            v.push(Violation::new(&who, "q_m must be > 0"));
        }
        if self.m_eff <= 0.0 {
            v.push(Violation::new(&who, "m_eff must be > 0"));
        }
        if self.f_m > 0.0
            && self.q_m > 0.0
            && rel_diff(self.gamma_m * self.q_m, self.f_m) > DERIVED_REL_TOL
        {
            v.push(Violation::new(
                &who,
                "gamma_m inconsistent with f_m / q_m",
            ));
        }
        v
    }
}

/// Parses a `<A|B><n>_<m>_<p>` mode label into family and indices.
pub fn parse_mode_label(label: &str) -> Result<(ModeFamily, (u32, u32, u32))> {
    let bad = || {
        Error::Validation(format!(
            "mode label '{label}' must have the form <A|B><n>_<m>_<p>, e.g. A5_0_0"
        ))
    };
    let mut chars = label.chars();
    let family = chars.next().and_then(ModeFamily::from_letter).ok_or_else(bad)?;
    let rest: String = chars.collect();
    let parts: Vec<&str> = rest.split('_').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut idx = [0u32; 3];
    for (slot, part) in idx.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|_| bad())?;
    }
    Ok((family, (idx[0], idx[1], idx[2])))
}

/// Microwave cavity resonance and its port couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityMode {
    /// Resonance frequency, Hz.
    pub f_c: f64,
    /// Loaded quality factor.
    pub q_loaded: f64,
    /// Port 1 coupling coefficient.
    pub beta1: f64,
    /// Port 2 coupling coefficient.
    pub beta2: f64,
    /// Unloaded quality factor q_loaded·(1 + beta1 + beta2). Derived.
    pub q_unloaded: f64,
    /// Cavity linewidth f_c / q_loaded, Hz. Derived.
    pub kappa_c: f64,
}

impl CavityMode {
    pub fn new(f_c: f64, q_loaded: f64, beta1: f64, beta2: f64) -> Result<Self> {
        let cavity = Self {
            f_c,
            q_loaded,
            beta1,
            beta2,
            q_unloaded: q_loaded * (1.0 + beta1 + beta2),
            kappa_c: f_c / q_loaded,
        };
        let violations = cavity.violations();
        if violations.is_empty() {
            Ok(cavity)
        } else {
            Err(Error::Validation(join_violations(&violations)))
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let who = "cavity";
        if self.f_c <= 0.0 {
            v.push(Violation::new(who, "f_c must be > 0"));
        }
        if self.q_loaded <= 0.0 {
            v.push(Violation::new(who, "q_loaded must be > 0"));
        }
        if self.beta1 < 0.0 {
            v.push(Violation::new(who, "beta1 must be >= 0"));
        }
        if self.beta2 < 0.0 {
            v.push(Violation::new(who, "beta2 must be >= 0"));
        }
        if self.q_loaded > 0.0 {
            let q0 = self.q_loaded * (1.0 + self.beta1 + self.beta2);
            if rel_diff(self.q_unloaded, q0) > DERIVED_REL_TOL {
                v.push(Violation::new(
                    who,
                    "q_unloaded inconsistent with q_loaded*(1 + beta1 + beta2)",
                ));
            }
            if rel_diff(self.kappa_c, self.f_c / self.q_loaded) > DERIVED_REL_TOL {
                v.push(Violation::new(who, "kappa_c inconsistent with f_c / q_loaded"));
            }
        }
        v
    }
}

/// Motional branch of the equivalent electrical circuit of one mode.
///
/// The piezoelectric coupling constant k_m (C/m, charge per displacement)
/// is derived from the declared elements: from r_m via
/// k_m² = ω_m·m_eff / (q_m·r_m), otherwise from l_m via k_m² = m_eff / l_m.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BvdBranch {
    /// Motional inductance, H.
    pub l_m: Option<f64>,
    /// Motional capacitance, F.
    pub c_m: Option<f64>,
    /// Motional resistance, Ω.
    pub r_m: Option<f64>,
    /// Piezoelectric coupling constant, C/m. Derived.
    pub k_m: Option<f64>,
}

impl BvdBranch {
    pub fn for_mode(
        mode: &AcousticMode,
        l_m: Option<f64>,
        c_m: Option<f64>,
        r_m: Option<f64>,
    ) -> Result<Self> {
        let k_m = match (r_m, l_m) {
            (Some(r), _) => Some(crate::coupling::piezo_coupling_constant(
                mode.f_m, mode.m_eff, mode.q_m, r,
            )),
            (None, Some(l)) => Some((mode.m_eff / l).sqrt()),
            (None, None) => None,
        };
        let branch = Self { l_m, c_m, r_m, k_m };
        let violations = branch.violations(mode);
        if violations.is_empty() {
            Ok(branch)
        } else {
            Err(Error::Validation(join_violations(&violations)))
        }
    }

    fn violations(&self, mode: &AcousticMode) -> Vec<Violation> {
        let mut v = Vec::new();
        let who = format!("mode {}", mode.label);
        for (name, value) in [
            ("l_m", self.l_m),
            ("c_m", self.c_m),
            ("r_m", self.r_m),
            ("k_m", self.k_m),
        ] {
            if let Some(x) = value {
                if x <= 0.0 {
                    v.push(Violation::new(&who, format!("{name} must be > 0")));
                }
            }
        }
        if let (Some(k), Some(l)) = (self.k_m, self.l_m) {
            if rel_diff(k * k * l, mode.m_eff) > BVD_MASS_REL_TOL {
                v.push(Violation::new(
                    &who,
                    "k_m^2 * l_m inconsistent with m_eff",
                ));
            }
        }
        v
    }
}

/// One acoustic mode together with its optional per-mode inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeEntry {
    pub mode: AcousticMode,
    pub bvd: Option<BvdBranch>,
    /// Measured frequency pull factor |dω_c/dx|, Hz/m.
    pub pull_factor: Option<f64>,
    /// Half-wave count of the thickness profile, for the modal mass model.
    pub overtone_n: Option<u32>,
    /// Gaussian 1/e radius of the displacement envelope, m.
    pub envelope_waist_r0: Option<f64>,
}

impl ModeEntry {
    pub fn new(mode: AcousticMode) -> Self {
        Self {
            mode,
            bvd: None,
            pull_factor: None,
            overtone_n: None,
            envelope_waist_r0: None,
        }
    }
}

/// Fully resolved system description: one cavity, one crystal, one or more
/// acoustic modes, plus optional published reference values for the
/// consistency checker.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub constants: PhysicalConstants,
    pub material: MaterialProperties,
    pub geometry: CrystalGeometry,
    pub cavity: CavityMode,
    /// Mixer phase-to-voltage gain of the readout bridge, V/rad.
    pub phase_gain_k_phi: f64,
    pub modes: Vec<ModeEntry>,
    /// (quantity name, value) reference table, in file order.
    pub paper_values: Vec<(String, f64)>,
}

impl SystemConfig {
    /// Looks up a reference value by quantity name.
    pub fn reference(&self, quantity: &str) -> Option<f64> {
        self.paper_values
            .iter()
            .find(|(name, _)| name == quantity)
            .map(|(_, value)| *value)
    }

    pub fn mode(&self, label: &str) -> Option<&ModeEntry> {
        self.modes.iter().find(|entry| entry.mode.label == label)
    }
}

/// A violated invariant, reported rather than thrown.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// What the violation is about ("cavity", "mode A5_0_0", ...).
    pub subject: String,
    pub message: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

pub(crate) fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Checks every invariant of a config, including derived-field consistency,
/// and returns the violations found (empty when valid).
pub fn validate(config: &SystemConfig) -> Vec<Violation> {
    let mut v = Vec::new();

    if config.constants.hbar() <= 0.0 {
        v.push(Violation::new("constants", "hbar must be > 0"));
    }
    if config.material.density <= 0.0 {
        v.push(Violation::new("material", "density must be > 0"));
    }
    v.extend(config.geometry.violations());
    v.extend(config.cavity.violations());
    if config.phase_gain_k_phi <= 0.0 {
        v.push(Violation::new("cavity", "phase_gain_k_phi must be > 0"));
    }

    if config.modes.is_empty() {
        v.push(Violation::new("modes", "at least one acoustic mode is required"));
    }
    for (i, entry) in config.modes.iter().enumerate() {
        let who = format!("mode {}", entry.mode.label);
        for earlier in &config.modes[..i] {
            if earlier.mode.label == entry.mode.label {
                v.push(Violation::new(&who, "duplicate mode label"));
            }
        }
        v.extend(entry.mode.violations());
        if let Some(bvd) = &entry.bvd {
            v.extend(bvd.violations(&entry.mode));
        }
        if let Some(g) = entry.pull_factor {
            if g <= 0.0 {
                v.push(Violation::new(&who, "pull_factor must be > 0"));
            }
        }
        if let Some(n) = entry.overtone_n {
            if n == 0 {
                v.push(Violation::new(&who, "overtone_n must be >= 1"));
            }
        }
        if let Some(r0) = entry.envelope_waist_r0 {
            if r0 <= 0.0 {
                v.push(Violation::new(&who, "envelope_waist_r0 must be > 0"));
            } else if r0 > config.geometry.radius() {
                v.push(Violation::new(
                    &who,
                    "envelope_waist_r0 must not exceed the crystal radius",
                ));
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode() -> AcousticMode {
        AcousticMode::from_label("A5_0_0", 8.3e6, 1e6, 3.52e-7).unwrap()
    }

    fn config_with(cavity: CavityMode) -> SystemConfig {
        SystemConfig {
            constants: PhysicalConstants::default(),
            material: MaterialProperties::default(),
            geometry: CrystalGeometry::default(),
            cavity,
            phase_gain_k_phi: 1.0,
            modes: vec![ModeEntry::new(mode())],
            paper_values: Vec::new(),
        }
    }

    #[test]
    fn cavity_derives_unloaded_q_and_linewidth() {
        let c = CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap();
        assert_eq!(c.q_unloaded, 4840.0);
        assert_eq!(c.kappa_c, 2.43e6);
    }

    #[test]
    fn mode_label_parsing() {
        let m = mode();
        assert_eq!(m.family, ModeFamily::Longitudinal);
        assert_eq!(m.indices, (5, 0, 0));
        assert!(rel_diff(m.gamma_m * m.q_m, m.f_m) < DERIVED_REL_TOL);

        assert!(parse_mode_label("C1_0_0").is_err());
        assert!(parse_mode_label("A5_0").is_err());
        assert!(parse_mode_label("A5_0_x").is_err());
        let (family, idx) = parse_mode_label("B7_0_0").unwrap();
        assert_eq!(family, ModeFamily::Shear);
        assert_eq!(idx, (7, 0, 0));
    }

    #[test]
    fn negative_q_loaded_is_one_violation() {
        let mut config = config_with(CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap());
        config.cavity.q_loaded = -1.0;
        let violations = validate(&config);
        let hits: Vec<_> = violations
            .iter()
            .filter(|v| v.message.contains("q_loaded must be > 0"))
            .collect();
        assert_eq!(hits.len(), 1);
    }

    #[test]
    fn inconsistent_gamma_names_the_mode() {
        let mut config = config_with(CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap());
        config.modes[0].mode.gamma_m *= 1.01;
        let violations = validate(&config);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].subject, "mode A5_0_0");
        assert!(violations[0].message.contains("gamma_m"));
    }

    #[test]
    fn valid_config_has_no_violations() {
        let config = config_with(CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap());
        assert!(validate(&config).is_empty());
    }

    #[test]
    fn duplicate_labels_are_flagged() {
        let mut config = config_with(CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap());
        config.modes.push(config.modes[0].clone());
        let violations = validate(&config);
        assert!(violations.iter().any(|v| v.message.contains("duplicate")));
    }

    #[test]
    fn bvd_branch_derives_k_m_from_r_m() {
        let m = mode();
        let b = BvdBranch::for_mode(&m, None, None, Some(100.0)).unwrap();
        let k = b.k_m.unwrap();
        // k_m^2 = omega * m_eff / (q_m * r_m)
        let expected = (std::f64::consts::TAU * 8.3e6 * 3.52e-7 / (1e6 * 100.0)).sqrt();
        assert!(rel_diff(k, expected) < 1e-15);
    }

    #[test]
    fn bvd_branch_derives_k_m_from_l_m() {
        let m = mode();
        let l = 3.5;
        let b = BvdBranch::for_mode(&m, Some(l), None, None).unwrap();
        let k = b.k_m.unwrap();
        assert!(rel_diff(k * k * l, m.m_eff) < BVD_MASS_REL_TOL);
    }

    #[test]
    fn inconsistent_l_m_is_rejected() {
        let m = mode();
        // l_m off by 1% from q_m*r_m/omega breaks k_m^2*l_m = m_eff.
        let consistent = m.q_m * 100.0 / (std::f64::consts::TAU * m.f_m);
        assert!(BvdBranch::for_mode(&m, Some(consistent), None, Some(100.0)).is_ok());
        assert!(BvdBranch::for_mode(&m, Some(consistent * 1.01), None, Some(100.0)).is_err());
    }

    #[test]
    fn geometry_requires_convex_radius_above_thickness() {
        assert!(CrystalGeometry::new(30e-3, 2e-3, 1e-3).is_err());
        assert!(CrystalGeometry::new(30e-3, 2e-3, 100e-3).is_ok());
    }

    #[test]
    fn derived_fields_recompute_idempotently() {
        let c = CavityMode::new(6.075e9, 2500.0, 0.8, 0.136).unwrap();
        let again = CavityMode::new(c.f_c, c.q_loaded, c.beta1, c.beta2).unwrap();
        assert_eq!(c, again);
    }
}
