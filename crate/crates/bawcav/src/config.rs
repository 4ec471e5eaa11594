//! Config file ingestion and re-serialization.
//!
//! The format is line-oriented sectioned `key = value` text. Sections are
//! `[cavity]`, `[material]`, `[geometry]`, `[mode <label>]` and
//! `[paper_values]`; `#` starts a comment. Values are a number with an
//! optional unit suffix (Hz, kHz, MHz, GHz, g, kg, mm, m, Ω, H, F); bare
//! numbers are taken as SI. Every value is converted to SI on load and a
//! suffix of the wrong dimension for its key is rejected, so a mass given in
//! grams can never silently reach a formula as kilograms.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{
    join_violations, validate, AcousticMode, BvdBranch, CavityMode, CrystalGeometry,
    MaterialProperties, ModeEntry, PhysicalConstants, SystemConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Frequency,
    Mass,
    Length,
    Resistance,
    Inductance,
    Capacitance,
    /// Dimensionless or composite-unit quantity; no suffix allowed.
    Bare,
    /// Reference values: any known suffix accepted.
    Any,
}

impl Dimension {
    fn describe(&self) -> &'static str {
        match self {
            Dimension::Frequency => "a frequency",
            Dimension::Mass => "a mass",
            Dimension::Length => "a length",
            Dimension::Resistance => "a resistance",
            Dimension::Inductance => "an inductance",
            Dimension::Capacitance => "a capacitance",
            Dimension::Bare => "a bare number",
            Dimension::Any => "any quantity",
        }
    }
}

/// (dimension, factor-to-SI) for each accepted suffix.
fn unit_table(suffix: &str) -> Option<(Dimension, f64)> {
    let entry = match suffix {
        "Hz" => (Dimension::Frequency, 1.0),
        "kHz" => (Dimension::Frequency, 1e3),
        "MHz" => (Dimension::Frequency, 1e6),
        "GHz" => (Dimension::Frequency, 1e9),
        "g" => (Dimension::Mass, 1e-3),
        "kg" => (Dimension::Mass, 1.0),
        "mm" => (Dimension::Length, 1e-3),
        "m" => (Dimension::Length, 1.0),
        "Ω" => (Dimension::Resistance, 1.0),
        "H" => (Dimension::Inductance, 1.0),
        "F" => (Dimension::Capacitance, 1.0),
        _ => return None,
    };
    Some(entry)
}

/// Splits "8.3 MHz" / "8.3MHz" / "8.3e6" into the number and its suffix.
fn split_number_suffix(raw: &str) -> Option<(f64, &str)> {
    let mut result = None;
    let boundaries = raw
        .char_indices()
        .map(|(i, _)| i)
        .skip(1)
        .chain([raw.len()]);
    for i in boundaries {
        if let Ok(v) = raw[..i].trim().parse::<f64>() {
            result = Some((v, raw[i..].trim()));
        }
    }
    result
}

fn parse_value(raw: &str, expected: Dimension, key: &str, line: usize) -> Result<f64> {
    let (number, suffix) = split_number_suffix(raw).ok_or_else(|| Error::Parse {
        line,
        msg: format!("value '{raw}' for key '{key}' is not a number"),
    })?;
    if suffix.is_empty() {
        return Ok(number);
    }
    let (dimension, factor) = unit_table(suffix).ok_or_else(|| Error::Unit {
        line,
        msg: format!("unknown unit suffix '{suffix}' for key '{key}'"),
    })?;
    match expected {
        Dimension::Any => {}
        Dimension::Bare => {
            return Err(Error::Unit {
                line,
                msg: format!(
                    "key '{key}' takes {}; unexpected unit '{suffix}'",
                    Dimension::Bare.describe()
                ),
            });
        }
        _ if dimension != expected => {
            return Err(Error::Unit {
                line,
                msg: format!(
                    "unit '{suffix}' is not valid for key '{key}' (expected {})",
                    expected.describe()
                ),
            });
        }
        _ => {}
    }
    Ok(number * factor)
}

fn parse_positive_integer(raw: &str, key: &str, line: usize) -> Result<u32> {
    let value = parse_value(raw, Dimension::Bare, key, line)?;
    if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
        return Err(Error::Parse {
            line,
            msg: format!("key '{key}' must be a positive integer, got '{raw}'"),
        });
    }
    Ok(value as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Section {
    None,
    Cavity,
    Material,
    Geometry,
    Mode(String),
    PaperValues,
}

/// Raw `key -> (text, line)` map for one section.
type RawKeys = HashMap<String, (String, usize)>;

#[derive(Default)]
struct RawConfig {
    cavity: RawKeys,
    material: RawKeys,
    material_seen: bool,
    geometry: RawKeys,
    geometry_seen: bool,
    modes: Vec<(String, usize, RawKeys)>,
    paper_values: Vec<(String, f64)>,
}

const CAVITY_KEYS: &[(&str, Dimension)] = &[
    ("f_c", Dimension::Frequency),
    ("q_loaded", Dimension::Bare),
    ("beta1", Dimension::Bare),
    ("beta2", Dimension::Bare),
    ("phase_gain_k_phi", Dimension::Bare),
];

const MATERIAL_KEYS: &[(&str, Dimension)] = &[("density", Dimension::Bare)];

const GEOMETRY_KEYS: &[(&str, Dimension)] = &[
    ("diameter", Dimension::Length),
    ("center_thickness", Dimension::Length),
    ("convex_radius", Dimension::Length),
];

const MODE_KEYS: &[(&str, Dimension)] = &[
    ("f_m", Dimension::Frequency),
    ("q_m", Dimension::Bare),
    ("m_eff", Dimension::Mass),
    ("l_m", Dimension::Inductance),
    ("c_m", Dimension::Capacitance),
    ("r_m", Dimension::Resistance),
    ("pull_factor", Dimension::Bare),
    ("overtone_n", Dimension::Bare),
    ("envelope_waist_r0", Dimension::Length),
];

fn key_dimension(keys: &[(&str, Dimension)], key: &str) -> Option<Dimension> {
    keys.iter().find(|(k, _)| *k == key).map(|(_, d)| *d)
}

fn collect_raw(text: &str) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    let mut section = Section::None;

    for (idx, full_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match full_line.find('#') {
            Some(pos) => &full_line[..pos],
            None => full_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }

        if let Some(header) = content.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or(Error::Parse {
                line,
                msg: "section header is missing the closing ']'".into(),
            })?;
            let header = header.trim();
            section = match header {
                "cavity" => Section::Cavity,
                "material" => {
                    raw.material_seen = true;
                    Section::Material
                }
                "geometry" => {
                    raw.geometry_seen = true;
                    Section::Geometry
                }
                "paper_values" => Section::PaperValues,
                _ => match header.strip_prefix("mode ") {
                    Some(label) => {
                        let label = label.trim().to_string();
                        if label.is_empty() {
                            return Err(Error::Parse {
                                line,
                                msg: "mode section needs a label: [mode <label>]".into(),
                            });
                        }
                        raw.modes.push((label.clone(), line, RawKeys::new()));
                        Section::Mode(label)
                    }
                    None => {
                        return Err(Error::Parse {
                            line,
                            msg: format!("unknown section '[{header}]'"),
                        })
                    }
                },
            };
            continue;
        }

        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected 'key = value', got '{content}'"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty key or value".into(),
            });
        }

        let target = match &section {
            Section::None => {
                return Err(Error::Parse {
                    line,
                    msg: format!("key '{key}' appears before any section header"),
                })
            }
            Section::Cavity => {
                if key_dimension(CAVITY_KEYS, &key).is_none() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key '{key}' in [cavity]"),
                    });
                }
                &mut raw.cavity
            }
            Section::Material => {
                if key != "name" && key_dimension(MATERIAL_KEYS, &key).is_none() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key '{key}' in [material]"),
                    });
                }
                &mut raw.material
            }
            Section::Geometry => {
                if key_dimension(GEOMETRY_KEYS, &key).is_none() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key '{key}' in [geometry]"),
                    });
                }
                &mut raw.geometry
            }
            Section::Mode(label) => {
                if key_dimension(MODE_KEYS, &key).is_none() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key '{key}' in [mode {label}]"),
                    });
                }
                &mut raw.modes.last_mut().expect("mode section exists").2
            }
            Section::PaperValues => {
                let value = parse_value(&value, Dimension::Any, &key, line)?;
                if raw.paper_values.iter().any(|(name, _)| *name == key) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("duplicate key '{key}' in [paper_values]"),
                    });
                }
                raw.paper_values.push((key, value));
                continue;
            }
        };
        if target.insert(key.clone(), (value, line)).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key '{key}'"),
            });
        }
    }
    Ok(raw)
}

fn required(
    keys: &RawKeys,
    key: &str,
    dimension: Dimension,
    subject: &str,
) -> Result<f64> {
    match keys.get(key) {
        Some((text, line)) => parse_value(text, dimension, key, *line),
        None => Err(Error::Validation(format!(
            "{subject}: missing required field {key}"
        ))),
    }
}

fn optional(keys: &RawKeys, key: &str, dimension: Dimension) -> Result<Option<f64>> {
    match keys.get(key) {
        Some((text, line)) => parse_value(text, dimension, key, *line).map(Some),
        None => Ok(None),
    }
}

/// Parses config text into a fully validated [`SystemConfig`] with all
/// derived fields populated and all values in SI.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let raw = collect_raw(text)?;

    if raw.cavity.is_empty() {
        return Err(Error::Validation(
            "missing [cavity] section (f_c and q_loaded are required)".into(),
        ));
    }
    let f_c = required(&raw.cavity, "f_c", Dimension::Frequency, "cavity")?;
    let q_loaded = required(&raw.cavity, "q_loaded", Dimension::Bare, "cavity")?;
    let beta1 = optional(&raw.cavity, "beta1", Dimension::Bare)?.unwrap_or(0.0);
    let beta2 = optional(&raw.cavity, "beta2", Dimension::Bare)?.unwrap_or(0.0);
    let phase_gain_k_phi =
        optional(&raw.cavity, "phase_gain_k_phi", Dimension::Bare)?.unwrap_or(1.0);
    let cavity = CavityMode::new(f_c, q_loaded, beta1, beta2)?;

    let material = if raw.material_seen {
        let name = raw
            .material
            .get("name")
            .map(|(text, _)| text.clone())
            .unwrap_or_else(|| MaterialProperties::default().name);
        let density = optional(&raw.material, "density", Dimension::Bare)?
            .unwrap_or(MaterialProperties::default().density);
        MaterialProperties::new(name, density)?
    } else {
        MaterialProperties::default()
    };

    let geometry = if raw.geometry_seen {
        CrystalGeometry::new(
            required(&raw.geometry, "diameter", Dimension::Length, "geometry")?,
            required(
                &raw.geometry,
                "center_thickness",
                Dimension::Length,
                "geometry",
            )?,
            required(&raw.geometry, "convex_radius", Dimension::Length, "geometry")?,
        )?
    } else {
        CrystalGeometry::default()
    };

    let mut modes = Vec::with_capacity(raw.modes.len());
    for (label, header_line, keys) in &raw.modes {
        let subject = format!("mode {label}");
        let f_m = required(keys, "f_m", Dimension::Frequency, &subject)?;
        let q_m = required(keys, "q_m", Dimension::Bare, &subject)?;
        let m_eff = required(keys, "m_eff", Dimension::Mass, &subject)?;
        let mode = AcousticMode::from_label(label, f_m, q_m, m_eff).map_err(|e| {
            Error::Parse {
                line: *header_line,
                msg: e.to_string(),
            }
        })?;

        let l_m = optional(keys, "l_m", Dimension::Inductance)?;
        let c_m = optional(keys, "c_m", Dimension::Capacitance)?;
        let r_m = optional(keys, "r_m", Dimension::Resistance)?;
        let bvd = if l_m.is_some() || c_m.is_some() || r_m.is_some() {
            Some(BvdBranch::for_mode(&mode, l_m, c_m, r_m)?)
        } else {
            None
        };

        let overtone_n = match keys.get("overtone_n") {
            Some((text, line)) => Some(parse_positive_integer(text, "overtone_n", *line)?),
            None => None,
        };

        modes.push(ModeEntry {
            mode,
            bvd,
            pull_factor: optional(keys, "pull_factor", Dimension::Bare)?,
            overtone_n,
            envelope_waist_r0: optional(keys, "envelope_waist_r0", Dimension::Length)?,
        });
    }

    let config = SystemConfig {
        constants: PhysicalConstants::default(),
        material,
        geometry,
        cavity,
        phase_gain_k_phi,
        modes,
        paper_values: raw.paper_values,
    };

    let violations = validate(&config);
    if !violations.is_empty() {
        return Err(Error::Validation(join_violations(&violations)));
    }
    Ok(config)
}

/// Loads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    parse_config(&fs::read_to_string(path)?)
}

fn push_kv(out: &mut String, key: &str, value: f64) {
    out.push_str(&format!("{key} = {value:e}\n"));
}

/// Renders a config back to text. Declared fields only, in SI, with exact
/// round-trip float formatting; derived fields are recomputed on load.
pub fn to_config_string(config: &SystemConfig) -> String {
    let mut out = String::new();

    out.push_str("[cavity]\n");
    push_kv(&mut out, "f_c", config.cavity.f_c);
    push_kv(&mut out, "q_loaded", config.cavity.q_loaded);
    push_kv(&mut out, "beta1", config.cavity.beta1);
    push_kv(&mut out, "beta2", config.cavity.beta2);
    push_kv(&mut out, "phase_gain_k_phi", config.phase_gain_k_phi);

    out.push_str("\n[material]\n");
    out.push_str(&format!("name = {}\n", config.material.name));
    push_kv(&mut out, "density", config.material.density);

    out.push_str("\n[geometry]\n");
    push_kv(&mut out, "diameter", config.geometry.diameter);
    push_kv(&mut out, "center_thickness", config.geometry.center_thickness);
    push_kv(&mut out, "convex_radius", config.geometry.convex_radius);

    for entry in &config.modes {
        out.push_str(&format!("\n[mode {}]\n", entry.mode.label));
        push_kv(&mut out, "f_m", entry.mode.f_m);
        push_kv(&mut out, "q_m", entry.mode.q_m);
        push_kv(&mut out, "m_eff", entry.mode.m_eff);
        if let Some(bvd) = &entry.bvd {
            if let Some(l) = bvd.l_m {
                push_kv(&mut out, "l_m", l);
            }
            if let Some(c) = bvd.c_m {
                push_kv(&mut out, "c_m", c);
            }
            if let Some(r) = bvd.r_m {
                push_kv(&mut out, "r_m", r);
            }
        }
        if let Some(g) = entry.pull_factor {
            push_kv(&mut out, "pull_factor", g);
        }
        if let Some(n) = entry.overtone_n {
            out.push_str(&format!("overtone_n = {n}\n"));
        }
        if let Some(r0) = entry.envelope_waist_r0 {
            push_kv(&mut out, "envelope_waist_r0", r0);
        }
    }

    if !config.paper_values.is_empty() {
        out.push_str("\n[paper_values]\n");
        for (key, value) in &config.paper_values {
            push_kv(&mut out, key, *value);
        }
    }
    out
}

/// Writes [`to_config_string`] to a file.
pub fn save_config(config: &SystemConfig, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_config_string(config))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rel_diff;

    const MINIMAL: &str = "\
[cavity]
f_c = 6.075 GHz
q_loaded = 2500
beta1 = 0.8
beta2 = 0.136

[mode A5_0_0]
f_m = 8.3 MHz
q_m = 1e6
m_eff = 3.52e-4 g   # grams convert to kg
r_m = 100 Ω
";

    #[test]
    fn loads_cavity_and_derives_fields() {
        let config = parse_config(MINIMAL).unwrap();
        assert!(rel_diff(config.cavity.q_unloaded, 4840.0) < 1e-12);
        assert!(rel_diff(config.cavity.kappa_c, 2.43e6) < 1e-12);
    }

    #[test]
    fn grams_convert_to_kilograms() {
        let config = parse_config(MINIMAL).unwrap();
        assert_eq!(config.modes[0].mode.m_eff, 3.52e-7);
    }

    #[test]
    fn missing_f_m_names_mode_and_field() {
        let text = MINIMAL.replace("f_m = 8.3 MHz\n", "");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Validation(_)), "{msg}");
        assert!(msg.contains("A5_0_0") && msg.contains("f_m"), "{msg}");
    }

    #[test]
    fn unknown_unit_suffix_is_a_unit_error_with_line() {
        let text = MINIMAL.replace("f_m = 8.3 MHz", "f_m = 8.3 THz");
        match parse_config(&text).unwrap_err() {
            Error::Unit { line, msg } => {
                assert_eq!(line, 8);
                assert!(msg.contains("THz"), "{msg}");
            }
            other => panic!("expected unit error, got {other}"),
        }
    }

    #[test]
    fn wrong_dimension_suffix_is_rejected() {
        let text = MINIMAL.replace("f_c = 6.075 GHz", "f_c = 6.075 mm");
        match parse_config(&text).unwrap_err() {
            Error::Unit { msg, .. } => assert!(msg.contains("f_c"), "{msg}"),
            other => panic!("expected unit error, got {other}"),
        }
    }

    #[test]
    fn attached_suffix_and_spaced_suffix_agree() {
        let spaced = parse_config(MINIMAL).unwrap();
        let attached = parse_config(&MINIMAL.replace("6.075 GHz", "6.075GHz")).unwrap();
        assert_eq!(spaced.cavity.f_c, attached.cavity.f_c);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = format!("{MINIMAL}typo_key = 3\n");
        match parse_config(&text).unwrap_err() {
            Error::Parse { line, msg } => {
                assert_eq!(line, 12);
                assert!(msg.contains("typo_key"), "{msg}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn unknown_section_is_rejected() {
        let text = format!("{MINIMAL}\n[readout]\nk = 1\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            Error::Parse { .. }
        ));
    }

    #[test]
    fn defaults_for_material_and_geometry() {
        let config = parse_config(MINIMAL).unwrap();
        assert_eq!(config.material.name, "LiNbO3");
        assert_eq!(config.material.density, 4650.0);
        assert_eq!(config.geometry.diameter, 30e-3);
    }

    #[test]
    fn paper_values_accept_any_known_suffix() {
        let text = format!("{MINIMAL}\n[paper_values]\nq_unloaded = 4250\ng0_a5_0_0 = 2.38e-6 Hz\n");
        let config = parse_config(&text).unwrap();
        assert_eq!(config.reference("q_unloaded"), Some(4250.0));
        assert_eq!(config.reference("g0_a5_0_0"), Some(2.38e-6));
    }

    #[test]
    fn round_trip_is_field_for_field_equal() {
        let text = format!(
            "{MINIMAL}pull_factor = 4.4e13\novertone_n = 5\nenvelope_waist_r0 = 3 mm\n\n\
             [material]\nname = LiNbO3\ndensity = 4650\n\n\
             [geometry]\ndiameter = 30 mm\ncenter_thickness = 2 mm\nconvex_radius = 100 mm\n\n\
             [paper_values]\nq_unloaded = 4250\n"
        );
        let first = parse_config(&text).unwrap();
        let second = parse_config(&to_config_string(&first)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn duplicate_mode_labels_are_rejected() {
        let text = format!("{MINIMAL}\n[mode A5_0_0]\nf_m = 8.3 MHz\nq_m = 1e6\nm_eff = 3.52e-4 g\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn negative_quantity_fails_validation() {
        let text = MINIMAL.replace("q_loaded = 2500", "q_loaded = -1");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("q_loaded must be > 0"), "{err}");
    }

    #[test]
    fn key_before_section_is_a_parse_error() {
        match parse_config("f_c = 1 GHz\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn bundled_config_round_trips() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/linbo3_4k.cfg");
        let first = load_config(path).unwrap();
        assert_eq!(first.modes.len(), 5);
        let second = parse_config(&to_config_string(&first)).unwrap();
        assert_eq!(first, second);
    }
}
