//! Trace CSV ingestion/emission, the reference-value consistency checker,
//! and report rendering.
//!
//! The checker recomputes every derivable quantity of a [`SystemConfig`] and
//! compares each against the `[paper_values]` reference table where one
//! exists. A deviation is a finding, not an error: discrepant rows never
//! fail the process.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::coupling;
use crate::effmass::{self, ModeShapeSpec, QuadratureSpec};
use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::readout::Spectrum;

/// Row classification by relative deviation from the reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// deviation < 0.05
    Ok,
    /// 0.05 <= deviation <= 0.5
    Warn,
    /// deviation > 0.5
    Discrepant,
    /// no reference value exists
    Info,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "OK",
            Status::Warn => "WARN",
            Status::Discrepant => "DISCREPANT",
            Status::Info => "INFO",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "OK" => Some(Status::Ok),
            "WARN" => Some(Status::Warn),
            "DISCREPANT" => Some(Status::Discrepant),
            "INFO" => Some(Status::Info),
            _ => None,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a relative deviation (`None` when no reference exists).
pub fn classify(deviation: Option<f64>) -> Status {
    match deviation {
        None => Status::Info,
        Some(d) if d < 0.05 => Status::Ok,
        Some(d) if d <= 0.5 => Status::Warn,
        Some(_) => Status::Discrepant,
    }
}

/// One checked quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub quantity: String,
    pub computed: f64,
    /// SI unit of the row; empty for dimensionless quantities.
    pub unit: String,
    pub reference: Option<f64>,
    /// |computed − reference| / |reference|.
    pub deviation: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConsistencyReport {
    pub rows: Vec<ReportRow>,
}

impl ConsistencyReport {
    pub fn row(&self, quantity: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    fn push(&mut self, quantity: String, computed: f64, unit: &str, reference: Option<f64>) {
        let deviation = reference.map(|r| relative_deviation(computed, r));
        self.rows.push(ReportRow {
            quantity,
            computed,
            unit: unit.to_string(),
            reference,
            deviation,
            status: classify(deviation),
        });
    }
}

fn relative_deviation(computed: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if computed == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ((computed - reference) / reference).abs()
    }
}

/// Recomputes every derivable quantity of the config and classifies it
/// against the reference table. Missing inputs or references yield INFO
/// rows rather than errors; row order is deterministic.
pub fn consistency_check(config: &SystemConfig) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    let cavity = &config.cavity;

    report.push(
        "q_unloaded".into(),
        cavity.q_unloaded,
        "",
        config.reference("q_unloaded"),
    );
    report.push(
        "kappa_c".into(),
        cavity.kappa_c,
        "Hz",
        config.reference("kappa_c"),
    );

    for entry in &config.modes {
        let mode = &entry.mode;
        let lab = mode.label.to_lowercase();

        let x_zpf = coupling::zero_point_fluctuation(mode.f_m, mode.m_eff, &config.constants);
        report.push(
            format!("x_zpf_{lab}"),
            x_zpf,
            "m",
            config.reference(&format!("x_zpf_{lab}")),
        );
        report.push(
            format!("x_zpf_conventional_{lab}"),
            coupling::conventional_zero_point_fluctuation(mode.f_m, mode.m_eff, &config.constants),
            "m",
            config.reference(&format!("x_zpf_conventional_{lab}")),
        );

        if let Some(k_m) = entry.bvd.as_ref().and_then(|b| b.k_m) {
            report.push(
                format!("k_m_{lab}"),
                k_m,
                "C/m",
                config.reference(&format!("k_m_{lab}")),
            );
        }

        let g0_reference = config.reference(&format!("g0_{lab}"));
        if let Some(pull) = entry.pull_factor {
            let g0 = coupling::coupling_rate(pull, x_zpf);
            report.push(format!("g0_{lab}"), g0, "Hz", g0_reference);
            if let Ok(c0) = coupling::cooperativity(g0, mode.gamma_m, cavity.kappa_c) {
                report.push(
                    format!("c0_{lab}"),
                    c0,
                    "",
                    config.reference(&format!("c0_{lab}")),
                );
            }
        }

        if let (Some(g0_ref), Some(c0_ref)) =
            (g0_reference, config.reference(&format!("c0_{lab}")))
        {
            if let Ok(gamma) =
                coupling::implied_mechanical_linewidth(g0_ref, c0_ref, cavity.kappa_c)
            {
                report.push(
                    format!("gamma_m_implied_{lab}"),
                    gamma,
                    "Hz",
                    config.reference(&format!("gamma_m_implied_{lab}")),
                );
                report.push(
                    format!("q_m_implied_{lab}"),
                    mode.f_m / gamma,
                    "",
                    config.reference(&format!("q_m_implied_{lab}")),
                );
            }
        }

        if let (Some(g0_ref), Some(abstract_ref)) =
            (g0_reference, config.reference(&format!("g0_abstract_{lab}")))
        {
            report.push(
                format!("g0_table_vs_abstract_{lab}"),
                g0_ref,
                "Hz",
                Some(abstract_ref),
            );
        }

        if let (Some(n), Some(r0)) = (entry.overtone_n, entry.envelope_waist_r0) {
            let model_mass = ModeShapeSpec::new(n, r0).and_then(|spec| {
                effmass::effective_mass(
                    &spec,
                    &config.geometry,
                    &config.material,
                    &QuadratureSpec::default(),
                )
            });
            if let Ok(m) = model_mass {
                report.push(format!("m_eff_model_{lab}"), m, "kg", Some(mode.m_eff));
            }
        }
    }

    if let (Some(split), Some(single)) = (
        config.reference("overlap_fraction_split"),
        config.reference("overlap_fraction_single"),
    ) {
        if let Ok(ratio) = coupling::overlap_ratio(split, single) {
            report.push(
                "overlap_ratio".into(),
                ratio,
                "",
                config.reference("overlap_ratio"),
            );
        }
    }

    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Aligned human-readable table, 6 significant digits.
    Text,
    /// Tab-separated records, exact round-trip floats.
    Machine,
}

const MACHINE_HEADER: &str = "quantity\tcomputed\tunit\treference\tdeviation\tstatus";

fn machine_field(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.16e}"),
        None => "-".into(),
    }
}

/// Renders a report in the requested format. Both formats carry identical
/// data; identical reports render byte-identically.
pub fn render_report(report: &ConsistencyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Machine => {
            let mut out = String::from(MACHINE_HEADER);
            out.push('\n');
            for row in &report.rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.quantity,
                    machine_field(Some(row.computed)),
                    if row.unit.is_empty() { "-" } else { &row.unit },
                    machine_field(row.reference),
                    machine_field(row.deviation),
                    row.status
                ));
            }
            out
        }
        ReportFormat::Text => {
            let header = ["quantity", "computed", "unit", "reference", "deviation", "status"];
            let mut cells: Vec<[String; 6]> = Vec::with_capacity(report.rows.len());
            for row in &report.rows {
                let opt = |v: Option<f64>| match v {
                    Some(x) => format!("{x:.5e}"),
                    None => "-".into(),
                };
                cells.push([
                    row.quantity.clone(),
                    format!("{:.5e}", row.computed),
                    if row.unit.is_empty() { "-".into() } else { row.unit.clone() },
                    opt(row.reference),
                    opt(row.deviation),
                    row.status.to_string(),
                ]);
            }
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in &cells {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut out = String::new();
            let emit = |out: &mut String, cols: &[String]| {
                let line: Vec<String> = cols
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            };
            emit(&mut out, &header.map(String::from));
            for row in &cells {
                emit(&mut out, row);
            }
            out
        }
    }
}

/// Writes a rendered report to a file.
pub fn write_report(
    report: &ConsistencyReport,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    fs::write(path, render_report(report, format))?;
    Ok(())
}

/// Re-reads a machine-format report.
pub fn parse_machine_report(text: &str) -> Result<ConsistencyReport> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if idx == 0 {
            if line != MACHINE_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header '{MACHINE_HEADER}'"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 6 tab-separated fields, got {}", fields.len()),
            });
        }
        let number = |s: &str| -> Result<Option<f64>> {
            if s == "-" {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("'{s}' is not a number"),
                })
            }
        };
        let computed = number(fields[1])?.ok_or(Error::Parse {
            line: line_no,
            msg: "computed value is missing".into(),
        })?;
        let status = Status::parse(fields[5]).ok_or_else(|| Error::Parse {
            line: line_no,
            msg: format!("unknown status '{}'", fields[5]),
        })?;
        rows.push(ReportRow {
            quantity: fields[0].to_string(),
            computed,
            unit: if fields[2] == "-" { String::new() } else { fields[2].to_string() },
            reference: number(fields[3])?,
            deviation: number(fields[4])?,
            status,
        });
    }
    Ok(ConsistencyReport { rows })
}

/// Reads a trace CSV with header `freq_hz,value[,phase_rad]`. A third
/// column is ignored; the returned warnings say so.
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<(Spectrum, Vec<String>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_trace_csv(&text, &label)
}

/// Parses trace CSV text; see [`read_trace_csv`].
pub fn parse_trace_csv(text: &str, label: &str) -> Result<(Spectrum, Vec<String>)> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().filter(|(_, l)| !l.trim().is_empty()).ok_or(
        Error::Parse {
            line: 1,
            msg: "empty file".into(),
        },
    )?;

    let columns: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let mut warnings = Vec::new();
    match columns.as_slice() {
        ["freq_hz", "value"] => {}
        ["freq_hz", "value", "phase_rad"] => {
            warnings.push("column 'phase_rad' is ignored".to_string());
        }
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "expected header 'freq_hz,value' or 'freq_hz,value,phase_rad', got '{}'",
                    header.trim()
                ),
            })
        }
    }
    let expected_fields = columns.len();

    let mut frequencies: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != expected_fields {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "expected {expected_fields} fields, got {}",
                    fields.len()
                ),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("'{s}' is not a number"),
            })
        };
        let f = parse(fields[0])?;
        if let Some(&last) = frequencies.last() {
            if f <= last {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-monotonic frequency {f:e} at line {line_no}"),
                });
            }
        }
        frequencies.push(f);
        values.push(parse(fields[1])?);
    }
    if frequencies.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    Ok((Spectrum::new(frequencies, values, label)?, warnings))
}

/// Renders a trace as CSV with 17-significant-digit values, so reading it
/// back reproduces the floats exactly.
pub fn trace_csv_string(spectrum: &Spectrum) -> String {
    let mut out = String::from("freq_hz,value\n");
    for (f, v) in spectrum.frequencies.iter().zip(&spectrum.values) {
        out.push_str(&format!("{f:.16e},{v:.16e}\n"));
    }
    out
}

/// Writes [`trace_csv_string`] to a file.
pub fn write_trace_csv(spectrum: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, trace_csv_string(spectrum))?;
    Ok(())
}
