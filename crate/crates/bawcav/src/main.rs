//! Thin command-line front-end over the `bawcav` library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bawcav::coupling::{self, CouplingResult};
use bawcav::effmass::{self, ModeShapeSpec, QuadratureSpec};
use bawcav::fitting;
use bawcav::readout::{self, DiscriminatorSpec, DriveSpec};
use bawcav::report::{self, ReportFormat};
use bawcav::{Error, ModeEntry, Result, SystemConfig};

#[derive(Parser)]
#[command(
    name = "bawcav",
    version,
    about = "BAW resonator / microwave cavity coupling toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Machine,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Machine => ReportFormat::Machine,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check computed quantities against the config's reference values.
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the coupling chain (x_zpf, k_m, g0, C0) for every mode.
    Coupling {
        #[arg(long)]
        config: PathBuf,
    },
    /// Effective modal mass by quadrature for modes with shape inputs.
    Effmass {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 128)]
        radial_points: usize,
        #[arg(long, default_value_t = 128)]
        axial_points: usize,
    },
    /// Simulate a mixer-output trace for one mode and write it as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Mode label; defaults to the first mode in the config.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Drive amplitude, V.
        #[arg(long, default_value_t = 1.0)]
        voltage: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Grid half-span in linewidths around f_m.
        #[arg(long, default_value_t = 10.0)]
        span: f64,
        /// Additive white noise sigma, relative to the trace peak.
        #[arg(long)]
        noise: Option<f64>,
        /// Noise seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fit a Lorentzian to a trace CSV and print the parameters.
    Fit {
        /// Accepted for interface symmetry; the fit needs no config data.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "in")]
        input: PathBuf,
        /// Write the fitted curve here as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Check { config, out, format } => {
            let config = bawcav::load_config(config)?;
            let report = report::consistency_check(&config);
            match out {
                Some(path) => report::write_report(&report, path, format.into())?,
                None => print!("{}", report::render_report(&report, format.into())),
            }
            Ok(())
        }
        Command::Coupling { config } => {
            let config = bawcav::load_config(config)?;
            print_coupling(&config);
            Ok(())
        }
        Command::Effmass {
            config,
            radial_points,
            axial_points,
        } => {
            let config = bawcav::load_config(config)?;
            let quad = QuadratureSpec::new(radial_points, axial_points)?;
            print_effmass(&config, &quad)
        }
        Command::Simulate {
            config,
            mode,
            out,
            voltage,
            points,
            span,
            noise,
            seed,
        } => {
            let config = bawcav::load_config(config)?;
            let entry = select_mode(&config, mode.as_deref())?;
            let trace = simulate_trace(&config, entry, voltage, points, span)?;
            let trace = match noise {
                Some(sigma) => readout::with_additive_noise(&trace, sigma, seed),
                None => trace,
            };
            report::write_trace_csv(&trace, &out)?;
            println!("wrote {} points to {}", trace.len(), out.display());
            Ok(())
        }
        Command::Fit { config: _, input, out } => {
            let (trace, warnings) = report::read_trace_csv(&input)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let fit = fitting::fit_lorentzian(&trace, None)?;
            println!("f0           = {:.6e} Hz", fit.f0);
            println!("fwhm         = {:.6e} Hz", fit.fwhm);
            println!("q_loaded     = {:.6e}", fit.q_loaded);
            println!("amplitude    = {:.6e}", fit.amplitude);
            println!("baseline     = {:.6e}", fit.baseline);
            println!("residual_rms = {:.6e}", fit.residual_rms);
            println!("iterations   = {}", fit.iterations);
            println!("converged    = {}", fit.converged);
            if let Some(path) = out {
                let values = trace
                    .frequencies
                    .iter()
                    .map(|&f| fitting::lorentzian(f, fit.f0, fit.fwhm, fit.amplitude, fit.baseline))
                    .collect();
                let fitted =
                    readout::Spectrum::new(trace.frequencies.clone(), values, "lorentzian_fit")?;
                report::write_trace_csv(&fitted, &path)?;
                println!("wrote fitted curve to {}", path.display());
            }
            Ok(())
        }
    }
}

fn select_mode<'a>(config: &'a SystemConfig, label: Option<&str>) -> Result<&'a ModeEntry> {
    match label {
        Some(l) => config.mode(l).ok_or_else(|| {
            Error::Validation(format!("config has no mode labelled '{l}'"))
        }),
        None => config
            .modes
            .first()
            .ok_or_else(|| Error::Validation("config has no modes".into())),
    }
}

fn simulate_trace(
    config: &SystemConfig,
    entry: &ModeEntry,
    voltage: f64,
    points: usize,
    span: f64,
) -> Result<bawcav::Spectrum> {
    let mode = &entry.mode;
    let k_m = entry.bvd.as_ref().and_then(|b| b.k_m).ok_or_else(|| {
        Error::Validation(format!(
            "mode {} needs r_m or l_m so k_m can be derived",
            mode.label
        ))
    })?;
    let pull = entry.pull_factor.ok_or_else(|| {
        Error::Validation(format!("mode {} has no pull_factor", mode.label))
    })?;
    if points < 2 {
        return Err(Error::Validation("need at least 2 grid points".into()));
    }
    let disc = DiscriminatorSpec::new(
        config.phase_gain_k_phi,
        config.cavity.q_loaded,
        config.cavity.f_c,
    )?;
    let grid = readout::frequency_grid(mode.f_m, mode.gamma_m, span, points);
    let drives: Vec<DriveSpec> = grid
        .into_iter()
        .map(|frequency| DriveSpec {
            voltage_amplitude: voltage,
            frequency,
        })
        .collect();
    readout::mixer_output_trace(mode, k_m, &disc, pull, &drives)
}

fn print_coupling(config: &SystemConfig) {
    let kappa_c = config.cavity.kappa_c;
    println!(
        "cavity: f_c = {:.6e} Hz, Q_L = {:.6e}, Q_0 = {:.6e}, kappa_c = {:.6e} Hz",
        config.cavity.f_c, config.cavity.q_loaded, config.cavity.q_unloaded, kappa_c
    );
    for entry in &config.modes {
        let mode = &entry.mode;
        println!("\nmode {} (f_m = {:.6e} Hz, Q_m = {:.6e})", mode.label, mode.f_m, mode.q_m);
        let x_zpf = coupling::zero_point_fluctuation(mode.f_m, mode.m_eff, &config.constants);
        println!("  x_zpf              = {x_zpf:.6e} m");
        println!(
            "  x_zpf_conventional = {:.6e} m",
            coupling::conventional_zero_point_fluctuation(mode.f_m, mode.m_eff, &config.constants)
        );
        if let Some(k_m) = entry.bvd.as_ref().and_then(|b| b.k_m) {
            println!("  k_m                = {k_m:.6e} C/m");
        }
        let result = match entry.pull_factor {
            Some(g) => CouplingResult::from_measured_pull(g, x_zpf, mode.gamma_m, kappa_c),
            None => {
                let key = format!("g0_{}", mode.label.to_lowercase());
                match config.reference(&key) {
                    Some(g0) => CouplingResult::from_table_g0(g0, x_zpf, mode.gamma_m, kappa_c),
                    None => {
                        println!("  (no pull_factor or reference g0; coupling rate skipped)");
                        continue;
                    }
                }
            }
        };
        match result {
            Ok(r) => {
                println!("  pull_factor G      = {:.6e} Hz/m", r.pull_factor_g);
                println!("  g0                 = {:.6e} Hz", r.g0);
                println!("  C0                 = {:.6e}", r.c0);
                println!("  source             = {}", r.source);
            }
            Err(e) => println!("  coupling rate unavailable: {e}"),
        }
    }
}

fn print_effmass(config: &SystemConfig, quad: &QuadratureSpec) -> Result<()> {
    let mut any = false;
    for entry in &config.modes {
        let (Some(n), Some(r0)) = (entry.overtone_n, entry.envelope_waist_r0) else {
            continue;
        };
        any = true;
        let spec = ModeShapeSpec::new(n, r0)?;
        let m_model = effmass::effective_mass(&spec, &config.geometry, &config.material, quad)?;
        let closed = effmass::gaussian_mode_mass_closed_form(&spec, &config.geometry, &config.material);
        let m_table = entry.mode.m_eff;
        println!(
            "mode {}: m_eff(model) = {:.6e} kg, closed form = {:.6e} kg, \
             m_eff(config) = {:.6e} kg, model/config = {:.6e}",
            entry.mode.label,
            m_model,
            closed,
            m_table,
            m_model / m_table
        );
    }
    if !any {
        return Err(Error::Validation(
            "no mode carries overtone_n and envelope_waist_r0".into(),
        ));
    }
    Ok(())
}
