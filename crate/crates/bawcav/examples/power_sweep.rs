//! Drive-power sweep of a mixer line: peaks scale with voltage while the
//! fitted linewidth stays put:
//!
//! ```bash
//! cargo run -p bawcav --example power_sweep
//! ```

use bawcav::coupling::piezo_coupling_constant;
use bawcav::fitting::fit_lorentzian;
use bawcav::model::AcousticMode;
use bawcav::readout::{default_frequency_grid, power_sweep, DiscriminatorSpec};

fn main() {
    let mode = AcousticMode::from_label("A5_0_0", 8.3e6, 1.74e6, 3.52e-7).unwrap();
    let k_m = piezo_coupling_constant(mode.f_m, mode.m_eff, mode.q_m, 100.0);
    let disc = DiscriminatorSpec::new(1.0, 2500.0, 6.075e9).unwrap();
    let grid = default_frequency_grid(&mode);

    let voltages = [0.1, 0.3, 1.0, 3.0];
    let traces = power_sweep(&mode, k_m, &disc, 4.4e13, &voltages, &grid).unwrap();

    println!("true linewidth f_m/Q_m = {:.6e} Hz\n", mode.gamma_m);
    println!("{:>8}  {:>13}  {:>13}  {:>11}", "drive", "peak", "fitted fwhm", "fitted Q");
    for (v, trace) in voltages.iter().zip(&traces) {
        let peak = trace.values.iter().fold(0.0f64, |a, &x| a.max(x));
        let fit = fit_lorentzian(trace, None).unwrap();
        println!(
            "{v:>6} V  {peak:>13.6e}  {:>13.6e}  {:>11.5e}",
            fit.fwhm, fit.q_loaded
        );
    }
}
