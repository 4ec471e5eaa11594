//! FM sidebands of a mechanically modulated microwave carrier:
//!
//! ```bash
//! cargo run -p bawcav --example sideband_spectrum
//! ```

use bawcav::readout::{bessel_j, fm_sideband_spectrum};

fn main() {
    let f_c = 6.075e9;
    let f_mod = 8.3e6;

    for peak_deviation in [0.83e6, 8.3e6, 19.96e6] {
        let sidebands = fm_sideband_spectrum(f_c, peak_deviation, f_mod, 12).unwrap();
        let beta = sidebands.modulation_index;
        println!("modulation index beta = {beta:.4}");
        if sidebands.truncation_significant {
            println!("  (truncated: J_12({beta:.2}) is still significant)");
        }
        let s = &sidebands.spectrum;
        let carrier_idx = s.len() / 2;
        for (f, v) in s.frequencies.iter().zip(&s.values).skip(carrier_idx) {
            let order = ((f - f_c) / f_mod).round() as i32;
            let bar = "#".repeat((v * 40.0).round() as usize);
            println!("  k = {order:>2}  |J_k| = {v:.5}  {bar}");
        }
        println!();
    }

    // energy is conserved across the sideband comb
    let beta = 2.4;
    let sum = bessel_j(0, beta).powi(2)
        + 2.0 * (1..=25).map(|k| bessel_j(k, beta).powi(2)).sum::<f64>();
    println!("sum of J_k({beta})^2 over all orders = {sum:.12}");
}
