//! The full coupling chain for one acoustic mode, from raw inputs to the
//! single-photon coupling rate and cooperativity:
//!
//! ```bash
//! cargo run -p bawcav --example coupling_chain
//! ```

use bawcav::coupling::{
    conventional_zero_point_fluctuation, cooperativity, coupling_rate, displacement_from_current,
    motional_current, piezo_coupling_constant, pull_factor, zero_point_fluctuation, PullSample,
};
use bawcav::model::PhysicalConstants;

fn main() {
    let constants = PhysicalConstants::default();

    // an 8.3 MHz longitudinal mode, 0.352 g effective mass
    let f_m = 8.3e6;
    let m_eff = 3.52e-7;
    let q_m = 1.74e6;
    let r_m = 100.0;

    // cavity linewidth for the cooperativity
    let kappa_c = 6.075e9 / 2500.0;
    let gamma_m = f_m / q_m;

    let x_zpf = zero_point_fluctuation(f_m, m_eff, &constants);
    println!("x_zpf                = {x_zpf:.6e} m");
    println!(
        "x_zpf (alt convention) = {:.6e} m",
        conventional_zero_point_fluctuation(f_m, m_eff, &constants)
    );

    let k_m = piezo_coupling_constant(f_m, m_eff, q_m, r_m);
    println!("k_m                  = {k_m:.6e} C/m");

    // a 1 pm displacement seen as motional current, and back
    let x = 1e-12;
    let current = motional_current(k_m, f_m, x);
    println!("I(x = 1 pm)          = {current:.6e} A");
    let back = displacement_from_current(k_m, f_m, current).unwrap();
    println!("x from I             = {back:.6e} m");

    // pull factor from a simulated frequency-shift measurement
    let samples: Vec<PullSample> = (1..=6)
        .map(|i| {
            let delta_x = i as f64 * 5e-13;
            PullSample {
                delta_x,
                delta_f_c: 4.4e13 * delta_x,
            }
        })
        .collect();
    let g = pull_factor(&samples).unwrap();
    println!("pull factor G        = {g:.6e} Hz/m");

    let g0 = coupling_rate(g, x_zpf);
    let c0 = cooperativity(g0, gamma_m, kappa_c).unwrap();
    println!("g0 = G * x_zpf       = {g0:.6e} Hz");
    println!("C0                   = {c0:.6e}");
}
