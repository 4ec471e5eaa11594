//! Effective modal mass of the analytic trapped-mode shape, compared with
//! its closed form, plus the overtone-independence property:
//!
//! ```bash
//! cargo run -p bawcav --example effective_mass
//! ```

use bawcav::effmass::{
    axisymmetric_modal_mass, effective_mass, gaussian_mode_mass_closed_form, ModeShapeSpec,
    QuadratureSpec,
};
use bawcav::model::{CrystalGeometry, MaterialProperties};

fn main() {
    let geometry = CrystalGeometry::default();
    let material = MaterialProperties::default();
    let quad = QuadratureSpec::default();

    println!(
        "crystal: diameter {} mm, thickness {} mm, {}",
        geometry.diameter * 1e3,
        geometry.center_thickness * 1e3,
        material.name
    );

    // sanity: a uniform displacement integrates to the full cylinder mass
    let total = axisymmetric_modal_mass(
        |_, _| 1.0,
        geometry.radius(),
        geometry.center_thickness,
        material.density,
        &quad,
    )
    .unwrap();
    println!("uniform-displacement cylinder mass = {total:.6e} kg");

    // trapped mode, 3 mm Gaussian waist
    for n in [3u32, 5, 7, 9] {
        let spec = ModeShapeSpec::new(n, 3e-3).unwrap();
        let m = effective_mass(&spec, &geometry, &material, &quad).unwrap();
        let closed = gaussian_mode_mass_closed_form(&spec, &geometry, &material);
        println!(
            "n = {n}: m_eff = {m:.9e} kg   (closed form {closed:.9e}, rel diff {:.2e})",
            ((m - closed) / closed).abs()
        );
    }

    // the waist sets the mass; the overtone does not
    println!();
    for r0_mm in [1.0, 2.0, 3.0, 4.5, 6.0] {
        let spec = ModeShapeSpec::new(5, r0_mm * 1e-3).unwrap();
        let m = effective_mass(&spec, &geometry, &material, &quad).unwrap();
        println!("r0 = {r0_mm:.1} mm: m_eff = {m:.6e} kg");
    }
}
