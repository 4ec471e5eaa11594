//! Load the bundled LiNbO3 system description and check every derivable
//! quantity against its published reference value:
//!
//! ```bash
//! cargo run -p bawcav --example consistency_check
//! ```

use std::path::Path;

use bawcav::report::{consistency_check, render_report, ReportFormat};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/linbo3_4k.cfg");
    let config = bawcav::load_config(&path).expect("bundled config loads");

    let report = consistency_check(&config);
    print!("{}", render_report(&report, ReportFormat::Text));

    let discrepant = report
        .rows
        .iter()
        .filter(|r| r.status == bawcav::Status::Discrepant)
        .count();
    println!(
        "\n{} rows, {} discrepant — a discrepancy is a finding, not an error",
        report.rows.len(),
        discrepant
    );
}
