//! The self-check suite, once as built and once with a deliberately broken
//! phase quantizer.

use beamsim::beamform::PhaseDistance;
use beamsim::harness::{validate_with, ValidateOptions};

fn main() {
    for (label, metric) in [
        ("circular", PhaseDistance::Circular),
        ("linear (fault)", PhaseDistance::Linear),
    ] {
        let report = validate_with(ValidateOptions {
            phase_distance: metric,
            ..ValidateOptions::default()
        });
        println!("quantizer metric {label}: {} failures", report.failures);
        for c in report.checks.iter().filter(|c| !c.passed) {
            println!("  {} measured {:.4} > {}", c.name, c.measured, c.tolerance);
        }
    }
}
