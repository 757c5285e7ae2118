//! Convergence rates of both steppers on the manufactured solution
//! u(x, t) = e^t sin(pi x) of the forced equation on [-1, 1].
//!
//! The spline stepper converges at the optimal spatial rate (four); the
//! Fourier stepper converges at rate four in time.

use benjamin::presets::{convergence_table, ConvergenceTable};

fn main() {
    for (title, kind) in [
        ("spline stepper, spatial refinement (M = 1000)", ConvergenceTable::SpatialHybrid),
        ("Fourier stepper, temporal refinement (N = 100)", ConvergenceTable::TemporalSpectral),
    ] {
        println!("{title}");
        println!("{:>6} {:>6} {:>12} {:>7} {:>12} {:>7}", "N", "M", "Linf", "rate", "L2", "rate");
        let table = convergence_table(kind).expect("convergence study");
        for row in &table.rows {
            let fmt = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
            println!(
                "{:>6} {:>6} {:>12.4e} {:>7} {:>12.4e} {:>7}",
                row.intervals,
                row.steps,
                row.linf,
                fmt(row.linf_rate),
                row.l2,
                fmt(row.l2_rate)
            );
        }
        println!();
    }
}
