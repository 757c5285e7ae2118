//! Validate both steppers on the closed-form periodic travelling wave of
//! the pure nonlocal equation (no third-derivative term), a reduced-horizon
//! variant of the `bo-validation` preset.

use benjamin::presets::{build, execute_plan};

fn main() {
    let plan = build("bo-validation", 0.1).expect("preset");
    let out = std::env::temp_dir().join("bo-validation-demo");
    let outcome = execute_plan(&plan, &out).expect("run");
    for line in outcome.lines {
        println!("{line}");
    }
    println!("artifacts in {}", out.display());
    println!("tracking.csv columns: max_l2, max_h1, shape_error, phase_error");
}
