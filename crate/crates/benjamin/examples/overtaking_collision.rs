//! Reduced-scale overtaking collision (gamma = 0.1): a fast solitary wave
//! catches up with a slow one, they interact inelastically, and two pulses
//! re-emerge.  The full published experiment is the `collision-g01-045-075`
//! preset on [-512, 512] up to T = 3000.

use benjamin::diagnostics::peak_census;
use benjamin::fourier::{forward_transform, spectral_derivative};
use benjamin::presets::{build, execute_plan, PresetPlan};
use benjamin::runner::read_report_dir;

fn main() {
    let scale = 0.125; // [-64, 64], T = 375, same mesh and step
    let plan = build("collision-g01-045-075", scale).expect("preset");
    let out = std::env::temp_dir().join("collision-demo");
    let outcome = execute_plan(&plan, &out).expect("run");
    for line in outcome.lines {
        println!("{line}");
    }

    let label = match &plan {
        PresetPlan::Experiment(e) => e.runs[0].label.clone(),
        _ => unreachable!("collision presets are experiments"),
    };
    let report = read_report_dir(&out.join(&label)).expect("artifacts");
    let grid = &report.grid;
    println!("\n   t   pulse depths (negative peaks below 0.1)");
    for snap in report.snapshots.iter().step_by(20) {
        let field = forward_transform(&snap.values, grid).expect("transform");
        let eval = |x: f64, order: usize| {
            if order == 0 {
                -field.evaluate(x).re
            } else {
                -spectral_derivative(&field, order as u32)
                    .expect("derivative")
                    .evaluate(x)
                    .re
            }
        };
        let peaks = peak_census(grid.nodes(), &snap.values, -1.0, 0.1, eval).expect("census");
        let depths: Vec<String> = peaks.iter().map(|p| format!("{:.4}", -p.height)).collect();
        println!("{:6.1}  {}", snap.t, depths.join("  "));
    }
}
