//! A Gaussian hump resolving into solitary waves under the Fourier stepper
//! (reduced-scale variant of the `gaussian-resolution` preset).

use benjamin::config::{
    DomainSection, EquationSection, InitialCondition, OutputSection, RunConfig, Scheme,
    SolverSection, TimeSection,
};
use benjamin::diagnostics::peak_census;
use benjamin::fourier::{forward_transform, spectral_derivative};
use benjamin::runner::execute;

fn main() {
    let config = RunConfig {
        equation: EquationSection {
            alpha: 0.0,
            beta: 1.0,
            gamma: -1.0,
            delta: -1.0,
        },
        domain: DomainSection {
            half_length: 150.0,
            intervals: 3000,
        },
        time: TimeSection {
            step: 0.01,
            final_time: 40.0,
        },
        solver: SolverSection {
            scheme: Scheme::Spectral,
            tolerance: None,
            max_iterations: None,
        },
        initial: InitialCondition::Gaussian {
            amplitude: 2.0,
            width: 4.0,
        },
        forcing: None,
        output: OutputSection {
            directory: None,
            snapshot_stride: 1000,
        },
    };
    let report = execute(&config).expect("run");
    let grid = &report.grid;
    println!("   t   emerged pulses (threshold 0.3)");
    for snap in &report.snapshots {
        let field = forward_transform(&snap.values, grid).expect("transform");
        let eval = |x: f64, order: usize| {
            if order == 0 {
                field.evaluate(x).re
            } else {
                spectral_derivative(&field, order as u32)
                    .expect("derivative")
                    .evaluate(x)
                    .re
            }
        };
        let peaks = peak_census(grid.nodes(), &snap.values, 1.0, 0.3, eval).expect("census");
        println!("{:6.1}  {}", snap.t, peaks.len());
    }
}
