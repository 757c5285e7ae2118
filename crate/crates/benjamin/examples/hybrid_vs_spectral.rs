//! Run the same manufactured problem with the spline stepper and the
//! Fourier stepper on one grid, then difference the two trajectories.

use benjamin::config::{
    DomainSection, EquationSection, ForcingKind, InitialCondition, OutputSection, RunConfig,
    Scheme, SolverSection, TimeSection,
};
use benjamin::runner::{compare_reports, execute};

fn config(scheme: Scheme) -> RunConfig {
    RunConfig {
        equation: EquationSection {
            alpha: 0.0,
            beta: 1.0,
            gamma: -1.0,
            delta: -0.5,
        },
        domain: DomainSection {
            half_length: 1.0,
            intervals: 64,
        },
        time: TimeSection {
            step: 0.001,
            final_time: 1.0,
        },
        solver: SolverSection {
            scheme,
            tolerance: None,
            max_iterations: None,
        },
        initial: InitialCondition::Expression {
            formula: "sin(pi * x)".into(),
        },
        forcing: Some(ForcingKind::Manufactured),
        output: OutputSection {
            directory: None,
            snapshot_stride: 100,
        },
    }
}

fn main() {
    let hybrid = execute(&config(Scheme::Hybrid)).expect("spline stepper run");
    let spectral = execute(&config(Scheme::Spectral)).expect("Fourier stepper run");

    println!("errors against the exact solution at T = 1:");
    for (label, report) in [("spline ", &hybrid), ("Fourier", &spectral)] {
        let last = report.errors.last().expect("error series");
        println!("  {label}: L2 {:.4e}, H1 {:.4e}", last.l2, last.h1);
    }

    let cmp = compare_reports(&hybrid, &spectral).expect("comparison");
    println!(
        "largest difference between the trajectories: L2 {:.4e}, H1 {:.4e}",
        cmp.max_l2, cmp.max_h1
    );
}
