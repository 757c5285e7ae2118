//! Generate a depression-branch solitary wave and evolve it briefly: it
//! travels to the right at speed 0.9 essentially unchanged.  The long-time
//! instability (shape loss after t = 250 at full scale) is the
//! `depression-wave` preset.

use benjamin::config::{
    DomainSection, EquationSection, InitialCondition, OutputSection, RunConfig, Scheme,
    SolverSection, TimeSection,
};
use benjamin::fourier::PeriodicGrid;
use benjamin::profile::{write_profile, StoredProfile, WaveBranch};
use benjamin::runner::execute;
use benjamin::waves::{depression_wave, CgnConfig};

fn main() {
    let grid = PeriodicGrid::new(64.0, 1024).expect("grid");
    let wave = depression_wave(&grid, 0.94, &CgnConfig::default()).expect("depression solve");
    let top = wave.nodal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "depression wave: residual {:.3e}, crest height {top:.6}",
        wave.residual
    );

    let stored = StoredProfile::from_nodal(
        &grid,
        wave.nodal,
        0.9,
        0.94,
        WaveBranch::Depression,
        1,
        wave.residual,
    )
    .expect("profile record");
    let path = std::env::temp_dir().join("depression-g094.profile");
    write_profile(&path, &stored).expect("write profile");

    let config = RunConfig {
        equation: EquationSection {
            alpha: 1.4,
            beta: -1.0,
            gamma: 0.94,
            delta: 0.5,
        },
        domain: DomainSection {
            half_length: 64.0,
            intervals: 1024,
        },
        time: TimeSection {
            step: 0.02,
            final_time: 20.0,
        },
        solver: SolverSection {
            scheme: Scheme::Hybrid,
            tolerance: None,
            max_iterations: None,
        },
        initial: InitialCondition::Profile {
            paths: vec![path],
            offsets: vec![0.0],
            scales: vec![1.0],
        },
        forcing: None,
        output: OutputSection {
            directory: None,
            snapshot_stride: 250,
        },
    };
    let report = execute(&config).expect("run");
    for snap in &report.snapshots {
        let (arg, max) = snap
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(ai, m), (i, &v)| {
                if v > m {
                    (i, v)
                } else {
                    (ai, m)
                }
            });
        println!(
            "t = {:5.1}: crest {max:.6} at x = {:.3} (expected x = {:.3})",
            snap.t,
            report.grid.nodes()[arg],
            report.grid.wrap(0.9 * snap.t),
        );
    }
}
