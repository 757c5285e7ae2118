//! Persistent storage for solitary-wave profiles.
//!
//! A profile file records everything needed to reuse a numerically
//! generated travelling wave as an initial condition: the grid, the wave
//! parameters, the branch it was produced on, the residual of the
//! travelling-wave system at the stored solution, the nodal values, and the
//! Fourier coefficients.  Values are written with 17 significant digits so
//! that a round trip through the file reproduces the solution bitwise.
//!
//! Layout: a commented header, a `(x, value)` block with one row per grid
//! node, and a `(k, re, im)` block with one row per Fourier mode.

use crate::error::{Result, SolverError};
use crate::fourier::{forward_transform, signed_index, PeriodicGrid, SpectralField};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::Path;

/// Branch designation for a stored wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveBranch {
    Elevation,
    Depression,
}

impl WaveBranch {
    fn as_str(self) -> &'static str {
        match self {
            WaveBranch::Elevation => "elevation",
            WaveBranch::Depression => "depression",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "elevation" => Ok(WaveBranch::Elevation),
            "depression" => Ok(WaveBranch::Depression),
            other => Err(SolverError::Config(format!(
                "unknown wave branch `{other}`"
            ))),
        }
    }
}

/// A wave profile together with the metadata recorded in its file header.
#[derive(Debug, Clone)]
pub struct StoredProfile {
    pub grid: PeriodicGrid,
    pub speed: f64,
    pub gamma: f64,
    pub branch: WaveBranch,
    pub pulses: usize,
    pub residual: f64,
    pub nodal: Vec<f64>,
    pub field: SpectralField,
}

impl StoredProfile {
    /// Build a record from nodal values on `grid`.
    pub fn from_nodal(
        grid: &PeriodicGrid,
        nodal: Vec<f64>,
        speed: f64,
        gamma: f64,
        branch: WaveBranch,
        pulses: usize,
        residual: f64,
    ) -> Result<Self> {
        let field = forward_transform(&nodal, grid)?;
        Ok(Self {
            grid: grid.clone(),
            speed,
            gamma,
            branch,
            pulses,
            residual,
            nodal,
            field,
        })
    }

    /// Evaluate the profile at an arbitrary point by Fourier summation.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.field.evaluate(x).re
    }
}

/// Serialize a profile to the on-disk text format.
pub fn render_profile(profile: &StoredProfile) -> String {
    let grid = &profile.grid;
    let n = grid.intervals();
    let mut out = String::new();
    out.push_str("# solitary-wave profile\n");
    let _ = writeln!(out, "# half_length = {:.17e}", grid.half_length());
    let _ = writeln!(out, "# intervals = {n}");
    let _ = writeln!(out, "# speed = {:.17e}", profile.speed);
    let _ = writeln!(out, "# gamma = {:.17e}", profile.gamma);
    let _ = writeln!(out, "# branch = {}", profile.branch.as_str());
    let _ = writeln!(out, "# pulses = {}", profile.pulses);
    let _ = writeln!(out, "# residual = {:.17e}", profile.residual);
    out.push_str("x,value\n");
    for (x, v) in grid.nodes().iter().zip(&profile.nodal) {
        let _ = writeln!(out, "{x:.17e},{v:.17e}");
    }
    out.push_str("k,re,im\n");
    for slot in 0..n {
        let k = signed_index(slot, n);
        let c = profile.field.coeffs()[slot];
        let _ = writeln!(out, "{k},{:.17e},{:.17e}", c.re, c.im);
    }
    out
}

/// Write a profile file.
pub fn write_profile(path: &Path, profile: &StoredProfile) -> Result<()> {
    std::fs::write(path, render_profile(profile))
        .map_err(|e| SolverError::Io(std::io::Error::new(e.kind(), format!("writing {}: {e}", path.display()))))
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix("# ")?;
    let (k, v) = rest.split_once('=')?;
    (k.trim() == key).then(|| v.trim())
}

/// Read a profile file written by [`write_profile`].
pub fn read_profile(path: &Path) -> Result<StoredProfile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SolverError::Io(std::io::Error::new(e.kind(), format!("reading {}: {e}", path.display()))))?;
    parse_profile(&text).map_err(|e| match e {
        SolverError::Config(msg) => SolverError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parse the profile text format.
pub fn parse_profile(text: &str) -> Result<StoredProfile> {
    let bad = |msg: &str| SolverError::Config(msg.to_string());
    let mut half_length = None;
    let mut intervals = None;
    let mut speed = None;
    let mut gamma = None;
    let mut branch = None;
    let mut pulses = None;
    let mut residual = None;

    let mut lines = text.lines().peekable();
    while let Some(line) = lines.peek() {
        if !line.starts_with('#') {
            break;
        }
        let line = lines.next().unwrap();
        for (key, slot) in [
            ("half_length", &mut half_length),
            ("speed", &mut speed),
            ("gamma", &mut gamma),
            ("residual", &mut residual),
        ] {
            if let Some(v) = header_value(line, key) {
                *slot = Some(
                    v.parse::<f64>()
                        .map_err(|_| SolverError::Config(format!("bad {key} `{v}`")))?,
                );
            }
        }
        if let Some(v) = header_value(line, "intervals") {
            intervals = Some(
                v.parse::<usize>()
                    .map_err(|_| SolverError::Config(format!("bad intervals `{v}`")))?,
            );
        }
        if let Some(v) = header_value(line, "branch") {
            branch = Some(WaveBranch::parse(v)?);
        }
        if let Some(v) = header_value(line, "pulses") {
            pulses = Some(
                v.parse::<usize>()
                    .map_err(|_| SolverError::Config(format!("bad pulses `{v}`")))?,
            );
        }
    }

    let half_length = half_length.ok_or_else(|| bad("missing half_length header"))?;
    let n = intervals.ok_or_else(|| bad("missing intervals header"))?;
    let grid = PeriodicGrid::new(half_length, n)?;

    if lines.next() != Some("x,value") {
        return Err(bad("expected `x,value` section"));
    }
    let mut nodal = Vec::with_capacity(n);
    for _ in 0..n {
        let row = lines.next().ok_or_else(|| bad("truncated nodal section"))?;
        let (_, v) = row
            .split_once(',')
            .ok_or_else(|| bad("malformed nodal row"))?;
        nodal.push(
            v.parse::<f64>()
                .map_err(|_| SolverError::Config(format!("bad nodal value `{v}`")))?,
        );
    }

    if lines.next() != Some("k,re,im") {
        return Err(bad("expected `k,re,im` section"));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for slot in 0..n {
        let row = lines
            .next()
            .ok_or_else(|| bad("truncated coefficient section"))?;
        let mut parts = row.split(',');
        let k: i64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed coefficient row"))?;
        if k != signed_index(slot, n) {
            return Err(bad("coefficient rows out of order"));
        }
        let re: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed coefficient row"))?;
        let im: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed coefficient row"))?;
        coeffs[slot] = Complex64::new(re, im);
    }

    let field = SpectralField::new(coeffs, grid.clone())?;
    Ok(StoredProfile {
        grid,
        speed: speed.ok_or_else(|| bad("missing speed header"))?,
        gamma: gamma.ok_or_else(|| bad("missing gamma header"))?,
        branch: branch.ok_or_else(|| bad("missing branch header"))?,
        pulses: pulses.ok_or_else(|| bad("missing pulses header"))?,
        residual: residual.ok_or_else(|| bad("missing residual header"))?,
        nodal,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StoredProfile {
        let grid = PeriodicGrid::new(8.0, 32).unwrap();
        let nodal: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| (-(x * x) / 4.0).exp() - 0.3)
            .collect();
        StoredProfile::from_nodal(&grid, nodal, 0.75, 0.5, WaveBranch::Elevation, 1, 2.5e-13)
            .unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let p = sample();
        let parsed = parse_profile(&render_profile(&p)).unwrap();
        assert_eq!(p.nodal, parsed.nodal);
        assert_eq!(p.field.coeffs(), parsed.field.coeffs());
        assert_eq!(p.speed, parsed.speed);
        assert_eq!(p.gamma, parsed.gamma);
        assert_eq!(p.branch, parsed.branch);
        assert_eq!(p.pulses, parsed.pulses);
        assert_eq!(p.residual, parsed.residual);
        assert_eq!(p.grid.half_length(), parsed.grid.half_length());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wave.profile");
        let p = sample();
        write_profile(&path, &p).unwrap();
        let parsed = read_profile(&path).unwrap();
        assert_eq!(p.nodal, parsed.nodal);
    }

    #[test]
    fn rejects_missing_header() {
        let p = sample();
        let text = render_profile(&p);
        let truncated: String = text
            .lines()
            .filter(|l| !l.starts_with("# speed"))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(parse_profile(&truncated).is_err());
    }

    #[test]
    fn rejects_shuffled_coefficients() {
        let p = sample();
        let text = render_profile(&p).replace("\nk,re,im\n0,", "\nk,re,im\n3,");
        assert!(parse_profile(&text).is_err());
    }

    #[test]
    fn evaluate_matches_nodal() {
        let p = sample();
        for (x, v) in p.grid.nodes().iter().zip(&p.nodal) {
            assert!((p.evaluate(*x) - v).abs() < 1e-12);
        }
    }
}
