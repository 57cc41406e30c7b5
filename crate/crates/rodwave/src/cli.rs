//! Configuration parsing, CSV serialization, and the command bodies
//! behind the command-line interface.
//!
//! The configuration is a flat `key = value` file with `#` comments.
//! Unknown keys are rejected; missing keys take the canonical defaults
//! (E = S = ϱ = L = 1, m = 0.05, P = α = 1, physical convention,
//! nx = 401, courant = 0.9, horizon 5 transit times, 200 modal terms).
//!
//! Field CSVs carry a `x,t,u` (or `x,t,T`) header, one sample per line
//! in t-major order, every number printed with 17 significant digits so
//! a parse/re-write round trip is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fdtd::{self, SpaceTimeGrid};
use crate::field::DisplacementField;
use crate::harness::{run_full_validation, HarnessSettings};
use crate::laplace::{invert_field, InversionConfig};
use crate::model::{BoundaryKind, ImpulseParams, RodParams, Scenario};
use crate::point_mass::{free_particle_displacement, oscillator_impulse_response, OscillatorParams};
use crate::series::{closed_form_series, SeriesConfig};
use crate::validation::ValidationReport;

/// Everything a command needs beyond the physical scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub nx: usize,
    pub courant: f64,
    pub horizon_transits: f64,
    pub modal_terms_n: u32,
    pub output_dir: PathBuf,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            nx: 401,
            courant: 0.9,
            horizon_transits: 5.0,
            modal_terms_n: 200,
            output_dir: PathBuf::from("out"),
        }
    }
}

const KNOWN_KEYS: [&str; 13] = [
    "modulus_e",
    "cross_section_s",
    "density_rho",
    "length_l",
    "end_mass_m",
    "magnitude_p",
    "alpha",
    "boundary_mode",
    "nx",
    "courant",
    "horizon_in_transit_times",
    "modal_terms_n",
    "output_dir",
];

/// Parses the flat key = value configuration into a scenario plus run
/// settings. Errors name the offending key and line.
pub fn parse_config(text: &str) -> Result<(Scenario, RunSettings)> {
    let mut rod = (1.0f64, 1.0f64, 1.0f64, 1.0f64, 0.05f64);
    let mut impulse = (1.0f64, 1.0f64);
    let mut mode = BoundaryKind::Physical;
    let mut settings = RunSettings::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(line_no, line.to_string(), "expected `key = value`")
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(line_no, key, "unknown key"));
        }

        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::config(line_no, key, format!("unparsable number `{v}`")))
        };
        let positive = |v: f64| -> Result<f64> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::config(line_no, key, format!("must be > 0, got {v}")))
            }
        };

        match key {
            "modulus_e" => rod.0 = positive(parse_f64(value)?)?,
            "cross_section_s" => rod.1 = positive(parse_f64(value)?)?,
            "density_rho" => rod.2 = positive(parse_f64(value)?)?,
            "length_l" => rod.3 = positive(parse_f64(value)?)?,
            "end_mass_m" => rod.4 = positive(parse_f64(value)?)?,
            "magnitude_p" => {
                let v = parse_f64(value)?;
                if !v.is_finite() {
                    return Err(Error::config(line_no, key, "must be finite"));
                }
                impulse.0 = v;
            }
            "alpha" => {
                let v = parse_f64(value)?;
                if !(v.is_finite() && v != 0.0) {
                    return Err(Error::config(line_no, key, "must be nonzero"));
                }
                impulse.1 = v;
            }
            "boundary_mode" => {
                mode = match value {
                    "paper" => BoundaryKind::Paper,
                    "physical" => BoundaryKind::Physical,
                    other => {
                        return Err(Error::config(
                            line_no,
                            key,
                            format!("must be `paper` or `physical`, got `{other}`"),
                        ))
                    }
                }
            }
            "nx" => {
                let v = value.parse::<usize>().map_err(|_| {
                    Error::config(line_no, key, format!("unparsable integer `{value}`"))
                })?;
                if v < 16 {
                    return Err(Error::config(line_no, key, format!("must be >= 16, got {v}")));
                }
                settings.nx = v;
            }
            "courant" => {
                let v = parse_f64(value)?;
                if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                    return Err(Error::config(
                        line_no,
                        key,
                        format!("must lie in (0, 1], got {v}"),
                    ));
                }
                settings.courant = v;
            }
            "horizon_in_transit_times" => {
                settings.horizon_transits = positive(parse_f64(value)?)?
            }
            "modal_terms_n" => {
                settings.modal_terms_n = value.parse::<u32>().map_err(|_| {
                    Error::config(line_no, key, format!("unparsable integer `{value}`"))
                })?;
            }
            "output_dir" => settings.output_dir = PathBuf::from(value),
            _ => unreachable!(),
        }
    }

    let rod = RodParams::new(rod.0, rod.1, rod.2, rod.3, rod.4).map_err(config_from_invalid)?;
    let impulse = ImpulseParams::new(impulse.0, impulse.1).map_err(config_from_invalid)?;
    let scenario = Scenario::new(rod, impulse, mode, format!("config-{}", mode.as_str()));
    Ok((scenario, settings))
}

fn config_from_invalid(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, message } => Error::config(0, name, message),
        other => other,
    }
}

/// Canonical serialization of the effective configuration, echoed into
/// the output directory by every command.
pub fn effective_config_text(sc: &Scenario, settings: &RunSettings) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modulus_e = {:.16e}", sc.rod.modulus_e);
    let _ = writeln!(out, "cross_section_s = {:.16e}", sc.rod.cross_section_s);
    let _ = writeln!(out, "density_rho = {:.16e}", sc.rod.density_rho);
    let _ = writeln!(out, "length_l = {:.16e}", sc.rod.length_l);
    let _ = writeln!(out, "end_mass_m = {:.16e}", sc.rod.end_mass_m);
    let _ = writeln!(out, "magnitude_p = {:.16e}", sc.impulse.magnitude_p);
    let _ = writeln!(out, "alpha = {:.16e}", sc.impulse.alpha);
    let _ = writeln!(out, "boundary_mode = {}", sc.boundary.kind.as_str());
    let _ = writeln!(out, "nx = {}", settings.nx);
    let _ = writeln!(out, "courant = {:.16e}", settings.courant);
    let _ = writeln!(
        out,
        "horizon_in_transit_times = {:.16e}",
        settings.horizon_transits
    );
    let _ = writeln!(out, "modal_terms_n = {}", settings.modal_terms_n);
    let _ = writeln!(out, "output_dir = {}", settings.output_dir.display());
    if let Some(warning) = sc.rod.regime_warning() {
        let _ = writeln!(out, "# warning: {warning}");
    }
    out
}

/// Serializes a field as `x,t,<value_header>` CSV, t-major, 17
/// significant digits per number.
pub fn write_field_csv(field: &DisplacementField, value_header: &str) -> String {
    let mut out = String::with_capacity(field.samples.len() * 64);
    let _ = writeln!(out, "x,t,{value_header}");
    for (j, &t) in field.ts.iter().enumerate() {
        for (i, &x) in field.xs.iter().enumerate() {
            let _ = writeln!(out, "{x:.16e},{t:.16e},{:.16e}", field.at(i, j));
        }
    }
    out
}

/// Parses a CSV produced by [`write_field_csv`] back into a field.
pub fn parse_field_csv(text: &str, value_header: &str) -> Result<DisplacementField> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Io("empty csv".into()))?;
    let expected = format!("x,t,{value_header}");
    if header != expected {
        return Err(Error::Io(format!(
            "csv header `{header}` does not match `{expected}`"
        )));
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let mut next = |what: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Io(format!("line {}: missing {what}", idx + 2)))?
                .parse::<f64>()
                .map_err(|_| Error::Io(format!("line {}: unparsable {what}", idx + 2)))
        };
        let x = next("x")?;
        let t = next("t")?;
        let v = next("value")?;
        if ts.last() != Some(&t) {
            ts.push(t);
        }
        if ts.len() == 1 {
            xs.push(x);
        }
        samples.push(v);
    }
    DisplacementField::new(xs, ts, samples, value_header, "csv")
}

fn write_output(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

fn echo_config(sc: &Scenario, settings: &RunSettings) -> Result<PathBuf> {
    write_output(
        &settings.output_dir,
        "effective_config.txt",
        &effective_config_text(sc, settings),
    )
}

/// FDTD run: writes the displacement field, the tension field, and the
/// effective configuration.
pub fn cmd_simulate(sc: &Scenario, settings: &RunSettings) -> Result<Vec<PathBuf>> {
    let grid = SpaceTimeGrid::new(sc, settings.nx, settings.courant, settings.horizon_transits)?;
    let stride = (grid.steps / 200).max(1);
    let run = fdtd::run(sc, &grid, stride)?;
    let tension = fdtd::tension_field(&run.field, sc)?;
    let mut written = vec![echo_config(sc, settings)?];
    written.push(write_output(
        &settings.output_dir,
        "u_field.csv",
        &write_field_csv(&run.field, "u"),
    )?);
    written.push(write_output(
        &settings.output_dir,
        "tension_field.csv",
        &write_field_csv(&tension, "T"),
    )?);
    Ok(written)
}

/// Default sampling grid of the inversion and series commands: 41
/// positions, 120 time rows after the initial zero row.
fn output_grid(sc: &Scenario, settings: &RunSettings) -> (Vec<f64>, Vec<f64>) {
    let l = sc.rod.length_l;
    let xs: Vec<f64> = (0..41).map(|i| l * i as f64 / 40.0).collect();
    let t_max = settings.horizon_transits * sc.rod.transit_time();
    let mut ts = vec![0.0];
    ts.extend((1..=120).map(|j| t_max * j as f64 / 120.0));
    (xs, ts)
}

/// Bromwich inversion of the image over the output grid.
pub fn cmd_invert(sc: &Scenario, settings: &RunSettings) -> Result<Vec<PathBuf>> {
    let (xs, ts) = output_grid(sc, settings);
    let cfg = InversionConfig {
        tolerance: 1e-7,
        ..InversionConfig::for_scenario(sc)
    };
    let field = invert_field(sc, &xs, &ts, &cfg)?;
    Ok(vec![
        echo_config(sc, settings)?,
        write_output(
            &settings.output_dir,
            "u_field_inversion.csv",
            &write_field_csv(&field, "u"),
        )?,
    ])
}

/// Closed-form series evaluation over the output grid (published
/// convention only).
pub fn cmd_series(sc: &Scenario, settings: &RunSettings) -> Result<Vec<PathBuf>> {
    if sc.boundary.kind != BoundaryKind::Paper {
        return Err(Error::config(
            0,
            "boundary_mode",
            "the series command evaluates the published closed forms; set boundary_mode = paper",
        ));
    }
    let (xs, ts) = output_grid(sc, settings);
    let cfg = SeriesConfig {
        modal_terms_n: settings.modal_terms_n,
        include_hyperbolic: true,
    };
    let mut samples = Vec::with_capacity(xs.len() * ts.len());
    for &t in &ts {
        for &x in &xs {
            samples.push(closed_form_series(sc, x, t, &cfg)?);
        }
    }
    let field = DisplacementField::new(
        xs,
        ts,
        samples,
        format!("series-{}", sc.boundary.kind.as_str()),
        sc.label.clone(),
    )?;
    Ok(vec![
        echo_config(sc, settings)?,
        write_output(
            &settings.output_dir,
            "u_field_series.csv",
            &write_field_csv(&field, "u"),
        )?,
    ])
}

/// Full validation: runs every criterion, writes the report and the
/// machine-readable summary, and returns the report for exit-status
/// mapping.
pub fn cmd_validate(sc: &Scenario, settings: &RunSettings) -> Result<(ValidationReport, Vec<PathBuf>)> {
    let harness = HarnessSettings {
        nx: settings.nx,
        courant: settings.courant,
        horizon_transits: settings.horizon_transits,
        modal_terms_n: settings.modal_terms_n,
    };
    let report = run_full_validation(sc.rod, sc.impulse, &harness)?;
    let written = vec![
        echo_config(sc, settings)?,
        write_output(&settings.output_dir, "report.txt", &report.render_text())?,
        write_output(
            &settings.output_dir,
            "summary.csv",
            &report.render_summary_csv(),
        )?,
    ];
    Ok((report, written))
}

/// Which point-mass response the point-mass command evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointMassKind {
    Free,
    Oscillator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMassArgs {
    pub kind: PointMassKind,
    pub mass_m: f64,
    pub damping_b: f64,
    pub stiffness_k: f64,
    pub magnitude_p: f64,
    pub alpha: f64,
    pub t_max: f64,
    pub samples: usize,
}

/// Time series of the struck free particle or oscillator as `t,x` CSV.
pub fn cmd_point_mass(args: &PointMassArgs, output_dir: &Path) -> Result<Vec<PathBuf>> {
    if args.samples < 2 {
        return Err(Error::invalid("samples", "must be >= 2"));
    }
    if !(args.t_max.is_finite() && args.t_max > 0.0) {
        return Err(Error::invalid("t_max", "must be > 0"));
    }
    let mut out = String::from("t,x\n");
    for i in 0..args.samples {
        let t = args.t_max * i as f64 / (args.samples - 1) as f64;
        let x = match args.kind {
            PointMassKind::Free => {
                free_particle_displacement(args.magnitude_p, args.alpha, args.mass_m, t)?
            }
            PointMassKind::Oscillator => {
                let osc = OscillatorParams::new(args.mass_m, args.damping_b, args.stiffness_k)?;
                oscillator_impulse_response(&osc, args.magnitude_p, args.alpha, t)?
            }
        };
        let _ = writeln!(out, "{t:.16e},{x:.16e}");
    }
    Ok(vec![write_output(output_dir, "point_mass.csv", &out)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_canonical_defaults() {
        let (sc, settings) = parse_config("").unwrap();
        assert_eq!(sc.rod.modulus_e, 1.0);
        assert_eq!(sc.rod.end_mass_m, 0.05);
        assert_eq!(sc.boundary.kind, BoundaryKind::Physical);
        assert_eq!(settings.nx, 401);
        assert_eq!(settings.courant, 0.9);
        assert_eq!(settings.horizon_transits, 5.0);
        assert_eq!(settings.modal_terms_n, 200);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\n\nend_mass_m = 0.1 # inline comment\n";
        let (sc, _) = parse_config(text).unwrap();
        assert_eq!(sc.rod.end_mass_m, 0.1);
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let err = parse_config("nx = 401\nbogus_key = 3\n").unwrap_err();
        match err {
            Error::Config { line, key, .. } => {
                assert_eq!(line, 2);
                assert_eq!(key, "bogus_key");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invariant_violation_names_the_key() {
        let err = parse_config("end_mass_m = -1\n").unwrap_err();
        match err {
            Error::Config { key, line, .. } => {
                assert_eq!(key, "end_mass_m");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn paper_mode_sets_published_coefficients() {
        let (sc, _) = parse_config("boundary_mode = paper\n").unwrap();
        assert_eq!(sc.boundary.a_left, -1.0);
        assert_eq!(sc.boundary.a_right, -1.0);
    }

    #[test]
    fn courant_above_one_is_a_config_error() {
        let err = parse_config("courant = 1.2\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn unparsable_number_is_reported() {
        let err = parse_config("alpha = twelve\n").unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "alpha"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn field_csv_round_trip_is_byte_identical() {
        let field = DisplacementField::new(
            vec![0.0, 1.0 / 3.0, 1.0],
            vec![0.0, 0.1],
            vec![0.0, -0.25, 1e-17, 3.5e8, f64::MIN_POSITIVE, -0.0],
            "u",
            "roundtrip",
        )
        .unwrap();
        let text = write_field_csv(&field, "u");
        let parsed = parse_field_csv(&text, "u").unwrap();
        let rewritten = write_field_csv(&parsed, "u");
        assert_eq!(text, rewritten);
        assert_eq!(parsed.samples, field.samples);
    }

    #[test]
    fn parsed_csv_recovers_the_grid() {
        let field = DisplacementField::new(
            vec![0.0, 0.5, 1.0],
            vec![0.0, 0.2, 0.4],
            (0..9).map(|i| i as f64).collect(),
            "u",
            "grid",
        )
        .unwrap();
        let parsed = parse_field_csv(&write_field_csv(&field, "u"), "u").unwrap();
        assert_eq!(parsed.xs, field.xs);
        assert_eq!(parsed.ts, field.ts);
    }
}
