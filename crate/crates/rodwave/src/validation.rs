//! Cross-method comparison, conservation checks, arrival detection, and
//! the structured validation report.

use crate::error::{Error, Result};
use crate::fdtd::RunResult;
use crate::field::{near_wavefront, wavefront_bands, DisplacementField};
use crate::model::{RodParams, Scenario};

/// Wavefront exclusion policy for field comparisons.
///
/// Truncated series cannot match the solution pointwise on the
/// characteristics, so comparisons against them drop a band of the
/// given half-width around each crossing. Solver-versus-inversion
/// comparisons use the full grid.
#[derive(Debug, Clone, Copy)]
pub struct WavefrontExclusion {
    pub rod: RodParams,
    pub half_width: f64,
}

/// Outcome of comparing two sampled fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    pub method_a: String,
    pub method_b: String,
    pub grid_note: String,
    /// ||a - b||₂ / ||a||₂ over the included samples.
    pub l2_rel_error: f64,
    /// max|a - b| / max|a| over the included samples.
    pub linf_rel_error: f64,
    /// (t_center, half_width) bands that were excluded, deduplicated.
    pub excluded_bands: Vec<(f64, f64)>,
    pub excluded_samples: usize,
    pub compared_samples: usize,
}

fn grids_match(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0))
}

/// Linear interpolation of `field` onto (x, t); the point must lie
/// inside the field's grid.
fn sample_bilinear(field: &DisplacementField, x: f64, t: f64) -> Result<f64> {
    let locate = |grid: &[f64], v: f64| -> Result<(usize, f64)> {
        if v < grid[0] - 1e-12 || v > grid[grid.len() - 1] + 1e-12 {
            return Err(Error::invalid(
                "grid",
                format!("point {v} outside [{}, {}]", grid[0], grid[grid.len() - 1]),
            ));
        }
        let mut i = match grid.binary_search_by(|g| g.partial_cmp(&v).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if i >= grid.len() - 1 {
            i = grid.len() - 2;
        }
        let w = ((v - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
        Ok((i, w))
    };
    let (i, wx) = locate(&field.xs, x)?;
    let (j, wt) = locate(&field.ts, t)?;
    let f00 = field.at(i, j);
    let f10 = field.at(i + 1, j);
    let f01 = field.at(i, j + 1);
    let f11 = field.at(i + 1, j + 1);
    Ok((1.0 - wt) * ((1.0 - wx) * f00 + wx * f10) + wt * ((1.0 - wx) * f01 + wx * f11))
}

/// Relative L2 and L∞ distance between two fields, normalized by `a`.
///
/// When the grids differ, `b` is resampled onto `a`'s grid by linear
/// interpolation (so `b` must cover `a`'s domain).
pub fn compare_fields(
    a: &DisplacementField,
    b: &DisplacementField,
    exclusions: Option<&WavefrontExclusion>,
) -> Result<ComparisonResult> {
    let same_grid = grids_match(&a.xs, &b.xs) && grids_match(&a.ts, &b.ts);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_diff = 0.0f64;
    let mut max_a = 0.0f64;
    let mut excluded = 0usize;
    let mut compared = 0usize;
    let mut bands: Vec<(f64, f64)> = Vec::new();

    for (j, &t) in a.ts.iter().enumerate() {
        for (i, &x) in a.xs.iter().enumerate() {
            if let Some(exc) = exclusions {
                if near_wavefront(x, t, &exc.rod, exc.half_width) {
                    excluded += 1;
                    continue;
                }
            }
            let va = a.at(i, j);
            let vb = if same_grid {
                b.at(i, j)
            } else {
                sample_bilinear(b, x, t)?
            };
            num += (va - vb) * (va - vb);
            den += va * va;
            max_diff = max_diff.max((va - vb).abs());
            max_a = max_a.max(va.abs());
            compared += 1;
        }
    }
    if compared == 0 {
        return Err(Error::invalid("fields", "no samples left to compare"));
    }
    if let Some(exc) = exclusions {
        let t_max = a.ts.last().copied().unwrap_or(0.0);
        for &x in &a.xs {
            for band in wavefront_bands(x, t_max, &exc.rod, exc.half_width) {
                let rounded = ((band.0 * 1e9).round() / 1e9, band.1);
                if !bands.contains(&rounded) {
                    bands.push(rounded);
                }
            }
        }
        bands.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    }

    Ok(ComparisonResult {
        method_a: a.method.clone(),
        method_b: b.method.clone(),
        grid_note: format!("{} x {} samples", a.nx(), a.nt()),
        l2_rel_error: (num / den.max(1e-300)).sqrt(),
        linf_rel_error: max_diff / max_a.max(1e-300),
        excluded_bands: bands,
        excluded_samples: excluded,
        compared_samples: compared,
    })
}

/// Momentum conservation summary of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumDrift {
    /// max |p(t) - P/α| · α/P over recorded times; None for zero impulse.
    pub max_relative: Option<f64>,
    /// max |p(t) - P/α| in kg·m/s.
    pub max_absolute: f64,
}

/// Maximum drift of the recorded total momentum from the injected P/α.
pub fn momentum_drift(run: &RunResult, sc: &Scenario) -> MomentumDrift {
    let p0 = sc.injected_momentum();
    let max_absolute = run
        .momentum
        .iter()
        .fold(0.0f64, |m, &(_, p)| m.max((p - p0).abs()));
    let max_relative = if p0 == 0.0 {
        None
    } else {
        Some(max_absolute / p0.abs())
    };
    MomentumDrift {
        max_relative,
        max_absolute,
    }
}

/// First time the signal exceeds `threshold` times its own peak.
pub fn detect_arrival(series: &[(f64, f64)], threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    let peak = series.iter().fold(0.0f64, |m, &(_, v)| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::NoSignal {
            what: "arrival detection (all-zero tension series)",
        });
    }
    series
        .iter()
        .find(|&&(_, v)| v.abs() > threshold * peak)
        .map(|&(t, _)| t)
        .ok_or(Error::NoSignal {
            what: "arrival detection (no sample above threshold)",
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionStatus {
    Pass,
    Fail,
    /// Diagnostic entry: reported, never gating.
    Info,
}

impl CriterionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriterionStatus::Pass => "PASS",
            CriterionStatus::Fail => "FAIL",
            CriterionStatus::Info => "INFO",
        }
    }
}

/// One acceptance criterion outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub status: CriterionStatus,
    pub observed: f64,
    pub threshold: f64,
    pub detail: String,
}

/// Summary of the momentum traces of both boundary conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSummary {
    pub injected: f64,
    /// Asserted: momentum-conserving convention.
    pub physical_max_drift_rel: f64,
    /// Reported only: the published convention is non-conservative.
    pub paper_drift_rel_reported: f64,
}

/// Measured deviation of the published closed-form series from the
/// trusted transform inversion, with the standing notes about the
/// published text.
#[derive(Debug, Clone, PartialEq)]
pub struct PaperSeriesDiagnostic {
    /// (x, t, relative deviation) at the sample points.
    pub sample_deviations: Vec<(f64, f64, f64)>,
    pub max_rel_deviation: f64,
    pub notes: Vec<String>,
}

impl PaperSeriesDiagnostic {
    /// The notes that must always accompany the diagnostic.
    pub fn standard_notes() -> Vec<String> {
        vec![
            "expanded image: the published expanded form of the transform image carries an \
             undefined coefficient 'b'; it is evaluated as P/alpha, the only reading \
             consistent with the boundary-coefficient solve."
                .to_string(),
            "sign convention: the published boundary conditions apply a = -E*S to u_x at \
             both ends; total momentum is conserved only under the assignment +E*S at x=0, \
             -E*S at x=L, so both conventions are first-class and compared."
                .to_string(),
            "term 1 hyperbolic factor: the published closed form prints cosh(aL/mc^2) where \
             the simple-pole residue rule yields coth(aL/mc^2); the closed forms here use \
             coth, which the contour-quadrature residues confirm."
                .to_string(),
            "term 4 modal family: the published closed form keeps only the real-pole part \
             of term 4 and omits its modal-pole family; the deviation quantified here is \
             dominated by that omission."
                .to_string(),
        ]
    }
}

/// The assembled validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scenario_echo: Vec<(String, String)>,
    pub comparisons: Vec<ComparisonResult>,
    pub momentum: MomentumSummary,
    /// Detected pulse arrival time at x = L, s.
    pub arrival_time: f64,
    /// Acceptance window for the arrival, s.
    pub arrival_window: (f64, f64),
    pub paper_series: PaperSeriesDiagnostic,
    pub criteria: Vec<CriterionResult>,
}

/// Assembles and checks the report: every criterion 1..=10 exactly once,
/// the solver-versus-inversion comparisons present, and the standing
/// notes attached.
pub fn build_report(
    scenario_echo: Vec<(String, String)>,
    comparisons: Vec<ComparisonResult>,
    momentum: MomentumSummary,
    arrival_time: f64,
    arrival_window: (f64, f64),
    paper_series: PaperSeriesDiagnostic,
    mut criteria: Vec<CriterionResult>,
) -> Result<ValidationReport> {
    criteria.sort_by_key(|c| c.id);
    for id in 1..=10u8 {
        let count = criteria.iter().filter(|c| c.id == id).count();
        if count != 1 {
            return Err(Error::IncompleteReport {
                message: format!("criterion {id} appears {count} times (must be exactly once)"),
            });
        }
    }
    let has_solver_vs_inversion = comparisons.iter().any(|c| {
        (c.method_a.contains("inversion") && c.method_b.contains("fdtd"))
            || (c.method_a.contains("fdtd") && c.method_b.contains("inversion"))
    });
    if !has_solver_vs_inversion {
        return Err(Error::IncompleteReport {
            message: "mandatory solver-versus-inversion comparison missing".to_string(),
        });
    }
    if paper_series.notes.is_empty() || paper_series.sample_deviations.is_empty() {
        return Err(Error::IncompleteReport {
            message: "published-series diagnostic section is empty".to_string(),
        });
    }
    Ok(ValidationReport {
        scenario_echo,
        comparisons,
        momentum,
        arrival_time,
        arrival_window,
        paper_series,
        criteria,
    })
}

impl ValidationReport {
    /// All gating criteria passed (diagnostics never gate).
    pub fn gating_passed(&self) -> bool {
        self.criteria
            .iter()
            .all(|c| c.status != CriterionStatus::Fail)
    }

    pub fn failed_criteria(&self) -> Vec<u8> {
        self.criteria
            .iter()
            .filter(|c| c.status == CriterionStatus::Fail)
            .map(|c| c.id)
            .collect()
    }

    /// Deterministic key: value text rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[scenario]\n");
        for (k, v) in &self.scenario_echo {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out.push_str("\n[comparisons]\n");
        for c in &self.comparisons {
            out.push_str(&format!(
                "{} vs {}: l2_rel_error: {:.6e}, linf_rel_error: {:.6e}, grid: {}, \
                 compared: {}, excluded: {}, exclusion_bands: {}\n",
                c.method_a,
                c.method_b,
                c.l2_rel_error,
                c.linf_rel_error,
                c.grid_note,
                c.compared_samples,
                c.excluded_samples,
                c.excluded_bands.len(),
            ));
        }
        out.push_str("\n[momentum]\n");
        out.push_str(&format!("injected: {:.6e}\n", self.momentum.injected));
        out.push_str(&format!(
            "physical_max_drift_rel: {:.6e}\n",
            self.momentum.physical_max_drift_rel
        ));
        out.push_str(&format!(
            "paper_drift_rel_reported: {:.6e}\n",
            self.momentum.paper_drift_rel_reported
        ));
        out.push_str("\n[arrival]\n");
        out.push_str(&format!("arrival_time: {:.6e}\n", self.arrival_time));
        out.push_str(&format!(
            "window: [{:.6e}, {:.6e}]\n",
            self.arrival_window.0, self.arrival_window.1
        ));
        out.push_str("\n[published_series_diagnostic]\n");
        out.push_str(&format!(
            "max_rel_deviation: {:.6e}\n",
            self.paper_series.max_rel_deviation
        ));
        for (x, t, dev) in &self.paper_series.sample_deviations {
            out.push_str(&format!("x: {x:.3}, t: {t:.3}, rel_deviation: {dev:.6e}\n"));
        }
        for (i, note) in self.paper_series.notes.iter().enumerate() {
            out.push_str(&format!("note_{}: {note}\n", i + 1));
        }
        out.push_str("\n[criteria]\n");
        for c in &self.criteria {
            out.push_str(&format!(
                "criterion_{}: {} ({}; observed: {:.6e}, threshold: {:.6e})\n",
                c.id,
                c.status.as_str(),
                c.name,
                c.observed,
                c.threshold
            ));
        }
        out
    }

    /// Machine-readable summary table.
    pub fn render_summary_csv(&self) -> String {
        let mut out = String::from("criterion,name,status,observed,threshold\n");
        for c in &self.criteria {
            out.push_str(&format!(
                "{},{},{},{:.16e},{:.16e}\n",
                c.id,
                c.name,
                c.status.as_str(),
                c.observed,
                c.threshold
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundaryKind;
    use approx::assert_relative_eq;

    fn toy_field(scale: f64) -> DisplacementField {
        let xs = vec![0.0, 0.5, 1.0];
        let ts = vec![0.0, 0.5, 1.0, 1.5];
        let samples: Vec<f64> = (0..12).map(|i| scale * (i as f64 + 1.0)).collect();
        DisplacementField::new(xs, ts, samples, "fdtd-physical", "toy").unwrap()
    }

    #[test]
    fn self_comparison_is_zero() {
        let a = toy_field(1.0);
        let r = compare_fields(&a, &a, None).unwrap();
        assert_eq!(r.l2_rel_error, 0.0);
        assert_eq!(r.linf_rel_error, 0.0);
    }

    #[test]
    fn uniform_scaling_gives_exact_error() {
        let a = toy_field(1.0);
        let b = {
            let mut b = toy_field(1.0);
            b.samples.iter_mut().for_each(|v| *v *= 1.01);
            b.method = "inversion-physical".into();
            b
        };
        let r = compare_fields(&a, &b, None).unwrap();
        assert_relative_eq!(r.l2_rel_error, 0.01, max_relative = 1e-12);
        assert_relative_eq!(r.linf_rel_error, 0.01, max_relative = 1e-12);
    }

    #[test]
    fn swapped_arguments_scale_by_norm_ratio() {
        let a = toy_field(1.0);
        let mut b = toy_field(1.0);
        b.samples.iter_mut().for_each(|v| *v *= 1.25);
        let ab = compare_fields(&a, &b, None).unwrap();
        let ba = compare_fields(&b, &a, None).unwrap();
        let norm_a: f64 = a.samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_b: f64 = b.samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_relative_eq!(
            ab.l2_rel_error * norm_a,
            ba.l2_rel_error * norm_b,
            max_relative = 1e-12
        );
    }

    #[test]
    fn resampling_onto_coarser_grid() {
        // b holds u = x + 2t on a fine grid; comparing against the exact
        // values on a coarse grid must be exact for a bilinear field.
        let fine_xs: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
        let fine_ts: Vec<f64> = (0..31).map(|j| j as f64 / 10.0).collect();
        let mut samples = Vec::new();
        for &t in &fine_ts {
            for &x in &fine_xs {
                samples.push(x + 2.0 * t);
            }
        }
        let b =
            DisplacementField::new(fine_xs, fine_ts, samples, "inversion-physical", "lin").unwrap();

        let xs = vec![0.05, 0.55, 0.95];
        let ts = vec![0.15, 1.55, 2.95];
        let mut coarse = Vec::new();
        for &t in &ts {
            for &x in &xs {
                coarse.push(x + 2.0 * t);
            }
        }
        let a = DisplacementField::new(xs, ts, coarse, "fdtd-physical", "lin").unwrap();
        let r = compare_fields(&a, &b, None).unwrap();
        assert!(r.l2_rel_error <= 1e-12, "{}", r.l2_rel_error);
    }

    #[test]
    fn disjoint_grids_are_rejected() {
        let a = toy_field(1.0);
        let mut b = toy_field(1.0);
        b.xs = vec![2.0, 2.5, 3.0];
        assert!(compare_fields(&a, &b, None).is_err());
    }

    #[test]
    fn exclusion_bands_are_documented() {
        let sc = Scenario::canonical(BoundaryKind::Paper);
        let a = toy_field(1.0);
        let exc = WavefrontExclusion {
            rod: sc.rod,
            half_width: 0.05,
        };
        let r = compare_fields(&a, &a, Some(&exc)).unwrap();
        assert!(r.excluded_samples > 0);
        assert!(!r.excluded_bands.is_empty());
        assert!(r.excluded_bands.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    #[test]
    fn arrival_detection_and_monotonicity() {
        let series: Vec<(f64, f64)> = (0..100)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, if t < 0.5 { 0.0 } else { (t - 0.5) * 2.0 })
            })
            .collect();
        let t1 = detect_arrival(&series, 0.05).unwrap();
        let t2 = detect_arrival(&series, 0.2).unwrap();
        let t3 = detect_arrival(&series, 0.8).unwrap();
        assert!(t1 <= t2 && t2 <= t3);
    }

    #[test]
    fn all_zero_tension_is_no_signal() {
        let series: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        assert!(matches!(
            detect_arrival(&series, 0.1),
            Err(Error::NoSignal { .. })
        ));
    }

    #[test]
    fn out_of_range_threshold_is_rejected() {
        let series = [(0.0, 1.0)];
        assert!(detect_arrival(&series, 0.0).is_err());
        assert!(detect_arrival(&series, 1.0).is_err());
    }

    fn dummy_criteria() -> Vec<CriterionResult> {
        (1..=10u8)
            .map(|id| CriterionResult {
                id,
                name: format!("criterion-{id}"),
                status: if id == 10 {
                    CriterionStatus::Info
                } else {
                    CriterionStatus::Pass
                },
                observed: 0.0,
                threshold: 1.0,
                detail: String::new(),
            })
            .collect()
    }

    fn dummy_report_parts() -> (Vec<ComparisonResult>, MomentumSummary, PaperSeriesDiagnostic) {
        let comparison = ComparisonResult {
            method_a: "inversion-physical".into(),
            method_b: "fdtd-physical".into(),
            grid_note: "toy".into(),
            l2_rel_error: 0.0,
            linf_rel_error: 0.0,
            excluded_bands: vec![],
            excluded_samples: 0,
            compared_samples: 1,
        };
        let momentum = MomentumSummary {
            injected: 1.0,
            physical_max_drift_rel: 0.0,
            paper_drift_rel_reported: 0.0,
        };
        let diag = PaperSeriesDiagnostic {
            sample_deviations: vec![(0.5, 0.5, 1e-9)],
            max_rel_deviation: 1e-9,
            notes: PaperSeriesDiagnostic::standard_notes(),
        };
        (vec![comparison], momentum, diag)
    }

    #[test]
    fn report_requires_each_criterion_exactly_once() {
        let (comparisons, momentum, diag) = dummy_report_parts();
        let mut criteria = dummy_criteria();
        criteria.pop();
        let r = build_report(
            vec![],
            comparisons.clone(),
            momentum,
            1.0,
            (0.9, 1.1),
            diag.clone(),
            criteria,
        );
        assert!(matches!(r, Err(Error::IncompleteReport { .. })));

        let mut doubled = dummy_criteria();
        doubled.push(doubled[0].clone());
        let r2 = build_report(vec![], comparisons, momentum, 1.0, (0.9, 1.1), diag, doubled);
        assert!(matches!(r2, Err(Error::IncompleteReport { .. })));
    }

    #[test]
    fn report_requires_solver_vs_inversion_comparison() {
        let (_, momentum, diag) = dummy_report_parts();
        let r = build_report(
            vec![],
            vec![],
            momentum,
            1.0,
            (0.9, 1.1),
            diag,
            dummy_criteria(),
        );
        assert!(matches!(r, Err(Error::IncompleteReport { .. })));
    }

    #[test]
    fn report_rendering_is_deterministic_and_complete() {
        let (comparisons, momentum, diag) = dummy_report_parts();
        let report = build_report(
            vec![("label".into(), "toy".into())],
            comparisons,
            momentum,
            1.0,
            (0.9, 1.1),
            diag,
            dummy_criteria(),
        )
        .unwrap();
        let a = report.render_text();
        let b = report.render_text();
        assert_eq!(a, b);
        for id in 1..=10 {
            assert_eq!(a.matches(&format!("criterion_{id}: ")).count(), 1);
        }
        // The standing notes are always present.
        assert!(a.contains("note_1"));
        assert!(a.contains("coth"));
        assert!(a.contains("sign convention"));
        let csv = report.render_summary_csv();
        assert_eq!(csv.lines().count(), 11);
        assert!(report.gating_passed());
    }
}
