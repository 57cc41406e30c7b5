//! End-to-end validation harness: runs every acceptance criterion and
//! assembles the report.
//!
//! All tolerances are pinned here. The harness always evaluates both
//! boundary conventions, whatever convention the caller's scenario uses
//! elsewhere: conservation criteria run under the momentum-conserving
//! assignment, residue and closed-form criteria under the published one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fdtd::{self, ImpulseRealization, SpaceTimeGrid};
use crate::laplace::{invert, invert_field, InversionConfig};
use crate::model::{BoundaryKind, ImpulseParams, RodParams, Scenario};
use crate::point_mass::{
    duhamel_response_with, free_particle_displacement, oscillator_impulse_response, ForceSignal,
    OscillatorParams, QuadratureConfig,
};
use crate::series::{self, SeriesConfig, SeriesTerm};
use crate::transform::{
    contour_residue, eval_phi, eval_phi_stable, solve_phi_bvp_oracle,
};
use crate::validation::{
    build_report, compare_fields, detect_arrival, momentum_drift, ComparisonResult,
    CriterionResult, CriterionStatus, MomentumSummary, PaperSeriesDiagnostic, ValidationReport,
};

/// Grid and truncation choices of a validation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessSettings {
    pub nx: usize,
    pub courant: f64,
    pub horizon_transits: f64,
    pub modal_terms_n: u32,
}

impl Default for HarnessSettings {
    fn default() -> Self {
        Self {
            nx: 401,
            courant: 0.9,
            horizon_transits: 5.0,
            modal_terms_n: 200,
        }
    }
}

/// Deterministic generator for the seeded random checks (criteria 3, 8).
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

const SAMPLE_SEED: u64 = 0x0D15_EA5E_0000_2024;

/// Comparison points for the residue-completeness and published-series
/// criteria, as fractions of L and L/c. Chosen at least 0.15 transit
/// times away from every wavefront crossing, with non-negligible field
/// values; frozen so runs are reproducible.
const SAMPLE_POINTS: [(f64, f64); 20] = [
    (0.15, 0.48),
    (0.15, 0.84),
    (0.15, 1.20),
    (0.15, 1.56),
    (0.35, 0.68),
    (0.35, 1.04),
    (0.35, 1.40),
    (0.35, 1.98),
    (0.55, 0.88),
    (0.55, 1.06),
    (0.55, 1.78),
    (0.55, 1.96),
    (0.75, 1.08),
    (0.75, 1.58),
    (0.75, 1.76),
    (0.75, 1.94),
    (0.95, 1.38),
    (0.95, 1.56),
    (0.95, 1.74),
    (0.95, 1.92),
];

fn criterion(
    id: u8,
    name: &str,
    pass: bool,
    observed: f64,
    threshold: f64,
    detail: String,
) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        status: if pass {
            CriterionStatus::Pass
        } else {
            CriterionStatus::Fail
        },
        observed,
        threshold,
        detail,
    }
}

/// Criterion 1: the point-mass closed forms. The free particle is an
/// algebraic identity; the oscillator impulse response must match the
/// convolution with a width-1e-4 rectangle. The rectangle delivers its
/// momentum at centroid time w/2, so the convolution is compared with
/// the closed form delayed by w/2; the residual is then O(w²).
fn criterion_1() -> Result<CriterionResult> {
    let mut worst_free = 0.0f64;
    for &p in &[0.5, 1.0, 3.0] {
        for &alpha in &[-2.0, 1.0, 0.5] {
            for &m in &[0.05, 1.0, 7.0] {
                for &t in &[0.0, 0.3, 2.0, 9.7] {
                    let x = free_particle_displacement(p, alpha, m, t)?;
                    let expected = p / (m * alpha) * t;
                    let err = (x - expected).abs() / expected.abs().max(1e-30);
                    worst_free = worst_free.max(err);
                }
            }
        }
    }

    let osc = OscillatorParams::new(1.0, 0.5, 2.0)?;
    let width = 1e-4;
    let rect = ForceSignal::rectangle_impulse(1.0, 1.0, width);
    let quad = QuadratureConfig::default();
    let mut max_err = 0.0f64;
    let mut max_ref = 0.0f64;
    for i in 1..=200 {
        let t = 0.05 * i as f64;
        let numeric = duhamel_response_with(&osc, &rect, t, &quad)?;
        let closed = oscillator_impulse_response(&osc, 1.0, 1.0, t - width / 2.0)?;
        max_err = max_err.max((numeric - closed).abs());
        max_ref = max_ref.max(closed.abs());
    }
    let rel = max_err / max_ref;
    let pass = worst_free <= 1e-14 && rel <= 1e-5;
    Ok(criterion(
        1,
        "point-mass closed forms",
        pass,
        rel.max(worst_free),
        1e-5,
        format!(
            "free-particle identity residual {worst_free:.2e}; duhamel vs closed form {rel:.2e}"
        ),
    ))
}

/// Criterion 2: the four reference transform pairs invert to 1e-6 over
/// t in [0.1, 5]. Sine samples too close to a zero of the truth are
/// skipped (pointwise relative error is undefined there).
fn criterion_2() -> Result<CriterionResult> {
    let cfg = InversionConfig::default();
    let ok = |v: Complex64| -> Result<Complex64> { Ok(v) };
    let mut worst = 0.0f64;
    for i in 0..25 {
        let t = 0.1 + (5.0 - 0.1) * i as f64 / 24.0;
        let ramp = invert(&|p| ok(1.0 / (p * p)), t, &cfg)?;
        worst = worst.max(((ramp - t) / t).abs());
        let unit = invert(&|p| ok(1.0 / p), t, &cfg)?;
        worst = worst.max((unit - 1.0).abs());
        let decay = invert(&|p| ok(1.0 / (p + 1.0)), t, &cfg)?;
        worst = worst.max(((decay - (-t).exp()) / (-t).exp()).abs());
        if t.sin().abs() >= 0.05 {
            let sine = invert(&|p| ok(1.0 / (p * p + 1.0)), t, &cfg)?;
            worst = worst.max(((sine - t.sin()) / t.sin()).abs());
        }
    }
    Ok(criterion(
        2,
        "inversion reference pairs",
        worst <= 1e-6,
        worst,
        1e-6,
        "pairs 1/p^2, 1/p, 1/(p+1), 1/(p^2+1) over t in [0.1, 5]".to_string(),
    ))
}

/// Criterion 3: the assembled image equals the independent two-point
/// boundary-value oracle at 100 seeded random (x, p), and the finite
/// difference of the image satisfies its own ODE at second order.
///
/// The assembled cosh/sinh form carries an intrinsic cancellation of
/// e^{2 Re(p) x/c}, so its sampling box keeps Re(p) <= 6 c/L, where the
/// achievable accuracy still clears 1e-9 thirty-fold. The stable
/// rearrangement has no such limit and is additionally checked on a
/// wider box.
fn criterion_3(paper: &Scenario) -> Result<CriterionResult> {
    let mut rng = SplitMix64::new(SAMPLE_SEED);
    let l = paper.rod.length_l;
    let c = paper.wave_speed();
    let mut worst = 0.0f64;
    let mut worst_stable = 0.0f64;
    let mut accepted = 0;
    let mut draws = 0;
    while accepted < 100 {
        draws += 1;
        if draws > 1000 {
            return Err(Error::invalid(
                "sampling",
                "could not draw 100 admissible transform points",
            ));
        }
        let x = rng.in_range(0.0, l);
        let p = Complex64::new(
            rng.in_range(0.3, 6.0) * c / l,
            rng.in_range(-40.0, 40.0) * c / l,
        );
        let phi = match eval_phi(paper, x, p) {
            Ok(v) => v,
            Err(Error::PoleProximity { .. }) => continue,
            Err(e) => return Err(e),
        };
        let oracle = solve_phi_bvp_oracle(paper, x, p)?;
        worst = worst.max((phi - oracle).norm() / oracle.norm().max(1e-300));

        let wide = Complex64::new(rng.in_range(0.3, 24.0) * c / l, p.im);
        let stable = match eval_phi_stable(paper, x, wide) {
            Ok(v) => v,
            Err(Error::PoleProximity { .. }) => continue,
            Err(e) => return Err(e),
        };
        let oracle_wide = solve_phi_bvp_oracle(paper, x, wide)?;
        worst_stable =
            worst_stable.max((stable - oracle_wide).norm() / oracle_wide.norm().max(1e-300));
        accepted += 1;
    }
    let worst = worst.max(worst_stable);

    // O(h²) check of φ_xx = (p/c)² φ via central differences.
    let p = Complex64::new(2.0 * c / l, 3.0 * c / l);
    let x = 0.3 * l;
    let k2 = p * p / (c * c);
    let residual = |h: f64| -> Result<f64> {
        let fm = eval_phi(paper, x - h, p)?;
        let f0 = eval_phi(paper, x, p)?;
        let fp = eval_phi(paper, x + h, p)?;
        Ok(((fp - 2.0 * f0 + fm) / (h * h) - k2 * f0).norm())
    };
    let r1 = residual(1e-3 * l)?;
    let r2 = residual(5e-4 * l)?;
    let order = (r1 / r2).log2();
    let order_ok = (1.7..=2.3).contains(&order);

    Ok(criterion(
        3,
        "transform-domain consistency",
        worst <= 1e-9 && order_ok,
        worst,
        1e-9,
        format!(
            "100 seeded samples (assembled and stable forms); ODE finite-difference order {order:.2}"
        ),
    ))
}

/// One FDTD-versus-inversion comparison over (0, 3 L/c]; returns the
/// comparison and the run's momentum drift.
fn solver_vs_inversion(sc: &Scenario, nx: usize, courant: f64) -> Result<(ComparisonResult, f64)> {
    let grid = SpaceTimeGrid::new(sc, nx, courant, 3.0)?;
    let t_stride = (grid.steps / 40).max(1);
    let run = fdtd::run(sc, &grid, t_stride)?;
    let x_stride = ((nx - 1) / 20).max(1);
    let xs: Vec<f64> = run.field.xs.iter().step_by(x_stride).copied().collect();
    let ts = run.field.ts.clone();

    let inv_cfg = InversionConfig {
        tolerance: 1e-7,
        ..InversionConfig::for_scenario(sc)
    };
    let inv = invert_field(sc, &xs, &ts, &inv_cfg)?;

    let mut samples = Vec::with_capacity(xs.len() * ts.len());
    for j in 0..ts.len() {
        for (ii, _) in xs.iter().enumerate() {
            samples.push(run.field.at(ii * x_stride, j));
        }
    }
    let sub = crate::field::DisplacementField::new(
        xs,
        ts,
        samples,
        run.field.method.clone(),
        run.field.label.clone(),
    )?;
    let drift = momentum_drift(&run, sc).max_relative.unwrap_or(0.0);
    Ok((compare_fields(&inv, &sub, None)?, drift))
}

/// Criterion 4: independent-solver agreement in both conventions.
///
/// The published convention carries the growing boundary mode
/// e^{σ(t - x/c)}, σ = E·S/(m·c): boundary-stencil truncation error
/// shifts the discrete growth rate and is amplified exponentially over
/// the horizon, so that comparison runs on a 4x finer grid than the
/// momentum-conserving one (same Courant number, same bound).
fn criterion_4(
    physical: &Scenario,
    paper: &Scenario,
    settings: &HarnessSettings,
) -> Result<(CriterionResult, Vec<ComparisonResult>, f64)> {
    let (phys_cmp, _) = solver_vs_inversion(physical, settings.nx, settings.courant)?;
    let paper_nx = 4 * (settings.nx - 1) + 1;
    let (paper_cmp, paper_drift) = solver_vs_inversion(paper, paper_nx, settings.courant)?;
    let observed = phys_cmp.l2_rel_error.max(paper_cmp.l2_rel_error);
    let pass = observed <= 1e-2;
    let detail = format!(
        "physical nx={} l2 {:.2e}; paper nx={} l2 {:.2e}",
        settings.nx, phys_cmp.l2_rel_error, paper_nx, paper_cmp.l2_rel_error
    );
    Ok((
        criterion(4, "independent-solver agreement", pass, observed, 1e-2, detail),
        vec![phys_cmp, paper_cmp],
        paper_drift,
    ))
}

/// Criteria 5 and 6: conservation over the long run and pulse arrival
/// at the far end.
fn criteria_5_and_6(
    physical: &Scenario,
    settings: &HarnessSettings,
) -> Result<(CriterionResult, CriterionResult, f64)> {
    let grid = SpaceTimeGrid::new(
        physical,
        settings.nx,
        settings.courant,
        settings.horizon_transits,
    )?;
    let run = fdtd::run(physical, &grid, 10)?;
    let drift = momentum_drift(&run, physical);
    let drift_rel = drift.max_relative.unwrap_or(0.0);
    let c5 = criterion(
        5,
        "momentum conservation",
        drift_rel <= 1e-3,
        drift_rel,
        1e-3,
        format!(
            "max |p(t) - P/alpha|*alpha/P over (0, {} L/c]",
            settings.horizon_transits
        ),
    );

    let arrival_grid = SpaceTimeGrid::new(physical, settings.nx, settings.courant, 1.5)?;
    let arrival_run = fdtd::run(physical, &arrival_grid, 1)?;
    let tension = fdtd::tension_field(&arrival_run.field, physical)?;
    let series_at_l = tension.time_series(tension.nx() - 1);
    let transit = physical.rod.transit_time();
    let arrival = detect_arrival(&series_at_l, 0.1)?;
    let peak = series_at_l.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let pre = series_at_l
        .iter()
        .filter(|p| p.0 < 0.9 * transit)
        .fold(0.0f64, |m, p| m.max(p.1.abs()));
    let window_ok = arrival >= 0.9 * transit && arrival <= 1.1 * transit;
    let quiet_ok = pre <= 0.01 * peak;
    let c6 = criterion(
        6,
        "pulse arrival at the far end",
        window_ok && quiet_ok,
        arrival / transit,
        1.1,
        format!(
            "arrival {:.4} L/c; pre-arrival tension {:.2e} of peak",
            arrival / transit,
            pre / peak
        ),
    );
    Ok((c5, c6, arrival))
}

struct ResidueOutcome {
    result: CriterionResult,
    /// (x, t, trusted Bromwich value) at each sample point.
    trusted: Vec<(f64, f64, f64)>,
}

/// Criterion 7: the numeric-residue series converges to the Bromwich
/// value through truncations 25, 50, 100, 200.
fn criterion_7(paper: &Scenario) -> Result<ResidueOutcome> {
    let l = paper.rod.length_l;
    let transit = paper.rod.transit_time();
    let inv_cfg = InversionConfig {
        tolerance: 1e-7,
        ..InversionConfig::for_scenario(paper)
    };
    let truncations = [25u32, 50, 100, 200];
    let mut per_truncation_worst = [0.0f64; 4];
    let mut trusted = Vec::new();
    for &(xi, tau) in &SAMPLE_POINTS {
        let x = xi * l;
        let t = tau * transit;
        let reference = invert(&|p| eval_phi_stable(paper, x, p), t, &inv_cfg)?;
        trusted.push((x, t, reference));
        for (slot, &n) in truncations.iter().enumerate() {
            let value = series::residue_series(paper, x, t, n)?;
            let rel = ((value - reference) / reference).abs();
            per_truncation_worst[slot] = per_truncation_worst[slot].max(rel);
        }
    }
    let observed = per_truncation_worst[3];
    let pass = observed <= 1e-3;
    let result = criterion(
        7,
        "residue completeness",
        pass,
        observed,
        1e-3,
        format!(
            "worst relative error vs Bromwich by truncation: n=25 {:.2e}, n=50 {:.2e}, \
             n=100 {:.2e}, n=200 {:.2e}",
            per_truncation_worst[0],
            per_truncation_worst[1],
            per_truncation_worst[2],
            per_truncation_worst[3]
        ),
    );
    Ok(ResidueOutcome { result, trusted })
}

/// Criterion 8: the term-3 factor has a removable singularity at the
/// origin; its contour residue must vanish.
fn criterion_8(paper: &Scenario) -> Result<CriterionResult> {
    let mut rng = SplitMix64::new(SAMPLE_SEED ^ 0x8888);
    let l = paper.rod.length_l;
    let transit = paper.rod.transit_time();
    let term = SeriesTerm::new(3)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = rng.in_range(0.0, l);
        let t = rng.in_range(0.0, 2.0 * transit);
        let f =
            |p: Complex64| -> Result<Complex64> { Ok((p * t).exp() * term.ratio(paper, x, p)?) };
        let radius = 0.25 * std::f64::consts::PI * paper.wave_speed() / l;
        let res = contour_residue(&f, Complex64::new(0.0, 0.0), radius, 1e-9)?;
        worst = worst.max(res.norm());
    }
    Ok(criterion(
        8,
        "u3 vanishes",
        worst <= 1e-10,
        worst,
        1e-10,
        "contour residue of the term-3 ratio at p = 0, 10 seeded (x, t)".to_string(),
    ))
}

/// Criterion 9: FDTD self-convergence at second order. Measured with
/// the raised-cosine strike: the velocity-kick front is a genuine
/// derivative jump whose transport converges at first order pointwise,
/// so it cannot exhibit the scheme's smooth-field order.
fn criterion_9(physical: &Scenario, settings: &HarnessSettings) -> Result<CriterionResult> {
    let width = 0.25 * physical.rod.transit_time();
    let order = fdtd::self_convergence_exponent(
        physical,
        &ImpulseRealization::RaisedCosine { width },
        &[101, 201, 401],
        1601,
        settings.courant,
        1.5,
    )?;
    Ok(criterion(
        9,
        "fdtd self-convergence order",
        (1.7..=2.3).contains(&order),
        order,
        2.3,
        "3-level refinement vs 4x reference, raised-cosine strike".to_string(),
    ))
}

/// Criterion 10 (diagnostic, never gating): deviation of the published
/// closed-form series from the trusted inversion values of criterion 7.
fn criterion_10(
    paper: &Scenario,
    settings: &HarnessSettings,
    trusted: &[(f64, f64, f64)],
) -> Result<(CriterionResult, PaperSeriesDiagnostic)> {
    let cfg = SeriesConfig {
        modal_terms_n: settings.modal_terms_n,
        include_hyperbolic: true,
    };
    let mut deviations = Vec::new();
    let mut max_dev = 0.0f64;
    for &(x, t, reference) in trusted {
        let closed = series::closed_form_series(paper, x, t, &cfg)?;
        let dev = ((closed - reference) / reference).abs();
        max_dev = max_dev.max(dev);
        deviations.push((x, t, dev));
    }
    let diagnostic = PaperSeriesDiagnostic {
        sample_deviations: deviations,
        max_rel_deviation: max_dev,
        notes: PaperSeriesDiagnostic::standard_notes(),
    };
    let result = CriterionResult {
        id: 10,
        name: "published-series deviation (diagnostic)".to_string(),
        status: CriterionStatus::Info,
        observed: max_dev,
        threshold: f64::INFINITY,
        detail: format!(
            "max relative deviation {max_dev:.2e} at {} sample points; see the \
             published-series notes",
            trusted.len()
        ),
    };
    Ok((result, diagnostic))
}

/// Runs every acceptance criterion and assembles the validation report.
pub fn run_full_validation(
    rod: RodParams,
    impulse: ImpulseParams,
    settings: &HarnessSettings,
) -> Result<ValidationReport> {
    let physical = Scenario::new(rod, impulse, BoundaryKind::Physical, "validation-physical");
    let paper = Scenario::new(rod, impulse, BoundaryKind::Paper, "validation-paper");

    let c1 = criterion_1()?;
    let c2 = criterion_2()?;
    let c3 = criterion_3(&paper)?;
    let (c4, comparisons, paper_drift) = criterion_4(&physical, &paper, settings)?;
    let (c5, c6, arrival_time) = criteria_5_and_6(&physical, settings)?;
    let residue = criterion_7(&paper)?;
    let c8 = criterion_8(&paper)?;
    let c9 = criterion_9(&physical, settings)?;
    let (c10, diagnostic) = criterion_10(&paper, settings, &residue.trusted)?;

    let physical_drift = c5.observed;
    let transit = rod.transit_time();
    let mut scenario_echo = vec![
        ("modulus_e".to_string(), format!("{:.6e}", rod.modulus_e)),
        (
            "cross_section_s".to_string(),
            format!("{:.6e}", rod.cross_section_s),
        ),
        ("density_rho".to_string(), format!("{:.6e}", rod.density_rho)),
        ("length_l".to_string(), format!("{:.6e}", rod.length_l)),
        ("end_mass_m".to_string(), format!("{:.6e}", rod.end_mass_m)),
        (
            "magnitude_p".to_string(),
            format!("{:.6e}", impulse.magnitude_p),
        ),
        ("alpha".to_string(), format!("{:.6e}", impulse.alpha)),
        ("wave_speed".to_string(), format!("{:.6e}", rod.wave_speed())),
        ("nx".to_string(), settings.nx.to_string()),
        ("courant".to_string(), format!("{}", settings.courant)),
        (
            "horizon_in_transit_times".to_string(),
            format!("{}", settings.horizon_transits),
        ),
        (
            "modal_terms_n".to_string(),
            settings.modal_terms_n.to_string(),
        ),
    ];
    if let Some(warning) = rod.regime_warning() {
        scenario_echo.push(("warning".to_string(), warning));
    }

    build_report(
        scenario_echo,
        comparisons,
        MomentumSummary {
            injected: impulse.injected_momentum(),
            physical_max_drift_rel: physical_drift,
            paper_drift_rel_reported: paper_drift,
        },
        arrival_time,
        (0.9 * transit, 1.1 * transit),
        diagnostic,
        vec![c1, c2, c3, c4, c5, c6, residue.result, c8, c9, c10],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = SplitMix64::new(42);
        for _ in 0..100 {
            let v = c.next_f64();
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn sample_points_avoid_wavefront_bands() {
        let rod = RodParams::new(1.0, 1.0, 1.0, 1.0, 0.05).unwrap();
        for &(x, t) in &SAMPLE_POINTS {
            assert!(
                !crate::field::near_wavefront(x, t, &rod, 0.05),
                "sample point ({x}, {t}) sits in a wavefront band"
            );
        }
    }
}
