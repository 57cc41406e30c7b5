//! Closed-form impulse mechanics of a point particle and a damped
//! oscillator, the simplest verified layer of the transform machinery.
//!
//! A free particle of mass `m` struck by `P δ(α t)` from rest moves as
//! `x(t) = P t / (m α)` with constant velocity `P/(m α)`. An underdamped
//! oscillator `m x'' + b x' + k x = F(t)` started from rest responds to
//! the same strike with
//!
//! ```text
//! x(t) = (P/α) / (m ω₁) · exp(-b t / 2m) · sin(ω₁ t),
//! ω₁² = k/m - b²/(4m²) > 0,
//! ```
//!
//! and to a general force through the convolution
//!
//! ```text
//! x(t) = (1/(m ω₁)) ∫₀ᵗ F(t-τ) e^{-bτ/2m} sin(ω₁ τ) dτ,
//! ```
//!
//! which [`duhamel_response`] evaluates by adaptive quadrature. Only the
//! underdamped regime is provided; overdamped and critically damped
//! inputs are rejected rather than silently extended.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Mass, damping, and stiffness of a single oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    /// Mass m, kg.
    pub mass_m: f64,
    /// Damping coefficient b, kg/s.
    pub damping_b: f64,
    /// Stiffness k, N/m.
    pub stiffness_k: f64,
}

impl OscillatorParams {
    pub fn new(mass_m: f64, damping_b: f64, stiffness_k: f64) -> Result<Self> {
        if !(mass_m.is_finite() && mass_m > 0.0) {
            return Err(Error::invalid("mass_m", format!("must be > 0, got {mass_m}")));
        }
        if !(stiffness_k.is_finite() && stiffness_k > 0.0) {
            return Err(Error::invalid(
                "stiffness_k",
                format!("must be > 0, got {stiffness_k}"),
            ));
        }
        if !(damping_b.is_finite() && damping_b >= 0.0) {
            return Err(Error::invalid(
                "damping_b",
                format!("must be >= 0, got {damping_b}"),
            ));
        }
        Ok(Self {
            mass_m,
            damping_b,
            stiffness_k,
        })
    }

    /// ω₁² = k/m - b²/(4m²).
    pub fn omega1_sq(&self) -> f64 {
        self.stiffness_k / self.mass_m
            - self.damping_b * self.damping_b / (4.0 * self.mass_m * self.mass_m)
    }

    /// Damped angular frequency ω₁; errors outside the underdamped regime.
    pub fn omega1(&self) -> Result<f64> {
        let w2 = self.omega1_sq();
        if w2 <= 0.0 {
            return Err(Error::UnsupportedRegime { omega1_sq: w2 });
        }
        Ok(w2.sqrt())
    }
}

/// A time-indexed forcing term.
///
/// `DeltaImpulse` tags the idealized strike `P δ(α t)`; `Custom` wraps an
/// arbitrary integrable function of time.
#[derive(Clone)]
pub enum ForceSignal {
    DeltaImpulse { magnitude_p: f64, alpha: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ForceSignal {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ForceSignal::Custom(Arc::new(f))
    }

    /// Rectangle pulse on `[0, width]` carrying the full impulse `P/α`.
    pub fn rectangle_impulse(magnitude_p: f64, alpha: f64, width: f64) -> Self {
        let height = magnitude_p / (alpha * width);
        ForceSignal::custom(move |t| if (0.0..=width).contains(&t) { height } else { 0.0 })
    }
}

impl std::fmt::Debug for ForceSignal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ForceSignal::DeltaImpulse { magnitude_p, alpha } => f
                .debug_struct("DeltaImpulse")
                .field("magnitude_p", magnitude_p)
                .field("alpha", alpha)
                .finish(),
            ForceSignal::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(())
}

fn check_free_particle(magnitude_p: f64, alpha: f64, mass_m: f64) -> Result<()> {
    if !(mass_m.is_finite() && mass_m > 0.0) {
        return Err(Error::invalid("mass_m", format!("must be > 0, got {mass_m}")));
    }
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(Error::invalid("alpha", format!("must be nonzero, got {alpha}")));
    }
    if !magnitude_p.is_finite() {
        return Err(Error::invalid("magnitude_p", "must be finite"));
    }
    Ok(())
}

/// Displacement of a free particle struck from rest: x(t) = P t / (m α).
pub fn free_particle_displacement(
    magnitude_p: f64,
    alpha: f64,
    mass_m: f64,
    t: f64,
) -> Result<f64> {
    check_free_particle(magnitude_p, alpha, mass_m)?;
    check_time(t)?;
    Ok(magnitude_p / (mass_m * alpha) * t)
}

/// Velocity of the struck free particle, constant P/(m α) for t > 0.
pub fn free_particle_velocity(magnitude_p: f64, alpha: f64, mass_m: f64, t: f64) -> Result<f64> {
    check_free_particle(magnitude_p, alpha, mass_m)?;
    check_time(t)?;
    Ok(magnitude_p / (mass_m * alpha))
}

/// Underdamped oscillator response to `P δ(α t)`.
pub fn oscillator_impulse_response(
    osc: &OscillatorParams,
    magnitude_p: f64,
    alpha: f64,
    t: f64,
) -> Result<f64> {
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(Error::invalid("alpha", format!("must be nonzero, got {alpha}")));
    }
    check_time(t)?;
    let omega1 = osc.omega1()?;
    let decay = (-osc.damping_b * t / (2.0 * osc.mass_m)).exp();
    Ok(magnitude_p / alpha / (osc.mass_m * omega1) * decay * (omega1 * t).sin())
}

/// Tolerance and budget for the Duhamel quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Hard cap on the number of interval subdivisions.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 1 << 22,
        }
    }
}

/// Oscillator response to an arbitrary force via the convolution integral,
/// evaluated by adaptive Simpson quadrature.
///
/// A `DeltaImpulse` force is handled in closed form (the zero-width limit
/// of the convolution); any other force is integrated numerically to the
/// configured absolute tolerance.
pub fn duhamel_response(osc: &OscillatorParams, force: &ForceSignal, t: f64) -> Result<f64> {
    duhamel_response_with(osc, force, t, &QuadratureConfig::default())
}

pub fn duhamel_response_with(
    osc: &OscillatorParams,
    force: &ForceSignal,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_time(t)?;
    let omega1 = osc.omega1()?;
    match force {
        ForceSignal::DeltaImpulse { magnitude_p, alpha } => {
            oscillator_impulse_response(osc, *magnitude_p, *alpha, t)
        }
        ForceSignal::Custom(f) => {
            if t == 0.0 {
                return Ok(0.0);
            }
            let b_over_2m = osc.damping_b / (2.0 * osc.mass_m);
            let integrand =
                |tau: f64| f(t - tau) * (-b_over_2m * tau).exp() * (omega1 * tau).sin();
            let integral = adaptive_simpson(&integrand, 0.0, t, quad)?;
            Ok(integral / (osc.mass_m * omega1))
        }
    }
}

/// Adaptive Simpson integration with a global subdivision budget.
fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    struct Ctx<'a> {
        f: &'a dyn Fn(f64) -> f64,
        budget: usize,
    }

    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    // Classic recursion: accept when the halved estimate moves by < 15 tol.
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        ctx: &mut Ctx<'_>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (ctx.f)(lm);
        let frm = (ctx.f)(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-15 {
            return Ok(left + right + delta / 15.0);
        }
        if ctx.budget == 0 {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (subdivision budget exhausted)",
                last: left + right,
                previous: whole,
            });
        }
        ctx.budget -= 1;
        let half_tol = 0.5 * tol;
        let l = recurse(ctx, a, m, fa, flm, fm, left, half_tol)?;
        let r = recurse(ctx, m, b, fm, frm, fb, right, half_tol)?;
        Ok(l + r)
    }

    if a == b {
        return Ok(0.0);
    }
    let mut ctx = Ctx {
        f,
        budget: quad.max_subdivisions,
    };
    // Seed with a handful of panels so narrow features near either
    // endpoint cannot hide from the first Simpson estimate.
    let panels = 8;
    let h = (b - a) / panels as f64;
    let panel_tol = quad.abs_tol / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = a + (i + 1) as f64 * h;
        let xm = 0.5 * (x0 + x1);
        let f0 = (ctx.f)(x0);
        let fm = (ctx.f)(xm);
        let f1 = (ctx.f)(x1);
        let whole = simpson(f0, fm, f1, x1 - x0);
        total += recurse(&mut ctx, x0, x1, f0, fm, f1, whole, panel_tol)?;
    }
    Ok(total)
}
