//! Physical parameter records and the constants derived from them.
//!
//! The model is a uniform elastic rod of length `L` with a point mass `m`
//! attached to each end. An impulsive force `P δ(α t)` strikes the left
//! end at `t = 0`. Everything downstream consumes the wave speed
//! `c = sqrt(E/ϱ)` and the boundary stiffness coefficients built here.
//!
//! Two sign conventions for the boundary coefficients are first-class:
//!
//! * [`BoundaryKind::Paper`] applies the same coefficient `a = -E·S` to
//!   `u_x` at both ends, exactly as in the published derivation this
//!   crate cross-checks.
//! * [`BoundaryKind::Physical`] uses `+E·S` at `x = 0` and `-E·S` at
//!   `x = L`, the unique same-magnitude assignment under which the total
//!   momentum of rod plus end masses is conserved after the impulse.
//!
//! All quantities are plain SI floats; there is no unit abstraction.

use crate::error::{Error, Result};

/// Material and geometric constants of the rod and its end masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodParams {
    /// Elasticity modulus E, Pa.
    pub modulus_e: f64,
    /// Cross-section area S, m^2.
    pub cross_section_s: f64,
    /// Mass density ϱ, kg/m^3.
    pub density_rho: f64,
    /// Rod length L, m.
    pub length_l: f64,
    /// Point mass attached at each end, kg.
    pub end_mass_m: f64,
}

impl RodParams {
    pub fn new(
        modulus_e: f64,
        cross_section_s: f64,
        density_rho: f64,
        length_l: f64,
        end_mass_m: f64,
    ) -> Result<Self> {
        let check = |name: &'static str, v: f64| -> Result<()> {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
            }
            Ok(())
        };
        check("modulus_e", modulus_e)?;
        check("cross_section_s", cross_section_s)?;
        check("density_rho", density_rho)?;
        check("length_l", length_l)?;
        check("end_mass_m", end_mass_m)?;
        Ok(Self {
            modulus_e,
            cross_section_s,
            density_rho,
            length_l,
            end_mass_m,
        })
    }

    /// Wave speed c = sqrt(E/ϱ), m/s.
    pub fn wave_speed(&self) -> f64 {
        (self.modulus_e / self.density_rho).sqrt()
    }

    /// Total rod mass M = ϱ·S·L, kg.
    pub fn rod_mass(&self) -> f64 {
        self.density_rho * self.cross_section_s * self.length_l
    }

    /// One transit time L/c, s.
    pub fn transit_time(&self) -> f64 {
        self.length_l / self.wave_speed()
    }

    /// Warns when the end masses are not small against the rod mass.
    ///
    /// The closed forms remain valid; the regime of interest is simply
    /// `m << M`, so this is advisory, never an error.
    pub fn regime_warning(&self) -> Option<String> {
        let ratio = self.end_mass_m / self.rod_mass();
        if ratio >= 0.5 {
            Some(format!(
                "end_mass_m / rod_mass = {ratio:.3} is not small; \
                 the light-end-mass regime assumes m << M"
            ))
        } else {
            None
        }
    }
}

/// Wave speed of the rod material, c = sqrt(E/ϱ).
pub fn derive_wave_speed(rod: &RodParams) -> f64 {
    rod.wave_speed()
}

/// Impulse parameters of the strike `P δ(α t)`.
///
/// The transform of `δ(α t)` over `t >= 0` is taken as `1/α`, so the full
/// injected momentum is `P/α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpulseParams {
    /// Force scale P, kg·m·s^-2.
    pub magnitude_p: f64,
    /// Time scale α of the delta argument, s^-1.
    pub alpha: f64,
}

impl ImpulseParams {
    pub fn new(magnitude_p: f64, alpha: f64) -> Result<Self> {
        if !magnitude_p.is_finite() {
            return Err(Error::invalid("magnitude_p", "must be finite"));
        }
        if !(alpha.is_finite() && alpha != 0.0) {
            return Err(Error::invalid("alpha", format!("must be nonzero, got {alpha}")));
        }
        Ok(Self { magnitude_p, alpha })
    }

    /// Momentum delivered by the strike, P/α, kg·m/s.
    pub fn injected_momentum(&self) -> f64 {
        self.magnitude_p / self.alpha
    }
}

/// Which sign convention the boundary coefficients follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Published convention: a = -E·S multiplies u_x at both ends.
    Paper,
    /// Momentum-conserving convention: +E·S at x = 0, -E·S at x = L.
    Physical,
}

impl BoundaryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryKind::Paper => "paper",
            BoundaryKind::Physical => "physical",
        }
    }
}

/// Signed coefficients multiplying u_x in the two boundary equations
/// `m·u_tt(0,t) = a_left·u_x(0,t) + P δ(α t)` and
/// `m·u_tt(L,t) = a_right·u_x(L,t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMode {
    pub kind: BoundaryKind,
    /// Coefficient at x = 0, N.
    pub a_left: f64,
    /// Coefficient at x = L, N.
    pub a_right: f64,
}

impl BoundaryMode {
    pub fn new(rod: &RodParams, kind: BoundaryKind) -> Self {
        let (a_left, a_right) = derive_stiffness_coefficient(rod, kind);
        Self {
            kind,
            a_left,
            a_right,
        }
    }
}

/// The signed boundary coefficient pair for a given convention.
pub fn derive_stiffness_coefficient(rod: &RodParams, kind: BoundaryKind) -> (f64, f64) {
    let es = rod.modulus_e * rod.cross_section_s;
    match kind {
        BoundaryKind::Paper => (-es, -es),
        BoundaryKind::Physical => (es, -es),
    }
}

/// A complete problem instance: rod, impulse, and boundary convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rod: RodParams,
    pub impulse: ImpulseParams,
    pub boundary: BoundaryMode,
    pub label: String,
}

impl Scenario {
    pub fn new(
        rod: RodParams,
        impulse: ImpulseParams,
        kind: BoundaryKind,
        label: impl Into<String>,
    ) -> Self {
        Self {
            rod,
            impulse,
            boundary: BoundaryMode::new(&rod, kind),
            label: label.into(),
        }
    }

    /// The desk-scale reference scenario used throughout the test suite:
    /// E = S = ϱ = L = 1, m = 0.05, P = α = 1.
    pub fn canonical(kind: BoundaryKind) -> Self {
        let rod = RodParams::new(1.0, 1.0, 1.0, 1.0, 0.05).expect("canonical rod");
        let impulse = ImpulseParams::new(1.0, 1.0).expect("canonical impulse");
        Scenario::new(rod, impulse, kind, format!("canonical-{}", kind.as_str()))
    }

    pub fn wave_speed(&self) -> f64 {
        self.rod.wave_speed()
    }

    /// Injected momentum P/α.
    pub fn injected_momentum(&self) -> f64 {
        self.impulse.injected_momentum()
    }
}
