//! Laplace-domain solution of the rod problem and numeric residue
//! extraction.
//!
//! Transforming the wave equation in time turns u(x, t) into an image
//! φ(x, p) obeying the two-point boundary value problem
//!
//! ```text
//! φ_xx - (p/c)² φ = 0,
//! m p² φ(0) = a_left  φ'(0) + P/α,
//! m p² φ(L) = a_right φ'(L),
//! ```
//!
//! solved by φ = c₁ cosh(px/c) + c₂ sinh(px/c). [`eval_coefficients`]
//! returns c₁, c₂ — for the published convention via the printed closed
//! forms, and for the momentum-conserving convention via the general 2x2
//! solve. [`solve_phi_bvp_oracle`] solves the same problem in an
//! independent exponential basis and never reuses those formulas; it is
//! the oracle the closed forms are checked against.
//!
//! Under the published convention the image is meromorphic with poles at
//! p = 0 (order 2), p = ±E·S/(m·c), and p = ±iπnc/L. [`numeric_residue`]
//! extracts residues from the contour-integral definition (trapezoidal
//! quadrature on a circle, node-doubled until converged) rather than
//! trusting any printed algebra.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BoundaryKind, Scenario};

/// A complex frequency together with the image value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    pub p: Complex64,
    pub phi: Complex64,
}

impl TransformPoint {
    /// Evaluates the image at an admissible frequency.
    pub fn evaluate(sc: &Scenario, x: f64, p: Complex64) -> Result<Self> {
        Ok(Self {
            p,
            phi: eval_phi(sc, x, p)?,
        })
    }
}

/// Which family of the pole catalog a pole belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleFamily {
    /// p = 0, order 2.
    Origin,
    /// p = ±E·S/(m·c) on the real axis.
    RealPair,
    /// p = ±iπnc/L, n >= 1.
    ModalPair(u32),
}

/// One pole of the transform image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub order: u32,
    pub family: PoleFamily,
}

/// A pole together with the residue of e^{pt} φ(x, p) there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueTermValue {
    pub pole: Pole,
    pub residue_of_exp_pt_phi: Complex64,
}

/// Relative threshold below which a denominator counts as "at a pole".
const POLE_GUARD: f64 = 1e-12;

/// Relative convergence target of the contour quadrature.
const RESIDUE_TOL: f64 = 1e-9;

fn guard_denominator(p: Complex64, denom: Complex64, scale: f64) -> Result<()> {
    if denom.norm() < POLE_GUARD * scale {
        return Err(Error::PoleProximity {
            p: (p.re, p.im),
            denom_magnitude: denom.norm(),
            scale,
        });
    }
    Ok(())
}

/// Coefficients c₁, c₂ of φ = c₁ cosh(px/c) + c₂ sinh(px/c).
///
/// Both coefficients scale exactly with P/α, and conjugating p conjugates
/// them (the underlying problem has real coefficients).
pub fn eval_coefficients(sc: &Scenario, p: Complex64) -> Result<(Complex64, Complex64)> {
    let c = sc.wave_speed();
    let m = sc.rod.end_mass_m;
    let l = sc.rod.length_l;
    let pa = sc.injected_momentum();

    if p.norm() == 0.0 {
        return Err(Error::PoleProximity {
            p: (0.0, 0.0),
            denom_magnitude: 0.0,
            scale: 1.0,
        });
    }

    let s = (p * l / c).sinh();
    let co = (p * l / c).cosh();
    // Natural magnitude of sinh/cosh at this contour height.
    let hyp_scale = (p.re * l / c).abs().cosh();

    match sc.boundary.kind {
        BoundaryKind::Paper => {
            let a = sc.boundary.a_left;
            let q = a * a - m * m * p * p * c * c;
            let q_scale = a * a + (m * p.norm() * c).powi(2);
            let denom = p * s * q;
            guard_denominator(p, denom, p.norm() * hyp_scale * q_scale)?;

            let c1 = (a * c * pa * co - pa * m * p * c * c * s) / denom;
            let c2 = -pa * c / (a * p)
                + (pa * m * a * c * c * co - pa * p * m * m * c * c * c * s) / (a * s * q);
            Ok((c1, c2))
        }
        BoundaryKind::Physical => {
            let (al, ar) = (sc.boundary.a_left, sc.boundary.a_right);
            let k = p / c;
            let mp2 = m * p * p;
            let det = mp2 * (mp2 * s - ar * k * co) + al * k * (mp2 * co - ar * k * s);
            let row = mp2.norm() + (al.abs().max(ar.abs())) * k.norm();
            guard_denominator(p, det, row * row * hyp_scale)?;

            let c1 = pa * (mp2 * s - ar * k * co) / det;
            let c2 = -pa * (mp2 * co - ar * k * s) / det;
            Ok((c1, c2))
        }
    }
}

fn check_position(x: f64, l: f64) -> Result<()> {
    if !(x.is_finite() && (0.0..=l).contains(&x)) {
        return Err(Error::invalid("x", format!("must lie in [0, {l}], got {x}")));
    }
    Ok(())
}

/// The image φ(x, p) assembled from the boundary coefficients.
pub fn eval_phi(sc: &Scenario, x: f64, p: Complex64) -> Result<Complex64> {
    check_position(x, sc.rod.length_l)?;
    let (c1, c2) = eval_coefficients(sc, p)?;
    let c = sc.wave_speed();
    Ok(c1 * (p * x / c).cosh() + c2 * (p * x / c).sinh())
}

/// The same image in a cancellation-free arrangement.
///
/// The cosh/sinh assembly loses all significance when Re(p)·x/c is
/// large: the two terms of size e^{+px/c} cancel down to a value of
/// size e^{-px/c}. Eliminating the coefficients analytically gives the
/// single closed form
///
/// ```text
/// φ(x, p) = (P/α) · [m p² sinh(p(L-x)/c) - a_right (p/c) cosh(p(L-x)/c)] / Det,
/// Det     = m p² (m p² S - a_right k C) + a_left k (m p² C - a_right k S),
/// ```
///
/// (S, C hyperbolics of pL/c, k = p/c), in which no exponentially large
/// intermediates fight each other. Contour inversion and residue
/// quadrature evaluate the image this way; equality with [`eval_phi`]
/// is part of the test suite.
pub fn eval_phi_stable(sc: &Scenario, x: f64, p: Complex64) -> Result<Complex64> {
    check_position(x, sc.rod.length_l)?;
    let row = StablePhiRow::new(sc, p)?;
    Ok(row.at(x))
}

/// Shared per-frequency pieces of the stable form, so a whole row of
/// positions costs one boundary solve.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StablePhiRow {
    pa_over_det: Complex64,
    mp2: Complex64,
    ark: Complex64,
    p_over_c: Complex64,
    length: f64,
}

impl StablePhiRow {
    pub(crate) fn new(sc: &Scenario, p: Complex64) -> Result<Self> {
        let c = sc.wave_speed();
        let m = sc.rod.end_mass_m;
        let l = sc.rod.length_l;
        let (al, ar) = (sc.boundary.a_left, sc.boundary.a_right);
        let pa = sc.injected_momentum();

        if p.norm() == 0.0 {
            return Err(Error::PoleProximity {
                p: (0.0, 0.0),
                denom_magnitude: 0.0,
                scale: 1.0,
            });
        }
        let k = p / c;
        let mp2 = m * p * p;
        let s = (p * l / c).sinh();
        let co = (p * l / c).cosh();
        let det = mp2 * (mp2 * s - ar * k * co) + al * k * (mp2 * co - ar * k * s);
        let hyp_scale = (p.re * l / c).abs().cosh();
        let row = mp2.norm() + al.abs().max(ar.abs()) * k.norm();
        guard_denominator(p, det, row * row * hyp_scale)?;
        Ok(Self {
            pa_over_det: pa / det,
            mp2,
            ark: ar * k,
            p_over_c: p / c,
            length: l,
        })
    }

    pub(crate) fn at(&self, x: f64) -> Complex64 {
        let y = self.p_over_c * (self.length - x);
        self.pa_over_det * (self.mp2 * y.sinh() - self.ark * y.cosh())
    }
}

/// The same image written out as one expanded expression (published
/// convention only). The expansion's one ambiguous coefficient is read as
/// P/α, the only value consistent with the boundary solve; kept as a
/// separate code path so the assembled and expanded forms can be checked
/// against each other.
pub fn eval_phi_expanded(sc: &Scenario, x: f64, p: Complex64) -> Result<Complex64> {
    if sc.boundary.kind != BoundaryKind::Paper {
        return Err(Error::UnsupportedBoundaryMode {
            operation: "eval_phi_expanded",
        });
    }
    check_position(x, sc.rod.length_l)?;
    let c = sc.wave_speed();
    let m = sc.rod.end_mass_m;
    let l = sc.rod.length_l;
    let a = sc.boundary.a_left;
    let pa = sc.injected_momentum();

    if p.norm() == 0.0 {
        return Err(Error::PoleProximity {
            p: (0.0, 0.0),
            denom_magnitude: 0.0,
            scale: 1.0,
        });
    }
    let s = (p * l / c).sinh();
    let co = (p * l / c).cosh();
    let q = a * a - m * m * p * p * c * c;
    let hyp_scale = (p.re * l / c).abs().cosh();
    let q_scale = a * a + (m * p.norm() * c).powi(2);
    guard_denominator(p, p * s * q, p.norm() * hyp_scale * q_scale)?;

    Ok(
        1.0 / p * (a * c * pa * co - pa * m * p * c * c * s) / (s * q) * (p * x / c).cosh()
            + (-pa * c / (a * p)
                + (a * pa * m * c * c * co - pa * p * m * m * c * c * c * s) / (a * s * q))
                * (p * x / c).sinh(),
    )
}

/// Independent oracle: solves the transformed boundary value problem as a
/// 2x2 linear system in the basis e^{-px/c}, e^{-p(L-x)/c} anchored at
/// the two ends. Shares no algebra with [`eval_coefficients`].
pub fn solve_phi_bvp_oracle(sc: &Scenario, x: f64, p: Complex64) -> Result<Complex64> {
    check_position(x, sc.rod.length_l)?;
    let c = sc.wave_speed();
    let m = sc.rod.end_mass_m;
    let l = sc.rod.length_l;
    let (al, ar) = (sc.boundary.a_left, sc.boundary.a_right);
    let pa = sc.injected_momentum();

    let e = (-p * l / c).exp();
    let mp2 = m * p * p;
    let k = p / c;

    let a11 = mp2 + al * k;
    let a12 = e * (mp2 - al * k);
    let a21 = e * (mp2 + ar * k);
    let a22 = mp2 - ar * k;
    let det = a11 * a22 - a12 * a21;

    let row = mp2.norm() + al.abs().max(ar.abs()) * k.norm();
    guard_denominator(p, det, row * row * (1.0 + e.norm() * e.norm()))?;

    let d1 = pa * a22 / det;
    let d2 = -pa * a21 / det;
    Ok(d1 * (-p * x / c).exp() + d2 * (-p * (l - x) / c).exp())
}

/// The pole catalog of the published-convention image: origin (order 2),
/// the real pair ±E·S/(m·c), and modal pairs ±iπnc/L for n = 1..max.
///
/// A coincidence of the real-pair magnitude with a modal magnitude is
/// rejected: the term-by-term closed forms assume simple, non-coincident
/// pole families.
pub fn enumerate_poles(sc: &Scenario, max_modal_n: u32) -> Result<Vec<Pole>> {
    let c = sc.wave_speed();
    let l = sc.rod.length_l;
    let r = sc.rod.modulus_e * sc.rod.cross_section_s / (sc.rod.end_mass_m * c);
    let modal_step = std::f64::consts::PI * c / l;

    let n_star = (r / modal_step).round();
    if n_star >= 1.0 && n_star <= max_modal_n as f64 {
        let coincident = (r - n_star * modal_step).abs() <= 1e-9 * r.max(modal_step);
        if coincident {
            return Err(Error::DegeneratePoles {
                modal_index: n_star as u32,
                location: r,
            });
        }
    }

    let mut poles = Vec::with_capacity(3 + 2 * max_modal_n as usize);
    poles.push(Pole {
        location: Complex64::new(0.0, 0.0),
        order: 2,
        family: PoleFamily::Origin,
    });
    poles.push(Pole {
        location: Complex64::new(r, 0.0),
        order: 1,
        family: PoleFamily::RealPair,
    });
    poles.push(Pole {
        location: Complex64::new(-r, 0.0),
        order: 1,
        family: PoleFamily::RealPair,
    });
    for n in 1..=max_modal_n {
        let w = n as f64 * modal_step;
        poles.push(Pole {
            location: Complex64::new(0.0, w),
            order: 1,
            family: PoleFamily::ModalPair(n),
        });
        poles.push(Pole {
            location: Complex64::new(0.0, -w),
            order: 1,
            family: PoleFamily::ModalPair(n),
        });
    }
    Ok(poles)
}

/// Distance from a pole to its nearest neighbor in the catalog.
pub fn nearest_other_pole_distance(sc: &Scenario, pole: &Pole) -> f64 {
    let c = sc.wave_speed();
    let l = sc.rod.length_l;
    let r = sc.rod.modulus_e * sc.rod.cross_section_s / (sc.rod.end_mass_m * c);
    let modal_step = std::f64::consts::PI * c / l;
    match pole.family {
        PoleFamily::Origin => modal_step.min(r),
        PoleFamily::RealPair => modal_step.hypot(r).min(r),
        PoleFamily::ModalPair(n) => {
            let w = n as f64 * modal_step;
            let to_real = r.hypot(w);
            modal_step.min(to_real)
        }
    }
}

/// Safe default: a quarter of the distance to the nearest other pole.
pub fn default_contour_radius(sc: &Scenario, pole: &Pole) -> f64 {
    0.25 * nearest_other_pole_distance(sc, pole)
}

/// Residue of an arbitrary function by quadrature of (1/2πi) ∮ f dp on a
/// circle, with node doubling until the relative change drops below
/// `tol`. The circle must enclose exactly one singularity of `f`.
///
/// A zero (or tiny) residue of a well-scaled integrand counts as
/// converged once the node-doubling changes stall at the rounding floor
/// of the quadrature sum.
pub fn contour_residue(
    f: &dyn Fn(Complex64) -> Result<Complex64>,
    center: Complex64,
    radius: f64,
    tol: f64,
) -> Result<Complex64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid("radius", format!("must be > 0, got {radius}")));
    }

    let eval_n = |n: usize| -> Result<(Complex64, f64)> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut f_scale: f64 = 0.0;
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let dir = Complex64::new(theta.cos(), theta.sin());
            let val = f(center + radius * dir)?;
            f_scale = f_scale.max(val.norm());
            acc += val * dir;
        }
        Ok((acc * radius / n as f64, f_scale))
    };

    let mut n = 16;
    let (mut prev, mut scale) = eval_n(n)?;
    let mut before = f64::INFINITY;
    for _ in 0..12 {
        n *= 2;
        let (cur, s) = eval_n(n)?;
        scale = scale.max(s);
        let delta = (cur - prev).norm();
        let floor = 64.0 * f64::EPSILON * scale * radius;
        if delta <= tol * cur.norm() || delta <= floor {
            return Ok(cur);
        }
        before = prev.norm();
        prev = cur;
    }
    Err(Error::NonConvergence {
        what: "contour residue quadrature",
        last: prev.norm(),
        previous: before,
    })
}

/// Residue of e^{pt} φ(x, p) at a cataloged pole, from the contour
/// definition. The radius is checked against the pole spacing so the
/// circle cannot enclose a second pole.
pub fn numeric_residue(
    sc: &Scenario,
    x: f64,
    t: f64,
    pole: &Pole,
    radius: f64,
) -> Result<Complex64> {
    let max_radius = 0.999 * nearest_other_pole_distance(sc, pole);
    if !(radius > 0.0 && radius < max_radius) {
        return Err(Error::ContourGeometry {
            requested_radius: radius,
            max_radius,
        });
    }
    let f = |p: Complex64| -> Result<Complex64> { Ok((p * t).exp() * eval_phi_stable(sc, x, p)?) };
    contour_residue(&f, pole.location, radius, RESIDUE_TOL)
}

/// Convenience wrapper pairing a pole with its residue at default radius.
pub fn residue_term(sc: &Scenario, x: f64, t: f64, pole: &Pole) -> Result<ResidueTermValue> {
    let radius = default_contour_radius(sc, pole);
    Ok(ResidueTermValue {
        pole: *pole,
        residue_of_exp_pt_phi: numeric_residue(sc, x, t, pole, radius)?,
    })
}
