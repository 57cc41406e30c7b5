//! Sampled space-time fields, the common output of all solution routes.

use crate::error::{Error, Result};
use crate::model::RodParams;

/// u(x, t) (or tension) sampled on a rectangular grid, stored t-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    /// Spatial sample positions, ascending, m.
    pub xs: Vec<f64>,
    /// Time sample instants, ascending, s.
    pub ts: Vec<f64>,
    /// Samples, row-major in time: `samples[j * xs.len() + i]`.
    pub samples: Vec<f64>,
    /// Which route produced the field ("fdtd", "inversion", "series", "tension").
    pub method: String,
    /// Scenario echo.
    pub label: String,
    /// Per-sample degradation flags (near a wavefront, or the numerical
    /// route did not reach its target tolerance there). Aligned with
    /// `samples` when present.
    pub degraded: Option<Vec<bool>>,
}

impl DisplacementField {
    pub fn new(
        xs: Vec<f64>,
        ts: Vec<f64>,
        samples: Vec<f64>,
        method: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if samples.len() != xs.len() * ts.len() {
            return Err(Error::invalid(
                "samples",
                format!(
                    "length {} does not match grid {} x {}",
                    samples.len(),
                    xs.len(),
                    ts.len()
                ),
            ));
        }
        Ok(Self {
            xs,
            ts,
            samples,
            method: method.into(),
            label: label.into(),
            degraded: None,
        })
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn at(&self, ix: usize, it: usize) -> f64 {
        self.samples[it * self.xs.len() + ix]
    }

    /// Time series at a fixed spatial index.
    pub fn time_series(&self, ix: usize) -> Vec<(f64, f64)> {
        self.ts
            .iter()
            .enumerate()
            .map(|(it, &t)| (t, self.at(ix, it)))
            .collect()
    }
}

/// True when (x, t) lies within `half_width` of a characteristic of the
/// impulse front: t = (x + 2kL)/c or t = (2(k+1)L - x)/c, k = 0, 1, ...
///
/// Truncated eigenfunction series cannot match the solution pointwise on
/// these lines, and contour inversion degrades there, so comparisons may
/// exclude a band around them.
pub fn near_wavefront(x: f64, t: f64, rod: &RodParams, half_width: f64) -> bool {
    let c = rod.wave_speed();
    let l = rod.length_l;
    let mut k = 0u32;
    loop {
        let go = (x + 2.0 * k as f64 * l) / c;
        let back = (2.0 * (k as f64 + 1.0) * l - x) / c;
        if (t - go).abs() <= half_width || (t - back).abs() <= half_width {
            return true;
        }
        if go > t + half_width && back > t + half_width {
            return false;
        }
        k += 1;
        if k > 10_000 {
            return false;
        }
    }
}

/// Characteristic crossing times at position x up to `t_max`, with the
/// half-width used for exclusion bands.
pub fn wavefront_bands(x: f64, t_max: f64, rod: &RodParams, half_width: f64) -> Vec<(f64, f64)> {
    let c = rod.wave_speed();
    let l = rod.length_l;
    let mut bands = Vec::new();
    let mut k = 0u32;
    loop {
        let go = (x + 2.0 * k as f64 * l) / c;
        let back = (2.0 * (k as f64 + 1.0) * l - x) / c;
        let mut done = true;
        if go <= t_max + half_width {
            bands.push((go, half_width));
            done = false;
        }
        if back <= t_max + half_width {
            bands.push((back, half_width));
            done = false;
        }
        if done {
            break;
        }
        k += 1;
        if k > 10_000 {
            break;
        }
    }
    bands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    bands
}
