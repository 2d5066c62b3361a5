//! Down-conversion two-photon state, idler detection and signal-side
//! observables.
//!
//! The source is modelled as the pure state
//! `psi(x_s, x_i) = N E_p((x_s + x_i)/2) g(x_s - x_i)`: a pump envelope times
//! a narrow Gaussian position correlation. Tracing out the idler leaves a
//! signal state that is diagonal in position on the scale of the correlation
//! width, so the crystal radiates like an incoherent source; conditioning on
//! an idler detection selects one coherent member of that ensemble.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{BiphotonField, Field1D, Grid1D};
use crate::optics::SourceSpec;

/// How the idler photon is detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionSpec {
    /// Point detector (pinhole) at `x0`, nearest grid sample.
    Point { x0: f64 },
    /// Bucket detector integrating over `|x - center| <= width/2`.
    Bucket { center: f64, width: f64 },
    /// Projection onto the transverse plane wave `exp(i q0 x)`.
    Fourier { q0: f64 },
}

/// Non-negative rate profile along the signal detector axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeProfile {
    grid: Grid1D,
    values: Vec<f64>,
}

impl FringeProfile {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::ShapeMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::BadProfile(k));
        }
        Ok(FringeProfile { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum_k value_k dx`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn scaled(&self, factor: f64) -> FringeProfile {
        FringeProfile {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub(crate) fn from_parts(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        FringeProfile { grid, values }
    }
}

/// Builds the normalized two-photon amplitude at the crystal.
pub fn make_spdc_state(source: &SourceSpec, grid_s: &Grid1D, grid_i: &Grid1D) -> Result<BiphotonField> {
    source.shape.check_on(grid_s)?;
    source.shape.check_on(grid_i)?;
    let pitch = grid_s.dx().max(grid_i.dx());
    if source.correlation_width < pitch {
        return Err(Error::InvalidParameter {
            name: "correlation width",
            value: source.correlation_width,
            reason: "must be at least the coarser grid pitch",
        });
    }
    let inv4c2 = 1.0 / (4.0 * source.correlation_width * source.correlation_width);
    let shape = source.shape;
    let state = BiphotonField::from_fn(*grid_s, *grid_i, |xs, xi| {
        let d = xs - xi;
        let pump = shape.amplitude(0.5 * (xs + xi));
        Complex64::new(pump * libm::exp(-d * d * inv4c2), 0.0)
    })?;
    state.normalize()
}

/// Signal intensity with the idler traced out:
/// `R(x_s) = sum_i |psi(x_s, x_i)|^2 dx_i`.
pub fn signal_singles(state: &BiphotonField) -> FringeProfile {
    let dxi = state.grid_i().dx();
    let values = (0..state.grid_s().n())
        .map(|s| state.row(s).iter().map(|a| a.norm_sqr()).sum::<f64>() * dxi)
        .collect();
    FringeProfile::from_parts(*state.grid_s(), values)
}

fn idler_index(state: &BiphotonField, x0: f64) -> Result<usize> {
    state
        .grid_i()
        .nearest_index(x0)
        .ok_or(Error::OutsideWindow(x0))
}

/// Unnormalized signal state `psi(., x0)` left by an idler detection at
/// `x0`. Its squared norm is the probability density of that detection.
pub fn conditional_signal(state: &BiphotonField, x0: f64) -> Result<Field1D> {
    let i = idler_index(state, x0)?;
    Ok(Field1D::from_parts(*state.grid_s(), state.column(i)))
}

/// Coincidence rate with a pinhole idler detector at `x0`:
/// `|psi(x_s, x0)|^2 dx_i`.
pub fn coincidence_point(state: &BiphotonField, x0: f64) -> Result<FringeProfile> {
    let i = idler_index(state, x0)?;
    let dxi = state.grid_i().dx();
    let ni = state.grid_i().n();
    let values = state
        .amp()
        .chunks_exact(ni)
        .map(|row| row[i].norm_sqr() * dxi)
        .collect();
    Ok(FringeProfile::from_parts(*state.grid_s(), values))
}

/// Coincidence rate with a bucket idler detector: the incoherent sum of the
/// pinhole rates over every idler sample inside the aperture.
pub fn coincidence_bucket(state: &BiphotonField, center: f64, width: f64) -> Result<FringeProfile> {
    idler_index(state, center)?;
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bucket width",
            value: width,
            reason: "must be positive and finite",
        });
    }
    let gi = state.grid_i();
    let slack = 1e-9 * gi.dx();
    let inside: Vec<usize> = (0..gi.n())
        .filter(|&k| libm::fabs(gi.x(k) - center) <= 0.5 * width + slack)
        .collect();
    if inside.is_empty() {
        return Err(Error::EmptyBucket);
    }
    let dxi = gi.dx();
    let values = (0..state.grid_s().n())
        .map(|s| {
            let row = state.row(s);
            inside.iter().map(|&k| row[k].norm_sqr()).sum::<f64>() * dxi
        })
        .collect();
    Ok(FringeProfile::from_parts(*state.grid_s(), values))
}

/// Projects the idler onto the transverse plane wave of wavevector `q0`
/// (rad/m): `phi(x_s) = sum_i psi(x_s, x_i) exp(-i q0 x_i) dx_i`.
pub fn idler_fourier_project(state: &BiphotonField, q0: f64) -> Result<Field1D> {
    let gi = state.grid_i();
    let nyquist = core::f64::consts::PI / gi.dx();
    if !(q0.is_finite() && libm::fabs(q0) < nyquist) {
        return Err(Error::AboveNyquist { q: q0, nyquist });
    }
    let dxi = gi.dx();
    let phases: Vec<Complex64> = gi
        .coords()
        .map(|x| {
            let (s, c) = libm::sincos(-q0 * x);
            Complex64::new(c, s) * dxi
        })
        .collect();
    let amp = (0..state.grid_s().n())
        .map(|s| state.row(s).iter().zip(&phases).map(|(a, p)| a * p).sum())
        .collect();
    Ok(Field1D::from_parts(*state.grid_s(), amp))
}

/// Signal-side coincidence profile for any detection mode. Point and bucket
/// modes yield probability densities; the Fourier mode yields `|phi|^2`.
pub fn detect(state: &BiphotonField, detection: &DetectionSpec) -> Result<FringeProfile> {
    match *detection {
        DetectionSpec::Point { x0 } => coincidence_point(state, x0),
        DetectionSpec::Bucket { center, width } => coincidence_bucket(state, center, width),
        DetectionSpec::Fourier { q0 } => {
            let phi = idler_fourier_project(state, q0)?;
            Ok(FringeProfile::from_parts(*phi.grid(), phi.intensity()))
        }
    }
}
