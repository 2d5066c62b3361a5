//! Which-path distinguishability at the source and parameter sweeps.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fringes::FringeStats;
use crate::grid::{Field1D, Grid1D};
use crate::optics::{sample_mask, Mask};
use crate::propagation::propagate_back;
use crate::scenario::{run_scenario, ScenarioConfig};

/// Overlap of the two slit modes traced back to the source plane.
///
/// Each single-slit aperture is propagated back over `distance`; the two
/// back-projections are weighted by the source intensity and their
/// normalized inner product magnitude is returned. 1 means the slits see
/// the same source points with a fixed relative phase (paths
/// indistinguishable); 0 means disjoint source regions feed the two slits.
pub fn source_overlap(
    grid: &Grid1D,
    slits: &Mask,
    distance: f64,
    wavelength: f64,
    source_intensity: &[f64],
) -> Result<f64> {
    if source_intensity.len() != grid.n() {
        return Err(Error::ShapeMismatch {
            expected: grid.n(),
            got: source_intensity.len(),
        });
    }
    let (one, two) = slits.single_slits().ok_or(Error::InvalidParameter {
        name: "slit mask",
        value: f64::NAN,
        reason: "source overlap needs a double slit",
    })?;
    let back = |m: &Mask| -> Result<Field1D> {
        let t = sample_mask(m, grid)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        propagate_back(&Field1D::new(*grid, t)?, distance, wavelength)
    };
    let b1 = back(&one)?;
    let b2 = back(&two)?;
    let mut inner = Complex64::new(0.0, 0.0);
    let (mut n1, mut n2) = (0.0, 0.0);
    for ((a, b), &w) in b1.amp().iter().zip(b2.amp()).zip(source_intensity) {
        inner += a.conj() * b * w;
        n1 += a.norm_sqr() * w;
        n2 += b.norm_sqr() * w;
    }
    if !(n1 > 0.0 && n2 > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((inner.norm() / libm::sqrt(n1 * n2)).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub stats: FringeStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub param: String,
    pub profile: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn visibilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.stats.visibility).collect()
    }
}

fn monotonic(values: &[f64]) -> bool {
    let up = values.windows(2).all(|w| w[1] >= w[0]);
    let down = values.windows(2).all(|w| w[1] <= w[0]);
    values.iter().all(|v| v.is_finite()) && (up || down)
}

/// Runs `base` once per value of `param` and collects the fringe
/// statistics of one output profile. When `profile` is `None` the
/// scenario's designated profile for that parameter is used.
///
/// Values must be monotonic; repeats are allowed and reproduce identical
/// rows.
pub fn sweep(
    base: &ScenarioConfig,
    param: &str,
    values: &[f64],
    profile: Option<&str>,
) -> Result<SweepTable> {
    if values.len() < 2 || !monotonic(values) {
        return Err(Error::SweepValues);
    }
    let profile = profile
        .map(|p| p.to_string())
        .unwrap_or_else(|| base.scenario.sweep_profile(param).to_string());
    let mut probe = base.clone();
    probe.set_number(param, values[0])?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let at = |e: Error| Error::SweepPoint {
            param: param.to_string(),
            value,
            source: Box::new(e),
        };
        let mut cfg = base.clone();
        cfg.set_number(param, value).map_err(at)?;
        let report = run_scenario(&cfg).map_err(at)?;
        let named = report
            .profile(&profile)
            .ok_or_else(|| Error::UnknownProfile(profile.clone()))?;
        let stats = named.stats.ok_or(Error::ZeroProfile).map_err(at)?;
        rows.push(SweepRow { value, stats });
    }
    Ok(SweepTable {
        param: param.to_string(),
        profile,
        rows,
    })
}
