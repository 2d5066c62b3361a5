//! Binary transmission masks and transverse source profiles.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::grid::{Field1D, Grid1D};

/// Samples a hard-edged feature must span.
pub const MIN_FEATURE_SAMPLES: usize = 4;
/// Samples a source profile must span.
pub const MIN_SOURCE_SAMPLES: usize = 8;

/// Fraction of a pitch by which hard edges are widened, so that edges
/// landing exactly on a sample include it regardless of rounding.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mask {
    None,
    /// Two slits of width `width` centred at `+-separation/2`.
    DoubleSlit { width: f64, separation: f64 },
    RectAperture { center: f64, width: f64 },
}

impl Mask {
    pub fn double_slit(width: f64, separation: f64) -> Result<Self> {
        let width = require_positive("slit width", width)?;
        let separation = require_positive("slit separation", separation)?;
        if separation <= width {
            return Err(Error::InvalidParameter {
                name: "slit separation",
                value: separation,
                reason: "must exceed the slit width so the slits are disjoint",
            });
        }
        Ok(Mask::DoubleSlit { width, separation })
    }

    pub fn rect_aperture(center: f64, width: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "aperture center",
                value: center,
                reason: "must be finite",
            });
        }
        let width = require_positive("aperture width", width)?;
        Ok(Mask::RectAperture { center, width })
    }

    /// The two slits of a double slit as separate apertures (slit 1 at
    /// `+d/2`, slit 2 at `-d/2`). `None` for other kinds.
    pub fn single_slits(&self) -> Option<(Mask, Mask)> {
        match *self {
            Mask::DoubleSlit { width, separation } => Some((
                Mask::RectAperture {
                    center: 0.5 * separation,
                    width,
                },
                Mask::RectAperture {
                    center: -0.5 * separation,
                    width,
                },
            )),
            _ => None,
        }
    }

    fn transmits(&self, x: f64, slack: f64) -> bool {
        match *self {
            Mask::None => true,
            // |x| first, so the sampled slits are exactly even on a
            // symmetric grid.
            Mask::DoubleSlit { width, separation } => {
                libm::fabs(libm::fabs(x) - 0.5 * separation) <= 0.5 * width + slack
            }
            Mask::RectAperture { center, width } => libm::fabs(x - center) <= 0.5 * width + slack,
        }
    }

    fn feature_width(&self) -> Option<(&'static str, f64)> {
        match *self {
            Mask::None => None,
            Mask::DoubleSlit { width, .. } => Some(("slit width", width)),
            Mask::RectAperture { width, .. } => Some(("aperture width", width)),
        }
    }
}

/// Transmission `t_k in {0, 1}` of `mask` on `grid`.
pub fn sample_mask(mask: &Mask, grid: &Grid1D) -> Result<Vec<f64>> {
    if let Some((feature, width)) = mask.feature_width() {
        let samples = width / grid.dx();
        if samples < MIN_FEATURE_SAMPLES as f64 * (1.0 - EDGE_SLACK) {
            return Err(Error::UnderResolved {
                feature,
                samples,
                required: MIN_FEATURE_SAMPLES,
            });
        }
    }
    let slack = EDGE_SLACK * grid.dx();
    Ok(grid
        .coords()
        .map(|x| if mask.transmits(x, slack) { 1.0 } else { 0.0 })
        .collect())
}

pub fn apply_mask(field: &Field1D, mask: &Mask) -> Result<Field1D> {
    let t = sample_mask(mask, field.grid())?;
    let amp = field.amp().iter().zip(&t).map(|(a, t)| a * *t).collect();
    Ok(Field1D::from_parts(*field.grid(), amp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceShape {
    /// Gaussian amplitude `exp(-x^2 / (4 sigma^2))`, i.e. intensity standard
    /// deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Uniform amplitude on `|x| <= width/2`.
    TopHat { width: f64 },
}

impl SourceShape {
    /// Unnormalized pump amplitude at `x`.
    pub fn amplitude(&self, x: f64) -> f64 {
        match *self {
            SourceShape::Gaussian { sigma } => libm::exp(-x * x / (4.0 * sigma * sigma)),
            SourceShape::TopHat { width } => {
                if libm::fabs(x) <= 0.5 * width * (1.0 + EDGE_SLACK) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Width used for the resolution test: full width for the top hat,
    /// `4 sigma` (the 1/e^2 intensity diameter) for the Gaussian.
    fn resolved_width(&self) -> f64 {
        match *self {
            SourceShape::Gaussian { sigma } => 4.0 * sigma,
            SourceShape::TopHat { width } => width,
        }
    }

    /// Extent that must fit in half the window (`+-4 sigma` for Gaussians).
    fn extent(&self) -> f64 {
        match *self {
            SourceShape::Gaussian { sigma } => 8.0 * sigma,
            SourceShape::TopHat { width } => width,
        }
    }

    pub(crate) fn check_on(&self, grid: &Grid1D) -> Result<()> {
        let samples = self.resolved_width() / grid.dx();
        if samples < MIN_SOURCE_SAMPLES as f64 * (1.0 - EDGE_SLACK) {
            return Err(Error::UnderResolved {
                feature: "source profile",
                samples,
                required: MIN_SOURCE_SAMPLES,
            });
        }
        let half_window = 0.5 * grid.width();
        if self.extent() > half_window {
            return Err(Error::Clipped {
                feature: "source profile",
                extent: self.extent(),
                half_window,
            });
        }
        Ok(())
    }
}

/// Down-conversion source: pump transverse profile, signal-idler position
/// correlation width and the two wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub shape: SourceShape,
    pub correlation_width: f64,
    pub lambda_s: f64,
    pub lambda_i: f64,
}

impl SourceSpec {
    pub fn new(
        shape: SourceShape,
        correlation_width: f64,
        lambda_s: f64,
        lambda_i: f64,
    ) -> Result<Self> {
        match shape {
            SourceShape::Gaussian { sigma } => require_positive("source sigma", sigma)?,
            SourceShape::TopHat { width } => require_positive("source width", width)?,
        };
        Ok(SourceSpec {
            shape,
            correlation_width: require_positive("correlation width", correlation_width)?,
            lambda_s: require_positive("signal wavelength", lambda_s)?,
            lambda_i: require_positive("idler wavelength", lambda_i)?,
        })
    }
}

/// Normalized pump amplitude sampled on `grid`.
pub fn source_profile(source: &SourceSpec, grid: &Grid1D) -> Result<Field1D> {
    source.shape.check_on(grid)?;
    let field = Field1D::from_fn(*grid, |x| Complex64::new(source.shape.amplitude(x), 0.0))?;
    field.normalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dx: f64) -> Grid1D {
        Grid1D::new(n, n as f64 * dx).unwrap()
    }

    fn at(t: &[f64], g: &Grid1D, x: f64) -> f64 {
        t[g.nearest_index(x).unwrap()]
    }

    #[test]
    fn double_slit_geometry() {
        let g = grid(1024, 10e-6);
        let m = Mask::double_slit(0.1e-3, 0.5e-3).unwrap();
        let t = sample_mask(&m, &g).unwrap();
        assert_eq!(at(&t, &g, 0.0), 0.0);
        assert_eq!(at(&t, &g, 0.25e-3), 1.0);
        assert_eq!(at(&t, &g, -0.25e-3), 1.0);
        assert_eq!(at(&t, &g, 0.35e-3), 0.0);
        assert!(t.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn rect_aperture_geometry() {
        let g = grid(1024, 10e-6);
        let m = Mask::rect_aperture(0.0, 0.2e-3).unwrap();
        let t = sample_mask(&m, &g).unwrap();
        for x in [0.09e-3, -0.09e-3] {
            assert_eq!(at(&t, &g, x), 1.0);
        }
        for x in [0.11e-3, -0.11e-3] {
            assert_eq!(at(&t, &g, x), 0.0);
        }
    }

    #[test]
    fn under_resolved_slit_is_rejected() {
        let g = grid(256, 50e-6);
        let m = Mask::double_slit(0.1e-3, 0.5e-3).unwrap();
        assert!(matches!(
            sample_mask(&m, &g),
            Err(Error::UnderResolved { required: 4, .. })
        ));
    }

    #[test]
    fn mask_constructor_guards() {
        assert!(Mask::double_slit(0.2e-3, 0.1e-3).is_err());
        assert!(Mask::double_slit(0.0, 0.1e-3).is_err());
        assert!(Mask::rect_aperture(0.0, -1.0).is_err());
        assert!(Mask::rect_aperture(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn double_slit_is_even() {
        let g = grid(1024, 20e-6);
        let t = sample_mask(&Mask::double_slit(0.1e-3, 0.5e-3).unwrap(), &g).unwrap();
        for k in 1..g.n() {
            assert_eq!(t[k], t[g.n() - k]);
        }
    }

    #[test]
    fn none_mask_is_identity() {
        let g = grid(64, 1e-5);
        let f = Field1D::from_fn(g, |x| Complex64::new(x, 1.0)).unwrap();
        assert_eq!(apply_mask(&f, &Mask::None).unwrap(), f);
    }

    #[test]
    fn uniform_field_open_fraction() {
        // Edges at +-8.75 and +-13.75 samples: five samples per slit.
        let g = grid(512, 20e-6);
        let w = 0.1e-3;
        let m = Mask::double_slit(w, 0.45e-3).unwrap();
        let f = Field1D::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap().normalize().unwrap();
        let out = apply_mask(&f, &m).unwrap();
        let ratio = out.norm2() / f.norm2();
        assert!((ratio - 2.0 * w / g.width()).abs() < 1e-12);
    }

    #[test]
    fn field_between_slits_is_blocked() {
        let g = grid(512, 10e-6);
        let m = Mask::double_slit(0.1e-3, 0.5e-3).unwrap();
        let f = Field1D::from_fn(g, |x| {
            Complex64::new(if x.abs() < 0.15e-3 { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        assert_eq!(apply_mask(&f, &m).unwrap().norm2(), 0.0);
    }

    fn spec(shape: SourceShape) -> SourceSpec {
        SourceSpec::new(shape, 20e-6, 702e-9, 702e-9).unwrap()
    }

    #[test]
    fn tophat_profile_width() {
        let g = grid(1024, 10e-6);
        let s = 0.5e-3;
        let f = source_profile(&spec(SourceShape::TopHat { width: s }), &g).unwrap();
        assert!((f.norm2() - 1.0).abs() < 1e-12);
        let lit: Vec<f64> = g
            .coords()
            .zip(f.intensity())
            .filter(|(_, i)| *i > 0.0)
            .map(|(x, _)| x)
            .collect();
        let full = lit.last().unwrap() - lit.first().unwrap() + g.dx();
        assert!((full - s).abs() <= g.dx() * (1.0 + 1e-9));
    }

    #[test]
    fn gaussian_profile_second_moment() {
        // Moment oracle: plain Riemann quadrature of x^2 |a|^2 dx.
        let g = grid(1024, 10e-6);
        let sigma = 0.3e-3;
        let f = source_profile(&spec(SourceShape::Gaussian { sigma }), &g).unwrap();
        assert!((f.norm2() - 1.0).abs() < 1e-12);
        let m2: f64 = g
            .coords()
            .zip(f.intensity())
            .map(|(x, i)| x * x * i * g.dx())
            .sum();
        assert!((m2 / (sigma * sigma) - 1.0).abs() < 0.01);
    }

    #[test]
    fn source_guards() {
        let g = grid(1024, 10e-6);
        let narrow = spec(SourceShape::TopHat { width: 50e-6 });
        assert!(matches!(
            source_profile(&narrow, &g),
            Err(Error::UnderResolved { .. })
        ));
        let wide = spec(SourceShape::TopHat { width: 6e-3 });
        assert!(matches!(source_profile(&wide, &g), Err(Error::Clipped { .. })));
        assert!(SourceSpec::new(SourceShape::Gaussian { sigma: 0.0 }, 1e-5, 1e-6, 1e-6).is_err());
        assert!(SourceSpec::new(SourceShape::TopHat { width: 1e-3 }, 0.0, 1e-6, 1e-6).is_err());
    }
}
