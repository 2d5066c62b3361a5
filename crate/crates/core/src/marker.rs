//! Which-path marking and erasure with a two-level polarization marker.
//!
//! The photon lives in `span{path 1, path 2} (x) span{L, R}` with ordered
//! basis `(1L, 1R, 2L, 2R)`. A linear polarizer at angle `theta` projects
//! the marker onto `(|L> + exp(2 i theta) |R>) / sqrt(2)`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_complex::Complex64;

use crate::biphoton::FringeProfile;
use crate::error::{require_positive, Error, Result};
use crate::grid::Grid1D;

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerState {
    c: [Complex64; 4],
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl MarkerState {
    pub fn new(c: [Complex64; 4]) -> Result<Self> {
        let n: f64 = c.iter().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter {
                name: "marker state norm",
                value: n,
                reason: "coefficients must be normalized",
            });
        }
        Ok(MarkerState { c })
    }

    /// `(|1> + |2>)/sqrt(2)` with a common polarization (equal L and R
    /// weights on both paths).
    pub fn plain() -> Self {
        MarkerState {
            c: [re(0.5); 4],
        }
    }

    /// `(|1>|L> + |2>|R>)/sqrt(2)`.
    pub fn marked() -> Self {
        MarkerState {
            c: [re(FRAC_1_SQRT_2), re(0.0), re(0.0), re(FRAC_1_SQRT_2)],
        }
    }

    pub fn coefficients(&self) -> &[Complex64; 4] {
        &self.c
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.c.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Reduced path density matrix (polarization traced out), row-major
    /// `[rho_11, rho_12, rho_21, rho_22]`.
    pub fn path_density(&self) -> [Complex64; 4] {
        let [a1l, a1r, a2l, a2r] = self.c;
        let rho12 = a1l * a2l.conj() + a1r * a2r.conj();
        [
            re(a1l.norm_sqr() + a1r.norm_sqr()),
            rho12,
            rho12.conj(),
            re(a2l.norm_sqr() + a2r.norm_sqr()),
        ]
    }

    /// Fringe visibility seen by a polarization-blind detector:
    /// `2 |rho_12| / (rho_11 + rho_22)`.
    pub fn blind_visibility(&self) -> f64 {
        let rho = self.path_density();
        2.0 * rho[1].norm() / (rho[0].re + rho[3].re)
    }

    /// Path amplitudes carried by one marker component.
    pub fn component(&self, pol: Polarization) -> [Complex64; 2] {
        match pol {
            Polarization::L => [self.c[0], self.c[2]],
            Polarization::R => [self.c[1], self.c[3]],
        }
    }

    pub fn project(&self, angle: PolarizerAngle) -> Projection {
        let phase = Complex64::from_polar(1.0, -2.0 * angle.theta());
        let a1 = (self.c[0] + phase * self.c[1]) * FRAC_1_SQRT_2;
        let a2 = (self.c[2] + phase * self.c[3]) * FRAC_1_SQRT_2;
        Projection {
            amplitudes: [a1, a2],
            pass_probability: a1.norm_sqr() + a2.norm_sqr(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    L,
    R,
}

/// Linear polarizer axis in `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizerAngle(f64);

impl PolarizerAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && (0.0..PI).contains(&theta) {
            Ok(PolarizerAngle(theta))
        } else {
            Err(Error::InvalidParameter {
                name: "polarizer angle",
                value: theta,
                reason: "must lie in [0, pi)",
            })
        }
    }

    pub fn theta(&self) -> f64 {
        self.0
    }

    /// The crossed polarizer, `theta + pi/2` folded back into `[0, pi)`.
    pub fn orthogonal(&self) -> PolarizerAngle {
        let t = self.0 + 0.5 * PI;
        PolarizerAngle(if t >= PI { t - PI } else { t })
    }
}

/// Outcome of a polarizer: unnormalized path amplitudes and the
/// probability that the photon passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub amplitudes: [Complex64; 2],
    pub pass_probability: f64,
}

impl Projection {
    /// Visibility of the two-path pattern, `2|a1||a2| / (|a1|^2 + |a2|^2)`.
    pub fn visibility(&self) -> f64 {
        let [a1, a2] = self.amplitudes;
        2.0 * a1.norm() * a2.norm() / (a1.norm_sqr() + a2.norm_sqr())
    }

    /// Fringe phase `arg(a1 conj(a2))` in the convention
    /// `I ~ 1 + V cos(2 pi x / period + phase)`.
    pub fn phase(&self) -> f64 {
        let [a1, a2] = self.amplitudes;
        (a1 * a2.conj()).arg()
    }
}

/// Two-point-source pattern
/// `I(x) = |a1 exp(i pi d x/(lambda z)) + a2 exp(-i pi d x/(lambda z))|^2`
/// with period `lambda z / d`. No single-slit envelope.
pub fn fringe_pattern(
    amplitudes: [Complex64; 2],
    separation: f64,
    wavelength: f64,
    distance: f64,
    grid: &Grid1D,
) -> Result<FringeProfile> {
    let d = require_positive("slit separation", separation)?;
    let lambda = require_positive("wavelength", wavelength)?;
    let z = require_positive("distance", distance)?;
    let k = PI * d / (lambda * z);
    let [a1, a2] = amplitudes;
    let values = grid
        .coords()
        .map(|x| {
            let e = Complex64::from_polar(1.0, k * x);
            (a1 * e + a2 * e.conj()).norm_sqr()
        })
        .collect();
    FringeProfile::new(*grid, values)
}

/// Pattern recorded without a polarizer: the incoherent sum of the patterns
/// of the L and R components.
pub fn blind_pattern(
    state: &MarkerState,
    separation: f64,
    wavelength: f64,
    distance: f64,
    grid: &Grid1D,
) -> Result<FringeProfile> {
    let l = fringe_pattern(state.component(Polarization::L), separation, wavelength, distance, grid)?;
    let r = fringe_pattern(state.component(Polarization::R), separation, wavelength, distance, grid)?;
    let values = l.values().iter().zip(r.values()).map(|(a, b)| a + b).collect();
    FringeProfile::new(*grid, values)
}
