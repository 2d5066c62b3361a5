//! Paraxial free-space propagation, thin lenses and per-arm application to
//! two-photon states.
//!
//! Both propagators implement the Fresnel transfer function
//! `H(f) = exp(-i pi lambda z f^2)`; the common `exp(i k z)` phase is
//! dropped. The angular-spectrum form samples `H` and is exact for
//! `z <= n dx^2 / lambda`; the direct form samples the spatial kernel
//! `exp(i pi x^2 / (lambda z)) / sqrt(i lambda z)` and is exact for
//! `z >= n dx^2 / lambda`. At the critical distance both are exact.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{require_positive, Error, Result};
use crate::fft::Fft;
use crate::grid::{BiphotonField, Field1D, Grid1D};
use crate::optics::{sample_mask, Mask};

/// Relative slack on the sampling guards so that the critical distance
/// computed from the grid passes both of them.
const GUARD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArmSelector {
    Signal,
    Idler,
}

/// One stage of an arm's optical train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    /// Angular-spectrum propagation.
    Propagate { distance: f64, wavelength: f64 },
    /// Direct Fresnel quadrature, O(n^2) per line.
    PropagateDirect { distance: f64, wavelength: f64 },
    Lens { focal: f64, wavelength: f64 },
    Mask(Mask),
}

impl Element {
    /// Free-space hop using whichever discretization is valid at this
    /// distance on `grid`: angular spectrum up to [`critical_distance`],
    /// direct quadrature beyond it.
    pub fn free_space(grid: &Grid1D, distance: f64, wavelength: f64) -> Element {
        if distance <= critical_distance(grid, wavelength) {
            Element::Propagate { distance, wavelength }
        } else {
            Element::PropagateDirect { distance, wavelength }
        }
    }
}

/// Distance at which the sampled transfer function and the sampled spatial
/// kernel both step by exactly `pi` between neighbours at the grid edge.
pub fn critical_distance(grid: &Grid1D, wavelength: f64) -> f64 {
    grid.n() as f64 * grid.dx() * grid.dx() / wavelength
}

fn expi(theta: f64) -> Complex64 {
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

fn check_wavelength(wavelength: f64) -> Result<f64> {
    require_positive("wavelength", wavelength)
}

/// A prepared line operator, reused across the rows or columns of a
/// two-photon state.
enum LineOp {
    Identity,
    Spectral { fft: Fft, transfer: Vec<Complex64> },
    Direct { kernel: Vec<Complex64>, n: usize },
    Pointwise(Vec<Complex64>),
}

impl LineOp {
    fn angular_spectrum(grid: &Grid1D, z: f64, wavelength: f64) -> Result<LineOp> {
        check_wavelength(wavelength)?;
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "propagation distance",
                value: z,
                reason: "must be finite and non-negative",
            });
        }
        if z == 0.0 {
            return Ok(LineOp::Identity);
        }
        let limit = critical_distance(grid, wavelength);
        if z > limit * (1.0 + GUARD_SLACK) {
            return Err(Error::Aliasing {
                method: "angular-spectrum",
                z,
                bound: "<=",
                limit,
            });
        }
        let transfer = (0..grid.n())
            .map(|k| {
                let f = grid.frequency(k);
                expi(-PI * wavelength * z * f * f)
            })
            .collect();
        Ok(LineOp::Spectral {
            fft: Fft::new(grid.n()),
            transfer,
        })
    }

    fn direct(grid: &Grid1D, z: f64, wavelength: f64) -> Result<LineOp> {
        check_wavelength(wavelength)?;
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidParameter {
                name: "propagation distance",
                value: z,
                reason: "direct quadrature needs a positive distance",
            });
        }
        let limit = critical_distance(grid, wavelength);
        if z < limit * (1.0 - GUARD_SLACK) {
            return Err(Error::Aliasing {
                method: "direct Fresnel",
                z,
                bound: ">=",
                limit,
            });
        }
        let n = grid.n();
        let dx = grid.dx();
        // 1/sqrt(i lambda z) = exp(-i pi/4) / sqrt(lambda z)
        let norm = expi(-0.25 * PI) * (dx / libm::sqrt(wavelength * z));
        let kernel = (0..2 * n - 1)
            .map(|idx| {
                let m = idx as f64 - (n - 1) as f64;
                norm * expi(PI * m * m * dx * dx / (wavelength * z))
            })
            .collect();
        Ok(LineOp::Direct { kernel, n })
    }

    fn lens(grid: &Grid1D, focal: f64, wavelength: f64) -> Result<LineOp> {
        check_wavelength(wavelength)?;
        if !(focal.is_finite() && focal != 0.0) {
            return Err(Error::InvalidParameter {
                name: "focal length",
                value: focal,
                reason: "must be finite and non-zero",
            });
        }
        Ok(LineOp::Pointwise(
            grid.coords()
                .map(|x| expi(-PI * x * x / (wavelength * focal)))
                .collect(),
        ))
    }

    fn mask(grid: &Grid1D, mask: &Mask) -> Result<LineOp> {
        if *mask == Mask::None {
            return Ok(LineOp::Identity);
        }
        Ok(LineOp::Pointwise(
            sample_mask(mask, grid)?
                .into_iter()
                .map(|t| Complex64::new(t, 0.0))
                .collect(),
        ))
    }

    fn for_element(grid: &Grid1D, element: &Element) -> Result<LineOp> {
        match *element {
            Element::Propagate {
                distance,
                wavelength,
            } => LineOp::angular_spectrum(grid, distance, wavelength),
            Element::PropagateDirect {
                distance,
                wavelength,
            } => LineOp::direct(grid, distance, wavelength),
            Element::Lens { focal, wavelength } => LineOp::lens(grid, focal, wavelength),
            Element::Mask(ref m) => LineOp::mask(grid, m),
        }
    }

    fn apply(&self, line: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        match self {
            LineOp::Identity => {}
            LineOp::Spectral { fft, transfer } => {
                fft.forward(line);
                for (a, h) in line.iter_mut().zip(transfer) {
                    *a *= h;
                }
                fft.inverse(line);
            }
            LineOp::Direct { kernel, n } => {
                scratch.clear();
                scratch.extend_from_slice(line);
                for (j, out) in line.iter_mut().enumerate() {
                    // kernel index of separation (j - k) is j - k + n - 1
                    let ks = &kernel[j..j + *n];
                    *out = scratch
                        .iter()
                        .zip(ks.iter().rev())
                        .map(|(a, k)| a * k)
                        .sum();
                }
            }
            LineOp::Pointwise(t) => {
                for (a, t) in line.iter_mut().zip(t) {
                    *a *= t;
                }
            }
        }
    }
}

fn apply_line(field: &Field1D, op: LineOp) -> Field1D {
    let mut amp = field.amp().to_vec();
    op.apply(&mut amp, &mut Vec::new());
    Field1D::from_parts(*field.grid(), amp)
}

/// Free-space paraxial propagation over `z` by multiplying the discrete
/// spectrum with `exp(-i pi lambda z f^2)`.
///
/// Fails when `z` exceeds `n dx^2 / lambda`, beyond which the transfer
/// function steps by more than `pi` between neighbouring frequency samples.
pub fn propagate_angular_spectrum(field: &Field1D, z: f64, wavelength: f64) -> Result<Field1D> {
    let op = LineOp::angular_spectrum(field.grid(), z, wavelength)?;
    Ok(apply_line(field, op))
}

/// Fresnel propagation by direct quadrature of the convolution integral.
///
/// The spatial chirp is sampled without aliasing across half the window
/// only for `z >= n dx^2 / lambda`; shorter distances are rejected.
pub fn propagate_fresnel_direct(field: &Field1D, z: f64, wavelength: f64) -> Result<Field1D> {
    let op = LineOp::direct(field.grid(), z, wavelength)?;
    Ok(apply_line(field, op))
}

/// Thin lens: multiply by `exp(-i pi x^2 / (lambda f))`.
pub fn apply_lens(field: &Field1D, focal: f64, wavelength: f64) -> Result<Field1D> {
    let op = LineOp::lens(field.grid(), focal, wavelength)?;
    Ok(apply_line(field, op))
}

pub fn apply_element(field: &Field1D, element: &Element) -> Result<Field1D> {
    let op = LineOp::for_element(field.grid(), element)?;
    Ok(apply_line(field, op))
}

/// Propagation by `-z`. The transfer function of `-z` is the conjugate of
/// that of `z`, so this is `conj(P_z conj(f))`.
pub(crate) fn propagate_back(field: &Field1D, z: f64, wavelength: f64) -> Result<Field1D> {
    let conj: Vec<Complex64> = field.amp().iter().map(|a| a.conj()).collect();
    let forward = apply_element(
        &Field1D::from_parts(*field.grid(), conj),
        &Element::free_space(field.grid(), z, wavelength),
    )?;
    let amp = forward.amp().iter().map(|a| a.conj()).collect();
    Ok(Field1D::from_parts(*field.grid(), amp))
}

/// Applies a 1-D element to one arm of a two-photon state: to every row
/// for the idler arm, to every column for the signal arm.
pub fn apply_arm(state: &BiphotonField, arm: ArmSelector, element: &Element) -> Result<BiphotonField> {
    let mut out = state.clone();
    apply_arm_in_place(&mut out, arm, element)?;
    Ok(out)
}

pub fn apply_train(
    state: &BiphotonField,
    arm: ArmSelector,
    train: &[Element],
) -> Result<BiphotonField> {
    let mut out = state.clone();
    for element in train {
        apply_arm_in_place(&mut out, arm, element)?;
    }
    Ok(out)
}

pub(crate) fn apply_arm_in_place(
    state: &mut BiphotonField,
    arm: ArmSelector,
    element: &Element,
) -> Result<()> {
    let grid = match arm {
        ArmSelector::Signal => *state.grid_s(),
        ArmSelector::Idler => *state.grid_i(),
    };
    let op = LineOp::for_element(&grid, element)?;
    if matches!(op, LineOp::Identity) {
        return Ok(());
    }
    let ns = state.grid_s().n();
    let ni = state.grid_i().n();
    let amp = state.amp_mut();
    let mut scratch = Vec::new();
    match arm {
        ArmSelector::Idler => {
            for row in amp.chunks_exact_mut(ni) {
                op.apply(row, &mut scratch);
            }
        }
        ArmSelector::Signal => {
            let mut line = alloc::vec![Complex64::new(0.0, 0.0); ns];
            for i in 0..ni {
                for (s, v) in line.iter_mut().enumerate() {
                    *v = amp[s * ni + i];
                }
                op.apply(&mut line, &mut scratch);
                for (s, v) in line.iter().enumerate() {
                    amp[s * ni + i] = *v;
                }
            }
        }
    }
    Ok(())
}
