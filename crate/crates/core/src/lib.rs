//! Transverse two-photon quantum-eraser simulation.
//!
//! The crate models the double-slit experiment with down-converted photon
//! pairs along one transverse axis. A [`BiphotonField`] holds the joint
//! amplitude `psi(x_s, x_i)`; each arm is pushed through free-space
//! propagation, thin lenses and masks; the idler is then detected with a
//! pinhole, a bucket aperture or a plane-wave projection, and the resulting
//! signal profiles are analysed for fringe visibility.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the `qeraser` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod biphoton;
mod error;
pub mod fft;
pub mod fringes;
pub mod grid;
pub mod marker;
pub mod optics;
pub mod propagation;
pub mod scenario;

pub use analysis::{source_overlap, sweep, SweepRow, SweepTable};
pub use biphoton::{
    coincidence_bucket, coincidence_point, conditional_signal, idler_fourier_project,
    make_spdc_state, signal_singles, DetectionSpec, FringeProfile,
};
pub use error::{Error, Result};
pub use fringes::{extract_fringes, FringeStats};
pub use grid::{BiphotonField, Field1D, Grid1D};
pub use marker::{fringe_pattern, MarkerState, PolarizerAngle, Projection};
pub use optics::{apply_mask, sample_mask, source_profile, Mask, SourceShape, SourceSpec};
pub use propagation::{
    apply_arm, apply_lens, apply_train, propagate_angular_spectrum, propagate_fresnel_direct,
    ArmSelector, Element,
};
pub use scenario::{run_scenario, ScenarioConfig, ScenarioId, ScenarioReport};

pub use num_complex::Complex64;
