//! Preset experiment pipelines and their configuration.
//!
//! Geometry presets (all in meters): slits `w = 0.1 mm`, `d = 0.5 mm`;
//! crystal to slits `0.5 m` (far) or `0.02 m` (near); slits to detector
//! `0.5 m`; 702 nm degenerate photons; 1024-sample grids with a 20 um
//! pitch. The far preset uses a point-like Gaussian pump (`sigma = 40 um`),
//! the near presets a 2 mm top hat. The idler detector sits 0.5 m from the
//! crystal without a lens unless `idler_lens = on`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::analysis::source_overlap;
use crate::biphoton::{
    coincidence_bucket, coincidence_point, detect, make_spdc_state, signal_singles, DetectionSpec,
    FringeProfile,
};
use crate::error::{Error, Result};
use crate::fringes::{extract_fringes, FringeStats};
use crate::grid::{BiphotonField, Grid1D};
use crate::marker::{blind_pattern, fringe_pattern, MarkerState, PolarizerAngle};
use crate::optics::{source_profile, Mask, SourceShape, SourceSpec};
use crate::propagation::{apply_arm_in_place, ArmSelector, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Fig1Coincidence,
    Fig3aFarSlits,
    Fig3bNearSlits,
    Fig3cErase,
    Fig4DelayedChoice,
    QubitEraser,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::Fig1Coincidence,
        ScenarioId::Fig3aFarSlits,
        ScenarioId::Fig3bNearSlits,
        ScenarioId::Fig3cErase,
        ScenarioId::Fig4DelayedChoice,
        ScenarioId::QubitEraser,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::Fig1Coincidence => "fig1-coincidence",
            ScenarioId::Fig3aFarSlits => "fig3a-far-slits",
            ScenarioId::Fig3bNearSlits => "fig3b-near-slits",
            ScenarioId::Fig3cErase => "fig3c-erase",
            ScenarioId::Fig4DelayedChoice => "fig4-delayed-choice",
            ScenarioId::QubitEraser => "qubit-eraser",
        }
    }

    pub fn parse(s: &str) -> Option<ScenarioId> {
        ScenarioId::ALL.into_iter().find(|id| id.as_str() == s)
    }

    pub fn description(&self) -> &'static str {
        match self {
            ScenarioId::Fig1Coincidence => "twin-photon double slit, coincidence vs singles",
            ScenarioId::Fig3aFarSlits => "slits far from the crystal: point-like source, singles fringes",
            ScenarioId::Fig3bNearSlits => "slits near the crystal: which-path labelled, no singles fringes",
            ScenarioId::Fig3cErase => "near slits with idler pinhole: coincidence fringes restored",
            ScenarioId::Fig4DelayedChoice => "idler split 50/50 between pinhole and full-window detectors",
            ScenarioId::QubitEraser => "path qubit with polarization marker and polarizer",
        }
    }

    /// Profile whose fringe statistics a sweep reports by default.
    pub fn sweep_profile(&self, param: &str) -> &'static str {
        match self {
            ScenarioId::Fig3aFarSlits | ScenarioId::Fig3bNearSlits => "singles",
            ScenarioId::Fig1Coincidence | ScenarioId::Fig3cErase => match param {
                "bucket_width" => "coincidence_bucket",
                "fourier_q" => "coincidence_fourier",
                _ => "coincidence_pinhole",
            },
            ScenarioId::Fig4DelayedChoice => "d_small",
            ScenarioId::QubitEraser => "marked_theta_0",
        }
    }

    fn near(&self) -> bool {
        !matches!(self, ScenarioId::Fig3aFarSlits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Gaussian,
    TopHat,
}

/// Fully specified run. Keys of the flat `key = value` format map one to
/// one onto fields; see [`ScenarioConfig::KEYS`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub signal_samples: usize,
    pub idler_samples: usize,
    pub signal_window: f64,
    pub idler_window: f64,
    pub signal_wavelength: f64,
    pub idler_wavelength: f64,
    pub slit_width: f64,
    pub slit_separation: f64,
    pub source_slit_distance: f64,
    pub slit_detector_distance: f64,
    pub source_shape: ShapeKind,
    /// Top-hat full width, or Gaussian intensity standard deviation.
    pub source_width: f64,
    /// `None` means twice the coarser grid pitch.
    pub correlation_width: Option<f64>,
    pub idler_distance: f64,
    pub idler_lens: bool,
    /// `None` means `idler_distance`.
    pub idler_focal: Option<f64>,
    pub pinhole_x: f64,
    pub bucket_width: f64,
    /// `None` means `0.1, 0.2, 0.4, 0.8 mm` plus the full idler window.
    pub bucket_ladder: Option<Vec<f64>>,
    pub fourier_q: f64,
    pub continuum_positions: Vec<f64>,
    /// Fit window in expected fringe periods.
    pub fit_periods: f64,
}

/// Resolved value of one configuration key.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    Integer(usize),
    Number(f64),
    Text(&'static str),
    List(Vec<f64>),
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_number(key: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| bad(key, format!("`{}` is not a number", text.trim())))?;
    if !v.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(v)
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    let items: Result<Vec<f64>> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_number(key, s))
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(bad(key, "list is empty"));
    }
    Ok(items)
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(key, format!("{v} is not a positive length in meters")))
    }
}

fn is_auto(text: &str) -> bool {
    text.trim().eq_ignore_ascii_case("auto")
}

impl ScenarioConfig {
    pub const KEYS: [&'static str; 23] = [
        "signal_samples",
        "idler_samples",
        "signal_window",
        "idler_window",
        "signal_wavelength",
        "idler_wavelength",
        "slit_width",
        "slit_separation",
        "source_slit_distance",
        "slit_detector_distance",
        "source_shape",
        "source_width",
        "correlation_width",
        "idler_distance",
        "idler_lens",
        "idler_focal",
        "pinhole_x",
        "bucket_width",
        "bucket_ladder",
        "fourier_q",
        "continuum_positions",
        "fit_periods",
        "scenario",
    ];

    pub fn preset(scenario: ScenarioId) -> Self {
        let near = scenario.near();
        ScenarioConfig {
            scenario,
            signal_samples: 1024,
            idler_samples: 1024,
            signal_window: 20.48e-3,
            idler_window: 20.48e-3,
            signal_wavelength: 702e-9,
            idler_wavelength: 702e-9,
            slit_width: 0.1e-3,
            slit_separation: 0.5e-3,
            source_slit_distance: if near { 0.02 } else { 0.5 },
            slit_detector_distance: 0.5,
            source_shape: if near { ShapeKind::TopHat } else { ShapeKind::Gaussian },
            source_width: if near { 2e-3 } else { 40e-6 },
            correlation_width: None,
            idler_distance: 0.5,
            idler_lens: false,
            idler_focal: None,
            pinhole_x: 0.0,
            bucket_width: 0.2e-3,
            bucket_ladder: None,
            fourier_q: 0.0,
            continuum_positions: vec![-0.3e-3, -0.2e-3, -0.1e-3, 0.0, 0.1e-3, 0.2e-3, 0.3e-3],
            fit_periods: 3.0,
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, text: &str) -> Result<()> {
        let t = text.trim();
        match key {
            "scenario" => {
                let id = ScenarioId::parse(t).ok_or_else(|| bad(key, format!("unknown scenario `{t}`")))?;
                if id != self.scenario {
                    return Err(bad(key, format!("config is for `{t}`, not `{}`", self.scenario.as_str())));
                }
            }
            "signal_samples" | "idler_samples" => {
                let n: usize = t.parse().map_err(|_| bad(key, format!("`{t}` is not a sample count")))?;
                if key == "signal_samples" {
                    self.signal_samples = n;
                } else {
                    self.idler_samples = n;
                }
            }
            "source_shape" => {
                self.source_shape = match t {
                    "gaussian" => ShapeKind::Gaussian,
                    "tophat" => ShapeKind::TopHat,
                    _ => return Err(bad(key, "expected `gaussian` or `tophat`")),
                }
            }
            "idler_lens" => {
                self.idler_lens = match t {
                    "on" | "true" | "yes" => true,
                    "off" | "false" | "no" => false,
                    _ => return Err(bad(key, "expected `on` or `off`")),
                }
            }
            "correlation_width" if is_auto(t) => self.correlation_width = None,
            "idler_focal" if is_auto(t) => self.idler_focal = None,
            "bucket_ladder" if is_auto(t) => self.bucket_ladder = None,
            "bucket_ladder" => {
                let list = parse_list(key, t)?;
                for v in &list {
                    positive(key, *v)?;
                }
                self.bucket_ladder = Some(list);
            }
            "continuum_positions" => self.continuum_positions = parse_list(key, t)?,
            _ => {
                if !ScenarioConfig::KEYS.contains(&key) {
                    return Err(Error::UnknownKey(key.to_string()));
                }
                let v = parse_number(key, t)?;
                self.set_number(key, v)?;
            }
        }
        Ok(())
    }

    /// Sets a scalar key. Lengths must be positive; `pinhole_x` and
    /// `fourier_q` take any finite value.
    pub fn set_number(&mut self, key: &str, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        match key {
            "pinhole_x" => self.pinhole_x = v,
            "fourier_q" => self.fourier_q = v,
            "signal_samples" | "idler_samples" => {
                if v < 0.0 || libm::trunc(v) != v {
                    return Err(bad(key, "must be a whole number"));
                }
                if key == "signal_samples" {
                    self.signal_samples = v as usize;
                } else {
                    self.idler_samples = v as usize;
                }
            }
            _ => {
                let slot = match key {
                    "signal_window" => &mut self.signal_window,
                    "idler_window" => &mut self.idler_window,
                    "signal_wavelength" => &mut self.signal_wavelength,
                    "idler_wavelength" => &mut self.idler_wavelength,
                    "slit_width" => &mut self.slit_width,
                    "slit_separation" => &mut self.slit_separation,
                    "source_slit_distance" => &mut self.source_slit_distance,
                    "slit_detector_distance" => &mut self.slit_detector_distance,
                    "source_width" => &mut self.source_width,
                    "idler_distance" => &mut self.idler_distance,
                    "bucket_width" => &mut self.bucket_width,
                    "fit_periods" => &mut self.fit_periods,
                    "correlation_width" => {
                        self.correlation_width = Some(positive(key, v)?);
                        return Ok(());
                    }
                    "idler_focal" => {
                        self.idler_focal = Some(positive(key, v)?);
                        return Ok(());
                    }
                    k if ScenarioConfig::KEYS.contains(&k) => {
                        return Err(bad(key, "is not a scalar parameter"));
                    }
                    _ => return Err(Error::UnknownKey(key.to_string())),
                };
                *slot = positive(key, v)?;
            }
        }
        Ok(())
    }

    pub fn signal_grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.signal_samples, self.signal_window)
    }

    pub fn idler_grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.idler_samples, self.idler_window)
    }

    pub fn resolved_correlation_width(&self) -> f64 {
        self.correlation_width.unwrap_or_else(|| {
            let ds = self.signal_window / self.signal_samples as f64;
            let di = self.idler_window / self.idler_samples as f64;
            2.0 * ds.max(di)
        })
    }

    pub fn resolved_idler_focal(&self) -> f64 {
        self.idler_focal.unwrap_or(self.idler_distance)
    }

    pub fn resolved_bucket_ladder(&self) -> Vec<f64> {
        self.bucket_ladder
            .clone()
            .unwrap_or_else(|| vec![0.1e-3, 0.2e-3, 0.4e-3, 0.8e-3, self.idler_window])
    }

    pub fn source_spec(&self) -> Result<SourceSpec> {
        let shape = match self.source_shape {
            ShapeKind::Gaussian => SourceShape::Gaussian {
                sigma: self.source_width,
            },
            ShapeKind::TopHat => SourceShape::TopHat {
                width: self.source_width,
            },
        };
        SourceSpec::new(
            shape,
            self.resolved_correlation_width(),
            self.signal_wavelength,
            self.idler_wavelength,
        )
    }

    pub fn slits(&self) -> Result<Mask> {
        Mask::double_slit(self.slit_width, self.slit_separation)
    }

    /// Fringe period `lambda_s z2 / d` at the signal detector.
    pub fn expected_period(&self) -> f64 {
        self.signal_wavelength * self.slit_detector_distance / self.slit_separation
    }

    /// Crystal to slits to detector. Each free-space hop uses the
    /// discretization valid at its distance.
    pub fn signal_train(&self) -> Result<[Element; 3]> {
        let grid = self.signal_grid()?;
        let lambda = self.signal_wavelength;
        Ok([
            Element::free_space(&grid, self.source_slit_distance, lambda),
            Element::Mask(self.slits()?),
            Element::free_space(&grid, self.slit_detector_distance, lambda),
        ])
    }

    pub fn idler_train(&self) -> Result<Vec<Element>> {
        let grid = self.idler_grid()?;
        let lambda = self.idler_wavelength;
        Ok(if self.idler_lens {
            let f = self.resolved_idler_focal();
            vec![
                Element::Lens { focal: f, wavelength: lambda },
                Element::free_space(&grid, f, lambda),
            ]
        } else {
            vec![Element::free_space(&grid, self.idler_distance, lambda)]
        })
    }

    /// Every key with its resolved value, in [`ScenarioConfig::KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, ConfigValue)> {
        use ConfigValue::*;
        vec![
            ("signal_samples", Integer(self.signal_samples)),
            ("idler_samples", Integer(self.idler_samples)),
            ("signal_window", Number(self.signal_window)),
            ("idler_window", Number(self.idler_window)),
            ("signal_wavelength", Number(self.signal_wavelength)),
            ("idler_wavelength", Number(self.idler_wavelength)),
            ("slit_width", Number(self.slit_width)),
            ("slit_separation", Number(self.slit_separation)),
            ("source_slit_distance", Number(self.source_slit_distance)),
            ("slit_detector_distance", Number(self.slit_detector_distance)),
            (
                "source_shape",
                Text(match self.source_shape {
                    ShapeKind::Gaussian => "gaussian",
                    ShapeKind::TopHat => "tophat",
                }),
            ),
            ("source_width", Number(self.source_width)),
            ("correlation_width", Number(self.resolved_correlation_width())),
            ("idler_distance", Number(self.idler_distance)),
            ("idler_lens", Text(if self.idler_lens { "on" } else { "off" })),
            ("idler_focal", Number(self.resolved_idler_focal())),
            ("pinhole_x", Number(self.pinhole_x)),
            ("bucket_width", Number(self.bucket_width)),
            ("bucket_ladder", List(self.resolved_bucket_ladder())),
            ("fourier_q", Number(self.fourier_q)),
            ("continuum_positions", List(self.continuum_positions.clone())),
            ("fit_periods", Number(self.fit_periods)),
            ("scenario", Text(self.scenario.as_str())),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedProfile {
    pub name: String,
    pub profile: FringeProfile,
    /// `None` when the profile is dark (zero in the fit window, or a
    /// polarizer output that blocks the photon).
    pub stats: Option<FringeStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub profiles: Vec<NamedProfile>,
    pub diagnostics: Vec<(String, f64)>,
}

impl ScenarioReport {
    pub fn profile(&self, name: &str) -> Option<&NamedProfile> {
        self.profiles.iter().find(|p| p.name == name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

struct Builder {
    period: f64,
    window: f64,
    profiles: Vec<NamedProfile>,
    diagnostics: Vec<(String, f64)>,
}

impl Builder {
    fn new(period: f64, window: f64) -> Self {
        Builder {
            period,
            window,
            profiles: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, profile: FringeProfile) -> Result<()> {
        let stats = match extract_fringes(&profile, self.period, self.window) {
            Ok(s) => Some(s),
            Err(Error::ZeroProfile) => None,
            Err(e) => return Err(Error::at_stage("fringe analysis")(e)),
        };
        self.profiles.push(NamedProfile {
            name: name.into(),
            profile,
            stats,
        });
        Ok(())
    }

    fn push_unfitted(&mut self, name: impl Into<String>, profile: FringeProfile) {
        self.profiles.push(NamedProfile {
            name: name.into(),
            profile,
            stats: None,
        });
    }

    fn diag(&mut self, name: &str, v: f64) {
        self.diagnostics.push((name.to_string(), v));
    }

    fn finish(self, config: &ScenarioConfig) -> ScenarioReport {
        ScenarioReport {
            config: config.clone(),
            profiles: self.profiles,
            diagnostics: self.diagnostics,
        }
    }
}

/// Runs one preset pipeline and returns its profiles, fringe statistics
/// and scalar diagnostics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let period = cfg.expected_period();
    let mut out = Builder::new(period, cfg.fit_periods * period);
    match cfg.scenario {
        ScenarioId::QubitEraser => run_qubit(cfg, &mut out)?,
        ScenarioId::Fig3aFarSlits | ScenarioId::Fig3bNearSlits => {
            let state = signal_state(cfg, false)?;
            out.push("singles", signal_singles(&state))?;
            out.diag("source_overlap", overlap(cfg)?);
        }
        ScenarioId::Fig1Coincidence | ScenarioId::Fig3cErase => {
            let state = signal_state(cfg, true)?;
            run_erase(cfg, &state, &mut out)?;
            out.diag("source_overlap", overlap(cfg)?);
        }
        ScenarioId::Fig4DelayedChoice => {
            let state = signal_state(cfg, true)?;
            run_delayed_choice(cfg, &state, &mut out)?;
        }
    }
    Ok(out.finish(cfg))
}

/// Two-photon state with the signal at its detector plane and, when
/// `with_idler`, the idler at its detection plane.
fn signal_state(cfg: &ScenarioConfig, with_idler: bool) -> Result<BiphotonField> {
    let gs = cfg.signal_grid().map_err(Error::at_stage("signal grid"))?;
    let gi = cfg.idler_grid().map_err(Error::at_stage("idler grid"))?;
    let source = cfg.source_spec().map_err(Error::at_stage("source"))?;
    let mut state = make_spdc_state(&source, &gs, &gi).map_err(Error::at_stage("source"))?;
    if with_idler {
        for e in cfg.idler_train().map_err(Error::at_stage("idler arm"))? {
            apply_arm_in_place(&mut state, ArmSelector::Idler, &e).map_err(Error::at_stage("idler arm"))?;
        }
    }
    for e in cfg.signal_train().map_err(Error::at_stage("signal arm"))? {
        apply_arm_in_place(&mut state, ArmSelector::Signal, &e).map_err(Error::at_stage("signal arm"))?;
    }
    Ok(state)
}

fn overlap(cfg: &ScenarioConfig) -> Result<f64> {
    let stage = Error::at_stage("source overlap");
    let gs = cfg.signal_grid().map_err(stage)?;
    let source = cfg.source_spec().map_err(Error::at_stage("source overlap"))?;
    let intensity = source_profile(&source, &gs)
        .map_err(Error::at_stage("source overlap"))?
        .intensity();
    let slits = cfg.slits().map_err(Error::at_stage("source overlap"))?;
    source_overlap(&gs, &slits, cfg.source_slit_distance, cfg.signal_wavelength, &intensity)
        .map_err(Error::at_stage("source overlap"))
}

fn run_erase(cfg: &ScenarioConfig, state: &BiphotonField, out: &mut Builder) -> Result<()> {
    let stage = "idler detection";
    out.push("singles", signal_singles(state))?;
    out.push(
        "coincidence_pinhole",
        coincidence_point(state, cfg.pinhole_x).map_err(Error::at_stage(stage))?,
    )?;
    out.push(
        "coincidence_bucket",
        coincidence_bucket(state, cfg.pinhole_x, cfg.bucket_width).map_err(Error::at_stage(stage))?,
    )?;
    for (k, a) in cfg.resolved_bucket_ladder().into_iter().enumerate() {
        out.push(
            format!("ladder_{}", k + 1),
            coincidence_bucket(state, cfg.pinhole_x, a).map_err(Error::at_stage(stage))?,
        )?;
    }
    out.push(
        "coincidence_fourier",
        detect(state, &DetectionSpec::Fourier { q0: cfg.fourier_q }).map_err(Error::at_stage(stage))?,
    )?;

    let mut vis = Vec::new();
    let mut phases = Vec::new();
    for (k, &x0) in cfg.continuum_positions.iter().enumerate() {
        let name = format!("continuum_{}", k + 1);
        out.push(name, coincidence_point(state, x0).map_err(Error::at_stage(stage))?)?;
        if let Some(s) = out.profiles.last().and_then(|p| p.stats) {
            vis.push(s.visibility);
            phases.push(s.phase);
        }
    }
    if vis.len() == cfg.continuum_positions.len() && vis.len() >= 2 {
        let spread = vis.iter().cloned().fold(f64::MIN, f64::max) - vis.iter().cloned().fold(f64::MAX, f64::min);
        let unwrapped = unwrap_phases(&phases);
        let (slope, r2) = linear_fit(&cfg.continuum_positions, &unwrapped);
        let steps: Vec<f64> = unwrapped.windows(2).map(|w| w[1] - w[0]).collect();
        let monotonic = steps.iter().all(|d| *d > 0.0) || steps.iter().all(|d| *d < 0.0);
        out.diag("continuum_visibility_spread", spread);
        out.diag("continuum_phase_slope", slope);
        out.diag("continuum_phase_r2", r2);
        out.diag("continuum_phase_monotonic", if monotonic { 1.0 } else { 0.0 });
    }
    Ok(())
}

fn run_delayed_choice(cfg: &ScenarioConfig, state: &BiphotonField, out: &mut Builder) -> Result<()> {
    let stage = Error::at_stage("idler detection");
    // 50/50 splitter: each output port carries the state with amplitude
    // 1/sqrt(2); the ports reach separate detectors and never recombine.
    let branch = state.scaled(FRAC_1_SQRT_2);
    let full = cfg.idler_grid().map_err(Error::at_stage("idler grid"))?.width();

    let small = coincidence_point(&branch, cfg.pinhole_x).map_err(stage)?;
    let large = coincidence_bucket(&branch, 0.0, full).map_err(Error::at_stage("idler detection"))?;
    let unsplit_small = coincidence_point(state, cfg.pinhole_x).map_err(Error::at_stage("idler detection"))?;
    let unsplit_large = signal_singles(state);

    let deviation = small
        .values()
        .iter()
        .zip(unsplit_small.values())
        .chain(large.values().iter().zip(unsplit_large.values()))
        .map(|(b, u)| libm::fabs(b - 0.5 * u))
        .fold(0.0, f64::max);
    let branch_total = 2.0 * branch.norm2();
    out.diag("branch_probability_small", branch.norm2());
    out.diag("branch_probability_large", branch.norm2());
    out.diag("unsplit_probability", state.norm2());
    out.diag("bookkeeping_error", libm::fabs(branch_total - state.norm2()));
    out.diag("max_branch_rate_deviation", deviation);

    out.push("singles", unsplit_large)?;
    out.push("d_small", small)?;
    out.push("d_large", large)?;
    Ok(())
}

/// Pass probability below which a polarizer output counts as dark; the
/// residue is rounding in the projector phase.
const BLOCKED: f64 = 1e-12;

fn run_qubit(cfg: &ScenarioConfig, out: &mut Builder) -> Result<()> {
    let stage = "marker eraser";
    let grid = cfg.signal_grid().map_err(Error::at_stage("signal grid"))?;
    let (d, lambda, z) = (cfg.slit_separation, cfg.signal_wavelength, cfg.slit_detector_distance);
    let angles = [(0.0, "0"), (0.25 * PI, "45"), (0.5 * PI, "90")];
    for (label, state) in [("unmarked", MarkerState::plain()), ("marked", MarkerState::marked())] {
        out.push(
            format!("{label}_blind"),
            blind_pattern(&state, d, lambda, z, &grid).map_err(Error::at_stage(stage))?,
        )?;
        let mut phases = Vec::new();
        for (theta, deg) in angles {
            let angle = PolarizerAngle::new(theta).map_err(Error::at_stage(stage))?;
            let projection = state.project(angle);
            let pattern = fringe_pattern(projection.amplitudes, d, lambda, z, &grid).map_err(Error::at_stage(stage))?;
            if projection.pass_probability > BLOCKED {
                out.push(format!("{label}_theta_{deg}"), pattern)?;
            } else {
                out.push_unfitted(format!("{label}_theta_{deg}"), pattern);
            }
            out.diag(&format!("{label}_pass_probability_theta_{deg}"), projection.pass_probability);
            phases.push(projection.phase());
        }
        if label == "marked" {
            let diff = phases[0] - phases[2];
            let wrapped = libm::atan2(libm::sin(diff), libm::cos(diff));
            out.diag("marked_phase_difference_0_90", libm::fabs(wrapped));
            out.diag("marked_blind_visibility", state.blind_visibility());
        }
    }
    Ok(())
}

/// Removes `2 pi` jumps between consecutive phases.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for &p in phases {
        let next = match out.last() {
            None => p,
            Some(&prev) => {
                let mut d = p - prev;
                while d > PI {
                    d -= 2.0 * PI;
                }
                while d <= -PI {
                    d += 2.0 * PI;
                }
                prev + d
            }
        };
        out.push(next);
    }
    out
}

/// Least-squares line through `(x, y)`: returns `(slope, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}
