//! Fringe visibility, phase and period from an intensity profile.
//!
//! The fit model is `I(x) = B(x) + C(x) cos(k x) + S(x) sin(k x)` over a
//! window centred on the optical axis, with `B` quadratic and `C`, `S`
//! even quadratics, so that a slowly varying diffraction envelope does not
//! leak into the visibility. At the centre this is
//! `B (1 + V cos(2 pi x / period + phase))` with `V = |C + iS| / B`. For a
//! flat envelope the model reduces to that form exactly. The period is
//! found by a scan around the expected value followed by golden-section
//! refinement of the residual.

use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{SMatrix, SVector};

use crate::biphoton::FringeProfile;
use crate::error::{Error, Result};

/// Samples the fit window must hold.
pub const MIN_WINDOW_SAMPLES: usize = 64;
/// Expected periods the fit window must hold.
pub const MIN_WINDOW_PERIODS: f64 = 3.0;
/// Fits with a larger relative RMS residual are flagged unreliable.
pub const RELIABLE_RESIDUAL: f64 = 0.1;

const NPARAM: usize = 7;
const SCAN_POINTS: usize = 121;
const SCAN_SPAN: f64 = 1.25;
const GOLDEN_ITERS: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeStats {
    /// Fitted visibility in `[0, 1]`.
    pub visibility: f64,
    /// Fringe phase in `(-pi, pi]`, measured at `x = 0`.
    pub phase: f64,
    pub period: f64,
    /// RMS fit residual relative to the mean level in the window.
    pub fit_residual: f64,
    /// `(max - min) / (max + min)` over the same window.
    pub raw_visibility: f64,
}

impl FringeStats {
    pub fn is_reliable(&self) -> bool {
        self.fit_residual <= RELIABLE_RESIDUAL
    }
}

struct Window {
    x: Vec<f64>,
    u: Vec<f64>,
    y: Vec<f64>,
}

struct Fit {
    rss: f64,
    coef: SVector<f64, NPARAM>,
}

fn basis(u: f64, c: f64, s: f64) -> [f64; NPARAM] {
    let u2 = u * u;
    [1.0, u, u2, c, u2 * c, s, u2 * s]
}

fn fit_at(w: &Window, period: f64) -> Option<Fit> {
    let k = 2.0 * PI / period;
    let mut ata = SMatrix::<f64, NPARAM, NPARAM>::zeros();
    let mut aty = SVector::<f64, NPARAM>::zeros();
    let rows: Vec<[f64; NPARAM]> = w
        .x
        .iter()
        .zip(&w.u)
        .map(|(&x, &u)| {
            let (s, c) = libm::sincos(k * x);
            basis(u, c, s)
        })
        .collect();
    for (row, &y) in rows.iter().zip(&w.y) {
        for a in 0..NPARAM {
            aty[a] += row[a] * y;
            for b in a..NPARAM {
                ata[(a, b)] += row[a] * row[b];
            }
        }
    }
    for a in 0..NPARAM {
        for b in 0..a {
            ata[(a, b)] = ata[(b, a)];
        }
    }
    let coef = match ata.cholesky() {
        Some(ch) => ch.solve(&aty),
        None => ata.lu().solve(&aty)?,
    };
    let rss = rows
        .iter()
        .zip(&w.y)
        .map(|(row, &y)| {
            let model: f64 = row.iter().zip(coef.iter()).map(|(r, c)| r * c).sum();
            (y - model) * (y - model)
        })
        .sum();
    Some(Fit { rss, coef })
}

fn rss_at(w: &Window, period: f64) -> f64 {
    fit_at(w, period).map_or(f64::INFINITY, |f| f.rss)
}

fn best_period(w: &Window, seed: f64) -> f64 {
    let lo = libm::log(seed / SCAN_SPAN);
    let hi = libm::log(seed * SCAN_SPAN);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|j| libm::exp(lo + step * j as f64)).collect();
    let scores: Vec<f64> = grid.iter().map(|&p| rss_at(w, p)).collect();
    let mut best = SCAN_POINTS / 2;
    for (j, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = j;
        }
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SCAN_POINTS - 1)];
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = rss_at(w, c);
    let mut fd = rss_at(w, d);
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = rss_at(w, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = rss_at(w, d);
        }
    }
    let refined = 0.5 * (a + b);
    if rss_at(w, refined) <= scores[best] {
        refined
    } else {
        grid[best]
    }
}

/// Fits fringes over the window `|x| <= window/2`, seeding the period
/// search with `expected_period`.
pub fn extract_fringes(profile: &FringeProfile, expected_period: f64, window: f64) -> Result<FringeStats> {
    for (name, v) in [("expected period", expected_period), ("fit window", window)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be positive and finite",
            });
        }
    }
    let grid = profile.grid();
    let half = 0.5 * window;
    let slack = 1e-9 * grid.dx();
    let mut w = Window {
        x: Vec::new(),
        u: Vec::new(),
        y: Vec::new(),
    };
    for (x, &v) in grid.coords().zip(profile.values()) {
        if libm::fabs(x) <= half + slack {
            w.x.push(x);
            w.u.push(x / half);
            w.y.push(v);
        }
    }
    let periods = window / expected_period;
    if w.x.len() < MIN_WINDOW_SAMPLES || periods < MIN_WINDOW_PERIODS * (1.0 - 1e-9) {
        return Err(Error::FitWindow {
            window,
            samples: w.x.len(),
            periods,
        });
    }
    let mean = w.y.iter().sum::<f64>() / w.y.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::ZeroProfile);
    }
    let max = w.y.iter().cloned().fold(f64::MIN, f64::max);
    let min = w.y.iter().cloned().fold(f64::MAX, f64::min);
    let raw_visibility = (max - min) / (max + min);
    w.y.iter_mut().for_each(|v| *v /= mean);

    let period = best_period(&w, expected_period);
    let fit = fit_at(&w, period).ok_or(Error::ZeroProfile)?;
    let (b0, c0, s0) = (fit.coef[0], fit.coef[3], fit.coef[5]);
    let amplitude = libm::hypot(c0, s0);
    let visibility = if b0 > 0.0 { (amplitude / b0).min(1.0) } else { 1.0 };
    let mut phase = libm::atan2(-s0, c0);
    if phase <= -PI {
        phase += 2.0 * PI;
    }
    let fit_residual = libm::sqrt(fit.rss / w.y.len() as f64);
    Ok(FringeStats {
        visibility,
        phase,
        period,
        fit_residual,
        raw_visibility,
    })
}
