//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any
//! criterion fails. Runs at n_s = n_i = 1024 unless a criterion says
//! otherwise.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qeraser_core::marker::{blind_pattern, fringe_pattern, MarkerState, PolarizerAngle};
use qeraser_core::propagation::critical_distance;
use qeraser_core::scenario::{ScenarioConfig, ScenarioId, ScenarioReport};
use qeraser_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const LAMBDA: f64 = 702e-9;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn preset_report(id: ScenarioId) -> ScenarioReport {
    run_scenario(&ScenarioConfig::preset(id)).unwrap()
}

fn vis(report: &ScenarioReport, name: &str) -> f64 {
    report.profile(name).unwrap().stats.unwrap().visibility
}

fn peak_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

fn grid() -> Grid1D {
    Grid1D::new(1024, 20.48e-3).unwrap()
}

fn gaussian(g: Grid1D, x0: f64, sigma: f64) -> Field1D {
    Field1D::from_fn(g, |x| Complex64::new((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), 0.0)).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn unitarity() -> Outcome {
    let g = grid();
    let zc = critical_distance(&g, LAMBDA);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut worst_norm, mut worst_comp) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let amp = (0..g.n())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = Field1D::new(g, amp).unwrap();
        let n0 = f.norm2();
        let z1 = rng.random_range(0.01..0.5) * zc;
        let z2 = rng.random_range(0.01..0.5) * zc;
        let focal = rng.random_range(0.05..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let a = propagate_angular_spectrum(&f, z1, LAMBDA).unwrap();
        let outs = [
            a.clone(),
            propagate_fresnel_direct(&f, zc, LAMBDA).unwrap(),
            apply_lens(&f, focal, LAMBDA).unwrap(),
        ];
        for o in &outs {
            worst_norm = worst_norm.max((o.norm2() - n0).abs() / n0);
        }
        let two = propagate_angular_spectrum(&a, z2, LAMBDA).unwrap();
        let one = propagate_angular_spectrum(&f, z1 + z2, LAMBDA).unwrap();
        worst_comp = worst_comp.max(max_diff(two.amp(), one.amp()));
    }
    check(
        worst_norm < 1e-10 && worst_comp < 1e-8,
        format!("max relative norm2 drift {worst_norm:.1e} (< 1e-10), max composition error {worst_comp:.1e} (< 1e-8)"),
    )
}

fn oracle_equivalence() -> Outcome {
    let g = grid();
    let zc = critical_distance(&g, LAMBDA);
    let open = Field1D::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    let slits = apply_mask(&open, &Mask::double_slit(0.1e-3, 0.5e-3).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for f in [gaussian(g, 0.0, 0.15e-3), gaussian(g, 0.9e-3, 50e-6), slits] {
        let a = propagate_angular_spectrum(&f, zc, LAMBDA).unwrap();
        let b = propagate_fresnel_direct(&f, zc, LAMBDA).unwrap();
        let peak = a.amp().iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst = worst.max(max_diff(a.amp(), b.amp()) / peak);
    }
    // intensity std of exp(-x^2 / 4 sigma^2) grows as sigma sqrt(1 + (z/zr)^2),
    // zr = 4 pi sigma^2 / lambda
    let sigma0 = 0.1e-3;
    let zr = 4.0 * PI * sigma0 * sigma0 / LAMBDA;
    let mut worst_width = 0.0f64;
    for z in [0.1, 0.25, 0.5] {
        let out = propagate_angular_spectrum(&gaussian(g, 0.0, sigma0), z, LAMBDA).unwrap();
        let i = out.intensity();
        let total: f64 = i.iter().sum();
        let var: f64 = g.coords().zip(&i).map(|(x, v)| x * x * v).sum::<f64>() / total;
        let expected = sigma0 * (1.0 + (z / zr).powi(2)).sqrt();
        worst_width = worst_width.max((var.sqrt() / expected - 1.0).abs());
    }
    check(
        worst < 1e-6 && worst_width < 5e-3,
        format!("AS vs direct {worst:.1e} of peak (< 1e-6), width-law error {:.3}% (< 0.5%)", 100.0 * worst_width),
    )
}

fn coherent_double_slit() -> Outcome {
    let g = grid();
    let z = critical_distance(&g, LAMBDA);
    let (w, d) = (0.1e-3, 0.5e-3);
    let mut delta = vec![Complex64::new(0.0, 0.0); g.n()];
    delta[g.n() / 2] = Complex64::new(1.0, 0.0);
    let signal = Field1D::new(g, delta).unwrap();
    let gi = Grid1D::new(64, 1.28e-3).unwrap();
    let idler = gaussian(gi, 0.0, 0.1e-3).normalize().unwrap();
    let psi = BiphotonField::product(&signal, &idler);
    let slits = Mask::double_slit(w, d).unwrap();
    let train = [
        Element::Propagate { distance: z, wavelength: LAMBDA },
        Element::Mask(slits),
        Element::Propagate { distance: z, wavelength: LAMBDA },
    ];
    let out = apply_train(&psi, ArmSelector::Signal, &train).unwrap();
    let singles = signal_singles(&out);

    // Each slit is a uniformly lit aperture of the width the grid transmits,
    // lit by the spherical wave of the point source; far-zone sinc envelope
    // per slit, Fresnel phase from each slit centre.
    let open = sample_mask(&slits, &g).unwrap().iter().filter(|t| **t > 0.0).count() / 2;
    let we = open as f64 * g.dx();
    let oracle: Vec<f64> = g
        .coords()
        .map(|x| {
            let mut u = Complex64::new(0.0, 0.0);
            for c in [0.5 * d, -0.5 * d] {
                let env = sinc(we * ((x - c) / z - c / z) / LAMBDA);
                u += Complex64::from_polar(env, PI * (x - c).powi(2) / (LAMBDA * z));
            }
            u.norm_sqr()
        })
        .collect();
    let sim = singles.values();
    let scale = sim.iter().zip(&oracle).map(|(a, b)| a * b).sum::<f64>() / oracle.iter().map(|b| b * b).sum::<f64>();
    let peak = peak_abs(sim);
    let rms = (sim.iter().zip(&oracle).map(|(a, b)| (a - scale * b).powi(2)).sum::<f64>() / g.n() as f64).sqrt() / peak;
    let expected = LAMBDA * z / d;
    let stats = extract_fringes(&singles, expected, 3.0 * expected).unwrap();
    let period_err = (stats.period - expected).abs();
    check(
        rms < 0.01 && period_err <= g.dx(),
        format!(
            "RMS {:.3}% of peak (< 1%), period {:.4e} m vs {:.4e} m, off by {:.2} samples (<= 1)",
            100.0 * rms,
            stats.period,
            expected,
            period_err / g.dx()
        ),
    )
}

fn van_cittert_zernike() -> Outcome {
    // Incoherent-source regime: sigma_c at the grid pitch, source-to-slit
    // distance far beyond the angular-spectrum limit (direct quadrature),
    // narrow slits.
    let mut cfg = ScenarioConfig::preset(ScenarioId::Fig3aFarSlits);
    for (k, v) in [
        ("source_shape", "tophat"),
        ("slit_separation", "8e-4"),
        ("slit_width", "8e-5"),
        ("correlation_width", "2e-5"),
        ("source_slit_distance", "2.85"),
        ("slit_detector_distance", "0.58"),
    ] {
        cfg.set(k, v).unwrap();
    }
    let dx = cfg.signal_window / cfg.signal_samples as f64;
    let widths: Vec<f64> = (0..8).map(|k| (32.0 + 24.0 * k as f64 - 0.5) * dx).collect();
    let table = sweep(&cfg, "source_width", &widths, None).unwrap();
    let scale = cfg.slit_separation / (cfg.signal_wavelength * cfg.source_slit_distance);
    let mut worst = 0.0f64;
    for row in &table.rows {
        let oracle = sinc(row.value * scale).abs();
        worst = worst.max((row.stats.visibility - oracle).abs());
    }
    let vis = table.visibilities();
    let kmin = (0..vis.len()).min_by(|&a, &b| vis[a].total_cmp(&vis[b])).unwrap();
    let s0 = 1.0 / scale;
    let step = widths[1] - widths[0];
    let zero_err = (widths[kmin] - s0).abs();
    check(
        worst < 0.03 && zero_err <= step,
        format!(
            "max |V - |sinc(u)|| = {worst:.4} (< 0.03) over 8 widths; first zero {:.3} mm, sweep minimum at {:.3} mm (step {:.3} mm)",
            1e3 * s0,
            1e3 * widths[kmin],
            1e3 * step
        ),
    )
}

fn eraser_headline() -> Outcome {
    let r = preset_report(ScenarioId::Fig3cErase);
    let (singles, pinhole) = (vis(&r, "singles"), vis(&r, "coincidence_pinhole"));
    let mut overlap_gap = 0.0f64;
    for id in [ScenarioId::Fig1Coincidence, ScenarioId::Fig3aFarSlits, ScenarioId::Fig3bNearSlits, ScenarioId::Fig3cErase] {
        let rep = preset_report(id);
        let o = rep.diagnostic("source_overlap").unwrap();
        overlap_gap = overlap_gap.max((o - vis(&rep, "singles")).abs());
    }
    check(
        singles < 0.1 && pinhole > 0.9 && overlap_gap < 0.05,
        format!(
            "singles V = {singles:.4} (< 0.1), pinhole coincidence V = {pinhole:.4} (> 0.9); source overlap predicts singles V within {overlap_gap:.3} (< 0.05)"
        ),
    )
}

fn aperture_monotonicity() -> Outcome {
    let r = preset_report(ScenarioId::Fig3cErase);
    let ladder: Vec<f64> = (1..=5).map(|k| vis(&r, &format!("ladder_{k}"))).collect();
    let rising = ladder.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
    let full = r.profile("ladder_5").unwrap().profile.values();
    let singles = r.profile("singles").unwrap().profile.values();
    let diff = full.iter().zip(singles).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let rel = diff / peak_abs(singles);
    check(
        rising <= 0.02 && rel <= 1e-12,
        format!(
            "ladder V = {:?}, largest rise {rising:+.4} (<= 0.02); full-window bucket vs singles {rel:.1e} of peak (<= 1e-12)",
            ladder.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn completeness() -> Outcome {
    let cfg = ScenarioConfig::preset(ScenarioId::Fig3cErase);
    let gs = cfg.signal_grid().unwrap();
    let gi = cfg.idler_grid().unwrap();
    let mut psi = make_spdc_state(&cfg.source_spec().unwrap(), &gs, &gi).unwrap();
    let mut drift = 0.0f64;
    let mut before = psi.norm2();
    for e in cfg.idler_train().unwrap() {
        psi = apply_arm(&psi, ArmSelector::Idler, &e).unwrap();
        drift = drift.max((psi.norm2() - before).abs());
        before = psi.norm2();
    }
    for e in cfg.signal_train().unwrap() {
        psi = apply_arm(&psi, ArmSelector::Signal, &e).unwrap();
        if !matches!(e, Element::Mask(_)) {
            drift = drift.max((psi.norm2() - before).abs());
        }
        before = psi.norm2();
    }
    let singles = signal_singles(&psi);
    let mut sum = vec![0.0; gs.n()];
    for k in 0..gi.n() {
        for (acc, v) in sum.iter_mut().zip(coincidence_point(&psi, gi.x(k)).unwrap().values()) {
            *acc += v;
        }
    }
    let trace_err = sum.iter().zip(singles.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        trace_err < 1e-10 && drift < 1e-10,
        format!("sum of conditionals vs singles {trace_err:.1e} (< 1e-10), norm drift over mask-free stages {drift:.1e} (< 1e-10)"),
    )
}

fn phase_continuum() -> Outcome {
    let cfg = ScenarioConfig::preset(ScenarioId::Fig3cErase);
    let r = run_scenario(&cfg).unwrap();
    let stats: Vec<FringeStats> = (1..=cfg.continuum_positions.len())
        .map(|k| r.profile(&format!("continuum_{k}")).unwrap().stats.unwrap())
        .collect();
    let v: Vec<f64> = stats.iter().map(|s| s.visibility).collect();
    let spread = v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    let mut phase = vec![stats[0].phase];
    for s in &stats[1..] {
        let prev = *phase.last().unwrap();
        let d = (s.phase - prev + PI).rem_euclid(2.0 * PI) - PI;
        phase.push(prev + d);
    }
    let x = &cfg.continuum_positions;
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, phase.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&phase).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = phase.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let steps: Vec<f64> = phase.windows(2).map(|w| w[1] - w[0]).collect();
    let monotonic = steps.iter().all(|s| *s > 0.0) || steps.iter().all(|s| *s < 0.0);
    check(
        spread < 0.05 && monotonic && r2 > 0.99,
        format!(
            "visibility spread {spread:.4} (< 0.05) over 7 idler positions, phases monotonic: {monotonic}, linear R^2 = {r2:.6} (> 0.99), slope {:.0} rad/m",
            sxy / sxx
        ),
    )
}

fn marker_algebra() -> Outcome {
    let g = grid();
    let (d, z) = (0.5e-3, 0.5);
    let period = LAMBDA * z / d;
    let marked = MarkerState::marked();
    let blind = blind_pattern(&marked, d, LAMBDA, z, &g).unwrap();
    let blind_v = extract_fringes(&blind, period, 3.0 * period).unwrap().visibility;
    let (mut worst_v, mut worst_p, mut worst_sum) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..24 {
        let a = PolarizerAngle::new(k as f64 * PI / 24.0).unwrap();
        let p = marked.project(a);
        let q = marked.project(a.orthogonal());
        let pat = fringe_pattern(p.amplitudes, d, LAMBDA, z, &g).unwrap();
        let anti = fringe_pattern(q.amplitudes, d, LAMBDA, z, &g).unwrap();
        let fitted = extract_fringes(&pat, period, 3.0 * period).unwrap().visibility;
        worst_v = worst_v.max((p.visibility() - 1.0).abs()).max((fitted - 1.0).abs());
        worst_p = worst_p.max((p.pass_probability - 0.5).abs());
        for ((x, y), b) in pat.values().iter().zip(anti.values()).zip(blind.values()) {
            worst_sum = worst_sum.max((x + y - b).abs());
        }
    }
    check(
        blind_v < 1e-9 && worst_v < 1e-9 && worst_p < 1e-12 && worst_sum < 1e-12,
        format!(
            "blind V = {blind_v:.1e}, |V - 1| <= {worst_v:.1e} over 24 angles, |P - 1/2| <= {worst_p:.1e}, fringes + antifringes vs mixture {worst_sum:.1e}"
        ),
    )
}

fn delayed_choice() -> Outcome {
    let cfg = ScenarioConfig::preset(ScenarioId::Fig4DelayedChoice);
    let r = run_scenario(&cfg).unwrap();
    let (small, large) = (vis(&r, "d_small"), vis(&r, "d_large"));
    let mut unsplit_cfg = cfg.clone();
    unsplit_cfg.scenario = ScenarioId::Fig3cErase;
    unsplit_cfg.bucket_ladder = Some(vec![cfg.idler_window]);
    let u = run_scenario(&unsplit_cfg).unwrap();
    let mut worst = 0.0f64;
    for (branch, whole) in [("d_small", "coincidence_pinhole"), ("d_large", "ladder_1")] {
        let b = r.profile(branch).unwrap().profile.values();
        let w = u.profile(whole).unwrap().profile.values();
        worst = worst.max(b.iter().zip(w).map(|(x, y)| (x - 0.5 * y).abs()).fold(0.0, f64::max));
    }
    check(
        small > 0.9 && large < 0.1 && worst < 1e-10,
        format!("D_small V = {small:.4} (> 0.9), D_large V = {large:.4} (< 0.1), branch rates vs half the unsplit rates {worst:.1e} (< 1e-10)"),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_qeraser");
    let root = tempfile::tempdir().unwrap();
    let run = |out: &Path, id: &str| {
        let status = Command::new(exe)
            .args(["run", id, "--out"])
            .arg(out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{id}: {}", String::from_utf8_lossy(&status.stderr));
    };
    let mut files = 0;
    for id in ScenarioId::ALL {
        let (a, b) = (root.path().join("a"), root.path().join("b"));
        run(&a, id.as_str());
        run(&b, id.as_str());
        let dir_a = a.join(id.as_str());
        let mut names: Vec<_> = std::fs::read_dir(&dir_a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            let x = std::fs::read(dir_a.join(&name)).unwrap();
            let y = std::fs::read(b.join(id.as_str()).join(&name)).unwrap();
            if x != y {
                return Err(format!("{}/{} differs between runs", id.as_str(), name.to_string_lossy()));
            }
            files += 1;
        }
    }
    Ok(format!("{files} CSV/JSON files across all 6 scenarios are byte-identical on re-run"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("unitarity and composition", unitarity),
        ("angular spectrum vs direct quadrature, beam width law", oracle_equivalence),
        ("coherent double-slit oracle", coherent_double_slit),
        ("van Cittert-Zernike sweep", van_cittert_zernike),
        ("eraser headline", eraser_headline),
        ("aperture monotonicity", aperture_monotonicity),
        ("trace and completeness identities", completeness),
        ("fringe-phase continuum", phase_continuum),
        ("marker-eraser algebra", marker_algebra),
        ("delayed choice", delayed_choice),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, criterion)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(criterion)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string());
            Err(format!("panic: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2} {name}: {detail} [{secs:.1} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2} {name}: {detail} [{secs:.1} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
