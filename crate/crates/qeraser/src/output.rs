//! CSV and JSON rendering, and all-or-nothing writes of a result set.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qeraser_core::scenario::{ConfigValue, ScenarioConfig, ScenarioReport};
use qeraser_core::{FringeProfile, FringeStats, SweepTable};
use serde_json::{json, Map, Value};

use crate::{CliError, Result};

/// 12 significant digits.
fn num(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn profile_csv(profile: &FringeProfile) -> String {
    let mut out = String::from("x_m,value\n");
    for (x, v) in profile.grid().coords().zip(profile.values()) {
        let _ = writeln!(out, "{},{}", num(x), num(*v));
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = format!(
        "{},visibility,phase_rad,period_m,fit_residual,raw_visibility\n",
        table.param
    );
    for row in &table.rows {
        let s = &row.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(row.value),
            num(s.visibility),
            num(s.phase),
            num(s.period),
            num(s.fit_residual),
            num(s.raw_visibility)
        );
    }
    out
}

fn finite(v: f64) -> Value {
    // serde_json maps non-finite floats to null
    json!(v)
}

pub fn config_json(config: &ScenarioConfig) -> Value {
    let mut map = Map::new();
    for (key, value) in config.entries() {
        let v = match value {
            ConfigValue::Integer(n) => json!(n),
            ConfigValue::Number(x) => finite(x),
            ConfigValue::Text(t) => json!(t),
            ConfigValue::List(xs) => Value::Array(xs.into_iter().map(finite).collect()),
        };
        map.insert(key.to_string(), v);
    }
    Value::Object(map)
}

pub fn stats_json(stats: &FringeStats) -> Value {
    json!({
        "visibility": finite(stats.visibility),
        "phase_rad": finite(stats.phase),
        "period_m": finite(stats.period),
        "fit_residual": finite(stats.fit_residual),
        "raw_visibility": finite(stats.raw_visibility),
        "reliable": stats.is_reliable(),
    })
}

pub fn summary_json(report: &ScenarioReport) -> Value {
    let profiles: Vec<Value> = report
        .profiles
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "file": format!("{}.csv", p.name),
                "stats": p.stats.as_ref().map_or(Value::Null, stats_json),
            })
        })
        .collect();
    let diagnostics: Map<String, Value> = report
        .diagnostics
        .iter()
        .map(|(k, v)| (k.clone(), finite(*v)))
        .collect();
    json!({
        "scenario": report.config.scenario.as_str(),
        "config": config_json(&report.config),
        "expected_period_m": finite(report.config.expected_period()),
        "profiles": profiles,
        "diagnostics": diagnostics,
    })
}

/// Every file of a scenario run, rendered in memory.
pub fn render_run(report: &ScenarioReport) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = report
        .profiles
        .iter()
        .map(|p| (format!("{}.csv", p.name), profile_csv(&p.profile)))
        .collect();
    let mut summary = serde_json::to_string_pretty(&summary_json(report)).expect("json values serialize");
    summary.push('\n');
    files.push(("summary.json".to_string(), summary));
    files
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `files` into `dir`. Files are staged under temporary names and
/// renamed into place; on any failure everything this call created is
/// removed again.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged: Vec<PathBuf> = Vec::new();
    let mut placed: Vec<PathBuf> = Vec::new();
    let result = (|| {
        for (name, body) in files {
            let tmp = dir.join(format!(".{name}.partial"));
            staged.push(tmp.clone());
            fs::write(&tmp, body).map_err(io(&tmp))?;
        }
        for ((name, _), tmp) in files.iter().zip(&staged) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest).map_err(io(&dest))?;
            placed.push(dest);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in staged.iter().chain(&placed) {
            let _ = fs::remove_file(p);
        }
        if created_dir {
            let _ = fs::remove_dir(dir);
        }
        return Err(e);
    }
    Ok(placed)
}
