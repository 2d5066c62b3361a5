//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Keys are the scenario keys
//! (see `qeraser list`) plus `output_dir`. Lengths are in meters.

use std::path::PathBuf;

use qeraser_core::scenario::{ScenarioConfig, ScenarioId};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: ScenarioConfig,
    pub output_dir: Option<PathBuf>,
}

pub fn scenario_id(name: &str) -> Result<ScenarioId> {
    ScenarioId::parse(name).ok_or_else(|| CliError::UnknownScenario(name.to_string()))
}

/// Parses `text` on top of the preset for `scenario`. Keys missing from the
/// file keep their preset values; a key given twice takes the last value.
pub fn parse_config(text: &str, scenario: ScenarioId) -> Result<ParsedConfig> {
    let mut parsed = ParsedConfig {
        config: ScenarioConfig::preset(scenario),
        output_dir: None,
    };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| CliError::Syntax {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Syntax {
                line,
                message: "key and value must both be non-empty".into(),
            });
        }
        parsed.apply(key, value).map_err(|e| match e {
            CliError::Model(source) => CliError::Line { line, source },
            other => other,
        })?;
    }
    Ok(parsed)
}

impl ParsedConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        if key == "output_dir" {
            self.output_dir = Some(PathBuf::from(value));
            return Ok(());
        }
        self.config.set(key, value)?;
        Ok(())
    }

    /// Applies a `--set key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| CliError::BadSet(spec.to_string()))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::BadSet(spec.to_string()));
        }
        self.apply(key, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qeraser_core::Error;

    #[test]
    fn empty_file_gives_preset() {
        let p = parse_config("", ScenarioId::Fig3cErase).unwrap();
        assert_eq!(p.config, ScenarioConfig::preset(ScenarioId::Fig3cErase));
        assert_eq!(p.output_dir, None);
    }

    #[test]
    fn lengths_are_meters() {
        let p = parse_config("slit_separation = 0.0005\n", ScenarioId::Fig3cErase).unwrap();
        assert_eq!(p.config.slit_separation, 0.5e-3);
    }

    #[test]
    fn negative_length_names_the_key() {
        let e = parse_config("# geometry\n\nslit_separation = -1\n", ScenarioId::Fig3cErase).unwrap_err();
        match &e {
            CliError::Line {
                line: 3,
                source: Error::BadValue { key, .. },
            } => assert_eq!(key, "slit_separation"),
            other => panic!("{other:?}"),
        }
        assert!(e.to_string().contains("slit_separation"));
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn syntax_and_key_errors_carry_line_numbers() {
        let e = parse_config("slit_width = 1e-4\nslit_width 2e-4\n", ScenarioId::Fig3aFarSlits).unwrap_err();
        assert!(matches!(e, CliError::Syntax { line: 2, .. }), "{e:?}");
        let e = parse_config("colour = red\n", ScenarioId::Fig3aFarSlits).unwrap_err();
        assert!(matches!(e, CliError::Line { line: 1, source: Error::UnknownKey(_) }), "{e:?}");
        let e = parse_config("slit_width = wide\n", ScenarioId::Fig3aFarSlits).unwrap_err();
        assert!(e.to_string().starts_with("line 1:"), "{e}");
    }

    #[test]
    fn comments_output_dir_and_overrides() {
        let text = "output_dir = results  # where\npinhole_x = 1e-4\nidler_lens = on\n";
        let mut p = parse_config(text, ScenarioId::Fig1Coincidence).unwrap();
        assert_eq!(p.output_dir, Some(PathBuf::from("results")));
        assert!(p.config.idler_lens);
        p.apply_override("pinhole_x=-2e-4").unwrap();
        assert_eq!(p.config.pinhole_x, -2e-4);
        assert!(matches!(p.apply_override("pinhole_x"), Err(CliError::BadSet(_))));
    }
}
