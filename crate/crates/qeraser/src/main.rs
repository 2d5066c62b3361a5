use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qeraser::config::{parse_config, scenario_id, ParsedConfig};
use qeraser::output::{render_run, sweep_csv, write_all};
use qeraser::{CliError, Result};
use qeraser_core::scenario::{ConfigValue, ScenarioConfig, ScenarioId};
use qeraser_core::{run_scenario, sweep};

/// Transverse two-photon quantum-eraser simulator.
#[derive(Parser, Debug)]
#[command(name = "qeraser", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario and write its profiles and summary.json.
    Run {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario once per value of one numeric parameter.
    Sweep {
        scenario: String,
        #[arg(long)]
        param: String,
        /// Comma-separated, monotonic.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Profile whose fringe statistics are tabulated.
        #[arg(long)]
        profile: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Print scenario ids and their default configs.
    List,
}

#[derive(clap::Args, Debug)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; files go to <out>/<scenario>/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value override, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

impl Common {
    fn load(&self, id: ScenarioId) -> Result<(ParsedConfig, PathBuf)> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?,
            None => String::new(),
        };
        let mut parsed = parse_config(&text, id)?;
        for spec in &self.set {
            parsed.apply_override(spec)?;
        }
        let root = self
            .out
            .clone()
            .or_else(|| parsed.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        let dir = root.join(id.as_str());
        Ok((parsed, dir))
    }
}

fn run(scenario: &str, common: &Common) -> Result<()> {
    let id = scenario_id(scenario)?;
    let (parsed, dir) = common.load(id)?;
    let report = run_scenario(&parsed.config)?;
    let written = write_all(&dir, &render_run(&report))?;
    for p in &report.profiles {
        match &p.stats {
            Some(s) => println!(
                "{:<24} V = {:.4}  phase = {:+.4} rad  period = {:.4e} m",
                p.name, s.visibility, s.phase, s.period
            ),
            None => println!("{:<24} dark", p.name),
        }
    }
    println!("wrote {} files to {}", written.len(), dir.display());
    Ok(())
}

fn run_sweep(scenario: &str, param: &str, values: &str, profile: Option<&str>, common: &Common) -> Result<()> {
    let id = scenario_id(scenario)?;
    let (parsed, dir) = common.load(id)?;
    let values: Vec<f64> = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::BadSweepValue(v.to_string())))
        .collect::<Result<_>>()?;
    let table = sweep(&parsed.config, param, &values, profile)?;
    write_all(Path::new(&dir), &[("sweep.csv".to_string(), sweep_csv(&table))])?;
    println!("{} -> {} visibility", table.param, table.profile);
    for row in &table.rows {
        println!("{:>14.6e}  {:.4}", row.value, row.stats.visibility);
    }
    println!("wrote {}", dir.join("sweep.csv").display());
    Ok(())
}

fn show(v: &ConfigValue) -> String {
    match v {
        ConfigValue::Integer(n) => n.to_string(),
        ConfigValue::Number(x) => format!("{x:e}"),
        ConfigValue::Text(t) => t.to_string(),
        ConfigValue::List(xs) => xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(","),
    }
}

fn list() {
    for id in ScenarioId::ALL {
        println!("{}  # {}", id.as_str(), id.description());
        for (key, value) in ScenarioConfig::preset(id).entries() {
            if key != "scenario" {
                println!("    {key} = {}", show(&value));
            }
        }
        println!();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let result = match &cli.command {
        Command::Run { scenario, common } => run(scenario, common),
        Command::Sweep {
            scenario,
            param,
            values,
            profile,
            common,
        } => run_sweep(scenario, param, values, profile.as_deref(), common),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
