//! Command-line front end. Settings are layered preset, then config file,
//! then flags.
//!
//! Exit codes: 0 success, 1 configuration / parameter / I/O error,
//! 2 numerical or verification failure, 3 truncation tail above its limit.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, Settings};
use crate::error::{Error, Result};
use crate::pipeline::{self, Dataset};
use crate::verify::{run_suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "revivalkit", version, about = "Coherent-state revivals in the extended Scarf I potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate V(x) across the well.
    Potential(Common),
    /// Tabulate the energy levels from n = m.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        levels: usize,
    },
    /// Tabulate one eigenfunction.
    Wavefunction {
        #[command(flatten)]
        common: Common,
        /// State index; defaults to the ground state n = m.
        #[arg(long)]
        n: Option<usize>,
        /// Grid points (alias of --samples).
        #[arg(long)]
        points: Option<usize>,
    },
    /// Produce the data behind figure 1 to 5.
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=5))]
        number: u8,
        #[command(flatten)]
        common: Common,
    },
    /// Run the self-consistency suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Multiplies every upper-bound tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        #[arg(long, hide = true)]
        corrupt_rho: bool,
    },
}

/// Flags shared by every subcommand. Numbers accept ratios such as `-1/3`;
/// lists are comma separated.
#[derive(Debug, Default, Args)]
pub struct Common {
    /// Flat `key = value` file, applied over the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, conflicts_with = "t_rev")]
    pub omega: Option<String>,
    /// Revival time; sets ω = π/(2 T_rev).
    #[arg(long)]
    pub t_rev: Option<String>,
    #[arg(long = "J")]
    pub j: Option<String>,
    #[arg(long)]
    pub n_bar: Option<String>,
    #[arg(long)]
    pub n_trunc: Option<String>,
    #[arg(long)]
    pub n_min: Option<String>,
    #[arg(long)]
    pub omega0: Option<String>,
    #[arg(long)]
    pub p_max: Option<String>,
    #[arg(long)]
    pub q_max: Option<String>,
    /// Time window in units of T_rev.
    #[arg(long)]
    pub t_span: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    /// Proceed with parameters that fail the admissibility conditions.
    #[arg(long)]
    pub allow_invalid_params: bool,
}

impl Common {
    fn flag_settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        let pairs = [
            ("a", &self.a),
            ("b", &self.b),
            ("m", &self.m),
            ("omega", &self.omega),
            ("t-rev", &self.t_rev),
            ("J", &self.j),
            ("n-bar", &self.n_bar),
            ("n-trunc", &self.n_trunc),
            ("n-min", &self.n_min),
            ("omega0", &self.omega0),
            ("p-max", &self.p_max),
            ("q-max", &self.q_max),
            ("t-span", &self.t_span),
            ("samples", &self.samples),
            ("format", &self.format),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        s.preset = self.preset.clone();
        s.out = self.out.clone();
        if self.allow_invalid_params {
            s.allow_invalid_params = Some(true);
        }
        Ok(s)
    }

    /// Preset, then config file, then flags. `default_preset` applies when
    /// neither the flags nor the file name one.
    pub fn resolve(&self, default_preset: Option<&str>) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let name = self
            .preset
            .clone()
            .or_else(|| file.preset.clone())
            .or_else(|| default_preset.map(str::to_string));
        let base = match &name {
            Some(n) => Settings::preset(n)?,
            None => Settings::default(),
        };
        base.overlay(file)?.overlay(self.flag_settings()?)?.resolve()
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameters { .. } | Error::Io(_) | Error::Json(_) => 1,
        Error::Truncation { .. } => 3,
        _ => 2,
    }
}

fn write_all(cfg: &RunConfig, data: Dataset) -> Result<()> {
    for (stem, table) in data {
        let path = table.write(&cfg.out, &stem, cfg.format)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Potential(c) => {
            let cfg = c.resolve(None)?;
            write_all(&cfg, pipeline::potential_table(&cfg)?)?;
        }
        Command::Spectrum { common, levels } => {
            let cfg = common.resolve(None)?;
            write_all(&cfg, pipeline::spectrum_table(&cfg, levels)?)?;
        }
        Command::Wavefunction { common, n, points } => {
            let mut cfg = common.resolve(None)?;
            if points.is_some() {
                cfg.samples = points;
            }
            write_all(&cfg, pipeline::wavefunction_table(&cfg, n)?)?;
        }
        Command::Fig { number, common } => {
            let cfg = common.resolve(Some(pipeline::default_preset(number)))?;
            write_all(&cfg, pipeline::figure(number, &cfg)?)?;
        }
        Command::Verify {
            common,
            tolerance_scale,
            corrupt_rho,
        } => {
            let cfg = common.resolve(Some("fig3"))?;
            let opts = VerifyOptions {
                tolerance_scale,
                corrupt_rho,
            };
            let checks = run_suite(&cfg, &opts)?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            for c in &checks {
                println!("{c}");
            }
            println!("summary checks={} failed={failed}", checks.len());
            return Ok(if failed == 0 { 0 } else { 2 });
        }
    }
    Ok(0)
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::InvalidParameters { .. }) {
                eprintln!("hint: pass --allow-invalid-params to proceed anyway");
            }
            exit_code(&e)
        }
    }
}
