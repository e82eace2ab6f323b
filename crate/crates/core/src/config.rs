//! Run configuration: presets, flat `key = value` files and command-line
//! overrides, resolved into validated model parameters.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::Format;
use crate::revival::RevivalConfig;
use crate::scarf::ModelParams;
use crate::xjacobi::XmParams;

/// Revival time of the figure presets; fixes `ω = π/(2 T_rev)`.
pub const PRESET_T_REV: f64 = 2896.825;

/// Names accepted by [`Settings::preset`].
pub const PRESETS: [&str; 8] = [
    "fig1-left",
    "fig1-right",
    "fig2-a",
    "fig2-b",
    "fig2-c",
    "fig3",
    "fig4",
    "fig5",
];

/// Which of `ω` and `T_rev` fixes the energy scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyScale {
    Omega(f64),
    RevivalTime(f64),
}

impl EnergyScale {
    pub fn omega(self) -> f64 {
        match self {
            EnergyScale::Omega(w) => w,
            EnergyScale::RevivalTime(t) => PI / (2.0 * t),
        }
    }
}

/// One layer of settings; unset fields fall through to lower layers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<String>,
    pub a: Option<Vec<f64>>,
    pub b: Option<f64>,
    pub m: Option<usize>,
    pub omega: Option<f64>,
    pub t_rev: Option<f64>,
    pub j: Option<Vec<f64>>,
    pub n_bar: Option<f64>,
    pub n_trunc: Option<usize>,
    pub n_min: Option<usize>,
    pub omega0: Option<f64>,
    pub p_max: Option<usize>,
    pub q_max: Option<usize>,
    pub t_span: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub allow_invalid_params: Option<bool>,
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_real(key, s))
        .collect::<Result<Vec<_>>>()
        .and_then(|l| {
            if l.is_empty() {
                Err(Error::Config(format!("{key}: empty list")))
            } else {
                Ok(l)
            }
        })
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{}'", v.trim())))
}

/// A float, or a ratio such as `-1/3`.
fn parse_real(key: &str, v: &str) -> Result<f64> {
    match v.split_once('/') {
        Some((p, q)) => Ok(parse_num::<f64>(key, p)? / parse_num::<f64>(key, q)?),
        None => parse_num(key, v),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected true/false, got '{other}'"))),
    }
}

impl Settings {
    /// Settings of a named figure preset.
    pub fn preset(name: &str) -> Result<Self> {
        let mut s = Settings {
            preset: Some(name.to_string()),
            j: Some(vec![10.0, 20.0, 40.0, 100.0]),
            n_bar: Some(100.0),
            n_trunc: Some(50),
            n_min: Some(0),
            ..Default::default()
        };
        let fig2_j: Vec<f64> = (1..=400).map(|i| 0.05 * i as f64).collect();
        match name {
            "fig1-left" => {
                s.a = Some(vec![2.5]);
                s.b = Some(-0.5);
                s.m = Some(3);
                s.omega = Some(1.0);
            }
            "fig1-right" => {
                s.a = Some(vec![4.4]);
                s.b = Some(-1.0 / 3.0);
                s.m = Some(6);
                s.omega = Some(1.0);
            }
            "fig2-a" | "fig2-b" | "fig2-c" => {
                let (a, b, m) = match name {
                    "fig2-a" => (vec![2.2, 2.4, 2.6, 2.8], -0.5, 4),
                    "fig2-b" => (vec![3.2, 3.4, 3.6, 3.8], -0.25, 5),
                    _ => (vec![4.2, 4.4, 4.6, 4.8], -1.0 / 3.0, 6),
                };
                s.a = Some(a);
                s.b = Some(b);
                s.m = Some(m);
                s.omega = Some(1.0);
                s.j = Some(fig2_j);
            }
            "fig3" | "fig4" | "fig5" => {
                s.a = Some(vec![4.4]);
                s.b = Some(-1.0 / 3.0);
                s.m = Some(6);
                s.t_rev = Some(PRESET_T_REV);
                s.p_max = Some(4);
                s.q_max = Some(8);
                match name {
                    "fig3" => s.t_span = Some(2.0),
                    "fig4" => {
                        s.j = Some(vec![10.0]);
                        s.t_span = Some(10.0);
                    }
                    _ => {
                        s.j = Some(vec![10.0]);
                        s.t_span = Some(1.0);
                    }
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}'; known presets: {}",
                    PRESETS.join(", ")
                )))
            }
        }
        Ok(s)
    }

    /// Parses a flat `key = value` file; keys mirror the long CLI flags.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", lineno + 1)))?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Sets one key; both `n-bar` and `n_bar` spellings are accepted.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let key = key.replace('_', "-");
        let k = key.as_str();
        match k {
            "preset" => self.preset = Some(v.to_string()),
            "a" => self.a = Some(parse_list(k, v)?),
            "b" => self.b = Some(parse_real(k, v)?),
            "m" => self.m = Some(parse_num(k, v)?),
            "omega" => self.omega = Some(parse_real(k, v)?),
            "t-rev" => self.t_rev = Some(parse_real(k, v)?),
            "J" | "j" => self.j = Some(parse_list(k, v)?),
            "n-bar" => self.n_bar = Some(parse_num(k, v)?),
            "n-trunc" => self.n_trunc = Some(parse_num(k, v)?),
            "n-min" => self.n_min = Some(parse_num(k, v)?),
            "omega0" => self.omega0 = Some(parse_real(k, v)?),
            "p-max" => self.p_max = Some(parse_num(k, v)?),
            "q-max" => self.q_max = Some(parse_num(k, v)?),
            "t-span" => self.t_span = Some(parse_num(k, v)?),
            "samples" => self.samples = Some(parse_num(k, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => self.format = Some(v.parse()?),
            "allow-invalid-params" => self.allow_invalid_params = Some(parse_bool(k, v)?),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Overlays `upper` on `self`. Setting one of `omega`/`t_rev` in the
    /// upper layer clears the other from the lower one.
    pub fn overlay(mut self, upper: Settings) -> Result<Self> {
        if upper.omega.is_some() && upper.t_rev.is_some() {
            return Err(Error::Config("give exactly one of omega and t-rev".into()));
        }
        if upper.omega.is_some() {
            self.t_rev = None;
        }
        if upper.t_rev.is_some() {
            self.omega = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if upper.$f.is_some() { self.$f = upper.$f; } )* };
        }
        take!(
            preset, a, b, m, omega, t_rev, j, n_bar, n_trunc, n_min, omega0, p_max, q_max, t_span,
            samples, out, format, allow_invalid_params
        );
        Ok(self)
    }

    /// Validates and fills defaults.
    pub fn resolve(self) -> Result<RunConfig> {
        let missing = |k: &str| Error::Config(format!("missing required parameter '{k}' (set --{k}, a config file or --preset)"));
        let energy = match (self.omega, self.t_rev) {
            (Some(_), Some(_)) => return Err(Error::Config("give exactly one of omega and t-rev".into())),
            (Some(w), None) => EnergyScale::Omega(w),
            (None, Some(t)) => EnergyScale::RevivalTime(t),
            (None, None) => return Err(Error::Config("one of omega and t-rev is required".into())),
        };
        if !(energy.omega() > 0.0) || !energy.omega().is_finite() {
            return Err(Error::Config("omega (or t-rev) must be positive".into()));
        }
        let a = self.a.ok_or_else(|| missing("a"))?;
        let cfg = RunConfig {
            preset: self.preset,
            a,
            b: self.b.ok_or_else(|| missing("b"))?,
            m: self.m.ok_or_else(|| missing("m"))?,
            energy,
            j: self.j.unwrap_or_else(|| vec![10.0]),
            n_bar: self.n_bar.unwrap_or(100.0),
            n_trunc: self.n_trunc.unwrap_or(crate::gkcs::DEFAULT_N_TRUNC),
            n_min: self.n_min.unwrap_or(0),
            omega0: self.omega0,
            p_max: self.p_max.unwrap_or(4),
            q_max: self.q_max.unwrap_or(8),
            t_span: self.t_span,
            samples: self.samples,
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
            format: self.format.unwrap_or(Format::Csv),
            allow_invalid_params: self.allow_invalid_params.unwrap_or(false),
        };
        if cfg.j.iter().any(|j| !(*j >= 0.0)) {
            return Err(Error::Config("J values must be non-negative".into()));
        }
        if let Some(w0) = cfg.omega0 {
            if !(w0 > 0.0) {
                return Err(Error::Config("omega0 must be positive".into()));
            }
        }
        if cfg.samples.is_some_and(|n| n < 2) {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        if cfg.t_span.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Config("t-span must be positive".into()));
        }
        Ok(cfg)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    /// One or more values of `a` (several only for Mandel sweeps).
    pub a: Vec<f64>,
    pub b: f64,
    pub m: usize,
    pub energy: EnergyScale,
    pub j: Vec<f64>,
    pub n_bar: f64,
    pub n_trunc: usize,
    pub n_min: usize,
    /// Wavelet central frequency; `None` means `ω₀ = ω`.
    pub omega0: Option<f64>,
    pub p_max: usize,
    pub q_max: usize,
    /// Time window in units of `T_rev`.
    pub t_span: Option<f64>,
    pub samples: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
    pub allow_invalid_params: bool,
}

impl RunConfig {
    pub fn omega(&self) -> f64 {
        self.energy.omega()
    }

    pub fn omega0(&self) -> f64 {
        self.omega0.unwrap_or_else(|| self.omega())
    }

    /// The single `a` value, or an error when a list was given.
    pub fn single_a(&self) -> Result<f64> {
        match self.a.as_slice() {
            [a] => Ok(*a),
            _ => Err(Error::Config(format!(
                "this command takes a single value of a, got {:?}",
                self.a
            ))),
        }
    }

    pub fn model_for(&self, a: f64) -> Result<ModelParams> {
        let xm = XmParams::build(a, self.b, self.m, self.allow_invalid_params)?;
        ModelParams::new(xm, self.omega())
    }

    pub fn model(&self) -> Result<ModelParams> {
        self.model_for(self.single_a()?)
    }

    pub fn revival(&self, j: f64) -> Result<RevivalConfig> {
        RevivalConfig::new(self.model()?, j, self.n_bar, self.n_trunc, self.n_min)
    }

    /// Header lines echoing every resolved parameter.
    pub fn header(&self, command: &str) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut h = vec![
            ("generator".to_string(), format!("revivalkit {}", env!("CARGO_PKG_VERSION"))),
            ("command".to_string(), command.to_string()),
            ("preset".to_string(), self.preset.clone().unwrap_or_else(|| "none".into())),
            ("a".to_string(), list(&self.a)),
            ("b".to_string(), self.b.to_string()),
            ("m".to_string(), self.m.to_string()),
        ];
        match self.energy {
            EnergyScale::Omega(w) => h.push(("omega".into(), w.to_string())),
            EnergyScale::RevivalTime(t) => {
                h.push(("t_rev".into(), t.to_string()));
                h.push(("omega".into(), self.omega().to_string()));
            }
        }
        h.extend([
            ("J".to_string(), list(&self.j)),
            ("n_bar".to_string(), self.n_bar.to_string()),
            ("n_trunc".to_string(), self.n_trunc.to_string()),
            ("n_min".to_string(), self.n_min.to_string()),
            ("omega0".to_string(), self.omega0().to_string()),
            ("p_max".to_string(), self.p_max.to_string()),
            ("q_max".to_string(), self.q_max.to_string()),
            (
                "t_span".to_string(),
                self.t_span.map_or_else(|| "default".into(), |t| t.to_string()),
            ),
            (
                "samples".to_string(),
                self.samples.map_or_else(|| "default".into(), |n| n.to_string()),
            ),
            ("allow_invalid_params".to_string(), self.allow_invalid_params.to_string()),
        ]);
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            let mut s = Settings::preset(name).unwrap();
            if name == "fig1-left" {
                s.allow_invalid_params = Some(true);
            }
            let cfg = s.resolve().unwrap();
            for a in &cfg.a {
                cfg.model_for(*a).unwrap();
            }
        }
        assert!(Settings::preset("fig9").is_err());
    }

    #[test]
    fn calibrated_omega() {
        let cfg = Settings::preset("fig3").unwrap().resolve().unwrap();
        assert!((cfg.omega() - 5.422_474_8e-4).abs() < 1e-10);
        let rc = cfg.revival(10.0).unwrap();
        assert!((rc.timescales().t_rev - PRESET_T_REV).abs() < 1e-9);
    }

    #[test]
    fn fig1_left_needs_override() {
        let cfg = Settings::preset("fig1-left").unwrap().resolve().unwrap();
        match cfg.model() {
            Err(Error::InvalidParameters { violations, .. }) => assert!(!violations.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn file_then_flags() {
        let file = Settings::from_text("# comment\na = 4.4\nb=-0.3333333333333333\nm = 6\nt_rev = 2896.825\nJ = 10, 20\n").unwrap();
        assert_eq!(file.j, Some(vec![10.0, 20.0]));
        let flags = Settings {
            omega: Some(1.0),
            ..Default::default()
        };
        let cfg = Settings::default().overlay(file).unwrap().overlay(flags).unwrap().resolve().unwrap();
        assert_eq!(cfg.energy, EnergyScale::Omega(1.0));
        assert_eq!(cfg.a, vec![4.4]);
    }

    #[test]
    fn ratios_parse() {
        let s = Settings::from_text("b = -1/3\nJ = 1/2, 10").unwrap();
        assert_eq!(s.b, Some(-1.0 / 3.0));
        assert_eq!(s.j, Some(vec![0.5, 10.0]));
        assert!(Settings::from_text("b = 1/x").is_err());
    }

    #[test]
    fn errors_are_actionable() {
        assert!(Settings::from_text("a 4.4").is_err());
        assert!(Settings::from_text("colour = red").is_err());
        let both = Settings {
            omega: Some(1.0),
            t_rev: Some(2.0),
            ..Default::default()
        };
        assert!(Settings::default().overlay(both).is_err());
        let none = Settings::from_text("a=1\nb=1\nm=0").unwrap();
        let msg = none.resolve().unwrap_err().to_string();
        assert!(msg.contains("omega"), "{msg}");
    }
}
