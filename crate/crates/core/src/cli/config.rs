//! Run configuration: JSON schema, validation, and resolution into toolkit objects.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::gabor::WindowBundle;
use crate::lattice::{fundamental_domain, lattice_from_generators, separable_lattice, Lattice};
use crate::locop::{symbols, Strategy};
use crate::modnorm::{EnsembleSpec, Family, NormSpec};
use crate::phase_space::{box_window, gaussian_window, impulse_window, PhasePoint, Signal, TFMatrix, Window};

use super::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WindowSpec {
    Gaussian,
    Box { width: usize },
    Impulse,
    /// A Signal JSON file; normalized to unit norm.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LatticeSpec {
    Full,
    Trivial,
    Separable { a: usize, b: usize },
    Generators { generators: Vec<[i64; 2]> },
}

/// Either a named generator string or an inline TFMatrix.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Named(String),
    Matrix(TFMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Modulation,
    Localization,
    Coefficient,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "all_families")]
    pub mix: Vec<Family>,
}

fn all_families() -> Vec<Family> {
    Family::ALL.to_vec()
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComparePair {
    pub a: NormKind,
    pub b: NormKind,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualSpec {
    Canonical,
    Zero,
}

/// Top-level configuration; unknown keys are rejected.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default)]
    pub window: Option<WindowSpec>,
    /// Multi-window bundle; defaults to the single `window`.
    #[serde(default)]
    pub windows: Option<Vec<WindowSpec>>,
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub norm: Option<NormSpec>,
    #[serde(default)]
    pub ensemble: Option<EnsembleConfig>,
    /// Signal JSON file (one Signal or an array of Signals), relative to the config file.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub strategy: Option<Strategy>,
    #[serde(default)]
    pub dual: Option<DualSpec>,
    #[serde(default)]
    pub compare: Option<ComparePair>,
    /// Base directory for relative paths; set from the config file location.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.n < 2 {
            return Err(config_err("n must be at least 2"));
        }
        Ok(cfg)
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() { p.to_path_buf() } else { self.base_dir.join(p) }
    }

    fn build_window(&self, spec: &WindowSpec) -> Result<Window, CliError> {
        let n = self.n;
        match spec {
            WindowSpec::Gaussian => Ok(gaussian_window(n)),
            WindowSpec::Impulse => Ok(impulse_window(n)),
            WindowSpec::Box { width } => {
                if *width == 0 || *width > n {
                    Err(config_err(format!("box width {width} must be in 1..={n}")))
                } else {
                    Ok(box_window(n, *width))
                }
            }
            WindowSpec::File { path } => {
                let s: Signal = read_json(&self.resolve_path(path))?;
                if s.n() != n {
                    return Err(CliError::Dimension(format!("window file has length {}, expected {n}", s.n())));
                }
                Window::unit(s).map_err(CliError::from)
            }
        }
    }

    pub fn window(&self) -> Result<Window, CliError> {
        self.build_window(self.window.as_ref().unwrap_or(&WindowSpec::Gaussian))
    }

    pub fn bundle(&self) -> Result<WindowBundle, CliError> {
        match &self.windows {
            Some(specs) if !specs.is_empty() => {
                let ws = specs.iter().map(|s| self.build_window(s)).collect::<Result<Vec<_>, _>>()?;
                WindowBundle::new(ws).map_err(CliError::from)
            }
            Some(_) => Err(config_err("windows must not be empty")),
            None => Ok(WindowBundle::single(self.window()?)),
        }
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        let n = self.n;
        let spec = self.lattice.as_ref().ok_or_else(|| config_err("missing lattice"))?;
        let lat = match spec {
            LatticeSpec::Full => separable_lattice(n, 1, 1),
            LatticeSpec::Trivial => lattice_from_generators(n, &[PhasePoint::ORIGIN]),
            LatticeSpec::Separable { a, b } => separable_lattice(n, *a, *b),
            LatticeSpec::Generators { generators } => {
                let g: Vec<PhasePoint> = generators.iter().map(|g| PhasePoint::new(g[0], g[1], n)).collect();
                lattice_from_generators(n, &g)
            }
        };
        lat.map_err(|e| config_err(e.to_string()))
    }

    pub fn symbol(&self, lattice: Option<&Lattice>) -> Result<TFMatrix, CliError> {
        let spec = self.symbol.as_ref().ok_or_else(|| config_err("missing symbol"))?;
        match spec {
            SymbolSpec::Matrix(m) => {
                if m.n() != self.n {
                    return Err(CliError::Dimension(format!("symbol is {0}x{0}, expected N={1}", m.n(), self.n)));
                }
                crate::locop::validate_symbol(m).map_err(|e| config_err(e.to_string()))?;
                Ok(m.clone())
            }
            SymbolSpec::Named(s) => parse_named_symbol(s, self.n, lattice),
        }
    }

    pub fn norm(&self) -> Result<NormSpec, CliError> {
        let spec = self.norm.ok_or_else(|| config_err("missing norm"))?;
        spec.validate(self.n).map_err(|e| config_err(e.to_string()))?;
        Ok(spec)
    }

    pub fn ensemble(&self, seed_override: Option<u64>) -> Result<(EnsembleSpec, u64), CliError> {
        let e = self.ensemble.as_ref().ok_or_else(|| config_err("missing ensemble"))?;
        if e.count == 0 || e.mix.is_empty() {
            return Err(config_err("ensemble must have a positive count and a nonempty mix"));
        }
        Ok((EnsembleSpec { count: e.count, mix: e.mix.clone() }, seed_override.unwrap_or(e.seed)))
    }

    /// Input signals; a single Signal file yields one signal.
    pub fn input_signals(&self) -> Result<Vec<Signal>, CliError> {
        let path = self.input.as_ref().ok_or_else(|| config_err("missing input"))?;
        let path = self.resolve_path(path);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| config_err(format!("cannot read input {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| config_err(format!("invalid input {}: {e}", path.display())))?;
        let signals: Vec<Signal> = if value.is_array() {
            serde_json::from_value(value)
        } else {
            serde_json::from_value(value).map(|s| vec![s])
        }
        .map_err(|e| config_err(format!("invalid signal in {}: {e}", path.display())))?;
        for s in &signals {
            if s.n() != self.n {
                return Err(CliError::Dimension(format!("input signal has length {}, expected {}", s.n(), self.n)));
            }
        }
        Ok(signals)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("invalid {}: {e}", path.display())))
}

fn parse_numbers(args: &str, expected: usize, name: &str) -> Result<Vec<f64>, CliError> {
    let nums = args
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| config_err(format!("{name}: cannot parse arguments {args:?}")))?;
    if nums.len() != expected {
        return Err(config_err(format!("{name} takes {expected} arguments, got {}", nums.len())));
    }
    Ok(nums)
}

fn as_index(v: f64, name: &str) -> Result<usize, CliError> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(config_err(format!("{name}: {v} is not a nonnegative integer")))
    }
}

/// `"indicator-box k0,l0,w,h"`, `"gaussian-bump k,l,width"` or `"fundamental-cell"`.
pub fn parse_named_symbol(s: &str, n: usize, lattice: Option<&Lattice>) -> Result<TFMatrix, CliError> {
    let s = s.trim();
    let (name, args) = s.split_once(' ').unwrap_or((s, ""));
    match name {
        "indicator-box" => {
            let v = parse_numbers(args, 4, name)?;
            let v: Vec<usize> = v.iter().map(|&x| as_index(x, name)).collect::<Result<_, _>>()?;
            if v[2] == 0 || v[3] == 0 || v[2] > n || v[3] > n {
                return Err(config_err(format!("{name}: box size must be in 1..={n}")));
            }
            Ok(symbols::indicator_box(n, v[0], v[1], v[2], v[3]))
        }
        "gaussian-bump" => {
            let v = parse_numbers(args, 3, name)?;
            if !(v[2] > 0.0) {
                return Err(config_err(format!("{name}: width must be positive")));
            }
            let center = PhasePoint::new(as_index(v[0], name)? as i64, as_index(v[1], name)? as i64, n);
            Ok(symbols::gaussian_bump(n, center, v[2]))
        }
        "fundamental-cell" => {
            if !args.trim().is_empty() {
                return Err(config_err("fundamental-cell takes no arguments"));
            }
            let lat = lattice.ok_or_else(|| config_err("fundamental-cell needs a lattice"))?;
            Ok(symbols::fundamental_cell(&fundamental_domain(lat)))
        }
        other => Err(config_err(format!("unknown symbol generator {other:?}"))),
    }
}
