//! Experiment configuration: a flat `key = value` file whose keys can be
//! overridden one by one.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `command` | `solve`, `convergence`, `decay`, `interp-check`, `quad-check` | none |
//! | `coefficient` | `constant`, `oscillatory` or `raster` | `oscillatory` |
//! | `value` | constant coefficient value | `1` |
//! | `epsilon` | oscillation parameter | `2^-5` |
//! | `raster` | raster file path | none |
//! | `rescale` | apply `1 + ln(1 + z)` to raster values | `true` |
//! | `source` | `point`, `point_pair` or `segment` | `point` |
//! | `source_params` | `x,y,f` / `x1,y1,f1,x2,y2,f2` / `x1,y1,x2,y2,f` | `0.5,0.5,1` |
//! | `alpha` | source exponents (list) | `0.5` |
//! | `beta` | weight exponents for decay and interp-check (list) | `0.5` |
//! | `H` | coarse mesh sizes (list, powers of two) | `2^-2,2^-3,2^-4,2^-5` |
//! | `h` | fine mesh size | `2^-7` |
//! | `k` | patch layers, or `global` | `3` |
//! | `decay_k` | layer counts of the decay study (list) | `1,2,3,4` |
//! | `node` | coarse node `x,y` of the decay study | `0.5,0.5` |
//! | `quad_depth` | grading depth of the weighted quadrature | `8` |
//! | `corrector_tol` | relative CG tolerance of corrector solves | `1e-9` |
//! | `reference_tol` | relative CG tolerance of the reference solve | `1e-10` |
//! | `samples` | random vectors for interp-check | `20` |
//! | `seed` | seed of the random vectors | `0` |
//! | `allow_endpoint` | accept endpoint exponents | `false` |
//! | `output` | CSV path | `<command>.csv` |
//!
//! Lines starting with `#` are comments. Mesh sizes accept `2^-n` or a
//! decimal power of two.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::coefficients::{load_raster, CoefficientField, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::geometry::{admissible_intervals, check_source_exponent, Point2, SingularSet};
use crate::mesh::MAX_LEVEL;
use crate::quadrature::QuadParams;

pub const KEYS: &[&str] = &[
    "command",
    "coefficient",
    "value",
    "epsilon",
    "raster",
    "rescale",
    "source",
    "source_params",
    "alpha",
    "beta",
    "H",
    "h",
    "k",
    "decay_k",
    "node",
    "quad_depth",
    "corrector_tol",
    "reference_tol",
    "samples",
    "seed",
    "allow_endpoint",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Convergence,
    Decay,
    InterpCheck,
    QuadCheck,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solve" => Self::Solve,
            "convergence" => Self::Convergence,
            "decay" => Self::Decay,
            "interp-check" => Self::InterpCheck,
            "quad-check" => Self::QuadCheck,
            other => {
                return Err(Error::config(format!(
                    "unknown command {other:?}; expected solve, convergence, decay, interp-check or quad-check"
                )))
            }
        })
    }
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Convergence => "convergence",
            Self::Decay => "decay",
            Self::InterpCheck => "interp-check",
            Self::QuadCheck => "quad-check",
        }
    }
}

/// Raw key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value, got {line:?}", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| e.context(format_args!("config file {}", path.display())))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(format!("unknown config key {key:?}")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSpec {
    Constant(f64),
    Oscillatory(f64),
    Raster { path: PathBuf, rescale: bool },
}

impl CoefficientSpec {
    pub fn build(&self) -> Result<CoefficientField<f64>> {
        match self {
            Self::Constant(v) => CoefficientField::constant(*v),
            Self::Oscillatory(e) => CoefficientField::oscillatory(*e),
            Self::Raster { path, rescale } => load_raster(path, *rescale),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub coefficient: CoefficientSpec,
    pub source: SingularSet<f64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub coarse_levels: Vec<u32>,
    pub fine_level: u32,
    pub k: Option<usize>,
    pub decay_k: Vec<usize>,
    pub node: Point2<f64>,
    pub quad: QuadParams,
    pub corrector_tol: f64,
    pub reference_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub allow_endpoint: bool,
    pub output: PathBuf,
}

fn parse_num<T: FromStr>(key: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse()
        .map_err(|e| Error::config(format!("{key}: cannot parse {s:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let v: Vec<T> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_num(key, t))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::config(format!("{key}: empty list")));
    }
    Ok(v)
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::config(format!("{key}: expected true or false, got {other:?}"))),
    }
}

/// Mesh level of a size given as `2^-n` or a decimal power of two.
pub fn parse_mesh_size(key: &str, s: &str) -> Result<u32> {
    let s = s.trim();
    let level = if let Some(e) = s.strip_prefix("2^-") {
        parse_num::<u32>(key, e)?
    } else {
        let h: f64 = parse_num(key, s)?;
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::config(format!("{key}: mesh size {h} must lie in (0, 1]")));
        }
        let l = -h.log2();
        if (l - l.round()).abs() > 1e-9 {
            return Err(Error::config(format!("{key}: mesh size {h} is not a power of two")));
        }
        l.round() as u32
    };
    if level > MAX_LEVEL {
        return Err(Error::config(format!(
            "{key}: mesh size 2^-{level} finer than the supported 2^-{MAX_LEVEL}"
        )));
    }
    Ok(level)
}

fn parse_source(kind: &str, params: &str) -> Result<SingularSet<f64>> {
    let p: Vec<f64> = parse_list("source_params", params)?;
    let want = |n: usize| -> Result<()> {
        if p.len() == n {
            Ok(())
        } else {
            Err(Error::config(format!(
                "source_params: {kind} source needs {n} numbers, got {}",
                p.len()
            )))
        }
    };
    match kind {
        "point" => {
            want(3)?;
            SingularSet::point(Point2::new(p[0], p[1]), p[2])
        }
        "point_pair" => {
            want(6)?;
            SingularSet::point_pair(Point2::new(p[0], p[1]), p[2], Point2::new(p[3], p[4]), p[5])
        }
        "segment" => {
            want(5)?;
            SingularSet::segment(Point2::new(p[0], p[1]), Point2::new(p[2], p[3]), p[4])
        }
        other => Err(Error::config(format!(
            "unknown source {other:?}; expected point, point_pair or segment"
        ))),
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let get = |k: &str, d: &'static str| raw.get(k).unwrap_or(d).to_string();
        let command: Command = raw
            .get("command")
            .ok_or_else(|| Error::config("missing command"))?
            .parse()?;
        let coefficient = match get("coefficient", "oscillatory").as_str() {
            "constant" => CoefficientSpec::Constant(parse_num("value", &get("value", "1"))?),
            "oscillatory" => CoefficientSpec::Oscillatory(match raw.get("epsilon") {
                Some(e) => parse_num("epsilon", e)?,
                None => DEFAULT_EPSILON,
            }),
            "raster" => CoefficientSpec::Raster {
                path: PathBuf::from(raw.get("raster").ok_or_else(|| Error::config("raster coefficient needs a raster path"))?),
                rescale: parse_bool("rescale", &get("rescale", "true"))?,
            },
            other => {
                return Err(Error::config(format!(
                    "unknown coefficient {other:?}; expected constant, oscillatory or raster"
                )))
            }
        };
        let source = parse_source(&get("source", "point"), &get("source_params", "0.5,0.5,1"))?;
        let allow_endpoint = parse_bool("allow_endpoint", &get("allow_endpoint", "false"))?;
        let alphas: Vec<f64> = parse_list("alpha", &get("alpha", "0.5"))?;
        let betas: Vec<f64> = parse_list("beta", &get("beta", "0.5"))?;
        let mut coarse_levels = get("H", "2^-2,2^-3,2^-4,2^-5")
            .split(',')
            .map(|s| parse_mesh_size("H", s))
            .collect::<Result<Vec<_>>>()?;
        coarse_levels.sort_unstable();
        coarse_levels.dedup();
        let fine_level = parse_mesh_size("h", &get("h", "2^-7"))?;
        let k = match get("k", "3").as_str() {
            "global" => None,
            s => Some(parse_num("k", s)?),
        };
        let node: Vec<f64> = parse_list("node", &get("node", "0.5,0.5"))?;
        if node.len() != 2 {
            return Err(Error::config("node: expected x,y"));
        }
        let depth: usize = parse_num("quad_depth", &get("quad_depth", "8"))?;
        let cfg = Self {
            command,
            coefficient,
            source,
            alphas,
            betas,
            coarse_levels,
            fine_level,
            k,
            decay_k: parse_list("decay_k", &get("decay_k", "1,2,3,4"))?,
            node: Point2::new(node[0], node[1]),
            quad: QuadParams {
                depth,
                ..QuadParams::default()
            },
            corrector_tol: parse_num("corrector_tol", &get("corrector_tol", "1e-9"))?,
            reference_tol: parse_num("reference_tol", &get("reference_tol", "1e-10"))?,
            samples: parse_num("samples", &get("samples", "20"))?,
            seed: parse_num("seed", &get("seed", "0"))?,
            allow_endpoint,
            output: PathBuf::from(raw.get("output").map_or_else(|| format!("{}.csv", command.name()), str::to_string)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let ell = self.source.ell();
        if matches!(self.command, Command::Solve | Command::Convergence) {
            for &a in &self.alphas {
                check_source_exponent(a, ell, self.allow_endpoint)?;
            }
        }
        if matches!(self.command, Command::Decay | Command::InterpCheck | Command::QuadCheck) {
            let iv = admissible_intervals(2, ell)?.muckenhoupt;
            for &b in &self.betas {
                let ok = iv.contains(b) || (self.allow_endpoint && iv.contains_closed(b));
                if !ok {
                    let hint = if iv.contains_closed(b) {
                        " (endpoint values require --allow-endpoint)"
                    } else {
                        ""
                    };
                    return Err(Error::config(format!(
                        "beta={b} outside the Muckenhoupt interval {iv} for ell={ell}{hint}"
                    )));
                }
            }
        }
        if let Some(&l) = self.coarse_levels.iter().find(|&&l| l >= self.fine_level) {
            return Err(Error::config(format!(
                "every H must be coarser than h: H=2^-{l} is not coarser than h=2^-{}",
                self.fine_level
            )));
        }
        if self.k == Some(0) {
            return Err(Error::config("k must be at least 1 (or global)"));
        }
        if self.decay_k.contains(&0) {
            return Err(Error::config("decay_k entries must be at least 1"));
        }
        for (name, tol) in [("corrector_tol", self.corrector_tol), ("reference_tol", self.reference_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::config(format!("{name} must lie in (0, 1), got {tol}")));
            }
        }
        if !(0.0..=1.0).contains(&self.node.x) || !(0.0..=1.0).contains(&self.node.y) {
            return Err(Error::config("node must lie in the unit square"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_raw(&RawConfig::parse(text)?)
    }

    #[test]
    fn defaults_and_overrides() {
        let mut raw = RawConfig::parse("command = convergence\n# comment\nalpha = 0.25, 0.5\n").unwrap();
        let c = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(c.alphas, vec![0.25, 0.5]);
        assert_eq!((c.coarse_levels.clone(), c.fine_level, c.k), (vec![2, 3, 4, 5], 7, Some(3)));
        raw.set("alpha", "0.75").unwrap();
        raw.set("H", "0.25,2^-3").unwrap();
        let c = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(c.alphas, vec![0.75]);
        assert_eq!(c.coarse_levels, vec![2, 3]);
        assert_eq!(c.output, PathBuf::from("convergence.csv"));
    }

    #[test]
    fn alpha_interval_gating() {
        let e = cfg("command = convergence\nalpha = 1.0").unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("(0, 1)") && e.to_string().contains("--allow-endpoint"));
        assert!(cfg("command = convergence\nalpha = 1.0\nallow_endpoint = true").is_ok());
        assert!(cfg("command = convergence\nalpha = 0.5").is_ok());
        assert!(cfg("command = convergence\nsource = segment\nsource_params = 0.375,0.5,0.625,0.5,1\nalpha = -0.25").is_ok());
        let e = cfg("command = convergence\nsource = segment\nsource_params = 0.375,0.5,0.625,0.5,1\nalpha = 0.6").unwrap_err();
        assert!(e.to_string().contains("(-0.5, 0.5)"));
    }

    #[test]
    fn beta_interval_gating() {
        let e = cfg("command = decay\nbeta = 1.2").unwrap_err();
        assert!(e.to_string().contains("(-1, 1)"));
        assert!(cfg("command = decay\nbeta = -0.9").is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(cfg("command = convergence\nH = 2^-7\nh = 2^-7").unwrap_err().to_string().contains("coarser"));
        assert!(cfg("command = fly").is_err());
        assert!(cfg("alpha = 0.5").is_err());
        assert!(cfg("command = solve\nH = 0.3").is_err());
        assert!(cfg("command = solve\nsource_params = 1.5,0.5,1").is_err());
        assert!(cfg("command = solve\nsource = segment").is_err());
        assert!(RawConfig::parse("nonsense").is_err());
        assert!(RawConfig::parse("colour = red").is_err());
        assert!(cfg("command = solve\nk = 0").is_err());
        assert!(cfg("command = solve\nk = global").unwrap().k.is_none());
    }
}
