//! `key = value` run configuration.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use squeezamp::protocol::{make_msp, make_single_squeeze, validate_protocol};
use squeezamp::{ProtocolSpec, SegmentSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }
}

impl FromStr for Format {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            other => err(format!("format must be csv or tsv, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProtocolChoice {
    #[default]
    Single,
    Msp,
    Custom,
}

const KEYS: [&str; 14] = [
    "protocol",
    "alpha",
    "eta",
    "g",
    "tau",
    "T",
    "dim",
    "trotter_steps",
    "output_path",
    "format",
    "segments",
    "g_list",
    "T_list",
    "nbar_list",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub protocol: ProtocolChoice,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub g: Option<f64>,
    pub tau: Option<f64>,
    pub total_t: Option<f64>,
    /// 0 = sized automatically.
    pub dim: usize,
    /// 0 = no Trotter comparison.
    pub trotter_steps: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub segments: Option<PathBuf>,
    pub g_list: Option<Vec<f64>>,
    pub t_list: Option<Vec<f64>>,
    pub nbar_list: Option<Vec<f64>>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(format!("{key}: '{v}' is not a finite number")),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().or_else(|_| err(format!("{key}: '{v}' is not a non-negative integer")))
}

impl RunConfig {
    /// Parses config text. Relative paths are taken relative to `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key=value", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return err(format!("line {}: unknown key '{key}'", lineno + 1));
            }
            if !seen.insert(key.to_string()) {
                return err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
            match key {
                "protocol" => {
                    cfg.protocol = match value {
                        "single" => ProtocolChoice::Single,
                        "msp" => ProtocolChoice::Msp,
                        "custom" => ProtocolChoice::Custom,
                        other => return err(format!("protocol must be single, msp or custom, got '{other}'")),
                    }
                }
                "alpha" => cfg.alpha = Some(parse_f64(key, value)?),
                "eta" => cfg.eta = Some(parse_f64(key, value)?),
                "g" => cfg.g = Some(parse_f64(key, value)?),
                "tau" => cfg.tau = Some(parse_f64(key, value)?),
                "T" => cfg.total_t = Some(parse_f64(key, value)?),
                "dim" => cfg.dim = parse_usize(key, value)?,
                "trotter_steps" => cfg.trotter_steps = parse_usize(key, value)?,
                "output_path" => cfg.output_path = Some(base.join(value)),
                "format" => cfg.format = value.parse()?,
                "segments" => cfg.segments = Some(base.join(value)),
                "g_list" => cfg.g_list = Some(parse_list(key, value)?),
                "T_list" => cfg.t_list = Some(parse_list(key, value)?),
                "nbar_list" => cfg.nbar_list = Some(parse_list(key, value)?),
                _ => unreachable!("key checked above"),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).or_else(|e| err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta.unwrap_or(0.01)
    }

    /// Defaults: the single-squeeze point (g = 0.5, τ = 2, T = 4) or the
    /// multi-squeezing point (g = 0.8, τ = 1).
    pub fn protocol_spec(&self) -> Result<ProtocolSpec, ConfigError> {
        let spec = match self.protocol {
            ProtocolChoice::Single => {
                let g = self.g.unwrap_or(0.5);
                let t = self.total_t.unwrap_or(4.0);
                let tau = self.tau.unwrap_or(t / 2.0);
                make_single_squeeze(self.eta(), self.alpha(), g, tau, t).or_else(|e| err(e.to_string()))?
            }
            ProtocolChoice::Msp => {
                let g = self.g.unwrap_or(0.8);
                let tau = match (self.tau, self.total_t) {
                    (Some(tau), Some(t)) if (8.0 * tau - t).abs() > 1e-12 * t.abs() => {
                        return err(format!("msp needs T = 8 tau, got tau = {tau}, T = {t}"))
                    }
                    (Some(tau), _) => tau,
                    (None, Some(t)) => t / 8.0,
                    (None, None) => 1.0,
                };
                make_msp(self.eta(), self.alpha(), g, tau).or_else(|e| err(e.to_string()))?
            }
            ProtocolChoice::Custom => {
                let Some(path) = &self.segments else {
                    return err("protocol = custom needs segments = <file>");
                };
                let text = fs::read_to_string(path).or_else(|e| err(format!("cannot read {}: {e}", path.display())))?;
                ProtocolSpec::from_segments("custom", parse_segments(&text)?)
            }
        };
        let violations = validate_protocol(&spec);
        if !violations.is_empty() {
            return err(violations.join("; "));
        }
        Ok(spec)
    }
}

/// One segment per line: `eta sdf_sign alpha pd_sign g duration`.
pub fn parse_segments(text: &str) -> Result<Vec<SegmentSpec>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return err(format!(
                "segments line {}: expected 'eta sdf_sign alpha pd_sign g duration'",
                lineno + 1
            ));
        }
        let sign = |s: &str| -> Result<i8, ConfigError> {
            match s {
                "-1" => Ok(-1),
                "0" => Ok(0),
                "1" | "+1" => Ok(1),
                other => err(format!("segments line {}: sign must be -1, 0 or 1, got '{other}'", lineno + 1)),
            }
        };
        out.push(SegmentSpec {
            eta: parse_f64("eta", f[0])?,
            sdf_sign: sign(f[1])?,
            alpha: parse_f64("alpha", f[2])?,
            pd_sign: sign(f[3])?,
            g: parse_f64("g", f[4])?,
            duration: parse_f64("duration", f[5])?,
            field_provenance: None,
        });
    }
    if out.is_empty() {
        return err("segments file has no segments");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let text = "# P1\nprotocol = single\nalpha=1\neta = 0.01 # field\ng=0.5\nT=4\ntau=2\ndim=0\nformat=tsv\ng_list=0.1, 0.2,0.3\n";
        let c = RunConfig::parse(text, Path::new("/tmp")).unwrap();
        assert_eq!(c.format, Format::Tsv);
        assert_eq!(c.g_list, Some(vec![0.1, 0.2, 0.3]));
        let p = c.protocol_spec().unwrap();
        assert_eq!(p.segments.len(), 2);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(RunConfig::parse("alpah=1", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=1\nalpha=2", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha", Path::new(".")).is_err());
        assert!(RunConfig::parse("alpha=abc", Path::new(".")).is_err());
        assert!(RunConfig::parse("format=json", Path::new(".")).is_err());
        assert!(RunConfig::parse("dim=-3", Path::new(".")).is_err());
    }

    #[test]
    fn msp_defaults_and_consistency() {
        let c = RunConfig::parse("protocol=msp", Path::new(".")).unwrap();
        assert_eq!(c.protocol_spec().unwrap().total_t, 8.0);
        let c = RunConfig::parse("protocol=msp\nT=16", Path::new(".")).unwrap();
        assert_eq!(c.protocol_spec().unwrap().segments[0].duration, 2.0);
        let c = RunConfig::parse("protocol=msp\nT=16\ntau=1", Path::new(".")).unwrap();
        assert!(c.protocol_spec().is_err());
    }

    #[test]
    fn segment_lines() {
        let segs = parse_segments("0.01 1 1 1 0.5 2\n# free\n0.01 0 0 0 0 1\n").unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[1].sdf_sign, 0);
        assert!(parse_segments("0.01 2 1 1 0.5 2").is_err());
        assert!(parse_segments("").is_err());
    }
}
