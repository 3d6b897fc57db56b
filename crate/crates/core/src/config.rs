//! Run configuration files and sweep expressions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::composite::CompositePulse;
use crate::error::{Error, Result};
use crate::experiments::{ScanSpec, Scenario, ScenarioOptions, Sweep};
use crate::ion::{LevelScheme, NoiseModel};

/// Upper bound on the number of points a sweep expression may expand to.
pub const MAX_SWEEP_POINTS: usize = 1_000_000;

fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    let bad = || Error::Parse(format!("invalid number `{t}`"));
    let value = if let Some(coef) = t.strip_suffix("pi") {
        let c = match coef.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        c * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Expands a sweep expression.
///
/// * `a..b`: integers from `a` to `b` inclusive
/// * `a..b:n`: `n` evenly spaced points from `a` to `b` inclusive
/// * `v1,v2,...`: an explicit list
///
/// Numbers may carry a `pi` suffix (`2pi`, `0.5pi`, `pi`).
pub fn parse_sweep(expr: &str) -> Result<Vec<f64>> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(Error::Parse("empty sweep expression".into()));
    }
    if let Some((lo, rest)) = expr.split_once("..") {
        let lo = parse_number(lo)?;
        let (hi, count) = match rest.split_once(':') {
            Some((hi, n)) => {
                let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("invalid point count `{}`", n.trim())))?;
                (parse_number(hi)?, Some(n))
            }
            None => (parse_number(rest)?, None),
        };
        return match count {
            Some(0) => Err(Error::Parse("sweep needs at least one point".into())),
            Some(n) if n > MAX_SWEEP_POINTS => Err(Error::Parse(format!("sweep has more than {MAX_SWEEP_POINTS} points"))),
            Some(1) => Ok(vec![lo]),
            Some(n) => {
                let step = (hi - lo) / (n - 1) as f64;
                Ok((0..n).map(|k| if k + 1 == n { hi } else { lo + step * k as f64 }).collect())
            }
            None => {
                if lo.fract() != 0.0 || hi.fract() != 0.0 {
                    return Err(Error::Parse(format!("`{expr}` needs integer bounds or a point count (`a..b:n`)")));
                }
                if hi < lo {
                    return Err(Error::Parse(format!("range `{expr}` is empty")));
                }
                let n = hi - lo + 1.0;
                if n > MAX_SWEEP_POINTS as f64 {
                    return Err(Error::Parse(format!("sweep has more than {MAX_SWEEP_POINTS} points")));
                }
                Ok((0..n as usize).map(|k| lo + k as f64).collect())
            }
        };
    }
    let values = expr.split(',').map(parse_number).collect::<Result<Vec<_>>>()?;
    if values.len() > MAX_SWEEP_POINTS {
        return Err(Error::Parse(format!("sweep has more than {MAX_SWEEP_POINTS} points")));
    }
    Ok(values)
}

/// A sweep given either as an expression or as explicit values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepInput {
    Expr(String),
    Values(Vec<f64>),
}

impl SweepInput {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            SweepInput::Expr(e) => parse_sweep(e),
            SweepInput::Values(v) => Ok(v.clone()),
        }
    }
}

/// Scan configuration as stored on disk. Every field is optional so that a
/// file and command-line flags can be layered with [`RunConfig::merge`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: Option<PathBuf>,
    pub noise: Option<PathBuf>,
    pub scenario: Option<Scenario>,
    pub sweep: Option<SweepInput>,
    pub sequence: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub label: Option<String>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub options: ScenarioOptions,
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        with_path(path, Self::from_json(&read_file(path)?))
    }

    /// Fields set in `overrides` replace those in `self`.
    pub fn merge(mut self, overrides: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if overrides.$f.is_some() { self.$f = overrides.$f; } )* };
        }
        take!(scheme, noise, scenario, sweep, sequence, output_dir, label, seed, shots);
        let o = overrides.options;
        let s = &mut self.options;
        s.noiseless |= o.noiseless;
        macro_rules! take_opt {
            ($($f:ident),*) => { $( if o.$f.is_some() { s.$f = o.$f; } )* };
        }
        take_opt!(sequence, aux_level, method, echo, probe_duration, dressing_rabi, branch, pump_pulse, repump);
        self
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("results"))
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| "run".into())
    }

    /// Resolves files and defaults into a validated scan spec.
    pub fn to_scan_spec(&self) -> Result<ScanSpec> {
        let scenario = self.scenario.ok_or_else(|| Error::InvalidArgument("no scenario given".into()))?;
        let mut spec = ScanSpec::new(scenario);
        if let Some(p) = &self.scheme {
            spec.scheme = with_path(p, LevelScheme::from_json(&read_file(p)?))?;
        }
        if let Some(p) = &self.noise {
            spec.noise = with_path(p, NoiseModel::from_json(&read_file(p)?))?;
        }
        if let Some(s) = &self.sweep {
            spec.sweep = Sweep {
                parameter: scenario.axis().0.into(),
                values: s.values()?,
            };
        }
        spec.seed = self.seed.unwrap_or(0);
        spec.shots = self.shots.unwrap_or(0);
        spec.options = self.options.clone();
        if let Some(p) = &self.sequence {
            spec.options.sequence = Some(with_path(p, CompositePulse::from_json(&read_file(p)?))?);
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integer_range() {
        assert_eq!(parse_sweep("1..16").unwrap().len(), 16);
        assert_eq!(parse_sweep("0..0").unwrap(), vec![0.0]);
        assert!(parse_sweep("3..1").is_err());
        assert!(parse_sweep("0.5..2").is_err());
    }

    #[test]
    fn counted_range_with_pi() {
        let v = parse_sweep("0..2pi:5").unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[4], 2.0 * PI);
        assert!((v[2] - PI).abs() < 1e-15);
        assert!(parse_sweep("0..1:0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_sweep("1, 2.5,-pi").unwrap(), vec![1.0, 2.5, -PI]);
        assert!(parse_sweep("1,,2").is_err());
        assert!(parse_sweep("").is_err());
        assert!(parse_sweep("inf").is_err());
    }

    #[test]
    fn oversized_rejected() {
        assert!(parse_sweep("0..10000000").is_err());
        assert!(parse_sweep("0..1:10000000").is_err());
    }

    #[test]
    fn merge_prefers_overrides() {
        let base = RunConfig {
            seed: Some(1),
            label: Some("a".into()),
            ..Default::default()
        };
        let over = RunConfig {
            seed: Some(2),
            ..Default::default()
        };
        let m = base.merge(over);
        assert_eq!(m.seed, Some(2));
        assert_eq!(m.label.as_deref(), Some("a"));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(RunConfig::from_json(r#"{"sede": 3}"#).is_err());
        let c = RunConfig::from_json(r#"{"scenario": "pump_convergence", "sweep": "1..4"}"#).unwrap();
        assert_eq!(c.to_scan_spec().unwrap().sweep.values.len(), 4);
    }

    #[test]
    fn missing_file_names_path() {
        let c = RunConfig {
            scenario: Some(Scenario::MeasureFidelity),
            scheme: Some(PathBuf::from("/nonexistent/scheme.json")),
            ..Default::default()
        };
        let e = c.to_scan_spec().unwrap_err().to_string();
        assert!(e.contains("/nonexistent/scheme.json"), "{e}");
    }
}
