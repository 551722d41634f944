//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::{Error, Result};

/// Boundary-data ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GFamily {
    /// Independent standard normal node values, unit expected `L²` norm.
    Noise,
    /// Random amplitudes switched on at `t = T/2`.
    Step,
    /// Random combination of smooth modes vanishing at `t = 0`.
    Smooth,
}

impl FromStr for GFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "noise" => Ok(Self::Noise),
            "step" => Ok(Self::Step),
            "smooth" => Ok(Self::Smooth),
            other => Err(Error::Config(format!("unknown g-family '{other}' (noise|step|smooth)"))),
        }
    }
}

impl fmt::Display for GFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Noise => "noise",
            Self::Step => "step",
            Self::Smooth => "smooth",
        })
    }
}

/// Grid sizes of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alphas: Vec<f64>,
    pub horizon: f64,
    pub length: f64,
    /// Profile name (`constant`, `variable1`) or a CSV path.
    pub coefficients: String,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub p: Vec<usize>,
    pub g_family: GFamily,
    pub ensemble: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.5],
            horizon: 1.0,
            length: std::f64::consts::PI,
            coefficients: "constant".into(),
            m: vec![64],
            n: vec![64],
            k: vec![16],
            p: vec![16],
            g_family: GFamily::Smooth,
            ensemble: 1,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad value '{}' for '{key}'", v.trim())))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("bad value '{}' for '{key}'", value.trim())))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    /// Parse and validate. Unknown keys are rejected; missing keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim();
            match key.to_ascii_lowercase().as_str() {
                "alpha" => cfg.alphas = list(key, value)?,
                "t" => cfg.horizon = scalar(key, value)?,
                "l" => cfg.length = scalar(key, value)?,
                "coefficients" => cfg.coefficients = value.trim().to_string(),
                "m" => cfg.m = list(key, value)?,
                "n" => cfg.n = list(key, value)?,
                "k" => cfg.k = list(key, value)?,
                "p" => cfg.p = list(key, value)?,
                "g_family" => cfg.g_family = value.parse()?,
                "ensemble" => cfg.ensemble = scalar(key, value)?,
                "seed" => cfg.seed = scalar(key, value)?,
                "out" => cfg.out = PathBuf::from(value.trim()),
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn serialize(&self) -> String {
        format!(
            "alpha = {}\nT = {}\nL = {}\ncoefficients = {}\nM = {}\nN = {}\nK = {}\nP = {}\n\
             g_family = {}\nensemble = {}\nseed = {}\nout = {}\n",
            join(&self.alphas),
            self.horizon,
            self.length,
            self.coefficients,
            join(&self.m),
            join(&self.n),
            join(&self.k),
            join(&self.p),
            self.g_family,
            self.ensemble,
            self.seed,
            self.out.display()
        )
    }

    pub fn level_count(&self) -> usize {
        [self.m.len(), self.n.len(), self.k.len(), self.p.len()].into_iter().max().unwrap_or(0)
    }

    /// Per-level grid sizes; single-valued lists are broadcast.
    pub fn levels(&self) -> Vec<Level> {
        let pick = |v: &[usize], i: usize| if v.len() == 1 { v[0] } else { v[i] };
        (0..self.level_count())
            .map(|i| Level {
                m: pick(&self.m, i),
                n: pick(&self.n, i),
                k: pick(&self.k, i),
                p: pick(&self.p, i),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("alpha list is empty".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {a}")));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config("T and L must be positive".into()));
        }
        let count = self.level_count();
        for (name, v) in [("M", &self.m), ("N", &self.n), ("K", &self.k), ("P", &self.p)] {
            if v.is_empty() || (v.len() != 1 && v.len() != count) {
                return Err(Error::Config(format!("{name} must list one value or one per level")));
            }
        }
        for l in self.levels() {
            if l.m < 4 || l.n < 4 {
                return Err(Error::Config(format!("level too coarse: M = {}, N = {}", l.m, l.n)));
            }
            if l.k == 0 || l.k > l.m / 4 {
                return Err(Error::Config(format!("need 1 <= K <= M/4, got K = {} with M = {}", l.k, l.m)));
            }
            if l.p == 0 || l.p > l.n / 4 {
                return Err(Error::Config(format!("need 1 <= P <= N/4, got P = {} with N = {}", l.p, l.n)));
            }
        }
        if self.ensemble == 0 {
            return Err(Error::Config("ensemble must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# regularity sweep\n\
        alpha = 0.3, 0.5, 0.7\n\
        T = 1\n\
        L = 3.141592653589793\n\
        coefficients = variable1\n\
        M = 128, 256, 512   # per level\n\
        N = 128, 256, 512\n\
        K = 32, 64, 128\n\
        P = 32\n\
        g_family = noise\n\
        ensemble = 10\n\
        seed = 7\n\
        out = results/sweep\n";

    #[test]
    fn parses_lists_comments_and_broadcasts() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.alphas, vec![0.3, 0.5, 0.7]);
        assert_eq!(c.g_family, GFamily::Noise);
        assert_eq!(c.levels()[2], Level { m: 512, n: 512, k: 128, p: 32 });
        assert_eq!(c.out, PathBuf::from("results/sweep"));
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn rejects_invalid() {
        assert!(ExperimentConfig::parse("alpha = 1.0").is_err());
        assert!(ExperimentConfig::parse("M = 64\nK = 17").is_err());
        assert!(ExperimentConfig::parse("N = 64\nP = 17").is_err());
        assert!(ExperimentConfig::parse("ensemble = 0").is_err());
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("g_family = pink").is_err());
        assert!(ExperimentConfig::parse("M = 64, 128\nN = 64, 128, 256").is_err());
    }
}
