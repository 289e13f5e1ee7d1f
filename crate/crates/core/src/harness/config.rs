//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! rounds = 100000
//! test_bits = 1000
//! seed = 42
//! attack = general:0.5,0.5,rand
//! out = rounds.csv
//! summary = summary.csv
//! workers = 8
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::adversary::PnsVariant;
use crate::error::{Error, Result};
use crate::qstate::EquatorAngle;

/// Eve's basis angle: fixed, or drawn afresh every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaChoice {
    Fixed(EquatorAngle),
    PerRound,
}

impl FromStr for GammaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rand" {
            return Ok(GammaChoice::PerRound);
        }
        let v: f64 = s.parse().map_err(|_| Error::arg(format!("bad gamma '{s}'")))?;
        if !v.is_finite() {
            return Err(Error::arg(format!("bad gamma '{s}'")));
        }
        Ok(GammaChoice::Fixed(EquatorAngle::new(v)))
    }
}

impl fmt::Display for GammaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaChoice::Fixed(g) => write!(f, "{g}"),
            GammaChoice::PerRound => f.write_str("rand"),
        }
    }
}

/// The adversary model for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackSpec {
    None,
    General { c_x: f64, c_y: f64, gamma: GammaChoice },
    Intercept { gamma: GammaChoice },
    ImpersonateOneHome,
    ImpersonateTwoHomes,
    Pns(PnsVariant),
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let bad = || Error::arg(format!("unknown attack '{s}'"));
        match (kind, args) {
            ("none", "") => Ok(AttackSpec::None),
            ("general", args) => {
                let parts: Vec<&str> = args.split(',').collect();
                let [cx, cy, gamma] = parts[..] else {
                    return Err(Error::arg(format!("general attack needs cx,cy,gamma, got '{args}'")));
                };
                let overlap = |t: &str| -> Result<f64> {
                    let v: f64 = t.trim().parse().map_err(|_| Error::arg(format!("bad overlap '{t}'")))?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::Domain { value: v, domain: "[0, 1]" });
                    }
                    Ok(v)
                };
                Ok(AttackSpec::General { c_x: overlap(cx)?, c_y: overlap(cy)?, gamma: gamma.parse()? })
            }
            ("intercept", "") => Ok(AttackSpec::Intercept { gamma: GammaChoice::PerRound }),
            ("intercept", g) => Ok(AttackSpec::Intercept { gamma: g.parse()? }),
            ("impersonate", "one") => Ok(AttackSpec::ImpersonateOneHome),
            ("impersonate", "two") => Ok(AttackSpec::ImpersonateTwoHomes),
            ("pns", "3") => Ok(AttackSpec::Pns(PnsVariant::ThreePhoton)),
            ("pns", "4home") => Ok(AttackSpec::Pns(PnsVariant::FourHome)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::None => f.write_str("none"),
            AttackSpec::General { c_x, c_y, gamma } => write!(f, "general:{c_x},{c_y},{gamma}"),
            AttackSpec::Intercept { gamma } => write!(f, "intercept:{gamma}"),
            AttackSpec::ImpersonateOneHome => f.write_str("impersonate:one"),
            AttackSpec::ImpersonateTwoHomes => f.write_str("impersonate:two"),
            AttackSpec::Pns(PnsVariant::ThreePhoton) => f.write_str("pns:3"),
            AttackSpec::Pns(PnsVariant::FourHome) => f.write_str("pns:4home"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub rounds: u64,
    pub test_bits: u64,
    pub master_seed: u64,
    pub attack: AttackSpec,
    /// Per-round CSV.
    pub output_path: Option<PathBuf>,
    /// One-row CSV of the aggregate figures.
    pub summary_path: Option<PathBuf>,
    /// Worker threads; `None` lets the pool decide.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            rounds: 1000,
            test_bits: 100,
            master_seed: 0,
            attack: AttackSpec::None,
            output_path: None,
            summary_path: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::arg("rounds must be at least 1"));
        }
        if self.test_bits > self.rounds {
            return Err(Error::arg(format!(
                "test_bits ({}) exceeds rounds ({})",
                self.test_bits, self.rounds
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::arg("workers must be at least 1"));
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn merge_str(mut self, text: &str) -> Result<Self> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|_| parse_err(format!("'{key}' needs an integer, got '{v}'")));
            match key {
                "rounds" => self.rounds = int(value)?,
                "test_bits" => self.test_bits = int(value)?,
                "seed" => self.master_seed = int(value)?,
                "attack" => self.attack = value.parse().map_err(|e: Error| parse_err(e.to_string()))?,
                "out" => self.output_path = Some(PathBuf::from(value)),
                "summary" => self.summary_path = Some(PathBuf::from(value)),
                "workers" => {
                    self.workers = match value {
                        "auto" => None,
                        v => Some(int(v)? as usize),
                    }
                }
                _ => return Err(parse_err(format!("unknown key '{key}'"))),
            }
        }
        Ok(self)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::default().merge_str(&text)
    }
}
