//! Run configuration: defaults, then a key=value file, then command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use f2lab_core::factors::CklProfile;
use f2lab_core::limits;

use crate::error::CliError;

pub const CONFIG_ENV: &str = "F2LAB_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown output format {s:?} (json|csv|text)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub enumeration_cap_m: u32,
    pub combo_cap_k: u32,
    /// `None` leaves the pool size to rayon.
    pub worker_count: Option<usize>,
    pub seed: u64,
    pub output_format: Format,
    pub ckl_kappa: u64,
    pub psi_budget: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            enumeration_cap_m: limits::DEFAULT_ENUMERATION_CAP,
            combo_cap_k: limits::DEFAULT_COMBO_CAP,
            worker_count: None,
            seed: 0,
            output_format: Format::Json,
            ckl_kappa: 1,
            psi_budget: 1_000_000,
        }
    }
}

fn positive<T: FromStr + PartialOrd + Default>(key: &str, v: &str) -> Result<T, String> {
    let x: T = v.parse().map_err(|_| format!("{key}: cannot parse {v:?}"))?;
    if x <= T::default() {
        return Err(format!("{key} must be positive"));
    }
    Ok(x)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "enumeration_cap_m" => self.enumeration_cap_m = positive(key, value)?,
            "combo_cap_k" => self.combo_cap_k = positive(key, value)?,
            "worker_count" => self.worker_count = Some(positive(key, value)?),
            "seed" => self.seed = value.parse().map_err(|_| format!("seed: cannot parse {value:?}"))?,
            "output_format" => self.output_format = value.parse()?,
            "ckl_kappa" => self.ckl_kappa = positive(key, value)?,
            "psi_budget" => self.psi_budget = positive(key, value)?,
            _ => return Err(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    /// Applies `key = value` lines. `#` starts a comment, blank lines are
    /// ignored, values may be wrapped in double quotes and a key may appear
    /// only once.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        let mut seen = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| format!("line {}: {msg}", n + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let key = key.trim();
            let mut value = value.trim();
            if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                value = &value[1..value.len() - 1];
            }
            if seen.contains(&key) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            seen.push(key);
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn profile(&self) -> CklProfile {
        CklProfile::new(self.ckl_kappa)
    }

    /// Pushes caps and pool size into the library.
    pub fn install(&self) -> Result<(), CliError> {
        limits::set_enumeration_cap(self.enumeration_cap_m).map_err(|e| CliError::Usage(e.to_string()))?;
        limits::set_combo_cap(self.combo_cap_k).map_err(|e| CliError::Usage(e.to_string()))?;
        if let Some(n) = self.worker_count {
            // A second call in the same process fails harmlessly.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\nenumeration_cap_m = 20\ncombo_cap_k=12\n\nworker_count = 2 # trailing\nseed = 7\noutput_format = \"text\"\nckl_kappa = 3\npsi_budget = 500\n",
        )
        .unwrap();
        assert_eq!(c.enumeration_cap_m, 20);
        assert_eq!(c.combo_cap_k, 12);
        assert_eq!(c.worker_count, Some(2));
        assert_eq!(c.seed, 7);
        assert_eq!(c.output_format, Format::Text);
        assert_eq!(c.ckl_kappa, 3);
        assert_eq!(c.psi_budget, 500);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nonsense").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("combo_cap_k = 0").is_err());
        assert!(c.apply_text("seed = 1\nseed = 2").unwrap_err().contains("duplicate"));
    }
}
