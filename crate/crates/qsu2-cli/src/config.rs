//! Run configuration: defaults, flat key=value config file, flag overrides.

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: f64,
    pub t: f64,
    pub tolerance: f64,
    pub max_degree: u32,
    pub input_cap: u32,
    pub seed: u64,
    pub theta_grid: usize,
    pub start_cutoff: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 0.5,
            t: 0.5,
            tolerance: 1e-9,
            max_degree: 4,
            input_cap: 12,
            seed: 0,
            theta_grid: 64,
            start_cutoff: 60,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Apply `key = value` lines from a config file.
    pub fn apply_file(&mut self, path: &str) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{path}:{}: expected key=value", lineno + 1))?;
            self.apply_pair(key.trim(), value.trim())
                .with_context(|| format!("{path}:{}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_pair(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "q" => self.q = value.parse()?,
            "t" => self.t = value.parse()?,
            "tolerance" => self.tolerance = value.parse()?,
            "max_degree" => self.max_degree = value.parse()?,
            "input_cap" => self.input_cap = value.parse()?,
            "seed" => self.seed = value.parse()?,
            "theta_grid" => self.theta_grid = value.parse()?,
            "start_cutoff" => self.start_cutoff = value.parse()?,
            "cache_dir" => std::env::set_var("QSU2_CACHE_DIR", value),
            "format" => {
                self.format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => bail!("unknown format {other:?} (expected csv or json)"),
                }
            }
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            bail!("q must lie in (0, 1], got {}", self.q);
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            bail!("t must lie in (0, 1], got {}", self.t);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let dir = std::env::temp_dir().join(format!("qsu2-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# comment\nq = 0.7\nseed=42\nformat = csv\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(path.to_str().unwrap()).unwrap();
        assert_eq!(cfg.q, 0.7);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.format, OutputFormat::Csv);
        cfg.apply_pair("q", "0.9").unwrap();
        assert_eq!(cfg.q, 0.9);
        assert!(cfg.apply_pair("bogus", "1").is_err());
        let _ = std::fs::remove_dir_all(dir);
    }
}
