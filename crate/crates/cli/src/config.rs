//! Optional defaults file: `key=value` lines for the three numeric knobs
//! that several subcommands share. Flags always win over the file; the file
//! wins over the built-in values.

use std::fs;
use std::path::Path;

pub const ENV_VAR: &str = "ACTNET_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    /// Deviation bound used by comparisons.
    pub tol: f64,
    /// Uniform grid size for comparisons.
    pub samples: usize,
    /// Sample count for curve read-back when no exact path exists.
    pub resolution: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            tol: 1e-9,
            samples: 10_001,
            resolution: 1_001,
        }
    }
}

/// Loads defaults from `path`, else from the file named by `ACTNET_CONFIG`,
/// else returns the built-ins. A named file that is missing or malformed is
/// an error; silence would change tolerances behind the caller's back.
pub fn load(path: Option<&Path>) -> Result<Defaults, Box<dyn std::error::Error>> {
    let chosen = match path {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(ENV_VAR).map(Into::into),
    };
    let Some(file) = chosen else {
        return Ok(Defaults::default());
    };
    let text = fs::read_to_string(&file)
        .map_err(|e| format!("config {}: {e}", file.display()))?;
    parse(&text).map_err(|e| format!("config {}: {e}", file.display()).into())
}

fn parse(text: &str) -> Result<Defaults, String> {
    let mut d = Defaults::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value", lineno + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "tol" => {
                d.tol = value
                    .parse::<f64>()
                    .ok()
                    .filter(|t| t.is_finite() && *t >= 0.0)
                    .ok_or_else(|| format!("line {}: tol must be a finite number >= 0", lineno + 1))?;
            }
            "samples" => {
                d.samples = value
                    .parse::<usize>()
                    .ok()
                    .filter(|s| *s >= 2)
                    .ok_or_else(|| format!("line {}: samples must be an integer >= 2", lineno + 1))?;
            }
            "resolution" => {
                d.resolution = value
                    .parse::<usize>()
                    .ok()
                    .filter(|r| *r >= 2)
                    .ok_or_else(|| {
                        format!("line {}: resolution must be an integer >= 2", lineno + 1)
                    })?;
            }
            other => return Err(format!("line {}: unknown key '{other}'", lineno + 1)),
        }
    }
    Ok(d)
}
