use std::path::{Path, PathBuf};

use tierbench::{Error, Result};

pub const CATALOG_ENV: &str = "QUTIBENCH_CATALOG";
const KEYS: [&str; 3] = ["catalog", "models", "out"];

/// Defaults read from a `key=value` file. Relative paths resolve against the
/// file's directory.
#[derive(Debug, Default)]
pub struct Config {
    pub catalog: Option<PathBuf>,
    pub models: Vec<String>,
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(""))).map_err(|e| e.in_file(path.display().to_string()))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut config = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected key=value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "catalog" => config.catalog = Some(base.join(value)),
                "out" => config.out = Some(base.join(value)),
                "models" => {
                    config.models = value
                        .split(',')
                        .map(str::trim)
                        .filter(|m| !m.is_empty())
                        .map(|m| resolve_model_spec(base, m))
                        .collect();
                }
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("unknown key `{other}` (expected one of {})", KEYS.join(", ")),
                    })
                }
            }
        }
        Ok(config)
    }
}

fn resolve_model_spec(base: &Path, spec: &str) -> String {
    let joined = base.join(spec);
    if joined.exists() {
        joined.display().to_string()
    } else {
        spec.to_string()
    }
}
