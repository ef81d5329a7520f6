//! Flat JSON config files, merged into the command line.
//!
//! Each key is a flag name without the leading dashes. The entries are
//! spliced in right after the subcommand, so flags given on the command line
//! come later and win.

use std::ffi::OsString;
use std::path::Path;

use serde_json::{Map, Value};

/// Finds `--config <path>` or `--config=<path>` among the arguments.
fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn render(key: &str, value: &Value) -> Result<String, String> {
    match value {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        Value::Array(items) => {
            // weight specs contain commas, so their lists use ';'
            let sep = if key.starts_with("weight") { ";" } else { "," };
            items
                .iter()
                .map(|v| render(key, v))
                .collect::<Result<Vec<_>, _>>()
                .map(|parts| parts.join(sep))
        }
        other => Err(format!("config key {key:?}: unsupported value {other}")),
    }
}

/// Flag tokens for the entries of a config object.
pub fn config_args(path: &Path) -> Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
    let map: Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut out = Vec::with_capacity(2 * map.len());
    for (key, value) in &map {
        if key == "config" {
            return Err("a config file cannot name another config file".into());
        }
        out.push(format!("--{key}").into());
        out.push(render(key, value)?.into());
    }
    Ok(out)
}

/// The command line with the config entries spliced in after the subcommand.
pub fn merged_args(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let extra = config_args(Path::new(&path))?;
    let split = 2.min(args.len());
    let mut out = args[..split].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[split..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_entries_come_before_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"alpha": 0.5, "weight-x": ["1", "power:0.5@0.1"], "grid": [32, 64]}"#).unwrap();
        let p = path.to_str().unwrap();
        let merged = merged_args(os(&["wfrac", "sweep", "--config", p, "--alpha", "0.7"])).unwrap();
        assert_eq!(
            merged,
            os(&["wfrac", "sweep", "--alpha", "0.5", "--grid", "32,64", "--weight-x", "1;power:0.5@0.1", "--config", p, "--alpha", "0.7"])
        );
    }

    #[test]
    fn bad_configs_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"alpha": true}"#).unwrap();
        assert!(merged_args(os(&["wfrac", "solve", "--config", path.to_str().unwrap()])).is_err());
        std::fs::write(&path, "[1, 2]").unwrap();
        assert!(merged_args(os(&["wfrac", "solve", "--config", path.to_str().unwrap()])).is_err());
        assert!(merged_args(os(&["wfrac", "solve", "--config=/nonexistent.json"])).is_err());
        assert_eq!(merged_args(os(&["wfrac", "solve"])).unwrap(), os(&["wfrac", "solve"]));
    }
}
