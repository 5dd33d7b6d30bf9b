use std::io::Write;
use std::path::{Path, PathBuf};

use oscillint_core::criteria::Verdict;
use oscillint_core::oracle::EmpiricalVerdict;
use oscillint_core::riccati::CertificateReport;
use serde::Serialize;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::config::ProblemConfig;
use crate::error::{CliError, Result};

/// Working grid actually used.
#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub t0: f64,
    pub horizon: f64,
    pub cells_per_unit: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ProblemConfig,
    pub grid: GridInfo,
}

/// Everything a command established, rendered as text or JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub exit_code: i32,
    pub verdict: Option<Verdict>,
    pub empirical: Option<EmpiricalVerdict>,
    pub certificates: Option<CertificateReport>,
    /// Command-specific results.
    pub details: Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Invalid(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    /// One `path = value` line per JSON leaf, under a short summary.
    pub fn to_text(&self) -> Result<String> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Invalid(e.to_string()))?;
        let mut out = format!(
            "{} {} {}\n",
            self.provenance.tool, self.provenance.version, self.command
        );
        match &self.verdict {
            Some(v) => out.push_str(&format!("outcome: {} (exit {})\n", v.outcome.as_str(), self.exit_code)),
            None => out.push_str(&format!("outcome: ran (exit {})\n", self.exit_code)),
        }
        if let Some(v) = &self.verdict {
            if let Some(f) = &v.failed_condition {
                out.push_str(&format!("failed condition: {f}\n"));
            }
            for note in &v.notes {
                out.push_str(&format!("note: {note}\n"));
            }
        }
        out.push_str("--\n");
        flatten(&value, "", &mut out);
        Ok(out)
    }

    /// Writes the text report to `path` and the JSON report to
    /// `<path>.json`, each atomically.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        write_atomic(path, self.to_text()?.as_bytes())?;
        let json = json_sibling(path);
        write_atomic(&json, self.to_json()?.as_bytes())?;
        Ok(json)
    }
}

pub fn json_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    path.with_file_name(name)
}

fn flatten(value: &Value, prefix: &str, out: &mut String) {
    let child = |key: &str| {
        if prefix.is_empty() {
            key.to_string()
        } else {
            format!("{prefix}.{key}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, &child(k), out);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{prefix} = [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &format!("{prefix}[{i}]"), out);
            }
        }
        v => out.push_str(&format!("{prefix} = {}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_lists_every_leaf() {
        let mut out = String::new();
        flatten(
            &json!({"a": {"b": 1.5, "c": "x"}, "d": [1, 2], "e": [{"f": null}]}),
            "",
            &mut out,
        );
        assert_eq!(out, "a.b = 1.5\na.c = x\nd = [1, 2]\ne[0].f = null\n");
    }

    #[test]
    fn sibling_appends_json() {
        assert_eq!(json_sibling(Path::new("out/report.txt")), PathBuf::from("out/report.txt.json"));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
