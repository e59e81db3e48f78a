//! Report assembly and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use wickrot::analysis::{sort_rows, TableRow};
use wickrot::clifford::CliffordSuite;

use crate::config::Settings;
use crate::tasks::ModelReport;

pub const SCHEMA: &str = "wickrot-report/1";

#[derive(Debug, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema: &'static str,
    pub version: &'static str,
    /// RFC 3339; the only field that differs between identical runs
    pub generated_at: String,
    pub task: &'static str,
    pub config: &'a Settings,
    pub models: Vec<ModelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clifford: Option<Vec<CliffordSuite>>,
    pub summary: Summary,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn zeta_csv(rows: &mut [TableRow]) -> Result<Vec<u8>, csv::Error> {
    sort_rows(rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows.iter() {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `report.json` and, when any zeta table was computed, `zeta.csv`.
pub fn write_outputs(dir: &Path, json: &str, rows: &mut [TableRow]) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let p = dir.join("report.json");
    write_atomic(&p, json.as_bytes()).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    if !rows.is_empty() {
        let bytes = zeta_csv(rows).map_err(|e| format!("cannot encode zeta table: {e}"))?;
        let p = dir.join("zeta.csv");
        write_atomic(&p, &bytes).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}
