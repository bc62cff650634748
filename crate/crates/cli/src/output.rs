use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliResult;

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value).expect("reports serialise");
    fs::write(path, text + "\n")?;
    log::info!("wrote {}", path.display());
    Ok(())
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    log::info!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
