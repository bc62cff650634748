use cbop_core::moments::{build_table, MomentTable, TableDocument};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::write_json;

pub const MOMENTS_SCHEMA: &str = "cbop.moments-export/1";

#[derive(Serialize)]
struct Export<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    table: TableDocument,
}

/// Builds the table at the first grid time and writes it; the file is read
/// back and compared before returning.
pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let t = cfg.times()?.remove(0);
    let params = cfg.params_at(t)?;
    let table = build_table(&params, cfg.run.n_max, cfg.run.deriv_depth)?;
    let path = cfg.out_dir().join("moments.json");
    write_json(&path, &Export { schema: MOMENTS_SCHEMA, config: cfg, table: table.to_document() })?;
    let back = read_table(&path)?;
    if back != table {
        return Err(CliError::Failed(format!("{} does not reproduce the table", path.display())));
    }
    log::info!("moment table {}x{} round-trips exactly", table.rows(), table.cols());
    Ok(())
}

/// Reads the table out of an exported file.
pub fn read_table(path: &std::path::Path) -> CliResult<MomentTable> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Io(e.to_string()))?;
    let doc: TableDocument =
        serde_json::from_value(v["table"].clone()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(MomentTable::from_document(&doc)?)
}
