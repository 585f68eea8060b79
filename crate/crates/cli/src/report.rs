use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;

/// A CSV table produced by a command.
pub struct Table {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

impl Table {
    pub fn build(name: &'static str, fill: impl FnOnce(&mut Vec<u8>) -> roughform::Result<()>) -> Result<Table> {
        let mut bytes = Vec::new();
        fill(&mut bytes)?;
        Ok(Table { name, bytes })
    }
}

/// Prints the JSON report and, with `--out`, writes it next to the tables.
///
/// CSV files start with a `# config:` comment line. Only the `metadata`
/// key of the JSON report varies between identical runs.
pub fn emit<T: Serialize>(cfg: &RunConfig, result: &T, tables: &[Table]) -> Result<()> {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = json!({
        "config": cfg,
        "result": result,
        "metadata": { "timestamp": stamp, "version": env!("CARGO_PKG_VERSION") },
    });
    let text = serde_json::to_string_pretty(&doc)?;
    println!("{text}");
    let Some(dir) = &cfg.out else { return Ok(()) };
    let json_path = dir.join(format!("{}.json", cfg.command));
    std::fs::write(&json_path, format!("{text}\n")).with_context(|| format!("writing {}", json_path.display()))?;
    let header = format!("# config: {}\n", serde_json::to_string(cfg)?);
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let mut f = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        f.write_all(header.as_bytes())?;
        f.write_all(&t.bytes)?;
    }
    Ok(())
}
