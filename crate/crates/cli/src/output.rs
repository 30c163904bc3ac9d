use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use fracmin::{Image, Result};

use crate::config::RunConfig;

/// Files produced by one command, written under `out` when it is set.
pub struct Outputs<'a> {
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self> {
        if let Some(dir) = &config.out {
            std::fs::create_dir_all(dir)?;
        }
        Ok(Outputs { config, written: Vec::new() })
    }

    fn stem(&self) -> String {
        if self.config.name.is_empty() {
            self.config.command.clone()
        } else {
            format!("{}_{}", self.config.command, self.config.name)
        }
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("fracmin {}", env!("CARGO_PKG_VERSION")),
            format!("config: {}", serde_json::to_string(self.config).expect("config serializes")),
        ]
    }

    fn write(&mut self, suffix: &str, text: String) -> Result<()> {
        if let Some(dir) = &self.config.out {
            let path = dir.join(format!("{}{suffix}", self.stem()));
            std::fs::write(&path, text)?;
            self.written.push(path);
        }
        Ok(())
    }

    /// CSV with the config as `#` comment lines.
    pub fn csv(&mut self, suffix: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut text: String = self.header().iter().map(|l| format!("# {l}\n")).collect();
        text.push_str(&columns.join(","));
        text.push('\n');
        for r in rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.write(&format!("{suffix}.csv"), text)
    }

    pub fn pgm(&mut self, suffix: &str, image: &Image) -> Result<()> {
        let mut comments = self.header();
        let g = &image.grid;
        comments.push(format!("origin: {} {}  h: {}", g.origin[0], g.origin[1], g.h));
        self.write(&format!("{suffix}.pgm"), image.to_pgm(&comments))
    }

    /// Writes the JSON summary and returns it with the list of files.
    pub fn finish<T: Serialize>(mut self, result: &T) -> Result<Value> {
        let mut doc = json!({
            "fracmin": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "result": result,
        });
        self.write(".json", serde_json::to_string_pretty(&doc)?)?;
        if !self.written.is_empty() {
            doc["files"] = json!(self.written);
        }
        Ok(doc)
    }
}
