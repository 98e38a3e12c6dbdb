use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use diffchan::timedomain::format_sig9;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::scenario::Scenario;

/// Every JSON result carries the code version and the full resolved scenario.
#[derive(Debug, Serialize)]
pub struct Document<'a, T: Serialize> {
    pub version: &'static str,
    pub command: &'static str,
    pub scenario: &'a Scenario,
    #[serde(flatten)]
    pub body: T,
}

pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn open(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        let path = self.root.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok((path, BufWriter::new(file)))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let (path, mut w) = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(&path, e.into()))?;
        writeln!(w)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::io(&path, e))
    }

    /// Writes a header row and numeric rows at 9 significant digits; `None` cells stay empty.
    pub fn table(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<Option<f64>>],
    ) -> Result<()> {
        let (path, w) = self.open(name)?;
        let mut out = csv::Writer::from_writer(w);
        let wrap = |e: csv::Error| CliError::io(&path, e.into());
        out.write_record(header).map_err(wrap)?;
        for row in rows {
            out.write_record(row.iter().map(|c| c.map(format_sig9).unwrap_or_default()))
                .map_err(wrap)?;
        }
        out.flush().map_err(|e| CliError::io(&path, e))
    }

    pub fn records(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let (path, w) = self.open(name)?;
        let mut out = csv::Writer::from_writer(w);
        let wrap = |e: csv::Error| CliError::io(&path, e.into());
        out.write_record(header).map_err(wrap)?;
        for row in rows {
            out.write_record(row).map_err(wrap)?;
        }
        out.flush().map_err(|e| CliError::io(&path, e))
    }

    pub fn trace(&mut self, name: &str, trace: &diffchan::SimulationTrace) -> Result<()> {
        let (path, mut w) = self.open(name)?;
        trace.write_csv(&mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
