use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Output directory that drops a `<stem>.config.json` run record next to
/// every file it writes.
pub struct OutputDir<'a, C: Serialize> {
    root: PathBuf,
    record: RunRecord<'a, C>,
}

#[derive(Serialize)]
struct RunRecord<'a, C> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
}

impl<'a, C: Serialize> OutputDir<'a, C> {
    pub fn create(root: &Path, command: &'a str, config: &'a C) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            record: RunRecord { command, version: env!("CARGO_PKG_VERSION"), config },
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes `name` through `fill`, then its run record.
    pub fn write<F>(&self, name: &str, fill: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        fill(&mut out).with_context(|| format!("writing {}", path.display()))?;
        out.flush()?;
        self.write_record(&path)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        self.write(name, |out| {
            serde_json::to_writer_pretty(&mut *out, value)?;
            out.write_all(b"\n")?;
            Ok(())
        })
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        self.write(name, |out| Ok(out.write_all(text.as_bytes())?))
    }

    fn write_record(&self, path: &Path) -> Result<()> {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
        let sidecar = path.with_file_name(format!("{stem}.config.json"));
        let mut text = serde_json::to_string_pretty(&self.record)?;
        text.push('\n');
        fs::write(&sidecar, text).with_context(|| format!("writing {}", sidecar.display()))
    }
}
