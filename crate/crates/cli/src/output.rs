use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::error::{CliError, CliResult, InputContext};

/// Output directory; every file is written through a same-directory temp
/// file and renamed into place.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn new(root: PathBuf) -> Self {
        OutDir { root }
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write(&self, rel: impl AsRef<Path>, contents: &str) -> CliResult<PathBuf> {
        let target = self.path(rel);
        let dir = target.parent().unwrap_or(&self.root).to_path_buf();
        let written = (|| -> anyhow::Result<()> {
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut tmp = tempfile::NamedTempFile::new_in(&dir)
                .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
            tmp.write_all(contents.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(&target).with_context(|| format!("renaming into {}", target.display()))?;
            Ok(())
        })();
        written.map_err(CliError::internal)?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }

    /// Reads a file produced by an earlier command.
    pub fn read(&self, rel: impl AsRef<Path>, produced_by: &str) -> CliResult<String> {
        let path = self.path(rel);
        read_input(&path).map_err(|e| match e {
            CliError::Input(err) => CliError::Input(err.context(format!("run `{produced_by}` first"))),
            other => other,
        })
    }
}

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).input(format!("reading {}", path.display()))
}
