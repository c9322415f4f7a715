use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Output files held in memory until the run has succeeded.
#[derive(Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn text(&mut self, name: &str, contents: String) {
        self.files.push((name.to_owned(), contents.into_bytes()));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.text(name, text);
    }

    /// Writes every file to `dir` through a temporary file and rename.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| CliError::input(format!("cannot write in {}: {e}", dir.display())))?;
            tmp.write_all(bytes).map_err(|e| CliError::input(format!("write failed: {e}")))?;
            staged.push((tmp, dir.join(name)));
        }
        staged
            .into_iter()
            .map(|(tmp, path)| {
                tmp.persist(&path).map_err(|e| CliError::input(format!("cannot persist {}: {e}", path.display())))?;
                Ok(path)
            })
            .collect()
    }
}

/// Round-trip float formatting for CSV cells.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}
