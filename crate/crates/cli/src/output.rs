//! CSV rendering with a `# key = value` header, and atomic-enough writing
//! of a command's files once everything has been computed.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Shortest round-trip representation, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub trailer: Vec<(String, String)>,
}

impl Csv {
    pub fn new(header: Vec<(String, String)>, columns: &[&str]) -> Self {
        Csv {
            header,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Csv::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.header.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        for (k, v) in &self.trailer {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s
    }
}

pub fn write_files(out: &Path, files: &[(String, String)]) -> Result<(), CliError> {
    let io = |path: &Path, source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(out).map_err(|e| io(out, e))?;
    for (name, body) in files {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_hex() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(vec![("a".into(), "1".into())], &["x", "y"]);
        c.row(vec![num(0.5), num(1e-7)]);
        c.trailer.push(("done".into(), "yes".into()));
        assert_eq!(c.render(), "# a = 1\nx,y\n5e-1,1e-7\n# done = yes\n");
    }
}
