//! Output directory: CSV tables with a comment header, binary snapshots and
//! a `manifest.json` listing every file with its SHA-256.
//!
//! Nothing written here depends on the clock or on thread scheduling, so
//! identical configs give byte-identical directories.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST: &str = "manifest.json";
pub const TOOL: &str = "damped-euler";

/// One CSV cell: the shortest digits that round-trip, in exponent form
/// outside `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Empty for `None`.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

/// A CSV table: a name, a header row and rows of preformatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    /// The comment block, then the header row, then the rows.
    pub fn to_bytes(&self, config_hash: &str) -> Result<Vec<u8>> {
        let mut out = format!("# {TOOL} {VERSION}\n# config_sha256 {config_hash}\n# table {}\n", self.name).into_bytes();
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        out.extend(w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?);
        Ok(out)
    }
}

/// A CSV read back: comment lines, header and records.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCsv {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ParsedCsv {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column `name` parsed as floats; empty cells become `None`.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self.column(name).ok_or_else(|| Error::config(name, "no such column"))?;
        self.rows
            .iter()
            .map(|r| {
                if r[k].is_empty() {
                    Ok(None)
                } else {
                    r[k].parse::<f64>()
                        .map(Some)
                        .map_err(|e| Error::config(name, format!("bad number `{}`: {e}", r[k])))
                }
            })
            .collect()
    }

    /// Value of `# config_sha256 <hex>` in the comment block.
    pub fn config_hash(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| c.strip_prefix("# config_sha256 "))
    }
}

pub fn parse_csv(bytes: &[u8], path: &Path) -> Result<ParsedCsv> {
    let bad = |reason: String| Error::config(path.display().to_string(), reason);
    let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
    let mut comments = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if !line.starts_with('#') {
            break;
        }
        comments.push(line.trim_end().to_string());
        offset += line.len();
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(&bytes[offset..]);
    let columns = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(|e| bad(e.to_string())))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(ParsedCsv { comments, columns, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub mode: String,
    pub config_sha256: String,
    /// Sorted by path; the manifest does not list itself.
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Collects the files of one run under `root`.
#[derive(Debug)]
pub struct OutputDir {
    pub root: PathBuf,
    pub config_hash: String,
    mode: String,
    files: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: &Path, mode: &str, config_hash: &str) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            config_hash: config_hash.into(),
            mode: mode.into(),
            files: Vec::new(),
        })
    }

    /// Writes `bytes` at `rel` (a `/`-separated path under the root).
    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.files.retain(|f| f.path != rel);
        self.files.push(ManifestEntry {
            path: rel.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Writes `<table.name>.csv`.
    pub fn write_table(&mut self, table: &Table) -> Result<()> {
        let bytes = table.to_bytes(&self.config_hash)?;
        self.write_bytes(&format!("{}.csv", table.name), &bytes)
    }

    pub fn paths(&self) -> Vec<&str> {
        self.files.iter().map(|f| f.path.as_str()).collect()
    }

    /// Writes `manifest.json` and returns it.
    pub fn finish(mut self) -> Result<Manifest> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            mode: self.mode,
            config_sha256: self.config_hash,
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(self.root.join(MANIFEST), text)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trips_through_the_parser() {
        let mut t = Table::new("demo", &["t", "value", "label"]);
        t.push(vec![num(0.1), num(f64::INFINITY), "a,b".into()]);
        t.push(vec![num(-1e-300), opt(None), "plain".into()]);
        assert_eq!(num(-1e-300), "-1e-300");
        assert_eq!(num(30.0), "30");
        assert_eq!(num(3.2e-5).parse::<f64>().unwrap(), 3.2e-5);
        let bytes = t.to_bytes("abc").unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with(&format!("# {TOOL} {VERSION}\n# config_sha256 abc\n# table demo\nt,value,label\n")));
        let p = parse_csv(&bytes, Path::new("demo.csv")).unwrap();
        assert_eq!(p.config_hash(), Some("abc"));
        assert_eq!(p.columns, t.columns);
        assert_eq!(p.rows, t.rows);
        let v = p.floats("value").unwrap();
        assert_eq!(v, vec![Some(f64::INFINITY), None]);
        assert_eq!(p.floats("t").unwrap()[0], Some(0.1));
    }

    #[test]
    fn manifest_is_sorted_and_hashes_content() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "demo", "h").unwrap();
        out.write_bytes("z.bin", b"zz").unwrap();
        out.write_bytes("sub/a.bin", b"a").unwrap();
        let m = out.finish().unwrap();
        assert_eq!(m.files.iter().map(|f| f.path.as_str()).collect::<Vec<_>>(), ["sub/a.bin", "z.bin"]);
        assert_eq!(m.files[1].sha256, sha256_hex(b"zz"));
        assert_eq!(Manifest::load(dir.path()).unwrap(), m);
    }
}
