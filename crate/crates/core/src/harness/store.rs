use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::grid::RunKey;
use super::record::{RunRecord, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// Append-only JSON-lines file of [`RunRecord`]s.
#[derive(Debug, Clone)]
pub struct ResultStore {
    path: PathBuf,
}

impl ResultStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ResultStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Reads every complete record. A damaged final line (an interrupted
    /// write) is cut off the file with a warning; damage anywhere else is an
    /// error.
    pub fn load(&self) -> Result<Vec<RunRecord>> {
        let bytes = match fs::read(&self.path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut records = Vec::new();
        let mut offset = 0usize;
        let mut lineno = 0usize;
        while offset < bytes.len() {
            lineno += 1;
            let rest = &bytes[offset..];
            let (line, complete) = match rest.iter().position(|&b| b == b'\n') {
                Some(end) => (&rest[..end], true),
                None => (rest, false),
            };
            let next = offset + line.len() + usize::from(complete);
            let is_last = next >= bytes.len();
            if line.iter().all(u8::is_ascii_whitespace) {
                offset = next;
                continue;
            }
            match parse_line(line) {
                Ok(r) if complete => records.push(r),
                Err(e @ Error::SchemaMismatch { .. }) => return Err(e),
                Ok(_) | Err(_) if is_last => {
                    log::warn!(
                        "{}: truncating damaged trailing record at line {lineno}",
                        self.path.display()
                    );
                    let f = OpenOptions::new().write(true).open(&self.path)?;
                    f.set_len(offset as u64)?;
                    break;
                }
                Ok(_) => unreachable!("incomplete line can only be the last"),
                Err(e) => {
                    return Err(Error::Parse(format!(
                        "{}: line {lineno}: {e}",
                        self.path.display()
                    )))
                }
            }
            offset = next;
        }
        Ok(records)
    }

    pub fn completed_keys(&self) -> Result<HashSet<RunKey>> {
        Ok(self.load()?.iter().map(RunRecord::key).collect())
    }

    pub fn writer(&self) -> Result<StoreWriter> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        Ok(StoreWriter { out: BufWriter::new(file) })
    }

    pub fn append(&self, records: &[RunRecord]) -> Result<()> {
        let mut w = self.writer()?;
        for r in records {
            w.write(r)?;
        }
        Ok(())
    }
}

/// Single owner of the store file during a sweep.
pub struct StoreWriter {
    out: BufWriter<File>,
}

impl StoreWriter {
    /// Writes one record and flushes, so readers only ever see whole lines
    /// (apart from a crash mid-write, which `load` repairs).
    pub fn write(&mut self, record: &RunRecord) -> Result<()> {
        let mut line = serde_json::to_vec(record)?;
        line.push(b'\n');
        self.out.write_all(&line)?;
        self.out.flush()?;
        Ok(())
    }
}

fn parse_line(line: &[u8]) -> Result<RunRecord> {
    let value: serde_json::Value = serde_json::from_slice(line)?;
    let found = value.get("schema_version").and_then(|v| v.as_u64());
    match found {
        Some(v) if v == u64::from(SCHEMA_VERSION) => Ok(serde_json::from_value(value)?),
        Some(v) => Err(Error::SchemaMismatch {
            found: v as u32,
            expected: SCHEMA_VERSION,
            hint: "re-run the sweep into a new store, or convert the old file with a one-off script".into(),
        }),
        None => Err(Error::Parse("record without schema_version".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::record::RunStatus;
    use crate::solvers::Method;
    use crate::{BetaDist, Dispersion, SimConfig};

    fn rec(seed: u64) -> RunRecord {
        let c = SimConfig {
            features_p: 16,
            rank_ratio: 1.0,
            dispersion: Dispersion::Low,
            beta_dist: BetaDist::Uniform,
            sparsity: 0.0,
            snr: 1.0,
            sample_n: 100,
            seed: 42,
        };
        RunRecord::failed(c, seed, Method::Ridge, "boom".into(), None)
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = ResultStore::new(dir.path().join("sub/runs.jsonl"));
        assert!(store.load().unwrap().is_empty());
        store.append(&[rec(0), rec(1)]).unwrap();
        let back = store.load().unwrap();
        assert_eq!(back, vec![rec(0), rec(1)]);
        assert_eq!(back[0].status, RunStatus::Failed);
    }

    #[test]
    fn trailing_damage_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        let store = ResultStore::new(&path);
        store.append(&[rec(0)]).unwrap();
        let good_len = fs::metadata(&path).unwrap().len();
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"schema_version\":1,\"conf").unwrap();
        drop(f);
        assert_eq!(store.load().unwrap().len(), 1);
        assert_eq!(fs::metadata(&path).unwrap().len(), good_len);
    }

    #[test]
    fn schema_mismatch_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        fs::write(&path, "{\"schema_version\":0}\n").unwrap();
        let err = ResultStore::new(&path).load().unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch { found: 0, expected: 1, .. }));
    }

    #[test]
    fn damage_in_the_middle_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.jsonl");
        let good = serde_json::to_string(&rec(0)).unwrap();
        fs::write(&path, format!("{good}\nnot json\n{good}\n")).unwrap();
        assert!(matches!(ResultStore::new(&path).load(), Err(Error::Parse(_))));
    }
}
