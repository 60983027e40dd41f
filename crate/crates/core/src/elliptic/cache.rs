//! Append-only on-disk store of local data, one file per curve model.
//!
//! Each line reads "p t_p type"; the file name is the curve's hash key.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::reduction::{LocalCurveData, ReductionType};
use super::WeierstrassCurve;
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct ApCache {
    path: PathBuf,
    entries: BTreeMap<u64, LocalCurveData>,
}

impl ApCache {
    /// Opens (and rereads) the cache file for `curve` under `dir`.
    pub fn open(dir: &Path, curve: &WeierstrassCurve) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.txt", curve.hash_key()));
        let mut entries = BTreeMap::new();
        if path.exists() {
            for (lineno, line) in fs::read_to_string(&path)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let record = parse_line(line)
                    .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
                entries.insert(record.p, record);
            }
        }
        Ok(ApCache { path, entries })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn get(&self, p: u64) -> Option<&LocalCurveData> {
        self.entries.get(&p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends records not already present.
    pub fn extend<'a>(&mut self, records: impl IntoIterator<Item = &'a LocalCurveData>) -> Result<()> {
        let fresh: Vec<&LocalCurveData> = records
            .into_iter()
            .filter(|r| !self.entries.contains_key(&r.p))
            .collect();
        if fresh.is_empty() {
            return Ok(());
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        for r in fresh {
            writeln!(file, "{} {} {}", r.p, r.t_p, r.reduction.as_str())?;
            self.entries.insert(r.p, r.clone());
        }
        Ok(())
    }
}

fn parse_line(line: &str) -> std::result::Result<LocalCurveData, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [p, t, kind] = fields[..] else {
        return Err(format!("expected \"p t_p type\", got {line:?}"));
    };
    let p: u64 = p.parse().map_err(|_| format!("bad prime {p:?}"))?;
    let t_p: i64 = t.parse().map_err(|_| format!("bad trace {t:?}"))?;
    let reduction = ReductionType::parse(kind).map_err(|e| e.to_string())?;
    let point_count = (1 + p as i64 - t_p) as u64;
    Ok(LocalCurveData {
        p,
        point_count,
        t_p,
        reduction,
    })
}
