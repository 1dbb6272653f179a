//! Binary table files.
//!
//! Exact tables (`DSBT`): magic, `u32` version, `u32` n, `u64` count, then
//! `count` little-endian `u64` values in mask order.
//! Residue tables (`DSRT`): magic, version, `u32` n, `u64` m, `u64` count,
//! then `count` values of the smallest whole number of bytes covering `m - 1`
//! (at least one byte).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::beta::{build_beta_table, BetaTable, ResidueTable, EXACT_MAX_N, RESIDUE_MAX_N};
use crate::error::{Error, Result};

pub const EXACT_MAGIC: &[u8; 4] = b"DSBT";
pub const RESIDUE_MAGIC: &[u8; 4] = b"DSRT";
pub const FORMAT_VERSION: u32 = 1;

pub fn save_table(table: &BetaTable, path: &Path) -> Result<()> {
    let tmp = tmp_path(path);
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(EXACT_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&table.n().to_le_bytes())?;
        w.write_all(&(table.len() as u64).to_le_bytes())?;
        for &v in table.values() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_table(path: &Path) -> Result<BetaTable> {
    let mut r = BufReader::new(File::open(path)?);
    read_magic(&mut r, EXACT_MAGIC)?;
    let n = read_u32(&mut r)?;
    if n == 0 || n > EXACT_MAX_N {
        return Err(Error::Format(format!("header n = {n} is outside 1..={EXACT_MAX_N}")));
    }
    let count = read_u64(&mut r)?;
    check_count(n, count)?;
    let mut bytes = vec![0u8; count as usize * 8];
    read_payload(&mut r, &mut bytes)?;
    let values = bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
    BetaTable::from_values(n, values)
}

/// Bytes per stored residue.
pub fn residue_width(m: u64) -> usize {
    let top = m.saturating_sub(1);
    ((64 - top.leading_zeros() as usize).div_ceil(8)).max(1)
}

pub fn save_residue_table(table: &ResidueTable, path: &Path) -> Result<()> {
    let width = residue_width(table.modulus());
    let tmp = tmp_path(path);
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(RESIDUE_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&table.n().to_le_bytes())?;
        w.write_all(&table.modulus().to_le_bytes())?;
        w.write_all(&(table.values().len() as u64).to_le_bytes())?;
        for &v in table.values() {
            w.write_all(&v.to_le_bytes()[..width])?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_residue_table(path: &Path) -> Result<ResidueTable> {
    let mut r = BufReader::new(File::open(path)?);
    read_magic(&mut r, RESIDUE_MAGIC)?;
    let n = read_u32(&mut r)?;
    if n == 0 || n > RESIDUE_MAX_N {
        return Err(Error::Format(format!("header n = {n} is outside 1..={RESIDUE_MAX_N}")));
    }
    let m = read_u64(&mut r)?;
    if m == 0 || m > u32::MAX as u64 {
        return Err(Error::Format(format!("header modulus {m} is out of range")));
    }
    let count = read_u64(&mut r)?;
    check_count(n, count)?;
    let width = residue_width(m);
    let mut bytes = vec![0u8; count as usize * width];
    read_payload(&mut r, &mut bytes)?;
    let values = bytes
        .chunks_exact(width)
        .map(|c| {
            let mut buf = [0u8; 4];
            buf[..width].copy_from_slice(c);
            u32::from_le_bytes(buf)
        })
        .collect();
    ResidueTable::from_values(n, m, values).map_err(|e| Error::Format(e.to_string()))
}

/// Loads `beta-n{n}.dsbt` from `dir`, building and saving it when absent or unreadable.
pub fn load_or_build(dir: &Path, n: u32) -> Result<BetaTable> {
    let path = table_path(dir, n);
    if path.exists() {
        if let Ok(t) = load_table(&path) {
            if t.n() == n {
                return Ok(t);
            }
        }
    }
    let table = build_beta_table(n)?;
    std::fs::create_dir_all(dir)?;
    save_table(&table, &path)?;
    Ok(table)
}

pub fn table_path(dir: &Path, n: u32) -> PathBuf {
    dir.join(format!("beta-n{n}.dsbt"))
}

/// Exact tables shared across a run: memoized in memory and, with a
/// directory, persisted as `beta-n{n}.dsbt` files.
#[derive(Debug, Default)]
pub struct TableStore {
    dir: Option<PathBuf>,
    memo: Mutex<HashMap<u32, Arc<BetaTable>>>,
}

impl TableStore {
    pub fn in_memory() -> Self {
        TableStore::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        TableStore { dir: Some(dir.into()), memo: Mutex::default() }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn get(&self, n: u32) -> Result<Arc<BetaTable>> {
        if let Some(t) = self.memo.lock().expect("table memo poisoned").get(&n) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(match &self.dir {
            Some(dir) => load_or_build(dir, n)?,
            None => build_beta_table(n)?,
        });
        let mut memo = self.memo.lock().expect("table memo poisoned");
        Ok(Arc::clone(memo.entry(n).or_insert(table)))
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn check_count(n: u32, count: u64) -> Result<()> {
    let expected = 1u64 << (n - 1);
    if count != expected {
        return Err(Error::Format(format!("header says {count} values but n = {n} needs {expected}")));
    }
    Ok(())
}

fn read_magic(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|_| Error::Format("file too short for a header".into()))?;
    if &buf != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_payload(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|_| Error::Format("truncated payload".into()))?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::build_residue_table;

    #[test]
    fn exact_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.dsbt");
        let t = build_beta_table(10).unwrap();
        save_table(&t, &path).unwrap();
        assert_eq!(load_table(&path).unwrap(), t);
        let len = std::fs::metadata(&path).unwrap().len();
        assert_eq!(len, 4 + 4 + 4 + 8 + 8 * 512);
    }

    #[test]
    fn corrupt_files_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.dsbt");
        save_table(&build_beta_table(6).unwrap(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();

        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_table(&path), Err(Error::Format(_))));

        let mut bad = bytes.clone();
        bad[0] = b'X';
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(load_table(&path), Err(Error::Format(_))));

        let mut bad = bytes.clone();
        bad[8] = 7; // n = 7 with a 32-entry payload
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(load_table(&path), Err(Error::Format(_))));

        let mut bad = bytes;
        bad.push(0);
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(load_table(&path), Err(Error::Format(_))));
    }

    #[test]
    fn residue_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for m in [1u64, 2, 255, 256, 257, 70_000, 1 << 24, (1 << 24) + 1] {
            let path = dir.path().join(format!("r{m}.dsrt"));
            let t = build_residue_table(9, m).unwrap();
            save_residue_table(&t, &path).unwrap();
            assert_eq!(load_residue_table(&path).unwrap(), t, "m = {m}");
        }
        assert_eq!(residue_width(1), 1);
        assert_eq!(residue_width(256), 1);
        assert_eq!(residue_width(257), 2);
        assert_eq!(residue_width(1 << 24), 3);
        assert_eq!(residue_width((1 << 24) + 1), 4);
    }

    #[test]
    fn store_memoizes() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::with_dir(dir.path());
        let a = store.get(7).unwrap();
        let b = store.get(7).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(table_path(dir.path(), 7).exists());
        assert_eq!(*TableStore::in_memory().get(7).unwrap(), *a);
    }

    #[test]
    fn build_through_cache() {
        let dir = tempfile::tempdir().unwrap();
        let first = load_or_build(dir.path(), 8).unwrap();
        assert!(table_path(dir.path(), 8).exists());
        assert_eq!(load_or_build(dir.path(), 8).unwrap(), first);
    }
}
