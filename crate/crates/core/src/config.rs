//! Run configuration shared by the command-line front end.

use std::path::PathBuf;

use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "DESCENT_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Full `u64` tables, `n <= 24`.
    #[default]
    Exact,
    /// One table per modulus, `n <= 28`; multiplicities unavailable.
    Residue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub cache_dir: PathBuf,
    pub format: OutputFormat,
    pub workers: usize,
    pub m_max: u64,
    pub even_only: bool,
    pub mode: Mode,
}

impl RunConfig {
    pub fn new(
        cache_dir: PathBuf,
        format: OutputFormat,
        workers: usize,
        m_max: u64,
        even_only: bool,
        mode: Mode,
    ) -> Result<Self> {
        if workers == 0 {
            return Err(Error::invalid("worker count must be at least 1"));
        }
        if m_max < 2 {
            return Err(Error::invalid(format!("m_max must be at least 2, got {m_max}")));
        }
        Ok(RunConfig { cache_dir, format, workers, m_max, even_only, mode })
    }
}

/// The flag if given, else `$DESCENT_CACHE_DIR`, else the platform data directory.
pub fn resolve_cache_dir(flag: Option<PathBuf>) -> PathBuf {
    resolve_cache_dir_from(flag, std::env::var_os(CACHE_ENV).map(PathBuf::from))
}

fn resolve_cache_dir_from(flag: Option<PathBuf>, env: Option<PathBuf>) -> PathBuf {
    flag.or(env.filter(|p| !p.as_os_str().is_empty()))
        .or_else(|| dirs::data_dir().map(|d| d.join("descent")))
        .unwrap_or_else(|| PathBuf::from(".descent-cache"))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
