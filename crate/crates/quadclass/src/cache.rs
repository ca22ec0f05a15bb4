//! Persistent class-number cache.
//!
//! One record per line, for example
//!
//! ```text
//! disc=-212 h=6 version=0.1.0 computed_at=1760000000
//! ```
//!
//! The file is only ever appended to. When a discriminant appears more than
//! once the last record wins. Lines that do not parse are skipped with a
//! warning.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use quadclass_core::family::ClassNumberCache;
use quadclass_core::Discriminant;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::enumerate;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fraction of cached entries re-enumerated by [`ClassCache::reverify_sample`].
pub const REVERIFY_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheRecord {
    pub disc: Discriminant,
    pub h: u64,
    pub version: String,
    pub computed_at: u64,
}

impl CacheRecord {
    pub fn new(disc: Discriminant, h: u64) -> Self {
        let computed_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        CacheRecord {
            disc,
            h,
            version: TOOL_VERSION.to_string(),
            computed_at,
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "disc={} h={} version={} computed_at={}",
            self.disc.get(),
            self.h,
            self.version,
            self.computed_at
        )
    }

    /// Parses one line. Keys may come in any order; unknown keys are ignored.
    pub fn parse(line: &str) -> Result<Self, String> {
        let (mut disc, mut h, mut version, mut computed_at) = (None, None, None, None);
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| format!("field `{field}` is not key=value"))?;
            match key {
                "disc" => disc = Some(value.parse::<i64>().map_err(|e| e.to_string())?),
                "h" => h = Some(value.parse::<u64>().map_err(|e| e.to_string())?),
                "version" => version = Some(value.to_string()),
                "computed_at" => {
                    computed_at = Some(value.parse::<u64>().map_err(|e| e.to_string())?)
                }
                _ => {}
            }
        }
        let disc = Discriminant::new(disc.ok_or("missing disc")?).map_err(|e| e.to_string())?;
        let h = h.ok_or("missing h")?;
        if h == 0 {
            return Err("h must be positive".into());
        }
        Ok(CacheRecord {
            disc,
            h,
            version: version.ok_or("missing version")?,
            computed_at: computed_at.ok_or("missing computed_at")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReverifyReport {
    pub checked: usize,
    /// Entries above the enumeration cap are left alone.
    pub skipped: usize,
    /// `(discriminant, cached h, fresh h)`.
    pub mismatches: Vec<(i64, u64, u64)>,
}

/// Class numbers keyed by discriminant, optionally backed by a file.
///
/// Readers share a lock; appends to the file go through a single writer.
#[derive(Debug, Default)]
pub struct ClassCache {
    entries: RwLock<BTreeMap<i64, CacheRecord>>,
    writer: Option<Mutex<File>>,
    path: Option<PathBuf>,
    skipped_lines: usize,
}

impl ClassCache {
    /// A cache that lives only as long as the process.
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` (creating it if absent) and appends new records to it.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        let mut entries = BTreeMap::new();
        let mut skipped_lines = 0;
        match File::open(path) {
            Ok(file) => {
                for (n, line) in BufReader::new(file).lines().enumerate() {
                    let line = match line {
                        Ok(line) => line,
                        Err(e) => {
                            log::warn!(
                                "{}:{}: unreadable line skipped: {e}",
                                path.display(),
                                n + 1
                            );
                            skipped_lines += 1;
                            continue;
                        }
                    };
                    if line.trim().is_empty() {
                        continue;
                    }
                    match CacheRecord::parse(&line) {
                        Ok(rec) => {
                            entries.insert(rec.disc.get(), rec);
                        }
                        Err(e) => {
                            log::warn!(
                                "{}:{}: corrupt cache line skipped: {e}",
                                path.display(),
                                n + 1
                            );
                            skipped_lines += 1;
                        }
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ClassCache {
            entries: RwLock::new(entries),
            writer: Some(Mutex::new(file)),
            path: Some(path.to_path_buf()),
            skipped_lines,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Lines ignored while loading.
    pub fn skipped_lines(&self) -> usize {
        self.skipped_lines
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn record(&self, disc: Discriminant) -> Option<CacheRecord> {
        self.entries.read().unwrap().get(&disc.get()).cloned()
    }

    /// Stores `rec`. Re-storing an identical `h` does not touch the file.
    pub fn insert(&self, rec: CacheRecord) -> io::Result<()> {
        let mut entries = self.entries.write().unwrap();
        if entries
            .get(&rec.disc.get())
            .is_some_and(|old| old.h == rec.h)
        {
            return Ok(());
        }
        if let Some(writer) = &self.writer {
            let mut file = writer.lock().unwrap();
            writeln!(file, "{}", rec.to_line())?;
            file.flush()?;
        }
        entries.insert(rec.disc.get(), rec);
        Ok(())
    }

    /// Re-enumerates a random sample of entries and replaces any that disagree.
    pub fn reverify_sample<R: Rng + ?Sized>(
        &self,
        fraction: f64,
        cap: u64,
        rng: &mut R,
    ) -> io::Result<ReverifyReport> {
        let keys: Vec<i64> = self.entries.read().unwrap().keys().copied().collect();
        if keys.is_empty() {
            return Ok(ReverifyReport::default());
        }
        let want = ((keys.len() as f64 * fraction).ceil() as usize).clamp(1, keys.len());
        let mut report = ReverifyReport::default();
        for &key in keys.choose_multiple(rng, want) {
            let disc = Discriminant::new(key).expect("keys are validated on insert");
            let cached = self.entries.read().unwrap()[&key].h;
            let fresh = match enumerate::class_number(disc, cap) {
                Ok(h) => h,
                Err(_) => {
                    report.skipped += 1;
                    continue;
                }
            };
            report.checked += 1;
            if fresh != cached {
                log::warn!("cached h({key}) = {cached} but enumeration gives {fresh}; replacing");
                report.mismatches.push((key, cached, fresh));
                self.insert(CacheRecord::new(disc, fresh))?;
            }
        }
        Ok(report)
    }
}

impl ClassNumberCache for ClassCache {
    fn get(&self, disc: Discriminant) -> Option<u64> {
        self.entries.read().unwrap().get(&disc.get()).map(|r| r.h)
    }

    fn put(&self, disc: Discriminant, h: u64) {
        if let Err(e) = self.insert(CacheRecord::new(disc, h)) {
            log::warn!("could not write cache record for {}: {e}", disc.get());
        }
    }
}
