//! Fixed-point enumeration with an optional on-disk cache.
//!
//! Cache files are line-oriented text, one file per (family, rank, k, n):
//!
//! ```text
//! # blowup-fixed-points v1
//! # family=blowup rank=2 k=1 n=0 count=2
//! [];[]|[];[]|1,0
//! [];[]|[];[]|0,1
//! ```
//!
//! A partition is its parts in brackets (`[2,1]`, `[]`), tuple entries are
//! separated by `;`, and the three fields of a blow-up fixed point (Y tuple,
//! Z tuple, lattice vector) by `|`. P2 files hold one tuple per line.
//! Records are written in enumeration order, so cached and fresh results are
//! identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::partitions::{enumerate_blowup_fixed_points, enumerate_tuples, BlowupFixedPoint, PartitionTuple};

const MAGIC: &str = "# blowup-fixed-points v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    P2,
    Blowup,
}

impl Family {
    fn as_str(self) -> &'static str {
        match self {
            Family::P2 => "p2",
            Family::Blowup => "blowup",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumerationCache {
    dir: PathBuf,
}

impl EnumerationCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn header(family: Family, rank: usize, k: i64, n: i64, count: usize) -> String {
        format!("# family={} rank={rank} k={k} n={n} count={count}", family.as_str())
    }

    pub fn path(&self, family: Family, rank: usize, k: i64, n: i64) -> PathBuf {
        self.dir.join(format!("{}-r{rank}-k{k}-n{n}.txt", family.as_str()))
    }

    /// Records stored for the key, or `None` if absent or unreadable.
    fn load<T: std::str::FromStr<Err = Error>>(&self, family: Family, rank: usize, k: i64, n: i64) -> Option<Vec<T>> {
        let text = fs::read_to_string(self.path(family, rank, k, n)).ok()?;
        let mut lines = text.lines();
        if lines.next()? != MAGIC {
            return None;
        }
        let header = lines.next()?;
        let records = lines.map(str::parse).collect::<Result<Vec<T>>>().ok()?;
        if header != Self::header(family, rank, k, n, records.len()) {
            tracing::warn!(path = %self.path(family, rank, k, n).display(), "stale cache header, recomputing");
            return None;
        }
        Some(records)
    }

    fn store<T: std::fmt::Display>(&self, family: Family, rank: usize, k: i64, n: i64, records: &[T]) -> Result<()> {
        let path = self.path(family, rank, k, n);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(f, "{MAGIC}")?;
            writeln!(f, "{}", Self::header(family, rank, k, n, records.len()))?;
            for r in records {
                writeln!(f, "{r}")?;
            }
            f.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}

/// Source of fixed-point lists, optionally backed by an [`EnumerationCache`].
#[derive(Clone, Debug, Default)]
pub struct Enumerator {
    cache: Option<EnumerationCache>,
}

impl Enumerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache(cache: EnumerationCache) -> Self {
        Self { cache: Some(cache) }
    }

    pub fn cache(&self) -> Option<&EnumerationCache> {
        self.cache.as_ref()
    }

    /// r-tuples of total size n.
    pub fn p2(&self, rank: usize, n: i64) -> Result<Vec<PartitionTuple>> {
        if n < 0 {
            return Ok(Vec::new());
        }
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        let Some(cache) = &self.cache else {
            return Ok(enumerate_tuples(rank, n as usize));
        };
        if let Some(hit) = cache.load(Family::P2, rank, 0, n) {
            return Ok(hit);
        }
        let fresh = enumerate_tuples(rank, n as usize);
        cache.store(Family::P2, rank, 0, n, &fresh)?;
        Ok(fresh)
    }

    /// Blow-up fixed points with instanton number n.
    pub fn blowup(&self, rank: usize, k: i64, n: i64) -> Result<Vec<BlowupFixedPoint>> {
        let Some(cache) = &self.cache else {
            return enumerate_blowup_fixed_points(rank, k, n);
        };
        if let Some(hit) = cache.load(Family::Blowup, rank, k, n) {
            return Ok(hit);
        }
        let fresh = enumerate_blowup_fixed_points(rank, k, n)?;
        cache.store(Family::Blowup, rank, k, n, &fresh)?;
        Ok(fresh)
    }
}
