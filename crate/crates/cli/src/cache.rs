//! On-disk reliability-table cache.
//!
//! Tables are keyed by (channel kind, noise rate, n, samples, seed) and
//! stored in the binary table format. A corrupt or mismatched file is
//! rebuilt in place with a warning rather than failing the run.

use anyhow::{Context, Result};
use polartri::channel::{ChannelSpec, ReliabilityTable};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

/// Cache directory resolution order: explicit flag, then `POLAR_CACHE_DIR`,
/// then `polar-cache` under the working directory.
pub fn resolve_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(env) = std::env::var_os("POLAR_CACHE_DIR") {
        return PathBuf::from(env);
    }
    PathBuf::from("polar-cache")
}

/// File name for a table key. Exact erasure tables ignore samples and seed.
pub fn file_name(channel: ChannelSpec, n: usize, samples: u64, seed: u64) -> String {
    match channel {
        ChannelSpec::Bec { p } => format!("bec_p{p}_n{n}.prt1"),
        ChannelSpec::Bsc { p } => format!("bsc_p{p}_n{n}_s{samples}_x{seed}.prt1"),
    }
}

fn build(channel: ChannelSpec, n: usize, samples: u64, seed: u64) -> Result<ReliabilityTable> {
    Ok(match channel {
        ChannelSpec::Bec { p } => ReliabilityTable::exact_bec(p, n)?,
        ChannelSpec::Bsc { p } => ReliabilityTable::mc_bsc(p, n, samples, seed)?,
    })
}

/// Loads a cached table, or computes and caches it. Returns the table and
/// the path backing it.
pub fn load_or_build(
    dir: &Path,
    channel: ChannelSpec,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<(ReliabilityTable, PathBuf)> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating cache dir {}", dir.display()))?;
    let path = dir.join(file_name(channel, n, samples, seed));
    if path.exists() {
        match File::open(&path)
            .map_err(polartri::Error::from)
            .and_then(|f| ReliabilityTable::read_binary(&mut BufReader::new(f), channel))
        {
            Ok(table) if table.n() == n && table.samples() == samples_key(channel, samples) => {
                return Ok((table, path));
            }
            Ok(_) => eprintln!(
                "warning: cache entry {} does not match its key; rebuilding",
                path.display()
            ),
            Err(e) => eprintln!(
                "warning: cache entry {} unreadable ({e}); rebuilding",
                path.display()
            ),
        }
    }
    let table = build(channel, n, samples, seed)?;
    write_table(&table, &path)?;
    Ok((table, path))
}

fn samples_key(channel: ChannelSpec, samples: u64) -> u64 {
    match channel {
        ChannelSpec::Bec { .. } => 0,
        ChannelSpec::Bsc { .. } => samples,
    }
}

pub fn write_table(table: &ReliabilityTable, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    table.write_binary(&mut w)?;
    Ok(())
}

/// FNV-1a 64 over the table's defining bytes; embedded in CSV headers so a
/// result file records exactly which tables produced it.
pub fn table_digest(table: &ReliabilityTable) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x100_0000_01b3);
    };
    for b in (table.n() as u64).to_le_bytes() {
        eat(b);
    }
    for b in table.samples().to_le_bytes() {
        eat(b);
    }
    for &v in table.log2_z() {
        for b in v.to_le_bytes() {
            eat(b);
        }
    }
    hash
}
