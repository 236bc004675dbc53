//! Sequential binary file formats and the distribution / striping machinery.
//!
//! Both file kinds use Fortran-sequential record framing: every record is
//! `[u32 payload length][payload][u32 payload length]`, little-endian. The
//! duplicated length doubles as a corruption check — a framing mismatch names
//! the record it happened in.

mod dipole;
mod hfile;
mod stripe;

pub use dipole::{
    read_dipole_header, read_dipole_state, read_dipole_states_concurrent, reduce_dipole,
    write_dipole, DipoleFileHeader,
};
pub use hfile::{read_hfile, read_hfile_with, write_hfile, HFileData, HFileHeader};
pub use stripe::{
    chunked_read, stripe_count_for_size, trace_to_csv, ReadTraceEntry, StripePolicy, GIB,
};

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use byteorder::{ReadBytesExt, WriteBytesExt, LE};

use crate::error::{Result, RmxError};

/// How workers acquire the contents of a shared input file. The mode changes
/// I/O behavior only; every worker ends up with bit-identical data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadMode {
    /// Every worker opens and reads the whole file itself.
    AllRanksRead,
    /// Worker 0 reads once and the parsed contents are handed to the rest.
    RootReadBroadcast,
}

/// File-open indirection so tests can count how many readers actually touch
/// the file under each [`ReadMode`].
pub trait FileOpener: Sync {
    fn open(&self, path: &Path) -> std::io::Result<Box<dyn Read + Send>>;
}

/// Plain buffered `File::open`.
pub struct StdOpener;

impl FileOpener for StdOpener {
    fn open(&self, path: &Path) -> std::io::Result<Box<dyn Read + Send>> {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

/// Counts opens; safe under concurrent readers.
#[derive(Default)]
pub struct CountingOpener {
    opens: AtomicUsize,
}

impl CountingOpener {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn opens(&self) -> usize {
        self.opens.load(Ordering::SeqCst)
    }
}

impl FileOpener for CountingOpener {
    fn open(&self, path: &Path) -> std::io::Result<Box<dyn Read + Send>> {
        self.opens.fetch_add(1, Ordering::SeqCst);
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

pub(crate) fn write_record(
    w: &mut impl Write,
    payload: &[u8],
    path: &Path,
    record: &str,
) -> Result<u64> {
    let len = u32::try_from(payload.len()).map_err(|_| RmxError::Format {
        path: path.to_path_buf(),
        detail: format!("record {record} exceeds the u32 framing limit"),
    })?;
    let io_err = |e| RmxError::io(path, e);
    w.write_u32::<LE>(len).map_err(io_err)?;
    w.write_all(payload).map_err(io_err)?;
    w.write_u32::<LE>(len).map_err(io_err)?;
    Ok(8 + payload.len() as u64)
}

/// Reads one framed record; any EOF or head/tail disagreement is reported as a
/// corrupt record named `record`.
pub(crate) fn read_record(r: &mut impl Read, path: &Path, record: &str) -> Result<Vec<u8>> {
    let corrupt = |detail: String| RmxError::CorruptRecord {
        path: path.to_path_buf(),
        record: format!("{record}: {detail}"),
    };
    let head = r
        .read_u32::<LE>()
        .map_err(|e| corrupt(format!("missing length prefix ({e})")))?;
    let mut payload = vec![0u8; head as usize];
    r.read_exact(&mut payload)
        .map_err(|e| corrupt(format!("payload truncated ({e})")))?;
    let tail = r
        .read_u32::<LE>()
        .map_err(|e| corrupt(format!("missing length suffix ({e})")))?;
    if tail != head {
        return Err(corrupt(format!("length prefix {head} != suffix {tail}")));
    }
    Ok(payload)
}

pub(crate) fn f64s_to_bytes(values: impl Iterator<Item = f64>) -> Vec<u8> {
    let mut out = Vec::new();
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub(crate) fn bytes_to_f64s(payload: &[u8], path: &Path, record: &str) -> Result<Vec<f64>> {
    if !payload.len().is_multiple_of(8) {
        return Err(RmxError::CorruptRecord {
            path: path.to_path_buf(),
            record: format!(
                "{record}: payload length {} not a multiple of 8",
                payload.len()
            ),
        });
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}
