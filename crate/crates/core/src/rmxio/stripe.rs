//! Stripe-count policy and the striped-read simulator.
//!
//! Striping is modeled, not executed: a file is partitioned into fixed-size
//! chunks assigned round-robin to readers (standing in for object storage
//! targets), each reader pulls its chunks concurrently, and the reassembled
//! bytes must equal a plain sequential read.

use std::env;
use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::Path;

use crate::error::{Result, RmxError};

pub const GIB: u64 = 1 << 30;

/// Size-banded stripe counts. Bands are closed on the left:
/// `[0, 1 GiB)` uses the platform default, `[1, 10 GiB)` uses 20,
/// `[10, 100 GiB)` uses 60, and everything from 100 GiB up uses 120.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StripePolicy {
    pub default_count: u32,
}

impl Default for StripePolicy {
    fn default() -> Self {
        // Platform default in the sense of "what the filesystem gives small
        // files"; 2 is a common value.
        StripePolicy { default_count: 2 }
    }
}

impl StripePolicy {
    /// Default policy, with `RMX_STRIPE_DEFAULT` overriding the sub-GiB count.
    pub fn from_env() -> Result<Self> {
        match env::var("RMX_STRIPE_DEFAULT") {
            Err(_) => Ok(StripePolicy::default()),
            Ok(raw) => {
                let default_count: u32 = raw.trim().parse().map_err(|_| {
                    RmxError::InvalidInput(format!("RMX_STRIPE_DEFAULT=`{raw}` is not a count"))
                })?;
                if default_count == 0 {
                    return Err(RmxError::InvalidInput(
                        "RMX_STRIPE_DEFAULT must be >= 1".into(),
                    ));
                }
                Ok(StripePolicy { default_count })
            }
        }
    }
}

/// Band lookup; total over every non-negative size and monotone when the
/// default count stays at or below the 20-stripe band.
pub fn stripe_count_for_size(size: u64, policy: &StripePolicy) -> u32 {
    match size {
        s if s < GIB => policy.default_count,
        s if s < 10 * GIB => 20,
        s if s < 100 * GIB => 60,
        _ => 120,
    }
}

/// One simulated stripe read: which reader touched which byte range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadTraceEntry {
    pub reader: usize,
    pub offset: u64,
    pub length: u64,
}

pub fn trace_to_csv(trace: &[ReadTraceEntry]) -> String {
    let mut out = String::from("reader,offset,length\n");
    for t in trace {
        out.push_str(&format!("{},{},{}\n", t.reader, t.offset, t.length));
    }
    out
}

/// Splits the file into `chunk_size` pieces assigned round-robin across
/// `n_readers`, reads every reader's pieces concurrently, and reassembles them
/// in chunk order. The trace lists (reader, offset, length) per chunk.
pub fn chunked_read(
    path: impl AsRef<Path>,
    chunk_size: u64,
    n_readers: usize,
) -> Result<(Vec<u8>, Vec<ReadTraceEntry>)> {
    let path = path.as_ref();
    if chunk_size == 0 {
        return Err(RmxError::InvalidInput("chunk_size must be > 0".into()));
    }
    if n_readers == 0 {
        return Err(RmxError::InvalidInput("n_readers must be >= 1".into()));
    }
    let file_len = path.metadata().map_err(|e| RmxError::io(path, e))?.len();

    let n_chunks = file_len.div_ceil(chunk_size) as usize;
    let trace: Vec<ReadTraceEntry> = (0..n_chunks)
        .map(|c| {
            let offset = c as u64 * chunk_size;
            ReadTraceEntry {
                reader: c % n_readers,
                offset,
                length: chunk_size.min(file_len - offset),
            }
        })
        .collect();

    // One thread per reader, each pulling only its own chunks.
    let mut chunks: Vec<Option<Vec<u8>>> = vec![None; n_chunks];
    let read_chunk = |entry: &ReadTraceEntry| -> Result<Vec<u8>> {
        let mid_chunk = |e: std::io::Error, offset: u64| {
            RmxError::io(
                path,
                std::io::Error::new(e.kind(), format!("at offset {offset}: {e}")),
            )
        };
        let mut f = File::open(path).map_err(|e| mid_chunk(e, entry.offset))?;
        f.seek(SeekFrom::Start(entry.offset))
            .map_err(|e| mid_chunk(e, entry.offset))?;
        let mut buf = vec![0u8; entry.length as usize];
        f.read_exact(&mut buf)
            .map_err(|e| mid_chunk(e, entry.offset))?;
        Ok(buf)
    };

    let results: Vec<(usize, Result<Vec<u8>>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n_readers)
            .map(|reader| {
                let trace = &trace;
                scope.spawn(move || {
                    trace
                        .iter()
                        .enumerate()
                        .filter(|(_, t)| t.reader == reader)
                        .map(|(c, t)| (c, read_chunk(t)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("stripe reader thread panicked"))
            .collect()
    });
    for (c, chunk) in results {
        chunks[c] = Some(chunk?);
    }

    let mut bytes = Vec::with_capacity(file_len as usize);
    for chunk in chunks {
        bytes.extend_from_slice(&chunk.expect("every chunk assigned to a reader"));
    }
    Ok((bytes, trace))
}
