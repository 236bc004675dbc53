//! Per-state dipole amplitude files ("D files").
//!
//! Unlike the H file these are read randomly: the header carries a byte-offset
//! index, one entry per initial state, so concurrent readers can each seek to
//! their own state record without touching the rest of the file.

use std::fs::File;
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use byteorder::{ByteOrder, LE};

use crate::error::{Result, RmxError};

use super::{bytes_to_f64s, f64s_to_bytes, read_record, write_record};

pub const DFILE_MAGIC: [u8; 4] = *b"RMXD";
pub const DFILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DipoleFileHeader {
    pub version: u32,
    pub n_initial_states: usize,
    pub n_poles: usize,
    /// Absolute byte offset of each state's record, strictly increasing.
    pub offsets: Vec<u64>,
}

fn header_payload(n_poles: usize, offsets: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * offsets.len());
    out.extend_from_slice(&DFILE_MAGIC);
    out.extend_from_slice(&DFILE_VERSION.to_le_bytes());
    out.extend_from_slice(&(offsets.len() as u32).to_le_bytes());
    out.extend_from_slice(&(n_poles as u32).to_le_bytes());
    for off in offsets {
        out.extend_from_slice(&off.to_le_bytes());
    }
    out
}

fn parse_header(payload: &[u8], path: &Path) -> Result<DipoleFileHeader> {
    let format_err = |detail: String| RmxError::Format {
        path: path.to_path_buf(),
        detail,
    };
    if payload.len() < 16 {
        return Err(format_err(format!(
            "header payload is {} bytes, expected at least 16",
            payload.len()
        )));
    }
    if payload[0..4] != DFILE_MAGIC {
        return Err(format_err(format!(
            "bad magic {:?}, expected {:?}",
            &payload[0..4],
            DFILE_MAGIC
        )));
    }
    let version = LE::read_u32(&payload[4..8]);
    if version != DFILE_VERSION {
        return Err(format_err(format!(
            "unsupported version {version}, expected {DFILE_VERSION}"
        )));
    }
    let n_initial_states = LE::read_u32(&payload[8..12]) as usize;
    let n_poles = LE::read_u32(&payload[12..16]) as usize;
    if payload.len() != 16 + 8 * n_initial_states {
        return Err(format_err(format!(
            "header payload is {} bytes for {n_initial_states} states",
            payload.len()
        )));
    }
    let offsets: Vec<u64> = payload[16..].chunks_exact(8).map(LE::read_u64).collect();
    if offsets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format_err(
            "state offsets are not strictly increasing".into(),
        ));
    }
    Ok(DipoleFileHeader {
        version,
        n_initial_states,
        n_poles,
        offsets,
    })
}

/// Writes one amplitude block per initial state; returns the total byte count.
pub fn write_dipole(path: impl AsRef<Path>, blocks: &[Vec<f64>]) -> Result<u64> {
    let path = path.as_ref();
    if blocks.is_empty() {
        return Err(RmxError::InvalidInput(
            "dipole file needs at least one state block".into(),
        ));
    }
    let n_poles = blocks[0].len();
    if n_poles == 0 || blocks.iter().any(|b| b.len() != n_poles) {
        return Err(RmxError::DimensionMismatch(
            "all state blocks must share one non-zero length".into(),
        ));
    }

    // Record layout is fixed, so offsets are known before anything is written.
    let header_total = 8 + 16 + 8 * blocks.len() as u64;
    let record_total = 8 + 8 * n_poles as u64;
    let offsets: Vec<u64> = (0..blocks.len())
        .map(|s| header_total + s as u64 * record_total)
        .collect();

    let file = File::create(path).map_err(|e| RmxError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut bytes = write_record(&mut w, &header_payload(n_poles, &offsets), path, "header")?;
    for (s, block) in blocks.iter().enumerate() {
        bytes += write_record(
            &mut w,
            &f64s_to_bytes(block.iter().copied()),
            path,
            &format!("state {s}"),
        )?;
    }
    w.flush().map_err(|e| RmxError::io(path, e))?;
    Ok(bytes)
}

pub fn read_dipole_header(path: impl AsRef<Path>) -> Result<DipoleFileHeader> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| RmxError::io(path, e))?;
    parse_header(&read_record(&mut file, path, "header")?, path)
}

/// Reads exactly one state's amplitude block via the header offset index.
pub fn read_dipole_state(path: impl AsRef<Path>, state_index: usize) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| RmxError::io(path, e))?;
    let header = parse_header(&read_record(&mut file, path, "header")?, path)?;
    if state_index >= header.n_initial_states {
        return Err(RmxError::InvalidInput(format!(
            "state index {state_index} out of range; file holds {} states",
            header.n_initial_states
        )));
    }
    file.seek(SeekFrom::Start(header.offsets[state_index]))
        .map_err(|e| RmxError::io(path, e))?;
    let record = format!("state {state_index}");
    let block = bytes_to_f64s(&read_record(&mut file, path, &record)?, path, &record)?;
    if block.len() != header.n_poles {
        return Err(RmxError::CorruptRecord {
            path: path.to_path_buf(),
            record: format!(
                "{record}: {} values disagree with header n_poles {}",
                block.len(),
                header.n_poles
            ),
        });
    }
    Ok(block)
}

/// Copies only the kept states into a new file, re-indexed 0..keep.len().
/// Returns the new file size in bytes.
pub fn reduce_dipole(
    in_path: impl AsRef<Path>,
    keep: &[usize],
    out_path: impl AsRef<Path>,
) -> Result<u64> {
    let in_path = in_path.as_ref();
    if keep.is_empty() {
        return Err(RmxError::InvalidInput("keep list must not be empty".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RmxError::InvalidInput(
            "keep list must be strictly increasing".into(),
        ));
    }
    let header = read_dipole_header(in_path)?;
    if *keep.last().expect("non-empty") >= header.n_initial_states {
        return Err(RmxError::InvalidInput(format!(
            "keep list reaches state {}, file holds {}",
            keep.last().expect("non-empty"),
            header.n_initial_states
        )));
    }
    let blocks: Vec<Vec<f64>> = keep
        .iter()
        .map(|&s| read_dipole_state(in_path, s))
        .collect::<Result<_>>()?;
    write_dipole(out_path, &blocks)
}

/// Reads several distinct states concurrently, one reader thread per state.
pub fn read_dipole_states_concurrent(
    path: impl AsRef<Path>,
    states: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    std::thread::scope(|scope| {
        let handles: Vec<_> = states
            .iter()
            .map(|&s| scope.spawn(move || read_dipole_state(path, s)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("dipole reader thread panicked"))
            .collect()
    })
}
