//! Hamiltonian eigendata files ("H files").
//!
//! Record order: header, eigenvalues (f64 x N), N eigenvector columns
//! (f64 x N each), then n_channels amplitude rows (f64 x N each).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use byteorder::{ByteOrder, LE};

use crate::error::{Result, RmxError};
use crate::types::{CaseDefinition, Dmat, EigenSystem, SurfaceAmplitudes};

use super::{
    bytes_to_f64s, f64s_to_bytes, read_record, write_record, FileOpener, ReadMode, StdOpener,
};

pub const HFILE_MAGIC: [u8; 4] = *b"RMXH";
pub const HFILE_VERSION: u32 = 1;
const HEADER_PAYLOAD_LEN: usize = 48;

/// Identifies the file and echoes the case it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct HFileHeader {
    pub version: u32,
    pub case: CaseDefinition,
}

/// Everything one worker holds after reading an H file.
#[derive(Debug, Clone, PartialEq)]
pub struct HFileData {
    pub header: HFileHeader,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Dmat,
    pub amplitudes: Dmat,
}

impl HFileData {
    pub fn poles(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        EigenSystem::new(self.eigenvalues.clone(), self.eigenvectors.clone())
    }

    pub fn surface_amplitudes(&self) -> Result<SurfaceAmplitudes> {
        SurfaceAmplitudes::new(self.amplitudes.clone())
    }
}

fn header_payload(case: &CaseDefinition) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_PAYLOAD_LEN);
    out.extend_from_slice(&HFILE_MAGIC);
    out.extend_from_slice(&HFILE_VERSION.to_le_bytes());
    out.extend_from_slice(&(case.n_channels as u32).to_le_bytes());
    out.extend_from_slice(&(case.n_poles as u32).to_le_bytes());
    out.extend_from_slice(&case.pole_energy_range.0.to_le_bytes());
    out.extend_from_slice(&case.pole_energy_range.1.to_le_bytes());
    out.extend_from_slice(&case.boundary_seed.to_le_bytes());
    out.extend_from_slice(&case.hamiltonian_seed.to_le_bytes());
    out
}

fn parse_header(payload: &[u8], path: &Path) -> Result<HFileHeader> {
    let format_err = |detail: String| RmxError::Format {
        path: path.to_path_buf(),
        detail,
    };
    if payload.len() != HEADER_PAYLOAD_LEN {
        return Err(format_err(format!(
            "header payload is {} bytes, expected {HEADER_PAYLOAD_LEN}",
            payload.len()
        )));
    }
    if payload[0..4] != HFILE_MAGIC {
        return Err(format_err(format!(
            "bad magic {:?}, expected {:?}",
            &payload[0..4],
            HFILE_MAGIC
        )));
    }
    let version = LE::read_u32(&payload[4..8]);
    if version != HFILE_VERSION {
        return Err(format_err(format!(
            "unsupported version {version}, expected {HFILE_VERSION}"
        )));
    }
    let case = CaseDefinition::new(
        LE::read_u32(&payload[8..12]) as usize,
        LE::read_u32(&payload[12..16]) as usize,
        (
            LE::read_f64(&payload[16..24]),
            LE::read_f64(&payload[24..32]),
        ),
        LE::read_u64(&payload[32..40]),
        LE::read_u64(&payload[40..48]),
    )?;
    Ok(HFileHeader { version, case })
}

/// Writes one case's eigendata; returns the total byte count.
pub fn write_hfile(
    path: impl AsRef<Path>,
    case: &CaseDefinition,
    es: &EigenSystem,
    amplitudes: &SurfaceAmplitudes,
) -> Result<u64> {
    let path = path.as_ref();
    case.validate()?;
    let n = case.n_poles;
    if es.order() != n {
        return Err(RmxError::DimensionMismatch(format!(
            "eigensystem order {} vs case n_poles {n}",
            es.order()
        )));
    }
    if amplitudes.n_channels() != case.n_channels || amplitudes.n_poles() != n {
        return Err(RmxError::DimensionMismatch(format!(
            "amplitudes are {}x{}, case wants {}x{n}",
            amplitudes.n_channels(),
            amplitudes.n_poles(),
            case.n_channels
        )));
    }

    let file = File::create(path).map_err(|e| RmxError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut bytes = 0;
    bytes += write_record(&mut w, &header_payload(case), path, "header")?;
    bytes += write_record(
        &mut w,
        &f64s_to_bytes(es.eigenvalues.iter().copied()),
        path,
        "eigenvalues",
    )?;
    for k in 0..n {
        bytes += write_record(
            &mut w,
            &f64s_to_bytes(es.eigenvectors.column(k).iter().copied()),
            path,
            &format!("eigenvector column {k}"),
        )?;
    }
    for i in 0..case.n_channels {
        bytes += write_record(
            &mut w,
            &f64s_to_bytes(amplitudes.w.row(i).iter().copied()),
            path,
            &format!("amplitude row {i}"),
        )?;
    }
    w.flush().map_err(|e| RmxError::io(path, e))?;
    Ok(bytes)
}

fn parse_hfile(mut r: impl Read, path: &Path) -> Result<HFileData> {
    let header = parse_header(&read_record(&mut r, path, "header")?, path)?;
    let n = header.case.n_poles;
    let nchan = header.case.n_channels;

    let expect_len = |values: &[f64], record: &str| -> Result<()> {
        if values.len() != n {
            return Err(RmxError::CorruptRecord {
                path: path.to_path_buf(),
                record: format!("{record}: {} values, expected {n}", values.len()),
            });
        }
        Ok(())
    };

    let eigenvalues = bytes_to_f64s(
        &read_record(&mut r, path, "eigenvalues")?,
        path,
        "eigenvalues",
    )?;
    expect_len(&eigenvalues, "eigenvalues")?;

    let mut eigenvectors = Dmat::zeros(n, n);
    for k in 0..n {
        let record = format!("eigenvector column {k}");
        let column = bytes_to_f64s(&read_record(&mut r, path, &record)?, path, &record)?;
        expect_len(&column, &record)?;
        for (i, v) in column.iter().enumerate() {
            eigenvectors[(i, k)] = *v;
        }
    }

    let mut amplitudes = Dmat::zeros(nchan, n);
    for i in 0..nchan {
        let record = format!("amplitude row {i}");
        let row = bytes_to_f64s(&read_record(&mut r, path, &record)?, path, &record)?;
        expect_len(&row, &record)?;
        for (k, v) in row.iter().enumerate() {
            amplitudes[(i, k)] = *v;
        }
    }

    Ok(HFileData {
        header,
        eigenvalues,
        eigenvectors,
        amplitudes,
    })
}

/// Reads the file for `n_workers` workers under the given distribution mode.
pub fn read_hfile(
    path: impl AsRef<Path>,
    mode: ReadMode,
    n_workers: usize,
) -> Result<Vec<HFileData>> {
    read_hfile_with(&StdOpener, path, mode, n_workers)
}

/// [`read_hfile`] with an injected opener. Under `RootReadBroadcast` exactly
/// one open happens; under `AllRanksRead` every worker opens the file itself,
/// concurrently. Both modes hand every worker bit-identical data.
pub fn read_hfile_with(
    opener: &dyn FileOpener,
    path: impl AsRef<Path>,
    mode: ReadMode,
    n_workers: usize,
) -> Result<Vec<HFileData>> {
    let path = path.as_ref();
    if n_workers == 0 {
        return Err(RmxError::InvalidInput("n_workers must be >= 1".into()));
    }
    match mode {
        ReadMode::RootReadBroadcast => {
            let reader = opener.open(path).map_err(|e| RmxError::io(path, e))?;
            let root = parse_hfile(reader, path)?;
            Ok(vec![root; n_workers])
        }
        ReadMode::AllRanksRead => {
            let results: Vec<Result<HFileData>> = std::thread::scope(|scope| {
                let handles: Vec<_> = (0..n_workers)
                    .map(|_| {
                        scope.spawn(|| {
                            let reader = opener.open(path).map_err(|e| RmxError::io(path, e))?;
                            parse_hfile(reader, path)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("reader thread panicked"))
                    .collect()
            });
            results.into_iter().collect()
        }
    }
}
