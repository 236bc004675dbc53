//! Work partitioning, the strong-scaling benchmark and the timing report
//! generator.
//!
//! The speedup baseline is the smallest measured worker count, not one worker:
//! the report reads as "times faster than the smallest configuration", which
//! is how the scaling tables are laid out.

use std::fmt::Write as _;
use std::ops::Range;
use std::time::Instant;

use crate::error::{Result, RmxError};
use crate::kernel::KernelVariant;
use crate::spectrum::sweep_response;
use crate::synth;
use crate::types::{CaseDefinition, EnergyMesh};

/// One measured configuration with its derived columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub worker_count: usize,
    pub wall_seconds: f64,
    /// T(smallest worker count) / T(this row); 1.0 exactly on the baseline row.
    pub speedup: f64,
    /// worker_count * wall_seconds / 3600.
    pub core_hours: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

impl TimingReport {
    /// Derives speedup and core-hours from raw (worker count, wall seconds)
    /// measurements. The baseline is the row with the smallest worker count.
    pub fn from_timings(timings: &[(usize, f64)]) -> Result<Self> {
        if timings.is_empty() {
            return Err(RmxError::InvalidInput("empty timing set".into()));
        }
        if timings
            .iter()
            .any(|(count, secs)| *count == 0 || !secs.is_finite() || *secs <= 0.0)
        {
            return Err(RmxError::InvalidInput(
                "worker counts must be >= 1 and wall times positive".into(),
            ));
        }
        let base = timings
            .iter()
            .min_by_key(|(count, _)| *count)
            .expect("non-empty");
        let base_seconds = base.1;
        let rows = timings
            .iter()
            .map(|&(worker_count, wall_seconds)| TimingRow {
                worker_count,
                wall_seconds,
                speedup: if worker_count == base.0 {
                    1.0
                } else {
                    base_seconds / wall_seconds
                },
                core_hours: worker_count as f64 * wall_seconds / 3600.0,
            })
            .collect();
        Ok(TimingReport { rows })
    }
}

/// Upper-triangle block indices (i, j) with i <= j, row-major: the
/// nchan*(nchan+1)/2 independent channel-pair blocks.
pub fn enumerate_blocks(nchan: usize) -> Vec<(usize, usize)> {
    let mut blocks = Vec::with_capacity(nchan * (nchan + 1) / 2);
    for i in 0..nchan {
        for j in i..nchan {
            blocks.push((i, j));
        }
    }
    blocks
}

/// Contiguous, disjoint, covering index ranges with sizes differing by at most
/// one, larger ranges first. `n_workers` beyond `n_points` yields empty
/// trailing ranges.
pub fn partition_energies(n_points: usize, n_workers: usize) -> Vec<Range<usize>> {
    assert!(n_workers >= 1, "n_workers must be >= 1");
    let base = n_points / n_workers;
    let extra = n_points % n_workers;
    let mut ranges = Vec::with_capacity(n_workers);
    let mut at = 0;
    for w in 0..n_workers {
        let size = base + usize::from(w < extra);
        ranges.push(at..at + size);
        at += size;
    }
    ranges
}

/// Median wall time of `runs` timed executions after one discarded warm-up.
fn median_seconds<T>(runs: usize, mut op: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let warmup = op()?;
    let mut times = Vec::with_capacity(runs);
    let mut last = warmup;
    for _ in 0..runs {
        let t0 = Instant::now();
        last = op()?;
        times.push(t0.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    };
    Ok((median, last))
}

/// Runs the full sweep pipeline once per worker count and reports median-of-3
/// wall times. Output spectra must be bitwise identical across worker counts
/// before any timing is reported; a mismatch is a hard error.
pub fn run_scaling_bench(
    case: &CaseDefinition,
    mesh: &EnergyMesh,
    worker_counts: &[usize],
    variant: KernelVariant,
) -> Result<TimingReport> {
    if worker_counts.is_empty() {
        return Err(RmxError::InvalidInput("no worker counts given".into()));
    }
    if worker_counts.contains(&0) {
        return Err(RmxError::InvalidInput("worker counts must be >= 1".into()));
    }
    if worker_counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RmxError::InvalidInput(
            "worker counts must be strictly ascending".into(),
        ));
    }

    let h = synth::build_hamiltonian(case)?;
    let es = crate::eigen::diagonalize_block(&h)?;
    let b = synth::build_boundary_projector(case)?;
    let w = crate::eigen::surface_amplitudes(&b, &es)?;
    let poles = es.eigenvalues;

    let mut timings = Vec::with_capacity(worker_counts.len());
    let mut reference: Option<Vec<u64>> = None;
    for &count in worker_counts {
        let (median, spectrum) =
            median_seconds(3, || sweep_response(&w, &poles, mesh, variant, count))?;
        let bits: Vec<u64> = spectrum.values.iter().map(|v| v.to_bits()).collect();
        match &reference {
            None => reference = Some(bits),
            Some(expect) => {
                if *expect != bits {
                    return Err(RmxError::DeterminismViolation(format!(
                        "sweep output changed between worker counts {} and {count}",
                        worker_counts[0]
                    )));
                }
            }
        }
        timings.push((count, median));
    }
    TimingReport::from_timings(&timings)
}

/// Renders the report with the columns in scaling-table order: workers,
/// absolute timing (s), speed-up factor, total core-hours. Times and factors
/// carry 4 decimal places.
pub fn render_report(report: &TimingReport, format: ReportFormat) -> Result<String> {
    if report.rows.is_empty() {
        return Err(RmxError::InvalidInput("empty report".into()));
    }
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str("workers,wall_seconds,speedup,core_hours\n");
            for r in &report.rows {
                writeln!(
                    out,
                    "{},{:.4},{:.4},{:.4}",
                    r.worker_count, r.wall_seconds, r.speedup, r.core_hours
                )
                .expect("string write");
            }
        }
        ReportFormat::Text => {
            writeln!(
                out,
                "{:>10}  {:>18}  {:>15}  {:>16}",
                "workers", "absolute timing (s)", "speed-up factor", "total core-hours"
            )
            .expect("string write");
            for r in &report.rows {
                writeln!(
                    out,
                    "{:>10}  {:>18.4}  {:>15.4}  {:>16.4}",
                    r.worker_count, r.wall_seconds, r.speedup, r.core_hours
                )
                .expect("string write");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_block_enumeration() {
        assert_eq!(enumerate_blocks(1), vec![(0, 0)]);
    }

    #[test]
    fn three_channel_enumeration_order() {
        assert_eq!(
            enumerate_blocks(3),
            vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
        );
    }

    #[test]
    fn production_scale_block_count() {
        assert_eq!(enumerate_blocks(400).len(), 80_200);
    }

    #[test]
    fn partition_trivial_and_balanced() {
        assert_eq!(partition_energies(10, 1), vec![0..10]);
        assert_eq!(partition_energies(10, 3), vec![0..4, 4..7, 7..10]);
    }

    #[test]
    fn partition_production_scale() {
        let ranges = partition_energies(409_600, 1024);
        assert_eq!(ranges.len(), 1024);
        assert!(ranges.iter().all(|r| r.len() == 400));
    }

    #[test]
    fn partition_more_workers_than_points() {
        let ranges = partition_energies(3, 5);
        assert_eq!(ranges.len(), 5);
        let sizes: Vec<usize> = ranges.iter().map(|r| r.len()).collect();
        assert_eq!(sizes, vec![1, 1, 1, 0, 0]);
        assert_eq!(ranges.last().unwrap().end, 3);
    }

    #[test]
    fn report_baseline_row_has_exact_unit_speedup() {
        let report = TimingReport::from_timings(&[(4, 2.0), (1, 3.0)]).unwrap();
        let base = report.rows.iter().find(|r| r.worker_count == 1).unwrap();
        assert_eq!(base.speedup, 1.0);
        assert_eq!(base.core_hours, 3.0 / 3600.0);
    }

    #[test]
    fn report_rejects_bad_rows() {
        assert!(TimingReport::from_timings(&[]).is_err());
        assert!(TimingReport::from_timings(&[(0, 1.0)]).is_err());
        assert!(TimingReport::from_timings(&[(1, 0.0)]).is_err());
    }

    #[test]
    fn render_single_row() {
        let report = TimingReport::from_timings(&[(1, 1.5)]).unwrap();
        let text = render_report(&report, ReportFormat::Text).unwrap();
        assert_eq!(text.lines().count(), 2);
        let csv = render_report(&report, ReportFormat::Csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("workers,wall_seconds,speedup,core_hours"));
    }

    #[test]
    fn csv_report_parses_back() {
        let report =
            TimingReport::from_timings(&[(1024, 584.19), (2048, 430.80), (4096, 223.08)]).unwrap();
        let csv = render_report(&report, ReportFormat::Csv).unwrap();
        for (line, row) in csv.lines().skip(1).zip(&report.rows) {
            let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields.len(), 4);
            assert_eq!(fields[0] as usize, row.worker_count);
            assert!((fields[2] - row.speedup).abs() < 5e-5);
        }
    }
}
