//! R-matrix formation kernels.
//!
//! At energy `E` the channel-space R-matrix is the pole sum
//!
//! ```text
//! R_ij(E) = sum_k  w_ik * w_jk / (E - E_k)
//! ```
//!
//! which is a matrix product `R = X * Y` once `X_ik = w_ik / (E - E_k)` and
//! `Y = w^T` are laid out. The naive ascending-k sum is the reference path;
//! the `gemm` variant hands `X * Y` to the optimized matrix-multiply backend
//! and `gemm_blocked` is a hand-tiled product. All variants must agree with
//! the naive path to 1e-12 relative Frobenius; blocked reordering is absorbed
//! by explicit symmetrization.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Result, RmxError};
use crate::types::{Dmat, EnergyMesh, RMatrix, SurfaceAmplitudes};

/// Evaluation closer than this to any pole is an error, never a +-huge value.
/// Resonances are resolved by mesh density, not by on-pole evaluation.
pub const POLE_GUARD: f64 = 1e-10;

/// Minimum tile edge for the blocked variant.
pub const MIN_TILE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    Naive,
    Gemm,
    GemmBlocked { tile: usize },
}

impl KernelVariant {
    pub fn validate(&self) -> Result<()> {
        if let KernelVariant::GemmBlocked { tile } = self {
            if *tile < MIN_TILE {
                return Err(RmxError::InvalidInput(format!(
                    "blocked tile must be >= {MIN_TILE}, got {tile}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelVariant::Naive => write!(f, "naive"),
            KernelVariant::Gemm => write!(f, "gemm"),
            KernelVariant::GemmBlocked { tile } => write!(f, "gemm-blocked:{tile}"),
        }
    }
}

impl FromStr for KernelVariant {
    type Err = RmxError;

    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "naive" => KernelVariant::Naive,
            "gemm" => KernelVariant::Gemm,
            _ => match s.strip_prefix("gemm-blocked:") {
                Some(tile) => {
                    let tile = tile.parse().map_err(|_| {
                        RmxError::InvalidInput(format!("bad tile in kernel variant `{s}`"))
                    })?;
                    KernelVariant::GemmBlocked { tile }
                }
                None => {
                    return Err(RmxError::InvalidInput(format!(
                        "unknown kernel variant `{s}` (expected naive, gemm or gemm-blocked:<tile>)"
                    )))
                }
            },
        };
        v.validate()?;
        Ok(v)
    }
}

fn check_dims(w: &SurfaceAmplitudes, poles: &[f64]) -> Result<()> {
    if w.n_poles() != poles.len() {
        return Err(RmxError::DimensionMismatch(format!(
            "{} amplitude columns vs {} poles",
            w.n_poles(),
            poles.len()
        )));
    }
    Ok(())
}

/// Index and distance of the pole closest to `e`.
pub fn nearest_pole(poles: &[f64], e: f64) -> Option<(usize, f64)> {
    poles
        .iter()
        .enumerate()
        .map(|(k, p)| (k, (e - p).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn guard_energy(poles: &[f64], e: f64) -> Result<()> {
    if let Some((k, dist)) = nearest_pole(poles, e) {
        if dist < POLE_GUARD {
            return Err(RmxError::PoleProximity {
                energy: e,
                pole_index: k,
                distance: dist,
            });
        }
    }
    Ok(())
}

/// Reference pole sum: ascending-k order, upper triangle computed, mirrored.
pub fn form_rmatrix_naive(w: &SurfaceAmplitudes, poles: &[f64], e: f64) -> Result<RMatrix> {
    check_dims(w, poles)?;
    guard_energy(poles, e)?;
    let nchan = w.n_channels();
    let n = poles.len();
    let inv: Vec<f64> = poles.iter().map(|p| 1.0 / (e - p)).collect();

    let mut r = Dmat::zeros(nchan, nchan);
    for i in 0..nchan {
        for j in i..nchan {
            let mut acc = 0.0;
            for (k, ik) in inv.iter().enumerate().take(n) {
                acc += w.w[(i, k)] * w.w[(j, k)] * ik;
            }
            r[(i, j)] = acc;
            r[(j, i)] = acc;
        }
    }
    RMatrix::new(r, e)
}

fn build_x(w: &SurfaceAmplitudes, poles: &[f64], e: f64) -> Dmat {
    let mut x = w.w.clone();
    for (k, p) in poles.iter().enumerate() {
        let inv = 1.0 / (e - p);
        for i in 0..x.nrows() {
            x[(i, k)] *= inv;
        }
    }
    x
}

fn blocked_product(x: &Dmat, y: &Dmat, tile: usize) -> Dmat {
    let (m, kdim) = (x.nrows(), x.ncols());
    let n = y.ncols();
    let mut c = Dmat::zeros(m, n);
    let mut kk = 0;
    while kk < kdim {
        let kend = (kk + tile).min(kdim);
        let mut jj = 0;
        while jj < n {
            let jend = (jj + tile).min(n);
            for i in 0..m {
                for j in jj..jend {
                    let mut acc = 0.0;
                    for k in kk..kend {
                        acc += x[(i, k)] * y[(k, j)];
                    }
                    c[(i, j)] += acc;
                }
            }
            jj = jend;
        }
        kk = kend;
    }
    c
}

pub(crate) fn rmatrix_with_y(
    w: &SurfaceAmplitudes,
    y: &Dmat,
    poles: &[f64],
    e: f64,
    variant: KernelVariant,
) -> Result<RMatrix> {
    guard_energy(poles, e)?;
    let product = match variant {
        KernelVariant::Naive => return form_rmatrix_naive(w, poles, e),
        KernelVariant::Gemm => build_x(w, poles, e) * y,
        KernelVariant::GemmBlocked { tile } => blocked_product(&build_x(w, poles, e), y, tile),
    };
    // (R + R^T)/2 absorbs the non-associative reordering of blocked sums.
    let sym = (&product + product.transpose()) * 0.5;
    RMatrix::new(sym, e)
}

/// `R = X * Y` with `X_ik = w_ik / (E - E_k)` and `Y = w^T`.
pub fn form_rmatrix_gemm(
    w: &SurfaceAmplitudes,
    poles: &[f64],
    e: f64,
    variant: KernelVariant,
) -> Result<RMatrix> {
    check_dims(w, poles)?;
    variant.validate()?;
    let y = w.w.transpose();
    rmatrix_with_y(w, &y, poles, e, variant)
}

/// Forms the R-matrix at every mesh point, ordered by mesh index. `Y = w^T` is
/// built once per batch; `X` is the only energy-dependent factor. The result
/// is bitwise identical however the batch is split across workers.
pub fn form_rmatrix_batch(
    w: &SurfaceAmplitudes,
    poles: &[f64],
    mesh: &EnergyMesh,
    variant: KernelVariant,
) -> Result<Vec<RMatrix>> {
    check_dims(w, poles)?;
    variant.validate()?;
    for (i, e) in mesh.points().enumerate() {
        if let Some((k, dist)) = nearest_pole(poles, e) {
            if dist < POLE_GUARD {
                return Err(RmxError::MeshPoleProximity {
                    mesh_index: i,
                    energy: e,
                    pole_index: k,
                    distance: dist,
                });
            }
        }
    }
    let y = w.w.transpose();
    (0..mesh.n_points())
        .into_par_iter()
        .map(|i| rmatrix_with_y(w, &y, poles, mesh.point(i), variant))
        .collect()
}

/// One benchmark measurement: a kernel variant timed on one (channels, poles)
/// shape. `ratio_vs_naive` is baseline median over this variant's median, so
/// values above 1 mean faster than the baseline. `flagged` marks medians below
/// 100 timer ticks (1 tick = 1 ns), too small to trust.
#[derive(Debug, Clone)]
pub struct KernelBenchRow {
    pub n_channels: usize,
    pub n_poles: usize,
    pub variant: KernelVariant,
    pub median_seconds: f64,
    pub ratio_vs_naive: f64,
    pub flagged: bool,
}

const TIMER_TICK_SECONDS: f64 = 1e-9;
const MIN_TRUSTED_TICKS: f64 = 100.0;

/// Benchmark inputs do not go through the orthonormal case pipeline: any
/// finite amplitude matrix exercises the kernels, and equivalence against the
/// naive path is asserted before any timing is recorded.
fn bench_inputs(n_channels: usize, n_poles: usize) -> (SurfaceAmplitudes, Vec<f64>, f64) {
    let seed = 0x6b65726e ^ ((n_channels as u64) << 32) ^ n_poles as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Dmat::zeros(n_channels, n_poles);
    for i in 0..n_channels {
        for k in 0..n_poles {
            w[(i, k)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let poles: Vec<f64> = (0..n_poles)
        .map(|_| -2.0 + 10.0 * rng.random::<f64>())
        .collect();
    let probe = 8.0 + 2.0 + rng.random::<f64>();
    (SurfaceAmplitudes::new(w).unwrap(), poles, probe)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn relative_frobenius_diff(a: &Dmat, b: &Dmat) -> f64 {
    let diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Times every (shape, variant) pair, one warm-up run discarded, median of
/// `repeats` runs kept. Equivalence with the naive path is checked first;
/// ratios are reported, never asserted against any particular hardware.
pub fn bench_kernels(
    shapes: &[(usize, usize)],
    variants: &[KernelVariant],
    repeats: usize,
) -> Result<Vec<KernelBenchRow>> {
    if shapes.is_empty() || variants.is_empty() || repeats == 0 {
        return Err(RmxError::InvalidInput(
            "bench needs at least one shape, one variant and one repeat".into(),
        ));
    }
    for v in variants {
        v.validate()?;
    }

    let mut rows = Vec::new();
    for &(nchan, npoles) in shapes {
        if nchan == 0 || npoles == 0 {
            return Err(RmxError::InvalidInput(format!(
                "degenerate bench shape {nchan}x{npoles}"
            )));
        }
        let (w, poles, probe) = bench_inputs(nchan, npoles);
        let reference = form_rmatrix_naive(&w, &poles, probe)?;

        let mut medians = Vec::with_capacity(variants.len());
        for &variant in variants {
            let r = form_rmatrix_gemm(&w, &poles, probe, variant)?;
            let diff = relative_frobenius_diff(&r.entries, &reference.entries);
            if diff > 1e-12 {
                return Err(RmxError::DeterminismViolation(format!(
                    "variant {variant} differs from naive by {diff:.3e} on {nchan}x{npoles}"
                )));
            }

            let _warmup = form_rmatrix_gemm(&w, &poles, probe, variant)?;
            let mut times = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let t0 = Instant::now();
                let out = form_rmatrix_gemm(&w, &poles, probe, variant)?;
                times.push(t0.elapsed().as_secs_f64());
                std::hint::black_box(&out);
            }
            medians.push(median(times));
        }

        let baseline = variants
            .iter()
            .position(|v| *v == KernelVariant::Naive)
            .unwrap_or(0);
        let base_median = medians[baseline];
        for (vi, &variant) in variants.iter().enumerate() {
            let m = medians[vi];
            rows.push(KernelBenchRow {
                n_channels: nchan,
                n_poles: npoles,
                variant,
                median_seconds: m,
                ratio_vs_naive: base_median / m,
                flagged: m < MIN_TRUSTED_TICKS * TIMER_TICK_SECONDS,
            });
        }
    }
    Ok(rows)
}

pub fn bench_rows_to_csv(rows: &[KernelBenchRow]) -> String {
    let mut out = String::from("shape,variant,median_seconds,ratio_vs_naive\n");
    for row in rows {
        out.push_str(&format!(
            "{}x{},{},{:e},{:.4}\n",
            row.n_channels, row.n_poles, row.variant, row.median_seconds, row.ratio_vs_naive
        ));
    }
    out
}
