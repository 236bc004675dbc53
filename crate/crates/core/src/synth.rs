//! Deterministic synthetic inputs: Hamiltonian blocks with a known spectrum
//! and row-orthonormal boundary projectors.
//!
//! A block is built as `H = Q^T D Q` where `D` holds seeded uniform draws from
//! the case's pole energy window and `Q` is a seeded random orthogonal matrix
//! (QR of a standard-normal matrix with the R diagonal sign-fixed). Conjugation
//! preserves the spectrum, so the eigenvalues of every generated block are
//! known a priori — the oracle the eigensolve tests lean on.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, RmxError};
use crate::types::{CaseDefinition, Dmat};

/// n_channels x n_poles matrix with orthonormal rows, mapping pole-space
/// eigenvectors onto channel-space boundary amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProjector {
    pub b: Dmat,
}

impl BoundaryProjector {
    /// Validates `B B^T = I` to 1e-10 (max entry deviation).
    pub fn new(b: Dmat) -> Result<Self> {
        if b.nrows() > b.ncols() {
            return Err(RmxError::DimensionMismatch(format!(
                "projector has {} rows but only {} columns; orthonormal rows impossible",
                b.nrows(),
                b.ncols()
            )));
        }
        let p = BoundaryProjector { b };
        let defect = p.orthonormality_defect();
        if defect > 1e-10 {
            return Err(RmxError::InvalidInput(format!(
                "projector rows not orthonormal: max |B B^T - I| = {defect:.3e}"
            )));
        }
        Ok(p)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.b.nrows();
        let gram = &self.b * self.b.transpose();
        (gram - Dmat::identity(n, n)).amax()
    }
}

fn standard_normal_matrix(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize) -> Dmat {
    // Row-major fill so the draw order is part of the format.
    let mut m = Dmat::zeros(nrows, ncols);
    for i in 0..nrows {
        for j in 0..ncols {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    m
}

/// Seeded uniform pole draws, in draw order (not sorted).
pub fn pole_draws(case: &CaseDefinition) -> Result<Vec<f64>> {
    case.validate()?;
    let (lo, hi) = case.pole_energy_range;
    let mut rng = ChaCha8Rng::seed_from_u64(case.hamiltonian_seed);
    Ok((0..case.n_poles)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect())
}

/// Builds the real symmetric block `H = Q^T D Q`. Exactly symmetric by
/// construction: the upper triangle is computed, the lower mirrored.
pub fn build_hamiltonian(case: &CaseDefinition) -> Result<Dmat> {
    case.validate()?;
    let n = case.n_poles;
    let (lo, hi) = case.pole_energy_range;

    // The diagonal draws and the Q draws share one seeded stream; pole_draws
    // reproduces the first n draws of the same stream.
    let mut rng = ChaCha8Rng::seed_from_u64(case.hamiltonian_seed);
    let d: Vec<f64> = (0..n)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect();
    let q = random_orthogonal(&mut rng, n);

    // H = Q^T D Q via a row scaling, then mirror the upper triangle.
    let mut dq = q.clone();
    for k in 0..n {
        for j in 0..n {
            dq[(k, j)] *= d[k];
        }
    }
    let mut h = q.transpose() * dq;
    for i in 0..n {
        for j in (i + 1)..n {
            h[(j, i)] = h[(i, j)];
        }
    }
    Ok(h)
}

/// Seeded random orthogonal matrix: QR of a standard-normal matrix with the
/// sign of each R diagonal entry folded into the corresponding Q column.
fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Dmat {
    let a = standard_normal_matrix(rng, n, n);
    let (mut q, r) = a.qr().unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Seeded random n_channels x n_poles matrix, rows orthonormalized (QR of the
/// transpose, sign-fixed), deterministic per `boundary_seed`.
pub fn build_boundary_projector(case: &CaseDefinition) -> Result<BoundaryProjector> {
    case.validate()?;
    if case.n_channels > case.n_poles {
        return Err(RmxError::DimensionMismatch(format!(
            "n_channels ({}) > n_poles ({}): orthonormal rows impossible",
            case.n_channels, case.n_poles
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(case.boundary_seed);
    let raw = standard_normal_matrix(&mut rng, case.n_channels, case.n_poles);
    let (mut q, r) = raw.transpose().qr().unpack();
    for j in 0..case.n_channels {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    BoundaryProjector::new(q.transpose())
}

/// Synthetic per-state dipole amplitude blocks, one vector of n_poles values
/// per initial state, seeded off the case's boundary seed.
pub fn build_dipole_blocks(case: &CaseDefinition, n_states: usize) -> Result<Vec<Vec<f64>>> {
    case.validate()?;
    if n_states == 0 {
        return Err(RmxError::InvalidInput("n_states must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(case.boundary_seed ^ 0x6449_5030);
    Ok((0..n_states)
        .map(|_| {
            (0..case.n_poles)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect())
}

pub fn load_case(path: impl AsRef<Path>) -> Result<CaseDefinition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| RmxError::io(path, e))?;
    CaseDefinition::from_key_value(&text)
}

pub fn save_case(case: &CaseDefinition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, case.to_key_value()).map_err(|e| RmxError::io(path, e))
}
