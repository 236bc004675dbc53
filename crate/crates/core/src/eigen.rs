//! Full diagonalization of Hamiltonian blocks.
//!
//! The contract is all eigenpairs or nothing: eigenvalues ascending, residual
//! `||H v_k - E_k v_k|| / (1 + |E_k|) <= 1e-9` and orthogonality
//! `max |V^T V - I| <= 1e-10` are hard postconditions checked on every solve,
//! not best-effort properties. Blocks are independent, so a set of them maps
//! across workers with bit-identical results.

use rayon::prelude::*;

use crate::error::{Result, RmxError};
use crate::synth::BoundaryProjector;
use crate::types::{Dmat, EigenSystem, SurfaceAmplitudes};

const SYMMETRY_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;
const ORTHO_TOL: f64 = 1e-10;

/// Diagonalizes one real symmetric block, returning every eigenpair.
pub fn diagonalize_block(h: &Dmat) -> Result<EigenSystem> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(RmxError::DimensionMismatch(format!(
            "expected a non-empty square block, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.amax();
    let sym_tol = SYMMETRY_TOL * (1.0 + scale);
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            max_dev = max_dev.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    if max_dev > sym_tol {
        return Err(RmxError::Asymmetric {
            max_dev,
            tol: sym_tol,
        });
    }

    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.clone(), f64::EPSILON, 1000 * n)
        .ok_or_else(|| RmxError::NonConvergence {
            block: format!("{n}x{n} symmetric block"),
        })?;

    // Ascending eigenvalue order; ties keep factorization output order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Dmat::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        vectors.set_column(k, &eig.eigenvectors.column(src));
    }
    fix_column_signs(&mut vectors);

    let es = EigenSystem::new(values, vectors)?;

    let defect = es.orthogonality_defect();
    if defect > ORTHO_TOL {
        return Err(RmxError::NonConvergence {
            block: format!("{n}x{n} block: orthogonality defect {defect:.3e} > {ORTHO_TOL:.0e}"),
        });
    }
    let residual = max_residual(h, &es);
    if residual > RESIDUAL_TOL {
        return Err(RmxError::NonConvergence {
            block: format!("{n}x{n} block: residual {residual:.3e} > {RESIDUAL_TOL:.0e}"),
        });
    }
    Ok(es)
}

/// Sign convention: the largest-magnitude component of each column is positive,
/// ties broken by lowest index.
fn fix_column_signs(v: &mut Dmat) {
    let n = v.nrows();
    for j in 0..v.ncols() {
        let mut lead = 0;
        for i in 1..n {
            if v[(i, j)].abs() > v[(lead, j)].abs() {
                lead = i;
            }
        }
        if v[(lead, j)] < 0.0 {
            v.column_mut(j).neg_mut();
        }
    }
}

/// max_k ||H v_k - E_k v_k||_2 / (1 + |E_k|)
pub fn max_residual(h: &Dmat, es: &EigenSystem) -> f64 {
    let hv = h * &es.eigenvectors;
    let mut worst: f64 = 0.0;
    for (k, &e) in es.eigenvalues.iter().enumerate() {
        let r = (hv.column(k) - es.eigenvectors.column(k) * e).norm();
        worst = worst.max(r / (1.0 + e.abs()));
    }
    worst
}

/// Diagonalizes a set of independent blocks across the ambient worker pool.
/// Per-block arithmetic is sequential, so the result is bit-identical to a
/// sequential map.
pub fn diagonalize_blocks(blocks: &[Dmat]) -> Result<Vec<EigenSystem>> {
    blocks.par_iter().map(diagonalize_block).collect()
}

/// Channel-space surface amplitudes `w = B V`.
pub fn surface_amplitudes(b: &BoundaryProjector, es: &EigenSystem) -> Result<SurfaceAmplitudes> {
    if b.b.ncols() != es.order() {
        return Err(RmxError::DimensionMismatch(format!(
            "projector is {}x{} but eigensystem order is {}",
            b.b.nrows(),
            b.b.ncols(),
            es.order()
        )));
    }
    SurfaceAmplitudes::new(&b.b * &es.eigenvectors)
}
