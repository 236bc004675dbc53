//! Desk-scale outer-region R-matrix pipeline.
//!
//! The pieces, in pipeline order:
//!
//! - [`synth`] — deterministic synthetic Hamiltonian blocks with a known
//!   spectrum, plus row-orthonormal boundary projectors.
//! - [`eigen`] — full symmetric eigensolves (all eigenpairs, orthogonality as
//!   a hard postcondition) and surface amplitudes `w = B V`.
//! - [`kernel`] — R-matrix formation at one or many energies: reference pole
//!   sum and interchangeable GEMM variants, plus the kernel benchmark.
//! - [`spectrum`] — pole-avoiding meshes, response sweeps, Gaussian
//!   broadening, admixture, Rydberg-series prediction and Lorentzian width
//!   extraction.
//! - [`rmxio`] — sequential binary H/D file formats with Fortran-style record
//!   framing, read-distribution modes, dipole reduction and the stripe-count
//!   policy.
//! - [`sched`] — block/energy work partitioning, the strong-scaling bench and
//!   the timing report generator.
//!
//! Energies are in Rydberg throughout; eV appears only at I/O boundaries.

pub mod eigen;
pub mod error;
pub mod kernel;
pub mod rmxio;
pub mod sched;
pub mod spectrum;
pub mod synth;
pub mod types;

pub use error::{Result, RmxError};
pub use types::{
    CaseDefinition, Dmat, Dvec, EigenSystem, EnergyMesh, RMatrix, Spectrum, SurfaceAmplitudes,
};
