//! Shared domain types and numeric conventions.
//!
//! Every energy inside the library is carried in Rydberg. Electron-volt values
//! exist only at I/O boundaries (CSV columns, CLI flags), converted with
//! [`RY_IN_EV`], so eV -> Ry -> eV round-trips to better than 1e-12 relative.

use crate::error::{Result, RmxError};

pub type Dmat = nalgebra::DMatrix<f64>;
pub type Dvec = nalgebra::DVector<f64>;

/// 1 Ry in eV. Applied only when presenting or parsing energies.
pub const RY_IN_EV: f64 = 13.605693;

pub fn ry_to_ev(e_ry: f64) -> f64 {
    e_ry * RY_IN_EV
}

pub fn ev_to_ry(e_ev: f64) -> f64 {
    e_ev / RY_IN_EV
}

pub fn mev_to_ry(e_mev: f64) -> f64 {
    ev_to_ry(e_mev * 1e-3)
}

/// Synthetic coupled-channel scattering case: channel/pole counts, the energy
/// window the pole spectrum is drawn from, and the two RNG seeds that make a
/// case bit-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDefinition {
    pub n_channels: usize,
    pub n_poles: usize,
    /// (low, high) in Rydberg. A degenerate window (low == high) pins every
    /// pole to one energy, which the 1x1 smoke cases rely on.
    pub pole_energy_range: (f64, f64),
    pub boundary_seed: u64,
    pub hamiltonian_seed: u64,
}

impl CaseDefinition {
    pub fn new(
        n_channels: usize,
        n_poles: usize,
        pole_energy_range: (f64, f64),
        boundary_seed: u64,
        hamiltonian_seed: u64,
    ) -> Result<Self> {
        let case = CaseDefinition {
            n_channels,
            n_poles,
            pole_energy_range,
            boundary_seed,
            hamiltonian_seed,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(RmxError::InvalidCase("n_channels must be >= 1".into()));
        }
        if self.n_poles < self.n_channels {
            return Err(RmxError::InvalidCase(format!(
                "n_poles ({}) must be >= n_channels ({})",
                self.n_poles, self.n_channels
            )));
        }
        let (lo, hi) = self.pole_energy_range;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(RmxError::InvalidCase(format!(
                "pole_energy_range ({lo}, {hi}) must be finite with low <= high"
            )));
        }
        Ok(())
    }

    /// Plain-text `key = value` serialization (one field per line, `#` comments).
    pub fn to_key_value(&self) -> String {
        format!(
            "# coupled-channel case definition\n\
             n_channels = {}\n\
             n_poles = {}\n\
             pole_low = {}\n\
             pole_high = {}\n\
             boundary_seed = {}\n\
             hamiltonian_seed = {}\n",
            self.n_channels,
            self.n_poles,
            self.pole_energy_range.0,
            self.pole_energy_range.1,
            self.boundary_seed,
            self.hamiltonian_seed,
        )
    }

    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut n_channels = None;
        let mut n_poles = None;
        let mut pole_low = None;
        let mut pole_high = None;
        let mut boundary_seed = None;
        let mut hamiltonian_seed = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                RmxError::InvalidCase(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                RmxError::InvalidCase(format!("line {}: bad {what}: {value}", lineno + 1))
            };
            match key {
                "n_channels" => n_channels = Some(value.parse().map_err(|_| bad("integer"))?),
                "n_poles" => n_poles = Some(value.parse().map_err(|_| bad("integer"))?),
                "pole_low" => pole_low = Some(value.parse().map_err(|_| bad("number"))?),
                "pole_high" => pole_high = Some(value.parse().map_err(|_| bad("number"))?),
                "boundary_seed" => boundary_seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "hamiltonian_seed" => {
                    hamiltonian_seed = Some(value.parse().map_err(|_| bad("seed"))?)
                }
                _ => return Err(RmxError::InvalidCase(format!("unknown key `{key}`"))),
            }
        }

        let need = |name: &str| RmxError::InvalidCase(format!("missing key `{name}`"));
        CaseDefinition::new(
            n_channels.ok_or_else(|| need("n_channels"))?,
            n_poles.ok_or_else(|| need("n_poles"))?,
            (
                pole_low.ok_or_else(|| need("pole_low"))?,
                pole_high.ok_or_else(|| need("pole_high"))?,
            ),
            boundary_seed.ok_or_else(|| need("boundary_seed"))?,
            hamiltonian_seed.ok_or_else(|| need("hamiltonian_seed"))?,
        )
    }
}

/// Uniform energy mesh. Point `i` is `start + i * spacing` with a single
/// rounding per point; `spacing` is derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMesh {
    start: f64,
    stop: f64,
    n_points: usize,
    spacing: f64,
}

impl EnergyMesh {
    pub fn new(start: f64, stop: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(RmxError::InvalidInput(format!(
                "mesh needs n_points >= 2, got {n_points}"
            )));
        }
        if !start.is_finite() || !stop.is_finite() || start >= stop {
            return Err(RmxError::InvalidInput(format!(
                "mesh needs finite start < stop, got ({start}, {stop})"
            )));
        }
        let spacing = (stop - start) / (n_points - 1) as f64;
        Ok(EnergyMesh {
            start,
            stop,
            n_points,
            spacing,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Same spacing and point count, every point moved up by half a spacing.
    pub fn shifted_half_spacing(&self) -> Self {
        EnergyMesh {
            start: self.start + 0.5 * self.spacing,
            stop: self.stop + 0.5 * self.spacing,
            n_points: self.n_points,
            spacing: self.spacing,
        }
    }
}

/// All eigenpairs of one Hamiltonian block: eigenvalues ascending, column `k`
/// of `eigenvectors` paired with `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Dmat,
}

impl EigenSystem {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Dmat) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(RmxError::DimensionMismatch(format!(
                "{} eigenvalues vs {}x{} eigenvector matrix",
                n,
                eigenvectors.nrows(),
                eigenvectors.ncols()
            )));
        }
        if eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(RmxError::InvalidInput("non-finite eigenvalue".into()));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(RmxError::InvalidInput(
                "eigenvalues must be sorted ascending".into(),
            ));
        }
        Ok(EigenSystem {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// max |V^T V - I| entry; the orthonormality contract demands <= 1e-10.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.order();
        let gram = self.eigenvectors.transpose() * &self.eigenvectors;
        (gram - Dmat::identity(n, n)).amax()
    }
}

/// Reduced-width amplitude matrix `w` (n_channels x n_poles); row `i` holds the
/// boundary weights of every pole in channel `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceAmplitudes {
    pub w: Dmat,
}

impl SurfaceAmplitudes {
    pub fn new(w: Dmat) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(RmxError::InvalidInput(
                "surface amplitudes must be finite".into(),
            ));
        }
        Ok(SurfaceAmplitudes { w })
    }

    pub fn n_channels(&self) -> usize {
        self.w.nrows()
    }

    pub fn n_poles(&self) -> usize {
        self.w.ncols()
    }
}

/// Channel-space R-matrix at one evaluation energy.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub entries: Dmat,
    /// Evaluation energy E in Rydberg.
    pub energy: f64,
}

impl RMatrix {
    pub fn new(entries: Dmat, energy: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(RmxError::DimensionMismatch(format!(
                "R-matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let r = RMatrix { entries, energy };
        let tol = 1e-12 * (1.0 + r.entries.amax());
        let dev = r.symmetry_defect();
        if dev > tol {
            return Err(RmxError::Asymmetric { max_dev: dev, tol });
        }
        Ok(r)
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.entries.nrows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                dev = dev.max((self.entries[(i, j)] - self.entries[(j, i)]).abs());
            }
        }
        dev
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }
}

/// Energy mesh paired with a scalar response value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub mesh: EnergyMesh,
    pub values: Vec<f64>,
    pub label: String,
}

impl Spectrum {
    pub fn new(mesh: EnergyMesh, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != mesh.n_points() {
            return Err(RmxError::DimensionMismatch(format!(
                "{} values on a {}-point mesh",
                values.len(),
                mesh.n_points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RmxError::InvalidInput(
                "spectrum values must be finite".into(),
            ));
        }
        Ok(Spectrum {
            mesh,
            values,
            label: label.into(),
        })
    }
}
