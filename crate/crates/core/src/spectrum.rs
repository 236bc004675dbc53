//! Energy-mesh sweeps and spectral post-processing.
//!
//! The swept observable is the squared Frobenius norm of the R-matrix,
//! `sum_ij R_ij(E)^2`. It is a surrogate: it keeps the pole and resonance
//! structure that mesh resolution, Gaussian broadening and width extraction
//! exist to handle, without claiming to be a physical cross section.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Result, RmxError};
use crate::kernel::{self, KernelVariant, POLE_GUARD};
use crate::sched::partition_energies;
use crate::types::{ry_to_ev, EnergyMesh, Spectrum, SurfaceAmplitudes};

/// Lorentzian profile fitted to one resonance window.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceFit {
    /// Line center in Rydberg.
    pub center: f64,
    /// FWHM width in Rydberg.
    pub gamma: f64,
    /// Peak height above background, response units.
    pub peak: f64,
    /// Flat background, response units.
    pub background: f64,
    /// Root-mean-square fit residual, response units.
    pub rms_residual: f64,
}

/// Builds a uniform mesh that keeps clear of every pole. On a collision the
/// whole mesh is shifted up by half a spacing, once; a second collision is an
/// error and the caller changes `n_points`.
pub fn mesh_avoiding_poles(
    start: f64,
    stop: f64,
    n_points: usize,
    poles: &[f64],
) -> Result<EnergyMesh> {
    let mesh = EnergyMesh::new(start, stop, n_points)?;
    let mut sorted = poles.to_vec();
    sorted.sort_by(f64::total_cmp);
    match first_collision(&mesh, &sorted) {
        None => Ok(mesh),
        Some(_) => {
            let shifted = mesh.shifted_half_spacing();
            match first_collision(&shifted, &sorted) {
                None => Ok(shifted),
                Some((_, pole_index)) => Err(RmxError::MeshCollision { pole_index }),
            }
        }
    }
}

/// First (mesh index, pole index) pair closer than the pole guard, scanning a
/// sorted pole list.
fn first_collision(mesh: &EnergyMesh, sorted_poles: &[f64]) -> Option<(usize, usize)> {
    if sorted_poles.is_empty() {
        return None;
    }
    for (i, e) in mesh.points().enumerate() {
        let at = sorted_poles.partition_point(|p| *p < e);
        for k in [at.wrapping_sub(1), at] {
            if let Some(p) = sorted_poles.get(k) {
                if (e - p).abs() < POLE_GUARD {
                    return Some((i, k));
                }
            }
        }
    }
    None
}

fn response_at(
    w: &SurfaceAmplitudes,
    y: &crate::types::Dmat,
    poles: &[f64],
    e: f64,
    variant: KernelVariant,
) -> Result<f64> {
    Ok(kernel::rmatrix_with_y(w, y, poles, e, variant)?.frobenius_sq())
}

/// Sweeps the response over a pole-free mesh. Work is split into the
/// contiguous per-worker ranges of [`partition_energies`]; per-point
/// arithmetic never depends on the split, so any worker count produces
/// bitwise-identical values.
pub fn sweep_response(
    w: &SurfaceAmplitudes,
    poles: &[f64],
    mesh: &EnergyMesh,
    variant: KernelVariant,
    n_workers: usize,
) -> Result<Spectrum> {
    if n_workers == 0 {
        return Err(RmxError::InvalidInput("n_workers must be >= 1".into()));
    }
    variant.validate()?;
    for (i, e) in mesh.points().enumerate() {
        if let Some((k, dist)) = kernel::nearest_pole(poles, e) {
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
    let label = format!(
        "rmatrix response nchan={} n_poles={} variant={}",
        w.n_channels(),
        w.n_poles(),
        variant
    );

    let sweep_range = |range: std::ops::Range<usize>| -> Result<Vec<f64>> {
        range
            .map(|i| response_at(w, &y, poles, mesh.point(i), variant))
            .collect()
    };

    let values = if n_workers == 1 {
        sweep_range(0..mesh.n_points())?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n_workers)
            .build()
            .map_err(|e| RmxError::InvalidInput(format!("worker pool: {e}")))?;
        let ranges = partition_energies(mesh.n_points(), n_workers);
        let chunks: Vec<Vec<f64>> = pool.install(|| {
            ranges
                .into_par_iter()
                .map(sweep_range)
                .collect::<Result<_>>()
        })?;
        chunks.into_iter().flatten().collect()
    };

    Spectrum::new(*mesh, values, label)
}

/// Discrete Gaussian broadening. sigma = fwhm / (2 sqrt(2 ln 2)), kernel
/// truncated at +-5 sigma and renormalized; at the edges the in-range part of
/// the kernel is renormalized again (no padding). Computed in deviation form
/// around each center sample, which keeps constant spectra exactly constant.
pub fn convolve_gaussian(s: &Spectrum, fwhm: f64) -> Result<Spectrum> {
    let spacing = s.mesh.spacing();
    if !(fwhm.is_finite() && fwhm >= 2.0 * spacing) {
        return Err(RmxError::UnderResolvedKernel { fwhm, spacing });
    }
    let sigma = fwhm / (2.0 * (2.0_f64.ln() * 2.0).sqrt());
    let half = (5.0 * sigma / spacing).ceil() as usize;

    let mut kern = Vec::with_capacity(2 * half + 1);
    for m in 0..=(2 * half) {
        let x = (m as f64 - half as f64) * spacing / sigma;
        kern.push((-0.5 * x * x).exp());
    }
    let total: f64 = kern.iter().sum();
    for g in &mut kern {
        *g /= total;
    }

    let n = s.values.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lo = half.saturating_sub(i);
        let hi = (2 * half).min(n - 1 + half - i);
        let center = s.values[i];
        let mut acc = 0.0;
        let mut weight = 0.0;
        for (m, g) in kern.iter().enumerate().take(hi + 1).skip(lo) {
            acc += g * (s.values[i + m - half] - center);
            weight += g;
        }
        out.push(center + acc / weight);
    }
    Spectrum::new(
        s.mesh,
        out,
        format!("{} | gaussian fwhm={} Ry", s.label, fwhm),
    )
}

/// Weighted average of spectra on one shared mesh. Weights may arrive as
/// ratios (2:1 style); they are normalized to sum 1 before mixing.
pub fn admix(spectra: &[Spectrum], weights: &[f64]) -> Result<Spectrum> {
    if spectra.is_empty() || spectra.len() != weights.len() {
        return Err(RmxError::InvalidInput(format!(
            "{} spectra vs {} weights",
            spectra.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(RmxError::InvalidInput(
            "admixture weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(RmxError::InvalidInput(
            "admixture weights must not all be zero".into(),
        ));
    }
    let mesh = spectra[0].mesh;
    if spectra.iter().any(|s| s.mesh != mesh) {
        return Err(RmxError::MeshMismatch);
    }

    let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let n = mesh.n_points();
    let mut values = vec![0.0; n];
    for (s, w) in spectra.iter().zip(&normalized) {
        for (out, v) in values.iter_mut().zip(&s.values) {
            *out += w * v;
        }
    }
    let label = format!("admix of {} spectra", spectra.len());
    Spectrum::new(mesh, values, label)
}

/// Bound-series energies `E_n = threshold - z_eff^2 / (n - mu)^2` Ry,
/// ascending in n, each below the threshold.
pub fn rydberg_series(
    threshold: f64,
    quantum_defect: f64,
    z_eff: f64,
    n_range: (u32, u32),
) -> Result<Vec<f64>> {
    let (n_min, n_max) = n_range;
    if !threshold.is_finite() || !quantum_defect.is_finite() {
        return Err(RmxError::InvalidInput(
            "threshold and quantum defect must be finite".into(),
        ));
    }
    if !(z_eff.is_finite() && z_eff > 0.0) {
        return Err(RmxError::InvalidInput("z_eff must be positive".into()));
    }
    if n_min > n_max {
        return Err(RmxError::InvalidInput(format!(
            "empty n range {n_min}..={n_max}"
        )));
    }
    if (n_min as f64) <= quantum_defect {
        return Err(RmxError::InvalidInput(format!(
            "n must exceed the quantum defect: n_min = {n_min}, mu = {quantum_defect}"
        )));
    }
    Ok((n_min..=n_max)
        .map(|n| {
            let eff = n as f64 - quantum_defect;
            threshold - z_eff * z_eff / (eff * eff)
        })
        .collect())
}

struct LorentzianModel<'a> {
    energies: &'a [f64],
    values: &'a [f64],
}

impl LorentzianModel<'_> {
    fn cost(&self, p: &[f64; 4]) -> f64 {
        let [c, g, peak, bg] = *p;
        let h = (g / 2.0) * (g / 2.0);
        self.energies
            .iter()
            .zip(self.values)
            .map(|(e, v)| {
                let u = e - c;
                let r = bg + peak * h / (u * u + h) - v;
                r * r
            })
            .sum()
    }

    /// Normal equations for one Levenberg-Marquardt step at `p`.
    fn normal_equations(&self, p: &[f64; 4]) -> (nalgebra::Matrix4<f64>, nalgebra::Vector4<f64>) {
        let [c, g, peak, bg] = *p;
        let h = (g / 2.0) * (g / 2.0);
        let mut jtj = nalgebra::Matrix4::<f64>::zeros();
        let mut jtr = nalgebra::Vector4::<f64>::zeros();
        for (e, v) in self.energies.iter().zip(self.values) {
            let u = e - c;
            let d = u * u + h;
            let resid = bg + peak * h / d - v;
            let jac = nalgebra::Vector4::new(
                peak * h * 2.0 * u / (d * d),
                peak * (g / 2.0) * u * u / (d * d),
                h / d,
                1.0,
            );
            jtj += jac * jac.transpose();
            jtr += jac * resid;
        }
        (jtj, jtr)
    }
}

const FIT_MAX_ITER: usize = 200;

/// Least-squares Lorentzian fit over one window of the spectrum.
///
/// Initialization is deterministic: center at the window argmax, width from
/// the half-height crossings, background from the window-edge mean. The window
/// must hold at least 7 mesh points and exactly one interior local maximum.
pub fn fit_resonance(s: &Spectrum, window: (f64, f64)) -> Result<ResonanceFit> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(RmxError::InvalidInput(format!(
            "bad fit window ({lo}, {hi})"
        )));
    }
    let idx: Vec<usize> = (0..s.mesh.n_points())
        .filter(|&i| {
            let e = s.mesh.point(i);
            e >= lo && e <= hi
        })
        .collect();
    if idx.len() < 7 {
        return Err(RmxError::InvalidInput(format!(
            "fit window holds {} mesh points; at least 7 required",
            idx.len()
        )));
    }
    let energies: Vec<f64> = idx.iter().map(|&i| s.mesh.point(i)).collect();
    let values: Vec<f64> = idx.iter().map(|&i| s.values[i]).collect();

    let maxima: Vec<usize> = (1..values.len() - 1)
        .filter(|&j| values[j] > values[j - 1] && values[j] > values[j + 1])
        .collect();
    if maxima.len() != 1 {
        return Err(RmxError::AmbiguousWindow {
            maxima: maxima.len(),
        });
    }
    let peak_at = maxima[0];

    let background0 = 0.5 * (values[0] + values[values.len() - 1]);
    let peak0 = (values[peak_at] - background0).max(f64::MIN_POSITIVE);
    let center0 = energies[peak_at];
    let gamma0 = half_height_width(&energies, &values, peak_at, background0)
        .unwrap_or((hi - lo) / 4.0)
        .max(s.mesh.spacing());

    let model = LorentzianModel {
        energies: &energies,
        values: &values,
    };
    let mut p = [center0, gamma0, peak0, background0];
    let mut cost = model.cost(&p);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..FIT_MAX_ITER {
        let (jtj, jtr) = model.normal_equations(&p);
        let mut accepted = false;
        for _ in 0..30 {
            let mut damped = jtj;
            for d in 0..4 {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [
                p[0] + step[0],
                p[1] + step[1],
                p[2] + step[2],
                p[3] + step[3],
            ];
            let trial_cost = model.cost(&trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                let rel_step = (0..4)
                    .map(|d| step[d].abs() / (1.0 + p[d].abs()))
                    .fold(0.0f64, f64::max);
                let rel_drop = (cost - trial_cost) / (cost + f64::MIN_POSITIVE);
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                if rel_step < 1e-13 || rel_drop < 1e-14 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // Damping exhausted: the current iterate is the local optimum.
            converged = true;
            break;
        }
    }

    let fit = ResonanceFit {
        center: p[0],
        gamma: p[1].abs(),
        peak: p[2],
        background: p[3],
        rms_residual: (cost / values.len() as f64).sqrt(),
    };
    if !converged {
        return Err(RmxError::FitDiverged {
            best: Box::new(fit),
        });
    }
    Ok(fit)
}

/// Distance between the half-height crossings around the peak, by linear
/// interpolation; None when either side never crosses inside the window.
fn half_height_width(
    energies: &[f64],
    values: &[f64],
    peak_at: usize,
    background: f64,
) -> Option<f64> {
    let half = background + 0.5 * (values[peak_at] - background);
    let mut left = None;
    for j in (1..=peak_at).rev() {
        if values[j - 1] <= half && values[j] >= half {
            let t = (half - values[j - 1]) / (values[j] - values[j - 1]);
            left = Some(energies[j - 1] + t * (energies[j] - energies[j - 1]));
            break;
        }
    }
    let mut right = None;
    for j in peak_at..values.len() - 1 {
        if values[j] >= half && values[j + 1] <= half {
            let t = (values[j] - half) / (values[j] - values[j + 1]);
            right = Some(energies[j] + t * (energies[j + 1] - energies[j]));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) if r > l => Some(r - l),
        _ => None,
    }
}

/// CSV layout: a `# label=` line, the `energy_ry,energy_ev,value` header, one
/// row per mesh point. Energies and values are printed with the shortest
/// representation that round-trips, so read(write(s)) is bit-exact; the eV
/// column is presentation only and ignored on read.
pub fn spectrum_to_csv(s: &Spectrum) -> String {
    let mut out = String::with_capacity(32 * s.values.len() + 64);
    out.push_str(&format!("# label={}\n", s.label.replace('\n', " ")));
    out.push_str("energy_ry,energy_ev,value\n");
    for (e, v) in s.mesh.points().zip(&s.values) {
        out.push_str(&format!("{},{},{}\n", e, ry_to_ev(e), v));
    }
    out
}

pub fn spectrum_from_csv(text: &str) -> Result<Spectrum> {
    let mut lines = text.lines();
    let label = lines
        .next()
        .and_then(|l| l.strip_prefix("# label="))
        .ok_or_else(|| RmxError::InvalidInput("spectrum CSV must start with `# label=`".into()))?
        .to_string();
    match lines.next() {
        Some("energy_ry,energy_ev,value") => {}
        _ => {
            return Err(RmxError::InvalidInput(
                "spectrum CSV header must be `energy_ry,energy_ev,value`".into(),
            ))
        }
    }
    let mut energies = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(e), Some(_ev), Some(v), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(RmxError::InvalidInput(format!(
                "spectrum CSV row {} must have 3 fields",
                lineno + 3
            )));
        };
        let parse = |x: &str| -> Result<f64> {
            x.trim()
                .parse()
                .map_err(|_| RmxError::InvalidInput(format!("bad number `{x}` in spectrum CSV")))
        };
        energies.push(parse(e)?);
        values.push(parse(v)?);
    }
    if energies.len() < 2 {
        return Err(RmxError::InvalidInput(
            "spectrum CSV needs at least 2 rows".into(),
        ));
    }
    let mesh = EnergyMesh::new(energies[0], energies[energies.len() - 1], energies.len())?;
    for (i, e) in energies.iter().enumerate() {
        let expect = mesh.point(i);
        if (e - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
            return Err(RmxError::InvalidInput(format!(
                "spectrum CSV is not on a uniform mesh at row {}",
                i + 3
            )));
        }
    }
    Spectrum::new(mesh, values, label)
}

pub fn write_spectrum_csv(s: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, spectrum_to_csv(s)).map_err(|e| RmxError::io(path, e))
}

pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<Spectrum> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| RmxError::io(path, e))?;
    spectrum_from_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Dmat;

    fn constant_spectrum(c: f64, n: usize) -> Spectrum {
        let mesh = EnergyMesh::new(0.0, 1.0, n).unwrap();
        Spectrum::new(mesh, vec![c; n], "const").unwrap()
    }

    #[test]
    fn trivial_two_point_mesh() {
        let mesh = mesh_avoiding_poles(0.0, 1.0, 2, &[]).unwrap();
        let pts: Vec<f64> = mesh.points().collect();
        assert_eq!(pts, vec![0.0, 1.0]);
    }

    #[test]
    fn collision_forces_half_spacing_shift() {
        let mesh = mesh_avoiding_poles(0.0, 1.0, 3, &[0.5]).unwrap();
        let pts: Vec<f64> = mesh.points().collect();
        assert_eq!(pts, vec![0.25, 0.75, 1.25]);
    }

    #[test]
    fn double_collision_is_an_error() {
        // Poles sit on both the original and the shifted middle point.
        match mesh_avoiding_poles(0.0, 1.0, 3, &[0.5, 0.75]) {
            Err(RmxError::MeshCollision { .. }) => {}
            other => panic!("expected MeshCollision, got {other:?}"),
        }
    }

    #[test]
    fn single_pole_response_value() {
        let w = SurfaceAmplitudes::new(Dmat::from_row_slice(1, 1, &[1.0])).unwrap();
        let mesh = EnergyMesh::new(2.0, 3.0, 2).unwrap();
        let s = sweep_response(&w, &[0.0], &mesh, KernelVariant::Gemm, 1).unwrap();
        assert_eq!(s.values[0], 0.25);
    }

    #[test]
    fn constant_spectrum_convolves_to_itself_exactly() {
        let s = constant_spectrum(3.25, 64);
        let mesh_spacing = s.mesh.spacing();
        for fwhm in [2.0 * mesh_spacing, 0.2, 0.9] {
            let out = convolve_gaussian(&s, fwhm).unwrap();
            assert_eq!(out.values, s.values);
        }
    }

    #[test]
    fn under_resolved_kernel_is_rejected() {
        let s = constant_spectrum(1.0, 16);
        let fwhm = 1.9 * s.mesh.spacing();
        assert!(matches!(
            convolve_gaussian(&s, fwhm),
            Err(RmxError::UnderResolvedKernel { .. })
        ));
    }

    #[test]
    fn admix_matches_hand_arithmetic_exactly() {
        let a = constant_spectrum(3.0, 8);
        let b = constant_spectrum(0.0, 8);
        let mixed = admix(&[a, b], &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(mixed.values.iter().all(|v| *v == 2.0));
        // Ratio-style weights normalize to the same mixture.
        let a = constant_spectrum(3.0, 8);
        let b = constant_spectrum(0.0, 8);
        let mixed = admix(&[a, b], &[2.0, 1.0]).unwrap();
        assert!(mixed.values.iter().all(|v| *v == 2.0));
    }

    #[test]
    fn admix_identity_and_average() {
        let s = constant_spectrum(7.5, 8);
        let out = admix(std::slice::from_ref(&s), &[1.0]).unwrap();
        assert_eq!(out.values, s.values);

        let spectra: Vec<Spectrum> = [1.0, 2.0, 3.0, 6.0]
            .iter()
            .map(|c| constant_spectrum(*c, 8))
            .collect();
        let out = admix(&spectra, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        for v in out.values {
            assert!((v - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn admix_rejects_mesh_mismatch() {
        let a = constant_spectrum(1.0, 8);
        let mesh = EnergyMesh::new(0.0, 2.0, 8).unwrap();
        let b = Spectrum::new(mesh, vec![1.0; 8], "other").unwrap();
        assert!(matches!(
            admix(&[a, b], &[1.0, 1.0]),
            Err(RmxError::MeshMismatch)
        ));
    }

    #[test]
    fn hydrogenic_ground_term() {
        let e = rydberg_series(0.0, 0.0, 1.0, (1, 1)).unwrap();
        assert_eq!(e, vec![-1.0]);
    }

    #[test]
    fn series_converges_to_threshold_from_below() {
        let threshold = 1.63;
        let series = rydberg_series(threshold, 0.16, 2.0, (14, 16)).unwrap();
        assert_eq!(series.len(), 3);
        for pair in series.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for e in &series {
            assert!(*e < threshold);
        }
        // Spacing shrinks as n grows (series convexity).
        let d1 = series[1] - series[0];
        let d2 = series[2] - series[1];
        assert!(d2 < d1);
    }

    #[test]
    fn series_rejects_n_below_defect() {
        assert!(rydberg_series(0.0, 1.5, 1.0, (1, 3)).is_err());
    }

    #[test]
    fn flat_spectrum_has_no_fit_window() {
        let s = constant_spectrum(1.0, 64);
        match fit_resonance(&s, (0.1, 0.9)) {
            Err(RmxError::AmbiguousWindow { maxima }) => assert_eq!(maxima, 0),
            other => panic!("expected AmbiguousWindow, got {other:?}"),
        }
    }

    #[test]
    fn narrow_window_is_rejected() {
        let s = constant_spectrum(1.0, 64);
        assert!(matches!(
            fit_resonance(&s, (0.0, 0.05)),
            Err(RmxError::InvalidInput(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mesh = EnergyMesh::new(-0.5, 2.5, 9).unwrap();
        let values: Vec<f64> = (0..9).map(|i| (i as f64 * 0.77).sin().abs()).collect();
        let s = Spectrum::new(mesh, values, "round trip").unwrap();
        let back = spectrum_from_csv(&spectrum_to_csv(&s)).unwrap();
        assert_eq!(back.label, s.label);
        let bits = |v: &[f64]| -> Vec<u64> { v.iter().map(|x| x.to_bits()).collect() };
        assert_eq!(bits(&back.values), bits(&s.values));
        let mesh_pts: Vec<u64> = s.mesh.points().map(f64::to_bits).collect();
        let back_pts: Vec<u64> = back.mesh.points().map(f64::to_bits).collect();
        assert_eq!(mesh_pts, back_pts);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(spectrum_from_csv("no header").is_err());
        assert!(spectrum_from_csv("# label=x\nwrong,header,row\n1,2,3\n").is_err());
        assert!(spectrum_from_csv("# label=x\nenergy_ry,energy_ev,value\n0,0,1\n").is_err());
    }
}
