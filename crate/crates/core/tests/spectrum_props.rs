//! Sweep, convolution, admixture and fit properties.

mod common;

use common::trapezoid;
use rmx_core::eigen::{diagonalize_block, surface_amplitudes};
use rmx_core::kernel::{form_rmatrix_naive, KernelVariant, POLE_GUARD};
use rmx_core::spectrum::{
    admix, convolve_gaussian, fit_resonance, mesh_avoiding_poles, sweep_response,
};
use rmx_core::synth::{build_boundary_projector, build_hamiltonian};
use rmx_core::types::{CaseDefinition, EnergyMesh, Spectrum, SurfaceAmplitudes};

fn synth_amplitudes(nchan: usize, n: usize, seed: u64) -> (SurfaceAmplitudes, Vec<f64>) {
    let case = CaseDefinition::new(nchan, n, (-2.0, 8.0), seed, seed).unwrap();
    let h = build_hamiltonian(&case).unwrap();
    let es = diagonalize_block(&h).unwrap();
    let b = build_boundary_projector(&case).unwrap();
    let w = surface_amplitudes(&b, &es).unwrap();
    (w, es.eigenvalues)
}

fn lorentzian(e: f64, center: f64, gamma: f64, peak: f64, background: f64) -> f64 {
    let h = (gamma / 2.0) * (gamma / 2.0);
    background + peak * h / ((e - center) * (e - center) + h)
}

#[test]
fn dense_mesh_avoids_every_pole() {
    let (_, poles) = synth_amplitudes(3, 12, 9);
    let mesh = mesh_avoiding_poles(0.0, 10.0, 4096, &poles).unwrap();
    for e in mesh.points() {
        for (k, p) in poles.iter().enumerate() {
            assert!(
                (e - p).abs() >= POLE_GUARD,
                "mesh point {e} sits on pole {k} at {p}"
            );
        }
    }
}

#[test]
fn sweep_matches_naive_kernel_at_spot_indices() {
    let (w, poles) = synth_amplitudes(3, 12, 9);
    let mesh = mesh_avoiding_poles(8.5, 12.5, 512, &poles).unwrap();
    let s = sweep_response(&w, &poles, &mesh, KernelVariant::Gemm, 2).unwrap();
    for t in 0..10 {
        let i = (t * 131 + 17) % 512;
        let r = form_rmatrix_naive(&w, &poles, mesh.point(i)).unwrap();
        let expect = r.frobenius_sq();
        assert!(
            (s.values[i] - expect).abs() <= 1e-12 * expect.abs().max(1.0),
            "index {i}: {} vs {expect}",
            s.values[i]
        );
    }
}

#[test]
fn response_peaks_near_an_isolated_pole() {
    let (w, poles) = synth_amplitudes(3, 12, 9);
    // Strongest pole by summed squared amplitude, interior so it has neighbors.
    let strongest = (1..poles.len() - 1)
        .max_by(|&a, &b| {
            let col = |k: usize| -> f64 { (0..3).map(|i| w.w[(i, k)].powi(2)).sum() };
            col(a).total_cmp(&col(b))
        })
        .unwrap();
    let p = poles[strongest];
    let gap_up = poles[strongest + 1] - p;

    let near = {
        let r = form_rmatrix_naive(&w, &poles, p + 1e-4).unwrap();
        r.frobenius_sq()
    };
    let mid = {
        let r = form_rmatrix_naive(&w, &poles, p + gap_up / 2.0).unwrap();
        r.frobenius_sq()
    };
    assert!(
        near >= 10.0 * mid,
        "near-pole response {near} not >= 10x mid-gap {mid}"
    );
}

#[test]
fn interior_delta_convolves_to_gaussian_samples() {
    let n = 401;
    let mesh = EnergyMesh::new(0.0, 1.0, n).unwrap();
    let spacing = mesh.spacing();
    let amplitude = 3.0;
    let mut values = vec![0.0; n];
    values[200] = amplitude;
    let s = Spectrum::new(mesh, values, "delta").unwrap();

    let fwhm = 8.0 * spacing;
    let sigma = fwhm / (2.0 * (2.0_f64.ln() * 2.0).sqrt());
    let out = convolve_gaussian(&s, fwhm).unwrap();

    let norm = spacing / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    for offset in [-10i64, -5, 0, 5, 10] {
        let i = (200 + offset) as usize;
        let x = offset as f64 * spacing;
        let expect = amplitude * norm * (-0.5 * x * x / (sigma * sigma)).exp();
        assert!(
            (out.values[i] - expect).abs() <= 1e-3 * expect,
            "offset {offset}: {} vs {expect}",
            out.values[i]
        );
    }
}

#[test]
fn interior_feature_area_is_conserved() {
    let n = 4001;
    let mesh = EnergyMesh::new(0.0, 1.0, n).unwrap();
    // Gaussian bump dead center, far (>> 10 sigma) from both edges.
    let feature_sigma = 0.01;
    let values: Vec<f64> = mesh
        .points()
        .map(|e| (-0.5 * ((e - 0.5) / feature_sigma).powi(2)).exp())
        .collect();
    let s = Spectrum::new(mesh, values, "bump").unwrap();

    let out = convolve_gaussian(&s, 0.02).unwrap();
    let before = trapezoid(&s.values, mesh.spacing());
    let after = trapezoid(&out.values, mesh.spacing());
    assert!(
        ((after - before) / before).abs() <= 1e-3,
        "area drifted: {before} -> {after}"
    );
}

#[test]
fn convolution_is_linear() {
    let n = 512;
    let mesh = EnergyMesh::new(0.0, 2.0, n).unwrap();
    let s1: Vec<f64> = (0..n)
        .map(|i| ((i as f64) * 0.11).sin().abs() + 0.3)
        .collect();
    let s2: Vec<f64> = (0..n)
        .map(|i| ((i as f64) * 0.07).cos().abs() + 0.1)
        .collect();
    let (a, b) = (0.7, 1.3);
    let combo: Vec<f64> = s1.iter().zip(&s2).map(|(x, y)| a * x + b * y).collect();

    let fwhm = 0.05;
    let conv = |v: Vec<f64>| {
        convolve_gaussian(&Spectrum::new(mesh, v, "x").unwrap(), fwhm)
            .unwrap()
            .values
    };
    let lhs = conv(combo);
    let (c1, c2) = (conv(s1), conv(s2));
    let scale = lhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        let rhs = a * c1[i] + b * c2[i];
        assert!((lhs[i] - rhs).abs() <= 1e-12 * scale);
    }
}

#[test]
fn admix_and_convolve_commute() {
    let n = 512;
    let mesh = EnergyMesh::new(0.0, 2.0, n).unwrap();
    let mk = |phase: f64| {
        let v: Vec<f64> = (0..n)
            .map(|i| ((i as f64) * phase).sin().powi(2) + 0.2)
            .collect();
        Spectrum::new(mesh, v, "x").unwrap()
    };
    let (s1, s2) = (mk(0.13), mk(0.05));
    let weights = [2.0 / 3.0, 1.0 / 3.0];
    let fwhm = 0.04;

    let mixed_then_conv =
        convolve_gaussian(&admix(&[s1.clone(), s2.clone()], &weights).unwrap(), fwhm).unwrap();
    let conv_then_mixed = admix(
        &[
            convolve_gaussian(&s1, fwhm).unwrap(),
            convolve_gaussian(&s2, fwhm).unwrap(),
        ],
        &weights,
    )
    .unwrap();
    let scale = mixed_then_conv
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in mixed_then_conv.values.iter().zip(&conv_then_mixed.values) {
        assert!((a - b).abs() <= 1e-12 * scale);
    }
}

/// The squared response carries a second-order pole, so its integral straight
/// across a pole has no refinement limit; the convergent observable is the
/// resonance wing. Refining the mesh there must show a Richardson-style trend:
/// each halving of the spacing changes the integral less than the previous one.
#[test]
fn wing_integral_converges_under_mesh_refinement() {
    let (w, poles) = synth_amplitudes(3, 12, 9);
    // Wing of the pole with the widest gap above it, clear of every other pole.
    let at = (0..poles.len() - 1)
        .max_by(|&a, &b| (poles[a + 1] - poles[a]).total_cmp(&(poles[b + 1] - poles[b])))
        .unwrap();
    let p = poles[at];
    let gap = poles[at + 1] - p;
    let (lo, hi) = (p + 0.1 * gap, p + 0.9 * gap);

    let mut integrals = Vec::new();
    let mut n = 251;
    for _ in 0..4 {
        let mesh = mesh_avoiding_poles(lo, hi, n, &poles).unwrap();
        let s = sweep_response(&w, &poles, &mesh, KernelVariant::Gemm, 1).unwrap();
        integrals.push(trapezoid(&s.values, mesh.spacing()));
        n = (n - 1) * 2 + 1;
    }
    let diffs: Vec<f64> = integrals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(
        diffs[1] < diffs[0] && diffs[2] < diffs[1],
        "refinement differences not shrinking: {diffs:?}"
    );
}

#[test]
fn exact_lorentzian_parameters_are_recovered() {
    let mesh = EnergyMesh::new(4.9, 5.1, 2001).unwrap();
    let (center, gamma, peak, background) = (5.0, 0.01, 1.0, 0.0);
    let values: Vec<f64> = mesh
        .points()
        .map(|e| lorentzian(e, center, gamma, peak, background))
        .collect();
    let s = Spectrum::new(mesh, values, "lorentzian").unwrap();

    let fit = fit_resonance(&s, (4.95, 5.05)).unwrap();
    assert!((fit.center - center).abs() <= 1e-6 * center.abs());
    assert!((fit.gamma - gamma).abs() <= 1e-6 * gamma);
    assert!((fit.peak - peak).abs() <= 1e-6 * peak);
    assert!(fit.background.abs() <= 1e-6 * peak);
    assert!(fit.rms_residual <= 1e-9);
}

#[test]
fn narrow_kernel_barely_moves_the_fitted_center() {
    let mesh = EnergyMesh::new(4.9, 5.1, 2001).unwrap();
    let (center, gamma) = (5.0, 0.01);
    let values: Vec<f64> = mesh
        .points()
        .map(|e| lorentzian(e, center, gamma, 1.0, 0.0))
        .collect();
    let s = Spectrum::new(mesh, values, "lorentzian").unwrap();

    let blurred = convolve_gaussian(&s, gamma / 10.0).unwrap();
    let fit = fit_resonance(&blurred, (4.95, 5.05)).unwrap();
    assert!(
        (fit.center - center).abs() <= gamma / 100.0,
        "center moved to {}",
        fit.center
    );
}

#[test]
fn sweep_is_bitwise_stable_across_worker_counts() {
    let (w, poles) = synth_amplitudes(4, 16, 2);
    let mesh = mesh_avoiding_poles(8.5, 10.5, 1024, &poles).unwrap();
    let bits = |workers: usize| -> Vec<u64> {
        sweep_response(&w, &poles, &mesh, KernelVariant::Gemm, workers)
            .unwrap()
            .values
            .iter()
            .map(|v| v.to_bits())
            .collect()
    };
    let reference = bits(1);
    for workers in [2, 3, 4, 8] {
        assert_eq!(reference, bits(workers), "workers = {workers}");
    }
}
