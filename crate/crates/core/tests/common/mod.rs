//! Shared test oracles, independent of the library's implementation paths.

#![allow(dead_code)]

use rmx_core::types::{Dmat, SurfaceAmplitudes};

/// Cyclic Jacobi eigensolver for small symmetric matrices. Slow, but it shares
/// no code path with the library's eigensolve, which is what makes it an
/// oracle. Returns eigenvalues ascending with matching eigenvector columns.
pub fn jacobi_eigen(a: &Dmat) -> (Vec<f64>, Dmat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi oracle needs a square matrix");
    let mut a = a.clone();
    let mut v = Dmat::identity(n, n);
    let scale = 1.0 + a.amax();

    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = Dmat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Neumaier compensated summation: effectively extended-precision for the
/// pole sums the naive kernel accumulates in plain f64.
pub fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

/// Extended-precision triple-loop pole sum; the oracle every kernel variant is
/// measured against.
pub fn rmatrix_oracle(w: &SurfaceAmplitudes, poles: &[f64], e: f64) -> Dmat {
    let nchan = w.n_channels();
    let n = poles.len();
    let mut r = Dmat::zeros(nchan, nchan);
    for i in 0..nchan {
        for j in i..nchan {
            let sum = neumaier_sum((0..n).map(|k| w.w[(i, k)] * w.w[(j, k)] / (e - poles[k])));
            r[(i, j)] = sum;
            r[(j, i)] = sum;
        }
    }
    r
}

pub fn relative_frobenius_diff(a: &Dmat, b: &Dmat) -> f64 {
    let diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn matrix_bits(m: &Dmat) -> Vec<u64> {
    m.iter().map(|v| v.to_bits()).collect()
}

pub fn value_bits(values: &[f64]) -> Vec<u64> {
    values.iter().map(|v| v.to_bits()).collect()
}

/// Trapezoid integral of a spectrum over its whole mesh.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    spacing * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}
