//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Rotations follow Section 11.1 of Numerical Recipes in C (Press et al.,
//! 2nd ed.), swept cyclically over the upper triangle until every
//! off-diagonal magnitude drops below `tol * ||A||_F`. The method is slower
//! than QR for large matrices but is simple, deterministic and uniformly
//! accurate on the symmetric matrices this crate cares about (N up to a few
//! thousand).

use ndarray::Array2;

use super::SpectrumError;

/// Hard sweep limit; well-conditioned symmetric input converges in ~6-15.
pub const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix.
///
/// Eigenvalues are sorted descending; `eigenvectors` column k pairs with
/// `eigenvalues[k]`. Each eigenvector is oriented so its largest-magnitude
/// component is positive (ties resolved toward the lowest index). Exact
/// eigenvalue ties are ordered by the first differing eigenvector component.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<f64>,
    /// max_k || A u_k - lambda_k u_k ||_inf, measured against the input.
    pub residual_max: f64,
    pub sweeps: usize,
}

#[inline]
fn rotate(m: &mut [f64], i: usize, j: usize, s: f64, tau: f64) {
    let g = m[i];
    let h = m[j];
    m[i] = g - s * (h + g * tau);
    m[j] = h + s * (g - h * tau);
}

/// Diagonalize symmetric `a` with cyclic Jacobi rotations.
///
/// `a` must be bit-exactly symmetric (this also rejects NaN entries).
pub fn symmetric_eigen(a: &Array2<f64>, tol: f64) -> Result<EigenDecomposition, SpectrumError> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    assert!(tol > 0.0, "tolerance must be positive");
    for i in 0..n {
        for j in i..n {
            if a[[i, j]] != a[[j, i]] {
                return Err(SpectrumError::NotSymmetric { i, j });
            }
        }
    }

    let fro = a.iter().map(|&x| x * x).sum::<f64>().sqrt();
    let threshold = tol * fro;

    let mut m: Vec<f64> = a.iter().copied().collect();
    let mut vt = vec![0.0; n * n]; // row k holds eigenvector candidate k
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut sweeps = 0;
    loop {
        let mut max_off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                max_off = max_off.max(m[p * n + q].abs());
            }
        }
        if max_off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(SpectrumError::NoConvergence { limit: MAX_SWEEPS, max_off });
        }

        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let g = 100.0 * apq.abs();
                // late sweeps: annihilate elements too small to matter
                if sweeps > 4 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    m[p * n + q] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }

                let diff = d[q] - d[p];
                let t = if diff.abs() + g == diff.abs() {
                    apq / diff
                } else {
                    let theta = 0.5 * diff / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                m[p * n + q] = 0.0;

                for j in 0..p {
                    rotate(&mut m, j * n + p, j * n + q, s, tau);
                }
                for j in (p + 1)..q {
                    rotate(&mut m, p * n + j, j * n + q, s, tau);
                }
                for j in (q + 1)..n {
                    rotate(&mut m, p * n + j, q * n + j, s, tau);
                }
                for j in 0..n {
                    rotate(&mut vt, p * n + j, q * n + j, s, tau);
                }
            }
        }

        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
        sweeps += 1;
    }

    // canonical orientation before sorting, so eigenvalue ties order on
    // oriented components
    for k in 0..n {
        let row = &mut vt[k * n..(k + 1) * n];
        let mut best = 0;
        for (j, &v) in row.iter().enumerate() {
            if v.abs() > row[best].abs() {
                best = j;
            }
        }
        if row[best] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&ka, &kb| {
        d[kb].total_cmp(&d[ka]).then_with(|| {
            for j in 0..n {
                let (ua, ub) = (vt[ka * n + j], vt[kb * n + j]);
                if ua != ub {
                    return ub.total_cmp(&ua);
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for j in 0..n {
            eigenvectors[[j, col]] = vt[k * n + j];
        }
    }

    let mut residual_max = 0.0f64;
    for (col, &lambda) in eigenvalues.iter().enumerate() {
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[[i, j]] * eigenvectors[[j, col]];
            }
            residual_max = residual_max.max((acc - lambda * eigenvectors[[i, col]]).abs());
        }
    }

    Ok(EigenDecomposition { eigenvalues, eigenvectors, residual_max, sweeps })
}
