use super::Matrix;
use crate::{Error, Result};

/// All eigenvalues of a (nearly) symmetric matrix, ascending.
///
/// The input is symmetrized by averaging before solving; inputs whose
/// asymmetry exceeds 1e-10 relative to their scale are still accepted since
/// callers (e.g. `S + S^T` assembly) control symmetry upstream.
pub fn sym_eig(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut m = a.symmetrize();
    jacobi_diagonalize(&mut m);
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eig)
}

/// Extreme eigenvalues `(lambda_min, lambda_max)` of a symmetric matrix.
pub fn sym_eig_extrema(a: &Matrix) -> Result<(f64, f64)> {
    let eig = sym_eig(a)?;
    if eig.is_empty() {
        return Err(Error::invalid("matrix", "empty matrix has no eigenvalues"));
    }
    Ok((eig[0], *eig.last().unwrap()))
}

/// Cyclic Jacobi sweeps; adequate to ~1e-12 relative for the N <= 64
/// matrices used here.
fn jacobi_diagonalize(a: &mut Matrix) {
    let n = a.rows();
    let scale: f64 = (0..n).map(|i| a.row(i).iter().map(|x| x * x).sum::<f64>()).sum::<f64>().sqrt().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].abs();
            }
        }
        if off < 1e-15 * scale {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[(q, q)] - a[(p, p)]) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows/columns p and q
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
            }
        }
    }
}
