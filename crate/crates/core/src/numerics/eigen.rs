//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V^H` with values in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalises a Hermitian matrix. Only the upper triangle's Hermitian part
/// matters; the input is symmetrised first.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if a.rows() != a.cols() {
        return Err(Error::dim(
            "hermitian_eigen",
            format!("matrix is {}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let sym = a.hermitian_part();
    let mut m: Vec<Complex64> = sym.as_slice().to_vec();
    let mut v: Vec<Complex64> = ComplexMatrix::identity(n).as_slice().to_vec();
    let fro = sym.frobenius_norm();
    if fro == 0.0 {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: ComplexMatrix::identity(n),
        });
    }
    let threshold = fro * 1e-15;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let mag = apq.norm();
                if mag <= threshold * 1e-3 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                let j_pp = Complex64::new(c, 0.0);
                let j_pq = Complex64::new(s, 0.0);
                let j_qp = -phase.conj() * s;
                let j_qq = phase.conj() * c;

                for r in 0..n {
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    m[r * n + p] = arp * j_pp + arq * j_qp;
                    m[r * n + q] = arp * j_pq + arq * j_qq;
                }
                for col in 0..n {
                    let apc = m[p * n + col];
                    let aqc = m[q * n + col];
                    m[p * n + col] = j_pp.conj() * apc + j_qp.conj() * aqc;
                    m[q * n + col] = j_pq.conj() * apc + j_qq.conj() * aqc;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;

                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp * j_pp + vrq * j_qp;
                    v[r * n + q] = vrp * j_pq + vrq * j_qq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Convergence {
            op: "hermitian_eigen",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].re.total_cmp(&m[i * n + i].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
///
/// Implicit QL with Wilkinson-style shifts. Values come back descending and
/// `vectors[r * n + c]` holds component `r` of eigenvector `c`.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::dim(
            "tridiagonal_eigen",
            format!("{} diagonal and {} off-diagonal entries", n, off.len()),
        ));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Convergence {
                        op: "tridiagonal_eigen",
                        iterations: iter,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for r in 0..n {
        for (c, &src) in order.iter().enumerate() {
            vectors[r * n + c] = z[r * n + src];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_hermitian() -> ComplexMatrix {
        let b = ComplexMatrix::from_fn(4, 4, |r, k| {
            c(
                ((r * 7 + k * 3) % 5) as f64 - 2.0,
                ((r + 2 * k) % 3) as f64 - 1.0,
            )
        });
        b.add(&b.adjoint())
    }

    #[test]
    fn reconstructs_hermitian_matrix() {
        let a = sample_hermitian();
        let e = hermitian_eigen(&a).unwrap();
        let lam = ComplexMatrix::from_real_diag(&e.values);
        let rebuilt = e.vectors.matmul(&lam).matmul(&e.vectors.adjoint());
        assert!(rebuilt.sub(&a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        let gram = e.vectors.adjoint_matmul(&e.vectors);
        assert!(gram.sub(&ComplexMatrix::identity(4)).frobenius_norm() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 3.0, 2.0]);
        let e = hermitian_eigen(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn two_by_two_with_complex_coupling() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [4.0, -1.0, 2.5, 0.3, 1.0];
        let off = [1.0, 0.5, -2.0, 0.25];
        let (values, vectors) = tridiagonal_eigen(&diag, &off).unwrap();
        let dense = ComplexMatrix::from_fn(5, 5, |r, k| {
            let x = if r == k {
                diag[r]
            } else if r + 1 == k {
                off[r]
            } else if k + 1 == r {
                off[k]
            } else {
                0.0
            };
            c(x, 0.0)
        });
        let reference = hermitian_eigen(&dense).unwrap();
        for (a, b) in values.iter().zip(&reference.values) {
            assert!((a - b).abs() < 1e-12);
        }
        // T z = lambda z for every column
        for col in 0..5 {
            for row in 0..5 {
                let mut tz = diag[row] * vectors[row * 5 + col];
                if row > 0 {
                    tz += off[row - 1] * vectors[(row - 1) * 5 + col];
                }
                if row < 4 {
                    tz += off[row] * vectors[(row + 1) * 5 + col];
                }
                assert!((tz - values[col] * vectors[row * 5 + col]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_rectangular() {
        assert!(hermitian_eigen(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
