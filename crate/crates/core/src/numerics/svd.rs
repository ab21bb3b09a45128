//! Truncated singular value decomposition.
//!
//! Small problems, and problems where most of the spectrum is requested, use
//! one-sided (Hestenes) Jacobi on the columns of the tall orientation of the
//! matrix. Large arrays where only a handful of singular triplets is needed
//! (the usual case here: `M` RF chains against hundreds of antennas) run
//! Lanczos on `A^H A` with full reorthogonalisation, then run the
//! same one-sided Jacobi on `A` restricted to the leading Ritz subspace. The
//! final Jacobi step is what fixes the reported singular values, so small or
//! zero singular values come out with accuracy relative to `sigma_1` and not
//! `sigma_1^2`.

use num_complex::Complex64;

use super::eigen::tridiagonal_eigen;
use super::matrix::{dot_conj, norm_sqr, ComplexMatrix};
use super::rng::SeededRng;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const ORTHO_TOL: f64 = 1e-12;
const KRYLOV_MIN_DIM: usize = 24;
const KRYLOV_OVERSAMPLE: usize = 8;
const KRYLOV_RESIDUAL_TOL: f64 = 1e-10;
const KRYLOV_START_SEED: u64 = 0x0005_eed0_f5bd;

/// Leading singular triplets in descending order of singular value.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Left singular vectors, `rows x m`.
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    /// Right singular vectors, `cols x m`.
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn truncate(&self, m: usize) -> SvdResult {
        assert!(m <= self.len());
        SvdResult {
            u: self.u.leading_columns(m),
            sigma: self.sigma[..m].to_vec(),
            v: self.v.leading_columns(m),
        }
    }

    /// Number of singular values above `rel_tol * sigma_1`.
    pub fn effective_rank(&self, rel_tol: f64) -> usize {
        match self.sigma.first() {
            Some(&s1) if s1 > 0.0 => self.sigma.iter().filter(|&&s| s > rel_tol * s1).count(),
            _ => 0,
        }
    }

    /// `U diag(sigma) V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.u.scale_columns(&self.sigma).matmul(&self.v.adjoint())
    }
}

/// Rank-`m` thin SVD of `a`.
///
/// Each right singular vector is rotated so that its largest-magnitude entry
/// is real and nonnegative; the matching left vector gets the same rotation.
pub fn thin_svd(a: &ComplexMatrix, m: usize) -> Result<SvdResult> {
    let (rows, cols) = a.shape();
    let min_dim = rows.min(cols);
    if m == 0 || m > min_dim {
        return Err(Error::dim(
            "thin_svd",
            format!("rank {m} requested for a {rows}x{cols} matrix"),
        ));
    }
    if !a.is_finite() {
        return Err(Error::Domain {
            what: "thin_svd input",
            value: f64::NAN,
        });
    }

    let transposed = rows < cols;
    let tall = if transposed { a.adjoint() } else { a.clone() };

    let (u_cols, sigma, v_cols) = if min_dim <= KRYLOV_MIN_DIM || 4 * m > min_dim {
        let columns: Vec<Vec<Complex64>> = (0..tall.cols()).map(|c| tall.column(c)).collect();
        let (u, s, v) = one_sided_jacobi(columns, tall.rows())?;
        (u, s, v)
    } else {
        krylov_svd(&tall, m)?
    };

    let (mut left, mut right) = if transposed {
        (v_cols, u_cols)
    } else {
        (u_cols, v_cols)
    };
    left.truncate(m);
    right.truncate(m);
    let sigma = sigma[..m].to_vec();

    for (u, v) in left.iter_mut().zip(right.iter_mut()) {
        fix_gauge(u, v);
    }

    Ok(SvdResult {
        u: ComplexMatrix::from_columns(rows, &left),
        sigma,
        v: ComplexMatrix::from_columns(cols, &right),
    })
}

fn fix_gauge(u: &mut [Complex64], v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let rot = (v[best] / best_mag).conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[best] = Complex64::new(v[best].re.max(0.0), 0.0);
    for z in u.iter_mut() {
        *z *= rot;
    }
}

type Triplets = (Vec<Vec<Complex64>>, Vec<f64>, Vec<Vec<Complex64>>);

/// One-sided Jacobi on the columns of a tall matrix (`rows >= columns.len()`).
///
/// Returns left vectors (length `rows`), singular values and right vectors
/// (length `columns.len()`), all sorted by descending singular value with
/// ties kept in original column order.
fn one_sided_jacobi(mut columns: Vec<Vec<Complex64>>, rows: usize) -> Result<Triplets> {
    let n = columns.len();
    debug_assert!(rows >= n);
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let total: f64 = columns.iter().map(|c| norm_sqr(c)).sum();
    let negligible = total * f64::EPSILON * f64::EPSILON;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut norms: Vec<f64> = columns.iter().map(|c| norm_sqr(c)).collect();
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot_conj(&columns[p], &columns[q]);
                let g = gamma.norm();
                if g <= ORTHO_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // a_p <- c a_p - s e^{-i phi} a_q ; a_q <- s e^{i phi} a_p + c a_q
                let s_conj = phase.conj() * s;
                let s_fwd = phase * s;
                rotate_pair(&mut columns, p, q, c, s_conj, s_fwd);
                rotate_pair(&mut v, p, q, c, s_conj, s_fwd);
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            op: "one-sided Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }

    let sigma_raw: Vec<f64> = columns.iter().map(|c| norm_sqr(c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma_raw[j].total_cmp(&sigma_raw[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| sigma_raw[i]).collect();
    let s1 = sigma.first().copied().unwrap_or(0.0);
    let zero_tol = s1 * f64::EPSILON * rows.max(1) as f64;

    // Columns with tiny singular values carry mostly rounding noise, so each
    // candidate is re-orthogonalised against the accepted ones.
    let mut u: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        let mut accepted = false;
        if sigma[k] > zero_tol {
            let inv = 1.0 / sigma[k];
            let mut cand: Vec<Complex64> = columns[i].iter().map(|z| z * inv).collect();
            let kept: Vec<Vec<Complex64>> = u.iter().filter(|x| !x.is_empty()).cloned().collect();
            let left = orthogonalize(&mut cand, &kept);
            if left > 0.5 {
                u.push(cand.into_iter().map(|z| z / left).collect());
                accepted = true;
            }
        }
        if !accepted {
            u.push(Vec::new());
            missing.push(k);
        }
    }
    complete_basis(&mut u, &missing, rows);
    let v_sorted: Vec<Vec<Complex64>> = order.iter().map(|&i| v[i].clone()).collect();
    Ok((u, sigma, v_sorted))
}

fn rotate_pair(
    cols: &mut [Vec<Complex64>],
    p: usize,
    q: usize,
    c: f64,
    s_conj: Complex64,
    s_fwd: Complex64,
) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = a * c - s_conj * b;
        *y = s_fwd * a + b * c;
    }
}

/// Fills the empty slots listed in `missing` with unit vectors orthogonal to
/// every other column. Each slot takes the canonical basis vector with the
/// largest component outside the current span (lowest index on ties).
fn complete_basis(u: &mut [Vec<Complex64>], missing: &[usize], rows: usize) {
    for &slot in missing {
        let kept: Vec<Vec<Complex64>> = u.iter().filter(|x| !x.is_empty()).cloned().collect();
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for j in 0..rows {
            let mut e = vec![Complex64::new(0.0, 0.0); rows];
            e[j] = Complex64::new(1.0, 0.0);
            let left = orthogonalize(&mut e, &kept);
            if best.as_ref().is_none_or(|(b, _)| left > *b) {
                best = Some((left, e));
            }
        }
        let (nrm, e) = best.expect("rows >= 1");
        u[slot] = e.into_iter().map(|z| z / nrm).collect();
    }
}

/// Orthonormalises `x` against `basis` (classical Gram-Schmidt, applied
/// twice). Returns the norm left after projection.
fn orthogonalize(x: &mut [Complex64], basis: &[Vec<Complex64>]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let proj = dot_conj(q, x);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= proj * qi;
            }
        }
    }
    norm_sqr(x).sqrt()
}

fn krylov_svd(a: &ComplexMatrix, m: usize) -> Result<Triplets> {
    let (rows, n) = a.shape();
    let mut rng = SeededRng::new(KRYLOV_START_SEED, (rows * 65_537 + n) as u64);
    let mut random_unit = |basis: &[Vec<Complex64>]| -> Option<Vec<Complex64>> {
        for _ in 0..8 {
            let mut x: Vec<Complex64> = (0..n).map(|_| rng.complex_gaussian()).collect();
            let start = norm_sqr(&x).sqrt();
            let left = orthogonalize(&mut x, basis);
            if left > 1e-8 * start {
                x.iter_mut().for_each(|z| *z /= left);
                return Some(x);
            }
        }
        None
    };

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut images: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = random_unit(&basis).expect("first Lanczos vector");
    let mut scale: f64 = 0.0;
    let mut next_check = m + KRYLOV_OVERSAMPLE;

    loop {
        let w = a.mul_vec(&q);
        let mut z = a.adjoint_mul_vec(&w);
        let a_j = dot_conj(&q, &z).re;
        basis.push(q);
        images.push(w);
        alpha.push(a_j);
        scale = scale.max(a_j.abs());
        let s = basis.len();

        let b_j = if s < n {
            orthogonalize(&mut z, &basis)
        } else {
            0.0
        };
        let invariant = b_j <= 1e-12 * scale;

        let done = s == n || s >= next_check || invariant;
        if done {
            let (theta, y) = tridiagonal_eigen(&alpha, &beta)?;
            let theta_max = theta[0].max(0.0);
            let exhausted = s == n;
            let converged = exhausted
                || (0..m.min(s))
                    .all(|k| (b_j * y[(s - 1) * s + k]).abs() <= KRYLOV_RESIDUAL_TOL * theta_max);
            if converged && s >= m {
                let p = (m + KRYLOV_OVERSAMPLE).min(s);
                let coeffs = |k: usize| -> Vec<Complex64> {
                    (0..s).map(|j| Complex64::new(y[j * s + k], 0.0)).collect()
                };
                let ritz_v: Vec<Vec<Complex64>> =
                    (0..p).map(|k| combine(&basis, &coeffs(k), n)).collect();
                let ritz_images: Vec<Vec<Complex64>> =
                    (0..p).map(|k| combine(&images, &coeffs(k), rows)).collect();
                let (u, sigma, small_v) = one_sided_jacobi(ritz_images, rows)?;
                let v: Vec<Vec<Complex64>> =
                    small_v.iter().map(|c| combine(&ritz_v, c, n)).collect();
                return Ok((u, sigma, v));
            }
            if s >= next_check {
                next_check = s + (s / 4).max(4);
            }
        }

        if invariant {
            // The Krylov space is invariant: continue in a fresh direction
            // orthogonal to everything found so far.
            beta.push(0.0);
            q = random_unit(&basis).ok_or(Error::Convergence {
                op: "Lanczos SVD",
                iterations: s,
            })?;
        } else {
            beta.push(b_j);
            q = z.into_iter().map(|x| x / b_j).collect();
        }
    }
}

/// `sum_j coeffs[j] * vectors[j]`.
fn combine(vectors: &[Vec<Complex64>], coeffs: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (vec, &c) in vectors.iter().zip(coeffs) {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, x) in out.iter_mut().zip(vec) {
            *o += c * x;
        }
    }
    out
}
