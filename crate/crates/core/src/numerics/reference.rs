//! Slow, independent implementations used as oracles by the test suites and
//! by `validate`. Nothing in the simulation path calls into this module.

use std::f64::consts::PI;

use super::matrix::ComplexMatrix;

/// Eigenvalues of `a^H a`, descending.
///
/// The Hermitian Gram matrix `G = X + iY` is embedded as the real symmetric
/// matrix `[[X, -Y], [Y, X]]`, whose spectrum is that of `G` with every value
/// repeated twice, and diagonalised with textbook real cyclic Jacobi.
pub fn gram_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let g = a.adjoint_matmul(a);
    let n = g.rows();
    let size = 2 * n;
    let mut s = vec![vec![0.0; size]; size];
    for i in 0..n {
        for j in 0..n {
            let z = g[(i, j)];
            s[i][j] = z.re;
            s[i + n][j + n] = z.re;
            s[i][j + n] = -z.im;
            s[i + n][j] = z.im;
        }
    }
    let mut values = real_jacobi_eigenvalues(s);
    values.sort_by(|x, y| y.total_cmp(x));
    values.into_iter().step_by(2).collect()
}

fn real_jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                // Rotation chosen to annihilate a[p][q]: a' = J^T a J
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Maclaurin series of erf, summed until terms stop changing the total.
/// Accurate for |x| up to about 4; beyond that cancellation takes over.
pub fn erf_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = x; // x^(2n+1) / n!
    let x2 = x * x;
    let mut n = 0u32;
    loop {
        let term = power / (2 * n + 1) as f64;
        let term = if n % 2 == 0 { term } else { -term };
        let next = sum + term;
        if next == sum || n > 400 {
            break;
        }
        sum = next;
        n += 1;
        power *= x2 / n as f64;
    }
    2.0 / PI.sqrt() * sum
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
