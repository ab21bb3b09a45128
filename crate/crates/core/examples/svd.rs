//! Truncated SVD of a random channel, checked against a Gram-matrix oracle.

use beamsim::numerics::reference::gram_eigenvalues;
use beamsim::numerics::{sample_complex_gaussian, thin_svd, ComplexMatrix, SeededRng};

fn main() -> beamsim::Result<()> {
    let mut rng = SeededRng::new(1, 0);
    let a = ComplexMatrix::from_vec(8, 6, sample_complex_gaussian(&mut rng, 48))?;
    let svd = thin_svd(&a, 6)?;
    let oracle = gram_eigenvalues(&a);
    println!("{:>3} {:>12} {:>12}", "k", "sigma", "oracle");
    for (k, (s, l)) in svd.sigma.iter().zip(&oracle).enumerate() {
        println!("{k:>3} {s:>12.8} {:>12.8}", l.sqrt());
    }
    let resid = a.sub(&svd.reconstruct()).frobenius_norm() / a.frobenius_norm();
    println!("relative reconstruction error {resid:.2e}");

    // Large and low rank: takes the Lanczos path.
    let big = ComplexMatrix::from_vec(256, 256, sample_complex_gaussian(&mut rng, 256 * 256))?;
    let top = thin_svd(&big, 4)?;
    println!("256x256 leading singular values {:?}", top.sigma);
    Ok(())
}
