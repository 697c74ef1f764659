//! Schmidt spectrum of a matrix: weights, truncation error, Rényi entropies.

use tensorank::schmidt::{renyi_entropy, schmidt_decompose, truncate};
use tensorank::synth_io::SeededRng;
use tensorank::Matrix;

fn main() -> tensorank::Result<()> {
    // a 12x10 matrix of rank 4 plus a little noise
    let mut rng = SeededRng::new(3);
    let u = Matrix::new(12, 4, rng.normals(48))?;
    let v = Matrix::new(4, 10, rng.normals(40))?;
    let mut a = u.matmul(&v)?;
    for r in 0..12 {
        for c in 0..10 {
            a.set(r, c, a.get(r, c) + 1e-3 * rng.normal());
        }
    }

    let f = schmidt_decompose(&a, 1e-10)?;
    println!("weights (squared singular values):");
    for (i, l) in f.spectrum.lambdas().iter().enumerate() {
        println!("  λ{:<2} = {l:.6e}", i + 1);
    }
    println!(
        "total weight {:.6}, ‖A‖² {:.6}",
        f.spectrum.total_weight(),
        a.frobenius_norm_sq()
    );

    for r in [1, 2, 4, 6] {
        let (kept, discarded) = truncate(&f, r)?;
        let actual = a.distance_sq(&kept.reconstruct());
        println!("rank {r}: discarded {discarded:.6e}, recomputed {actual:.6e}");
    }
    println!(
        "numerical rank at 1e-2: {}",
        f.spectrum.numerical_rank(1e-2)
    );
    for n in [0.0, 1.0, 2.0] {
        println!(
            "Rényi-{n} entropy: {:.4} bits",
            renyi_entropy(&f.spectrum, n)?
        );
    }
    Ok(())
}
