//! Hierarchical Tucker on a balanced binary tree. A random order-4 tensor
//! needs rank D^(L/2) = 4 to be represented exactly.

use tensorank::decompose::ht_decompose;
use tensorank::synth_io::random_dense;

fn main() -> tensorank::Result<()> {
    let target = random_dense(vec![2; 4], 11)?;
    for cap in [1, 2, 3, 4] {
        let (ht, report) = ht_decompose(&target, Some(cap))?;
        let ranks: Vec<Vec<usize>> = (0..ht.levels()).map(|h| ht.level_ranks(h)).collect();
        println!(
            "max rank {cap}: node ranks {ranks:?}, relative error {:.3e}",
            report.relative_error
        );
    }
    let target = random_dense(vec![2; 8], 12)?;
    let (_, report) = ht_decompose(&target, Some(8))?;
    println!(
        "L=8, max rank 8: relative error {:.3e}",
        report.relative_error
    );
    Ok(())
}
