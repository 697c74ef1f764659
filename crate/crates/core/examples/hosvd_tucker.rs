//! Truncated HOSVD into Tucker format.

use tensorank::decompose::hosvd_tucker;
use tensorank::formats::{Fill, ModelKind, TensorModel, DEFAULT_DENSE_CAP};

fn main() -> tensorank::Result<()> {
    let target = TensorModel::make(ModelKind::Tucker, 4, 6, 3, Fill::Random(5))?
        .to_dense(DEFAULT_DENSE_CAP)?;
    for r in [1, 2, 3] {
        let (tucker, report) = hosvd_tucker(&target, &[r; 4])?;
        println!(
            "ranks {:?}: relative error {:.3e}",
            tucker.ranks(),
            report.relative_error
        );
        for s in &report.steps {
            println!(
                "  {:<7} kept {} discarded {:.3e}",
                s.label, s.retained_rank, s.discarded_weight
            );
        }
    }
    Ok(())
}
