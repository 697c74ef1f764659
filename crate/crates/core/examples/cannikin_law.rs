//! Compare a target's rank profile with what a model can carry.

use tensorank::decompose::tt_svd;
use tensorank::formats::{make_tt, Fill, DEFAULT_DENSE_CAP};
use tensorank::rank_analysis::cannikin_check;

fn main() -> tensorank::Result<()> {
    let target = make_tt(8, 2, 3, Fill::Random(7))?.to_dense(DEFAULT_DENSE_CAP)?;
    for r in [2, 3, 16] {
        let g = make_tt(8, 2, r, Fill::Zeros)?.structure_graph();
        let report = cannikin_check(&target, &g, 1e-10)?;
        println!(
            "TT r={r}: verdict {}, aligned verdict {}",
            report.verdict, report.aligned_verdict
        );
        for l in &report.levels {
            println!(
                "  m={} worst target rank {:>2} vs cheapest model cut {:>2}; worst same-cut gap {} vs {}",
                l.m, l.lhs, l.rhs, l.aligned_worst.target_rank, l.aligned_worst.model_bound
            );
        }
        let (_, fit) = tt_svd(&target, Some(r), None)?;
        println!(
            "  best TT r={r} fit: relative error {:.2e}",
            fit.relative_error
        );
    }
    Ok(())
}
