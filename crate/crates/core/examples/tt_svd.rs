//! Tensor-train decomposition: exact recovery, rank caps and error budgets.

use tensorank::decompose::tt_svd;
use tensorank::formats::{make_tt, Fill, DEFAULT_DENSE_CAP};
use tensorank::synth_io::random_dense;

fn main() -> tensorank::Result<()> {
    let target = make_tt(10, 2, 4, Fill::Random(1))?.to_dense(DEFAULT_DENSE_CAP)?;
    let (tt, report) = tt_svd(&target, None, None)?;
    println!(
        "TT target, no caps: bonds {:?}, relative error {:.1e}",
        tt.bond_dims(),
        report.relative_error
    );

    let noise = random_dense(vec![2; 10], 2)?;
    let noisy = target.add(
        &noise.scaled(1e-3 * (target.frobenius_norm_sq() / noise.frobenius_norm_sq()).sqrt()),
    )?;
    for cap in [2, 4, 8] {
        let (tt, r) = tt_svd(&noisy, Some(cap), None)?;
        println!(
            "noisy, max rank {cap}: bonds {:?}, relative error {:.3e}, bound holds {}",
            tt.bond_dims(),
            r.relative_error,
            r.bound_holds(1e-10)
        );
    }

    let eps = 1e-5 * noisy.frobenius_norm_sq();
    let (tt, r) = tt_svd(&noisy, None, Some(eps))?;
    println!(
        "noisy, budget {eps:.2e}: bonds {:?}, achieved {:.2e} <= bound {:.2e}",
        tt.bond_dims(),
        r.achieved_error,
        r.error_bound
    );
    Ok(())
}
