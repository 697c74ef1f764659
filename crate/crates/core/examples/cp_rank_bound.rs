//! A sum of R rank-1 terms has every matricization rank at most R.

use tensorank::rank_analysis::rank_profile;
use tensorank::synth_io::{random_cp, random_dense};

fn main() -> tensorank::Result<()> {
    for terms in 1..=5 {
        let t = random_cp(8, 2, terms, terms as u64)?;
        let p = rank_profile(&t, 1e-10, None)?;
        let per_m: Vec<(usize, usize)> =
            p.levels.iter().map(|l| (l.min_rank, l.max_rank)).collect();
        println!("R = {terms}: (min, max) rank per cut size {per_m:?}");
    }
    let dense = random_dense(vec![2; 8], 0)?;
    let p = rank_profile(&dense, 1e-10, None)?;
    let max: Vec<usize> = p.levels.iter().map(|l| l.max_rank).collect();
    println!("random dense: max rank per cut size {max:?} (D^m)");
    Ok(())
}
