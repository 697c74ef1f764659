//! Sample functions on a grid and look at their separability.

use tensorank::rank_analysis::rank_profile;
use tensorank::synth_io::{parse_expression, sample_grid};

fn main() -> tensorank::Result<()> {
    let cases = [
        "exp(x1) * cos(x2) * (1 + x3) * sqrt(x4 + 1)",
        "x1 + x2 + x3 + x4",
        "sin(x1 + x2 + x3 + x4)",
        "1 / (1 + x1^2 + x2^2 + x3^2 + x4^2)",
    ];
    for text in cases {
        let ast = parse_expression(text)?;
        let t = sample_grid(&ast, 4, 8, &[(0.0, 1.0); 4])?;
        let p = rank_profile(&t, 1e-10, None)?;
        let max: Vec<usize> = p.levels.iter().map(|l| l.max_rank).collect();
        println!("{:<40} max rank per cut size {max:?}", ast.unparse());
    }
    Ok(())
}
