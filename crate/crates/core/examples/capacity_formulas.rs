//! Bond dimensions needed to represent everything, and under growth
//! assumptions on the number of Schmidt components.

use tensorank::capacity::{
    compare_models, parse_assumption, required_dim_exact, tt_mera_relation_holds,
};
use tensorank::formats::ModelKind;

fn main() -> tensorank::Result<()> {
    for order in [4, 8, 16, 32] {
        let row: Vec<String> = [ModelKind::Tt, ModelKind::Ht, ModelKind::Mera]
            .into_iter()
            .map(|k| {
                let r = required_dim_exact(k, order, 2).unwrap();
                format!("{}={} (~{:.2})", k, r.exact, r.value)
            })
            .collect();
        println!(
            "L={order:>2} D=2: {}  relation {}",
            row.join("  "),
            tt_mera_relation_holds(order, 2)?
        );
    }
    for spec in ["exp:2", "pow:1:2", "log:1", "const:5"] {
        let n = parse_assumption(spec)?;
        let r = compare_models(&n, 16)?;
        println!(
            "{spec:>8}: chi_tt_ht {:>8.3}  chi_mera {:>6.3} at m={:?}  margin {:.3} bits",
            r.chi_tt_ht, r.chi_mera.value, r.chi_mera.argmax, r.margin_log2
        );
    }
    Ok(())
}
