//! How many bonds the cheapest cut around m modes must sever, per model.

use tensorank::formats::{Fill, ModelKind, TensorModel};
use tensorank::rank_analysis::separability_profile;

fn main() -> tensorank::Result<()> {
    let order = 16;
    for kind in [ModelKind::Tt, ModelKind::Ht, ModelKind::Mera] {
        let g = TensorModel::make(kind, order, 2, 2, Fill::Zeros)?.structure_graph();
        let p = separability_profile(&g)?;
        let n: Vec<String> = p
            .samples
            .iter()
            .map(|s| format!("n({})={}", s.m, s.n))
            .collect();
        println!("{:>4}: {:<36} -> {}", kind.name(), n.join(" "), p.ssb_class);
        if let Some(fit) = &p.fit {
            println!(
                "      {} fit {:?}, relative rms {:.3}",
                fit.family, fit.params, fit.relative_rms
            );
        }
    }
    let g = TensorModel::make(ModelKind::Mera, order, 2, 2, Fill::Zeros)?.structure_graph();
    println!(
        "MERA L={order}: {} nodes, {} bonds",
        g.nodes().len(),
        g.edges().len()
    );
    Ok(())
}
