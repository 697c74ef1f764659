mod common;

use tensorank::formats::{
    make_ht, make_mera, make_tt, Fill, ModelKind, TensorModel, DEFAULT_DENSE_CAP,
};
use tensorank::rank_analysis::min_cut_bound;
use tensorank::schmidt::matrix_rank;
use tensorank::tensor::enumerate_bipartitions;
use tensorank::ModeBipartition;

const TOL: f64 = 1e-8;

#[test]
fn tt_contiguous_cuts_are_bounded_by_r() {
    for seed in 0..3 {
        let tt = make_tt(8, 2, 3, Fill::Random(seed)).unwrap();
        let t = tt.to_dense(DEFAULT_DENSE_CAP).unwrap();
        for m in 1..8 {
            let p = ModeBipartition::contiguous(m, 8).unwrap();
            let rank = matrix_rank(&t.matricize(&p).unwrap(), TOL).unwrap();
            // generic fill reaches the bond dim
            assert_eq!(
                rank,
                3usize.min(1 << m).min(1 << (8 - m)),
                "seed {seed} m {m}"
            );
        }
    }
}

#[test]
fn tt_multi_cut_rank_is_bounded_by_r_to_the_k() {
    let r = 2usize;
    let tt = make_tt(8, 3, r, Fill::Random(11)).unwrap();
    let g = tt.structure_graph();
    let t = tt.to_dense(DEFAULT_DENSE_CAP).unwrap();
    for m in 1..=4 {
        for p in enumerate_bipartitions(8, m).unwrap() {
            let cut = min_cut_bound(&g, &p).unwrap();
            let rank = matrix_rank(&t.matricize(&p).unwrap(), TOL).unwrap();
            assert!(
                rank as u128 <= (r as u128).pow(cut.cut_bonds as u32),
                "{:?}",
                p.part_a()
            );
            assert!(rank as u128 <= cut.rank_bound);
        }
    }
}

#[test]
fn ht_subtree_cuts_sever_one_edge() {
    for (order, rank) in [(4, 2), (8, 3)] {
        let ht = make_ht(order, 2, rank, Fill::Random(5)).unwrap();
        let g = ht.structure_graph();
        let t = ht.to_dense(DEFAULT_DENSE_CAP).unwrap();
        let levels = order.trailing_zeros() as usize;
        for h in 0..levels {
            for j in 0..order >> h {
                let block: Vec<usize> = (j << h..(j + 1) << h).collect();
                let p = ModeBipartition::from_modes(&block, order).unwrap();
                let cut = min_cut_bound(&g, &p).unwrap();
                assert_eq!(cut.cut_edges, 1, "L={order} block {block:?}");
                let r = matrix_rank(&t.matricize(&p).unwrap(), TOL).unwrap();
                assert!(r <= rank);
            }
        }
    }
}

#[test]
fn mera_windows_of_size_two_to_the_h_sever_h_bonds() {
    for order in [8usize, 16] {
        let g = make_mera(order, 2, 2, Fill::Zeros)
            .unwrap()
            .structure_graph();
        let mut m = 2;
        while m <= order / 2 {
            let need = m.trailing_zeros() as usize;
            for start in 0..order {
                let window: Vec<usize> = (start..start + m).map(|k| k % order).collect();
                let p = ModeBipartition::from_modes(&window, order).unwrap();
                let cut = min_cut_bound(&g, &p).unwrap();
                assert!(
                    cut.cut_edges >= need,
                    "L={order} window {window:?}: {} < {need}",
                    cut.cut_edges
                );
            }
            m *= 2;
        }
    }
}

#[test]
fn graph_bond_dims_match_model_contractions() {
    // single-bond cuts of a generic model reach the bond dim exactly
    let tt = make_tt(6, 3, 4, Fill::Random(2)).unwrap();
    let t = tt.to_dense(DEFAULT_DENSE_CAP).unwrap();
    let g = tt.structure_graph();
    for (k, e) in g.edges().iter().enumerate() {
        assert_eq!(e.dim, tt.bond_dims()[k]);
        let p = ModeBipartition::contiguous(k + 1, 6).unwrap();
        let expected = e
            .dim
            .min(3usize.pow(k as u32 + 1))
            .min(3usize.pow(5 - k as u32));
        assert_eq!(
            matrix_rank(&t.matricize(&p).unwrap(), TOL).unwrap(),
            expected
        );
    }
    let ht = make_ht(8, 2, 3, Fill::Random(4)).unwrap();
    let g = ht.structure_graph();
    for h in 0..ht.levels() {
        for (j, &rank) in ht.level_ranks(h).iter().enumerate() {
            let name = format!("ht[{h},{j}]");
            let node = g.nodes().iter().position(|n| *n == name).unwrap();
            let up: Vec<usize> = g
                .edges()
                .iter()
                .filter(|e| e.a == node || e.b == node)
                .map(|e| e.dim)
                .collect();
            assert!(up.contains(&rank), "{name}");
        }
    }
}

#[test]
fn every_model_is_connected_and_covers_every_mode() {
    for kind in [
        ModelKind::Tt,
        ModelKind::Tucker,
        ModelKind::Ht,
        ModelKind::Mera,
    ] {
        for order in [4, 8] {
            let m = TensorModel::make(kind, order, 2, 2, Fill::Zeros).unwrap();
            let g = m.structure_graph();
            assert!(g.is_connected());
            let mut modes: Vec<usize> = g.open_legs().iter().map(|l| l.mode).collect();
            modes.sort_unstable();
            assert_eq!(modes, (0..order).collect::<Vec<_>>());
            assert!(g.edges().iter().all(|e| e.dim >= 1));
        }
    }
}

#[test]
fn zero_fill_is_zero_and_seeds_are_reproducible() {
    for kind in [
        ModelKind::Tt,
        ModelKind::Tucker,
        ModelKind::Ht,
        ModelKind::Mera,
    ] {
        let z = TensorModel::make(kind, 4, 2, 2, Fill::Zeros)
            .unwrap()
            .to_dense(DEFAULT_DENSE_CAP)
            .unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
        let a = TensorModel::make(kind, 4, 2, 2, Fill::Random(1))
            .unwrap()
            .to_dense(DEFAULT_DENSE_CAP)
            .unwrap();
        let b = TensorModel::make(kind, 4, 2, 2, Fill::Random(1))
            .unwrap()
            .to_dense(DEFAULT_DENSE_CAP)
            .unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn dense_cap_is_enforced() {
    let tt = make_tt(30, 2, 2, Fill::Zeros).unwrap();
    let err = tt.to_dense(DEFAULT_DENSE_CAP).unwrap_err();
    assert!(err.is_resource_cap());
}
