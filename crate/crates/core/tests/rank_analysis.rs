mod common;

use proptest::prelude::*;
use tensorank::decompose::tt_svd;
use tensorank::formats::{make_tt, Fill, ModelKind, TensorModel, DEFAULT_DENSE_CAP};
use tensorank::rank_analysis::{
    cannikin_check, classify, min_cut_bound, min_cut_bound_with, rank_profile,
    separability_profile, CutMethod, SsbClass,
};
use tensorank::synth_io::{random_cp, random_dense};
use tensorank::tensor::enumerate_bipartitions;

const TOL: f64 = 1e-10;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cp_rank_bounds_every_matricization(
        order in prop::sample::select(vec![4usize, 6, 8]),
        dim in 2usize..=3,
        terms in 1usize..=5,
        seed: u64,
    ) {
        prop_assume!(dim.pow(order as u32) <= 6561);
        let t = random_cp(order, dim, terms, seed).unwrap();
        let profile = rank_profile(&t, TOL, None).unwrap();
        prop_assert!(profile.overall_max() <= terms);
    }

    #[test]
    fn dense_ranks_fill_the_cap(order in 2usize..=8, dim in 2usize..=3, seed: u64) {
        prop_assume!(dim.pow(order as u32) <= 6561);
        let t = random_dense(vec![dim; order], seed).unwrap();
        let profile = rank_profile(&t, TOL, None).unwrap();
        for level in &profile.levels {
            let cap = dim.pow(level.m as u32);
            prop_assert!(level.max_rank <= cap);
            prop_assert_eq!(level.min_rank, cap);
        }
    }
}

#[test]
fn min_cut_bound_is_sound_for_every_model() {
    let cases = [
        (ModelKind::Tt, 4, 2),
        (ModelKind::Tt, 6, 2),
        (ModelKind::Tt, 8, 3),
        (ModelKind::Tucker, 4, 2),
        (ModelKind::Tucker, 6, 1),
        (ModelKind::Ht, 4, 2),
        (ModelKind::Ht, 8, 3),
        (ModelKind::Mera, 4, 2),
        (ModelKind::Mera, 8, 2),
        (ModelKind::Mera, 8, 3),
    ];
    for (kind, order, rank) in cases {
        for seed in 0..2 {
            let model = TensorModel::make(kind, order, 2, rank, Fill::Random(seed)).unwrap();
            let g = model.structure_graph();
            let t = model.to_dense(DEFAULT_DENSE_CAP).unwrap();
            let profile = rank_profile(&t, 1e-8, None).unwrap();
            for level in &profile.levels {
                for e in &level.entries {
                    let cut = min_cut_bound(&g, &e.bipartition).unwrap();
                    assert!(
                        e.rank as u128 <= cut.rank_bound,
                        "{kind} L={order} r={rank} {:?}: rank {} > bound {}",
                        e.bipartition.part_a(),
                        e.rank,
                        cut.rank_bound
                    );
                }
            }
        }
    }
}

#[test]
fn tt_cuts_count_membership_changes() {
    for order in [4usize, 6, 8, 10] {
        let g = make_tt(order, 2, 3, Fill::Zeros).unwrap().structure_graph();
        for m in 1..=order / 2 {
            for p in enumerate_bipartitions(order, m).unwrap() {
                let changes = (0..order - 1)
                    .filter(|&i| p.contains(i) != p.contains(i + 1))
                    .count();
                let flow = min_cut_bound_with(&g, &p, CutMethod::MaxFlow).unwrap();
                let exhaustive = min_cut_bound_with(&g, &p, CutMethod::Exhaustive).unwrap();
                assert_eq!(flow.cut_bonds, changes);
                assert_eq!(exhaustive.cut_bonds, changes);
                assert_eq!(flow.rank_bound, exhaustive.rank_bound);
            }
        }
    }
}

#[test]
fn failing_cannikin_means_no_accurate_decomposition() {
    for seed in 0..3 {
        let target = random_dense(vec![2; 6], seed).unwrap();
        let g = make_tt(6, 2, 2, Fill::Zeros).unwrap().structure_graph();
        let report = cannikin_check(&target, &g, TOL).unwrap();
        assert!(!report.verdict);
        assert!(!report.violations().is_empty());
        let (_, rep) = tt_svd(&target, Some(2), None).unwrap();
        assert!(rep.relative_error > 1e-6, "{}", rep.relative_error);
    }
}

#[test]
fn separability_classes() {
    for order in [8usize, 16] {
        let class = |kind| {
            let g = TensorModel::make(kind, order, 2, 2, Fill::Zeros)
                .unwrap()
                .structure_graph();
            separability_profile(&g).unwrap().ssb_class
        };
        assert_eq!(class(ModelKind::Tt), SsbClass::Constant, "tt L={order}");
        assert_eq!(class(ModelKind::Ht), SsbClass::Constant, "ht L={order}");
        assert_eq!(
            class(ModelKind::Mera),
            SsbClass::Logarithmic,
            "mera L={order}"
        );
    }
}

#[test]
fn separability_samples_are_sorted_and_positive() {
    let g = TensorModel::make(ModelKind::Mera, 16, 2, 2, Fill::Zeros)
        .unwrap()
        .structure_graph();
    let s = separability_profile(&g).unwrap();
    assert!(s.samples.windows(2).all(|w| w[0].m < w[1].m));
    assert!(s.samples.iter().all(|x| x.n >= 1));
    assert_eq!(classify(&[]).0, SsbClass::Unknown);
}
