use proptest::prelude::*;
use tensorank::synth_io::random_dense;
use tensorank::tensor::enumerate_bipartitions;
use tensorank::{DenseTensor, ModeBipartition};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matricization_keeps_the_norm(dims in dims_strategy(), seed: u64, mask: u64) {
        let t = random_dense(dims.clone(), seed).unwrap();
        let order = dims.len();
        let m = mask & ((1u64 << order) - 1);
        prop_assume!(m != 0 && m != (1u64 << order) - 1);
        let p = ModeBipartition::from_modes(&(0..order).filter(|k| m >> k & 1 == 1).collect::<Vec<_>>(), order).unwrap();
        let a = t.matricize(&p).unwrap();
        prop_assert_eq!(a.rows() * a.cols(), t.len());
        prop_assert!((a.frobenius_norm_sq() - t.frobenius_norm_sq()).abs() <= 1e-12 * t.frobenius_norm_sq());
    }

    #[test]
    fn fold_inverts_unfold(dims in dims_strategy(), seed: u64, rows in prop::collection::vec(any::<bool>(), 6)) {
        let t = random_dense(dims.clone(), seed).unwrap();
        let row_modes: Vec<usize> = (0..dims.len()).filter(|&k| rows[k]).collect();
        let a = t.unfold(&row_modes).unwrap();
        let back = DenseTensor::fold(&a, &row_modes, &dims).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn permute_round_trip(dims in dims_strategy(), seed: u64, keys in prop::collection::vec(any::<u32>(), 6)) {
        let t = random_dense(dims.clone(), seed).unwrap();
        let mut perm: Vec<usize> = (0..dims.len()).collect();
        perm.sort_by_key(|&k| keys[k]);
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let back = t.permute(&perm).unwrap().permute(&inverse).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn bipartition_counts_up_to_sixteen() {
    for order in 2..=16 {
        for m in 1..=order / 2 {
            let ps = enumerate_bipartitions(order, m).unwrap();
            let expected = if 2 * m == order {
                binomial(order, m) / 2
            } else {
                binomial(order, m)
            };
            assert_eq!(ps.len(), expected, "L={order} m={m}");
            let mut masks: Vec<u64> = ps.iter().map(|p| p.mask()).collect();
            masks.sort_unstable();
            masks.dedup();
            assert_eq!(masks.len(), expected);
            for p in &ps {
                assert_eq!(p.size(), m);
                assert_eq!(ModeBipartition::new(p.mask(), order).unwrap(), *p);
            }
        }
    }
}

#[test]
fn complement_is_the_same_bipartition() {
    let a = ModeBipartition::from_modes(&[0, 1], 4).unwrap();
    let b = ModeBipartition::from_modes(&[2, 3], 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.part_a(), vec![0, 1]);
    // the larger side is never part A
    let c = ModeBipartition::from_modes(&[0, 1, 2, 3], 6).unwrap();
    assert_eq!(c.part_a(), vec![4, 5]);
    assert!(ModeBipartition::from_modes(&[], 4).is_err());
    assert!(ModeBipartition::from_modes(&[0, 7], 4).is_err());
}
