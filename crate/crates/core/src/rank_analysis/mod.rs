//! Bipartition rank profiles, min-cut bounds on bond graphs, separability
//! scaling and the representability check between a target and a model.

mod mincut;
mod ssb;

pub use mincut::{
    free_nodes, min_cut_bound, min_cut_bound_with, CutBound, CutMethod, MAX_FREE_NODES,
};
pub use ssb::{classify, SsbClass, SsbFit, FIT_THRESHOLD};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::TensorNetworkGraph;
use crate::schmidt::matrix_rank;
use crate::tensor::{enumerate_bipartitions, DenseTensor, ModeBipartition};

/// Largest order profiled exhaustively unless `TENSORANK_MAX_L` says otherwise.
pub const DEFAULT_MAX_ORDER: usize = 16;
pub const MAX_ORDER_ENV: &str = "TENSORANK_MAX_L";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl Limits {
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_ORDER_ENV) {
            Err(_) => Ok(Self::default()),
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(max_order) if max_order >= 1 => Ok(Self { max_order }),
                _ => Err(Error::out_of_range(MAX_ORDER_ENV, v, "a positive integer")),
            },
        }
    }

    fn check(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::SizeCap {
                what: "order for exhaustive bipartition analysis",
                requested: order as u128,
                cap: self.max_order as u128,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartitionRank {
    pub bipartition: ModeBipartition,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankLevel {
    pub m: usize,
    pub max_rank: usize,
    pub min_rank: usize,
    pub entries: Vec<BipartitionRank>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankProfile {
    pub order: usize,
    pub dims: Vec<usize>,
    pub tol: f64,
    pub levels: Vec<RankLevel>,
}

impl RankProfile {
    pub fn level(&self, m: usize) -> Option<&RankLevel> {
        self.levels.iter().find(|l| l.m == m)
    }

    pub fn max_rank(&self, m: usize) -> Option<usize> {
        self.level(m).map(|l| l.max_rank)
    }

    pub fn min_rank(&self, m: usize) -> Option<usize> {
        self.level(m).map(|l| l.min_rank)
    }

    /// Largest rank over every bipartition.
    pub fn overall_max(&self) -> usize {
        self.levels.iter().map(|l| l.max_rank).max().unwrap_or(0)
    }
}

fn check_m_max(order: usize, m_max: Option<usize>) -> Result<usize> {
    let half = order / 2;
    match m_max {
        None => Ok(half),
        Some(m) if (1..=half).contains(&m) => Ok(m),
        Some(m) => Err(Error::out_of_range("m_max", m, format!("1..={half}"))),
    }
}

/// Numerical rank of every matricization with `1 ≤ |A| ≤ m_max`.
pub fn rank_profile(t: &DenseTensor, tol: f64, m_max: Option<usize>) -> Result<RankProfile> {
    rank_profile_with(t, tol, m_max, &Limits::from_env()?)
}

pub fn rank_profile_with(
    t: &DenseTensor,
    tol: f64,
    m_max: Option<usize>,
    limits: &Limits,
) -> Result<RankProfile> {
    let order = t.order();
    limits.check(order)?;
    if order < 2 {
        return Err(Error::Shape(
            "rank profiles need an order of at least 2".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("tensor has non-finite entries".into()));
    }
    let m_max = check_m_max(order, m_max)?;
    let mut levels = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let entries = enumerate_bipartitions(order, m)?
            .into_par_iter()
            .map(|p| {
                let rank = matrix_rank(&t.matricize(&p)?, tol)?;
                Ok(BipartitionRank {
                    bipartition: p,
                    rank,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let max_rank = entries.iter().map(|e| e.rank).max().unwrap_or(0);
        let min_rank = entries.iter().map(|e| e.rank).min().unwrap_or(0);
        levels.push(RankLevel {
            m,
            max_rank,
            min_rank,
            entries,
        });
    }
    Ok(RankProfile {
        order,
        dims: t.dims().to_vec(),
        tol,
        levels,
    })
}

/// The cheapest cut among all bipartitions of one size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparabilitySample {
    pub m: usize,
    /// Fewest severed edges over the bipartitions of size `m`.
    pub n: usize,
    /// A bipartition attaining `n`.
    pub bipartition: ModeBipartition,
    /// Dims of the edges it severs.
    pub severed_dims: Vec<usize>,
    /// Smallest rank bound over the bipartitions of size `m`.
    pub min_rank_bound: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparabilityProfile {
    pub order: usize,
    pub samples: Vec<SeparabilitySample>,
    pub ssb_class: SsbClass,
    pub fit: Option<SsbFit>,
}

impl SeparabilityProfile {
    pub fn n(&self, m: usize) -> Option<usize> {
        self.samples.iter().find(|s| s.m == m).map(|s| s.n)
    }
}

/// Sizes sampled for a graph of the given order: powers of two up to
/// `L/2`, and every size when `L ≤ 12`.
pub fn sample_sizes(order: usize) -> Vec<usize> {
    let half = order / 2;
    if order <= 12 {
        (1..=half).collect()
    } else {
        std::iter::successors(Some(1usize), |m| Some(m * 2))
            .take_while(|&m| m <= half)
            .collect()
    }
}

/// All minimum cuts for one bipartition size, in enumeration order.
pub fn cuts_of_size(g: &TensorNetworkGraph, m: usize) -> Result<Vec<(ModeBipartition, CutBound)>> {
    enumerate_bipartitions(g.order(), m)?
        .into_par_iter()
        .map(|p| min_cut_bound(g, &p).map(|c| (p, c)))
        .collect()
}

pub fn separability_profile(g: &TensorNetworkGraph) -> Result<SeparabilityProfile> {
    separability_profile_with(g, &Limits::from_env()?)
}

pub fn separability_profile_with(
    g: &TensorNetworkGraph,
    limits: &Limits,
) -> Result<SeparabilityProfile> {
    let order = g.order();
    limits.check(order)?;
    if order < 2 {
        return Err(Error::Shape(
            "separability needs an order of at least 2".into(),
        ));
    }
    if !g.is_connected() {
        return Err(Error::Graph("bond graph is not connected".into()));
    }
    let mut samples = Vec::new();
    for m in sample_sizes(order) {
        let cuts = cuts_of_size(g, m)?;
        let min_rank_bound = cuts.iter().map(|(_, c)| c.rank_bound).min().unwrap_or(1);
        let (p, best) = cuts
            .into_iter()
            .min_by(|a, b| {
                a.1.cut_edges
                    .cmp(&b.1.cut_edges)
                    .then(a.1.log2_weight.total_cmp(&b.1.log2_weight))
            })
            .expect("at least one bipartition");
        samples.push(SeparabilitySample {
            m,
            n: best.cut_edges,
            bipartition: p,
            severed_dims: best.severed_dims,
            min_rank_bound,
        });
    }
    let points: Vec<(usize, usize)> = samples.iter().map(|s| (s.m, s.n)).collect();
    let (ssb_class, fit) = classify(&points);
    Ok(SeparabilityProfile {
        order,
        samples,
        ssb_class,
        fit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CannikinLevel {
    pub m: usize,
    /// Highest target rank over bipartitions of size `m`.
    pub lhs: usize,
    pub lhs_bipartition: ModeBipartition,
    /// Lowest model rank bound over bipartitions of size `m`.
    pub rhs: u128,
    pub rhs_bipartition: ModeBipartition,
    /// `lhs ≤ rhs`.
    pub satisfied: bool,
    /// Every bipartition of size `m` has target rank within the model's
    /// bound for that same bipartition.
    pub aligned_satisfied: bool,
    /// Bipartition with the largest excess of target rank over model bound.
    pub aligned_worst: AlignedCut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignedCut {
    pub bipartition: ModeBipartition,
    pub target_rank: usize,
    pub model_bound: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CannikinReport {
    pub levels: Vec<CannikinLevel>,
    /// The max/min inequality at every `m`: the model's weakest bipartition
    /// covers the target's strongest one, whatever the mode arrangement.
    pub verdict: bool,
    /// The weaker requirement with modes kept in place: target rank within
    /// the model bound bipartition by bipartition.
    pub aligned_verdict: bool,
}

impl CannikinReport {
    /// Sizes at which the model falls short.
    pub fn violations(&self) -> Vec<usize> {
        self.levels
            .iter()
            .filter(|l| !l.satisfied)
            .map(|l| l.m)
            .collect()
    }
}

/// Compares, for every `m`, the target's strongest bipartition with the
/// model's weakest one.
pub fn cannikin_check(t: &DenseTensor, g: &TensorNetworkGraph, tol: f64) -> Result<CannikinReport> {
    cannikin_check_with(t, g, tol, &Limits::from_env()?)
}

pub fn cannikin_check_with(
    t: &DenseTensor,
    g: &TensorNetworkGraph,
    tol: f64,
    limits: &Limits,
) -> Result<CannikinReport> {
    if t.order() != g.order() {
        return Err(Error::OrderMismatch {
            expected: g.order(),
            found: t.order(),
        });
    }
    if t.dims() != g.physical_dims() {
        return Err(Error::DimMismatch(format!(
            "tensor dims {:?} differ from the model's physical dims {:?}",
            t.dims(),
            g.physical_dims()
        )));
    }
    let profile = rank_profile_with(t, tol, None, limits)?;
    cannikin_from_profile(&profile, g)
}

/// Same check against an already computed target profile.
pub fn cannikin_from_profile(
    profile: &RankProfile,
    g: &TensorNetworkGraph,
) -> Result<CannikinReport> {
    let mut levels = Vec::with_capacity(profile.levels.len());
    for level in &profile.levels {
        let strongest = level
            .entries
            .iter()
            .max_by_key(|e| e.rank)
            .expect("non-empty level");
        let cuts = cuts_of_size(g, level.m)?;
        let (rhs_bipartition, weakest) = cuts
            .iter()
            .min_by_key(|(_, c)| c.rank_bound)
            .expect("non-empty level");
        // both lists follow enumeration order
        let excess = |e: &BipartitionRank, c: &CutBound| {
            e.rank as i128 - c.rank_bound.min(i128::MAX as u128) as i128
        };
        let (entry, cut) = level
            .entries
            .iter()
            .zip(cuts.iter().map(|(_, c)| c))
            .max_by_key(|(e, c)| excess(e, c))
            .expect("non-empty level");
        levels.push(CannikinLevel {
            m: level.m,
            lhs: level.max_rank,
            lhs_bipartition: strongest.bipartition,
            rhs: weakest.rank_bound,
            rhs_bipartition: *rhs_bipartition,
            satisfied: level.max_rank as u128 <= weakest.rank_bound,
            aligned_satisfied: excess(entry, cut) <= 0,
            aligned_worst: AlignedCut {
                bipartition: entry.bipartition,
                target_rank: entry.rank,
                model_bound: cut.rank_bound,
            },
        });
    }
    let verdict = levels.iter().all(|l| l.satisfied);
    let aligned_verdict = levels.iter().all(|l| l.aligned_satisfied);
    Ok(CannikinReport {
        levels,
        verdict,
        aligned_verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{make_ht, make_mera, make_tt, Fill, DEFAULT_DENSE_CAP};
    use crate::schmidt::DEFAULT_TOL;
    use crate::synth_io::{ghz, random_cp, random_dense};

    #[test]
    fn rank_one_profile() {
        let t = random_cp(6, 3, 1, 2).unwrap();
        let p = rank_profile_with(&t, DEFAULT_TOL, None, &Limits::default()).unwrap();
        assert_eq!(p.levels.len(), 3);
        assert!(p.levels.iter().all(|l| l.max_rank == 1 && l.min_rank == 1));
        assert_eq!(p.level(3).unwrap().entries.len(), 10);
    }

    #[test]
    fn ghz_has_rank_two_everywhere() {
        let p =
            rank_profile_with(&ghz(6, 2).unwrap(), DEFAULT_TOL, None, &Limits::default()).unwrap();
        for l in &p.levels {
            assert!(l.entries.iter().all(|e| e.rank == 2));
        }
    }

    #[test]
    fn cp_sum_bounded_by_terms() {
        let t = random_cp(6, 2, 3, 42).unwrap();
        let p = rank_profile_with(&t, DEFAULT_TOL, None, &Limits::default()).unwrap();
        assert!(p.overall_max() <= 3);
    }

    #[test]
    fn order_cap() {
        let t = random_dense(vec![2; 6], 1).unwrap();
        let err = rank_profile_with(&t, DEFAULT_TOL, None, &Limits { max_order: 5 }).unwrap_err();
        assert!(err.is_resource_cap());
        assert!(rank_profile_with(&t, DEFAULT_TOL, Some(4), &Limits::default()).is_err());
    }

    #[test]
    fn separability_classes() {
        let lim = Limits::default();
        let tt = separability_profile_with(
            &make_tt(16, 2, 2, Fill::Zeros).unwrap().structure_graph(),
            &lim,
        )
        .unwrap();
        assert!(tt.samples.iter().all(|s| s.n == 1));
        assert_eq!(tt.ssb_class, SsbClass::Constant);
        let ht = separability_profile_with(
            &make_ht(16, 2, 2, Fill::Zeros).unwrap().structure_graph(),
            &lim,
        )
        .unwrap();
        assert_eq!(ht.ssb_class, SsbClass::Constant);
        let mera = separability_profile_with(
            &make_mera(16, 2, 2, Fill::Zeros).unwrap().structure_graph(),
            &lim,
        )
        .unwrap();
        for m in [2usize, 4, 8] {
            assert!(mera.n(m).unwrap() >= m.trailing_zeros() as usize);
        }
        assert_eq!(mera.ssb_class, SsbClass::Logarithmic);
    }

    #[test]
    fn cannikin_tt() {
        let lim = Limits::default();
        let target = make_tt(8, 2, 3, Fill::Random(7))
            .unwrap()
            .to_dense(DEFAULT_DENSE_CAP)
            .unwrap();
        let g3 = make_tt(8, 2, 3, Fill::Zeros).unwrap().structure_graph();
        let g2 = make_tt(8, 2, 2, Fill::Zeros).unwrap().structure_graph();
        let r = cannikin_check_with(&target, &g3, DEFAULT_TOL, &lim).unwrap();
        // kept in place the train fits its own structure, but scrambled
        // arrangements reach rank 16 at m = 4
        assert!(r.aligned_verdict);
        assert!(!r.verdict);
        assert_eq!((r.levels[3].lhs, r.levels[3].rhs), (16, 3));
        let r = cannikin_check_with(&target, &g2, DEFAULT_TOL, &lim).unwrap();
        assert!(!r.verdict);
        assert!(!r.aligned_verdict);
        let one = random_cp(8, 2, 1, 3).unwrap();
        let g1 = make_tt(8, 2, 1, Fill::Zeros).unwrap().structure_graph();
        assert!(
            cannikin_check_with(&one, &g1, DEFAULT_TOL, &lim)
                .unwrap()
                .verdict
        );
        let dense = random_dense(vec![2; 8], 3).unwrap();
        let r = cannikin_check_with(&dense, &g2, DEFAULT_TOL, &lim).unwrap();
        assert!(r.violations().contains(&4));
        let wrong = random_dense(vec![2; 6], 3).unwrap();
        assert!(cannikin_check_with(&wrong, &g2, DEFAULT_TOL, &lim).is_err());
    }
}
