//! Minimum cuts on bond graphs.
//!
//! Edge weights are `log₂ dim`, so the cheapest cut minimizes the product of
//! severed dimensions. Open legs are pinned to their side of the
//! bipartition: severing one costs more than every bond together, so a leg
//! is only cut when a core carries modes from both sides. A small per-edge
//! surcharge breaks ties toward fewer severed edges.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::TensorNetworkGraph;
use crate::tensor::ModeBipartition;

/// Per-edge tie-break surcharge.
const DELTA: f64 = 1e-6;
/// Largest number of unpinned cores the exhaustive search accepts.
pub const MAX_FREE_NODES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMethod {
    MaxFlow,
    Exhaustive,
}

/// A minimizing cut and the rank bound it certifies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutBound {
    /// Severed bonds plus severed open legs.
    pub cut_edges: usize,
    pub cut_bonds: usize,
    pub cut_legs: usize,
    /// Dimensions of the severed bonds and legs.
    pub severed_dims: Vec<usize>,
    /// `min(Π severed dims, Π_A d, Π_B d)`, saturating.
    pub rank_bound: u128,
    /// `Σ log₂` of the severed dims.
    pub log2_weight: f64,
    /// Cores on the side of part A.
    pub side_a: Vec<usize>,
}

fn log2(dim: usize) -> f64 {
    (dim as f64).log2()
}

fn check(g: &TensorNetworkGraph, p: &ModeBipartition) -> Result<()> {
    if p.order() != g.order() {
        return Err(Error::OrderMismatch {
            expected: g.order(),
            found: p.order(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Graph("bond graph is not connected".into()));
    }
    Ok(())
}

fn saturating_product(dims: impl IntoIterator<Item = usize>) -> u128 {
    dims.into_iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d as u128))
}

/// Reads the cut off a side assignment.
fn evaluate(g: &TensorNetworkGraph, p: &ModeBipartition, in_a: &[bool]) -> CutBound {
    let mut severed_dims = Vec::new();
    let mut cut_bonds = 0;
    let mut cut_legs = 0;
    for e in g.edges() {
        if in_a[e.a] != in_a[e.b] {
            cut_bonds += 1;
            severed_dims.push(e.dim);
        }
    }
    for leg in g.open_legs() {
        if in_a[leg.node] != p.contains(leg.mode) {
            cut_legs += 1;
            severed_dims.push(leg.dim);
        }
    }
    let dims = g.physical_dims();
    let prod_a = saturating_product(p.part_a().into_iter().map(|k| dims[k]));
    let prod_b = saturating_product(p.part_b().into_iter().map(|k| dims[k]));
    let rank_bound = saturating_product(severed_dims.iter().copied())
        .min(prod_a)
        .min(prod_b);
    CutBound {
        cut_edges: cut_bonds + cut_legs,
        cut_bonds,
        cut_legs,
        log2_weight: severed_dims
            .iter()
            .map(|&d| log2(d))
            .fold(0.0, |acc, w| acc + w),
        severed_dims,
        rank_bound,
        side_a: (0..in_a.len()).filter(|&v| in_a[v]).collect(),
    }
}

/// Minimum cut separating the legs of `p.part_a()` from the rest, by
/// max-flow.
pub fn min_cut_bound(g: &TensorNetworkGraph, p: &ModeBipartition) -> Result<CutBound> {
    min_cut_bound_with(g, p, CutMethod::MaxFlow)
}

pub fn min_cut_bound_with(
    g: &TensorNetworkGraph,
    p: &ModeBipartition,
    method: CutMethod,
) -> Result<CutBound> {
    check(g, p)?;
    match method {
        CutMethod::MaxFlow => Ok(max_flow_cut(g, p)),
        CutMethod::Exhaustive => exhaustive_cut(g, p),
    }
}

/// Cores whose side is not fixed by their legs: cores without legs, and
/// cores carrying modes from both parts.
pub fn free_nodes(g: &TensorNetworkGraph, p: &ModeBipartition) -> Vec<usize> {
    pins(g, p)
        .iter()
        .enumerate()
        .filter(|(_, pin)| pin.is_none())
        .map(|(v, _)| v)
        .collect()
}

fn pins(g: &TensorNetworkGraph, p: &ModeBipartition) -> Vec<Option<bool>> {
    let n = g.nodes().len();
    let mut has = vec![(false, false); n];
    for leg in g.open_legs() {
        if p.contains(leg.mode) {
            has[leg.node].0 = true;
        } else {
            has[leg.node].1 = true;
        }
    }
    has.into_iter()
        .map(|h| match h {
            (true, false) => Some(true),
            (false, true) => Some(false),
            _ => None,
        })
        .collect()
}

fn big(g: &TensorNetworkGraph) -> f64 {
    let bonds: f64 = g.edges().iter().map(|e| log2(e.dim) + DELTA).sum();
    let legs: f64 = g.open_legs().iter().map(|l| log2(l.dim) + DELTA).sum();
    bonds + legs + 1.0
}

fn max_flow_cut(g: &TensorNetworkGraph, p: &ModeBipartition) -> CutBound {
    let n = g.nodes().len();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for e in g.edges() {
        let w = log2(e.dim) + DELTA;
        net.add_edge(e.a, e.b, w, w);
    }
    let big = big(g);
    for leg in g.open_legs() {
        let w = big + log2(leg.dim) + DELTA;
        if p.contains(leg.mode) {
            net.add_edge(s, leg.node, w, 0.0);
        } else {
            net.add_edge(leg.node, t, w, 0.0);
        }
    }
    net.max_flow(s, t);
    let reach = net.reachable(s);
    evaluate(g, p, &reach[..n])
}

/// Lexicographic cut cost: severed legs, then log-weight, then edge count.
#[derive(Clone, Copy, Debug)]
struct Cost {
    legs: i64,
    weight: f64,
    edges: i64,
}

impl Cost {
    fn better_than(&self, other: &Cost) -> bool {
        if self.legs != other.legs {
            return self.legs < other.legs;
        }
        if (self.weight - other.weight).abs() > 1e-9 {
            return self.weight < other.weight;
        }
        self.edges < other.edges
    }
}

/// Exact search over every side assignment of the free cores.
fn exhaustive_cut(g: &TensorNetworkGraph, p: &ModeBipartition) -> Result<CutBound> {
    let pins = pins(g, p);
    let free: Vec<usize> = (0..pins.len()).filter(|&v| pins[v].is_none()).collect();
    if free.len() > MAX_FREE_NODES {
        return Err(Error::SizeCap {
            what: "free cores in exhaustive cut search",
            requested: free.len() as u128,
            cap: MAX_FREE_NODES as u128,
        });
    }
    // weights are tallied per distinct dimension so that the running
    // totals stay exact integers
    let mut classes: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| e.dim)
        .chain(g.open_legs().iter().map(|l| l.dim))
        .collect();
    classes.sort_unstable();
    classes.dedup();
    let class_of = |d: usize| classes.binary_search(&d).expect("dim listed");
    let class_log: Vec<f64> = classes.iter().map(|&d| log2(d)).collect();

    let n = pins.len();
    // incident items per node: (other endpoint or None for a leg, class, leg side)
    let mut incident: Vec<Vec<(Option<usize>, usize, bool)>> = vec![Vec::new(); n];
    for e in g.edges() {
        let c = class_of(e.dim);
        incident[e.a].push((Some(e.b), c, false));
        incident[e.b].push((Some(e.a), c, false));
    }
    for leg in g.open_legs() {
        incident[leg.node].push((None, class_of(leg.dim), p.contains(leg.mode)));
    }

    let mut in_a: Vec<bool> = pins.iter().map(|pin| pin.unwrap_or(false)).collect();
    let mut counts = vec![0i64; classes.len()];
    let mut legs = 0i64;
    for e in g.edges() {
        if in_a[e.a] != in_a[e.b] {
            counts[class_of(e.dim)] += 1;
        }
    }
    for leg in g.open_legs() {
        if in_a[leg.node] != p.contains(leg.mode) {
            counts[class_of(leg.dim)] += 1;
            legs += 1;
        }
    }
    let cost = |counts: &[i64], legs: i64| Cost {
        legs,
        weight: counts
            .iter()
            .zip(&class_log)
            .map(|(&c, &w)| c as f64 * w)
            .sum(),
        edges: counts.iter().sum(),
    };
    let mut best = cost(&counts, legs);
    let mut best_sides = in_a.clone();
    for step in 1u64..(1u64 << free.len()) {
        let v = free[step.trailing_zeros() as usize];
        // flipping v toggles every incident item
        for &(other, c, leg_side) in &incident[v] {
            let was_cut = match other {
                Some(u) => in_a[u] != in_a[v],
                None => leg_side != in_a[v],
            };
            let delta = if was_cut { -1 } else { 1 };
            counts[c] += delta;
            if other.is_none() {
                legs += delta;
            }
        }
        in_a[v] = !in_a[v];
        let current = cost(&counts, legs);
        if current.better_than(&best) {
            best = current;
            best_sides.clone_from(&in_a);
        }
    }
    Ok(evaluate(g, p, &best_sides))
}

/// Dinic max-flow on real capacities.
struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

const FLOW_EPS: f64 = 1e-12;

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, forward: f64, backward: f64) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(forward);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(backward);
    }

    fn levels(&self, s: usize) -> Vec<i64> {
        let mut level = vec![-1; self.adj.len()];
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adj[u] {
                let v = self.to[arc];
                if level[v] < 0 && self.cap[arc] > FLOW_EPS {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn push(&mut self, u: usize, t: usize, limit: f64, level: &[i64], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let arc = self.adj[u][next[u]];
            let v = self.to[arc];
            if self.cap[arc] > FLOW_EPS && level[v] == level[u] + 1 {
                let pushed = self.push(v, t, limit.min(self.cap[arc]), level, next);
                if pushed > FLOW_EPS {
                    self.cap[arc] -= pushed;
                    self.cap[arc ^ 1] += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s);
            if level[t] < 0 {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let pushed = self.push(s, t, f64::INFINITY, &level, &mut next);
                if pushed <= FLOW_EPS {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l >= 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{make_ht, make_mera, make_tt, Fill};

    fn both(g: &TensorNetworkGraph, p: &ModeBipartition) -> CutBound {
        let flow = min_cut_bound(g, p).unwrap();
        let brute = min_cut_bound_with(g, p, CutMethod::Exhaustive).unwrap();
        assert_eq!(flow.cut_edges, brute.cut_edges, "{p:?}");
        assert_eq!(flow.cut_legs, brute.cut_legs, "{p:?}");
        assert_eq!(flow.rank_bound, brute.rank_bound, "{p:?}");
        flow
    }

    #[test]
    fn tt_contiguous_and_alternating() {
        let g = make_tt(8, 2, 3, Fill::Zeros).unwrap().structure_graph();
        for m in 1..8 {
            let c = both(&g, &ModeBipartition::contiguous(m, 8).unwrap());
            assert_eq!((c.cut_edges, c.cut_bonds), (1, 1));
            assert_eq!(c.rank_bound, 3u128.min(1 << m.min(8 - m)));
        }
        let alt = ModeBipartition::from_modes(&[0, 2, 4, 6], 8).unwrap();
        let c = both(&g, &alt);
        assert_eq!(c.cut_edges, 7);
        assert_eq!(c.rank_bound, 16);
    }

    #[test]
    fn tt_cut_counts_run_boundaries() {
        let g = make_tt(8, 2, 2, Fill::Zeros).unwrap().structure_graph();
        for mask in 1u64..(1 << 7) {
            let p = ModeBipartition::new(mask, 8).unwrap();
            let boundaries = (0..7)
                .filter(|&k| p.contains(k) != p.contains(k + 1))
                .count();
            assert_eq!(both(&g, &p).cut_edges, boundaries, "{p:?}");
        }
    }

    #[test]
    fn ht_subtrees_cut_once() {
        let g = make_ht(8, 2, 2, Fill::Zeros).unwrap().structure_graph();
        for (h, j) in [(0, 3), (1, 0), (1, 2), (2, 1)] {
            let modes: Vec<usize> = (j << h..(j + 1) << h).collect();
            let c = both(&g, &ModeBipartition::from_modes(&modes, 8).unwrap());
            assert_eq!(c.cut_edges, 1);
        }
    }

    #[test]
    fn mera_contiguous_blocks() {
        let g = make_mera(8, 2, 2, Fill::Zeros).unwrap().structure_graph();
        for m in 1..=4 {
            for start in 0..8 {
                let modes: Vec<usize> = (start..start + m).map(|k| k % 8).collect();
                both(&g, &ModeBipartition::from_modes(&modes, 8).unwrap());
            }
        }
        let c = min_cut_bound(&g, &ModeBipartition::from_modes(&[1, 2, 3, 4], 8).unwrap()).unwrap();
        assert!(c.cut_edges >= 2);
    }

    #[test]
    fn straddled_disentangler_costs_one_leg() {
        let g = make_mera(4, 2, 2, Fill::Zeros).unwrap().structure_graph();
        // mode 0 shares disentangler 0 with mode 3
        let c = both(&g, &ModeBipartition::from_modes(&[0], 4).unwrap());
        assert_eq!((c.cut_edges, c.cut_legs), (1, 1));
        assert_eq!(c.rank_bound, 2);
    }

    #[test]
    fn validation() {
        let g = make_tt(4, 2, 2, Fill::Zeros).unwrap().structure_graph();
        assert!(min_cut_bound(&g, &ModeBipartition::contiguous(1, 5).unwrap()).is_err());
        let big = make_mera(16, 2, 2, Fill::Zeros).unwrap().structure_graph();
        let alt = ModeBipartition::from_modes(&[0, 2, 4, 6, 8, 10, 12, 14], 16).unwrap();
        let err = min_cut_bound_with(&big, &alt, CutMethod::Exhaustive).unwrap_err();
        assert!(err.is_resource_cap());
    }
}
