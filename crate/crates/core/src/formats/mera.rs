use serde::Serialize;

use super::graph::{Edge, OpenLeg, TensorNetworkGraph};
use super::{check_cap, random_matrix, random_tensor, Fill};
use crate::error::{Error, Result};
use crate::tensor::{contract_all, DenseTensor, Matrix};

/// One renormalization layer acting on `n` strands.
///
/// Disentangler `j` has modes `(up_l, up_r, low_l, low_r)` and acts on
/// strands `((2j − 1) mod n, 2j)`, so disentangler 0 wraps around the
/// periodic boundary. Isometry `k` has modes `(up, low_l, low_r)` and merges
/// strands `2k, 2k+1` into strand `k` of the next layer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeraLayer {
    pub disentanglers: Vec<DenseTensor>,
    pub isometries: Vec<DenseTensor>,
}

/// Binary MERA over `L = 2^H ≥ 4` modes: `H − 1` layers, bottom first,
/// closed by an order-2 top tensor on the last two strands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MERAFormat {
    layers: Vec<MeraLayer>,
    top: Matrix,
}

/// Strands `(left, right)` touched by disentangler `j` in a layer of `n`.
pub fn disentangler_strands(j: usize, n: usize) -> (usize, usize) {
    ((2 * j + n - 1) % n, 2 * j)
}

impl MERAFormat {
    pub fn new(layers: Vec<MeraLayer>, top: Matrix) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Structure("MERA needs at least one layer".into()));
        }
        let order = 2 * layers[0].disentanglers.len();
        let h = super::ht::levels(order)?;
        if order < 4 || layers.len() != h - 1 {
            return Err(Error::Structure(format!(
                "MERA over {order} modes needs {} layers, got {}",
                h.saturating_sub(1),
                layers.len()
            )));
        }
        let mut strands: Option<Vec<usize>> = None;
        let mut n = order;
        for (l, layer) in layers.iter().enumerate() {
            if layer.disentanglers.len() != n / 2 || layer.isometries.len() != n / 2 {
                return Err(Error::Structure(format!(
                    "layer {l} acts on {n} strands and needs {} disentanglers and isometries",
                    n / 2
                )));
            }
            let mut below = vec![0; n];
            let mut above = vec![0; n];
            for (j, d) in layer.disentanglers.iter().enumerate() {
                if d.order() != 4 {
                    return Err(Error::Structure(format!(
                        "disentangler ({l}, {j}) is not order 4"
                    )));
                }
                let (a, b) = disentangler_strands(j, n);
                below[a] = d.dims()[2];
                below[b] = d.dims()[3];
                above[a] = d.dims()[0];
                above[b] = d.dims()[1];
            }
            if let Some(prev) = &strands {
                if prev != &below {
                    return Err(Error::Structure(format!(
                        "layer {l} strand dims {below:?} do not match {prev:?} from below"
                    )));
                }
            }
            let mut next = Vec::with_capacity(n / 2);
            for (k, iso) in layer.isometries.iter().enumerate() {
                if iso.order() != 3
                    || iso.dims()[1] != above[2 * k]
                    || iso.dims()[2] != above[2 * k + 1]
                {
                    return Err(Error::Structure(format!(
                        "isometry ({l}, {k}) has dims {:?}, strands carry ({}, {})",
                        iso.dims(),
                        above[2 * k],
                        above[2 * k + 1]
                    )));
                }
                next.push(iso.dims()[0]);
            }
            strands = Some(next);
            n /= 2;
        }
        let last = strands.expect("at least one layer");
        if top.rows() != last[0] || top.cols() != last[1] {
            return Err(Error::Structure(format!(
                "top is {}x{}, strands carry {last:?}",
                top.rows(),
                top.cols()
            )));
        }
        Ok(Self { layers, top })
    }

    pub fn order(&self) -> usize {
        2 * self.layers[0].disentanglers.len()
    }

    pub fn layers(&self) -> &[MeraLayer] {
        &self.layers
    }

    pub fn top(&self) -> &Matrix {
        &self.top
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        let n = self.order();
        let mut dims = vec![0; n];
        for (j, d) in self.layers[0].disentanglers.iter().enumerate() {
            let (a, b) = disentangler_strands(j, n);
            dims[a] = d.dims()[2];
            dims[b] = d.dims()[3];
        }
        dims
    }

    /// Expands the top tensor downwards one layer at a time.
    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let dims = self.physical_dims();
        check_cap(&dims, cap)?;
        // state modes are labelled by strand; labels are renumbered per layer
        let mut state = self.top.clone().into_tensor();
        let mut labels: Vec<usize> = vec![0, 1];
        for layer in self.layers.iter().rev() {
            let n = 2 * labels.len();
            // strands of the layer above are tagged n + k until expanded
            for s in &mut labels {
                *s += n;
            }
            for (k, iso) in layer.isometries.iter().enumerate() {
                let pos = labels
                    .iter()
                    .position(|&s| s == n + k)
                    .expect("strand present");
                state = contract_all(&state, iso, &[(pos, 0)])?;
                labels.remove(pos);
                labels.push(2 * k);
                labels.push(2 * k + 1);
                check_cap(state.dims(), cap.saturating_mul(4))?;
            }
            for (j, dis) in layer.disentanglers.iter().enumerate() {
                let (a, b) = disentangler_strands(j, n);
                let pa = labels.iter().position(|&s| s == a).expect("strand present");
                let pb = labels.iter().position(|&s| s == b).expect("strand present");
                state = contract_all(&state, dis, &[(pa, 0), (pb, 1)])?;
                labels.retain(|&s| s != a && s != b);
                labels.push(a);
                labels.push(b);
            }
            let mut perm: Vec<usize> = (0..labels.len()).collect();
            perm.sort_by_key(|&p| labels[p]);
            state = state.permute(&perm)?;
            labels.sort_unstable();
        }
        state.reshape(dims)
    }

    /// Layered graph: nodes `dis[l,j]`, `iso[l,k]` and `top`.
    pub fn structure_graph(&self) -> TensorNetworkGraph {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut legs = Vec::new();
        // (node, dim) currently carrying each strand; None below layer 0
        let mut ends: Vec<Option<(usize, usize)>> = vec![None; self.order()];
        for (l, layer) in self.layers.iter().enumerate() {
            let n = ends.len();
            let mut up = vec![(0, 0); n];
            for (j, d) in layer.disentanglers.iter().enumerate() {
                let id = nodes.len();
                nodes.push(format!("dis[{l},{j}]"));
                let (a, b) = disentangler_strands(j, n);
                for (strand, low, upper) in [(a, 2, 0), (b, 3, 1)] {
                    match ends[strand] {
                        None => legs.push(OpenLeg {
                            node: id,
                            mode: strand,
                            dim: d.dims()[low],
                        }),
                        Some((from, dim)) => edges.push(Edge {
                            a: from,
                            b: id,
                            dim,
                        }),
                    }
                    up[strand] = (id, d.dims()[upper]);
                }
            }
            let mut next = Vec::with_capacity(n / 2);
            for (k, iso) in layer.isometries.iter().enumerate() {
                let id = nodes.len();
                nodes.push(format!("iso[{l},{k}]"));
                for (from, dim) in [up[2 * k], up[2 * k + 1]] {
                    edges.push(Edge {
                        a: from,
                        b: id,
                        dim,
                    });
                }
                next.push(Some((id, iso.dims()[0])));
            }
            ends = next;
        }
        let top = nodes.len();
        nodes.push("top".to_string());
        for (from, dim) in ends.into_iter().flatten() {
            edges.push(Edge {
                a: from,
                b: top,
                dim,
            });
        }
        TensorNetworkGraph::new(nodes, edges, legs).expect("MERA graph is well formed")
    }
}

/// MERA over `order = 2^H ≥ 4` modes with physical dim `dim` and uniform
/// bond `rank`.
pub fn make_mera(order: usize, dim: usize, rank: usize, fill: Fill) -> Result<MERAFormat> {
    let h = super::ht::levels(order)?;
    if order < 4 {
        return Err(Error::Structure(format!(
            "MERA needs at least 4 modes, got {order}"
        )));
    }
    if dim == 0 || rank == 0 {
        return Err(Error::Structure(format!(
            "make_mera needs dim, rank >= 1 (got {dim}, {rank})"
        )));
    }
    let mut rng = fill.rng();
    let mut layers = Vec::with_capacity(h - 1);
    let mut n = order;
    let mut low = dim;
    for _ in 0..h - 1 {
        let disentanglers = (0..n / 2)
            .map(|_| random_tensor(vec![rank, rank, low, low], &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let isometries = (0..n / 2)
            .map(|_| random_tensor(vec![rank, rank, rank], &mut rng))
            .collect::<Result<Vec<_>>>()?;
        layers.push(MeraLayer {
            disentanglers,
            isometries,
        });
        n /= 2;
        low = rank;
    }
    let top = random_matrix(rank, rank, &mut rng);
    MERAFormat::new(layers, top)
}
