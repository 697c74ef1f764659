use serde::Serialize;

use super::graph::{Edge, OpenLeg, TensorNetworkGraph};
use super::{check_cap, random_tensor, Fill};
use crate::error::{Error, Result};
use crate::tensor::{contract_all, DenseTensor};

/// Tensor train. Core `k` has dims `(r_{k-1}, d_k, r_k)` with the boundary
/// bonds `r_0 = r_L = 1`, so the two end cores are order-2 in content.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TTFormat {
    cores: Vec<DenseTensor>,
}

impl TTFormat {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Structure(
                "tensor train needs at least one core".into(),
            ));
        }
        for (k, core) in cores.iter().enumerate() {
            if core.order() != 3 {
                return Err(Error::Structure(format!(
                    "core {k} has order {}, expected 3",
                    core.order()
                )));
            }
        }
        let last = cores.len() - 1;
        if cores[0].dims()[0] != 1 || cores[last].dims()[2] != 1 {
            return Err(Error::Structure(
                "boundary bonds must have dimension 1".into(),
            ));
        }
        for k in 0..last {
            if cores[k].dims()[2] != cores[k + 1].dims()[0] {
                return Err(Error::Structure(format!(
                    "bond {k}: core {k} has right dim {}, core {} has left dim {}",
                    cores[k].dims()[2],
                    k + 1,
                    cores[k + 1].dims()[0]
                )));
            }
        }
        Ok(Self { cores })
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    /// The `L − 1` internal bond dimensions.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.cores[..self.cores.len() - 1]
            .iter()
            .map(|c| c.dims()[2])
            .collect()
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    /// Contracts left to right.
    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let dims = self.physical_dims();
        check_cap(&dims, cap)?;
        // acc has dims (d_0, …, d_k, r_k)
        let first = &self.cores[0];
        let mut acc = first.clone().reshape(first.dims()[1..].to_vec())?;
        for core in &self.cores[1..] {
            let mut next = acc.dims().to_vec();
            next.pop();
            next.extend_from_slice(&core.dims()[1..]);
            check_cap(&next, cap)?;
            let last = acc.order() - 1;
            acc = contract_all(&acc, core, &[(last, 0)])?;
        }
        acc.reshape(dims)
    }

    /// Path graph: one node per core, one edge per internal bond.
    pub fn structure_graph(&self) -> TensorNetworkGraph {
        let nodes = (0..self.order()).map(|k| format!("tt[{k}]")).collect();
        let edges = self
            .bond_dims()
            .into_iter()
            .enumerate()
            .map(|(k, dim)| Edge {
                a: k,
                b: k + 1,
                dim,
            })
            .collect();
        let legs = self
            .physical_dims()
            .into_iter()
            .enumerate()
            .map(|(k, dim)| OpenLeg {
                node: k,
                mode: k,
                dim,
            })
            .collect();
        TensorNetworkGraph::new(nodes, edges, legs).expect("tensor train graph is well formed")
    }
}

/// Tensor train with `order` cores of physical dim `dim` and uniform bond `rank`.
pub fn make_tt(order: usize, dim: usize, rank: usize, fill: Fill) -> Result<TTFormat> {
    if order == 0 || dim == 0 || rank == 0 {
        return Err(Error::Structure(format!(
            "make_tt needs order, dim, rank >= 1 (got {order}, {dim}, {rank})"
        )));
    }
    let mut rng = fill.rng();
    let cores = (0..order)
        .map(|k| {
            let left = if k == 0 { 1 } else { rank };
            let right = if k + 1 == order { 1 } else { rank };
            random_tensor(vec![left, dim, right], &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    TTFormat::new(cores)
}
