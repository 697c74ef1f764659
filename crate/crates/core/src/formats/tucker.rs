use serde::Serialize;

use super::check_cap;
use super::graph::{Edge, OpenLeg, TensorNetworkGraph};
use crate::error::{Error, Result};
use crate::tensor::{mode_product, DenseTensor, Matrix};

/// Tucker format: a core of order `L` and one factor matrix per mode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TuckerFormat {
    core: DenseTensor,
    factors: Vec<Matrix>,
}

impl TuckerFormat {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(Error::Structure(format!(
                "{} factors for a core of order {}",
                factors.len(),
                core.order()
            )));
        }
        for (k, f) in factors.iter().enumerate() {
            if f.cols() != core.dims()[k] {
                return Err(Error::Structure(format!(
                    "factor {k} has {} columns, core mode {k} has dim {}",
                    f.cols(),
                    core.dims()[k]
                )));
            }
        }
        Ok(Self { core, factors })
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.core.dims().to_vec()
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        check_cap(&self.physical_dims(), cap)?;
        let mut acc = self.core.clone();
        for (k, f) in self.factors.iter().enumerate() {
            acc = mode_product(&acc, k, f)?;
        }
        Ok(acc)
    }

    /// Star graph: the core in the middle, one factor node per mode.
    pub fn structure_graph(&self) -> TensorNetworkGraph {
        let order = self.factors.len();
        let mut nodes = vec!["core".to_string()];
        nodes.extend((0..order).map(|k| format!("factor[{k}]")));
        let edges = self
            .ranks()
            .into_iter()
            .enumerate()
            .map(|(k, dim)| Edge {
                a: 0,
                b: k + 1,
                dim,
            })
            .collect();
        let legs = self
            .physical_dims()
            .into_iter()
            .enumerate()
            .map(|(k, dim)| OpenLeg {
                node: k + 1,
                mode: k,
                dim,
            })
            .collect();
        TensorNetworkGraph::new(nodes, edges, legs).expect("Tucker graph is well formed")
    }
}
