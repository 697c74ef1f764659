use serde::Serialize;

use super::graph::{Edge, OpenLeg, TensorNetworkGraph};
use super::{check_cap, random_matrix, random_tensor, Fill};
use crate::error::{Error, Result};
use crate::tensor::{contract_all, DenseTensor, Matrix};

/// Binary hierarchical Tucker format over `L = 2^H` modes.
///
/// Level 0 holds the leaf frames `φ(0, i)` (`d_i × k`). Each internal node
/// `(h, j)` with `1 ≤ h < H` holds a transfer tensor `Λ(h, j)` with dims
/// `(k_left, k_right, k_node)` combining children `(h−1, 2j)` and
/// `(h−1, 2j+1)`. The root `(H, 0)` is the order-2 matrix `Λ(H, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HTFormat {
    leaves: Vec<Matrix>,
    transfers: Vec<Vec<DenseTensor>>,
    top: Matrix,
}

pub(crate) fn levels(order: usize) -> Result<usize> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::Structure(format!(
            "hierarchical formats need a power-of-two order >= 2, got {order}"
        )));
    }
    Ok(order.trailing_zeros() as usize)
}

impl HTFormat {
    pub fn new(leaves: Vec<Matrix>, transfers: Vec<Vec<DenseTensor>>, top: Matrix) -> Result<Self> {
        let h_max = levels(leaves.len())?;
        if transfers.len() != h_max - 1 {
            return Err(Error::Structure(format!(
                "expected {} transfer levels, got {}",
                h_max - 1,
                transfers.len()
            )));
        }
        let mut ranks: Vec<usize> = leaves.iter().map(Matrix::cols).collect();
        for (level, row) in transfers.iter().enumerate() {
            if row.len() != ranks.len() / 2 {
                return Err(Error::Structure(format!(
                    "level {} needs {} transfer tensors, got {}",
                    level + 1,
                    ranks.len() / 2,
                    row.len()
                )));
            }
            for (j, b) in row.iter().enumerate() {
                if b.order() != 3 || b.dims()[0] != ranks[2 * j] || b.dims()[1] != ranks[2 * j + 1]
                {
                    return Err(Error::Structure(format!(
                        "transfer ({}, {j}) has dims {:?}, children have ranks ({}, {})",
                        level + 1,
                        b.dims(),
                        ranks[2 * j],
                        ranks[2 * j + 1]
                    )));
                }
            }
            ranks = row.iter().map(|b| b.dims()[2]).collect();
        }
        if top.rows() != ranks[0] || top.cols() != ranks[1] {
            return Err(Error::Structure(format!(
                "top is {}x{}, children have ranks {ranks:?}",
                top.rows(),
                top.cols()
            )));
        }
        Ok(Self {
            leaves,
            transfers,
            top,
        })
    }

    pub fn order(&self) -> usize {
        self.leaves.len()
    }

    /// `H = log₂ L`.
    pub fn levels(&self) -> usize {
        self.transfers.len() + 1
    }

    pub fn leaves(&self) -> &[Matrix] {
        &self.leaves
    }

    pub fn transfers(&self) -> &[Vec<DenseTensor>] {
        &self.transfers
    }

    pub fn top(&self) -> &Matrix {
        &self.top
    }

    pub fn physical_dims(&self) -> Vec<usize> {
        self.leaves.iter().map(Matrix::rows).collect()
    }

    /// Ranks of the nodes on level `h` (`h < H`).
    pub fn level_ranks(&self, h: usize) -> Vec<usize> {
        if h == 0 {
            self.leaves.iter().map(Matrix::cols).collect()
        } else {
            self.transfers[h - 1].iter().map(|b| b.dims()[2]).collect()
        }
    }

    /// Contracts leaves to root.
    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        let dims = self.physical_dims();
        check_cap(&dims, cap)?;
        let mut frames: Vec<Matrix> = self.leaves.clone();
        for row in &self.transfers {
            frames = row
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let rows = frames[2 * j].rows() * frames[2 * j + 1].rows();
                    check_cap(&[rows, b.dims()[2]], cap)?;
                    merge_frames(&frames[2 * j], &frames[2 * j + 1], b)
                })
                .collect::<Result<Vec<_>>>()?;
        }
        let dense = frames[0]
            .matmul(&self.top)?
            .matmul(&frames[1].transpose())?;
        DenseTensor::new(dims, dense.data().to_vec())
    }

    /// Binary tree: leaves, internal transfer nodes, and the root.
    pub fn structure_graph(&self) -> TensorNetworkGraph {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut legs = Vec::new();
        let mut below: Vec<(usize, usize)> = Vec::new(); // (node id, rank)
        for (i, leaf) in self.leaves.iter().enumerate() {
            legs.push(OpenLeg {
                node: nodes.len(),
                mode: i,
                dim: leaf.rows(),
            });
            below.push((nodes.len(), leaf.cols()));
            nodes.push(format!("ht[0,{i}]"));
        }
        for (level, row) in self.transfers.iter().enumerate() {
            let mut next = Vec::with_capacity(row.len());
            for (j, b) in row.iter().enumerate() {
                let id = nodes.len();
                nodes.push(format!("ht[{},{j}]", level + 1));
                for &(child, dim) in &below[2 * j..2 * j + 2] {
                    edges.push(Edge {
                        a: child,
                        b: id,
                        dim,
                    });
                }
                next.push((id, b.dims()[2]));
            }
            below = next;
        }
        let root = nodes.len();
        nodes.push(format!("ht[{},0]", self.levels()));
        for &(child, dim) in &below {
            edges.push(Edge {
                a: child,
                b: root,
                dim,
            });
        }
        TensorNetworkGraph::new(nodes, edges, legs).expect("HT graph is well formed")
    }
}

/// `R[(i, j), α] = Σ_{β₁β₂} U_l[i, β₁] U_r[j, β₂] B[β₁, β₂, α]`.
pub(crate) fn merge_frames(left: &Matrix, right: &Matrix, b: &DenseTensor) -> Result<Matrix> {
    let l = left.clone().into_tensor();
    let r = right.clone().into_tensor();
    // (i, β₂, α)
    let t = contract_all(&l, b, &[(1, 0)])?;
    // (i, α, j)
    let t = contract_all(&t, &r, &[(1, 1)])?;
    let t = t.permute(&[0, 2, 1])?;
    let (rows, cols) = (left.rows() * right.rows(), b.dims()[2]);
    Matrix::new(rows, cols, t.into_data())
}

/// HT model over `order = 2^H` modes with uniform rank.
pub fn make_ht(order: usize, dim: usize, rank: usize, fill: Fill) -> Result<HTFormat> {
    let h_max = levels(order)?;
    if dim == 0 || rank == 0 {
        return Err(Error::Structure(format!(
            "make_ht needs dim, rank >= 1 (got {dim}, {rank})"
        )));
    }
    let mut rng = fill.rng();
    let leaves = (0..order)
        .map(|_| random_matrix(dim, rank, &mut rng))
        .collect();
    let transfers = (1..h_max)
        .map(|h| {
            (0..order >> h)
                .map(|_| random_tensor(vec![rank, rank, rank], &mut rng))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let top = random_matrix(rank, rank, &mut rng);
    HTFormat::new(leaves, transfers, top)
}
