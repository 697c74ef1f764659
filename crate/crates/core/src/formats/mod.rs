//! Structured tensor models and their bond graphs.

pub mod graph;
mod ht;
mod mera;
mod tt;
mod tucker;

pub use graph::{Edge, OpenLeg, TensorNetworkGraph};
pub(crate) use ht::levels as ht_levels;
pub use ht::{make_ht, HTFormat};
pub use mera::{disentangler_strands, make_mera, MERAFormat, MeraLayer};
pub use tt::{make_tt, TTFormat};
pub use tucker::TuckerFormat;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::synth_io::SeededRng;
use crate::tensor::{checked_size, DenseTensor, Matrix};

/// Largest dense tensor `to_dense` builds unless told otherwise.
pub const DEFAULT_DENSE_CAP: usize = 1 << 24;

/// How a synthesized model's tensors are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fill {
    Zeros,
    /// I.i.d. standard normals from the seed.
    Random(u64),
}

/// Either a real generator or `None` for zeros.
pub(crate) struct FillRng(Option<SeededRng>);

impl Fill {
    pub(crate) fn rng(self) -> FillRng {
        match self {
            Fill::Zeros => FillRng(None),
            Fill::Random(seed) => FillRng(Some(SeededRng::new(seed))),
        }
    }
}

impl FillRng {
    fn draw(&mut self, n: usize) -> Vec<f64> {
        match &mut self.0 {
            None => vec![0.0; n],
            Some(rng) => rng.normals(n),
        }
    }
}

pub(crate) fn random_tensor(dims: Vec<usize>, rng: &mut FillRng) -> Result<DenseTensor> {
    let n = checked_size(&dims)?;
    DenseTensor::new(dims, rng.draw(n))
}

pub(crate) fn random_matrix(rows: usize, cols: usize, rng: &mut FillRng) -> Matrix {
    Matrix::new(rows, cols, rng.draw(rows * cols)).expect("positive matrix shape")
}

pub(crate) fn check_cap(dims: &[usize], cap: usize) -> Result<()> {
    let requested = dims
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::SizeCap {
            what: "dense tensor entries",
            requested,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// Model family selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tt,
    Tucker,
    Ht,
    Mera,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tt => "tt",
            ModelKind::Tucker => "tucker",
            ModelKind::Ht => "ht",
            ModelKind::Mera => "mera",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tt" => Ok(ModelKind::Tt),
            "tucker" => Ok(ModelKind::Tucker),
            "ht" => Ok(ModelKind::Ht),
            "mera" => Ok(ModelKind::Mera),
            _ => Err(Error::Structure(format!(
                "unknown model '{s}' (expected tt, tucker, ht or mera)"
            ))),
        }
    }
}

/// Any of the supported models.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum TensorModel {
    Tt(TTFormat),
    Tucker(TuckerFormat),
    Ht(HTFormat),
    Mera(MERAFormat),
}

impl TensorModel {
    /// Uniform-rank model of the given kind. Tucker gets a core of side
    /// `min(rank, dim)`.
    pub fn make(
        kind: ModelKind,
        order: usize,
        dim: usize,
        rank: usize,
        fill: Fill,
    ) -> Result<Self> {
        Ok(match kind {
            ModelKind::Tt => TensorModel::Tt(make_tt(order, dim, rank, fill)?),
            ModelKind::Ht => TensorModel::Ht(make_ht(order, dim, rank, fill)?),
            ModelKind::Mera => TensorModel::Mera(make_mera(order, dim, rank, fill)?),
            ModelKind::Tucker => TensorModel::Tucker(make_tucker(order, dim, rank, fill)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TensorModel::Tt(_) => ModelKind::Tt,
            TensorModel::Tucker(_) => ModelKind::Tucker,
            TensorModel::Ht(_) => ModelKind::Ht,
            TensorModel::Mera(_) => ModelKind::Mera,
        }
    }

    pub fn to_dense(&self, cap: usize) -> Result<DenseTensor> {
        match self {
            TensorModel::Tt(m) => m.to_dense(cap),
            TensorModel::Tucker(m) => m.to_dense(cap),
            TensorModel::Ht(m) => m.to_dense(cap),
            TensorModel::Mera(m) => m.to_dense(cap),
        }
    }

    pub fn structure_graph(&self) -> TensorNetworkGraph {
        match self {
            TensorModel::Tt(m) => m.structure_graph(),
            TensorModel::Tucker(m) => m.structure_graph(),
            TensorModel::Ht(m) => m.structure_graph(),
            TensorModel::Mera(m) => m.structure_graph(),
        }
    }
}

fn make_tucker(order: usize, dim: usize, rank: usize, fill: Fill) -> Result<TuckerFormat> {
    if order == 0 || dim == 0 || rank == 0 {
        return Err(Error::Structure(format!(
            "make_tucker needs order, dim, rank >= 1 (got {order}, {dim}, {rank})"
        )));
    }
    let k = rank.min(dim);
    let mut rng = fill.rng();
    let core = random_tensor(vec![k; order], &mut rng)?;
    let factors = (0..order)
        .map(|_| random_matrix(dim, k, &mut rng))
        .collect();
    TuckerFormat::new(core, factors)
}
