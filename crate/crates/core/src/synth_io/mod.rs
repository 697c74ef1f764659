//! Target-tensor synthesis, function tensorization and file persistence.

mod expr;
mod file;
pub mod rng;

pub use expr::{parse_expression, sample_grid, BinOp, ExpressionAst, Func};
pub use file::{
    format_tensor, parse_tensor, read_tensor, write_report_json, write_tensor, ReportEnvelope,
    SCHEMA_VERSION,
};
pub use rng::SeededRng;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Weighted sum of rank-1 terms `Σ_α w_α v^α_1 ⊗ … ⊗ v^α_L`.
///
/// `factors[α][k]` is the vector on mode `k` of term `α`.
pub fn cp_sum(weights: &[f64], factors: &[Vec<Vec<f64>>]) -> Result<DenseTensor> {
    if weights.is_empty() || weights.len() != factors.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} rank-1 terms",
            weights.len(),
            factors.len()
        )));
    }
    let dims: Vec<usize> = factors[0].iter().map(Vec::len).collect();
    if factors
        .iter()
        .any(|f| f.iter().map(Vec::len).ne(dims.iter().copied()))
    {
        return Err(Error::DimMismatch("rank-1 terms disagree on dims".into()));
    }
    let mut acc = DenseTensor::zeros(dims)?;
    for (w, f) in weights.iter().zip(factors) {
        acc = acc.add(&DenseTensor::outer(f)?.scaled(*w))?;
    }
    Ok(acc)
}

/// Random CP sum with `rank` terms, unit-norm Gaussian factors and weights
/// drawn from `[0.5, 1.5)`.
pub fn random_cp(order: usize, dim: usize, rank: usize, seed: u64) -> Result<DenseTensor> {
    if order == 0 || dim == 0 {
        return Err(Error::Shape(format!("order {order}, dim {dim}")));
    }
    if rank == 0 {
        return Err(Error::out_of_range("CP rank", rank, "1.."));
    }
    let mut rng = SeededRng::new(seed);
    let mut weights = Vec::with_capacity(rank);
    let mut factors = Vec::with_capacity(rank);
    for _ in 0..rank {
        weights.push(0.5 + rng.uniform());
        factors.push((0..order).map(|_| rng.unit_vector(dim)).collect());
    }
    cp_sum(&weights, &factors)
}

/// GHZ-style tensor `e_0^{⊗L} + e_1^{⊗L}` (two orthogonal rank-1 terms).
pub fn ghz(order: usize, dim: usize) -> Result<DenseTensor> {
    if dim < 2 {
        return Err(Error::out_of_range("dim", dim, "2.."));
    }
    let e = |k: usize| (0..dim).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
    cp_sum(&[1.0, 1.0], &[vec![e(0); order], vec![e(1); order]])
}

/// Dense tensor with i.i.d. standard normal entries.
pub fn random_dense(dims: Vec<usize>, seed: u64) -> Result<DenseTensor> {
    let mut rng = SeededRng::new(seed);
    DenseTensor::from_fn(dims, |_| rng.normal())
}
