//! Sequential Schmidt decompositions into TT, Tucker and HT formats.
//!
//! Every algorithm records the weight it throws away at each step. Since
//! each step is an orthogonal projection, the achieved squared error never
//! exceeds the sum of those discards.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::{HTFormat, TTFormat, TuckerFormat, DEFAULT_DENSE_CAP};
use crate::schmidt::{split, SchmidtSpectrum, DEFAULT_TOL};
use crate::tensor::{contract_all, mode_product, DenseTensor, Matrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionStep {
    pub label: String,
    pub retained_rank: usize,
    pub discarded_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub algorithm: String,
    pub steps: Vec<DecompositionStep>,
    /// Sum of the per-step discarded weights.
    pub error_bound: f64,
    /// `‖A − Â‖²`, recomputed from the dense reconstruction.
    pub achieved_error: f64,
    pub norm_sq: f64,
    /// `‖A − Â‖ / ‖A‖` (0 for a zero input).
    pub relative_error: f64,
}

impl DecompositionReport {
    fn new(
        algorithm: &str,
        steps: Vec<DecompositionStep>,
        input: &DenseTensor,
        approx: &DenseTensor,
    ) -> Result<Self> {
        let error_bound = steps
            .iter()
            .map(|s| s.discarded_weight)
            .fold(0.0, |acc, w| acc + w);
        let achieved_error = input.distance_sq(approx)?;
        let norm_sq = input.frobenius_norm_sq();
        let relative_error = if norm_sq > 0.0 {
            (achieved_error / norm_sq).sqrt()
        } else {
            achieved_error.sqrt()
        };
        Ok(Self {
            algorithm: algorithm.to_string(),
            steps,
            error_bound,
            achieved_error,
            norm_sq,
            relative_error,
        })
    }

    pub fn retained_ranks(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.retained_rank).collect()
    }

    /// `achieved ≤ bound` up to `slack · ‖A‖²`.
    pub fn bound_holds(&self, slack: f64) -> bool {
        self.achieved_error <= self.error_bound + slack * self.norm_sq.max(f64::MIN_POSITIVE)
    }
}

fn choose(spectrum: &SchmidtSpectrum, max_rank: Option<usize>, budget: Option<f64>) -> usize {
    let r = match budget {
        Some(b) => spectrum.rank_for_budget(b),
        None => spectrum.numerical_rank(DEFAULT_TOL),
    };
    max_rank.map_or(r, |m| r.min(m)).max(1)
}

fn check_input(t: &DenseTensor, max_rank: Option<usize>) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite(
            "input tensor has non-finite entries".into(),
        ));
    }
    if max_rank == Some(0) {
        return Err(Error::out_of_range("max rank", 0, "[1, inf)"));
    }
    Ok(())
}

fn step(label: String, spectrum: &SchmidtSpectrum, rank: usize) -> DecompositionStep {
    DecompositionStep {
        label,
        retained_rank: rank,
        discarded_weight: spectrum.tail_weight(rank),
    }
}

/// TT-SVD: `L − 1` left-to-right Schmidt decompositions. Each bond keeps
/// at most `max_rank` components and, with a budget, the fewest components
/// whose tail fits `eps / (L − 1)`. With neither cap, bonds keep the
/// numerical rank.
pub fn tt_svd(
    t: &DenseTensor,
    max_rank: Option<usize>,
    eps: Option<f64>,
) -> Result<(TTFormat, DecompositionReport)> {
    check_input(t, max_rank)?;
    if let Some(e) = eps {
        if !e.is_finite() || e < 0.0 {
            return Err(Error::out_of_range("error budget", e, "[0, inf)"));
        }
    }
    let dims = t.dims().to_vec();
    let order = dims.len();
    let budget = eps.map(|e| e / (order.max(2) - 1) as f64);
    let mut cores = Vec::with_capacity(order);
    let mut steps = Vec::with_capacity(order.saturating_sub(1));
    let mut left_rank = 1;
    let mut rest = Matrix::new(dims[0], t.len() / dims[0], t.data().to_vec())?;
    for k in 0..order - 1 {
        let s = split(&rest, |sp| choose(sp, max_rank, budget))?;
        let r = s.left.cols();
        steps.push(step(format!("bond {}", k + 1), &s.spectrum, r));
        cores.push(DenseTensor::new(
            vec![left_rank, dims[k], r],
            s.left.data().to_vec(),
        )?);
        let cols = s.rest.cols() / dims[k + 1];
        rest = Matrix::new(r * dims[k + 1], cols, s.rest.data().to_vec())?;
        left_rank = r;
    }
    cores.push(DenseTensor::new(
        vec![left_rank, dims[order - 1], 1],
        rest.data().to_vec(),
    )?);
    let tt = TTFormat::new(cores)?;
    let report = DecompositionReport::new(
        "tt_svd",
        steps,
        t,
        &tt.to_dense(DEFAULT_DENSE_CAP.max(t.len()))?,
    )?;
    Ok((tt, report))
}

/// Truncated HOSVD. Factor `k` holds the leading left Schmidt vectors of
/// the mode-`k` unfolding, at most `ranks[k]` of them.
pub fn hosvd_tucker(
    t: &DenseTensor,
    ranks: &[usize],
) -> Result<(TuckerFormat, DecompositionReport)> {
    check_input(t, None)?;
    if ranks.len() != t.order() {
        return Err(Error::OrderMismatch {
            expected: t.order(),
            found: ranks.len(),
        });
    }
    for (k, (&r, &d)) in ranks.iter().zip(t.dims()).enumerate() {
        if r == 0 || r > d {
            return Err(Error::out_of_range(
                "Tucker rank",
                format!("{r} (mode {k})"),
                format!("1..={d}"),
            ));
        }
    }
    let mut factors = Vec::with_capacity(ranks.len());
    let mut steps = Vec::with_capacity(ranks.len());
    for (k, &cap) in ranks.iter().enumerate() {
        let s = split(&t.unfold(&[k])?, |sp| choose(sp, Some(cap), None))?;
        steps.push(step(format!("mode {k}"), &s.spectrum, s.left.cols()));
        factors.push(s.left);
    }
    let mut core = t.clone();
    for (k, f) in factors.iter().enumerate() {
        core = mode_product(&core, k, &f.transpose())?;
    }
    let tucker = TuckerFormat::new(core, factors)?;
    let report = DecompositionReport::new(
        "hosvd_tucker",
        steps,
        t,
        &tucker.to_dense(DEFAULT_DENSE_CAP.max(t.len()))?,
    )?;
    Ok((tucker, report))
}

/// HT-SVD on the balanced binary tree of contiguous mode blocks. Every
/// non-root node takes its frame from the unfolding of the input along its
/// block; transfer tensors are the frames expressed in their children's
/// frames.
pub fn ht_decompose(
    t: &DenseTensor,
    max_rank: Option<usize>,
) -> Result<(HTFormat, DecompositionReport)> {
    check_input(t, max_rank)?;
    let order = t.order();
    let h_max = crate::formats::ht_levels(order)?;
    let mut steps = Vec::new();
    let block = |h: usize, j: usize| -> Vec<usize> { (j << h..(j + 1) << h).collect() };

    let mut frames: Vec<Vec<Matrix>> = Vec::with_capacity(h_max);
    for h in 0..h_max {
        let mut row = Vec::with_capacity(order >> h);
        for j in 0..order >> h {
            let s = split(&t.unfold(&block(h, j))?, |sp| choose(sp, max_rank, None))?;
            steps.push(step(format!("ht[{h},{j}]"), &s.spectrum, s.left.cols()));
            row.push(s.left);
        }
        frames.push(row);
    }

    let leaves = frames[0].clone();
    let mut transfers = Vec::with_capacity(h_max - 1);
    for h in 1..h_max {
        let row = frames[h]
            .iter()
            .enumerate()
            .map(|(j, u)| transfer(&frames[h - 1][2 * j], &frames[h - 1][2 * j + 1], u))
            .collect::<Result<Vec<_>>>()?;
        transfers.push(row);
    }
    let top_children = &frames[h_max - 1];
    let a = t.unfold(&block(h_max - 1, 0))?;
    let top = top_children[0].tr_matmul(&a)?.matmul(&top_children[1])?;
    let (transfers, top) = orthogonalize(transfers, top, order)?;
    for (s, rank) in steps[order..]
        .iter_mut()
        .zip(transfers.iter().flatten().map(|b| b.dims()[2]))
    {
        s.retained_rank = rank;
    }
    let ht = HTFormat::new(leaves, transfers, top)?;
    let report = DecompositionReport::new(
        "ht_decompose",
        steps,
        t,
        &ht.to_dense(DEFAULT_DENSE_CAP.max(t.len()))?,
    )?;
    Ok((ht, report))
}

/// Rewrites the transfers bottom-up so every node frame is orthonormal.
/// The frames of a root-to-leaves truncation are not nested, so
/// `(U_l ⊗ U_r)ᵀ U` loses orthonormality; each transfer absorbs its
/// children's triangular factors and is split again. The represented
/// tensor does not change, and ranks drop to what the nested frames span.
fn orthogonalize(
    transfers: Vec<Vec<DenseTensor>>,
    top: Matrix,
    order: usize,
) -> Result<(Vec<Vec<DenseTensor>>, Matrix)> {
    // leaves are orthonormal already
    let mut factors: Vec<Option<Matrix>> = vec![None; order];
    let mut out = Vec::with_capacity(transfers.len());
    for row in transfers {
        let mut next_row = Vec::with_capacity(row.len());
        let mut next_factors = Vec::with_capacity(row.len());
        for (j, mut b) in row.into_iter().enumerate() {
            for (mode, f) in [(0, &factors[2 * j]), (1, &factors[2 * j + 1])] {
                if let Some(f) = f {
                    b = mode_product(&b, mode, f)?;
                }
            }
            let (kl, kr, k) = (b.dims()[0], b.dims()[1], b.dims()[2]);
            let s = split(&Matrix::new(kl * kr, k, b.into_data())?, |sp| {
                choose(sp, None, None)
            })?;
            next_row.push(DenseTensor::new(
                vec![kl, kr, s.left.cols()],
                s.left.data().to_vec(),
            )?);
            next_factors.push(Some(s.rest));
        }
        out.push(next_row);
        factors = next_factors;
    }
    let top = match (&factors[0], &factors[1]) {
        (Some(l), Some(r)) => l.matmul(&top)?.matmul(&r.transpose())?,
        _ => top,
    };
    Ok((out, top))
}

/// `B[β₁, β₂, α] = Σ_{ij} U_l[i, β₁] U_r[j, β₂] U[(i, j), α]`.
fn transfer(left: &Matrix, right: &Matrix, frame: &Matrix) -> Result<DenseTensor> {
    let u = DenseTensor::new(
        vec![left.rows(), right.rows(), frame.cols()],
        frame.data().to_vec(),
    )?;
    // (β₁, j, α)
    let b = contract_all(&left.clone().into_tensor(), &u, &[(0, 0)])?;
    // (β₁, α, β₂)
    let b = contract_all(&b, &right.clone().into_tensor(), &[(1, 0)])?;
    b.permute(&[0, 2, 1])
}
