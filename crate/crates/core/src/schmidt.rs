//! Schmidt decomposition of matricizations, rank truncation, and the
//! entanglement spectrum.
//!
//! Weights are stored as squared singular values `λ_α = σ_α²`, so a matrix is
//! `A = Σ_α √λ_α · u^α (v^α)ᵀ` and dropping components `α > r` costs exactly
//! `Σ_{α>r} λ_α` in squared Frobenius norm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Default relative threshold on singular values (`λ > tol² · λ_max`).
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Descending Schmidt weights of one bipartition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
    total_weight: f64,
}

impl SchmidtSpectrum {
    /// Builds a spectrum from arbitrary non-negative weights (sorted here).
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if let Some(bad) = lambdas.iter().find(|l| !l.is_finite() || **l < 0.0) {
            return Err(Error::NonFinite(format!(
                "Schmidt weight {bad} is not a finite non-negative number"
            )));
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let total_weight = lambdas.iter().sum();
        Ok(Self {
            lambdas,
            total_weight,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `σ_α = √λ_α`.
    pub fn singular_values(&self) -> Vec<f64> {
        self.lambdas.iter().map(|l| l.sqrt()).collect()
    }

    /// Weight discarded by keeping the first `r` components.
    pub fn tail_weight(&self, r: usize) -> f64 {
        self.lambdas.iter().skip(r).fold(0.0, |acc, l| acc + l)
    }

    /// Smallest rank whose discarded weight does not exceed `budget`.
    pub fn rank_for_budget(&self, budget: f64) -> usize {
        let mut tail = self.total_weight;
        for (r, l) in self.lambdas.iter().enumerate() {
            if tail <= budget {
                return r;
            }
            tail -= l;
        }
        self.lambdas.len()
    }

    pub fn numerical_rank(&self, tol: f64) -> usize {
        numerical_rank(self, tol)
    }

    pub fn renyi_entropy(&self, n: f64) -> Result<f64> {
        renyi_entropy(self, n)
    }
}

/// Orthonormal Schmidt vectors together with their weights.
#[derive(Clone, Debug)]
pub struct SchmidtFactors {
    /// Columns are `u^α`.
    pub left: Matrix,
    /// Columns are `v^α`.
    pub right: Matrix,
    pub spectrum: SchmidtSpectrum,
}

impl SchmidtFactors {
    pub fn rank(&self) -> usize {
        self.spectrum.len()
    }

    /// `Σ_α √λ_α u^α (v^α)ᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let (rows, cols) = (self.left.rows(), self.right.rows());
        let mut out = Matrix::zeros(rows, cols);
        for (alpha, sigma) in self.spectrum.singular_values().into_iter().enumerate() {
            for r in 0..rows {
                let u = sigma * self.left.get(r, alpha);
                if u == 0.0 {
                    continue;
                }
                let row = &mut out.data[r * cols..(r + 1) * cols];
                for (c, o) in row.iter_mut().enumerate() {
                    *o += u * self.right.get(c, alpha);
                }
            }
        }
        out
    }

    /// Left vectors scaled by `√λ_α` (the "S·V" half of a sequential sweep
    /// lives on the other side).
    pub fn weighted_right(&self) -> Matrix {
        let sigma = self.spectrum.singular_values();
        Matrix::from_fn(self.right.rows(), self.right.cols(), |r, c| {
            self.right.get(r, c) * sigma[c]
        })
    }

    pub fn truncate(&self, r: usize) -> Result<(SchmidtFactors, f64)> {
        truncate(self, r)
    }
}

/// Thin SVD of a matrix: `σ` descending, with optional vectors.
pub(crate) struct Svd {
    pub sigma: Vec<f64>,
    pub u: Option<Matrix>,
    pub v: Option<Matrix>,
}

/// One-sided Jacobi SVD. The input is transposed internally so that the
/// rotations act on the shorter dimension.
pub(crate) fn svd(a: &Matrix, vectors: bool) -> Svd {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose(), vectors);
        return Svd {
            sigma: t.sigma,
            u: t.v,
            v: t.u,
        };
    }
    let (m, n) = (a.rows(), a.cols());
    // column-major working copy
    let mut w: Vec<Vec<f64>> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<Vec<f64>> = if vectors {
        (0..n)
            .map(|c| (0..n).map(|r| if r == c { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        Vec::new()
    };
    let eps = f64::EPSILON;
    let mut norms: Vec<f64> = w.iter().map(|c| dot(c, c)).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    let negligible = scale * eps * eps * 1e-4;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                if vectors {
                    rotate(&mut v, p, q, c, s);
                }
                norms[p] = dot(&w[p], &w[p]);
                norms[q] = dot(&w[q], &w[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma_raw: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma_raw[j].total_cmp(&sigma_raw[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| sigma_raw[i]).collect();

    let (u, v_mat) = if vectors {
        let mut u = Matrix::zeros(m, n);
        let mut vm = Matrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            let s = sigma_raw[i];
            for (r, &x) in w[i].iter().enumerate().take(m) {
                u.set(r, k, if s > 0.0 { x / s } else { 0.0 });
            }
            for (r, &x) in v[i].iter().enumerate().take(n) {
                vm.set(r, k, x);
            }
        }
        (Some(u), Some(vm))
    } else {
        (None, None)
    };
    Svd { sigma, u, v: v_mat }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Modified Gram-Schmidt, applied twice, over the leading `k` columns.
fn reorthonormalize(m: &mut Matrix, k: usize) {
    let rows = m.rows();
    for _ in 0..2 {
        for j in 0..k {
            for i in 0..j {
                let proj: f64 = (0..rows).map(|r| m.get(r, i) * m.get(r, j)).sum();
                for r in 0..rows {
                    let val = m.get(r, j) - proj * m.get(r, i);
                    m.set(r, j, val);
                }
            }
            let mut norm = (0..rows).map(|r| m.get(r, j).powi(2)).sum::<f64>().sqrt();
            if norm <= 1e-12 {
                norm = complete_column(m, j);
            }
            if norm > 0.0 {
                for r in 0..rows {
                    let val = m.get(r, j) / norm;
                    m.set(r, j, val);
                }
            }
        }
    }
}

/// Replaces column `j` by the first unit vector with a usable component
/// orthogonal to columns `0..j`; returns its remaining norm.
fn complete_column(m: &mut Matrix, j: usize) -> f64 {
    let rows = m.rows();
    for e in 0..rows {
        for r in 0..rows {
            m.set(r, j, if r == e { 1.0 } else { 0.0 });
        }
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = (0..rows).map(|r| m.get(r, i) * m.get(r, j)).sum();
                for r in 0..rows {
                    let val = m.get(r, j) - proj * m.get(r, i);
                    m.set(r, j, val);
                }
            }
        }
        let norm = (0..rows).map(|r| m.get(r, j).powi(2)).sum::<f64>().sqrt();
        if norm > 0.5 {
            return norm;
        }
    }
    0.0
}

/// One step of a sequential sweep: orthonormal `U_r` together with the
/// projected remainder `U_rᵀ A` and the full spectrum of `a`.
pub(crate) struct Split {
    pub left: Matrix,
    pub rest: Matrix,
    pub spectrum: SchmidtSpectrum,
}

/// `choose` picks the retained rank from the full spectrum; it is clamped
/// to `1..=min(rows, cols)`.
pub(crate) fn split(a: &Matrix, choose: impl FnOnce(&SchmidtSpectrum) -> usize) -> Result<Split> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix has non-finite entries".into()));
    }
    let Svd { sigma, u, .. } = svd(a, true);
    let spectrum = SchmidtSpectrum::new(sigma.iter().map(|s| s * s).collect())?;
    let r = choose(&spectrum).clamp(1, spectrum.len());
    let mut left = u.expect("vectors requested").leading_columns(r);
    reorthonormalize(&mut left, r);
    let rest = left.tr_matmul(a)?;
    Ok(Split {
        left,
        rest,
        spectrum,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range("tol", tol, "(0, 1)"))
    }
}

/// Schmidt decomposition `A = Σ √λ_α u^α (v^α)ᵀ`, keeping weights above
/// `tol² · λ_max`.
pub fn schmidt_decompose(a: &Matrix, tol: f64) -> Result<SchmidtFactors> {
    check_tol(tol)?;
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix has non-finite entries".into()));
    }
    let Svd { sigma, u, v } = svd(a, true);
    let (u, v) = (u.expect("vectors requested"), v.expect("vectors requested"));
    let lambda_max = sigma.first().map_or(0.0, |s| s * s);
    let keep = sigma
        .iter()
        .take_while(|s| {
            let l = *s * *s;
            l > 0.0 && l > tol * tol * lambda_max
        })
        .count();
    let mut left = u.leading_columns(keep);
    let mut right = v.leading_columns(keep);
    if keep == 0 {
        left = Matrix::zeros(a.rows(), 0);
        right = Matrix::zeros(a.cols(), 0);
    }
    reorthonormalize(&mut left, keep);
    reorthonormalize(&mut right, keep);
    let spectrum = SchmidtSpectrum::new(sigma[..keep].iter().map(|s| s * s).collect())?;
    Ok(SchmidtFactors {
        left,
        right,
        spectrum,
    })
}

/// Keeps the first `r` Schmidt components; returns the discarded weight.
pub fn truncate(f: &SchmidtFactors, r: usize) -> Result<(SchmidtFactors, f64)> {
    let rank = f.rank();
    if r == 0 || r > rank {
        return Err(Error::out_of_range(
            "retained rank",
            r,
            format!("1..={rank}"),
        ));
    }
    let error = f.spectrum.tail_weight(r);
    let spectrum = SchmidtSpectrum::new(f.spectrum.lambdas()[..r].to_vec())?;
    Ok((
        SchmidtFactors {
            left: f.left.leading_columns(r),
            right: f.right.leading_columns(r),
            spectrum,
        },
        error,
    ))
}

/// Rényi entropy (base 2) of the normalized spectrum.
pub fn renyi_entropy(s: &SchmidtSpectrum, n: f64) -> Result<f64> {
    if s.is_empty() || s.total_weight <= 0.0 {
        return Err(Error::Shape("Rényi entropy of an empty spectrum".into()));
    }
    if !n.is_finite() || n < 0.0 {
        return Err(Error::out_of_range("Rényi order", n, "[0, inf)"));
    }
    let probs = s
        .lambdas
        .iter()
        .map(|l| l / s.total_weight)
        .filter(|p| *p > 0.0);
    let h = if n == 0.0 {
        (probs.count() as f64).log2()
    } else if (n - 1.0).abs() < 1e-12 {
        -probs.map(|p| p * p.log2()).sum::<f64>()
    } else {
        probs.map(|p| p.powf(n)).sum::<f64>().log2() / (1.0 - n)
    };
    // clamp roundoff on exact zeros
    Ok(if h.abs() < 1e-15 { 0.0 } else { h })
}

/// Count of weights above `tol² · λ_max`; 0 for an all-zero spectrum.
pub fn numerical_rank(s: &SchmidtSpectrum, tol: f64) -> usize {
    let lambda_max = s.lambdas.first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return 0;
    }
    s.lambdas
        .iter()
        .filter(|&&l| l > tol * tol * lambda_max)
        .count()
}

/// Singular values of a matrix, descending.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    svd(a, false).sigma
}

/// Numerical rank of a matrix, computed from its singular values only.
pub fn matrix_rank(a: &Matrix, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix has non-finite entries".into()));
    }
    let sigma = singular_values(a);
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > tol * smax).count())
}
