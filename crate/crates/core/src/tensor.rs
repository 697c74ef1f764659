//! Dense tensors, matrices and mode bipartitions.
//!
//! Storage is row-major throughout: the last mode varies fastest. A
//! matricization through a bipartition places the modes of the first part
//! (ascending) on the row multi-index and the remaining modes (ascending) on
//! the column multi-index, both packed row-major.

use std::fmt;

use itertools::Itertools;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest tensor order representable by a bipartition bitmask.
pub const MAX_ORDER: usize = 64;

/// Product of `dims` with overflow detection.
pub fn checked_size(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d)
            .ok_or_else(|| Error::Shape(format!("size of dims {dims:?} overflows usize")))
    })
}

fn row_major_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    strides
}

/// Advances a row-major multi-index in place. Returns false after the last index.
pub(crate) fn next_index(index: &mut [usize], dims: &[usize]) -> bool {
    for k in (0..dims.len()).rev() {
        index[k] += 1;
        if index[k] < dims[k] {
            return true;
        }
        index[k] = 0;
    }
    false
}

#[derive(Clone, PartialEq, Serialize)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseTensor")
            .field("dims", &self.dims)
            .field("len", &self.data.len())
            .finish()
    }
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("tensor order must be at least 1".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Shape(format!("zero-sized mode in dims {dims:?}")));
        }
        let len = checked_size(&dims)?;
        if data.len() != len {
            return Err(Error::Shape(format!(
                "dims {dims:?} need {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = checked_size(&dims)?;
        Self::new(dims, vec![0.0; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = checked_size(&dims)?;
        let mut data = Vec::with_capacity(len);
        if len > 0 && !dims.is_empty() {
            let mut index = vec![0; dims.len()];
            loop {
                data.push(f(&index));
                if !next_index(&mut index, &dims) {
                    break;
                }
            }
        }
        Self::new(dims, data)
    }

    /// Outer product `v1 ⊗ v2 ⊗ … ⊗ vL`.
    pub fn outer(vectors: &[Vec<f64>]) -> Result<Self> {
        let dims = vectors.iter().map(Vec::len).collect_vec();
        Self::from_fn(dims, |idx| {
            idx.iter().zip(vectors).map(|(&i, v)| v[i]).product::<f64>()
        })
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn strides(&self) -> Vec<usize> {
        row_major_strides(&self.dims)
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        index.iter().zip(&self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Sum of squared entries.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Squared Frobenius distance to a tensor of identical shape.
    pub fn distance_sq(&self, other: &DenseTensor) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    /// Elementwise sum of two tensors of identical shape.
    pub fn add(&self, other: &DenseTensor) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.data)
    }

    /// Reorders modes: mode `k` of the result is mode `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let order = self.order();
        if perm.len() != order || !is_permutation(perm) {
            return Err(Error::Shape(format!(
                "{perm:?} is not a permutation of 0..{order}"
            )));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let src_strides = self.strides();
        let new_dims = perm.iter().map(|&p| self.dims[p]).collect_vec();
        let strides = perm.iter().map(|&p| src_strides[p]).collect_vec();
        let mut data = Vec::with_capacity(self.data.len());
        let mut index = vec![0; order];
        let mut offset = 0usize;
        loop {
            data.push(self.data[offset]);
            // odometer step with incremental source offset
            let mut k = order;
            loop {
                if k == 0 {
                    return Self::new(new_dims, data);
                }
                k -= 1;
                index[k] += 1;
                offset += strides[k];
                if index[k] < new_dims[k] {
                    break;
                }
                offset -= strides[k] * new_dims[k];
                index[k] = 0;
            }
        }
    }

    /// Unfolds with `row_modes` (any order, no repeats) on rows and the
    /// remaining modes, ascending, on columns.
    pub fn unfold(&self, row_modes: &[usize]) -> Result<Matrix> {
        let perm = unfold_permutation(self.order(), row_modes)?;
        let rows = row_modes.iter().map(|&k| self.dims[k]).product();
        let cols = self.len() / rows;
        let permuted = self.permute(&perm)?;
        Matrix::new(rows, cols, permuted.data)
    }

    /// Inverse of [`DenseTensor::unfold`].
    pub fn fold(matrix: &Matrix, row_modes: &[usize], dims: &[usize]) -> Result<Self> {
        let perm = unfold_permutation(dims.len(), row_modes)?;
        let permuted_dims = perm.iter().map(|&p| dims[p]).collect_vec();
        if matrix.rows * matrix.cols != checked_size(dims)? {
            return Err(Error::Shape(format!(
                "{}x{} matrix cannot fold into {dims:?}",
                matrix.rows, matrix.cols
            )));
        }
        let permuted = Self::new(permuted_dims, matrix.data.clone())?;
        let mut inverse = vec![0; perm.len()];
        for (k, &p) in perm.iter().enumerate() {
            inverse[p] = k;
        }
        permuted.permute(&inverse)
    }

    /// Matricization through a mode bipartition.
    pub fn matricize(&self, p: &ModeBipartition) -> Result<Matrix> {
        if p.order() != self.order() {
            return Err(Error::OrderMismatch {
                expected: self.order(),
                found: p.order(),
            });
        }
        self.unfold(&p.part_a())
    }
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

fn unfold_permutation(order: usize, row_modes: &[usize]) -> Result<Vec<usize>> {
    let mut used = vec![false; order];
    for &k in row_modes {
        if k >= order || used[k] {
            return Err(Error::Shape(format!(
                "row modes {row_modes:?} invalid for order {order}"
            )));
        }
        used[k] = true;
    }
    let mut perm = row_modes.to_vec();
    perm.extend((0..order).filter(|&k| !used[k]));
    Ok(perm)
}

/// Squared Frobenius norm of a tensor.
pub fn frobenius_norm_sq(t: &DenseTensor) -> f64 {
    t.frobenius_norm_sq()
}

/// Matricization through a mode bipartition (free-function form).
pub fn matricize(t: &DenseTensor, p: &ModeBipartition) -> Result<Matrix> {
    t.matricize(p)
}

/// Contracts `t1` with `t2` over the given `(mode of t1, mode of t2)` pairs.
///
/// Surviving modes of `t1` come first, then those of `t2`, each in ascending
/// order. A full contraction yields an order-1 tensor of dimension 1.
pub fn contract_all(
    t1: &DenseTensor,
    t2: &DenseTensor,
    pairs: &[(usize, usize)],
) -> Result<DenseTensor> {
    let mut used1 = vec![false; t1.order()];
    let mut used2 = vec![false; t2.order()];
    for &(a, b) in pairs {
        if a >= t1.order() || b >= t2.order() {
            return Err(Error::Shape(format!(
                "pair ({a}, {b}) out of range for orders {} and {}",
                t1.order(),
                t2.order()
            )));
        }
        if used1[a] || used2[b] {
            return Err(Error::Shape(format!("mode paired twice in {pairs:?}")));
        }
        if t1.dims[a] != t2.dims[b] {
            return Err(Error::DimMismatch(format!(
                "contracted modes ({a}, {b}) have dims {} and {}",
                t1.dims[a], t2.dims[b]
            )));
        }
        used1[a] = true;
        used2[b] = true;
    }
    let free1 = (0..t1.order()).filter(|&k| !used1[k]).collect_vec();
    let free2 = (0..t2.order()).filter(|&k| !used2[k]).collect_vec();

    let mut perm1 = free1.clone();
    perm1.extend(pairs.iter().map(|p| p.0));
    let mut perm2 = pairs.iter().map(|p| p.1).collect_vec();
    perm2.extend(free2.iter().copied());

    let rows: usize = free1.iter().map(|&k| t1.dims[k]).product();
    let inner: usize = pairs.iter().map(|p| t1.dims[p.0]).product();
    let cols: usize = free2.iter().map(|&k| t2.dims[k]).product();

    let a = Matrix::new(rows, inner, t1.permute(&perm1)?.data)?;
    let b = Matrix::new(inner, cols, t2.permute(&perm2)?.data)?;
    let c = a.matmul(&b)?;

    let mut dims = free1.iter().map(|&k| t1.dims[k]).collect_vec();
    dims.extend(free2.iter().map(|&k| t2.dims[k]));
    if dims.is_empty() {
        dims.push(1);
    }
    DenseTensor::new(dims, c.data)
}

/// Mode-`k` product: `t'[…, i, …] = Σ_j m[i, j] · t[…, j, …]`.
pub fn mode_product(t: &DenseTensor, k: usize, m: &Matrix) -> Result<DenseTensor> {
    if k >= t.order() {
        return Err(Error::out_of_range("mode", k, format!("0..{}", t.order())));
    }
    let c = contract_all(t, &m.clone().into_tensor(), &[(k, 1)])?;
    // the new mode arrived last; move it back to position k
    let last = t.order() - 1;
    let perm: Vec<usize> = (0..t.order())
        .map(|p| match p.cmp(&k) {
            std::cmp::Ordering::Less => p,
            std::cmp::Ordering::Equal => last,
            std::cmp::Ordering::Greater => p - 1,
        })
        .collect();
    c.permute(&perm)
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Serialize)]
pub struct Matrix {
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            let row = (0..self.cols.min(8))
                .map(|c| format!("{:>10.4e}", self.get(r, c)))
                .join(" ");
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.transpose().matmul(other)
    }

    /// Keeps the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        let k = k.min(self.cols);
        Self::from_fn(self.rows, k, |r, c| self.get(r, c))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn distance_sq(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest entrywise deviation of `selfᵀ·self` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.tr_matmul(self).expect("square product");
        let mut worst = 0.0f64;
        for r in 0..gram.rows {
            for c in 0..gram.cols {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram.get(r, c) - target).abs());
            }
        }
        worst
    }

    pub fn into_tensor(self) -> DenseTensor {
        DenseTensor {
            dims: vec![self.rows, self.cols],
            data: self.data,
        }
    }
}

/// A split of the modes `0..order` into two nonempty parts, stored in
/// canonical form: the first part is never the larger one, and on ties it
/// contains mode 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeBipartition {
    mask: u64,
    order: usize,
}

impl fmt::Debug for ModeBipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.part_a(), self.part_b())
    }
}

impl Serialize for ModeBipartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ModeBipartition", 2)?;
        s.serialize_field("part_a", &self.part_a())?;
        s.serialize_field("order", &self.order)?;
        s.end()
    }
}

impl ModeBipartition {
    /// Builds a bipartition from a bitmask, replacing it by its complement if
    /// needed to reach canonical form.
    pub fn new(mask: u64, order: usize) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(Error::InvalidBipartition(format!(
                "order {order} outside [2, {MAX_ORDER}]"
            )));
        }
        let full = full_mask(order);
        if mask & !full != 0 {
            return Err(Error::InvalidBipartition(format!(
                "mask {mask:#b} has bits beyond order {order}"
            )));
        }
        if mask == 0 || mask == full {
            return Err(Error::InvalidBipartition(
                "both parts must be nonempty".into(),
            ));
        }
        let size = mask.count_ones() as usize;
        let flip = 2 * size > order || (2 * size == order && mask & 1 == 0);
        Ok(Self {
            mask: if flip { full & !mask } else { mask },
            order,
        })
    }

    pub fn from_modes(modes: &[usize], order: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &k in modes {
            if k >= order || k >= MAX_ORDER {
                return Err(Error::InvalidBipartition(format!(
                    "mode {k} out of range for order {order}"
                )));
            }
            if mask & (1 << k) != 0 {
                return Err(Error::InvalidBipartition(format!("mode {k} repeated")));
            }
            mask |= 1 << k;
        }
        Self::new(mask, order)
    }

    /// The bipartition `(0..m) | (m..order)`.
    pub fn contiguous(m: usize, order: usize) -> Result<Self> {
        if m == 0 || m >= order {
            return Err(Error::out_of_range(
                "cut position",
                m,
                format!("1..{order}"),
            ));
        }
        Self::new(full_mask(m), order)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Size of the smaller part.
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, mode: usize) -> bool {
        mode < self.order && self.mask & (1 << mode) != 0
    }

    pub fn part_a(&self) -> Vec<usize> {
        (0..self.order).filter(|&k| self.contains(k)).collect()
    }

    pub fn part_b(&self) -> Vec<usize> {
        (0..self.order).filter(|&k| !self.contains(k)).collect()
    }
}

fn full_mask(order: usize) -> u64 {
    if order >= 64 {
        u64::MAX
    } else {
        (1u64 << order) - 1
    }
}

/// All canonical bipartitions of `order` modes whose smaller part has `m`
/// modes, in lexicographic order of the smaller part.
pub fn enumerate_bipartitions(order: usize, m: usize) -> Result<Vec<ModeBipartition>> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::out_of_range(
            "order",
            order,
            format!("2..={MAX_ORDER}"),
        ));
    }
    if m == 0 || 2 * m > order {
        return Err(Error::out_of_range(
            "cluster size",
            m,
            format!("1..={}", order / 2),
        ));
    }
    let tie = 2 * m == order;
    Ok((0..order)
        .combinations(m)
        .filter(|c| !tie || c[0] == 0)
        .map(|c| {
            let mask = c.iter().fold(0u64, |acc, &k| acc | (1 << k));
            ModeBipartition { mask, order }
        })
        .collect())
}
