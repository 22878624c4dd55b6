//! Collocation stiffness matrices: dense, and masked multilevel Toeplitz with FFT matvec.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frlap_kernel::{frlap_gaussian, FracOrder};
use crate::lattice::LatticeGrid;
use crate::scalar::Real;

/// A symmetric linear operator acting on coefficient vectors.
pub trait LinearOperator<T: Real>: Sync {
    fn size(&self) -> usize;
    fn apply(&self, v: &[T]) -> Result<Vec<T>>;
}

fn squared_index_distance(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(&x, &y)| ((x - y) * (x - y)) as u64).sum()
}

// frlap values for each distinct squared index distance, computed in parallel.
fn kernel_table<T: Real>(
    keys: impl IntoIterator<Item = u64>,
    order: FracOrder<T>,
    eps: T,
    h: T,
) -> std::result::Result<BTreeMap<u64, T>, (u64, Error)> {
    let mut keys: Vec<u64> = keys.into_iter().collect();
    keys.sort_unstable();
    keys.dedup();
    let values: Vec<std::result::Result<T, (u64, Error)>> = keys
        .par_iter()
        .map(|&k| {
            let r = h * T::from_u64(k).expect("distance").sqrt();
            frlap_gaussian(order, eps, r).map_err(|e| (k, e))
        })
        .collect();
    let mut table = BTreeMap::new();
    for (k, v) in keys.into_iter().zip(values) {
        table.insert(k, v?);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct DenseStiffness<T: Real> {
    grid: LatticeGrid<T>,
    matrix: DMatrix<T>,
    order: FracOrder<T>,
    eps: T,
}

impl<T: Real> DenseStiffness<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn order(&self) -> FracOrder<T> {
        self.order
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn entry(&self, j: usize, k: usize) -> T {
        self.matrix[(j, k)]
    }

    pub fn grid(&self) -> &LatticeGrid<T> {
        &self.grid
    }
}

impl<T: Real> LinearOperator<T> for DenseStiffness<T> {
    fn size(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let n = self.size();
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        let out = (0..n)
            .into_par_iter()
            .map(|j| {
                // column access is contiguous; the matrix is symmetric
                self.matrix.column(j).iter().zip(v).map(|(&a, &x)| a * x).sum()
            })
            .collect();
        Ok(out)
    }
}

/// a_jk = frlap_gaussian(order, eps, |x_j - x_k|) on the grid's points.
pub fn assemble_dense<T: Real>(
    grid: &LatticeGrid<T>,
    order: FracOrder<T>,
    eps: T,
) -> Result<DenseStiffness<T>> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyGrid { h: grid.h().as_f64() });
    }
    check_order_dim(order, grid.dim())?;
    let keys = (0..n).flat_map(|j| (j..n).map(move |k| (j, k)));
    let table = kernel_table(
        keys.map(|(j, k)| squared_index_distance(grid.index(j), grid.index(k))),
        order,
        eps,
        grid.h(),
    )
    .map_err(|(key, source)| {
        let (row, col) = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .find(|&(j, k)| squared_index_distance(grid.index(j), grid.index(k)) == key)
            .unwrap_or((0, 0));
        Error::Assembly {
            row,
            col,
            source: Box::new(source),
        }
    })?;
    let matrix = DMatrix::from_fn(n, n, |j, k| table[&squared_index_distance(grid.index(j), grid.index(k))]);
    Ok(DenseStiffness {
        grid: grid.clone(),
        matrix,
        order,
        eps,
    })
}

fn check_order_dim<T: Real>(order: FracOrder<T>, dim: usize) -> Result<()> {
    if order.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: order.dim(),
        });
    }
    Ok(())
}

/// Stiffness matrix as a masked multilevel Toeplitz operator on the bounding lattice block.
#[derive(Clone)]
pub struct ToeplitzStiffness<T: Real> {
    grid: LatticeGrid<T>,
    level_sizes: Vec<usize>,
    block_min: Vec<i64>,
    kernel: Vec<T>,
    // positions of the active points inside the circulant array, in grid order
    active: Vec<usize>,
    mask: Vec<bool>,
    spectrum: Vec<T>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
    order: FracOrder<T>,
    eps: T,
}

impl<T: Real> std::fmt::Debug for ToeplitzStiffness<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzStiffness")
            .field("level_sizes", &self.level_sizes)
            .field("active", &self.active.len())
            .field("eps", &self.eps)
            .finish()
    }
}

fn row_major_strides(sizes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }
    strides
}

// Complex FFT along every axis of a row-major array.
fn fft_nd<T: Real>(data: &mut [Complex<T>], sizes: &[usize], plans: &[Arc<dyn Fft<T>>]) {
    let strides = row_major_strides(sizes);
    let total = data.len();
    for (axis, plan) in plans.iter().enumerate() {
        let n = sizes[axis];
        let stride = strides[axis];
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        // line starts: all positions whose coordinate along `axis` is zero
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let start = outer + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (i, slot) in line.iter().enumerate() {
                    data[start + i * stride] = *slot;
                }
            }
        }
    }
}

/// Builds the Toeplitz form; the grid must be a subset of a rectangular lattice block.
pub fn assemble_toeplitz<T: Real>(
    grid: &LatticeGrid<T>,
    order: FracOrder<T>,
    eps: T,
) -> Result<ToeplitzStiffness<T>> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::EmptyGrid { h: grid.h().as_f64() });
    }
    let dim = grid.dim();
    check_order_dim(order, dim)?;
    let mut block_min = vec![i64::MAX; dim];
    let mut block_max = vec![i64::MIN; dim];
    for i in 0..n {
        for (a, &k) in grid.index(i).iter().enumerate() {
            block_min[a] = block_min[a].min(k);
            block_max[a] = block_max[a].max(k);
        }
    }
    let level_sizes: Vec<usize> = block_min
        .iter()
        .zip(&block_max)
        .map(|(&lo, &hi)| (hi - lo + 1) as usize)
        .collect();

    // kernel over differences -(n_i - 1)..=(n_i - 1), row-major
    let kernel_sizes: Vec<usize> = level_sizes.iter().map(|&s| 2 * s - 1).collect();
    let kernel_len: usize = kernel_sizes.iter().product();
    let kernel_strides = row_major_strides(&kernel_sizes);
    let diff_of = |flat: usize| -> Vec<i64> {
        (0..dim)
            .map(|a| ((flat / kernel_strides[a]) % kernel_sizes[a]) as i64 - (level_sizes[a] as i64 - 1))
            .collect()
    };
    let key_of = |d: &[i64]| -> u64 { d.iter().map(|&x| (x * x) as u64).sum() };
    let table = kernel_table((0..kernel_len).map(|f| key_of(&diff_of(f))), order, eps, grid.h())
        .map_err(|(key, source)| {
            let (row, col) = (0..n)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .find(|&(j, k)| squared_index_distance(grid.index(j), grid.index(k)) == key)
                .unwrap_or((0, 0));
            Error::Assembly {
                row,
                col,
                source: Box::new(source),
            }
        })?;
    let kernel: Vec<T> = (0..kernel_len).map(|f| table[&key_of(&diff_of(f))]).collect();

    // circulant of period 2 n_i; difference delta sits at delta mod 2 n_i, index n_i is padding
    let circ_sizes: Vec<usize> = level_sizes.iter().map(|&s| 2 * s).collect();
    let circ_len: usize = circ_sizes.iter().product();
    let circ_strides = row_major_strides(&circ_sizes);
    let mut circ = vec![Complex::new(T::zero(), T::zero()); circ_len];
    for (flat, slot) in circ.iter_mut().enumerate() {
        let mut diff = Vec::with_capacity(dim);
        let mut pad = false;
        for a in 0..dim {
            let k = (flat / circ_strides[a]) % circ_sizes[a];
            let s = level_sizes[a];
            if k == s {
                pad = true;
                break;
            }
            diff.push(if k < s { k as i64 } else { k as i64 - 2 * s as i64 });
        }
        if !pad {
            slot.re = table[&key_of(&diff)];
        }
    }
    let mut planner = FftPlanner::new();
    let forward: Vec<_> = circ_sizes.iter().map(|&m| planner.plan_fft_forward(m)).collect();
    let inverse: Vec<_> = circ_sizes.iter().map(|&m| planner.plan_fft_inverse(m)).collect();
    fft_nd(&mut circ, &circ_sizes, &forward);
    // even circulant: the spectrum is real
    let spectrum = circ.iter().map(|c| c.re).collect();

    let block_strides = row_major_strides(&level_sizes);
    let mut mask = vec![false; level_sizes.iter().product()];
    let mut active = Vec::with_capacity(n);
    for i in 0..n {
        let idx = grid.index(i);
        let mut pos = 0;
        let mut bpos = 0;
        for a in 0..dim {
            let off = (idx[a] - block_min[a]) as usize;
            pos += off * circ_strides[a];
            bpos += off * block_strides[a];
        }
        mask[bpos] = true;
        active.push(pos);
    }

    Ok(ToeplitzStiffness {
        grid: grid.clone(),
        level_sizes,
        block_min,
        kernel,
        active,
        mask,
        spectrum,
        forward,
        inverse,
        order,
        eps,
    })
}

impl<T: Real> ToeplitzStiffness<T> {
    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    /// Kernel tensor over differences, row-major, axis offsets n_i - 1.
    pub fn kernel(&self) -> &[T] {
        &self.kernel
    }

    /// Active-point indicator over the bounding block, row-major.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn block_min(&self) -> &[i64] {
        &self.block_min
    }

    /// Real spectrum of the circulant embedding (period 2 n_i per axis).
    pub fn circulant_spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn order(&self) -> FracOrder<T> {
        self.order
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn grid(&self) -> &LatticeGrid<T> {
        &self.grid
    }

    fn circ_sizes(&self) -> Vec<usize> {
        self.level_sizes.iter().map(|&s| 2 * s).collect()
    }

    // block-relative multi-index of active point j
    fn block_index(&self, j: usize) -> Vec<usize> {
        let sizes = self.circ_sizes();
        let strides = row_major_strides(&sizes);
        (0..sizes.len()).map(|a| (self.active[j] / strides[a]) % sizes[a]).collect()
    }

    /// Entry a_jk read from the kernel tensor.
    pub fn entry(&self, j: usize, k: usize) -> T {
        let (a, b) = (self.block_index(j), self.block_index(k));
        let kernel_sizes: Vec<usize> = self.level_sizes.iter().map(|&s| 2 * s - 1).collect();
        let strides = row_major_strides(&kernel_sizes);
        let flat: usize = (0..a.len())
            .map(|ax| (a[ax] as i64 - b[ax] as i64 + self.level_sizes[ax] as i64 - 1) as usize * strides[ax])
            .sum();
        self.kernel[flat]
    }

    /// Dense matrix reconstructed from kernel and mask.
    pub fn to_dense(&self) -> DMatrix<T> {
        let n = self.active.len();
        DMatrix::from_fn(n, n, |j, k| self.entry(j, k))
    }

    /// Multiplies a full circulant-block array by the diagonal `spectrum` in Fourier space.
    pub(crate) fn apply_spectrum(&self, data: &mut [Complex<T>], spectrum: &[T]) {
        let sizes = self.circ_sizes();
        fft_nd(data, &sizes, &self.forward);
        for (c, &s) in data.iter_mut().zip(spectrum) {
            *c = *c * s;
        }
        fft_nd(data, &sizes, &self.inverse);
        let scale = T::one() / T::from_count(data.len());
        for c in data.iter_mut() {
            *c = *c * scale;
        }
    }

    /// Scatters `v` into the block, applies `spectrum`, gathers the active entries.
    pub(crate) fn masked_spectral_apply(&self, v: &[T], spectrum: &[T]) -> Vec<T> {
        let len: usize = self.circ_sizes().iter().product();
        let mut data = vec![Complex::new(T::zero(), T::zero()); len];
        for (&pos, &x) in self.active.iter().zip(v) {
            data[pos].re = x;
        }
        self.apply_spectrum(&mut data, spectrum);
        self.active.iter().map(|&pos| data[pos].re).collect()
    }

    /// Writes the kernel tensor: u64 level count, u64 per level size, then f64 values,
    /// all little-endian.
    pub fn dump_kernel<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(&(self.level_sizes.len() as u64).to_le_bytes())?;
        for &s in &self.level_sizes {
            out.write_all(&(s as u64).to_le_bytes())?;
        }
        for &v in &self.kernel {
            out.write_all(&v.as_f64().to_le_bytes())?;
        }
        Ok(())
    }
}

/// Scatter, circulant convolution by FFT, gather.
pub fn toeplitz_matvec<T: Real>(op: &ToeplitzStiffness<T>, v: &[T]) -> Result<Vec<T>> {
    if v.len() != op.active.len() {
        return Err(Error::DimensionMismatch {
            expected: op.active.len(),
            found: v.len(),
        });
    }
    Ok(op.masked_spectral_apply(v, &op.spectrum))
}

impl<T: Real> LinearOperator<T> for ToeplitzStiffness<T> {
    fn size(&self) -> usize {
        self.active.len()
    }

    fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        toeplitz_matvec(self, v)
    }
}

/// Either representation of the stiffness operator.
#[derive(Debug, Clone)]
pub enum StiffnessOperator<T: Real> {
    Dense(DenseStiffness<T>),
    Toeplitz(ToeplitzStiffness<T>),
}

impl<T: Real> StiffnessOperator<T> {
    pub fn eps(&self) -> T {
        match self {
            StiffnessOperator::Dense(d) => d.eps,
            StiffnessOperator::Toeplitz(t) => t.eps,
        }
    }

    pub fn grid(&self) -> &LatticeGrid<T> {
        match self {
            StiffnessOperator::Dense(d) => &d.grid,
            StiffnessOperator::Toeplitz(t) => &t.grid,
        }
    }

    pub fn order(&self) -> FracOrder<T> {
        match self {
            StiffnessOperator::Dense(d) => d.order,
            StiffnessOperator::Toeplitz(t) => t.order,
        }
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        match self {
            StiffnessOperator::Dense(d) => d.matrix.clone(),
            StiffnessOperator::Toeplitz(t) => t.to_dense(),
        }
    }
}

impl<T: Real> LinearOperator<T> for StiffnessOperator<T> {
    fn size(&self) -> usize {
        match self {
            StiffnessOperator::Dense(d) => d.size(),
            StiffnessOperator::Toeplitz(t) => t.size(),
        }
    }

    fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        match self {
            StiffnessOperator::Dense(d) => d.apply(v),
            StiffnessOperator::Toeplitz(t) => t.apply(v),
        }
    }
}
