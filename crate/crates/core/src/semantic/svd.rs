//! Truncated SVD of a sparse matrix by block power (subspace) iteration on
//! `AᵀA` with Rayleigh-Ritz extraction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Rows of `(column, value)` cells; zero values are dropped.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in &rows {
            for &(c, v) in row {
                assert!(c < ncols, "column {c} out of range");
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix {
            nrows: rows.len(),
            ncols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let ncols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| r.iter().copied().enumerate().collect())
            .collect();
        Self::from_rows(ncols, rows)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] += v;
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                rows[c].push((r, v));
            }
        }
        SparseMatrix::from_rows(self.nrows, rows)
    }

    /// `self * x` for a row-major `ncols x width` block.
    fn mul_block(&self, x: &[f64], width: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows * width];
        out.par_chunks_mut(width.max(1))
            .enumerate()
            .for_each(|(r, acc)| {
                for (c, v) in self.row(r) {
                    let src = &x[c * width..(c + 1) * width];
                    for (a, s) in acc.iter_mut().zip(src) {
                        *a += v * s;
                    }
                }
            });
        out
    }
}

/// Rank-k factors. `u` is `rows x k`, `v` is `cols x k`, both row-major.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub k: usize,
    pub singular_values: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub nrows: usize,
    pub ncols: usize,
    pub iterations: usize,
    pub residual: f64,
}

impl TruncatedSvd {
    /// Row `r` of `U_k Σ_k`.
    pub fn scaled_row(&self, r: usize) -> Vec<f64> {
        (0..self.k)
            .map(|j| self.u[r * self.k + j] * self.singular_values[j])
            .collect()
    }

    /// Dense `U_k Σ_k V_kᵀ`.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        (0..self.nrows)
            .map(|r| {
                let us = self.scaled_row(r);
                (0..self.ncols)
                    .map(|c| (0..self.k).map(|j| us[j] * self.v[c * self.k + j]).sum())
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SvdOptions {
    pub seed: u64,
    /// Stop once no leading singular value moves by more than
    /// `tolerance * σ_1` between iterations.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Extra block columns beyond `k`.
    pub oversample: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            seed: 0x5eed,
            tolerance: 1e-8,
            max_iterations: 1000,
            oversample: 10,
        }
    }
}

/// Column-major orthonormalization (modified Gram-Schmidt, two passes).
/// Columns that collapse numerically are replaced by zero vectors.
fn orthonormalize(cols: &mut [Vec<f64>]) {
    for i in 0..cols.len() {
        let norm0 = norm(&cols[i]);
        for _pass in 0..2 {
            for j in 0..i {
                let (done, rest) = cols.split_at_mut(i);
                let d = dot(&done[j], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[j]) {
                    *x -= d * q;
                }
            }
        }
        let n = norm(&cols[i]);
        if n > 1e-13 * norm0.max(f64::MIN_POSITIVE) && n > 0.0 {
            cols[i].iter_mut().for_each(|x| *x /= n);
        } else {
            cols[i].iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn to_columns(block: &[f64], nrows: usize, width: usize) -> Vec<Vec<f64>> {
    (0..width)
        .map(|j| (0..nrows).map(|r| block[r * width + j]).collect())
        .collect()
}

fn to_block(cols: &[Vec<f64>]) -> Vec<f64> {
    let width = cols.len();
    let nrows = cols.first().map_or(0, Vec::len);
    let mut out = vec![0.0; nrows * width];
    for (j, col) in cols.iter().enumerate() {
        for (r, &x) in col.iter().enumerate() {
            out[r * width + j] = x;
        }
    }
    out
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// columns of a row-major `n x n` matrix.
pub fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Rayleigh-Ritz on the column space of `q`: returns singular values (desc),
/// `V = Q W` and `B W = A V` (both row-major with `width` columns).
fn ritz(
    a: &SparseMatrix,
    q_block: &[f64],
    width: usize,
) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let b = a.mul_block(q_block, width);
    let mut gram = vec![vec![0.0; width]; width];
    for row in b.chunks(width) {
        for i in 0..width {
            for j in i..width {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..width {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }
    let (lambda, w) = symmetric_eigen(gram);
    let sigma = lambda.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let bw = b
        .chunks(width)
        .flat_map(|row| {
            (0..width)
                .map(|j| (0..width).map(|i| row[i] * w[i][j]).sum::<f64>())
                .collect::<Vec<_>>()
        })
        .collect();
    (sigma, w, bw)
}

/// Top-k singular triplets of `a`.
pub fn truncated_svd(a: &SparseMatrix, k: usize, opts: &SvdOptions) -> Result<TruncatedSvd> {
    let (nrows, ncols) = (a.nrows(), a.ncols());
    let max_rank = nrows.min(ncols);
    if k == 0 || k > max_rank {
        return Err(Error::invalid(format!(
            "k = {k} must be between 1 and min(rows, cols) = {max_rank}"
        )));
    }
    if a.nnz() == 0 {
        return Err(Error::invalid("matrix has no nonzero entries"));
    }
    let width = (k + opts.oversample).min(max_rank);
    let at = a.transpose();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cols: Vec<Vec<f64>> = (0..width)
        .map(|_| (0..ncols).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    orthonormalize(&mut cols);
    let mut q = to_block(&cols);

    let mut prev: Option<Vec<f64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let z = at.mul_block(&a.mul_block(&q, width), width);
        // Ritz values of the current subspace: σ² = eig(Qᵀ AᵀA Q)
        let mut m = vec![vec![0.0; width]; width];
        for (qr, zr) in q.chunks(width).zip(z.chunks(width)) {
            for i in 0..width {
                for j in 0..width {
                    m[i][j] += qr[i] * zr[j];
                }
            }
        }
        for i in 0..width {
            for j in 0..i {
                let s = 0.5 * (m[i][j] + m[j][i]);
                m[i][j] = s;
                m[j][i] = s;
            }
        }
        let (lambda, _) = symmetric_eigen(m);
        let sigma: Vec<f64> = lambda[..k].iter().map(|&l| l.max(0.0).sqrt()).collect();
        let scale = sigma[0].max(f64::MIN_POSITIVE);
        if let Some(p) = &prev {
            let change = sigma
                .iter()
                .zip(p)
                .map(|(s, t)| (s - t).abs())
                .fold(0.0, f64::max);
            if change <= opts.tolerance * scale {
                converged = true;
            }
        }
        prev = Some(sigma);
        if converged {
            break;
        }
        let mut zc = to_columns(&z, ncols, width);
        orthonormalize(&mut zc);
        q = to_block(&zc);
    }

    let (sigma, w, bw) = ritz(a, &q, width);
    let mut v = vec![0.0; ncols * k];
    for (r, qr) in q.chunks(width).enumerate() {
        for j in 0..k {
            v[r * k + j] = (0..width).map(|i| qr[i] * w[i][j]).sum();
        }
    }
    let mut u = vec![0.0; nrows * k];
    for (r, row) in bw.chunks(width).enumerate() {
        for j in 0..k {
            if sigma[j] > 0.0 {
                u[r * k + j] = row[j] / sigma[j];
            }
        }
    }

    // residual: max_j ‖Aᵀ u_j − σ_j v_j‖
    let atu = at.mul_block(&u, k);
    let residual = (0..k)
        .map(|j| {
            (0..ncols)
                .map(|c| {
                    let d = atu[c * k + j] - sigma[j] * v[c * k + j];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);

    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(TruncatedSvd {
        k,
        singular_values: sigma[..k].to_vec(),
        u,
        v,
        nrows,
        ncols,
        iterations,
        residual,
    })
}
