//! Lowest eigenpairs of symmetric-definite pencils `K x = λ M x`.
//!
//! Small problems go through a dense solve of the Cholesky-reduced matrix
//! `R⁻¹ K R⁻ᵀ` (`M = R Rᵀ`). Larger ones use block Lanczos on the
//! shift-inverted operator `K⁻¹M`, which is self-adjoint in the `M` inner
//! product and maps the lowest `λ` to its largest, well separated,
//! eigenvalues `1/λ`. Every new block is reorthogonalized against the whole
//! basis (two classical Gram-Schmidt passes) and Ritz pairs are extracted by
//! a dense Rayleigh-Ritz step on the projected matrix.
//!
//! A block size above one matters: the square and the annulus both have
//! exactly degenerate eigenvalues, and a single-vector Krylov sequence only
//! ever sees one direction of each degenerate eigenspace.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SparseSymmetricOperator;
use crate::sparse::{CsrMatrix, EnvelopeCholesky};

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub seed: u64,
    /// Convergence threshold on the relative `M`-norm residual of the
    /// shift-inverted problem.
    pub tol: f64,
    pub block_size: usize,
    /// Problems with at most this many unknowns are solved densely, as are
    /// problems whose default Krylov budget would span the whole space.
    pub dense_threshold: usize,
    /// Krylov dimension budget; `None` picks `4m + 120`.
    pub max_krylov: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            seed: 0x5eed,
            tol: 1e-12,
            block_size: 4,
            dense_threshold: 400,
            max_krylov: None,
        }
    }
}

/// `M`-orthonormal eigenvectors of the pencil, ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct PencilEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Weighted-orthonormal Dirichlet eigenpairs `(μ_j, φ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBasis {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    weights: Vec<f64>,
}

impl EigenBasis {
    pub fn new(values: Vec<f64>, vectors: DMatrix<f64>, weights: Vec<f64>) -> Self {
        assert_eq!(values.len(), vectors.ncols());
        assert_eq!(weights.len(), vectors.nrows());
        EigenBasis {
            values,
            vectors,
            weights,
        }
    }

    /// Number of modes.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of grid unknowns.
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j).iter().copied().collect()
    }

    /// The first `m` modes only.
    pub fn truncated(&self, m: usize) -> EigenBasis {
        let m = m.min(self.len());
        EigenBasis {
            values: self.values[..m].to_vec(),
            vectors: self.vectors.columns(0, m).into_owned(),
            weights: self.weights.clone(),
        }
    }

    /// `‖Lφ_j − μ_jφ_j‖_w`
    pub fn residual(&self, op: &SparseSymmetricOperator, j: usize) -> f64 {
        let phi = self.vector(j);
        let lphi = op.apply(&phi);
        lphi.iter()
            .zip(&phi)
            .zip(&self.weights)
            .map(|((a, b), w)| w * (a - self.values[j] * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation of the weighted Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = DVector::from_column_slice(&self.weights);
        let mut wv = self.vectors.clone();
        for mut col in wv.column_iter_mut() {
            col.component_mul_assign(&w);
        }
        let gram = self.vectors.transpose() * wv;
        (gram - DMatrix::identity(self.len(), self.len()))
            .abs()
            .max()
    }
}

/// The `m` smallest eigenpairs of the Dirichlet Laplacian, weighted-orthonormal,
/// each scaled so its largest-magnitude entry is positive.
pub fn lowest_eigenpairs(op: &SparseSymmetricOperator, m: usize) -> Result<EigenBasis> {
    lowest_eigenpairs_with(op, m, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(
    op: &SparseSymmetricOperator,
    m: usize,
    opts: &EigenOptions,
) -> Result<EigenBasis> {
    let mass = CsrMatrix::diagonal_matrix(op.weights());
    let PencilEigen { values, vectors } = generalized_lowest(op.stiffness(), &mass, m, opts)?;
    Ok(EigenBasis::new(values, vectors, op.weights().to_vec()))
}

/// Lowest `m` eigenpairs of `K x = λ M x` for symmetric positive definite
/// `K` and `M`.
pub fn generalized_lowest(
    stiffness: &CsrMatrix,
    mass: &CsrMatrix,
    m: usize,
    opts: &EigenOptions,
) -> Result<PencilEigen> {
    let n = stiffness.nrows();
    if m > n {
        return Err(Error::TooManyModes {
            requested: m,
            dimension: n,
        });
    }
    let whole_space = opts.max_krylov.is_none() && 4 * m + 120 >= n;
    let mut out = if n <= opts.dense_threshold || whole_space {
        dense_lowest(stiffness, mass, m)?
    } else {
        block_lanczos_lowest(stiffness, mass, m, opts)?
    };
    normalize_signs(&mut out.vectors);
    Ok(out)
}

fn normalize_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0.0f64;
        for &v in col.iter() {
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best < 0.0 {
            col.neg_mut();
        }
    }
}

fn dense_lowest(stiffness: &CsrMatrix, mass: &CsrMatrix, m: usize) -> Result<PencilEigen> {
    let n = stiffness.nrows();
    let chol = nalgebra::Cholesky::new(mass.to_dense()).ok_or(Error::NotPositiveDefinite {
        pivot: 0,
        value: f64::NAN,
    })?;
    let r = chol.l();
    let k = stiffness.to_dense();
    let x = r
        .solve_lower_triangular(&k)
        .expect("Cholesky factor has a nonzero diagonal");
    let c = r
        .solve_lower_triangular(&x.transpose())
        .expect("Cholesky factor has a nonzero diagonal");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut y = DMatrix::zeros(n, m);
    let mut values = Vec::with_capacity(m);
    for (col, &j) in order.iter().take(m).enumerate() {
        values.push(eig.eigenvalues[j]);
        y.set_column(col, &eig.eigenvectors.column(j));
    }
    let vectors = r
        .tr_solve_lower_triangular(&y)
        .expect("Cholesky factor has a nonzero diagonal");
    Ok(PencilEigen { values, vectors })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn columns_to_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols[0].len();
    let mut data = Vec::with_capacity(n * cols.len());
    for c in cols {
        data.extend_from_slice(c);
    }
    DMatrix::from_vec(n, cols.len(), data)
}

fn block_lanczos_lowest(
    stiffness: &CsrMatrix,
    mass: &CsrMatrix,
    m: usize,
    opts: &EigenOptions,
) -> Result<PencilEigen> {
    let n = stiffness.nrows();
    let chol = EnvelopeCholesky::factor(stiffness)?;
    let bs = opts.block_size.max(1);
    let max_dim = opts.max_krylov.unwrap_or(4 * m + 120).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random_vec =
        |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(rng)).collect() };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    // projected operator H_ij = ⟨v_i, K⁻¹M v_j⟩_M, stored by columns
    let mut h: Vec<Vec<f64>> = Vec::new();

    let mut block: Vec<Vec<f64>> = (0..bs).map(|_| random_vec(&mut rng)).collect();
    let mut next_check = (m + 2 * bs).min(max_dim);

    loop {
        let mut added = 0;
        for mut x in block.drain(..) {
            if basis.len() >= max_dim {
                break;
            }
            let mut attempts = 0;
            loop {
                let mx0 = mass.mul_vec(&x);
                let norm0 = dot(&x, &mx0).sqrt();
                for _ in 0..2 {
                    for (v, mv) in basis.iter().zip(&mbasis) {
                        let c = dot(&x, mv);
                        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= c * vi);
                    }
                }
                let mx = mass.mul_vec(&x);
                let norm = dot(&x, &mx).sqrt();
                if norm > 1e-8 * norm0 && norm > 0.0 {
                    x.iter_mut().for_each(|v| *v /= norm);
                    let mv: Vec<f64> = mx.iter().map(|v| v / norm).collect();
                    let z = chol.solve(&mv);
                    let mut col = Vec::with_capacity(basis.len() + 1);
                    for mvi in &mbasis {
                        col.push(dot(mvi, &z));
                    }
                    col.push(dot(&mv, &z));
                    basis.push(x);
                    mbasis.push(mv);
                    images.push(z);
                    h.push(col);
                    added += 1;
                    break;
                }
                attempts += 1;
                if attempts > 3 {
                    break;
                }
                x = random_vec(&mut rng);
            }
        }

        let dim = basis.len();
        let exhausted = dim >= max_dim || added == 0;
        if dim >= next_check || exhausted {
            let mut hm = DMatrix::zeros(dim, dim);
            for (j, col) in h.iter().enumerate() {
                for (i, &v) in col.iter().enumerate() {
                    hm[(i, j)] = v;
                    hm[(j, i)] = v;
                }
            }
            let eig = SymmetricEigen::new(hm);
            let mut order: Vec<usize> = (0..dim).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let take = m.min(dim);
            let mut s = DMatrix::zeros(dim, take);
            for (c, &j) in order.iter().take(take).enumerate() {
                s.set_column(c, &eig.eigenvectors.column(j));
            }
            let y = columns_to_matrix(&basis) * &s;
            let oy = columns_to_matrix(&images) * &s;
            let mut converged = 0;
            for (c, &j) in order.iter().take(take).enumerate() {
                let sigma = eig.eigenvalues[j];
                let r: Vec<f64> = oy
                    .column(c)
                    .iter()
                    .zip(y.column(c).iter())
                    .map(|(a, b)| a - sigma * b)
                    .collect();
                let res = dot(&r, &mass.mul_vec(&r)).max(0.0).sqrt();
                if res <= opts.tol * sigma.abs() || dim == n {
                    converged += 1;
                } else {
                    break;
                }
            }
            if converged == m {
                let values = order
                    .iter()
                    .take(m)
                    .map(|&j| 1.0 / eig.eigenvalues[j])
                    .collect();
                return Ok(PencilEigen { values, vectors: y });
            }
            if exhausted {
                return Err(Error::NotConverged {
                    requested: m,
                    converged,
                    krylov_dim: dim,
                });
            }
            next_check = (dim + bs.max(dim / 8)).min(max_dim);
        }
        let start = images.len() - added.min(images.len());
        block = images[start..].to_vec();
        if block.is_empty() {
            block = (0..bs).map(|_| random_vec(&mut rng)).collect();
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct CacheMeta {
    key: String,
    dimension: usize,
    modes: usize,
    layout: String,
}

/// On-disk cache of eigenpairs: `<key>.json` metadata plus `<key>.bin`
/// holding the eigenvalues then the column-major eigenvectors as
/// little-endian `f64`.
#[derive(Clone, Debug)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EigenCache { dir: dir.into() }
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (
            self.dir.join(format!("{key}.json")),
            self.dir.join(format!("{key}.bin")),
        )
    }

    pub fn store(&self, key: &str, values: &[f64], vectors: &DMatrix<f64>) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let (meta_path, bin_path) = self.paths(key);
        let meta = CacheMeta {
            key: key.to_string(),
            dimension: vectors.nrows(),
            modes: values.len(),
            layout: "f64-le: values[modes], vectors[dimension x modes] column-major".into(),
        };
        let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
        let mut bytes = Vec::with_capacity(8 * (values.len() + vectors.len()));
        for v in values.iter().chain(vectors.as_slice()) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let mut f = fs::File::create(&bin_path).map_err(|e| Error::io(&bin_path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(&bin_path, e))?;
        Ok(())
    }

    /// `Ok(None)` when the entry is absent.
    pub fn load(&self, key: &str) -> Result<Option<(Vec<f64>, DMatrix<f64>)>> {
        let (meta_path, bin_path) = self.paths(key);
        if !meta_path.exists() || !bin_path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: CacheMeta = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: meta_path.clone(),
            message: e.to_string(),
        })?;
        if meta.key != key {
            return Err(Error::Format {
                path: meta_path,
                message: format!("cache key mismatch: {} vs {key}", meta.key),
            });
        }
        let mut bytes = Vec::new();
        fs::File::open(&bin_path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(&bin_path, e))?;
        let expected = 8 * (meta.modes + meta.modes * meta.dimension);
        if bytes.len() != expected {
            return Err(Error::Format {
                path: bin_path,
                message: format!("expected {expected} bytes, found {}", bytes.len()),
            });
        }
        let floats: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let values = floats[..meta.modes].to_vec();
        let vectors = DMatrix::from_column_slice(meta.dimension, meta.modes, &floats[meta.modes..]);
        Ok(Some((values, vectors)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}
