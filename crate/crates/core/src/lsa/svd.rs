//! Truncated SVD of a sparse document-term matrix.
//!
//! The Gram matrix on the smaller side is eigendecomposed densely; for the
//! usual LSA shape (fewer documents than terms) right singular vectors are
//! recovered as `Mᵀu / σ`. Components are re-orthonormalized afterwards and
//! directions with numerically zero singular value are completed to an
//! orthonormal set.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::sparse::{SparseMatrix, SparseVec};
use crate::error::{Error, Result};

/// Singular values below `REL_RANK_TOL * σ_max` are treated as zero.
const REL_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdProjector {
    /// `k × V`, orthonormal rows.
    pub components: Array2<f64>,
    /// Non-increasing, length `k`.
    pub singular_values: Vec<f64>,
}

impl SvdProjector {
    pub fn k(&self) -> usize {
        self.components.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.components.ncols()
    }

    /// A projector that maps everything to the empty vector.
    pub fn empty(input_dim: usize) -> Self {
        SvdProjector {
            components: Array2::zeros((0, input_dim)),
            singular_values: Vec::new(),
        }
    }

    pub fn project(&self, row: &SparseVec) -> Array1<f64> {
        let mut out = Array1::zeros(self.k());
        for (&j, &v) in row.indices.iter().zip(&row.values) {
            out.scaled_add(v, &self.components.column(j));
        }
        out
    }

    pub fn project_dense(&self, row: &[f64]) -> Result<Array1<f64>> {
        if row.len() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "row has {} columns, projector expects {}",
                row.len(),
                self.input_dim()
            )));
        }
        Ok(self.components.dot(&Array1::from(row.to_vec())))
    }
}

pub fn fit_svd(matrix: &SparseMatrix, k: usize) -> Result<SvdProjector> {
    let (n, v) = (matrix.nrows(), matrix.ncols);
    if k == 0 || k > n.min(v) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={} for a {n}×{v} matrix",
            n.min(v)
        )));
    }
    let (mut components, singular_values) = if n <= v {
        row_gram_route(matrix, k)
    } else {
        column_gram_route(matrix, k)
    };
    let rank = singular_values.iter().filter(|&&s| s > 0.0).count();
    orthonormalize(&mut components, rank);
    for mut row in components.rows_mut() {
        let pivot = row
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            row.mapv_inplace(|x| -x);
        }
    }
    Ok(SvdProjector {
        components,
        singular_values,
    })
}

/// Eigenpairs sorted by decreasing eigenvalue.
fn sorted_eigen(gram: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(&order);
    (values, vectors)
}

fn singular_from(eigenvalues: &[f64], k: usize) -> Vec<f64> {
    let sigma_max = eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    eigenvalues[..k]
        .iter()
        .map(|&l| {
            let s = l.max(0.0).sqrt();
            if sigma_max > 0.0 && s > REL_RANK_TOL * sigma_max {
                s
            } else {
                0.0
            }
        })
        .collect()
}

fn row_gram_route(m: &SparseMatrix, k: usize) -> (Array2<f64>, Vec<f64>) {
    let n = m.nrows();
    let mut gram = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let d = m.rows[i].dot(&m.rows[j]);
            gram[(i, j)] = d;
            gram[(j, i)] = d;
        }
    }
    let (values, vectors) = sorted_eigen(gram);
    let sigma = singular_from(&values, k);
    let mut comps = Array2::zeros((k, m.ncols));
    for c in 0..k {
        if sigma[c] == 0.0 {
            continue;
        }
        let mut row = comps.row_mut(c);
        for (r, sv) in m.rows.iter().enumerate() {
            let w = vectors[(r, c)] / sigma[c];
            for (&j, &x) in sv.indices.iter().zip(&sv.values) {
                row[j] += w * x;
            }
        }
    }
    (comps, sigma)
}

fn column_gram_route(m: &SparseMatrix, k: usize) -> (Array2<f64>, Vec<f64>) {
    let v = m.ncols;
    let mut gram = DMatrix::zeros(v, v);
    for row in &m.rows {
        for (a, (&i, &x)) in row.indices.iter().zip(&row.values).enumerate() {
            for (&j, &y) in row.indices[..=a].iter().zip(&row.values[..=a]) {
                gram[(i, j)] += x * y;
            }
        }
    }
    gram.fill_upper_triangle_with_lower_triangle();
    let (values, vectors) = sorted_eigen(gram);
    let sigma = singular_from(&values, k);
    let mut comps = Array2::zeros((k, v));
    for c in 0..k {
        if sigma[c] == 0.0 {
            continue;
        }
        for j in 0..v {
            comps[[c, j]] = vectors[(j, c)];
        }
    }
    (comps, sigma)
}

/// Modified Gram-Schmidt (two passes) on the first `rank` rows, then
/// complete the remaining rows from the standard basis.
fn orthonormalize(comps: &mut Array2<f64>, rank: usize) {
    let (k, v) = comps.dim();
    for i in 0..rank {
        for _ in 0..2 {
            for j in 0..i {
                let proj = comps.row(i).dot(&comps.row(j));
                let prev = comps.row(j).to_owned();
                comps.row_mut(i).scaled_add(-proj, &prev);
            }
        }
        let norm = comps.row(i).dot(&comps.row(i)).sqrt();
        comps.row_mut(i).mapv_inplace(|x| x / norm);
    }
    let mut basis = 0;
    let mut filled = rank;
    while filled < k && basis < v {
        let mut cand = Array1::zeros(v);
        cand[basis] = 1.0;
        basis += 1;
        for _ in 0..2 {
            for j in 0..filled {
                let proj = cand.dot(&comps.row(j));
                cand.scaled_add(-proj, &comps.row(j));
            }
        }
        let norm = cand.dot(&cand).sqrt();
        if norm > 0.5 {
            comps.row_mut(filled).assign(&(cand / norm));
            filled += 1;
        }
    }
}
