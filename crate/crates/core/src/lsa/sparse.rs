/// A sparse row with strictly increasing column indices.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVec {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    /// Build from unsorted `(index, value)` pairs, summing duplicates and
    /// dropping explicit zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut out = SparseVec::default();
        for (i, v) in pairs {
            if out.indices.last() == Some(&i) {
                *out.values.last_mut().unwrap() += v;
            } else {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        let keep: Vec<bool> = out.values.iter().map(|&v| v != 0.0).collect();
        if keep.iter().all(|&k| k) {
            return out;
        }
        let (indices, values) = out
            .indices
            .into_iter()
            .zip(out.values)
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(p, _)| p)
            .unzip();
        SparseVec { indices, values }
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let (indices, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .unzip();
        SparseVec { indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Row-major sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: Vec<SparseVec>,
    pub ncols: usize,
}

impl SparseMatrix {
    pub fn new(rows: Vec<SparseVec>, ncols: usize) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.indices.last().is_none_or(|&i| i < ncols)));
        SparseMatrix { rows, ncols }
    }

    pub fn from_dense(m: &ndarray::Array2<f64>) -> Self {
        let rows = m
            .rows()
            .into_iter()
            .map(|r| SparseVec::from_dense(&r.to_vec()))
            .collect();
        SparseMatrix::new(rows, m.ncols())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }
}
