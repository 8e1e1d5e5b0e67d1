//! Minimal sparse symmetric matrix support: CSR storage with deterministic
//! triplet assembly, plus a conjugate-gradient solver for SPD systems.

/// Symmetric sparse matrix in CSR form. Both triangles are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCsr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricCsr {
    /// Assemble from triplets. The sparsity pattern is the union of all
    /// `(row, col)` pairs; duplicate entries accumulate in the order given,
    /// so assembly is bitwise deterministic for a fixed triplet sequence.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> SymmetricCsr {
        let mut cols_per_row: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(r, c, _) in triplets {
            cols_per_row[r].push(c);
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for cols in cols_per_row.iter_mut() {
            cols.sort_unstable();
            cols.dedup();
            col_idx.extend_from_slice(cols);
            row_ptr.push(col_idx.len());
        }
        let mut values = vec![0.0; col_idx.len()];
        for &(r, c, v) in triplets {
            let lo = row_ptr[r];
            let hi = row_ptr[r + 1];
            let pos = lo + col_idx[lo..hi].binary_search(&c).expect("column present");
            values[pos] += v;
        }
        SymmetricCsr {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entry `(i, j)`, zero when outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(pos) => self.values[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// Columns and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Iterate all stored entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[i] = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// Largest absolute stored entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Restrict to the principal submatrix on `keep` (ascending indices).
    pub fn restrict(&self, keep: &[usize]) -> SymmetricCsr {
        let mut to_new = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            to_new[old] = new;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &old in keep {
            let (cols, vals) = self.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                if to_new[c] != usize::MAX {
                    col_idx.push(to_new[c]);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SymmetricCsr {
            n: keep.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Coordinate-format text dump (`row col value` per line) for debugging.
    pub fn to_coordinate_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (i, j, v) in self.entries() {
            let _ = writeln!(out, "{i} {j} {v}");
        }
        out
    }
}

/// Result of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain conjugate gradient for SPD `a`, zero start vector. Stops when the
/// residual norm drops below `rel_tol` times the right-hand-side norm.
pub fn conjugate_gradient(
    a: &SymmetricCsr,
    b: &[f64],
    rel_tol: f64,
    max_iterations: usize,
) -> CgSolution {
    let n = a.n();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        };
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = rel_tol * b_norm;
    let mut iterations = 0;
    while iterations < max_iterations && rr.sqrt() > target {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // not SPD (or exact kernel); give up with current iterate
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        iterations += 1;
    }
    CgSolution {
        x,
        iterations,
        relative_residual: rr.sqrt() / b_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SymmetricCsr {
        let mut triplets = Vec::new();
        for i in 0..n {
            triplets.push((i, i, 2.0));
            if i + 1 < n {
                triplets.push((i, i + 1, -1.0));
                triplets.push((i + 1, i, -1.0));
            }
        }
        SymmetricCsr::from_triplets(n, &triplets)
    }

    #[test]
    fn triplets_accumulate() {
        let m = SymmetricCsr::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 3.0)]);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 1), 3.0);
        assert_eq!(m.nnz(), 4);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = laplacian_1d(5);
        let x = [1.0, -2.0, 3.0, 0.5, 0.0];
        let y = m.matvec(&x);
        assert_eq!(y[0], 2.0 * 1.0 - (-2.0));
        assert_eq!(y[2], -(-2.0) + 2.0 * 3.0 - 0.5);
    }

    #[test]
    fn cg_solves_spd_system() {
        let m = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let sol = conjugate_gradient(&m, &b, 1e-13, 1000);
        let r = m.matvec(&sol.x);
        let err: f64 = r
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10, "residual {err}");
    }

    #[test]
    fn cg_zero_rhs_returns_zero() {
        let m = laplacian_1d(4);
        let sol = conjugate_gradient(&m, &[0.0; 4], 1e-12, 100);
        assert!(sol.x.iter().all(|&v| v == 0.0));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn restrict_keeps_selected_rows() {
        let m = laplacian_1d(5);
        let r = m.restrict(&[1, 2, 3]);
        assert_eq!(r.n(), 3);
        assert_eq!(r.get(0, 0), 2.0);
        assert_eq!(r.get(0, 1), -1.0);
        assert_eq!(r.get(0, 2), 0.0);
    }

    #[test]
    fn coordinate_dump_has_all_entries() {
        let m = laplacian_1d(3);
        let text = m.to_coordinate_text();
        assert_eq!(text.lines().count(), m.nnz());
        assert!(text.contains("0 1 -1"));
    }
}
