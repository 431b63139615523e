use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::{check_minor_sets, StructError};
use crate::arith::Rational;
use crate::matrix::Matrix;

/// Sparse matrix given by its nonzero entries, whose row/column bipartite
/// graph must be a forest.
#[derive(Clone, Debug, PartialEq)]
pub struct AcyclicMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl AcyclicMatrix {
    pub fn new(rows: usize, cols: usize, edges: &[(usize, usize, Rational)]) -> Result<Self, StructError> {
        let mut entries = BTreeMap::new();
        let mut parent: Vec<usize> = (0..rows + cols).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (i, j, v) in edges {
            if *i >= rows || *j >= cols {
                return Err(StructError::BadIndexSet(format!("entry ({i}, {j}) out of range")));
            }
            if v.is_zero() {
                continue;
            }
            if entries.insert((*i, *j), v.clone()).is_some() {
                return Err(StructError::BadIndexSet(format!("entry ({i}, {j}) given twice")));
            }
            let (a, b) = (find(&mut parent, *i), find(&mut parent, rows + *j));
            if a == b {
                return Err(StructError::NotAcyclic);
            }
            parent[a] = b;
        }
        Ok(AcyclicMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.entries.iter()
    }

    pub fn to_matrix(&self) -> Matrix<Rational> {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
        })
    }

    /// Minor on zero-based row and column sets. In a forest the perfect
    /// matching is unique if it exists, so the determinant has at most one
    /// nonzero term; it is found by repeatedly matching a degree-one vertex
    /// with its only neighbour.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Rational, StructError> {
        let (rows, cols) = check_minor_sets(rows, cols, self.rows, self.cols)?;
        let k = rows.len();
        // vertices 0..k are rows, k..2k columns (positions within the minor)
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); 2 * k];
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                if self.entries.contains_key(&(r, c)) {
                    adj[a].insert(k + b);
                    adj[k + b].insert(a);
                }
            }
        }
        let mut matched_col = vec![usize::MAX; k];
        let mut alive = vec![true; 2 * k];
        let mut remaining = 2 * k;
        while remaining > 0 {
            let v = (0..2 * k)
                .find(|&v| alive[v] && adj[v].len() <= 1)
                .expect("a forest always has a leaf");
            let Some(&w) = adj[v].iter().next() else {
                return Ok(Rational::zero());
            };
            let (r, c) = if v < k { (v, w - k) } else { (w, v - k) };
            matched_col[r] = c;
            for x in [v, w] {
                alive[x] = false;
                let nb: Vec<usize> = adj[x].iter().copied().collect();
                for y in nb {
                    adj[y].remove(&x);
                }
                adj[x].clear();
            }
            remaining -= 2;
        }
        let mut val = Rational::one();
        for (a, &b) in matched_col.iter().enumerate() {
            val *= &self.entries[&(rows[a], cols[b])];
        }
        if crate::matrix::perm_sign(&matched_col) < 0 {
            val = -val;
        }
        Ok(val)
    }
}

/// Convenience form of [`AcyclicMatrix::minor`] taking the edge list.
pub fn acyclic_minor(
    rows: usize,
    cols: usize,
    edges: &[(usize, usize, Rational)],
    minor_rows: &[usize],
    minor_cols: &[usize],
) -> Result<Rational, StructError> {
    AcyclicMatrix::new(rows, cols, edges)?.minor(minor_rows, minor_cols)
}
