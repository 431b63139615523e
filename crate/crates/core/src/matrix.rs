//! Small dense row-major matrices and the LDU factor container.

use std::ops::{Index, IndexMut};

use crate::arith::{Field, FloatCtx, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, ctx: &FloatCtx) -> Self {
        let z = T::zero_in(ctx);
        Matrix::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity(n: usize, ctx: &FloatCtx) -> Self {
        let (z, o) = (T::zero_in(ctx), T::one_in(ctx));
        Matrix::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn from_rational(m: &Matrix<Rational>, ctx: &FloatCtx) -> Self {
        m.map(|r| T::from_rational(r, ctx))
    }

    pub fn to_rational(&self) -> Matrix<Rational> {
        self.map(Field::to_rational)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Field::approx_f64)
    }

    /// Plain triple-loop product.
    pub fn matmul(&self, other: &Matrix<T>, ctx: &FloatCtx) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let z = T::zero_in(ctx);
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(z.clone(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        })
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[T]) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * d[j].clone())
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[T]) -> Matrix<T> {
        Matrix::from_fn(self.rows, self.cols, |i, j| d[i].clone() * self[(i, j)].clone())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

/// `A[row_perm[i], col_perm[j]] = (L * diag(d) * U)[i, j]` with `L` unit lower
/// trapezoidal (`n x rank`) and `U` unit upper trapezoidal (`rank x m`).
#[derive(Clone, Debug, PartialEq)]
pub struct Ldu<T> {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub l: Matrix<T>,
    pub d: Vec<T>,
    pub u: Matrix<T>,
    pub rank: usize,
}

impl<T: Field> Ldu<T> {
    /// Multiplies the factors back and undoes the permutations.
    pub fn assemble(&self, ctx: &FloatCtx) -> Matrix<T> {
        let ld = self.l.scale_cols(&self.d);
        let p = ld.matmul(&self.u, ctx);
        let mut out = Matrix::zeros(p.rows(), p.cols(), ctx);
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                out[(self.row_perm[i], self.col_perm[j])] = p[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant of a full-rank square factorisation, including the
    /// permutation signs.
    pub fn det(&self, ctx: &FloatCtx) -> T {
        if self.rank < self.l.rows() {
            return T::zero_in(ctx);
        }
        let prod = self.d.iter().fold(T::one_in(ctx), |a, b| a * b.clone());
        if perm_sign(&self.row_perm) * perm_sign(&self.col_perm) < 0 {
            -prod
        } else {
            prod
        }
    }
}

impl Ldu<Rational> {
    /// Rounds every factor entry to `T`; the permutations are kept.
    pub fn convert<T: Field>(&self, ctx: &FloatCtx) -> Ldu<T> {
        Ldu {
            row_perm: self.row_perm.clone(),
            col_perm: self.col_perm.clone(),
            l: Matrix::from_rational(&self.l, ctx),
            d: self.d.iter().map(|x| T::from_rational(x, ctx)).collect(),
            u: Matrix::from_rational(&self.u, ctx),
            rank: self.rank,
        }
    }
}

/// Sign of a permutation given as an index list.
pub fn perm_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
