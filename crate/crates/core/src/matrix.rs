//! Dense matrices over an exact field, with the Gaussian-elimination kernel
//! every other module relies on. Elimination skips zero entries and picks
//! sparse pivot rows, which keeps the structure-constant systems cheap.

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        let z = field.zero();
        Matrix {
            rows,
            cols,
            field,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field.clone(), n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for s in row {
                assert_eq!(s.field(), field, "entry field differs from matrix field");
                data.push(s);
            }
        }
        Matrix {
            rows: r,
            cols: c,
            field,
            data,
        }
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    /// Parses a matrix of `i64` literals; test plumbing.
    pub fn from_i64(field: &Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Matrix::from_fn(field.clone(), r, c, |i, j| field.from_i64(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        debug_assert_eq!(v.field(), self.field);
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if i == j {
                    if !e.is_one() {
                        return false;
                    }
                } else if !e.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            data,
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            data,
        }
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field.clone(),
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = Matrix::zero(self.field.clone(), self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        let mut out = vec![self.field.zero(); self.rows];
        for (k, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..self.rows {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                out[i] = out[i].add(&a.mul(x));
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    /// Kronecker product with the first factor major:
    /// `out[(i*b.rows+k), (j*b.cols+l)] = a[i,j] * b[k,l]`.
    pub fn kronecker(&self, b: &Matrix) -> Matrix {
        let mut out = Matrix::zero(self.field.clone(), self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        let v = b.get(k, l);
                        if v.is_zero() {
                            continue;
                        }
                        out.set(i * b.rows + k, j * b.cols + l, a.mul(v));
                    }
                }
            }
        }
        out
    }

    pub fn submatrix(&self, row0: usize, rows: usize, col0: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.field.clone(), rows, cols, |i, j| {
            self.get(row0 + i, col0 + j).clone()
        })
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row0 + i, col0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zero(
            self.field.clone(),
            self.rows + other.rows,
            self.cols + other.cols,
        );
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.to_row_vecs();
        rref_in_place(&mut rows).len()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(2 * n);
            for j in 0..n {
                row.push(self.get(i, j).clone());
            }
            for j in 0..n {
                row.push(if i == j { self.field.one() } else { self.field.zero() });
            }
            rows.push(row);
        }
        let pivots = rref_in_place(&mut rows);
        let rank = pivots.iter().filter(|&&c| c < n).count();
        if rank < n {
            return Err(Error::SingularMatrix { rank, dim: n });
        }
        let mut out = Matrix::zero(self.field.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, rows[i][n + j].clone());
            }
        }
        Ok(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn to_row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Reshape a row-major entry vector into a `rows x cols` matrix.
    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        Matrix {
            rows,
            cols,
            field,
            data,
        }
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    /// Basis of the right kernel, as column coordinate vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut rows = self.to_row_vecs();
        let pivots = rref_in_place(&mut rows);
        kernel_from_rref(&rows, &pivots, self.cols, &self.field)
    }
}

/// Solution of `coeffs * x = rhs`: one particular solution plus a basis of
/// the homogeneous kernel.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
    pub rank: usize,
}

/// Exact solve of the affine system `coeffs * x = rhs`.
pub fn solve_affine(coeffs: &Matrix, rhs: &[Scalar]) -> Result<AffineSolution> {
    if coeffs.rows() != rhs.len() {
        return Err(Error::ShapeMismatch(format!(
            "coeffs has {} rows but rhs has {} entries",
            coeffs.rows(),
            rhs.len()
        )));
    }
    let n = coeffs.cols();
    let field = coeffs.field().clone();
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(coeffs.rows());
    for i in 0..coeffs.rows() {
        let mut row = coeffs.row(i);
        row.push(rhs[i].clone());
        rows.push(row);
    }
    let pivots = rref_in_place(&mut rows);
    let rank_augmented = pivots.len();
    let rank_coeffs = pivots.iter().filter(|&&c| c < n).count();
    if rank_augmented > rank_coeffs {
        return Err(Error::Infeasible {
            rank_coeffs,
            rank_augmented,
        });
    }
    let mut particular = vec![field.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rows[r][n].clone();
    }
    let coeff_rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let kernel = kernel_from_rref(&coeff_rows, &pivots, n, &field);
    Ok(AffineSolution {
        particular,
        kernel,
        rank: rank_coeffs,
    })
}

/// In-place reduced row echelon form. Returns the pivot columns in order.
/// Pivot rows are chosen by minimal support (tracked incrementally) to limit
/// fill-in on the sparse structure-constant systems this crate produces.
pub fn rref_in_place(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return vec![];
    }
    let ncols = rows[0].len();
    let mut nnz: Vec<usize> = rows
        .iter()
        .map(|r| r.iter().filter(|e| !e.is_zero()).count())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        // Choose the sparsest candidate row with a nonzero entry in `col`.
        let mut best: Option<(usize, usize)> = None;
        for r in rank..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            match best {
                Some((_, bn)) if bn <= nnz[r] => {}
                _ => best = Some((r, nnz[r])),
            }
        }
        let Some((r, _)) = best else { continue };
        rows.swap(rank, r);
        nnz.swap(rank, r);
        // Normalize the pivot row.
        let pivot = rows[rank][col].clone();
        if !pivot.is_one() {
            let inv = pivot.inv().expect("pivot is nonzero");
            for e in rows[rank].iter_mut() {
                if !e.is_zero() {
                    *e = e.mul(&inv);
                }
            }
        }
        // Collect the support of the pivot row once.
        let support: Vec<(usize, Scalar)> = rows[rank]
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(j, e)| (j, e.clone()))
            .collect();
        for r2 in 0..nrows {
            if r2 == rank || rows[r2][col].is_zero() {
                continue;
            }
            let factor = rows[r2][col].clone();
            let mut delta: isize = 0;
            for (j, e) in &support {
                let was_zero = rows[r2][*j].is_zero();
                let t = factor.mul(e);
                let new = rows[r2][*j].sub(&t);
                match (was_zero, new.is_zero()) {
                    (true, false) => delta += 1,
                    (false, true) => delta -= 1,
                    _ => {}
                }
                rows[r2][*j] = new;
            }
            nnz[r2] = (nnz[r2] as isize + delta) as usize;
        }
        pivots.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    pivots
}

fn kernel_from_rref(rows: &[Vec<Scalar>], pivots: &[usize], ncols: usize, field: &Field) -> Vec<Vec<Scalar>> {
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = rows[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

pub fn random_int_scalar<R: Rng>(field: &Field, bound: i64, rng: &mut R) -> Scalar {
    if bound <= 0 {
        return field.zero();
    }
    field.from_i64(rng.gen_range(-bound..=bound))
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&Scalar>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        let rows: Vec<Vec<Scalar>> = Vec::deserialize(d)?;
        let field = rows
            .first()
            .and_then(|r| r.first())
            .map(|s| s.field())
            .ok_or_else(|| D::Error::custom("cannot deserialize an empty matrix"))?;
        let mat = Matrix::from_rows(field, rows);
        Ok(mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn inverse_identity() {
        let id = Matrix::identity(q(), 3);
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn inverse_unipotent() {
        let m = Matrix::from_i64(&q(), &[&[1, 1], &[0, 1]]);
        let expected = Matrix::from_i64(&q(), &[&[1, -1], &[0, 1]]);
        assert_eq!(m.inverse().unwrap(), expected);
    }

    #[test]
    fn inverse_singular() {
        let m = Matrix::from_i64(&q(), &[&[1, 1], &[1, 1]]);
        assert_eq!(
            m.inverse().unwrap_err(),
            Error::SingularMatrix { rank: 1, dim: 2 }
        );
    }

    #[test]
    fn solve_affine_identity() {
        let id = Matrix::identity(q(), 2);
        let rhs = vec![q().from_i64(1), q().from_i64(2)];
        let sol = solve_affine(&id, &rhs).unwrap();
        assert_eq!(sol.particular, rhs);
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn solve_affine_zero_matrix() {
        let z = Matrix::zero(q(), 2, 2);
        let rhs = vec![q().zero(), q().zero()];
        let sol = solve_affine(&z, &rhs).unwrap();
        assert!(sol.particular.iter().all(Scalar::is_zero));
        assert_eq!(sol.kernel.len(), 2);

        let bad = vec![q().one(), q().zero()];
        match solve_affine(&z, &bad) {
            Err(Error::Infeasible {
                rank_coeffs: 0,
                rank_augmented: 1,
            }) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn kronecker_examples() {
        let id2 = Matrix::identity(q(), 2);
        let id3 = Matrix::identity(q(), 3);
        assert_eq!(id2.kronecker(&id3), Matrix::identity(q(), 6));

        let n = Matrix::from_i64(&q(), &[&[0, 1], &[0, 0]]);
        assert_eq!(n.kronecker(&Matrix::identity(q(), 1)), n);

        let a = Matrix::from_i64(&q(), &[&[2]]);
        let b = Matrix::from_i64(&q(), &[&[3]]);
        assert_eq!(a.kronecker(&b), Matrix::from_i64(&q(), &[&[6]]));
    }

    #[test]
    fn kernel_dims() {
        // x + y + z = 0 has a 2-dimensional kernel.
        let m = Matrix::from_i64(&q(), &[&[1, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn prime_field_solve() {
        let f2 = Field::prime(2).unwrap();
        let m = Matrix::from_i64(&f2, &[&[1, 1], &[1, 0]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
    }
}
