//! Small dense complex linear algebra.
//!
//! Matrices here are at most a few hundred rows (q^2 x q^2 for the
//! intertwiner solve, d^2 x d^2 for design checks), so a row-major `Vec`
//! with straightforward loops is all that is needed.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, modulus, norm_sqr, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C<T>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// `self^dagger * other` without forming the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_mul shape mismatch");
        let mut out = Self::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i].conj();
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] =
                        out.data[i * other.cols + j] + a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).fold(czero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    /// `tr(self^dagger other)`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(czero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &z| m.max(modulus(z)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max(modulus(a - b)))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&z| norm_sqr(z)).sum::<T>().sqrt()
    }

    /// Entrywise distance of `self^dagger self` from the identity.
    pub fn unitarity_residual(&self) -> T {
        self.adjoint_mul(self)
            .max_abs_diff(&Self::identity(self.cols))
    }

    /// Smallest `max |self - c other|` over unit scalars `c`, together with that `c`.
    pub fn phase_aligned_residual(&self, other: &Self) -> (T, C<T>) {
        let c = crate::scalar::unit_phase(other.inner(self));
        (self.max_abs_diff(&other.scale(c)), c)
    }

    /// Hermitian part `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(half)
        })
    }

    /// Anti-Hermitian part divided by `i`: `(A - A^dagger) / 2i`, Hermitian.
    pub fn skew_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            let d = (self[(i, j)] - self[(j, i)].conj()).scale(half);
            Complex::new(d.im, -d.re)
        })
    }

    pub fn map<U: Real>(&self, f: impl Fn(C<T>) -> C<U>) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Row-major `[re, im]` pairs, the exchange format for matrices.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| [self[(i, j)].re.as_f64(), self[(i, j)].im.as_f64()])
                    .collect()
            })
            .collect()
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

/// `<a|b>`, conjugate-linear in `a`.
#[inline]
pub fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (&x, &y)| acc + x.conj() * y)
}

#[inline]
pub fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|&z| norm_sqr(z)).sum::<T>().sqrt()
}

pub fn normalized<T: Real>(v: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = norm(v);
    if n <= T::epsilon() {
        return Err(Error::ZeroState);
    }
    Ok(v.iter().map(|&z| z.unscale(n)).collect())
}

pub fn kron_vec<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    /// Ascending.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix<T>,
}

/// Cyclic complex Jacobi. Only the Hermitian part of `a` is used.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigen of a non-square matrix");
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm().max(T::min_positive_value());
    let threshold = T::epsilon() * scale * T::lit(1e-2);

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| norm_sqr(m[(i, j)]))
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = modulus(apq);
                if r <= threshold * T::lit(1e-3) {
                    continue;
                }
                let phase = apq.unscale(r); // e^{i phi}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on coordinates (p, q)
                let gqp = -phase.conj().scale(s);
                let gqq = phase.conj().scale(c);
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp.scale(c) + akq * gqp;
                    m[(k, q)] = akp.scale(s) + akq * gqq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk.scale(c) + aqk * gqp.conj();
                    m[(q, k)] = apk.scale(s) + aqk * gqq.conj();
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
                m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp.scale(c) + vkq * gqp;
                    v[(k, q)] = vkp.scale(s) + vkq * gqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .re
            .partial_cmp(&m[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Groups ascending values into runs whose consecutive gaps are at most `tol`.
fn cluster_sorted<T: Real>(values: &[T], tol: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn select_columns<T: Real>(m: &CMatrix<T>, range: std::ops::Range<usize>) -> CMatrix<T> {
    CMatrix::from_fn(m.rows(), range.len(), |i, j| m[(i, range.start + j)])
}

/// One eigenspace of a normal matrix.
#[derive(Clone, Debug)]
pub struct Eigenspace<T: Real> {
    pub value: C<T>,
    /// Orthonormal basis as columns.
    pub basis: CMatrix<T>,
}

impl<T: Real> Eigenspace<T> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }
}

/// Eigenspaces of a normal matrix, found by diagonalizing its Hermitian part
/// and then splitting each degenerate cluster with the skew part.
pub fn normal_eigenspaces<T: Real>(a: &CMatrix<T>, tol: T) -> Vec<Eigenspace<T>> {
    let herm = hermitian_eigen(&a.hermitian_part());
    let skew = a.skew_part();
    let mut out = Vec::new();
    for range in cluster_sorted(&herm.values, tol) {
        let block = select_columns(&herm.vectors, range);
        let pieces = if block.cols() == 1 {
            vec![block]
        } else {
            let restricted = block.adjoint_mul(&skew.matmul(&block));
            let e = hermitian_eigen(&restricted);
            cluster_sorted(&e.values, tol)
                .into_iter()
                .map(|r| block.matmul(&select_columns(&e.vectors, r)))
                .collect()
        };
        for basis in pieces {
            let v = basis.column(0);
            let value = dot(&v, &a.matvec(&v));
            out.push(Eigenspace { value, basis });
        }
    }
    out
}

/// A joint eigenvector of a commuting family, with one eigenvalue per operator.
#[derive(Clone, Debug)]
pub struct JointEigenvector<T: Real> {
    pub vector: Vec<C<T>>,
    pub values: Vec<C<T>>,
}

/// Joint eigenbasis of commuting normal matrices.
///
/// The operator with the most distinct eigenvalues is diagonalized first;
/// the remaining operators, in the given order, split whatever degenerate
/// blocks are left. Fails if a block of dimension > 1 survives.
pub fn joint_eigenbasis<T: Real>(ops: &[CMatrix<T>], tol: T) -> Result<Vec<JointEigenvector<T>>> {
    let n = ops
        .first()
        .map(|m| m.rows())
        .ok_or(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        })?;
    let first = ops
        .iter()
        .enumerate()
        .max_by_key(|(i, m)| (normal_eigenspaces(m, tol).len(), std::cmp::Reverse(*i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let order = std::iter::once(first).chain((0..ops.len()).filter(|&i| i != first));

    let mut blocks = vec![CMatrix::<T>::identity(n)];
    for idx in order {
        let op = &ops[idx];
        let mut next = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.cols() == 1 {
                next.push(b);
                continue;
            }
            let restricted = b.adjoint_mul(&op.matmul(&b));
            for es in normal_eigenspaces(&restricted, tol) {
                next.push(b.matmul(&es.basis));
            }
        }
        blocks = next;
    }
    if let Some(b) = blocks.iter().find(|b| b.cols() > 1) {
        return Err(Error::DegeneracyUnresolved(b.cols()));
    }
    Ok(blocks
        .into_iter()
        .map(|b| {
            let vector = b.column(0);
            let values = ops
                .iter()
                .map(|op| dot(&vector, &op.matvec(&vector)))
                .collect();
            JointEigenvector { vector, values }
        })
        .collect())
}

/// Intersection of the column spans of two orthonormal bases. Directions
/// whose principal-angle cosine squared is within `cutoff` of 1 are kept.
pub fn intersect_subspaces<T: Real>(
    v: &CMatrix<T>,
    e: &CMatrix<T>,
    cutoff: T,
) -> Option<CMatrix<T>> {
    let x = e.adjoint_mul(v); // m x k
    let gram = x.adjoint_mul(&x); // k x k, eigenvalues cos^2 of principal angles
    let eig = hermitian_eigen(&gram);
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| T::one() - eig.values[i] <= cutoff)
        .collect();
    if keep.is_empty() {
        return None;
    }
    let y = CMatrix::from_fn(eig.vectors.rows(), keep.len(), |i, j| {
        eig.vectors[(i, keep[j])]
    });
    Some(v.matmul(&y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        Complex::new(re, im)
    }

    fn test_hermitian(n: usize, seed: u64) -> CMatrix<f64> {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(n, n, |_, _| c(next(), next()));
        a.hermitian_part()
    }

    #[test]
    fn jacobi_diagonalizes() {
        for n in [1, 2, 3, 5, 9, 16] {
            let h = test_hermitian(n, n as u64);
            let e = hermitian_eigen(&h);
            assert!(e.vectors.unitarity_residual() < 1e-12);
            for j in 0..n {
                let v = e.vectors.column(j);
                let hv = h.matvec(&v);
                for i in 0..n {
                    assert!((hv[i] - v[i] * e.values[j]).norm() < 1e-12);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // diag(1, 1, -1) conjugated by a fixed unitary
        let h = test_hermitian(3, 7);
        let u = hermitian_eigen(&h).vectors;
        let d = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(if i < 2 { 1.0 } else { -1.0 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let a = u.matmul(&d).matmul(&u.adjoint());
        let spaces = normal_eigenspaces(&a, 1e-8);
        let mut dims: Vec<_> = spaces.iter().map(|s| s.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
    }

    #[test]
    fn unitary_with_conjugate_eigenvalues_splits() {
        // diag(i, -i) has a degenerate Hermitian part
        let u = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                if i == 0 {
                    c(0.0, 1.0)
                } else {
                    c(0.0, -1.0)
                }
            } else {
                c(0.0, 0.0)
            }
        });
        let spaces = normal_eigenspaces(&u, 1e-8);
        assert_eq!(spaces.len(), 2);
        let mut vals: Vec<_> = spaces.iter().map(|s| s.value.im.round() as i32).collect();
        vals.sort();
        assert_eq!(vals, vec![-1, 1]);
    }

    #[test]
    fn intersection_of_planes() {
        let e1 = CMatrix::from_columns(
            3,
            &[
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            ],
        );
        let s = 0.5f64.sqrt();
        let e2 = CMatrix::from_columns(
            3,
            &[
                vec![c(0.0, 0.0), c(s, 0.0), c(s, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            ],
        );
        let inter = intersect_subspaces(&e1, &e2, 1e-8).unwrap();
        assert_eq!(inter.cols(), 1);
        assert!((inter[(0, 0)].norm() - 1.0).abs() < 1e-12);
        let e3 = CMatrix::from_columns(3, &[vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(intersect_subspaces(&e1, &e3, 1e-8).is_none());
    }

    #[test]
    fn matmul_and_adjoint_mul_agree() {
        let a = test_hermitian(4, 3);
        let b = test_hermitian(4, 5);
        assert!(a.adjoint().matmul(&b).max_abs_diff(&a.adjoint_mul(&b)) < 1e-15);
        assert!((a.inner(&b) - a.adjoint().matmul(&b).trace()).norm() < 1e-14);
    }

    #[test]
    fn single_precision_jacobi() {
        let h: CMatrix<f32> = test_hermitian(5, 11).map(|z| Complex::new(z.re as f32, z.im as f32));
        let e = hermitian_eigen(&h);
        assert!(e.vectors.unitarity_residual() < 1e-5);
    }
}
