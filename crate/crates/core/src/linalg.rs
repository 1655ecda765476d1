//! Small dense complex matrices.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T: Real> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Permutation matrix with a 1 at `(image(x), x)` for every column `x`.
    pub fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim);
        for x in 0..dim {
            m[(image(x), x)] = Complex::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    /// Kronecker product `self ⊗ other`; `other` occupies the low index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| self[(r / b, c / b)] * other[(r % b, c % b)])
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (0..self.dim).all(|r| (r..self.dim).all(|c| (self[(r, c)] - self[(c, r)].conj()).norm() <= tol))
    }

    /// Whether `self * self == self` within `tol`, elementwise.
    pub fn is_idempotent(&self, tol: T) -> bool {
        (self * self).approx_eq(self, tol)
    }

    /// Whether `self` and `other` commute within `tol`, elementwise.
    pub fn commutes_with(&self, other: &Self, tol: T) -> bool {
        (self * other).approx_eq(&(other * self), tol)
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.dim + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.dim + c]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }
}

/// Applies a `2^k × 2^k` operator to the qubits `targets` of a flat amplitude
/// array. `targets[0]` is the least-significant bit of the operator's local index.
pub(crate) fn apply_local<T: Real>(amps: &mut [Complex<T>], targets: &[usize], op: &CMatrix<T>) {
    let local_dim = 1usize << targets.len();
    debug_assert_eq!(op.dim(), local_dim);
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(b, _)| (l >> b) & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let mut buf = vec![Complex::zero(); local_dim];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &op.as_slice()[r * local_dim..(r + 1) * local_dim];
            amps[base + off] = row.iter().zip(&buf).fold(Complex::zero(), |acc, (&m, &v)| acc + m * v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_places_right_factor_in_low_bits() {
        let x = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let i = CMatrix::<f64>::identity(2);
        // X on the high qubit flips bit 1: |00> -> |10>
        let xi = x.kron(&i);
        assert_eq!(xi[(2, 0)], Complex::one());
        let ix = i.kron(&x);
        assert_eq!(ix[(1, 0)], Complex::one());
    }

    #[test]
    fn apply_local_matches_kron_on_two_qubits() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let had = CMatrix::<f64>::from_real_rows(&[&[h, h], &[h, -h]]);
        let mut amps = vec![Complex::new(1.0, 0.0), Complex::zero(), Complex::zero(), Complex::zero()];
        apply_local(&mut amps, &[1], &had);
        // qubit 1 is bit 1: |00> -> (|00> + |10>)/sqrt2, indices 0 and 2
        assert!((amps[0].re - h).abs() < 1e-15);
        assert!((amps[2].re - h).abs() < 1e-15);
        assert!(amps[1].norm() < 1e-15 && amps[3].norm() < 1e-15);
    }

    #[test]
    fn hermitian_and_idempotent_checks() {
        let p = CMatrix::<f64>::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(p.is_hermitian(1e-12));
        assert!(p.is_idempotent(1e-12));
        let not = CMatrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(!not.is_hermitian(1e-12));
        assert!(!not.is_idempotent(1e-12));
    }
}
