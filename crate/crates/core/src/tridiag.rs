//! Symmetric tridiagonal matrices and their LDLᵀ factorization.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> SymTridiag<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch {
                expected: diag.len().saturating_sub(1),
                got: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> T {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        let n = self.diag.len();
        debug_assert!(x.len() == n && y.len() == n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// xᵀ A y.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        x.iter().zip(self.mul_vec(y)).map(|(&a, b)| a * b).sum()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        Self {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
            off: self
                .off
                .iter()
                .zip(&other.off)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        }
    }

    /// Principal submatrix with the first row and column removed.
    pub fn drop_first(&self) -> Self {
        Self {
            diag: self.diag[1..].to_vec(),
            off: self.off.get(1..).map(<[T]>::to_vec).unwrap_or_default(),
        }
    }

    /// LDLᵀ factorization; fails unless every pivot is positive.
    pub fn factor(&self) -> Result<SpdFactor<T>> {
        let n = self.diag.len();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        let mut pivot = self.diag[0];
        for i in 0..n {
            if i > 0 {
                let li = self.off[i - 1] / d[i - 1];
                pivot = self.diag[i] - li * self.off[i - 1];
                l.push(li);
            }
            if !(pivot > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    row: i,
                    pivot: pivot.as_f64(),
                });
            }
            d.push(pivot);
        }
        Ok(SpdFactor { d, l })
    }
}

/// LDLᵀ factors of a symmetric positive definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor<T> {
    d: Vec<T>,
    l: Vec<T>,
}

impl<T: Real> SpdFactor<T> {
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 1..n {
            let prev = b[i - 1];
            b[i] -= self.l[i - 1] * prev;
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let next = b[i + 1];
            b[i] -= self.l[i] * next;
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
