//! Small dense integer matrices with checked arithmetic.
//!
//! Entries are `i64`; every product and sum is overflow-checked. Determinants
//! and characteristic polynomials are computed over `BigInt` so that they are
//! exact regardless of entry growth.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    size: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(size: usize) -> Self {
        IntMatrix { size, data: vec![0; size * size] }
    }

    pub fn identity(size: usize) -> Self {
        Self::scalar(size, 1)
    }

    pub fn scalar(size: usize, value: i64) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = value;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntMatrix { size, data })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        IntMatrix { size, data }
    }

    pub fn block_diag(blocks: &[IntMatrix]) -> Self {
        let size = blocks.iter().map(|b| b.size).sum();
        let mut out = Self::zeros(size);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.size {
                for j in 0..b.size {
                    out.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.size;
        }
        out
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.size + j] = value;
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.size.max(1)).take(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    /// First negative entry in row-major order.
    pub fn first_negative(&self) -> Option<(usize, usize, i64)> {
        self.data
            .iter()
            .position(|&x| x < 0)
            .map(|p| (p / self.size, p % self.size, self.data[p]))
    }

    pub fn trace(&self) -> i64 {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.size, |i, j| self.get(j, i))
    }

    /// `P M P^{-1}` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::Shape(format!("{} vs {}", self.size, other.size)));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(*b).ok_or_else(|| Error::Overflow("adding matrices".into())))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { size: self.size, data })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_sub(*b).ok_or_else(|| Error::Overflow("subtracting matrices".into())))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { size: self.size, data })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = a
                        .checked_mul(other.get(k, j))
                        .and_then(|p| p.checked_add(out.get(i, j)))
                        .ok_or_else(|| Error::Overflow("multiplying matrices".into()))?;
                    out.set(i, j, prod);
                }
            }
        }
        Ok(out)
    }

    pub fn checked_scale(&self, c: i64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|a| a.checked_mul(c).ok_or_else(|| Error::Overflow("scaling matrix".into())))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { size: self.size, data })
    }

    pub fn checked_pow(&self, mut e: u32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::identity(self.size);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn to_big(&self) -> BigMatrix {
        BigMatrix {
            size: self.size,
            data: self.data.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j) as f64)
    }

    pub fn determinant(&self) -> BigInt {
        self.to_big().determinant()
    }

    pub fn char_poly(&self) -> IntPoly {
        self.to_big().char_poly()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.data.iter().map(|x| x.to_string().len()).max().unwrap_or(1);
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(deserializer)?;
        IntMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Dense square matrix over arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMatrix {
    size: usize,
    data: Vec<BigInt>,
}

impl BigMatrix {
    pub fn zeros(size: usize) -> Self {
        BigMatrix { size, data: vec![BigInt::zero(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                data.push(f(i, j));
            }
        }
        BigMatrix { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.size + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.size + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a * other.get(k, j);
                    *out.get_mut(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn add_scalar_identity(&mut self, c: &BigInt) {
        for i in 0..self.size {
            *self.get_mut(i, i) += c;
        }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.size).map(|i| self.get(i, i).clone()).sum()
    }

    /// Fraction-free Gaussian elimination (Bareiss). Every division is exact.
    pub fn determinant(&self) -> BigInt {
        let n = self.size;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.data.clone();
        let at = |i: usize, j: usize| i * n + j;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[at(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[at(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    m.swap(at(k, j), at(p, j));
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[at(i, j)] * &m[at(k, k)] - &m[at(i, k)] * &m[at(k, j)];
                    m[at(i, j)] = v / &prev;
                }
            }
            prev = m[at(k, k)].clone();
        }
        sign * &m[at(n - 1, n - 1)]
    }

    /// Characteristic polynomial `det(xI - M)` by Faddeev-LeVerrier.
    ///
    /// `c_{n-k} = -tr(M M_k) / k` with `M_1 = I`, `M_{k+1} = M M_k + c_{n-k} I`;
    /// the division by `k` is exact over the integers.
    pub fn char_poly(&self) -> IntPoly {
        let n = self.size;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut mk = BigMatrix::identity(n);
        for k in 1..=n {
            let am = self.mul(&mk);
            let c = -am.trace() / BigInt::from(k);
            debug_assert!((am.trace() + &c * BigInt::from(k)).is_zero());
            coeffs[n - k] = c.clone();
            mk = am;
            mk.add_scalar_identity(&c);
        }
        IntPoly::new(coeffs)
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}
