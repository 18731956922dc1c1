//! Univariate polynomials with integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::BigMatrix;

/// Coefficients stored lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - root`
    pub fn linear(root: i64) -> Self {
        Self::from_i64(&[-root, 1])
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficients as `i64`, lowest degree first, if they all fit.
    pub fn to_i64_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Horner evaluation at a square matrix, exact.
    pub fn eval_matrix(&self, m: &BigMatrix) -> BigMatrix {
        let n = m.size();
        let mut acc = BigMatrix::zeros(n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            acc.add_scalar_identity(c);
        }
        acc
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Divides by a monic integer polynomial. Returns `None` unless the
    /// division is exact.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = rational_divmod(&self.to_rational(), &divisor.to_rational());
        if !r.is_empty() {
            return None;
        }
        q.into_iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    /// Greatest common divisor over the rationals, normalised to a primitive
    /// polynomial with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.to_rational();
        let mut b = other.to_rational();
        while !b.is_empty() {
            let (_, r) = rational_divmod(&a, &b);
            a = b;
            b = r;
        }
        primitive_part(&a)
    }

    /// Product of the distinct irreducible factors: `p / gcd(p, p')`.
    pub fn squarefree_part(&self) -> Self {
        if self.degree() == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = rational_divmod(&self.to_rational(), &g.to_rational());
        debug_assert!(r.is_empty());
        primitive_part(&q)
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn rational_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut r);
    trim(&mut b);
    assert!(!b.is_empty(), "polynomial division by zero");
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &factor * c;
        }
        q[shift] = factor;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn primitive_part(v: &[BigRational]) -> IntPoly {
    if v.is_empty() {
        return IntPoly::new(vec![]);
    }
    let denom_lcm = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * &denom_lcm).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let mut out: Vec<BigInt> = ints.into_iter().map(|c| c / &content).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    IntPoly::new(out)
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_i64(&[0, -4, 10, -6, 1]).to_string(), "x^4 - 6x^3 + 10x^2 - 4x");
        assert_eq!(IntPoly::from_i64(&[3, -4, 1]).to_string(), "x^2 - 4x + 3");
        assert_eq!(IntPoly::from_i64(&[]).to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[-1]).to_string(), "-1");
    }

    #[test]
    fn product_of_factors() {
        let p = IntPoly::x().mul(&IntPoly::linear(2)).mul(&IntPoly::from_i64(&[2, -4, 1]));
        assert_eq!(p, IntPoly::from_i64(&[0, -4, 10, -6, 1]));
    }

    #[test]
    fn squarefree_and_gcd() {
        // x (x-2)^2 (x^2-4x+2)^2
        let q = IntPoly::from_i64(&[2, -4, 1]);
        let p = IntPoly::x().mul(&IntPoly::linear(2)).mul(&IntPoly::linear(2)).mul(&q).mul(&q);
        assert_eq!(p.squarefree_part(), IntPoly::from_i64(&[0, -4, 10, -6, 1]));
        assert_eq!(p.gcd(&p.derivative()), IntPoly::linear(2).mul(&q));
        assert_eq!(IntPoly::linear(3).gcd(&IntPoly::linear(1)), IntPoly::one());
    }

    #[test]
    fn exact_division() {
        let p = IntPoly::from_i64(&[0, -4, 10, -6, 1]);
        assert_eq!(p.div_exact(&IntPoly::x()), Some(IntPoly::from_i64(&[-4, 10, -6, 1])));
        assert_eq!(p.div_exact(&IntPoly::linear(4)), None);
    }
}
