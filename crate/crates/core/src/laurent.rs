//! Truncated matrix Laurent series in `z` with explicit precision tracking.
//!
//! A series stores coefficients for exponents `lo, lo+1, ...` and knows every
//! coefficient with exponent `>= known_from`; `known_from = None` marks an exact
//! (finite) expression. Exponents in `[known_from, lo)` are zero.

use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::exactnum::Gq;
use crate::polymat::{MatPoly, Matrix};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Laurent {
    rows: usize,
    cols: usize,
    lo: i64,
    coeffs: Vec<Matrix>,
    known_from: Option<i64>,
}

impl Laurent {
    pub fn new(rows: usize, cols: usize, lo: i64, coeffs: Vec<Matrix>, known_from: Option<i64>) -> Self {
        assert!(coeffs.iter().all(|c| c.shape() == (rows, cols)), "uniform coefficient shapes");
        let mut s = Self { rows, cols, lo, coeffs, known_from };
        s.normalize();
        s
    }

    pub fn zero(rows: usize, cols: usize, known_from: Option<i64>) -> Self {
        Self::new(rows, cols, 0, Vec::new(), known_from)
    }

    pub fn from_poly(p: &MatPoly) -> Self {
        Self::new(p.rows(), p.cols(), 0, p.coeffs().to_vec(), None)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn known_from(&self) -> Option<i64> {
        self.known_from
    }

    fn normalize(&mut self) {
        if let Some(k) = self.known_from {
            if self.lo < k {
                let drop = ((k - self.lo) as usize).min(self.coeffs.len());
                self.coeffs.drain(..drop);
                self.lo = k;
            }
        }
        while self.coeffs.last().is_some_and(Matrix::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.lo += lead as i64;
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of `z^e`, or `None` when `e` lies below the known range.
    pub fn coeff(&self, e: i64) -> Option<Matrix> {
        if self.known_from.is_some_and(|k| e < k) {
            return None;
        }
        let idx = e - self.lo;
        Some(if idx >= 0 && (idx as usize) < self.coeffs.len() {
            self.coeffs[idx as usize].clone()
        } else {
            Matrix::zeros(self.rows, self.cols)
        })
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Forgets all coefficients below `z^e`.
    pub fn truncate_below(&self, e: i64) -> Self {
        let k = self.known_from.map_or(e, |k| k.max(e));
        Self::new(self.rows, self.cols, self.lo, self.coeffs.clone(), Some(k))
    }

    pub fn map(&self, rows: usize, cols: usize, f: impl Fn(&Matrix) -> Matrix) -> Self {
        Self::new(rows, cols, self.lo, self.coeffs.iter().map(f).collect(), self.known_from)
    }

    pub fn scale(&self, s: &Gq) -> Self {
        self.map(self.rows, self.cols, |c| c.scale(s))
    }

    pub fn mul_left(&self, m: &Matrix) -> Self {
        self.map(m.rows(), self.cols, |c| m * c)
    }

    pub fn mul_right(&self, m: &Matrix) -> Self {
        self.map(self.rows, m.cols(), |c| c * m)
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.rows, self.cols, self.lo + k, self.coeffs.clone(), self.known_from.map(|e| e + k))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Gq::from(self.lo + i as i64)))
            .collect();
        Self::new(self.rows, self.cols, self.lo - 1, coeffs, self.known_from.map(|e| e - 1))
    }

    fn combine(&self, rhs: &Self, sign: i64) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "Laurent shape mismatch");
        let known_from = match (self.known_from, rhs.known_from) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let (Some(t1), Some(t2)) = (self.top(), rhs.top()) else {
            let s = if self.is_zero() { rhs.scale(&Gq::from(sign)) } else { self.clone() };
            return Self::new(self.rows, self.cols, s.lo, s.coeffs, known_from);
        };
        let lo = self.lo.min(rhs.lo);
        let hi = t1.max(t2);
        let zero = Matrix::zeros(self.rows, self.cols);
        let at = |s: &Self, e: i64| -> Matrix {
            let idx = e - s.lo;
            if idx >= 0 && (idx as usize) < s.coeffs.len() {
                s.coeffs[idx as usize].clone()
            } else {
                zero.clone()
            }
        };
        let coeffs = (lo..=hi)
            .map(|e| if sign > 0 { at(self, e) + at(rhs, e) } else { at(self, e) - at(rhs, e) })
            .collect();
        Self::new(self.rows, self.cols, lo, coeffs, known_from)
    }

    fn product(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "Laurent shape mismatch");
        let bound = |s: &Self| s.top().unwrap_or_else(|| s.known_from.map_or(i64::MIN / 4, |k| k - 1));
        let known_from = match (self.known_from, rhs.known_from) {
            (None, None) => None,
            (Some(a), None) => Some(a + bound(rhs)),
            (None, Some(b)) => Some(b + bound(self)),
            (Some(a), Some(b)) => Some((a + bound(rhs)).max(b + bound(self))),
        };
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.rows, rhs.cols, known_from);
        }
        let lo = self.lo + rhs.lo;
        let mut coeffs = vec![Matrix::zeros(self.rows, rhs.cols); self.coeffs.len() + rhs.coeffs.len() - 1];
        let first = known_from.map_or(0, |k| (k - lo).max(0) as usize);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= first && !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Self::new(self.rows, rhs.cols, lo, coeffs, known_from)
    }

    /// Nonnegative-exponent part; requires the constant term to be known.
    pub fn poly_part(&self) -> Option<MatPoly> {
        if self.known_from.is_some_and(|k| k > 0) {
            return None;
        }
        let coeffs = (0..=self.top().unwrap_or(-1).max(-1)).map(|e| self.coeff(e).expect("known")).collect();
        Some(MatPoly::new(self.rows, self.cols, coeffs).expect("uniform shapes"))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        self.map(rows, cols, |c| c.block(r0, c0, rows, cols))
    }

    pub fn from_blocks(b11: &Self, b12: &Self, b21: &Self, b22: &Self) -> Self {
        let parts = [b11, b12, b21, b22];
        let known_from = parts.iter().filter_map(|b| b.known_from).max();
        let lo = parts.iter().filter(|b| !b.is_zero()).map(|b| b.lo).min().unwrap_or(0);
        let hi = parts.iter().filter_map(|b| b.top()).max().unwrap_or(lo - 1);
        let get = |b: &Self, e: i64| {
            let idx = e - b.lo;
            if idx >= 0 && (idx as usize) < b.coeffs.len() {
                b.coeffs[idx as usize].clone()
            } else {
                Matrix::zeros(b.rows, b.cols)
            }
        };
        let coeffs = (lo..=hi)
            .map(|e| Matrix::from_blocks(&get(b11, e), &get(b12, e), &get(b21, e), &get(b22, e)))
            .collect();
        Self::new(b11.rows + b21.rows, b11.cols + b12.cols, lo, coeffs, known_from)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": [self.rows, self.cols],
            "lowest_exponent": self.lo,
            "known_from": self.known_from,
            "coeffs": self.coeffs.iter().map(Matrix::to_json).collect::<Vec<_>>(),
        })
    }
}

impl Add<&Laurent> for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        self.combine(rhs, 1)
    }
}

impl Sub<&Laurent> for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        self.combine(rhs, -1)
    }
}

impl Mul<&Laurent> for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        self.product(rhs)
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(self, rhs: Laurent) -> Laurent {
        &self + &rhs
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        &self - &rhs
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        self.scale(&-<Gq as num_traits::One>::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Matrix {
        Matrix::from_ints(&[&[v]])
    }

    /// `1/(z-1) = z^{-1} + z^{-2} + ...`, known down to `z^{-k}`.
    fn geometric(k: i64) -> Laurent {
        Laurent::new(1, 1, -k, (0..k).map(|_| s(1)).collect(), Some(-k))
    }

    #[test]
    fn precision_of_products() {
        let g = geometric(6);
        let zm1 = Laurent::from_poly(&MatPoly::new(1, 1, vec![s(-1), s(1)]).unwrap());
        let one = &zm1 * &g;
        assert_eq!(one.known_from(), Some(-5));
        assert_eq!(one.coeff(0), Some(s(1)));
        assert!((-5..0).all(|e| one.coeff(e) == Some(s(0))));
        assert_eq!(one.coeff(-6), None);

        let sq = &g * &g;
        assert_eq!(sq.known_from(), Some(-7));
        assert_eq!(sq.coeff(-2), Some(s(1)));
        assert_eq!(sq.coeff(-7), Some(s(6)));
    }

    #[test]
    fn derivative_lowers_precision() {
        let d = geometric(4).derivative();
        assert_eq!(d.known_from(), Some(-5));
        assert_eq!(d.coeff(-2), Some(s(-1)));
        assert_eq!(d.coeff(-5), Some(s(-4)));
    }

    #[test]
    fn subtraction_takes_the_coarser_precision() {
        let a = geometric(3);
        let b = geometric(5);
        let d = &a - &b;
        assert_eq!(d.known_from(), Some(-3));
        assert!(d.is_zero());
        assert!(d.poly_part().unwrap().is_zero());
    }

    #[test]
    fn poly_part_requires_constant_term() {
        let a = geometric(3).shift(5);
        assert!(a.poly_part().is_none());
        let b = geometric(3).shift(2);
        let p = b.poly_part().unwrap();
        assert_eq!(p.degree(), Some(1));
    }
}
