//! Dense matrices and matrix polynomials over Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::Gq;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gq>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Gq::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Gq::one() } else { Gq::zero() })
    }

    pub fn scalar(n: usize, s: Gq) -> Self {
        Self::identity(n).scale(&s)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Gq) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse { line: 0, col: 0, msg: "ragged matrix rows".into() });
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer-ratio literal, e.g. `Matrix::from_ratios(&[&[(1, 2), (0, 1)], ...])`.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        let v = rows
            .iter()
            .map(|row| row.iter().map(|&(p, q)| Gq::ratio(p, q)).collect())
            .collect();
        Self::from_rows(v).expect("rectangular literal")
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let v = rows.iter().map(|row| row.iter().map(|&p| Gq::from(p)).collect()).collect();
        Self::from_rows(v).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Gq {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Gq) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Gq> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(Gq::is_real)
    }

    pub fn height(&self) -> u64 {
        self.data.iter().map(Gq::height).max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Gq) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    fn zip(&self, rhs: &Self, op: &'static str, f: impl Fn(&Gq, &Gq) -> Gq) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape { op, lhs: self.shape(), rhs: rhs.shape() });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, "sub", |a, b| a - b)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape { op: "mul", lhs: self.shape(), rhs: rhs.shape() });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self * rhs - rhs * self
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn from_blocks(b11: &Self, b12: &Self, b21: &Self, b22: &Self) -> Self {
        let (r1, c1) = b11.shape();
        let (r, c) = (r1 + b21.rows, c1 + b12.cols);
        Self::from_fn(r, c, |i, j| match (i < r1, j < c1) {
            (true, true) => b11.get(i, j).clone(),
            (true, false) => b12.get(i, j - c1).clone(),
            (false, true) => b21.get(i - r1, j).clone(),
            (false, false) => b22.get(i - r1, j - c1).clone(),
        })
    }

    /// Solves `self · X = rhs` by fraction-free (Bareiss) elimination.
    pub fn solve_right(&self, rhs: &Self) -> Result<Self> {
        if !self.is_square() || rhs.rows != self.rows {
            return Err(Error::Shape { op: "solve", lhs: self.shape(), rhs: rhs.shape() });
        }
        let n = self.rows;
        let m = rhs.cols;
        let w = n + m;
        let mut a: Vec<Gq> = Vec::with_capacity(n * w);
        for i in 0..n {
            a.extend((0..n).map(|j| self.get(i, j).clone()));
            a.extend((0..m).map(|j| rhs.get(i, j).clone()));
        }
        let mut prev = Gq::one();
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !a[i * w + k].is_zero())
                .ok_or(Error::SingularMatrix { stage: k })?;
            if p != k {
                for j in 0..w {
                    a.swap(p * w + j, k * w + j);
                }
            }
            let prev_inv = prev.inv()?;
            for i in k + 1..n {
                let aik = a[i * w + k].clone();
                for j in k + 1..w {
                    let v = &a[k * w + k] * &a[i * w + j] - &aik * &a[k * w + j];
                    a[i * w + j] = v * &prev_inv;
                }
                a[i * w + k] = Gq::zero();
            }
            prev = a[k * w + k].clone();
        }
        let mut x = Self::zeros(n, m);
        for c in 0..m {
            for i in (0..n).rev() {
                let mut s = a[i * w + n + c].clone();
                for j in i + 1..n {
                    s -= &(&a[i * w + j] * x.get(j, c));
                }
                x.set(i, c, s * a[i * w + i].inv()?);
            }
        }
        Ok(x)
    }

    /// Solves `X · self = rhs`.
    pub fn solve_left(&self, rhs: &Self) -> Result<Self> {
        Ok(self.transpose().solve_right(&rhs.transpose())?.transpose())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve_right(&Self::identity(self.rows))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::from((0..self.cols).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>()))
            .collect();
        Value::from(rows)
    }
}

macro_rules! matrix_binop {
    ($Tr:ident, $m:ident, $f:ident) => {
        impl $Tr<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $m(self, rhs: &Matrix) -> Matrix {
                self.$f(rhs).expect("matrix shape mismatch")
            }
        }
        impl $Tr<Matrix> for Matrix {
            type Output = Matrix;
            fn $m(self, rhs: Matrix) -> Matrix {
                (&self).$f(&rhs).expect("matrix shape mismatch")
            }
        }
        impl $Tr<&Matrix> for Matrix {
            type Output = Matrix;
            fn $m(self, rhs: &Matrix) -> Matrix {
                (&self).$f(rhs).expect("matrix shape mismatch")
            }
        }
        impl $Tr<Matrix> for &Matrix {
            type Output = Matrix;
            fn $m(self, rhs: Matrix) -> Matrix {
                self.$f(&rhs).expect("matrix shape mismatch")
            }
        }
    };
}

matrix_binop!(Add, add, try_add);
matrix_binop!(Sub, sub, try_sub);
matrix_binop!(Mul, mul, try_mul);

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-Gq::one())
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        -&self
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `sum_k C_k z^k`, stored low to high with no trailing zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix>,
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, coeffs: Vec::new() }
    }

    pub fn new(rows: usize, cols: usize, coeffs: Vec<Matrix>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != (rows, cols)) {
            return Err(Error::Shape { op: "MatPoly::new", lhs: (rows, cols), rhs: bad.shape() });
        }
        let mut p = Self { rows, cols, coeffs };
        p.trim();
        Ok(p)
    }

    pub fn constant(m: Matrix) -> Self {
        Self::monomial(m, 0)
    }

    pub fn monomial(m: Matrix, k: usize) -> Self {
        let (r, c) = m.shape();
        let mut coeffs = vec![Matrix::zeros(r, c); k];
        coeffs.push(m);
        Self::new(r, c, coeffs).expect("uniform shapes")
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(Matrix::identity(n))
    }

    /// `z · I`.
    pub fn z(n: usize) -> Self {
        Self::monomial(Matrix::identity(n), 1)
    }

    /// `z I - m`.
    pub fn z_minus(m: &Matrix) -> Self {
        Self::z(m.rows()) - Self::constant(m.clone())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Matrix::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Matrix {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))
    }

    /// Coefficient `k` places below the top of a degree-`n` polynomial (`z^{n-k}`).
    pub fn sub_leading(&self, n: usize, k: usize) -> Matrix {
        n.checked_sub(k).map_or_else(|| Matrix::zeros(self.rows, self.cols), |e| self.coeff(e))
    }

    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix) -> Self {
        let coeffs: Vec<Matrix> = self.coeffs.iter().map(f).collect();
        let (r, c) = coeffs.first().map_or((self.rows, self.cols), Matrix::shape);
        Self::new(r, c, coeffs).expect("uniform shapes")
    }

    pub fn scale(&self, s: &Gq) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn mul_left(&self, m: &Matrix) -> Self {
        if self.is_zero() {
            return Self::zero(m.rows(), self.cols);
        }
        self.map(|c| m * c)
    }

    pub fn mul_right(&self, m: &Matrix) -> Self {
        if self.is_zero() {
            return Self::zero(self.rows, m.cols());
        }
        self.map(|c| c * m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.map(Matrix::transpose);
        (t.rows, t.cols) = (self.cols, self.rows);
        t
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Matrix::zeros(self.rows, self.cols); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { rows: self.rows, cols: self.cols, coeffs }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&Gq::from(k as i64)))
            .collect();
        Self::new(self.rows, self.cols, coeffs).expect("uniform shapes")
    }

    pub fn eval(&self, z: &Gq) -> Matrix {
        self.coeffs
            .iter()
            .rev()
            .fold(Matrix::zeros(self.rows, self.cols), |acc, c| acc.scale(z) + c)
    }

    fn zip(&self, rhs: &Self, op: &'static str, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape { op, lhs: self.shape(), rhs: rhs.shape() });
        }
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| f(&self.coeff(k), &rhs.coeff(k))).collect();
        Self::new(self.rows, self.cols, coeffs)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, "sub", |a, b| a - b)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape { op: "mul", lhs: self.shape(), rhs: rhs.shape() });
        }
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(self.rows, rhs.cols));
        }
        let mut coeffs = vec![Matrix::zeros(self.rows, rhs.cols); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Self::new(self.rows, rhs.cols, coeffs)
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.block(r0, c0, rows, cols)).collect();
        Self::new(rows, cols, coeffs).expect("uniform shapes")
    }

    pub fn from_blocks(b11: &Self, b12: &Self, b21: &Self, b22: &Self) -> Self {
        let len = [b11, b12, b21, b22].iter().map(|b| b.coeffs.len()).max().unwrap_or(0);
        let coeffs: Vec<Matrix> = (0..len)
            .map(|k| Matrix::from_blocks(&b11.coeff(k), &b12.coeff(k), &b21.coeff(k), &b22.coeff(k)))
            .collect();
        Self::new(b11.rows + b21.rows, b11.cols + b12.cols, coeffs).expect("uniform shapes")
    }

    pub fn height(&self) -> u64 {
        self.coeffs.iter().map(Matrix::height).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": [self.rows, self.cols],
            "coeffs": self.coeffs.iter().map(Matrix::to_json).collect::<Vec<_>>(),
        })
    }
}

macro_rules! poly_binop {
    ($Tr:ident, $m:ident, $f:ident) => {
        impl $Tr<&MatPoly> for &MatPoly {
            type Output = MatPoly;
            fn $m(self, rhs: &MatPoly) -> MatPoly {
                self.$f(rhs).expect("matrix polynomial shape mismatch")
            }
        }
        impl $Tr<MatPoly> for MatPoly {
            type Output = MatPoly;
            fn $m(self, rhs: MatPoly) -> MatPoly {
                (&self).$f(&rhs).expect("matrix polynomial shape mismatch")
            }
        }
        impl $Tr<&MatPoly> for MatPoly {
            type Output = MatPoly;
            fn $m(self, rhs: &MatPoly) -> MatPoly {
                (&self).$f(rhs).expect("matrix polynomial shape mismatch")
            }
        }
        impl $Tr<MatPoly> for &MatPoly {
            type Output = MatPoly;
            fn $m(self, rhs: MatPoly) -> MatPoly {
                self.$f(&rhs).expect("matrix polynomial shape mismatch")
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl Neg for &MatPoly {
    type Output = MatPoly;
    fn neg(self) -> MatPoly {
        self.scale(&-Gq::one())
    }
}

impl Neg for MatPoly {
    type Output = MatPoly;
    fn neg(self) -> MatPoly {
        -&self
    }
}

impl fmt::Display for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c} z"),
                _ => format!("{c} z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A `2N x 2N` matrix polynomial viewed as a 2x2 array of `N x N` blocks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockMat2 {
    n: usize,
    full: MatPoly,
}

impl BlockMat2 {
    pub fn new(b11: MatPoly, b12: MatPoly, b21: MatPoly, b22: MatPoly) -> Self {
        let n = b11.rows();
        Self { n, full: MatPoly::from_blocks(&b11, &b12, &b21, &b22) }
    }

    pub fn from_full(full: MatPoly) -> Self {
        Self { n: full.rows() / 2, full }
    }

    pub fn half(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> &MatPoly {
        &self.full
    }

    pub fn into_full(self) -> MatPoly {
        self.full
    }

    /// Block `(i, j)` with zero-based indices.
    pub fn block(&self, i: usize, j: usize) -> MatPoly {
        self.full.block(i * self.n, j * self.n, self.n, self.n)
    }

    /// `J X J^{-1}` with `J = [[0, I], [-I, 0]]`, i.e. `[[X22, -X21], [-X12, X11]]`.
    pub fn j_conjugate(&self) -> Self {
        Self::new(self.block(1, 1), -self.block(1, 0), -self.block(0, 1), self.block(0, 0))
    }
}
