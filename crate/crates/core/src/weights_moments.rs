//! Weight specifications `Φ(z) z^α e^{-β/z}` and their exact normalized moments.
//!
//! Moments are normalized so that the scalar moment `m_0 = 1`; every monic quantity and
//! every residual identity downstream is invariant under that global scaling.

use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactnum::{int, parse_rational, Gq, Rational};
use crate::laurent::Laurent;
use crate::polymat::{MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};

/// Pearson data `z² W' = h^L W + W h^R` with `h = h_0 + h_1 z + h_2 z²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearsonData {
    pub left: [Matrix; 3],
    pub right: [Matrix; 3],
}

impl PearsonData {
    pub fn zero(n: usize) -> Self {
        let z = || Matrix::zeros(n, n);
        Self { left: [z(), z(), z()], right: [z(), z(), z()] }
    }

    pub fn dim(&self) -> usize {
        self.left[0].rows()
    }

    pub fn h_left(&self) -> MatPoly {
        MatPoly::new(self.dim(), self.dim(), self.left.to_vec()).expect("square blocks")
    }

    pub fn h_right(&self) -> MatPoly {
        MatPoly::new(self.dim(), self.dim(), self.right.to_vec()).expect("square blocks")
    }

    pub fn is_classical(&self) -> bool {
        self.left[2].is_zero() && self.right[2].is_zero()
    }

    pub fn is_one_sided(&self) -> bool {
        self.right.iter().all(Matrix::is_zero)
    }

    /// First non-commuting pair among `h_0^L, h_1^L, h_2^L`, if any.
    pub fn left_noncommuting_pair(&self) -> Option<(usize, usize)> {
        (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .find(|&(i, j)| !self.left[i].commutator(&self.left[j]).is_zero())
    }
}

/// Closed-form families whose moments, MOPs and structure matrices are known explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleFamily {
    /// Two-sided classical weight built from a lower-triangular factor (degree-1 Pearson data).
    Classical,
    /// Symmetric semiclassical weight `W_L W_L^T` with quadratic Pearson data.
    Semiclassical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExampleTag {
    pub family: ExampleFamily,
    pub a: Rational,
    pub b: Gq,
    pub c: Gq,
}

#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub name: Option<String>,
    pub dim: usize,
    pub alpha: Rational,
    pub beta: Gq,
    pub phi: MatPoly,
    pub pearson: Option<PearsonData>,
    pub example: Option<ExampleTag>,
}

impl WeightSpec {
    pub fn new(alpha: Rational, beta: Gq, phi: MatPoly, pearson: Option<PearsonData>) -> Result<Self> {
        let spec = Self { name: None, dim: phi.rows(), alpha, beta, phi, pearson, example: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn scalar(a: Rational, b: Gq) -> Result<Self> {
        let half = |x: Gq| x.scale(&Rational::new(1.into(), 2.into()));
        let h1 = Matrix::scalar(1, half(Gq::real(&a - int(2))));
        let h0 = Matrix::scalar(1, half(b.clone()));
        let pearson = PearsonData { left: [h0.clone(), h1.clone(), Matrix::zeros(1, 1)], right: [h0, h1, Matrix::zeros(1, 1)] };
        Self::new(a - int(2), b, MatPoly::identity(1), Some(pearson))
    }

    fn validate(&self) -> Result<()> {
        if !self.phi.rows().eq(&self.phi.cols()) || self.dim == 0 {
            return Err(Error::Shape { op: "weight prefactor", lhs: self.phi.shape(), rhs: self.phi.shape() });
        }
        if self.phi.is_zero() {
            return Err(Error::Parse { line: 0, col: 0, msg: "weight prefactor is identically zero".into() });
        }
        if !self.beta.re.is_positive() {
            return Err(Error::ParameterDegenerate(format!("Re(beta) must be positive, got {}", self.beta)));
        }
        if let Some(p) = &self.pearson {
            if p.dim() != self.dim {
                return Err(Error::Shape { op: "Pearson data", lhs: (p.dim(), p.dim()), rhs: (self.dim, self.dim) });
            }
            let r = self.pearson_residual(p);
            if !r.is_zero() {
                return Err(Error::PearsonMismatch { residual: r.to_string() });
            }
        }
        Ok(())
    }

    /// `z²Φ' + (αz + β)Φ - h^L Φ - Φ h^R`, which vanishes iff the Pearson data fits the weight.
    pub fn pearson_residual(&self, p: &PearsonData) -> MatPoly {
        let n = self.dim;
        let sigma = MatPoly::new(n, n, vec![Matrix::scalar(n, self.beta.clone()), Matrix::scalar(n, Gq::real(self.alpha.clone()))])
            .expect("square");
        let lhs = self.phi.derivative().shift(2) + &sigma * &self.phi;
        lhs - &p.h_left() * &self.phi - &self.phi * &p.h_right()
    }
}

impl FromStr for WeightSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_weight_spec(s)
    }
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn scalar_at(text: &str, line: usize, col: usize) -> Result<Gq> {
    Gq::from_str(text).map_err(|_| perr(line, col, format!("malformed scalar {:?}", text.trim())))
}

fn rational_at(text: &str, line: usize, col: usize) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| perr(line, col, format!("malformed rational {:?}", text.trim())))
}

/// Parses `[[a, b], [c, d]]`.
fn matrix_at(text: &str, line: usize, col: usize) -> Result<Matrix> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| perr(line, col, "matrix must be written as [[...], [...]]"))?;
    let mut rows = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('[').ok_or_else(|| perr(line, col, "expected '[' opening a row"))?;
        let end = body.find(']').ok_or_else(|| perr(line, col, "unterminated row"))?;
        let row = body[..end]
            .split(',')
            .map(|x| scalar_at(x, line, col))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        rest = body[end + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Matrix::from_rows(rows).map_err(|_| perr(line, col, "ragged matrix"))
}

/// Line-oriented weight file:
///
/// ```text
/// name   triangular example
/// dim    2
/// alpha  3/2
/// beta   1/2
/// phi[0][0] = 1
/// phi[0][1] = 0, 1          # low-to-high coefficients
/// phi[1][1] = 1
/// hL0 = [[1/2, 0], [0, 1/2]]
/// example classical 3 1 1   # optional closed-form family tag: a b c
/// ```
///
/// Indices are zero-based; unspecified `phi` entries and `h` blocks are zero. The Pearson
/// block is present when any `hL*`/`hR*` key appears.
pub fn parse_weight_spec(text: &str) -> Result<WeightSpec> {
    let mut name = None;
    let mut dim: Option<usize> = None;
    let mut alpha = None;
    let mut beta = None;
    let mut entries: Vec<(usize, usize, Vec<Gq>, usize)> = Vec::new();
    let mut hs: Vec<(bool, usize, Matrix, usize)> = Vec::new();
    let mut example = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = content.find(trimmed).unwrap_or(0) + 1;
        let (key, rest) = trimmed.split_once(|c: char| c.is_whitespace() || c == '=').unwrap_or((trimmed, ""));
        let value = rest.trim_start().trim_start_matches('=').trim();
        let vcol = if value.is_empty() { col0 } else { content.find(value).map_or(col0, |p| p + 1) };
        match key {
            "name" => name = Some(value.to_string()),
            "dim" => {
                let d = value.parse::<usize>().map_err(|_| perr(line, vcol, "dim must be a positive integer"))?;
                if d == 0 {
                    return Err(perr(line, vcol, "dim must be positive"));
                }
                dim = Some(d);
            }
            "alpha" => alpha = Some(rational_at(value, line, vcol)?),
            "beta" => beta = Some(scalar_at(value, line, vcol)?),
            "example" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                let [fam, a, b, c] = parts[..] else {
                    return Err(perr(line, vcol, "expected: example classical|semiclassical a b c"));
                };
                let family = match fam {
                    "classical" => ExampleFamily::Classical,
                    "semiclassical" => ExampleFamily::Semiclassical,
                    other => return Err(perr(line, vcol, format!("unknown example family {other:?}"))),
                };
                example = Some(ExampleTag {
                    family,
                    a: rational_at(a, line, vcol)?,
                    b: scalar_at(b, line, vcol)?,
                    c: scalar_at(c, line, vcol)?,
                });
            }
            k if k.starts_with("phi[") => {
                let idx: Vec<usize> = k
                    .trim_start_matches("phi")
                    .split(['[', ']'])
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| perr(line, col0, "phi index must be phi[i][j]"))?;
                let [i, j] = idx[..] else {
                    return Err(perr(line, col0, "phi index must be phi[i][j]"));
                };
                let coeffs = value.split(',').map(|c| scalar_at(c, line, vcol)).collect::<Result<Vec<_>>>()?;
                entries.push((i, j, coeffs, line));
            }
            k if k.len() == 3 && (k.starts_with("hL") || k.starts_with("hR")) => {
                let deg = k[2..].parse::<usize>().ok().filter(|&d| d <= 2).ok_or_else(|| perr(line, col0, "h index must be 0, 1 or 2"))?;
                hs.push((k.starts_with("hL"), deg, matrix_at(value, line, vcol)?, line));
            }
            other => return Err(perr(line, col0, format!("unknown key {other:?}"))),
        }
    }

    let dim = dim.ok_or_else(|| perr(0, 0, "missing `dim`"))?;
    let alpha = alpha.ok_or_else(|| perr(0, 0, "missing `alpha`"))?;
    let beta = beta.ok_or_else(|| perr(0, 0, "missing `beta`"))?;
    let deg = entries.iter().map(|e| e.2.len()).max().unwrap_or(0);
    let mut coeffs = vec![Matrix::zeros(dim, dim); deg];
    for (i, j, cs, line) in entries {
        if i >= dim || j >= dim {
            return Err(perr(line, 1, format!("phi[{i}][{j}] out of range for dim {dim}")));
        }
        for (k, c) in cs.into_iter().enumerate() {
            coeffs[k].set(i, j, c);
        }
    }
    let phi = MatPoly::new(dim, dim, coeffs)?;
    let pearson = if hs.is_empty() {
        None
    } else {
        let mut p = PearsonData::zero(dim);
        for (left, d, m, line) in hs {
            if m.shape() != (dim, dim) {
                return Err(perr(line, 1, format!("h block must be {dim}x{dim}")));
            }
            if left {
                p.left[d] = m;
            } else {
                p.right[d] = m;
            }
        }
        Some(p)
    };
    let mut spec = WeightSpec::new(alpha, beta, phi, pearson)?;
    spec.name = name;
    spec.example = example;
    Ok(spec)
}

/// `m_0 = 1`, `m_{n+1} = -β m_n / (α + 2 + n)`.
pub fn scalar_moment_table(alpha: &Rational, beta: &Gq, k: usize) -> Result<Vec<Gq>> {
    let a = alpha + int(2);
    let mut m = Vec::with_capacity(k + 1);
    m.push(Gq::one());
    for n in 0..k {
        let d = &a + int(n as i64);
        if d.is_zero() {
            return Err(Error::ParameterDegenerate(format!("alpha + 2 + {n} vanishes in the moment recurrence")));
        }
        let next = -(beta * &m[n]).scale(&d.recip());
        m.push(next);
    }
    Ok(m)
}

/// Matrix moments `W_0..W_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    pub moments: Vec<Matrix>,
}

impl MomentTable {
    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.moments.first().map_or(0, Matrix::rows)
    }

    pub fn get(&self, k: usize) -> &Matrix {
        &self.moments[k]
    }

    pub fn to_json(&self) -> Value {
        Value::from(
            self.moments
                .iter()
                .map(|m| MatPoly::constant(m.clone()).to_json())
                .collect::<Vec<_>>(),
        )
    }
}

/// `W_n = Σ_k Φ_k m_{n+k}` for `n = 0..=k`.
pub fn matrix_moment_table(spec: &WeightSpec, k: usize) -> Result<MomentTable> {
    let d = spec.phi.degree().unwrap_or(0);
    let m = scalar_moment_table(&spec.alpha, &spec.beta, k + d)?;
    let moments = (0..=k)
        .map(|n| {
            spec.phi
                .coeffs()
                .iter()
                .enumerate()
                .fold(Matrix::zeros(spec.dim, spec.dim), |acc, (j, c)| acc + c.scale(&m[n + j]))
        })
        .collect();
    Ok(MomentTable { moments })
}

/// `R_n = (n+2) W_{n+1} + Σ_k h^L_k W_{n+k} + Σ_k W_{n+k} h^R_k` for every `n` the table supports.
pub fn pearson_moment_residual(pearson: &PearsonData, table: &MomentTable) -> ResidualReport {
    let mut report = ResidualReport::new("pearson-moments");
    for n in 0..table.len().saturating_sub(2) {
        let mut r = table.get(n + 1).scale(&Gq::from(n as i64 + 2));
        for k in 0..3 {
            r = r + &pearson.left[k] * table.get(n + k) + table.get(n + k) * &pearson.right[k];
        }
        report.push(ResidualEntry::new("pearson moment relation", n as i64, r));
    }
    report
}

/// `S(z) = -Σ_{k=0}^{K} W_k z^{-k-1}`, known down to `z^{-K-1}`.
pub fn stieltjes_series(table: &MomentTable, k: usize) -> Result<Laurent> {
    if table.len() < k + 1 {
        return Err(Error::TruncationTooShort { needed: k + 1, available: table.len() });
    }
    let n = table.dim();
    let coeffs = (0..=k).rev().map(|j| -table.get(j)).collect();
    Ok(Laurent::new(n, n, -(k as i64) - 1, coeffs, Some(-(k as i64) - 1)))
}
