//! Monic left/right matrix biorthogonal polynomials from a moment table.
//!
//! `P^L_n = Σ_j p_j z^j` (with `p_n = I`) solves `Σ_j p_j W_{j+k} = -W_{n+k}` for `k < n`,
//! one block-Hankel system per degree. The right family solves the transposed layout.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::polymat::{MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};
use crate::weights_moments::MomentTable;

#[derive(Clone, Debug)]
pub struct MopsData {
    pub dim: usize,
    pub n_max: usize,
    /// `P^L_0 ..= P^L_{n_max+1}`.
    pub p_left: Vec<MatPoly>,
    pub p_right: Vec<MatPoly>,
    /// `C_n^{-1}` and `C_n` for `n ..= n_max + 1`.
    pub c_inv: Vec<Matrix>,
    pub c: Vec<Matrix>,
    /// Recurrence coefficients for `n ..= n_max`, by coefficient matching; `η_0 = 0`.
    pub xi_left: Vec<Matrix>,
    pub eta_left: Vec<Matrix>,
    pub xi_right: Vec<Matrix>,
    pub eta_right: Vec<Matrix>,
}

fn hankel(table: &MomentTable, n: usize) -> Matrix {
    let d = table.dim();
    Matrix::from_fn(n * d, n * d, |i, j| table.get(i / d + j / d).get(i % d, j % d).clone())
}

fn solve_degree(table: &MomentTable, n: usize) -> Result<(MatPoly, MatPoly)> {
    let d = table.dim();
    if n == 0 {
        return Ok((MatPoly::identity(d), MatPoly::identity(d)));
    }
    let h = hankel(table, n);
    let row = Matrix::from_fn(d, n * d, |i, j| -table.get(n + j / d).get(i, j % d).clone());
    let col = Matrix::from_fn(n * d, d, |i, j| -table.get(n + i / d).get(i % d, j).clone());
    let map_err = |e| match e {
        Error::SingularMatrix { .. } => Error::Regularity { n },
        other => other,
    };
    let x = h.solve_left(&row).map_err(map_err)?;
    let y = h.solve_right(&col).map_err(map_err)?;
    let mut left: Vec<Matrix> = (0..n).map(|j| x.block(0, j * d, d, d)).collect();
    let mut right: Vec<Matrix> = (0..n).map(|j| y.block(j * d, 0, d, d)).collect();
    left.push(Matrix::identity(d));
    right.push(Matrix::identity(d));
    Ok((MatPoly::new(d, d, left)?, MatPoly::new(d, d, right)?))
}

/// `Σ_{i,j} p^L_i W_{i+j} p^R_j`.
pub fn pairing(table: &MomentTable, pl: &MatPoly, pr: &MatPoly) -> Matrix {
    let d = table.dim();
    let mut acc = Matrix::zeros(d, d);
    for (i, a) in pl.coeffs().iter().enumerate() {
        for (j, b) in pr.coeffs().iter().enumerate() {
            acc = acc + &(a * table.get(i + j)) * b;
        }
    }
    acc
}

/// `Σ_j p_j W_{j+k}`, the `k`-th moment of `P^L W`.
fn left_moment(table: &MomentTable, p: &MatPoly, k: usize) -> Matrix {
    p.coeffs().iter().enumerate().fold(Matrix::zeros(table.dim(), table.dim()), |acc, (j, c)| acc + c * table.get(j + k))
}

fn right_moment(table: &MomentTable, p: &MatPoly, k: usize) -> Matrix {
    p.coeffs().iter().enumerate().fold(Matrix::zeros(table.dim(), table.dim()), |acc, (j, c)| acc + table.get(k + j) * c)
}

pub fn solve_mops(table: &MomentTable, n_max: usize) -> Result<MopsData> {
    let needed = 2 * n_max + 3;
    if table.len() < needed {
        return Err(Error::TruncationTooShort { needed, available: table.len() });
    }
    let d = table.dim();
    let solved = (0..=n_max + 1).into_par_iter().map(|n| solve_degree(table, n)).collect::<Vec<_>>();
    let mut p_left = Vec::with_capacity(n_max + 2);
    let mut p_right = Vec::with_capacity(n_max + 2);
    for s in solved {
        let (l, r) = s?;
        p_left.push(l);
        p_right.push(r);
    }
    let c_inv: Vec<Matrix> = p_left.iter().enumerate().map(|(n, p)| left_moment(table, p, n)).collect();
    let c = c_inv
        .iter()
        .enumerate()
        .map(|(n, m)| m.inverse().map_err(|_| Error::Regularity { n }))
        .collect::<Result<Vec<_>>>()?;

    let sub = |p: &MatPoly, n: usize, k: usize| p.sub_leading(n, k);
    let mut xi_left = Vec::new();
    let mut eta_left = Vec::new();
    let mut xi_right = Vec::new();
    let mut eta_right = Vec::new();
    for n in 0..=n_max {
        let (pl, pl1) = (&p_left[n], &p_left[n + 1]);
        let xi = sub(pl, n, 1) - sub(pl1, n + 1, 1);
        let eta = sub(pl, n, 2) - sub(pl1, n + 1, 2) - &xi * &sub(pl, n, 1);
        let (pr, pr1) = (&p_right[n], &p_right[n + 1]);
        let xr = sub(pr, n, 1) - sub(pr1, n + 1, 1);
        let er = sub(pr, n, 2) - sub(pr1, n + 1, 2) - &sub(pr, n, 1) * &xr;
        xi_left.push(xi);
        eta_left.push(eta);
        xi_right.push(xr);
        eta_right.push(er);
    }
    Ok(MopsData { dim: d, n_max, p_left, p_right, c_inv, c, xi_left, eta_left, xi_right, eta_right })
}

impl MopsData {
    pub fn zero(&self) -> Matrix {
        Matrix::zeros(self.dim, self.dim)
    }

    pub fn p1_left(&self, n: usize) -> Matrix {
        self.p_left[n].sub_leading(n, 1)
    }

    pub fn p2_left(&self, n: usize) -> Matrix {
        self.p_left[n].sub_leading(n, 2)
    }

    pub fn p1_right(&self, n: usize) -> Matrix {
        self.p_right[n].sub_leading(n, 1)
    }

    pub fn p2_right(&self, n: usize) -> Matrix {
        self.p_right[n].sub_leading(n, 2)
    }

    /// `C_{n-1}`, with `C_{-1} := 0`.
    pub fn c_prev(&self, n: usize) -> Matrix {
        n.checked_sub(1).map_or_else(|| self.zero(), |k| self.c[k].clone())
    }

    /// `P^L_{n-1}`, with `P_{-1} := 0`.
    pub fn p_left_prev(&self, n: usize) -> MatPoly {
        n.checked_sub(1).map_or_else(|| MatPoly::zero(self.dim, self.dim), |k| self.p_left[k].clone())
    }

    pub fn p_right_prev(&self, n: usize) -> MatPoly {
        n.checked_sub(1).map_or_else(|| MatPoly::zero(self.dim, self.dim), |k| self.p_right[k].clone())
    }

    /// `Σ_{k<n} ξ^L_k`.
    pub fn s1(&self, n: usize) -> Matrix {
        self.xi_left[..n].iter().fold(self.zero(), |acc, x| acc + x)
    }

    /// `Σ_{0≤j<i<n} ξ_i ξ_j − Σ_{k<n} η_k`.
    pub fn s2_ordered(&self, n: usize) -> Matrix {
        let mut acc = self.zero();
        for i in 0..n {
            for j in 0..i {
                acc = acc + &self.xi_left[i] * &self.xi_left[j];
            }
        }
        self.eta_left[..n].iter().fold(acc, |acc, e| acc - e)
    }

    /// `Σ_{i,j<n} ξ_i ξ_j − Σ_{k<n} η_k`.
    pub fn s2_full(&self, n: usize) -> Matrix {
        let s = self.s1(n);
        self.eta_left[..n].iter().fold(&s * &s, |acc, e| acc - e)
    }

    pub fn to_json(&self) -> Value {
        let polys = |v: &[MatPoly]| v.iter().map(MatPoly::to_json).collect::<Vec<_>>();
        let mats = |v: &[Matrix]| v.iter().map(Matrix::to_json).collect::<Vec<_>>();
        json!({
            "dim": self.dim,
            "n_max": self.n_max,
            "P_left": polys(&self.p_left),
            "P_right": polys(&self.p_right),
            "C_inv": mats(&self.c_inv),
            "xi_left": mats(&self.xi_left),
            "eta_left": mats(&self.eta_left),
            "xi_right": mats(&self.xi_right),
            "eta_right": mats(&self.eta_right),
        })
    }
}

pub fn biorthogonality_check(data: &MopsData, table: &MomentTable) -> ResidualReport {
    let mut r = ResidualReport::new("biorthogonality");
    let top = data.n_max.min(table.len().saturating_sub(1) / 2);
    for n in 0..=top {
        for m in 0..=top {
            let mut pair = pairing(table, &data.p_left[n], &data.p_right[m]);
            if n == m {
                pair = pair - &data.c_inv[n];
            }
            let e = ResidualEntry::new(format!("<P^L_{n}, P^R_{m}> = delta C^-1"), n as i64, pair);
            r.push(e);
        }
    }
    r
}

pub fn recurrence_check(data: &MopsData) -> ResidualReport {
    let mut r = ResidualReport::new("recurrence");
    for n in 0..=data.n_max {
        let z = |p: &MatPoly| p.shift(1);
        let left = z(&data.p_left[n])
            - &data.p_left[n + 1]
            - data.p_left[n].mul_left(&data.xi_left[n])
            - data.p_left_prev(n).mul_left(&data.eta_left[n]);
        r.push(ResidualEntry::new("z P^L_n = P^L_{n+1} + xi_n P^L_n + eta_n P^L_{n-1}", n as i64, left));
        let right = z(&data.p_right[n])
            - &data.p_right[n + 1]
            - data.p_right[n].mul_right(&data.xi_right[n])
            - data.p_right_prev(n).mul_right(&data.eta_right[n]);
        r.push(ResidualEntry::new("z P^R_n = P^R_{n+1} + P^R_n xi_n + P^R_{n-1} eta_n", n as i64, right));
        r.push(ResidualEntry::new(
            "xi^R_n = C_n xi^L_n C_n^-1",
            n as i64,
            &data.xi_right[n] - &(&(&data.c[n] * &data.xi_left[n]) * &data.c_inv[n]),
        ));
        if n >= 1 {
            r.push(ResidualEntry::new(
                "eta^L_n = C_n^-1 C_{n-1}",
                n as i64,
                &data.eta_left[n] - &(&data.c_inv[n] * &data.c[n - 1]),
            ));
            r.push(ResidualEntry::new(
                "eta^R_n = C_{n-1} C_n^-1",
                n as i64,
                &data.eta_right[n] - &(&data.c[n - 1] * &data.c_inv[n]),
            ));
        }
    }
    r
}

/// `p¹_n = -Σ_{k<n} ξ_k` and `p²_n` against both readings of the double sum.
pub fn sum_rules_check(data: &MopsData) -> ResidualReport {
    let mut r = ResidualReport::new("sum-rules");
    for n in 0..=data.n_max {
        r.push(ResidualEntry::new("p1_n = -sum_{k<n} xi_k", n as i64, data.p1_left(n) + data.s1(n)));
        r.push(ResidualEntry::new(
            "p2_n = sum_{j<i<n} xi_i xi_j - sum_{k<n} eta_k",
            n as i64,
            data.p2_left(n) - data.s2_ordered(n),
        ));
        r.push(
            ResidualEntry::new("p2_n = sum_{i,j<n} xi_i xi_j - sum_{k<n} eta_k", n as i64, data.p2_left(n) - data.s2_full(n))
                .informational()
                .with_note("unordered reading of the double sum"),
        );
    }
    r
}

/// Truncated second-kind functions `Q_n = -Σ_k z^{-k-1} ⟨P_n, z^k⟩`.
#[derive(Clone, Debug)]
pub struct SecondKindSeries {
    pub extra: usize,
    /// `Q^L_0 ..= Q^L_{n_max+1}`, each known down to `z^{-(n+1+extra)}`.
    pub q_left: Vec<Laurent>,
    pub q_right: Vec<Laurent>,
}

impl SecondKindSeries {
    pub fn q_left_prev(&self, n: usize) -> Option<&Laurent> {
        n.checked_sub(1).map(|k| &self.q_left[k])
    }
}

/// Moments needed for `second_kind_series(.., extra)` on data through `n_max`.
pub fn second_kind_table_len(n_max: usize, extra: usize) -> usize {
    2 * (n_max + 1) + extra + 1
}

pub fn second_kind_series(data: &MopsData, table: &MomentTable, extra: usize) -> Result<SecondKindSeries> {
    let needed = second_kind_table_len(data.n_max, extra);
    if table.len() < needed {
        return Err(Error::TruncationTooShort { needed, available: table.len() });
    }
    let d = data.dim;
    let build = |n: usize, left: bool| {
        let p = if left { &data.p_left[n] } else { &data.p_right[n] };
        let depth = n + extra;
        let coeffs: Vec<Matrix> = (0..=depth)
            .rev()
            .map(|k| -(if left { left_moment(table, p, k) } else { right_moment(table, p, k) }))
            .collect();
        let lo = -(depth as i64) - 1;
        Laurent::new(d, d, lo, coeffs, Some(lo))
    };
    let q_left = (0..=data.n_max + 1).into_par_iter().map(|n| build(n, true)).collect();
    let q_right = (0..=data.n_max + 1).into_par_iter().map(|n| build(n, false)).collect();
    Ok(SecondKindSeries { extra, q_left, q_right })
}

/// Leading behaviour `Q_n = -C_n^{-1} z^{-n-1} + O(z^{-n-2})` on both sides.
pub fn second_kind_leading_check(data: &MopsData, series: &SecondKindSeries) -> ResidualReport {
    let mut r = ResidualReport::new("second-kind-leading");
    for n in 0..=data.n_max {
        for (q, side) in [(&series.q_left[n], "L"), (&series.q_right[n], "R")] {
            let lead = Laurent::new(data.dim, data.dim, -(n as i64) - 1, vec![-data.c_inv[n].clone()], None);
            let head = (q - &lead).truncate_below(-(n as i64) - 1);
            r.push(ResidualEntry::new(format!("Q^{side}_n = -C_n^-1 z^(-n-1) + O(z^(-n-2))"), n as i64, head));
        }
    }
    r
}

pub fn second_kind_recurrence_check(series: &SecondKindSeries, data: &MopsData) -> ResidualReport {
    let mut r = ResidualReport::new("second-kind-recurrence");
    r.push(
        ResidualEntry::new("z Q^L_n = Q^L_{n+1} + xi_n Q^L_n + eta_n Q^L_{n-1}", 0, Matrix::zeros(1, 1))
            .informational()
            .with_note("n = 0 excluded by the C_{-1} convention"),
    );
    for n in 1..=data.n_max {
        let ql = &series.q_left;
        let left = &(&(&ql[n].shift(1) - &ql[n + 1]) - &ql[n].mul_left(&data.xi_left[n])) - &ql[n - 1].mul_left(&data.eta_left[n]);
        r.push(ResidualEntry::new("z Q^L_n = Q^L_{n+1} + xi_n Q^L_n + eta_n Q^L_{n-1}", n as i64, left));
        let qr = &series.q_right;
        let right = &(&(&qr[n].shift(1) - &qr[n + 1]) - &qr[n].mul_right(&data.xi_right[n])) - &qr[n - 1].mul_right(&data.eta_right[n]);
        r.push(ResidualEntry::new("z Q^R_n = Q^R_{n+1} + Q^R_n xi_n + Q^R_{n-1} eta_n", n as i64, right));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, Gq};
    use num_traits::One;
    use crate::scalar_bessel::{monic_gbp, scalar_poly, ScalarBesselParams};
    use crate::weights_moments::{matrix_moment_table, WeightSpec};

    fn scalar_data(n_max: usize) -> (MomentTable, MopsData) {
        let spec = WeightSpec::scalar(int(3), Gq::one()).unwrap();
        let t = matrix_moment_table(&spec, 2 * n_max + 20).unwrap();
        let d = solve_mops(&t, n_max).unwrap();
        (t, d)
    }

    #[test]
    fn first_polynomials_scalar() {
        let (t, d) = scalar_data(4);
        assert_eq!(d.p_left[0], MatPoly::identity(1));
        assert_eq!(d.c_inv[0], t.get(0).clone());
        assert_eq!(d.p_left[1], scalar_poly(vec![Gq::ratio(1, 3), Gq::one()]));
        assert_eq!(d.xi_left[0], Matrix::scalar(1, Gq::ratio(-1, 3)));
        let p = ScalarBesselParams::new(int(3), Gq::one()).unwrap();
        for n in 0..=5 {
            assert_eq!(d.p_left[n], monic_gbp(n, &p).unwrap());
        }
    }

    #[test]
    fn checks_pass_and_detect_perturbation() {
        let (t, mut d) = scalar_data(5);
        assert!(biorthogonality_check(&d, &t).pass());
        assert!(recurrence_check(&d).pass());
        assert!(sum_rules_check(&d).pass());
        let s = second_kind_series(&d, &t, 8).unwrap();
        assert!(second_kind_leading_check(&d, &s).pass());
        assert!(second_kind_recurrence_check(&s, &d).pass());
        d.eta_left[3] = -d.eta_left[3].clone();
        assert!(!recurrence_check(&d).pass());
        assert!(!second_kind_recurrence_check(&s, &d).pass());
    }

    #[test]
    fn q0_is_the_stieltjes_series() {
        let (t, d) = scalar_data(2);
        let s = second_kind_series(&d, &t, 5).unwrap();
        let st = crate::weights_moments::stieltjes_series(&t, 5).unwrap();
        assert_eq!(s.q_left[0], st);
    }

    #[test]
    fn short_table_is_reported() {
        let (t, _) = scalar_data(2);
        let short = MomentTable { moments: t.moments[..5].to_vec() };
        assert!(matches!(solve_mops(&short, 2), Err(Error::TruncationTooShort { needed: 7, .. })));
    }

    #[test]
    fn singular_hankel_is_a_regularity_failure() {
        let m = |v: i64| Matrix::scalar(1, Gq::from(v));
        let t = MomentTable { moments: vec![m(1), m(1), m(1), m(1), m(1), m(1), m(1)] };
        assert!(matches!(solve_mops(&t, 2), Err(Error::Regularity { n: 2 })));
    }
}
