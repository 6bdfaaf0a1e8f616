//! Transfer matrices, fundamental matrices and structure matrices, and the identities
//! tying them together: zero curvature, the first-order system and its Miura image.
//!
//! Conventions: `J = [[0, I], [-I, 0]]`, `H = diag(h^L, -h^R)`, and at `n = 0`
//! `Y^L_0 = [[I, Q_0], [0, I]]` with `C_{-1} := 0` everywhere else.

use crate::error::{Error, Result};
use crate::exactnum::Gq;
use crate::laurent::Laurent;
use crate::mops_engine::{MopsData, SecondKindSeries};
use crate::polymat::{BlockMat2, MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};
use crate::scalar_bessel::{scalar_poly, ScalarBesselParams};
use crate::weights_moments::PearsonData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferMat {
    pub left: BlockMat2,
    pub right: BlockMat2,
}

fn mp(m: &Matrix) -> MatPoly {
    MatPoly::constant(m.clone())
}

/// `T^L_n = [[zI - ξ^L_n, C_n^{-1}], [-C_n, 0]]`, `T^R_n = [[zI - ξ^R_n, -C_n], [C_n^{-1}, 0]]`.
pub fn build_transfer(data: &MopsData, n: usize) -> Result<TransferMat> {
    if n > data.n_max {
        return Err(Error::Missing(format!("transfer matrix T_{n} needs data through n = {n}")));
    }
    let zero = MatPoly::zero(data.dim, data.dim);
    let left = BlockMat2::new(MatPoly::z_minus(&data.xi_left[n]), mp(&data.c_inv[n]), mp(&-&data.c[n]), zero.clone());
    let right = BlockMat2::new(MatPoly::z_minus(&data.xi_right[n]), mp(&-&data.c[n]), mp(&data.c_inv[n]), zero);
    Ok(TransferMat { left, right })
}

/// `diag(a, b)` as a block polynomial.
fn block_diag(a: &MatPoly, b: &MatPoly) -> MatPoly {
    let z = MatPoly::zero(a.rows(), a.cols());
    MatPoly::from_blocks(a, &z, &z, b)
}

/// `H = diag(h^L, -h^R)`, acting on the right of `Y^L`.
pub fn h_left_block(pearson: &PearsonData) -> MatPoly {
    block_diag(&pearson.h_left(), &-pearson.h_right())
}

/// `diag(h^R, -h^L)`, acting on the left of `Y^R`.
pub fn h_right_block(pearson: &PearsonData) -> MatPoly {
    block_diag(&pearson.h_right(), &-pearson.h_left())
}

fn lp(p: &MatPoly) -> Laurent {
    Laurent::from_poly(p)
}

fn lm(m: &Matrix) -> Laurent {
    Laurent::from_poly(&mp(m))
}

fn need_series(series: &SecondKindSeries, n: usize) -> Result<()> {
    if n >= series.q_left.len() {
        return Err(Error::Missing(format!("second-kind series through n = {n}")));
    }
    Ok(())
}

/// `Y^L_n = [[P_n, Q_n], [-C_{n-1} P_{n-1}, -C_{n-1} Q_{n-1}]]`.
pub fn y_left(data: &MopsData, series: &SecondKindSeries, n: usize) -> Result<Laurent> {
    need_series(series, n)?;
    let d = data.dim;
    if n == 0 {
        return Ok(Laurent::from_blocks(
            &lm(&Matrix::identity(d)),
            &series.q_left[0],
            &Laurent::zero(d, d, None),
            &lm(&Matrix::identity(d)),
        ));
    }
    let cp = &data.c[n - 1];
    Ok(Laurent::from_blocks(
        &lp(&data.p_left[n]),
        &series.q_left[n],
        &lp(&data.p_left[n - 1].mul_left(&-cp)),
        &series.q_left[n - 1].mul_left(&-cp),
    ))
}

/// `Y^R_n = [[P^R_n, -P^R_{n-1} C_{n-1}], [Q^R_n, -Q^R_{n-1} C_{n-1}]]`.
pub fn y_right(data: &MopsData, series: &SecondKindSeries, n: usize) -> Result<Laurent> {
    need_series(series, n)?;
    let d = data.dim;
    if n == 0 {
        return Ok(Laurent::from_blocks(
            &lm(&Matrix::identity(d)),
            &Laurent::zero(d, d, None),
            &series.q_right[0],
            &lm(&Matrix::identity(d)),
        ));
    }
    let cp = &data.c[n - 1];
    Ok(Laurent::from_blocks(
        &lp(&data.p_right[n]),
        &lp(&data.p_right[n - 1].mul_right(&-cp)),
        &series.q_right[n],
        &series.q_right[n - 1].mul_right(&-cp),
    ))
}

fn blocks(x: &Laurent) -> [Laurent; 4] {
    let n = x.shape().0 / 2;
    [x.block(0, 0, n, n), x.block(0, n, n, n), x.block(n, 0, n, n), x.block(n, n, n, n)]
}

/// `J X J^{-1}` on a block Laurent series.
fn j_conj(x: &Laurent) -> Laurent {
    let [a, b, c, d] = blocks(x);
    Laurent::from_blocks(&d, &-&c, &-&b, &a)
}

/// `J^{-1} X J`.
fn j_inv_conj(x: &Laurent) -> Laurent {
    let [a, b, c, d] = blocks(x);
    Laurent::from_blocks(&d, &-&c, &-&b, &a)
}

/// `(Y^L_n)^{-1} = J Y^R_n J^{-1}`.
pub fn y_left_inv(data: &MopsData, series: &SecondKindSeries, n: usize) -> Result<Laurent> {
    Ok(j_conj(&y_right(data, series, n)?))
}

/// `(Y^R_n)^{-1} = J^{-1} Y^L_n J`.
pub fn y_right_inv(data: &MopsData, series: &SecondKindSeries, n: usize) -> Result<Laurent> {
    Ok(j_inv_conj(&y_left(data, series, n)?))
}

fn miura_image_laurent(y: &Laurent) -> Laurent {
    y.derivative().shift(2)
}

/// Structure matrix obtained directly from the fundamental matrix, together with the
/// negative-power tail of the same product (which must vanish).
#[derive(Clone, Debug)]
pub struct DirectStructure {
    pub left: BlockMat2,
    pub right: BlockMat2,
    pub left_tail: Laurent,
    pub right_tail: Laurent,
}

/// `M̃^L_n = (z² Y' + Y H) Y^{-1}` and `M̃^R_n = (Y^R)^{-1}(z² Y^R' + diag(h^R, -h^L) Y^R)`.
pub fn structure_direct(data: &MopsData, series: &SecondKindSeries, pearson: &PearsonData, n: usize) -> Result<DirectStructure> {
    let short = || Error::TruncationTooShort { needed: 2, available: series.extra };
    let y = y_left(data, series, n)?;
    let yl = &(&miura_image_laurent(&y) + &(&y * &lp(&h_left_block(pearson)))) * &y_left_inv(data, series, n)?;
    let yr = y_right(data, series, n)?;
    let yrr = &y_right_inv(data, series, n)? * &(&miura_image_laurent(&yr) + &(&lp(&h_right_block(pearson)) * &yr));
    let left = BlockMat2::from_full(yl.poly_part().ok_or_else(short)?);
    let right = BlockMat2::from_full(yrr.poly_part().ok_or_else(short)?);
    Ok(DirectStructure { left, right, left_tail: yl.negative_part(), right_tail: yrr.negative_part() })
}

trait NegativePart {
    fn negative_part(&self) -> Laurent;
}

impl NegativePart for Laurent {
    fn negative_part(&self) -> Laurent {
        let (r, c) = self.shape();
        match self.top() {
            Some(_) => self - &Laurent::from_poly(&self.poly_part().unwrap_or_else(|| MatPoly::zero(r, c))),
            None => self.clone(),
        }
    }
}

fn require_data(data: &MopsData, n: usize) -> Result<()> {
    if n > data.n_max {
        return Err(Error::Missing(format!("structure matrix at n = {n} needs data through n + 1")));
    }
    Ok(())
}

/// `M̃^R = J M̃^L J`.
pub fn right_from_left(m: &BlockMat2) -> BlockMat2 {
    let j = m.j_conjugate();
    BlockMat2::new(-j.block(0, 0), -j.block(0, 1), -j.block(1, 0), -j.block(1, 1))
}

/// Closed-form `M̃^L_n` for classical Pearson data `h = A z + B`.
pub fn structure_classical(data: &MopsData, pearson: &PearsonData, n: usize) -> Result<BlockMat2> {
    if !pearson.is_classical() {
        return Err(Error::ParameterDegenerate("classical structure matrix needs h_2 = 0 on both sides".into()));
    }
    require_data(data, n)?;
    let [bl, al, _] = &pearson.left;
    let [br, ar, _] = &pearson.right;
    let (cinv, cp) = (&data.c_inv[n], data.c_prev(n));
    let (p1, q1) = (data.p1_left(n), data.p1_right(n));
    let nn = Matrix::scalar(data.dim, Gq::from(n as i64));
    let lin = |a: Matrix, b: Matrix| MatPoly::new(data.dim, data.dim, vec![b, a]).expect("square");
    let m11 = lin(al + &nn, p1.commutator(al) - &p1 + bl);
    let m12 = mp(&(al * cinv + cinv * ar + cinv.scale(&Gq::from(2 * n as i64 + 1))));
    let m21 = mp(&(-(&cp * al) - ar * &cp - cp.scale(&Gq::from(2 * n as i64 - 1))));
    let m22 = lin(-(&nn + ar), q1.commutator(ar) + &q1 - br);
    Ok(BlockMat2::new(m11, m12, m21, m22))
}

/// Closed-form `M̃^L_n` for quadratic Pearson data. With `h_2 = 0` this is the classical formula.
pub fn structure_semiclassical(data: &MopsData, pearson: &PearsonData, n: usize) -> Result<BlockMat2> {
    semiclassical_formula(data, pearson, n, true)
}

/// The same formula with the `h_2 ((p¹)² + η)` corrections in the diagonal blocks dropped.
pub fn structure_semiclassical_uncorrected(data: &MopsData, pearson: &PearsonData, n: usize) -> Result<BlockMat2> {
    semiclassical_formula(data, pearson, n, false)
}

fn semiclassical_formula(data: &MopsData, pearson: &PearsonData, n: usize, corrected: bool) -> Result<BlockMat2> {
    require_data(data, n)?;
    let d = data.dim;
    let [_, h1, h2] = &pearson.left;
    let [_, h1r, h2r] = &pearson.right;
    let id = Matrix::identity(d);
    let nn = Gq::from(n as i64);
    let z = |m: &Matrix| MatPoly::monomial(m.clone(), 1);
    let (cinv, cp) = (&data.c_inv[n], data.c_prev(n));
    let (p1, p2, p1n) = (data.p1_left(n), data.p2_left(n), data.p1_left(n + 1));
    let (q1, q2, q1n) = (data.p1_right(n), data.p2_right(n), data.p1_right(n + 1));
    let p1prev = if n == 0 { data.zero() } else { data.p1_left(n - 1) };
    let q1prev = if n == 0 { data.zero() } else { data.p1_right(n - 1) };
    let (eta_l, eta_r) = (&data.eta_left[n], &data.eta_right[n]);

    let m11_c = &(cinv * h2r) * &cp + p1.commutator(h1) + p2.commutator(h2) - &(&p1 * h2) * &p1 - &p1;
    let mut m11 = pearson.h_left() + z(&(id.scale(&nn) + p1.commutator(h2))) + mp(&m11_c);
    if corrected {
        m11 = m11 + mp(&(h2 * &(&(&p1 * &p1) + eta_l)));
    }
    let m12 = (z(h2) + mp(&(h1 - &(h2 * &p1n) + &p1 * h2))).mul_right(cinv)
        + (z(h2r) + mp(&(h1r + &(h2r * &q1) - &q1n * h2r))).mul_left(cinv)
        + mp(&cinv.scale(&Gq::from(2 * n as i64 + 1)));
    let m21 = -(z(h2) + mp(&(h1 - &(h2 * &p1) + &p1prev * h2))).mul_left(&cp)
        - (z(h2r) + mp(&(h1r + &(h2r * &q1prev) - &q1 * h2r))).mul_right(&cp)
        - mp(&cp.scale(&Gq::from(2 * n as i64 - 1)));
    let m22_c = -(&(&cp * h2) * cinv) + q1.commutator(h1r) + q2.commutator(h2r) + &(&q1 * h2r) * &q1 + &q1;
    let mut m22 = -pearson.h_right() - z(&(id.scale(&nn) + h2r.commutator(&q1))) + mp(&m22_c);
    if corrected {
        m22 = m22 - mp(&(&(&(&q1 * &q1) + eta_r) * h2r));
    }
    Ok(BlockMat2::new(m11, m12, m21, m22))
}

/// `z² T' - M̃_{n+1} T + T M̃_n` (left) or `z² T' - T M̃_{n+1} + M̃_n T` (right).
pub fn zero_curvature_residual(m_n: &BlockMat2, m_n1: &BlockMat2, t_n: &BlockMat2, right: bool) -> MatPoly {
    let (m0, m1, t) = (m_n.full(), m_n1.full(), t_n.full());
    let lhs = t.derivative().shift(2);
    if right {
        lhs - t * m1 + m0 * t
    } else {
        lhs - m1 * t + t * m0
    }
}

/// `z² F' + F²`, the Miura image `z² B(F)` with denominators cleared.
pub fn miura_cleared(f: &MatPoly) -> MatPoly {
    f.derivative().shift(2) + f * f
}

/// `[P_n, 0; -C_{n-1} P_{n-1}, 0]`, the polynomial column padded to a square block matrix.
pub fn poly_column(data: &MopsData, n: usize) -> MatPoly {
    let d = data.dim;
    let z = MatPoly::zero(d, d);
    let lower = data.p_left_prev(n).mul_left(&-data.c_prev(n));
    MatPoly::from_blocks(&data.p_left[n], &z, &lower, &z)
}

/// `[0, Q_n; 0, -C_{n-1} Q_{n-1}]` (with `I` in the lower block at `n = 0`).
pub fn series_column(data: &MopsData, series: &SecondKindSeries, n: usize) -> Result<Laurent> {
    need_series(series, n)?;
    let d = data.dim;
    let z = Laurent::zero(d, d, None);
    let lower = if n == 0 { lm(&Matrix::identity(d)) } else { series.q_left[n - 1].mul_left(&-&data.c[n - 1]) };
    Ok(Laurent::from_blocks(&z, &series.q_left[n], &z, &lower))
}

/// `z² X' + X H - M̃ X` on the polynomial column.
pub fn ode1_residual_polycolumn(data: &MopsData, m: &BlockMat2, pearson: &PearsonData, n: usize) -> MatPoly {
    let x = poly_column(data, n);
    x.derivative().shift(2) + &x * &h_left_block(pearson) - m.full() * &x
}

/// `z² X' + X H - M̃ X` on the series column, exact through the series truncation.
pub fn ode1_residual_seriescolumn(
    data: &MopsData,
    series: &SecondKindSeries,
    m: &BlockMat2,
    pearson: &PearsonData,
    n: usize,
) -> Result<Laurent> {
    let x = series_column(data, series, n)?;
    Ok(&(&x.derivative().shift(2) + &(&x * &lp(&h_left_block(pearson)))) - &(&lp(m.full()) * &x))
}

/// `z⁴ X'' + z² X'(2H + 2zI) + X(z² H' + H²) - (z² M̃' + M̃²) X` on the polynomial column.
pub fn ode2_residual(data: &MopsData, m: &BlockMat2, pearson: &PearsonData, n: usize) -> MatPoly {
    let x = poly_column(data, n);
    let h = h_left_block(pearson);
    let two_z = MatPoly::monomial(Matrix::scalar(h.rows(), Gq::from(2)), 1);
    let dx = x.derivative();
    dx.derivative().shift(4) + &dx.shift(2) * &(h.scale(&Gq::from(2)) + two_z) + &x * &miura_cleared(&h)
        - &miura_cleared(m.full()) * &x
}

/// The same second-order residual on the series column.
pub fn ode2_residual_seriescolumn(
    data: &MopsData,
    series: &SecondKindSeries,
    m: &BlockMat2,
    pearson: &PearsonData,
    n: usize,
) -> Result<Laurent> {
    let x = series_column(data, series, n)?;
    let h = h_left_block(pearson);
    let two_z = MatPoly::monomial(Matrix::scalar(h.rows(), Gq::from(2)), 1);
    let dx = x.derivative();
    let lhs = &(&dx.derivative().shift(4) + &(&dx.shift(2) * &lp(&(h.scale(&Gq::from(2)) + two_z)))) + &(&x * &lp(&miura_cleared(&h)));
    Ok(&lhs - &(&lp(&miura_cleared(m.full())) * &x))
}

/// Coefficients `(c2, c1, c0)` of the scalar equation obtained by eliminating `P_{n-1}` from
/// the 2x2 first-order system: `c2 y'' + c1 y' + c0 y = 0` with `c2 = z⁴`.
pub fn scalar_elimination(m: &BlockMat2, h: &MatPoly) -> Result<[MatPoly; 3]> {
    if m.half() != 1 {
        return Err(Error::Shape { op: "scalar elimination", lhs: (m.half(), m.half()), rhs: (1, 1) });
    }
    let m12 = m.block(0, 1);
    if m12.degree().unwrap_or(0) > 0 {
        return Err(Error::ParameterDegenerate("elimination needs a constant (1,2) block".into()));
    }
    let u = h - &m.block(0, 0);
    let v = h - &m.block(1, 1);
    let z4 = MatPoly::z(1).shift(3);
    let c1 = (MatPoly::z(1).scale(&Gq::from(2)) + &u + &v).shift(2);
    let c0 = u.derivative().shift(2) + &u * &v - &m12 * &m.block(1, 0);
    Ok([z4, c1, c0])
}

/// Difference between the eliminated scalar equation and `z² · [z² y'' + (az + b) y' - n(a+n-1) y]`.
pub fn scalar_elimination_residual(m: &BlockMat2, h: &MatPoly, n: usize, p: &ScalarBesselParams) -> Result<MatPoly> {
    let [c2, c1, c0] = scalar_elimination(m, h)?;
    let k = Gq::real(crate::exactnum::int(n as i64) * (&p.a + crate::exactnum::int(n as i64 - 1)));
    let lin = scalar_poly(vec![p.b.clone(), Gq::real(p.a.clone())]).shift(2);
    let r2 = c2 - MatPoly::z(1).shift(3);
    let r1 = c1 - lin;
    let r0 = c0 + scalar_poly(vec![k]).shift(2);
    Ok(MatPoly::from_blocks(&r2, &r1, &r0, &MatPoly::zero(1, 1)))
}

fn entry(identity: &str, n: usize, r: impl Into<crate::report::Residual>) -> ResidualEntry {
    let e = ResidualEntry::new(identity, n as i64, r);
    if n == 0 {
        e.convention().with_note("uses C_{-1} := 0")
    } else {
        e
    }
}

/// Degree bound for `M̃`: 1 for classical data, 2 otherwise.
pub fn degree_bound(pearson: &PearsonData) -> usize {
    if pearson.is_classical() { 1 } else { 2 }
}

/// Everything the structure suites need, computed once per weight.
pub struct StructureBundle {
    pub direct: Vec<DirectStructure>,
    pub formula: Vec<BlockMat2>,
}

pub fn structure_bundle(data: &MopsData, series: &SecondKindSeries, pearson: &PearsonData) -> Result<StructureBundle> {
    use rayon::prelude::*;
    let direct = (0..=data.n_max).into_par_iter().map(|n| structure_direct(data, series, pearson, n)).collect::<Result<Vec<_>>>()?;
    let formula = (0..=data.n_max).map(|n| structure_semiclassical(data, pearson, n)).collect::<Result<Vec<_>>>()?;
    Ok(StructureBundle { direct, formula })
}

/// Direct vs. formula structure matrices, the J-relation, polynomiality and degree bounds.
pub fn structure_check(b: &StructureBundle, data: &MopsData, pearson: &PearsonData) -> ResidualReport {
    let mut r = ResidualReport::new("structure-matrices");
    let bound = degree_bound(pearson);
    let uncorrected = !pearson.is_classical();
    for (n, (dir, f)) in b.direct.iter().zip(&b.formula).enumerate() {
        r.push(entry("M^L (general formula) = poly part of (z^2 Y' + Y H) Y^-1", n, f.full() - dir.left.full()));
        r.push(entry("(z^2 Y' + Y H) Y^-1 has no negative powers", n, dir.left_tail.clone()));
        r.push(entry("(Y^R)^-1 (z^2 Y^R' + H^R Y^R) has no negative powers", n, dir.right_tail.clone()));
        r.push(entry("M^R = J M^L J", n, dir.right.full() - right_from_left(&dir.left).full()));
        let deg = dir.left.full().degree().unwrap_or(0);
        let excess = if deg > bound { Gq::from((deg - bound) as i64) } else { Gq::from(0) };
        r.push(ResidualEntry::new(format!("deg M^L <= {bound}"), n as i64, excess));
        if uncorrected {
            if let Ok(u) = structure_semiclassical_uncorrected(data, pearson, n) {
                r.push(
                    ResidualEntry::new("M^L without the h_2((p1)^2 + eta) diagonal terms", n as i64, u.full() - dir.left.full())
                        .informational()
                        .with_note("characterizes the diagonal-block correction"),
                );
            }
        }
    }
    r
}

pub fn zero_curvature_check(b: &StructureBundle, data: &MopsData) -> Result<ResidualReport> {
    let mut r = ResidualReport::new("zero-curvature");
    for n in 0..data.n_max {
        let t = build_transfer(data, n)?;
        let (m0, m1) = (&b.direct[n].left, &b.direct[n + 1].left);
        r.push(entry("z^2 T^L' = M^L_{n+1} T^L - T^L M^L_n", n, zero_curvature_residual(m0, m1, &t.left, false)));
        let (r0, r1) = (&b.direct[n].right, &b.direct[n + 1].right);
        r.push(entry("z^2 T^R' = T^R M^R_{n+1} - M^R_n T^R", n, zero_curvature_residual(r0, r1, &t.right, true)));
    }
    Ok(r)
}

pub fn transfer_check(data: &MopsData, series: &SecondKindSeries) -> Result<ResidualReport> {
    let mut r = ResidualReport::new("transfer");
    for n in 0..data.n_max {
        let t = build_transfer(data, n)?;
        let yl = &y_left(data, series, n + 1)? - &(&lp(t.left.full()) * &y_left(data, series, n)?);
        r.push(entry("Y^L_{n+1} = T^L_n Y^L_n", n, yl));
        let yr = &y_right(data, series, n + 1)? - &(&y_right(data, series, n)? * &lp(t.right.full()));
        r.push(entry("Y^R_{n+1} = Y^R_n T^R_n", n, yr));
    }
    for n in 0..=data.n_max {
        let y = y_left(data, series, n)?;
        let id = lm(&Matrix::identity(2 * data.dim));
        r.push(entry("Y^L_n J Y^R_n J^-1 = I", n, &(&y * &y_left_inv(data, series, n)?) - &id));
    }
    Ok(r)
}

pub fn ode_check(b: &StructureBundle, data: &MopsData, series: &SecondKindSeries, pearson: &PearsonData) -> Result<ResidualReport> {
    let mut r = ResidualReport::new("ode");
    for n in 0..=data.n_max {
        let m = &b.formula[n];
        r.push(entry("z^2 Y' + Y H = M Y (polynomial column)", n, ode1_residual_polycolumn(data, m, pearson, n)));
        r.push(entry("z^2 Y' + Y H = M Y (series column)", n, ode1_residual_seriescolumn(data, series, m, pearson, n)?));
        r.push(entry("second-order system via Miura map (polynomial column)", n, ode2_residual(data, m, pearson, n)));
        r.push(entry(
            "second-order system via Miura map (series column)",
            n,
            ode2_residual_seriescolumn(data, series, m, pearson, n)?,
        ));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use crate::mops_engine::{second_kind_series, second_kind_table_len, solve_mops};
    use crate::weights_moments::{matrix_moment_table, WeightSpec};
    use num_traits::One;

    fn scalar(n_max: usize, extra: usize) -> (MopsData, SecondKindSeries, PearsonData) {
        let spec = WeightSpec::scalar(int(3), Gq::one()).unwrap();
        let t = matrix_moment_table(&spec, second_kind_table_len(n_max, extra)).unwrap();
        let d = solve_mops(&t, n_max).unwrap();
        let s = second_kind_series(&d, &t, extra).unwrap();
        (d, s, spec.pearson.unwrap())
    }

    #[test]
    fn scalar_transfer_at_zero() {
        let (d, _, _) = scalar(2, 4);
        let t = build_transfer(&d, 0).unwrap();
        let expect = MatPoly::new(
            2,
            2,
            vec![Matrix::from_ratios(&[&[(1, 3), (1, 1)], &[(-1, 1), (0, 1)]]), Matrix::from_ints(&[&[1, 0], &[0, 0]])],
        )
        .unwrap();
        assert_eq!(t.left.full(), &expect);
        assert!(t.left.block(1, 1).is_zero());
    }

    #[test]
    fn scalar_identities_hold() {
        let (d, s, p) = scalar(5, 10);
        let b = structure_bundle(&d, &s, &p).unwrap();
        for rep in [
            structure_check(&b, &d, &p),
            zero_curvature_check(&b, &d).unwrap(),
            transfer_check(&d, &s).unwrap(),
            ode_check(&b, &d, &s, &p).unwrap(),
        ] {
            assert!(rep.pass(), "{}: {:?}", rep.suite, rep.failures().first());
        }
        let params = ScalarBesselParams::new(int(3), Gq::one()).unwrap();
        for n in 0..=5 {
            assert!(scalar_elimination_residual(&b.formula[n], &p.h_left(), n, &params).unwrap().is_zero());
        }
    }

    #[test]
    fn perturbed_xi_breaks_zero_curvature() {
        let (mut d, s, p) = scalar(4, 8);
        let b = structure_bundle(&d, &s, &p).unwrap();
        d.xi_left[2] = &d.xi_left[2] + &Matrix::identity(1);
        assert!(!zero_curvature_check(&b, &d).unwrap().pass());
    }

    #[test]
    fn wrong_pearson_breaks_ode() {
        let (d, s, mut p) = scalar(3, 8);
        let b = structure_bundle(&d, &s, &p).unwrap();
        p.left[0] = &p.left[0] + &Matrix::identity(1);
        assert!(!ode_check(&b, &d, &s, &p).unwrap().pass());
    }
}
