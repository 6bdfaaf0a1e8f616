//! Scalar generalized Bessel polynomials `y_n(x; a, b)` and their closed-form coefficients.
//!
//! Two parameter conventions meet here. `y_n(x; a, b)` is orthogonal for the loop weight
//! `z^{a-2} e^{-b/z}`; `B_n` denotes the monic `y_n(x; a+2, b)`, orthogonal for
//! `x^a e^{-b/x}`, and the tables `β_n, γ_n, g_n, h_n` belong to `B_n`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactnum::{extended_product, factorial, int, pochhammer, Gq, Rational};
use crate::laurent::Laurent;
use crate::polymat::{MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarBesselParams {
    pub a: Rational,
    pub b: Gq,
}

impl ScalarBesselParams {
    pub fn new(a: Rational, b: Gq) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::ParameterDegenerate("b must be nonzero".into()));
        }
        Ok(Self { a, b })
    }

    /// Parameters of `B_n`, i.e. `(a + 2, b)`.
    pub fn shifted(&self) -> Self {
        Self { a: &self.a + int(2), b: self.b.clone() }
    }
}

pub fn scalar_poly(coeffs: Vec<Gq>) -> MatPoly {
    MatPoly::new(1, 1, coeffs.into_iter().map(|c| Matrix::scalar(1, c)).collect()).expect("1x1")
}

pub fn scalar_of(m: &Matrix) -> Gq {
    m.get(0, 0).clone()
}

/// Coefficients of `y_n(x; a, b) = Σ_k (-n)_k (a+n-1)_k / k! · (-x/b)^k`.
pub fn gbp_coeffs(n: usize, p: &ScalarBesselParams) -> Result<Vec<Gq>> {
    let mb_inv = -p.b.inv()?;
    let top = &p.a + int(n as i64 - 1);
    Ok((0..=n)
        .map(|k| {
            let c = pochhammer(&int(-(n as i64)), k) * pochhammer(&top, k) / Rational::from_integer(factorial(k));
            mb_inv.pow(k as u32).scale(&c)
        })
        .collect())
}

/// Leading coefficient `(a+n-1)_n / b^n` of `y_n(x; a, b)`.
pub fn gbp_leading(n: usize, p: &ScalarBesselParams) -> Result<Gq> {
    let num = Gq::real(pochhammer(&(&p.a + int(n as i64 - 1)), n));
    Ok(num * p.b.inv()?.pow(n as u32))
}

/// Monic `y_n(x; a, b)`.
pub fn monic_gbp(n: usize, p: &ScalarBesselParams) -> Result<MatPoly> {
    let c = gbp_coeffs(n, p)?;
    let lead = c[n].clone();
    if lead.is_zero() {
        return Err(Error::ParameterDegenerate(format!("y_{n} has vanishing leading coefficient (a + n - 1 hits a nonpositive integer)")));
    }
    let inv = lead.inv()?;
    Ok(scalar_poly(c.into_iter().map(|x| x * &inv).collect()))
}

/// `B_n` = monic `y_n(x; a+2, b)`.
pub fn monic_bessel(n: usize, p: &ScalarBesselParams) -> Result<MatPoly> {
    monic_gbp(n, &p.shifted())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarCoeffTable {
    pub beta: Vec<Gq>,
    pub gamma: Vec<Gq>,
    pub g: Vec<Gq>,
    pub h: Vec<Gq>,
}

fn checked_ratio(num: Gq, den: Rational, what: &str) -> Result<Gq> {
    if den.is_zero() {
        return Err(Error::ParameterDegenerate(format!("vanishing denominator in {what}")));
    }
    Ok(num.scale(&den.recip()))
}

pub fn beta_n(n: i64, p: &ScalarBesselParams) -> Result<Gq> {
    let a = &p.a;
    let den = (a + int(2 * n)) * (a + int(2 * n + 2));
    checked_ratio(-p.b.scale(a), den, "beta_n")
}

pub fn gamma_n(n: i64, p: &ScalarBesselParams) -> Result<Gq> {
    if n == 0 {
        return Ok(Gq::zero());
    }
    let a = &p.a;
    let den = (a + int(2 * n - 1)) * (a + int(2 * n)).pow(2) * (a + int(2 * n + 1));
    checked_ratio(-(&p.b * &p.b).scale(&(int(n) * (a + int(n)))), den, "gamma_n")
}

pub fn g_n(n: i64, p: &ScalarBesselParams) -> Result<Gq> {
    let a = &p.a;
    let den = (a + int(2 * n)) * (a + int(2 * n + 2));
    checked_ratio(-p.b.scale(&(int(2 * n) * (a + int(n + 1)))), den, "g_n")
}

pub fn h_n(n: i64, p: &ScalarBesselParams) -> Result<Gq> {
    if n == 0 {
        return Ok(Gq::zero());
    }
    let a = &p.a;
    let den = (a + int(2 * n - 1)) * (a + int(2 * n)).pow(2) * (a + int(2 * n + 1));
    checked_ratio((&p.b * &p.b).scale(&(int(n) * (a + int(n)) * (a + int(n + 1)))), den, "h_n")
}

pub fn scalar_coeff_table(n_max: usize, p: &ScalarBesselParams) -> Result<ScalarCoeffTable> {
    let col = |f: fn(i64, &ScalarBesselParams) -> Result<Gq>| (0..=n_max as i64).map(|n| f(n, p)).collect::<Result<Vec<_>>>();
    Ok(ScalarCoeffTable { beta: col(beta_n)?, gamma: col(gamma_n)?, g: col(g_n)?, h: col(h_n)? })
}

fn sc(x: &Gq) -> MatPoly {
    MatPoly::constant(Matrix::scalar(1, x.clone()))
}

/// `x B_n - B_{n+1} - β_n B_n - γ_n B_{n-1}` for `n < polys.len() - 1`.
pub fn recurrence_residuals(table: &ScalarCoeffTable, polys: &[MatPoly]) -> ResidualReport {
    let mut r = ResidualReport::new("scalar-recurrence");
    for n in 0..polys.len().saturating_sub(1).min(table.beta.len()) {
        let prev = if n == 0 { MatPoly::zero(1, 1) } else { &polys[n - 1] * &sc(&table.gamma[n]) };
        let res = polys[n].shift(1) - &polys[n + 1] - &polys[n] * &sc(&table.beta[n]) - prev;
        r.push(ResidualEntry::new("x B_n = B_{n+1} + beta_n B_n + gamma_n B_{n-1}", n as i64, res));
    }
    r
}

/// `x² B_n' - n B_{n+1} - g_n B_n - h_n B_{n-1}` for `n < polys.len() - 1`.
pub fn structure_residuals(table: &ScalarCoeffTable, polys: &[MatPoly]) -> ResidualReport {
    let mut r = ResidualReport::new("scalar-structure");
    for n in 0..polys.len().saturating_sub(1).min(table.g.len()) {
        let prev = if n == 0 { MatPoly::zero(1, 1) } else { &polys[n - 1] * &sc(&table.h[n]) };
        let res = polys[n].derivative().shift(2)
            - polys[n + 1].scale(&Gq::from(n as i64))
            - &polys[n] * &sc(&table.g[n])
            - prev;
        r.push(ResidualEntry::new("x^2 B_n' = n B_{n+1} + g_n B_n + h_n B_{n-1}", n as i64, res));
    }
    r
}

pub fn check_scalar_recurrence(n_max: usize, p: &ScalarBesselParams) -> Result<ResidualReport> {
    let table = scalar_coeff_table(n_max, p)?;
    let polys = (0..=n_max + 1).map(|n| monic_bessel(n, p)).collect::<Result<Vec<_>>>()?;
    Ok(recurrence_residuals(&table, &polys))
}

pub fn check_scalar_structure(n_max: usize, p: &ScalarBesselParams) -> Result<ResidualReport> {
    let table = scalar_coeff_table(n_max, p)?;
    let polys = (0..=n_max + 1).map(|n| monic_bessel(n, p)).collect::<Result<Vec<_>>>()?;
    Ok(structure_residuals(&table, &polys))
}

/// Expands `f` in a monic basis `basis[k]` (degree `k`), top-down; returns the
/// coefficients (low to high) and whatever remainder is left when the basis runs out.
pub fn expand_in_monic_basis(f: &MatPoly, basis: &[MatPoly]) -> (Vec<Matrix>, MatPoly) {
    let (r, c) = f.shape();
    let mut rem = f.clone();
    let top = f.degree().unwrap_or(0).min(basis.len().saturating_sub(1));
    let mut out = vec![Matrix::zeros(r, c); top + 1];
    for k in (0..=top).rev() {
        let ck = rem.coeff(k);
        if !ck.is_zero() {
            rem = rem - basis[k].mul_left(&ck);
        }
        out[k] = ck;
    }
    (out, rem)
}

/// `⟨P_n, P_n⟩ / ⟨P_0, P_0⟩` for monic `y_n(x; a, b)` from the closed-form loop norm
/// `(-1)^n n! / ((a+2n-1) Γ(a+n-1))` (common factors dropped), divided by the squared
/// leading coefficient.
pub fn loop_norm_ratio(n: usize, p: &ScalarBesselParams) -> Result<Gq> {
    let a = &p.a;
    let norm = |k: usize| -> Result<Rational> {
        let sign = if k.is_multiple_of(2) { int(1) } else { int(-1) };
        let gamma_ratio = extended_product(0, k as i64 - 2, |j| a + int(j))?;
        let den = (a + int(2 * k as i64 - 1)) * gamma_ratio;
        if den.is_zero() {
            return Err(Error::ParameterDegenerate("vanishing loop norm".into()));
        }
        Ok(sign * Rational::from_integer(factorial(k)) / den)
    };
    let ratio = norm(n)? / norm(0)?;
    let lead = gbp_leading(n, p)?;
    Gq::real(ratio).checked_div(&(&lead * &lead))
}

/// `z² P'' + (a z + b) P' - n(a+n-1) P` for the monic `y_n(x; a, b)`.
pub fn scalar_ode_residual_p(pn: &MatPoly, n: usize, p: &ScalarBesselParams) -> MatPoly {
    let lin = scalar_poly(vec![p.b.clone(), Gq::real(p.a.clone())]);
    let k = Gq::real(int(n as i64) * (&p.a + int(n as i64 - 1)));
    pn.derivative().derivative().shift(2) + &lin * &pn.derivative() - pn.scale(&k)
}

/// `z² Q'' + ((4-a) z - b) Q' - (n+1)(n+a-2) Q` on a truncated second-kind series.
pub fn scalar_ode_residual_q(qn: &Laurent, n: usize, p: &ScalarBesselParams) -> Laurent {
    let lin = Laurent::from_poly(&scalar_poly(vec![-p.b.clone(), Gq::real(int(4) - &p.a)]));
    let k = Gq::real(int(n as i64 + 1) * (&p.a + int(n as i64 - 2)));
    let d = qn.derivative();
    &(&d.derivative().shift(2) + &(&lin * &d)) - &qn.scale(&k)
}

/// Blocks `[M̃11, M̃12, M̃21, M̃22]` of the scalar structure matrix for `z^{a-2} e^{-b/z}`
/// with `h^L = h^R = ((a-2) z + b) / 2`, given `p¹_n`, `C_n^{-1}` and `C_{n-1}`.
pub fn scalar_structure_entries(n: usize, p: &ScalarBesselParams, p1: &Gq, cinv: &Gq, c_prev: &Gq) -> [MatPoly; 4] {
    let half = Rational::new(1.into(), 2.into());
    let am2 = Gq::real((&p.a - int(2)) * &half);
    let nn = Gq::from(n as i64);
    let bh = p.b.scale(&half);
    let m11 = scalar_poly(vec![&bh - p1, &am2 + &nn]);
    let m12 = sc(&cinv.scale(&(&p.a + int(2 * n as i64 - 1))));
    let m21 = sc(&-c_prev.scale(&(&p.a + int(2 * n as i64 - 3))));
    let m22 = scalar_poly(vec![p1 - &bh, -(&am2 + &nn)]);
    [m11, m12, m21, m22]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use num_traits::One;

    fn params(a: Rational, b: i64) -> ScalarBesselParams {
        ScalarBesselParams::new(a, Gq::from(b)).unwrap()
    }

    #[test]
    fn y1_for_a3_b1() {
        let p = params(int(3), 1);
        assert_eq!(monic_gbp(1, &p).unwrap(), scalar_poly(vec![Gq::ratio(1, 3), Gq::one()]));
        assert_eq!(gbp_coeffs(0, &p).unwrap(), vec![Gq::one()]);
    }

    #[test]
    fn closed_form_beta_gamma_satisfy_recurrence() {
        for (a, b) in [(int(3), 1), (rat(5, 2), 2), (rat(7, 3), 5)] {
            let p = params(a, b);
            assert!(check_scalar_recurrence(8, &p).unwrap().pass());
            assert!(check_scalar_structure(8, &p).unwrap().pass());
        }
    }

    #[test]
    fn perturbed_table_is_flagged() {
        let p = params(int(3), 1);
        let mut t = scalar_coeff_table(4, &p).unwrap();
        t.gamma[2] = &t.gamma[2] + &Gq::ratio(1, 1000);
        let polys: Vec<_> = (0..=5).map(|n| monic_bessel(n, &p).unwrap()).collect();
        let r = recurrence_residuals(&t, &polys);
        assert_eq!(r.failures().iter().map(|e| e.n).collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let p = ScalarBesselParams::new(int(-1), Gq::one()).unwrap();
        assert!(matches!(monic_gbp(2, &p), Err(Error::ParameterDegenerate(_))));
        assert!(ScalarBesselParams::new(int(3), Gq::zero()).is_err());
    }

    #[test]
    fn p_ode_holds_for_closed_forms() {
        let p = params(rat(5, 2), 2);
        for n in 0..=10 {
            assert!(scalar_ode_residual_p(&monic_gbp(n, &p).unwrap(), n, &p).is_zero(), "n = {n}");
        }
    }

    #[test]
    fn norm_ratio_at_zero_is_one() {
        assert_eq!(loop_norm_ratio(0, &params(int(3), 1)).unwrap(), Gq::one());
    }

    #[test]
    fn expansion_in_basis_round_trips() {
        let p = params(int(3), 1);
        let basis: Vec<_> = (0..=4).map(|n| monic_bessel(n, &p).unwrap()).collect();
        let f = basis[3].shift(1);
        let (c, rem) = expand_in_monic_basis(&f, &basis);
        assert!(rem.is_zero());
        assert_eq!(scalar_of(&c[4]), Gq::one());
        assert_eq!(scalar_of(&c[3]), beta_n(3, &p).unwrap());
        assert_eq!(scalar_of(&c[2]), gamma_n(3, &p).unwrap());
    }
}
