//! Explicit 2x2 families with closed-form MOPs, norms, recurrence coefficients and
//! structure matrices, all built on the scalar `B_n` with parameters `(a, b)`.
//!
//! * classical: `W = [[(a(a+1)/b² + c²) x², c x], [c x, 1]] x^{a-2} e^{-b/x}`
//! * semiclassical: `W = [[1 + c² x², c x], [c x, 1]] x^a e^{-b/x}`
//!
//! Every quantity here is computed from scalar closed forms only, never from moments.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{extended_product, factorial, int, Gq, Rational};
use crate::polymat::{BlockMat2, MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};
use crate::scalar_bessel::{beta_n, g_n, gamma_n, h_n, monic_bessel, ScalarBesselParams};
use crate::weights_moments::{ExampleFamily, ExampleTag, PearsonData, WeightSpec};

#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub family: ExampleFamily,
    pub a: Rational,
    pub b: Gq,
    pub c: Gq,
    params: ScalarBesselParams,
}

fn r(x: Rational) -> Gq {
    Gq::real(x)
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn mat(e: [[Gq; 2]; 2]) -> Matrix {
    let [[a, b], [c, d]] = e;
    Matrix::from_rows(vec![vec![a, b], vec![c, d]]).expect("2x2")
}

fn diag(a: Gq, d: Gq) -> Matrix {
    mat([[a, Gq::zero()], [Gq::zero(), d]])
}

fn eye() -> Matrix {
    Matrix::identity(2)
}

fn zero2() -> Matrix {
    Matrix::zeros(2, 2)
}

fn sc(s: &Gq) -> Matrix {
    Matrix::scalar(2, s.clone())
}

fn div(num: Gq, den: Rational, what: &str) -> Result<Gq> {
    if den.is_zero() {
        return Err(Error::ParameterDegenerate(format!("vanishing denominator in {what}")));
    }
    Ok(num.scale(&den.recip()))
}

/// Scalar polynomial (1x1) times a constant matrix.
fn lift(p: &MatPoly, m: &Matrix) -> MatPoly {
    if p.is_zero() {
        return MatPoly::zero(m.rows(), m.cols());
    }
    MatPoly::new(m.rows(), m.cols(), p.coeffs().iter().map(|c| m.scale(c.get(0, 0))).collect()).expect("uniform")
}

fn zx(m: &Matrix) -> MatPoly {
    MatPoly::z_minus(m)
}

fn cst(m: &Matrix) -> MatPoly {
    MatPoly::constant(m.clone())
}

impl ClosedForm {
    pub fn new(family: ExampleFamily, a: Rational, b: Gq, c: Gq) -> Result<Self> {
        let params = ScalarBesselParams::new(a.clone(), b.clone())?;
        Ok(Self { family, a, b, c, params })
    }

    pub fn from_tag(tag: &ExampleTag) -> Result<Self> {
        Self::new(tag.family, tag.a.clone(), tag.b.clone(), tag.c.clone())
    }

    pub fn params(&self) -> &ScalarBesselParams {
        &self.params
    }

    fn ga(&self) -> Gq {
        r(self.a.clone())
    }

    pub fn weight_spec(&self) -> Result<WeightSpec> {
        let (a, b, c) = (self.ga(), self.b.clone(), self.c.clone());
        let c2 = &c * &c;
        let off = mat([[Gq::zero(), c.clone()], [c.clone(), Gq::zero()]]);
        let bh = b.scale(&half());
        let (alpha, phi, pearson) = match self.family {
            ExampleFamily::Classical => {
                let s = (&a * &(&a + &Gq::one())).checked_div(&(&b * &b))?;
                let phi = vec![diag(Gq::zero(), Gq::one()), off, diag(&s + &c2, Gq::zero())];
                let h1 = diag(a.scale(&half()), (&a - &Gq::from(2)).scale(&half()));
                let p = PearsonData { left: [sc(&bh), h1.clone(), zero2()], right: [sc(&bh), h1, zero2()] };
                (&self.a - int(2), phi, p)
            }
            ExampleFamily::Semiclassical => {
                let phi = vec![eye(), off, diag(c2, Gq::zero())];
                let h2 = mat([[Gq::zero(), c.clone()], [Gq::zero(), Gq::zero()]]);
                let h1 = sc(&a.scale(&half()));
                let p = PearsonData { left: [sc(&bh), h1.clone(), h2.clone()], right: [sc(&bh), h1, h2.transpose()] };
                (self.a.clone(), phi, p)
            }
        };
        let mut spec = WeightSpec::new(alpha, b, MatPoly::new(2, 2, phi)?, Some(pearson))?;
        spec.example = Some(ExampleTag { family: self.family, a: self.a.clone(), b: self.b.clone(), c: self.c.clone() });
        Ok(spec)
    }

    pub fn beta(&self, n: i64) -> Result<Gq> {
        beta_n(n, &self.params)
    }

    pub fn gamma(&self, n: i64) -> Result<Gq> {
        gamma_n(n, &self.params)
    }

    pub fn a_mat(&self, n: usize) -> Result<Matrix> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let ni = n as i64;
        Ok(match self.family {
            ExampleFamily::Classical => {
                let e12 = div(b * c, a + int(2 * ni), "a_n")?;
                let e22 = r(a * (a + int(1)) * (a + int(ni - 1))) - (b * b * c * c).scale(&int(ni));
                mat([[Gq::one(), e12], [Gq::zero(), e22]])
            }
            ExampleFamily::Semiclassical => mat([
                [Gq::one(), -(c * &self.beta(ni)?)],
                [Gq::zero(), Gq::one() + &(c * c) * &self.gamma(ni)?],
            ]),
        })
    }

    pub fn b_mat(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Ok(zero2());
        }
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let ni = n as i64;
        Ok(match self.family {
            ExampleFamily::Classical => {
                let b2 = b * b;
                let e12 = div((&b2 * c).scale(&int(ni)), (a + int(2 * ni - 1)) * (a + int(2 * ni)).pow(2), "b_n")?;
                let e21 = (&b2 * c).scale(&int(ni));
                let inner = r(int(2) * a * (a + int(ni)) + int(2 * ni - 2)) + &b2 * &(c * c);
                let e22 = div(
                    (b * &inner).scale(&(a * int(ni))),
                    (a + int(2 * ni - 2)) * (a + int(2 * ni)),
                    "b_n",
                )?;
                mat([[Gq::zero(), e12], [e21, e22]])
            }
            ExampleFamily::Semiclassical => {
                let g = self.gamma(ni)?;
                let cg = -(c * &g);
                mat([[Gq::zero(), cg.clone()], [cg, &(c * c) * &(&self.beta(ni - 1)? * &g)]])
            }
        })
    }

    pub fn c_mat(&self, n: usize) -> Result<Matrix> {
        if n < 2 {
            return Ok(zero2());
        }
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let ni = n as i64;
        let e22 = match self.family {
            ExampleFamily::Classical => {
                let b2 = b * b;
                let num = (&b2 * &(r(a * a + a) + &b2 * &(c * c))).scale(&(int((ni - 1) * ni) * (a + int(ni - 1))));
                div(
                    num,
                    (a + int(2 * ni - 3)) * (a + int(2 * ni - 2)).pow(2) * (a + int(2 * ni - 1)),
                    "c_n",
                )?
            }
            ExampleFamily::Semiclassical => &(c * c) * &(&self.gamma(ni - 1)? * &self.gamma(ni)?),
        };
        Ok(diag(Gq::zero(), e22))
    }

    /// `b̃_n = a_n^{-1} b_n` (zero for `n = 0`).
    pub fn b_tilde(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Ok(zero2());
        }
        self.a_mat(n)?.solve_right(&self.b_mat(n)?)
    }

    /// `c̃_n = a_n^{-1} c_n` (zero for `n < 2`).
    pub fn c_tilde(&self, n: usize) -> Result<Matrix> {
        if n < 2 {
            return Ok(zero2());
        }
        self.a_mat(n)?.solve_right(&self.c_mat(n)?)
    }

    fn bessel(&self, n: i64) -> Result<MatPoly> {
        if n < 0 {
            return Ok(MatPoly::zero(1, 1));
        }
        monic_bessel(n as usize, &self.params)
    }

    /// `B_n I + b̃_n B_{n-1} + c̃_n B_{n-2}`.
    pub fn monic(&self, n: usize) -> Result<MatPoly> {
        let ni = n as i64;
        Ok(lift(&self.bessel(ni)?, &eye())
            + lift(&self.bessel(ni - 1)?, &self.b_tilde(n)?)
            + lift(&self.bessel(ni - 2)?, &self.c_tilde(n)?))
    }

    /// `ξ_n = β_n I + b̃_n - b̃_{n+1}`.
    pub fn xi(&self, n: usize) -> Result<Matrix> {
        Ok(sc(&self.beta(n as i64)?) + self.b_tilde(n)? - self.b_tilde(n + 1)?)
    }

    /// `η_n = γ_n I + β_{n-1} b̃_n + c̃_n - c̃_{n+1} - ξ_n b̃_n` (zero for `n = 0`).
    pub fn eta(&self, n: usize) -> Result<Matrix> {
        if n == 0 {
            return Ok(zero2());
        }
        let ni = n as i64;
        let bt = self.b_tilde(n)?;
        Ok(sc(&self.gamma(ni)?) + bt.scale(&self.beta(ni - 1)?) + self.c_tilde(n)? - self.c_tilde(n + 1)? - &self.xi(n)? * &bt)
    }

    pub fn c_inv(&self, n: usize) -> Result<Matrix> {
        let ai = self.a_mat(n)?.inverse()?;
        let ni = n as i64;
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let core = match self.family {
            ExampleFamily::Classical => {
                let b2n = b.pow(2 * n as u32);
                let fact = |k: usize| Rational::from_integer(factorial(k));
                let num11 = b2n.scale(&(a * (a + int(1)) * fact(n) * (a + int(ni))))
                    - (&b.pow(2 * n as u32 + 2) * &(c * c)).scale(&fact(n + 1));
                let den11 = extended_product(0, 2 * ni, |j| a - int(j) + int(2 * ni))?
                    * extended_product(0, ni + 1, |j| a + int(j) + int(ni))?;
                let num22 = (&b2n * &(r(a * (a + int(1)) * (a + int(ni - 1))) - (b * b * c * c).scale(&int(ni))))
                    .scale(&fact(n));
                let den22 = extended_product(2, 2 * ni - 2, |j| a - int(j) + int(2 * ni))?
                    * extended_product(0, ni - 1, |j| a + int(j) + int(ni))?;
                let sign = if n.is_multiple_of(2) { Gq::one() } else { -Gq::one() };
                diag(div(num11, den11, "C_n^-1")?, div(num22, den22, "C_n^-1")?).scale(&sign)
            }
            ExampleFamily::Semiclassical => {
                let c2 = c * c;
                let prod = (1..=ni).map(|j| self.gamma(j)).collect::<Result<Vec<_>>>()?.into_iter().product::<Gq>();
                diag(Gq::one() + &c2 * &self.gamma(ni + 1)?, Gq::one() + &c2 * &self.gamma(ni)?).scale(&prod)
            }
        };
        Ok(&(&ai * &core) * &ai.transpose())
    }

    fn h_left(&self) -> Result<[Matrix; 3]> {
        Ok(self.weight_spec()?.pearson.expect("examples carry Pearson data").left)
    }

    /// Coefficients in `x² B̃_n' + B̃_n h^L = h_2 B̃_{n+2} + r_n B̃_{n+1} + s_n B̃_n + t_n B̃_{n-1} + u_n B̃_{n-2}`
    /// (`h_2 = 0`, `u_n = 0` for the classical family).
    pub fn rstu(&self, n: usize) -> Result<[Matrix; 4]> {
        let ni = n as i64;
        let p = &self.params;
        let a = self.ga();
        let bh = self.b.scale(&half());
        let bt = |k: i64| if k < 0 { Ok(zero2()) } else { self.b_tilde(k as usize) };
        let ct = |k: i64| if k < 0 { Ok(zero2()) } else { self.c_tilde(k as usize) };
        let be = |k: i64| self.beta(k);
        let ga = |k: i64| self.gamma(k);
        let g = |k: i64| g_n(k, p);
        let h = |k: i64| h_n(k, p);
        let beta_prev = |k: i64| if k >= 1 { be(k - 1) } else { Ok(Gq::zero()) };
        match self.family {
            ExampleFamily::Classical => {
                let al = self.h_left()?[1].clone();
                let rn = sc(&Gq::from(ni)) + &al;
                let sn = sc(&(&bh + &g(ni)?)) + bt(ni)?.scale(&Gq::from(ni - 1)) + &(sc(&be(ni)?) + bt(ni)?) * &al
                    - &rn * &bt(ni + 1)?;
                let tn = if n == 0 {
                    zero2()
                } else {
                    sc(&h(ni)?) + bt(ni)?.scale(&(&g(ni - 1)? + &bh)) + ct(ni)?.scale(&Gq::from(ni - 2))
                        + &(sc(&ga(ni)?) + bt(ni)?.scale(&beta_prev(ni)?) + ct(ni)?) * &al
                        - &rn * &ct(ni + 1)?
                        - &sn * &bt(ni)?
                };
                Ok([rn, sn, tn, zero2()])
            }
            ExampleFamily::Semiclassical => {
                let h2 = self.h_left()?[2].clone();
                let ah = a.scale(&half());
                let rn = sc(&(&ah + &Gq::from(ni))) + &(sc(&(&be(ni + 1)? + &be(ni)?)) + bt(ni)?) * &h2 - &h2 * &bt(ni + 2)?;
                let sn = bt(ni)?.scale(&(&ah + &Gq::from(ni - 1)))
                    + sc(&(&(&bh + &(&ah * &be(ni)?)) + &g(ni)?))
                    + &(sc(&(&(&be(ni)? * &be(ni)?) + &(&ga(ni + 1)? + &ga(ni)?))) + bt(ni)?.scale(&(&beta_prev(ni)? + &be(ni)?)))
                        * &h2
                    - &h2 * &ct(ni + 2)?
                    - &rn * &bt(ni + 1)?;
                if n == 0 {
                    return Ok([rn, sn, zero2(), zero2()]);
                }
                let bp = beta_prev(ni)?;
                let tn = (sc(&ga(ni)?) + bt(ni)?.scale(&bp) + ct(ni)?).scale(&ah)
                    + sc(&h(ni)?)
                    + &(sc(&(&(&bp + &be(ni)?) * &ga(ni)?)) + bt(ni)?.scale(&(&(&bp * &bp) + &(&ga(ni - 1)? + &ga(ni)?))))
                        * &h2
                    + bt(ni)?.scale(&(&g(ni - 1)? + &bh))
                    + ct(ni)?.scale(&Gq::from(ni - 2))
                    - &rn * &ct(ni + 1)?
                    - &sn * &bt(ni)?;
                if n == 1 {
                    return Ok([rn, sn, tn, zero2()]);
                }
                let bpp = be(ni - 2)?;
                let un = &(bt(ni)?.scale(&(&(&bpp + &bp) * &ga(ni - 1)?)) + sc(&(&ga(ni)? * &ga(ni - 1)?))) * &h2
                    + (ct(ni)?.scale(&bpp) + bt(ni)?.scale(&ga(ni - 1)?)).scale(&ah)
                    + ct(ni)?.scale(&g(ni - 2)?)
                    + bt(ni)?.scale(&h(ni - 1)?)
                    + ct(ni)?.scale(&bh)
                    - &sn * &ct(ni)?
                    - &tn * &bt(ni - 1)?;
                Ok([rn, sn, tn, un])
            }
        }
    }

    /// Residual of the expansion of `x² B̃_n' + B̃_n h^L` in the `B̃` basis.
    pub fn expansion_residual(&self, n: usize) -> Result<MatPoly> {
        let [h0, h1, h2] = self.h_left()?;
        let hl = MatPoly::new(2, 2, vec![h0, h1, h2.clone()])?;
        let [rn, sn, tn, un] = self.rstu(n)?;
        let bn = self.monic(n)?;
        let prev = |k: usize| if n >= k { self.monic(n - k) } else { Ok(MatPoly::zero(2, 2)) };
        Ok(bn.derivative().shift(2) + &bn * &hl
            - self.monic(n + 2)?.mul_left(&h2)
            - self.monic(n + 1)?.mul_left(&rn)
            - bn.mul_left(&sn)
            - prev(1)?.mul_left(&tn)
            - prev(2)?.mul_left(&un))
    }

    /// Smallest `n` for which the block assembly of `M̃_n` is available.
    pub fn assembly_start(&self) -> usize {
        match self.family {
            ExampleFamily::Classical => 2,
            ExampleFamily::Semiclassical => 3,
        }
    }

    /// `M̃^L_n` assembled from the expansion coefficients and closed-form `ξ, η, C`.
    pub fn assembled_structure(&self, n: usize) -> Result<BlockMat2> {
        if n < self.assembly_start() {
            return Err(Error::Missing(format!("block assembly needs n >= {}", self.assembly_start())));
        }
        let c_prev = self.c_inv(n - 1)?.inverse()?;
        let c_prev_inv = self.c_inv(n - 1)?;
        let eta_prev_inv = self.eta(n - 1)?.inverse()?;
        let [rn, sn, tn, un] = self.rstu(n)?;
        let [rp, sp, tp, up] = self.rstu(n - 1)?;
        let (xi, eta, xip) = (self.xi(n)?, self.eta(n)?, self.xi(n - 1)?);
        match self.family {
            ExampleFamily::Classical => {
                let m11 = zx(&xi).mul_left(&rn) + cst(&sn);
                let m12 = cst(&(&(&rn * &eta - &tn) * &c_prev_inv));
                let m21 = cst(&-(&c_prev * &(rp - &tp * &eta_prev_inv)));
                let m22 = (cst(&sp) + zx(&xip).mul_left(&(&tp * &eta_prev_inv))).mul_left(&c_prev).mul_right(&c_prev_inv);
                Ok(BlockMat2::new(m11, m12, m21, m22))
            }
            ExampleFamily::Semiclassical => {
                let h2 = self.h_left()?[2].clone();
                let eta_pp_inv = self.eta(n - 2)?.inverse()?;
                let (xin1, xipp) = (self.xi(n + 1)?, self.xi(n - 2)?);
                let u_e = &un * &eta_prev_inv;
                let m11 = (&zx(&xin1) * &zx(&xi) - cst(&self.eta(n + 1)?)).mul_left(&h2) + zx(&xi).mul_left(&rn) + cst(&sn)
                    - cst(&u_e);
                let m12 = (zx(&xin1).mul_left(&h2).mul_right(&eta) + cst(&(&rn * &eta - &tn)) - zx(&xip).mul_left(&u_e))
                    .mul_right(&c_prev_inv);
                let up_e = &up * &eta_pp_inv;
                let m21 = -(zx(&xi).mul_left(&h2) + cst(&(rp - &tp * &eta_prev_inv))
                    - zx(&xipp).mul_left(&up_e).mul_right(&eta_prev_inv))
                .mul_left(&c_prev);
                let m22 = (cst(&(sp - &h2 * &eta))
                    + zx(&xip).mul_left(&(&tp * &eta_prev_inv))
                    - cst(&up_e)
                    + &zx(&xipp).mul_left(&up_e).mul_right(&eta_prev_inv) * &zx(&xip))
                    .mul_left(&c_prev)
                    .mul_right(&c_prev_inv);
                Ok(BlockMat2::new(m11, m12, m21, m22))
            }
        }
    }
}

/// Closed forms checked against themselves: the recurrence with closed-form `ξ, η` and the
/// basis expansion with closed-form `r, s, t, u`.
pub fn closed_form_self_check(cf: &ClosedForm, n_max: usize) -> Result<ResidualReport> {
    let mut rep = ResidualReport::new("closed-form-internal");
    for n in 0..=n_max {
        let prev = if n == 0 { MatPoly::zero(2, 2) } else { cf.monic(n - 1)? };
        let rec = cf.monic(n)?.shift(1) - cf.monic(n + 1)? - cf.monic(n)?.mul_left(&cf.xi(n)?) - prev.mul_left(&cf.eta(n)?);
        rep.push(ResidualEntry::new("closed-form three-term recurrence", n as i64, rec));
        rep.push(ResidualEntry::new("closed-form basis expansion (r, s, t, u)", n as i64, cf.expansion_residual(n)?));
    }
    Ok(rep)
}
