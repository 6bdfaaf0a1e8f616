//! Non-Abelian discrete Painlevé IV relations for one-sided quadratic Pearson data
//! (`z² W' = h W`, `h = h_0 + h_1 z + h_2 z²`), their commutative reduction, and the
//! block relations linking consecutive structure matrices.

use crate::error::{Error, Result};
use crate::exactnum::{rat, Gq};
use crate::mops_engine::MopsData;
use crate::polymat::{BlockMat2, MatPoly, Matrix};
use crate::report::{ResidualEntry, ResidualReport};
use crate::scalar_bessel::{beta_n, gamma_n, ScalarBesselParams};
use crate::weights_moments::PearsonData;

/// Recurrence data in the variables of the dPIV system.
#[derive(Clone, Debug)]
pub struct DpivState {
    pub xi: Vec<Matrix>,
    pub eta: Vec<Matrix>,
    /// `S1(n) = Σ_{k<n} ξ_k`.
    pub s1: Vec<Matrix>,
    /// `S2(n) = Σ_{j<i<n} ξ_i ξ_j - Σ_{k<n} η_k`.
    pub s2: Vec<Matrix>,
    pub nu: Vec<Matrix>,
    pub mu: Vec<Matrix>,
    c: Vec<Matrix>,
    c_inv: Vec<Matrix>,
    p1: Vec<Matrix>,
    p2: Vec<Matrix>,
    h: [Matrix; 3],
}

fn sc(d: usize, k: i64) -> Matrix {
    Matrix::scalar(d, Gq::from(k))
}

impl DpivState {
    pub fn new(data: &MopsData, pearson: &PearsonData) -> Result<Self> {
        if !pearson.is_one_sided() {
            return Err(Error::OneSidedRequired);
        }
        let [h0, h1, h2] = pearson.left.clone();
        let d = data.dim;
        let top = data.n_max;
        let half = Gq::real(rat(1, 2));
        let p1: Vec<Matrix> = (0..=top).map(|n| data.p1_left(n)).collect();
        let p2: Vec<Matrix> = (0..=top).map(|n| data.p2_left(n)).collect();
        let nu = (0..=top).map(|n| h0.scale(&half) + &h2 * &data.eta_left[n] - &p1[n]).collect();
        let mu = (0..=top).map(|n| &h2 * &data.xi_left[n] + &h1 + sc(d, 2 * n as i64 + 1)).collect();
        Ok(Self {
            xi: data.xi_left.clone(),
            eta: data.eta_left.clone(),
            s1: (0..=top).map(|n| data.s1(n)).collect(),
            s2: (0..=top).map(|n| data.s2_ordered(n)).collect(),
            nu,
            mu,
            c: data.c[..=top].to_vec(),
            c_inv: data.c_inv[..=top].to_vec(),
            p1,
            p2,
            h: [h0, h1, h2],
        })
    }

    pub fn top(&self) -> usize {
        self.xi.len() - 1
    }

    fn dim(&self) -> usize {
        self.h[0].rows()
    }

    fn zero(&self) -> Matrix {
        Matrix::zeros(self.dim(), self.dim())
    }

    fn xi_prev(&self, n: usize) -> Matrix {
        n.checked_sub(1).map_or_else(|| self.zero(), |k| self.xi[k].clone())
    }

    fn s1_prev(&self, n: usize) -> Matrix {
        n.checked_sub(1).map_or_else(|| self.zero(), |k| self.s1[k].clone())
    }

    fn mu_prev(&self, n: usize) -> Matrix {
        n.checked_sub(1).map_or_else(|| self.zero(), |k| self.mu[k].clone())
    }

    fn need(&self, n: usize) -> Result<()> {
        if n + 1 > self.top() {
            return Err(Error::Missing(format!("dPIV at n = {n} needs recurrence data through n + 1")));
        }
        Ok(())
    }

    /// Both dPIV residuals at `n`, written as `lhs - rhs`.
    pub fn residuals(&self, n: usize) -> Result<[Matrix; 2]> {
        self.need(n)?;
        let [h0, h1, h2] = &self.h;
        let d = self.dim();
        let (xi, eta, eta1) = (&self.xi[n], &self.eta[n], &self.eta[n + 1]);
        let (s1, s1n, s2) = (&self.s1[n], &self.s1[n + 1], &self.s2[n]);
        let lhs1 = xi.scale(&Gq::from(2 * n as i64 + 1))
            + h0
            + h2 * &(eta1 + eta)
            + &(&(h2 * xi) + h1) * xi
            + s1
            + &(&self.c_inv[n] * s1n) * &self.c[n];
        let rhs1 = &s1.commutator(h2) * s1n - s2.commutator(h2) - s1.commutator(h1);
        let xs = xi + &self.xi_prev(n);
        let xs1 = xi + &self.xi[n + 1];
        let lhs2 = xi * xi - eta * &(sc(d, 2 * n as i64 - 1) + h1 + h2 * &xs) + &(sc(d, 2 * n as i64 + 3) + h1 + h2 * &xs1) * eta1;
        let rhs2 = eta * &self.s1_prev(n).commutator(h2) - &s1.commutator(h2) * eta1;
        Ok([lhs1 - rhs1, lhs2 - rhs2])
    }

    /// The same two relations before the sums are substituted, in terms of `p¹`, `p²`.
    pub fn preform_residuals(&self, n: usize) -> Result<[Matrix; 2]> {
        self.need(n)?;
        let [h0, h1, h2] = &self.h;
        let d = self.dim();
        let (xi, eta, eta1) = (&self.xi[n], &self.eta[n], &self.eta[n + 1]);
        let (p1, p1n, p2) = (&self.p1[n], &self.p1[n + 1], &self.p2[n]);
        let f1 = xi.scale(&Gq::from(2 * n as i64 + 1)) + h0 + h2 * &(&(eta1 + eta) + &(xi * xi)) + h1 * xi
            - (&p1.commutator(h2) * p1n - p2.commutator(h2) - p1.commutator(h1) + p1 + &(&self.c_inv[n] * p1n) * &self.c[n]);
        let p1_prev = n.checked_sub(1).map_or_else(|| self.zero(), |k| self.p1[k].clone());
        let f2 = xi * xi
            - eta * &(sc(d, 2 * n as i64 - 1) + h2 * &(xi + &self.xi_prev(n)) + p1_prev.commutator(h2) + h1)
            + &(sc(d, 2 * n as i64 + 3) + h2 * &(&self.xi[n + 1] + xi) + p1.commutator(h2) + h1) * eta1;
        Ok([f1, f2])
    }

    /// First non-commuting pair among `h_0, h_1, h_2, ξ_k, η_k`.
    pub fn noncommuting_pair(&self) -> Option<String> {
        let mut named: Vec<(String, &Matrix)> = vec![("h0".into(), &self.h[0]), ("h1".into(), &self.h[1]), ("h2".into(), &self.h[2])];
        for (k, (x, e)) in self.xi.iter().zip(&self.eta).enumerate() {
            named.push((format!("xi_{k}"), x));
            named.push((format!("eta_{k}"), e));
        }
        for i in 0..named.len() {
            for j in i + 1..named.len() {
                if !named[i].1.commutator(named[j].1).is_zero() {
                    return Some(format!("[{}, {}] != 0", named[i].0, named[j].0));
                }
            }
        }
        None
    }
}

fn entry(identity: &str, n: usize, r: Matrix) -> ResidualEntry {
    let e = ResidualEntry::new(identity, n as i64, r);
    if n == 0 {
        e.convention().with_note("uses xi_{-1} = S1(-1) = 0 and eta_0 = 0")
    } else {
        e
    }
}

pub fn dpiv_check(data: &MopsData, pearson: &PearsonData) -> Result<ResidualReport> {
    let st = DpivState::new(data, pearson)?;
    let mut r = ResidualReport::new("dpiv");
    for n in 0..st.top() {
        let [a, b] = st.residuals(n)?;
        r.push(entry("dPIV first relation", n, a));
        r.push(entry("dPIV second relation", n, b));
        let [f1, f2] = st.preform_residuals(n)?;
        r.push(entry("dPIV first relation in p1, p2 form", n, f1));
        r.push(entry("dPIV second relation in p1, p2 form", n, f2));
    }
    Ok(r)
}

/// Scalar degeneration `ξ_n² = η_n(2n-1+h_1) - (2n+3+h_1)η_{n+1}` evaluated on the closed forms
/// `β_n, γ_n` of `x^a e^{-b/x}` (where `h_1 = a`).
pub fn scalar_dpiv_closed_form(n: usize, p: &ScalarBesselParams) -> Result<Gq> {
    let ni = n as i64;
    let h1 = Gq::real(p.a.clone());
    let b = beta_n(ni, p)?;
    let lhs = &b * &b;
    let rhs = &gamma_n(ni, p)? * &(&Gq::from(2 * ni - 1) + &h1) - &(&Gq::from(2 * ni + 3) + &h1) * &gamma_n(ni + 1, p)?;
    Ok(lhs - rhs)
}

/// Residuals of the commutative reduction. Fails (without residuals) when some pair among
/// `h_0, h_1, h_2, ξ_k, η_k` does not commute.
pub fn commutative_reduction(data: &MopsData, pearson: &PearsonData) -> Result<ResidualReport> {
    let st = DpivState::new(data, pearson)?;
    if let Some(pair) = st.noncommuting_pair() {
        return Err(Error::NonAbelianInput(pair));
    }
    let mut r = ResidualReport::new("commutative-reduction");
    let [h0, h1, h2] = &st.h;
    let d = st.dim();
    let half = Gq::real(rat(1, 2));
    let x = st
        .mu
        .iter()
        .map(|m| m.inverse().map_err(|_| Error::SingularMatrix { stage: 0 }))
        .collect::<Result<Vec<_>>>()?;
    let nu0_sq = &st.nu[0] * &st.nu[0];
    let mut nu_rec = h0.scale(&half);
    for n in 0..st.top() {
        let (nu, nu1, mu, mu1, xi) = (&st.nu[n], &st.nu[n + 1], &st.mu[n], &st.mu[n + 1], &st.xi[n]);
        r.push(entry("-mu_n xi_n = nu_n + nu_{n+1}", n, -(mu * xi) - nu - nu1));
        r.push(entry(
            "xi_n (nu_n - nu_{n+1}) = eta_{n+1} mu_{n+1} - eta_n mu_{n-1}",
            n,
            xi * &(nu - nu1) - &st.eta[n + 1] * mu1 + &st.eta[n] * &st.mu_prev(n),
        ));
        let tele = nu1 * nu1 - &nu0_sq;
        r.push(entry("nu_{n+1}^2 - nu_0^2 = eta_{n+1} mu_n mu_{n+1}", n, &tele - &(&(&st.eta[n + 1] * mu) * mu1)));
        r.push(entry(
            "h2 (nu_{n+1}^2 - nu_0^2) x_n x_{n+1} = nu_{n+1} - h0/2 + p1_{n+1}",
            n,
            &(&(h2 * &tele) * &x[n]) * &x[n + 1] - (nu1 - h0.scale(&half) + &st.p1[n + 1]),
        ));
        r.push(entry(
            "h2 x_n (nu_n + nu_{n+1}) = h1 + (2n+1) I - mu_n",
            n,
            &(h2 * &x[n]) * &(nu + nu1) - (h1 + &sc(d, 2 * n as i64 + 1) - mu),
        ));
        r.push(entry("nu_n from its definition = nu_n from nu_{k+1} = -mu_k xi_k - nu_k", n, nu - &nu_rec));
        nu_rec = -(mu * xi) - nu_rec;
    }
    Ok(r)
}

fn lin_minus(xi: &Matrix) -> MatPoly {
    MatPoly::z_minus(xi)
}

/// `C_{n-1}^{-1} M^{21}_n + M^{12}_{n-1} C_{n-1}` and
/// `C_{n-1}^{-1} M^{22}_n - (M^{11}_{n-1} - M^{12}_{n-1} C_{n-1} (zI - ξ_{n-1})) C_{n-1}^{-1}`.
pub fn block_relations(m: &[BlockMat2], data: &MopsData, n: usize) -> [MatPoly; 2] {
    let (cp, cpi) = (&data.c[n - 1], &data.c_inv[n - 1]);
    let (mn, mp) = (&m[n], &m[n - 1]);
    let r1 = mn.block(1, 0).mul_left(cpi) + mp.block(0, 1).mul_right(cp);
    let r2 = mn.block(1, 1).mul_left(cpi) - (mp.block(0, 0) - &mp.block(0, 1).mul_right(cp) * &lin_minus(&data.xi_left[n - 1])).mul_right(cpi);
    [r1, r2]
}

/// The variants with `M^{12}_n` in the first relation and `+` in the second.
pub fn block_relations_literal(m: &[BlockMat2], data: &MopsData, n: usize) -> [MatPoly; 2] {
    let (cp, cpi) = (&data.c[n - 1], &data.c_inv[n - 1]);
    let (mn, mp) = (&m[n], &m[n - 1]);
    let r1 = mn.block(1, 0).mul_left(cpi) + mn.block(0, 1).mul_right(cp);
    let r2 = mn.block(1, 1).mul_left(cpi) - (mp.block(0, 0) + &mp.block(0, 1).mul_right(cp) * &lin_minus(&data.xi_left[n - 1])).mul_right(cpi);
    [r1, r2]
}

pub fn block_relations_check(m: &[BlockMat2], data: &MopsData) -> ResidualReport {
    let mut r = ResidualReport::new("block-relations");
    for n in 1..m.len() {
        let [a, b] = block_relations(m, data, n);
        let tag = |e: ResidualEntry| if n == 1 { e.convention().with_note("M_0 uses C_{-1} := 0") } else { e };
        r.push(tag(ResidualEntry::new("C_{n-1}^-1 M21_n = -M12_{n-1} C_{n-1}", n as i64, a)));
        r.push(tag(ResidualEntry::new("C_{n-1}^-1 M22_n = (M11_{n-1} - M12_{n-1} C_{n-1}(z - xi_{n-1})) C_{n-1}^-1", n as i64, b)));
        let [la, lb] = block_relations_literal(m, data, n);
        r.push(
            ResidualEntry::new("C_{n-1}^-1 M21_n = -M12_n C_{n-1}", n as i64, la)
                .informational()
                .with_note("literal variant with M12 at index n"),
        );
        r.push(
            ResidualEntry::new("C_{n-1}^-1 M22_n = (M11_{n-1} + M12_{n-1} C_{n-1}(z - xi_{n-1})) C_{n-1}^-1", n as i64, lb)
                .informational()
                .with_note("literal variant with a plus sign"),
        );
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::mops_engine::solve_mops;
    use crate::weights_moments::{matrix_moment_table, WeightSpec};

    fn triangular(n_max: usize) -> (MopsData, PearsonData) {
        let spec: WeightSpec = "dim 2\nalpha 3/2\nbeta 1/2\nphi[0][0] = 1\nphi[0][1] = 0, 1\nphi[1][1] = 1\n\
            hL0 = [[1/2, 0], [0, 1/2]]\nhL1 = [[3/2, 0], [0, 3/2]]\nhL2 = [[0, 1], [0, 0]]"
            .parse()
            .unwrap();
        let t = matrix_moment_table(&spec, 2 * n_max + 4).unwrap();
        (solve_mops(&t, n_max).unwrap(), spec.pearson.unwrap())
    }

    #[test]
    fn triangular_weight_satisfies_dpiv() {
        let (d, p) = triangular(5);
        let r = dpiv_check(&d, &p).unwrap();
        assert!(r.pass(), "{:?}", r.failures().first());
        let c = commutative_reduction(&d, &p).unwrap();
        assert!(c.pass(), "{:?}", c.failures().first());
    }

    #[test]
    fn perturbed_eta_breaks_second_relation() {
        let (mut d, p) = triangular(4);
        d.eta_left[3] = &d.eta_left[3] + &Matrix::identity(2);
        let st = DpivState::new(&d, &p).unwrap();
        assert!(!st.residuals(2).unwrap()[1].is_zero());
    }

    #[test]
    fn two_sided_data_is_rejected() {
        let spec = WeightSpec::scalar(int(3), Gq::from(1)).unwrap();
        let t = matrix_moment_table(&spec, 8).unwrap();
        let d = solve_mops(&t, 2).unwrap();
        assert!(matches!(dpiv_check(&d, spec.pearson.as_ref().unwrap()), Err(Error::OneSidedRequired)));
    }

    #[test]
    fn scalar_degeneration_on_closed_forms() {
        for (a, b) in [(int(1), 1), (rat(1, 2), 2), (rat(7, 3), 3)] {
            let p = ScalarBesselParams::new(a, Gq::from(b)).unwrap();
            for n in 0..8 {
                assert!(num_traits::Zero::is_zero(&scalar_dpiv_closed_form(n, &p).unwrap()));
            }
        }
    }
}
