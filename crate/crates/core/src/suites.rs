//! Identity suites run by `verify`. Each suite names the data it needs through an
//! applicability predicate; inapplicable suites are reported as skipped, never dropped.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::closed_form::{closed_form_self_check, ClosedForm};
use crate::error::{Error, Result};
use crate::exactnum::{int, Gq};
use crate::mops_engine::{
    biorthogonality_check, recurrence_check, second_kind_leading_check, second_kind_recurrence_check, second_kind_series,
    second_kind_table_len, solve_mops, sum_rules_check, MopsData, SecondKindSeries,
};
use crate::painleve::{block_relations_check, commutative_reduction, dpiv_check, scalar_dpiv_closed_form};
use crate::polymat::{BlockMat2, Matrix};
use crate::report::{ResidualEntry, ResidualReport, Section};
use crate::scalar_bessel::{
    check_scalar_recurrence, check_scalar_structure, expand_in_monic_basis, g_n, h_n, loop_norm_ratio, monic_bessel,
    scalar_of, scalar_ode_residual_p, scalar_ode_residual_q, scalar_structure_entries, ScalarBesselParams,
};
use crate::structure_rh::{
    ode_check, scalar_elimination_residual, structure_bundle, structure_check, structure_classical, transfer_check,
    zero_curvature_check, StructureBundle,
};
use crate::weights_moments::{matrix_moment_table, pearson_moment_residual, ExampleFamily, MomentTable, PearsonData, WeightSpec};

/// Everything computed from a weight before any identity is checked.
pub struct Prepared {
    pub spec: WeightSpec,
    pub table: MomentTable,
    pub data: MopsData,
    pub series: SecondKindSeries,
    bundle: OnceLock<std::result::Result<StructureBundle, String>>,
}

impl Prepared {
    pub fn new(spec: WeightSpec, n_max: usize, trunc: usize) -> Result<Self> {
        let table = matrix_moment_table(&spec, second_kind_table_len(n_max, trunc))?;
        let data = solve_mops(&table, n_max)?;
        let series = second_kind_series(&data, &table, trunc)?;
        Ok(Self { spec, table, data, series, bundle: OnceLock::new() })
    }

    pub fn pearson(&self) -> Option<&PearsonData> {
        self.spec.pearson.as_ref()
    }

    pub fn bundle(&self) -> Result<&StructureBundle> {
        let p = self.pearson().ok_or_else(|| Error::Missing("Pearson data".into()))?;
        self.bundle
            .get_or_init(|| structure_bundle(&self.data, &self.series, p).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Missing(e.clone()))
    }
}

pub struct Suite {
    pub name: &'static str,
    pub about: &'static str,
    /// `Some(reason)` when the hypotheses of the suite are not met.
    applies: fn(&Prepared) -> Option<String>,
    run: fn(&Prepared) -> Result<ResidualReport>,
}

fn always(_: &Prepared) -> Option<String> {
    None
}

fn has_pearson(p: &Prepared) -> Option<String> {
    p.pearson().is_none().then(|| "no Pearson data in the weight file".into())
}

fn abelian_one_sided(p: &Prepared) -> Option<String> {
    let Some(pearson) = p.pearson() else {
        return Some("no Pearson data in the weight file".into());
    };
    if !pearson.is_one_sided() {
        return Some("Pearson data is not one-sided (h^R != 0)".into());
    }
    pearson
        .left_noncommuting_pair()
        .map(|(i, j)| format!("h{i} and h{j} do not commute"))
}

fn pure_scalar(p: &Prepared) -> Option<String> {
    if p.spec.dim != 1 {
        return Some("weight is not scalar".into());
    }
    (p.spec.phi.degree() != Some(0)).then(|| "scalar prefactor is not constant".into())
}

fn tagged(p: &Prepared) -> Option<String> {
    p.spec.example.is_none().then(|| "weight file carries no `example` tag".into())
}

fn named(mut r: ResidualReport, name: &str) -> ResidualReport {
    r.suite = name.into();
    r
}

fn merged(name: &str, parts: impl IntoIterator<Item = ResidualReport>) -> ResidualReport {
    let mut r = ResidualReport::new(name);
    for p in parts {
        r.extend(p);
    }
    r
}

fn run_pearson(p: &Prepared) -> Result<ResidualReport> {
    let pearson = p.pearson().expect("checked");
    let mut r = named(pearson_moment_residual(pearson, &p.table), "pearson");
    r.push(ResidualEntry::new("z^2 Phi' + (alpha z + beta) Phi = h^L Phi + Phi h^R", 0, p.spec.pearson_residual(pearson)));
    Ok(r)
}

fn run_mops(p: &Prepared) -> Result<ResidualReport> {
    Ok(merged("mops", [biorthogonality_check(&p.data, &p.table), recurrence_check(&p.data), sum_rules_check(&p.data)]))
}

fn run_second_kind(p: &Prepared) -> Result<ResidualReport> {
    Ok(merged(
        "second-kind",
        [second_kind_leading_check(&p.data, &p.series), second_kind_recurrence_check(&p.series, &p.data)],
    ))
}

fn run_transfer(p: &Prepared) -> Result<ResidualReport> {
    transfer_check(&p.data, &p.series)
}

fn run_structure(p: &Prepared) -> Result<ResidualReport> {
    let pearson = p.pearson().expect("checked");
    let b = p.bundle()?;
    let mut r = structure_check(b, &p.data, pearson);
    if pearson.is_classical() {
        for n in 0..=p.data.n_max {
            let diff = structure_classical(&p.data, pearson, n)?.full() - b.formula[n].full();
            let e = ResidualEntry::new("classical formula = quadratic formula with h_2 = 0", n as i64, diff);
            r.push(if n == 0 { e.convention() } else { e });
        }
    }
    Ok(r)
}

fn run_zero_curvature(p: &Prepared) -> Result<ResidualReport> {
    zero_curvature_check(p.bundle()?, &p.data)
}

fn run_ode(p: &Prepared) -> Result<ResidualReport> {
    ode_check(p.bundle()?, &p.data, &p.series, p.pearson().expect("checked"))
}

fn run_block_relations(p: &Prepared) -> Result<ResidualReport> {
    let ms: Vec<BlockMat2> = p.bundle()?.formula.clone();
    Ok(block_relations_check(&ms, &p.data))
}

fn run_dpiv(p: &Prepared) -> Result<ResidualReport> {
    dpiv_check(&p.data, p.pearson().expect("checked"))
}

fn run_commutative(p: &Prepared) -> Result<ResidualReport> {
    commutative_reduction(&p.data, p.pearson().expect("checked"))
}

fn sc(x: Gq) -> Matrix {
    Matrix::scalar(1, x)
}

fn run_scalar(p: &Prepared) -> Result<ResidualReport> {
    let (alpha, beta) = (&p.spec.alpha, &p.spec.beta);
    let pb = ScalarBesselParams::new(alpha.clone(), beta.clone())?;
    let pl = ScalarBesselParams::new(alpha + int(2), beta.clone())?;
    let d = &p.data;
    let mut r = ResidualReport::new("scalar");
    for n in 0..=d.n_max + 1 {
        r.push(ResidualEntry::new("Hankel P_n = monic Bessel closed form", n as i64, &d.p_left[n] - &monic_bessel(n, &pb)?));
        let ratio = scalar_of(&d.c_inv[n]).checked_div(&scalar_of(&d.c_inv[0]))?;
        r.push(ResidualEntry::new("<P_n, P_n> / <P_0, P_0> = loop-norm ratio", n as i64, ratio - loop_norm_ratio(n, &pl)?));
    }
    for n in 0..=d.n_max {
        let ni = n as i64;
        r.push(ResidualEntry::new("xi_n = beta_n", ni, &d.xi_left[n] - &sc(crate::scalar_bessel::beta_n(ni, &pb)?)));
        r.push(ResidualEntry::new("eta_n = gamma_n", ni, &d.eta_left[n] - &sc(crate::scalar_bessel::gamma_n(ni, &pb)?)));
        let (coeffs, rem) = expand_in_monic_basis(&d.p_left[n].derivative().shift(2), &d.p_left[..=n + 1]);
        let at = |k: usize| coeffs.get(k).cloned().unwrap_or_else(|| Matrix::zeros(1, 1));
        r.push(ResidualEntry::new("x^2 P_n' expanded in Hankel P_k: remainder", ni, rem));
        r.push(ResidualEntry::new("x^2 P_n' expanded in Hankel P_k: coefficient of P_{n+1} = n", ni, at(n + 1) - sc(Gq::from(ni))));
        r.push(ResidualEntry::new("x^2 P_n' expanded in Hankel P_k: coefficient of P_n = g_n", ni, at(n) - sc(g_n(ni, &pb)?)));
        if n >= 1 {
            r.push(ResidualEntry::new("x^2 P_n' expanded in Hankel P_k: coefficient of P_{n-1} = h_n", ni, at(n - 1) - sc(h_n(ni, &pb)?)));
        }
        r.push(ResidualEntry::new("z^2 P'' + (az + b) P' - n(a+n-1) P = 0", ni, scalar_ode_residual_p(&d.p_left[n], n, &pl)));
        r.push(ResidualEntry::new(
            "z^2 Q'' + ((4-a)z - b) Q' - (n+1)(n+a-2) Q = 0",
            ni,
            scalar_ode_residual_q(&p.series.q_left[n], n, &pl),
        ));
        if n < d.n_max {
            r.push(ResidualEntry::new("closed-form dPIV degeneration", ni, scalar_dpiv_closed_form(n, &pb)?));
        }
        let sym = WeightSpec::scalar(pl.a.clone(), beta.clone())?.pearson.expect("scalar Pearson data");
        let m = structure_classical(d, &sym, n)?;
        let c_prev = if n == 0 { Gq::from(0) } else { scalar_of(&d.c[n - 1]) };
        let entries = scalar_structure_entries(n, &pl, &scalar_of(&d.p1_left(n)), &scalar_of(&d.c_inv[n]), &c_prev);
        for (k, e) in entries.iter().enumerate() {
            let diff = m.block(k / 2, k % 2) - e.clone();
            let entry = ResidualEntry::new(format!("scalar M_{}{} = closed form", k / 2 + 1, k % 2 + 1), ni, diff);
            r.push(if n == 0 { entry.convention() } else { entry });
        }
        if let Some(pearson) = p.pearson() {
            let m = &p.bundle()?.formula[n];
            let e = ResidualEntry::new(
                "eliminating P_{n-1} from the 2x2 system gives z^2 (z^2 y'' + (az+b) y' - n(a+n-1) y)",
                ni,
                scalar_elimination_residual(m, &pearson.h_left(), n, &pl)?,
            );
            r.push(if n == 0 { e.convention() } else { e });
        }
    }
    r.extend(check_scalar_recurrence(d.n_max, &pb)?);
    r.extend(check_scalar_structure(d.n_max, &pb)?);
    Ok(r)
}

fn run_closed_form(p: &Prepared) -> Result<ResidualReport> {
    let cf = ClosedForm::from_tag(p.spec.example.as_ref().expect("checked"))?;
    let d = &p.data;
    let mut r = named(closed_form_self_check(&cf, d.n_max)?, "closed-form");
    let w = cf.weight_spec()?;
    r.push(ResidualEntry::new("weight file prefactor = closed-form family prefactor", 0, &p.spec.phi - &w.phi));
    for n in 0..=d.n_max {
        let ni = n as i64;
        r.push(ResidualEntry::new("Hankel P_n = B_n I + b~_n B_{n-1} + c~_n B_{n-2}", ni, &d.p_left[n] - &cf.monic(n)?));
        r.push(ResidualEntry::new("C_n^-1 = closed form", ni, &d.c_inv[n] - &cf.c_inv(n)?));
        r.push(ResidualEntry::new("xi_n = beta_n I + b~_n - b~_{n+1}", ni, &d.xi_left[n] - &cf.xi(n)?));
        r.push(ResidualEntry::new(
            "eta_n = gamma_n I + beta_{n-1} b~_n + c~_n - c~_{n+1} - xi_n b~_n",
            ni,
            &d.eta_left[n] - &cf.eta(n)?,
        ));
    }
    let b = p.bundle()?;
    let label = match cf.family {
        ExampleFamily::Classical => "M (r, s, t assembly) = M (general formula)",
        ExampleFamily::Semiclassical => "M (r, s, t, u assembly) = M (general formula)",
    };
    for n in cf.assembly_start()..=d.n_max {
        r.push(ResidualEntry::new(label, n as i64, cf.assembled_structure(n)?.full() - b.formula[n].full()));
    }
    Ok(r)
}

pub fn registry() -> Vec<Suite> {
    vec![
        Suite { name: "pearson", about: "moment-level and weight-level Pearson equation", applies: has_pearson, run: run_pearson },
        Suite { name: "mops", about: "biorthogonality, three-term recurrences, p1/p2 sums", applies: always, run: run_mops },
        Suite { name: "second-kind", about: "second-kind series: leading term and recurrence", applies: always, run: run_second_kind },
        Suite { name: "transfer", about: "Y_{n+1} = T_n Y_n and Y J Y^R J^-1 = I", applies: always, run: run_transfer },
        Suite { name: "structure", about: "structure matrices: formula vs fundamental matrix, J relation, degree", applies: has_pearson, run: run_structure },
        Suite { name: "zero-curvature", about: "z^2 T' = M_{n+1} T - T M_n on both sides", applies: has_pearson, run: run_zero_curvature },
        Suite { name: "ode", about: "first-order system and its Miura second-order image", applies: has_pearson, run: run_ode },
        Suite { name: "block-relations", about: "relations between blocks of consecutive M_n", applies: has_pearson, run: run_block_relations },
        Suite { name: "scalar", about: "scalar Bessel closed forms, norms and ODEs", applies: pure_scalar, run: run_scalar },
        Suite { name: "closed-form", about: "explicit 2x2 families vs Hankel data", applies: tagged, run: run_closed_form },
        Suite { name: "dpiv", about: "non-Abelian discrete Painleve IV", applies: abelian_one_sided, run: run_dpiv },
        Suite { name: "commutative", about: "commutative reduction of dPIV", applies: abelian_one_sided, run: run_commutative },
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

/// Runs the selected suites (all when `selection` is empty) in parallel. Boundary entries
/// tied to the `C_{-1}` convention are kept only when `include_n0` is set.
pub fn verify(p: &Prepared, selection: &[String], include_n0: bool) -> Result<Vec<ResidualReport>> {
    let all = registry();
    for s in selection {
        if !all.iter().any(|x| x.name == s) {
            return Err(Error::Missing(format!("unknown suite {s:?}; known: {}", suite_names().join(", "))));
        }
    }
    let chosen: Vec<&Suite> = all.iter().filter(|s| selection.is_empty() || selection.iter().any(|x| x == s.name)).collect();
    Ok(chosen
        .par_iter()
        .map(|s| {
            if let Some(reason) = (s.applies)(p) {
                return ResidualReport::skipped(s.name, format!("hypothesis not met ({reason})"));
            }
            match (s.run)(p) {
                Ok(mut r) => {
                    r.suite = s.name.into();
                    if !include_n0 {
                        r.entries.retain(|e| e.section != Section::Convention);
                    }
                    r
                }
                Err(e) => ResidualReport::failed(s.name, e.to_string()),
            }
        })
        .collect())
}

pub fn summary_json(reports: &[ResidualReport]) -> Value {
    let count = |st: &str| reports.iter().filter(|r| r.to_json()["status"] == st).count();
    json!({
        "pass": reports.iter().all(|r| r.skipped.is_some() || r.pass()),
        "suites_passed": count("pass"),
        "suites_failed": count("fail"),
        "suites_skipped": count("skipped"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_on_the_scalar_weight() {
        let spec: WeightSpec = "dim 1\nalpha 1\nbeta 1\nphi[0][0] = 1\nhL0 = [[1]]\nhL1 = [[1]]".parse().unwrap();
        let p = Prepared::new(spec, 4, 8).unwrap();
        let reports = verify(&p, &[], true).unwrap();
        for r in &reports {
            assert!(r.skipped.is_some() || r.pass(), "{}: {:?} {:?}", r.suite, r.error, r.failures().first());
        }
        assert!(reports.iter().find(|r| r.suite == "closed-form").unwrap().skipped.is_some());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        let spec: WeightSpec = "dim 1\nalpha 1\nbeta 1\nphi[0][0] = 1".parse().unwrap();
        let p = Prepared::new(spec, 1, 2).unwrap();
        assert!(verify(&p, &["nope".into()], false).is_err());
    }
}
