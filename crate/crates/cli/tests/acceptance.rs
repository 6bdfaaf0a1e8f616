use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use mbl_core::closed_form::ClosedForm;
use mbl_core::exactnum::{int, rat, Gq, Rational};
use mbl_core::mops_engine::sum_rules_check;
use mbl_core::painleve::{block_relations, commutative_reduction, DpivState};
use mbl_core::polymat::{MatPoly, Matrix};
use mbl_core::scalar_bessel::{
    beta_n, check_scalar_recurrence, check_scalar_structure, expand_in_monic_basis, g_n, gamma_n, h_n, loop_norm_ratio,
    monic_bessel, scalar_of, scalar_ode_residual_p, scalar_ode_residual_q, ScalarBesselParams,
};
use mbl_core::structure_rh::{
    build_transfer, ode1_residual_polycolumn, ode1_residual_seriescolumn, ode2_residual, scalar_elimination_residual,
    structure_classical, structure_semiclassical, zero_curvature_residual,
};
use mbl_core::suites::Prepared;
use mbl_core::weights_moments::{parse_weight_spec, ExampleFamily, WeightSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn weights_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../weights")
}

fn shipped(name: &str) -> WeightSpec {
    let path = weights_dir().join(format!("{name}.wspec"));
    parse_weight_spec(&std::fs::read_to_string(&path).expect("weight file")).expect("valid weight")
}

fn prep(spec: WeightSpec, n_max: usize, trunc: usize) -> Result<Prepared, String> {
    Prepared::new(spec, n_max, trunc).map_err(|e| e.to_string())
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(what()) }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn examples() -> Vec<(&'static str, ClosedForm)> {
    let cf = |f, a: Rational, b: i64, c: Rational| ClosedForm::new(f, a, Gq::from(b), Gq::real(c)).unwrap();
    vec![
        ("classical (3,1,1)", cf(ExampleFamily::Classical, int(3), 1, int(1))),
        ("classical (5/2,2,1/3)", cf(ExampleFamily::Classical, rat(5, 2), 2, rat(1, 3))),
        ("semiclassical (3,1,1)", cf(ExampleFamily::Semiclassical, int(3), 1, int(1))),
    ]
}

fn scalar_cases() -> Vec<(&'static str, Rational, Gq)> {
    vec![
        ("(3,1)", int(3), Gq::from(1)),
        ("(5/2,2)", rat(5, 2), Gq::from(2)),
        ("(3,1+i)", int(3), Gq::from(1) + Gq::i()),
    ]
}

fn scalar_times_identity(p: &MatPoly, d: usize) -> MatPoly {
    if p.is_zero() {
        return MatPoly::zero(d, d);
    }
    MatPoly::new(d, d, p.coeffs().iter().map(|c| Matrix::scalar(d, c.get(0, 0).clone())).collect()).unwrap()
}

fn norm_ratio() -> Outcome {
    let mut count = 0;
    for (label, a, b) in scalar_cases() {
        let p = prep(e(WeightSpec::scalar(a.clone(), b.clone()))?, 8, 1)?;
        let pl = e(ScalarBesselParams::new(a, b))?;
        let h0 = scalar_of(&p.data.c_inv[0]);
        for n in 0..=8 {
            let moments = e(scalar_of(&p.data.c_inv[n]).checked_div(&h0))?;
            let lawful = e(loop_norm_ratio(n, &pl))?;
            ensure(moments == lawful, || format!("{label} n={n}: {moments} vs {lawful}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} ratios equal"))
}

fn closed_form_polys() -> Outcome {
    let mut count = 0;
    for (label, cf) in examples().into_iter().filter(|(_, cf)| cf.family == ExampleFamily::Classical) {
        let p = prep(e(cf.weight_spec())?, 6, 1)?;
        let bn = |k: i64| -> Result<MatPoly, String> {
            if k < 0 { Ok(MatPoly::zero(2, 2)) } else { Ok(scalar_times_identity(&e(monic_bessel(k as usize, cf.params()))?, 2)) }
        };
        for n in 0..=6usize {
            let k = n as i64;
            let mut sum = e(bn(k))?.mul_left(&e(cf.a_mat(n))?);
            if n >= 1 {
                sum = sum + e(bn(k - 1))?.mul_left(&e(cf.b_mat(n))?);
            }
            if n >= 2 {
                sum = sum + e(bn(k - 2))?.mul_left(&e(cf.c_mat(n))?);
            }
            let formula = sum.mul_left(&e(e(cf.a_mat(n))?.inverse())?);
            ensure(p.data.p_left[n] == formula, || format!("{label} n={n}: Hankel P_n differs from closed form"))?;
            count += 1;
        }
    }
    Ok(format!("{count} polynomials equal"))
}

fn recurrence_closed_forms() -> Outcome {
    let mut count = 0;
    for (label, cf) in examples() {
        let p = prep(e(cf.weight_spec())?, 6, 1)?;
        for n in 0..=6 {
            ensure(p.data.xi_left[n] == e(cf.xi(n))?, || format!("{label} xi_{n}"))?;
            ensure(p.data.eta_left[n] == e(cf.eta(n))?, || format!("{label} eta_{n}"))?;
            count += 2;
        }
    }
    Ok(format!("{count} coefficients equal"))
}

fn zero_curvature() -> Outcome {
    let mut count = 0;
    for (label, cf) in examples() {
        let p = prep(e(cf.weight_spec())?, 7, 12)?;
        let b = e(p.bundle())?;
        for n in 1..=6 {
            let t = e(build_transfer(&p.data, n))?;
            let l = zero_curvature_residual(&b.direct[n].left, &b.direct[n + 1].left, &t.left, false);
            let r = zero_curvature_residual(&b.direct[n].right, &b.direct[n + 1].right, &t.right, true);
            ensure(l.is_zero() && r.is_zero(), || format!("{label} n={n}"))?;
            count += 2;
        }
    }
    Ok(format!("{count} residuals vanish"))
}

fn first_order() -> Outcome {
    let mut count = 0;
    for (label, cf) in examples() {
        let p = prep(e(cf.weight_spec())?, 6, 12)?;
        let pearson = p.pearson().unwrap();
        let b = e(p.bundle())?;
        for n in 1..=6 {
            let m = &b.formula[n];
            ensure(ode1_residual_polycolumn(&p.data, m, pearson, n).is_zero(), || format!("{label} polynomial column n={n}"))?;
            let s = e(ode1_residual_seriescolumn(&p.data, &p.series, m, pearson, n))?;
            let depth = s.known_from().unwrap_or(i64::MIN);
            ensure(s.is_zero(), || format!("{label} series column n={n}"))?;
            ensure(depth <= -(n as i64 + 8), || format!("{label} series column n={n} only known from z^{depth}"))?;
            count += 2;
        }
    }
    Ok(format!("{count} residuals vanish"))
}

fn second_order() -> Outcome {
    let mut count = 0;
    for (label, cf) in examples() {
        let p = prep(e(cf.weight_spec())?, 4, 4)?;
        let pearson = p.pearson().unwrap();
        let b = e(p.bundle())?;
        for n in 1..=4 {
            ensure(ode2_residual(&p.data, &b.formula[n], pearson, n).is_zero(), || format!("{label} n={n}"))?;
            count += 1;
        }
    }
    for (label, a, bb) in scalar_cases() {
        let pl = e(ScalarBesselParams::new(a.clone(), bb.clone()))?;
        let p = prep(e(WeightSpec::scalar(a, bb))?, 10, 8)?;
        let pearson = p.pearson().unwrap();
        let b = e(p.bundle())?;
        for n in 1..=10 {
            let elim = e(scalar_elimination_residual(&b.formula[n], &pearson.h_left(), n, &pl))?;
            ensure(elim.is_zero(), || format!("scalar {label}: eliminated system n={n}"))?;
            ensure(scalar_ode_residual_p(&p.data.p_left[n], n, &pl).is_zero(), || format!("scalar {label}: P-equation n={n}"))?;
            count += 2;
        }
        for n in 0..=4 {
            let q = scalar_ode_residual_q(&p.series.q_left[n], n, &pl);
            ensure(q.is_zero(), || format!("scalar {label}: Q-equation n={n}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} residuals vanish"))
}

fn painleve() -> Outcome {
    let tri = prep(shipped("triangular_3_1_1"), 7, 1)?;
    let st = e(DpivState::new(&tri.data, tri.pearson().unwrap()))?;
    for n in 1..=6 {
        let [a, b] = e(st.residuals(n))?;
        ensure(a.is_zero() && b.is_zero(), || format!("triangular dPIV n={n}"))?;
    }
    let mut reductions = 0;
    for name in ["triangular_3_1_1", "scalar_a3_b1", "scalar_a5_2_b2", "scalar_a3_b1pi"] {
        let p = prep(shipped(name), 6, 1)?;
        let r = e(commutative_reduction(&p.data, p.pearson().unwrap()))?;
        ensure(r.pass(), || format!("{name}: {} failing reduction identities", r.failures().len()))?;
        reductions += r.counted().count();
    }
    Ok(format!("12 dPIV residuals and {reductions} reduction identities vanish"))
}

fn block_relations_semiclassical() -> Outcome {
    let (_, cf) = examples().pop().unwrap();
    let p = prep(e(cf.weight_spec())?, 5, 4)?;
    let b = e(p.bundle())?;
    for n in 2..=5 {
        let [x, y] = block_relations(&b.formula, &p.data, n);
        ensure(x.is_zero() && y.is_zero(), || format!("n={n}"))?;
    }
    Ok("8 relations vanish".into())
}

fn oracle_redundancy() -> Outcome {
    let mut count = 0;
    for (label, a, bb) in scalar_cases() {
        let pb = e(ScalarBesselParams::new(&a - int(2), bb.clone()))?;
        let p = prep(e(WeightSpec::scalar(a, bb))?, 6, 1)?;
        for n in 0..=6usize {
            let k = n as i64;
            ensure(scalar_of(&p.data.xi_left[n]) == e(beta_n(k, &pb))?, || format!("{label} beta_{n}"))?;
            ensure(scalar_of(&p.data.eta_left[n]) == e(gamma_n(k, &pb))?, || format!("{label} gamma_{n}"))?;
            let (coeffs, rem) = expand_in_monic_basis(&p.data.p_left[n].derivative().shift(2), &p.data.p_left[..=n + 1]);
            ensure(rem.is_zero(), || format!("{label} expansion remainder n={n}"))?;
            ensure(scalar_of(&coeffs[n]) == e(g_n(k, &pb))?, || format!("{label} g_{n}"))?;
            if n >= 1 {
                ensure(scalar_of(&coeffs[n - 1]) == e(h_n(k, &pb))?, || format!("{label} h_{n}"))?;
            }
            count += 4;
        }
        for r in [e(check_scalar_recurrence(6, &pb))?, e(check_scalar_structure(6, &pb))?] {
            ensure(r.pass(), || format!("{label} hypergeometric path: {}", r.suite))?;
            count += r.counted().count();
        }
    }
    for (label, cf) in examples() {
        let p = prep(e(cf.weight_spec())?, 6, 6)?;
        let pearson = p.pearson().unwrap();
        let b = e(p.bundle())?;
        for n in 0..=6 {
            let formula = e(structure_semiclassical(&p.data, pearson, n))?;
            ensure(formula.full() == b.direct[n].left.full(), || format!("{label} M_{n}: formula vs fundamental matrix"))?;
            if n >= cf.assembly_start() {
                ensure(e(cf.assembled_structure(n))?.full() == formula.full(), || format!("{label} M_{n}: example assembly"))?;
                count += 1;
            }
            if n >= 1 && pearson.is_classical() {
                ensure(e(structure_classical(&p.data, pearson, n))?.full() == formula.full(), || format!("{label} M_{n}: classical"))?;
                count += 1;
            }
            ensure(p.data.c_inv[n] == e(cf.c_inv(n))?, || format!("{label} C_{n}^-1"))?;
            count += 2;
        }
        let sums = sum_rules_check(&p.data);
        ensure(sums.pass(), || format!("{label} p1/p2 sum rules"))?;
        count += sums.counted().count();
    }
    Ok(format!("{count} two-path comparisons agree"))
}

fn full_verify() -> Outcome {
    let out = tempfile::tempdir().map_err(|x| x.to_string())?;
    let mut files: Vec<PathBuf> = e(std::fs::read_dir(weights_dir()))?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "wspec"))
        .collect();
    files.sort();
    ensure(!files.is_empty(), || "no shipped weights".into())?;
    let start = Instant::now();
    for f in &files {
        let status = Command::new(env!("CARGO_BIN_EXE_mbl"))
            .args(["verify", "--weight"])
            .arg(f)
            .arg("--out")
            .arg(out.path())
            .output()
            .map_err(|x| x.to_string())?;
        ensure(status.status.success(), || {
            format!("{} exited with {:?}: {}", f.display(), status.status.code(), String::from_utf8_lossy(&status.stdout))
        })?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || format!("took {t:.1?}"))?;
    Ok(format!("{} weights, exit 0", files.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("scalar norm-ratio law", Duration::from_secs(1), norm_ratio),
        ("closed-form monic polynomials", Duration::from_secs(10), closed_form_polys),
        ("recurrence coefficient closed forms", Duration::MAX, recurrence_closed_forms),
        ("zero curvature", Duration::from_secs(10), zero_curvature),
        ("first-order system", Duration::MAX, first_order),
        ("second-order system and scalar equations", Duration::MAX, second_order),
        ("dPIV and commutative reduction", Duration::MAX, painleve),
        ("block relations", Duration::MAX, block_relations_semiclassical),
        ("oracle redundancy", Duration::MAX, oracle_redundancy),
        ("full verify on shipped weights", Duration::from_secs(60), full_verify),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let t = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if t <= *budget => format!("PASS  {detail}"),
            Ok(detail) => format!("FAIL  {detail}, over the {budget:?} budget"),
            Err(why) => format!("FAIL  {why}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!("criterion {:>2} {:<42} {verdict} [{t:.2?}]", i + 1, name);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
