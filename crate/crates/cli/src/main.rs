use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mbl_core::mops_engine::{solve_mops, MopsData};
use mbl_core::painleve::DpivState;
use mbl_core::polymat::Matrix;
use mbl_core::suites::{summary_json, suite_names, verify, Prepared};
use mbl_core::weights_moments::{matrix_moment_table, parse_weight_spec, pearson_moment_residual, WeightSpec};

#[derive(Parser)]
#[command(name = "mbl", version, about = "Exact matrix Bessel orthogonal polynomials and their identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write moments.json (and pearson_residuals.json when Pearson data is given).
    Moments(Common),
    /// Write mops.json and coefficients.csv.
    Mops(Common),
    /// Run identity suites and write report.json; exit 0 iff every selected suite passes.
    Verify(Common),
    /// Write decimal coefficient trajectories and a plot script.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Weight specification file.
    #[arg(long)]
    weight: PathBuf,
    /// Largest degree n.
    #[arg(long, default_value_t = 6)]
    nmax: usize,
    /// Extra second-kind series terms beyond the leading order.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    trunc: u64,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Restrict `verify` to the named suites (repeatable).
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Keep boundary entries that rely on the C_{-1} = 0 convention.
    #[arg(long)]
    include_n0: bool,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    common: Common,
    /// Sequences to export: xi, eta, c_inv, nu, mu (default: all available).
    #[arg(long = "series", value_delimiter = ',')]
    series: Option<Vec<String>>,
    /// Decimal places in the CSV.
    #[arg(long, default_value_t = 12)]
    precision: usize,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn load(path: &Path) -> AnyResult<WeightSpec> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(parse_weight_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn write_json(dir: &Path, name: &str, v: &Value) -> AnyResult<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    fs::write(dir.join(name), s)?;
    Ok(())
}

/// Highest moment index needed for degrees through `n_max + 1`.
fn moment_order(n_max: usize) -> usize {
    2 * n_max + 2
}

fn cmd_moments(c: &Common) -> AnyResult<bool> {
    let spec = load(&c.weight)?;
    let table = matrix_moment_table(&spec, moment_order(c.nmax))?;
    write_json(&c.out, "moments.json", &table.to_json())?;
    if let Some(p) = &spec.pearson {
        let r = pearson_moment_residual(p, &table);
        write_json(&c.out, "pearson_residuals.json", &r.to_json())?;
        return Ok(r.pass());
    }
    Ok(true)
}

fn entry_columns(prefix: &str, d: usize) -> Vec<String> {
    (0..d).flat_map(|i| (0..d).map(move |j| format!("{prefix}[{i}][{j}]"))).collect()
}

fn entries(m: &Matrix, render: &dyn Fn(&mbl_core::exactnum::Gq) -> String) -> Vec<String> {
    m.entries().map(render).collect()
}

fn mops_for(c: &Common) -> AnyResult<(WeightSpec, MopsData)> {
    let spec = load(&c.weight)?;
    let table = matrix_moment_table(&spec, moment_order(c.nmax))?;
    let data = solve_mops(&table, c.nmax)?;
    Ok((spec, data))
}

fn cmd_mops(c: &Common) -> AnyResult<bool> {
    let (_, data) = mops_for(c)?;
    write_json(&c.out, "mops.json", &data.to_json())?;
    let d = data.dim;
    let mut w = csv::Writer::from_path(c.out.join("coefficients.csv"))?;
    let mut header = vec!["n".to_string()];
    for p in ["xi_left", "eta_left", "xi_right", "eta_right", "c_inv"] {
        header.extend(entry_columns(p, d));
    }
    w.write_record(&header)?;
    let exact = |g: &mbl_core::exactnum::Gq| g.to_string();
    for n in 0..=data.n_max {
        let mut row = vec![n.to_string()];
        for m in [&data.xi_left[n], &data.eta_left[n], &data.xi_right[n], &data.eta_right[n], &data.c_inv[n]] {
            row.extend(entries(m, &exact));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(true)
}

fn cmd_verify(c: &Common) -> AnyResult<bool> {
    let base = json!({
        "weight": c.weight.file_name().map(|s| s.to_string_lossy().into_owned()),
        "n_max": c.nmax,
        "trunc": c.trunc,
        "include_n0": c.include_n0,
    });
    let with = |mut v: Value, k: &str, x: Value| {
        v[k] = x;
        v
    };
    let prepared = load(&c.weight).and_then(|spec| {
        let name = spec.name.clone();
        Ok((Prepared::new(spec, c.nmax, c.trunc as usize)?, name))
    });
    let (p, name) = match prepared {
        Ok(x) => x,
        Err(e) => {
            write_json(&c.out, "report.json", &with(base, "error", json!(e.to_string())))?;
            return Err(e);
        }
    };
    let reports = verify(&p, &c.suites, c.include_n0)?;
    let summary = summary_json(&reports);
    let pass = summary["pass"].as_bool().unwrap_or(false);
    let mut v = with(base, "summary", summary);
    v["name"] = json!(name);
    v["suites"] = reports.iter().map(|r| r.to_json()).collect();
    write_json(&c.out, "report.json", &v)?;
    for r in &reports {
        let status = r.to_json()["status"].as_str().unwrap_or("").to_string();
        let detail = match (&r.skipped, &r.error) {
            (Some(s), _) => format!(" ({s})"),
            (_, Some(e)) => format!(" ({e})"),
            _ => format!(" ({} entries, {} failing)", r.counted().count(), r.failures().len()),
        };
        println!("{:<16} {status}{detail}", r.suite);
    }
    Ok(pass)
}

fn cmd_plot(a: &PlotArgs) -> AnyResult<bool> {
    let c = &a.common;
    let (spec, data) = mops_for(c)?;
    let state = spec.pearson.as_ref().and_then(|p| DpivState::new(&data, p).ok());
    let mut avail: Vec<(&str, Vec<Matrix>)> =
        vec![("xi", data.xi_left.clone()), ("eta", data.eta_left.clone()), ("c_inv", data.c_inv[..=data.n_max].to_vec())];
    if let Some(s) = &state {
        avail.push(("nu", s.nu.clone()));
        avail.push(("mu", s.mu.clone()));
    }
    let chosen: Vec<&(&str, Vec<Matrix>)> = match &a.series {
        Some(sel) => avail.iter().filter(|(k, _)| sel.iter().any(|s| s == k)).collect(),
        None => avail.iter().collect(),
    };
    let d = data.dim;
    let mut w = csv::Writer::from_path(c.out.join("trajectories.csv"))?;
    let mut header = vec!["n".to_string()];
    for (k, _) in &chosen {
        header.extend(entry_columns(k, d));
    }
    w.write_record(&header)?;
    if !chosen.is_empty() {
        let dec = |g: &mbl_core::exactnum::Gq| g.to_decimal(a.precision);
        for n in 0..=data.n_max {
            let mut row = vec![n.to_string()];
            for (_, seq) in &chosen {
                row.extend(entries(&seq[n], &dec));
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    fs::write(c.out.join("plot_trajectories.py"), PLOT_SCRIPT)?;
    Ok(true)
}

const PLOT_SCRIPT: &str = r#"# Plots every real-valued column of trajectories.csv against n.
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "trajectories.csv"
with open(path, newline="") as f:
    rows = list(csv.DictReader(f))
if not rows:
    sys.exit("no rows to plot")
n = [int(r["n"]) for r in rows]
fig, ax = plt.subplots()
for col in rows[0]:
    if col == "n":
        continue
    try:
        ys = [float(r[col]) for r in rows]
    except ValueError:
        continue
    ax.plot(n, ys, marker="o", label=col)
ax.set_xlabel("n")
ax.legend(fontsize="small", ncol=2)
fig.savefig("trajectories.png", dpi=150)
"#;

fn init_threads() -> AnyResult<()> {
    if let Ok(v) = std::env::var("MBL_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("MBL_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("MBL_THREADS must be a positive integer".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> AnyResult<bool> {
    init_threads()?;
    let common = match &cli.command {
        Command::Moments(c) | Command::Mops(c) | Command::Verify(c) => c,
        Command::Plot(a) => &a.common,
    };
    fs::create_dir_all(&common.out)?;
    if let Command::Verify(c) = &cli.command {
        if let Some(bad) = c.suites.iter().find(|s| !suite_names().contains(&s.as_str())) {
            return Err(format!("unknown suite {bad:?}; known: {}", suite_names().join(", ")).into());
        }
    }
    match &cli.command {
        Command::Moments(c) => cmd_moments(c),
        Command::Mops(c) => cmd_mops(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mbl: {e}");
            ExitCode::from(2)
        }
    }
}
