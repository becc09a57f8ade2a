//! Command-line front end: expression parsing, identity suites, spectrum,
//! Berezin, distance and sweep commands.

mod config;
mod parser;
mod suites;

use anyhow::{bail, Context, Result};
use clap::{Parser as ClapParser, Subcommand};
use num_complex::Complex64;

use config::{OutputFormat, RunConfig};
use qsu2::berezin::{fuzzy_band, StateSpec};
use qsu2::dirac;
use qsu2::metric::{self, MkOptions, MkSolver};
use qsu2::qnum::QParams;
use qsu2::repnorm::NormOptions;

#[derive(ClapParser)]
#[command(name = "qsu2", about = "Quantum SU(2): algebra checks, Dirac spectra, Berezin transforms and state distances", version)]
struct Cli {
    /// Flat key=value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Deformation parameter q in (0, 1].
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Vertical parameter t in (0, 1].
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Assertion tolerance for the check suites.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Monomial degree bound for suite enumeration.
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    /// RNG seed; all outputs are reproducible for a fixed seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Corepresentation cache directory (overrides QSU2_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suites; nonzero exit on any failure.
    Check {
        /// Suite name or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        /// Test instrumentation: inject a deliberate table corruption.
        #[arg(long, hide = true)]
        mutate: Option<String>,
    },
    /// Dirac block spectrum rows (n, i, j, eigenvalue, multiplicity).
    Spectrum {
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Seminorm L_{t,q} of an expression.
    Seminorm {
        #[arg(long)]
        expr: String,
    },
    /// Berezin transform β_N^M of an expression, as canonical JSON.
    Berezin {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        expr: String,
    },
    /// Monge-Kantorovič distance lower bound between two states on a band.
    Distance {
        /// First state: haar | counit | chi:N:M | hpodles:R | point:re:im:re:im.
        state1: String,
        state2: String,
        /// Spectral band half-width K.
        #[arg(long, default_value_t = 1)]
        band: usize,
        /// Fuzzy degree N of the band basis.
        #[arg(long, default_value_t = 1)]
        fuzzy: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 100_000)]
        directions: usize,
    },
    /// Parameter sweep table.
    Table {
        /// Sweep spec, e.g. "q=0.6:1.0:0.1".
        #[arg(long)]
        sweep: String,
        /// Tie t = q across the sweep (otherwise t is fixed from --t).
        #[arg(long, default_value_t = false)]
        tie: bool,
        /// Observable: "seminorm:<expr>" or "distance:<state1>;<state2>".
        #[arg(long)]
        observable: String,
        #[arg(long, default_value_t = 1)]
        band: usize,
        #[arg(long, default_value_t = 1)]
        fuzzy: usize,
        #[arg(long, default_value_t = 4000)]
        directions: usize,
    },
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(q) = cli.q {
        cfg.q = q;
    }
    if let Some(t) = cli.t {
        cfg.t = t;
    }
    if let Some(tol) = cli.tolerance {
        cfg.tolerance = tol;
    }
    if let Some(d) = cli.max_degree {
        cfg.max_degree = d;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(f) = &cli.format {
        cfg.apply_pair("format", f)?;
    }
    if let Some(dir) = &cli.cache_dir {
        std::env::set_var("QSU2_CACHE_DIR", dir);
    }
    cfg.validate()?;

    match &cli.command {
        Command::Check { suite, mutate } => cmd_check(&cfg, suite, mutate.as_deref()),
        Command::Spectrum { nmax } => cmd_spectrum(&cfg, *nmax),
        Command::Seminorm { expr } => cmd_seminorm(&cfg, expr),
        Command::Berezin { n, m, expr } => cmd_berezin(&cfg, *n, *m, expr),
        Command::Distance { state1, state2, band, fuzzy, restarts, directions } => {
            cmd_distance(&cfg, state1, state2, *band, *fuzzy, *restarts, *directions)
        }
        Command::Table { sweep, tie, observable, band, fuzzy, directions } => {
            cmd_table(&cfg, sweep, *tie, observable, *band, *fuzzy, *directions)
        }
    }
}

fn eval_expr(cfg: &RunConfig, src: &str) -> Result<qsu2::AlgebraElement> {
    let ast = parser::parse(src).map_err(|e| anyhow::anyhow!("{e}"))?;
    let x = parser::evaluate(&ast, cfg.q).map_err(|e| anyhow::anyhow!("{e}"))?;
    if x.max_degree() > cfg.input_cap {
        bail!(
            "expression expands to monomial degree {} beyond the input cap {} \
             (raise input_cap in the config to override)",
            x.max_degree(),
            cfg.input_cap
        );
    }
    Ok(x)
}

fn parse_state(src: &str) -> Result<StateSpec> {
    let parts: Vec<&str> = src.split(':').collect();
    Ok(match parts.as_slice() {
        ["haar"] => StateSpec::Haar,
        ["counit"] => StateSpec::Counit,
        ["chi", n, m] => StateSpec::Chi { n: n.parse()?, m: m.parse()? },
        ["hpodles", r] => StateSpec::HPodles { r: r.parse()? },
        ["point", rea, ima, reb, imb] => StateSpec::EvalSU2 {
            alpha: Complex64::new(rea.parse()?, ima.parse()?),
            beta: Complex64::new(reb.parse()?, imb.parse()?),
        },
        _ => bail!(
            "unknown state {src:?} (expected haar | counit | chi:N:M | hpodles:R | point:re:im:re:im)"
        ),
    })
}

fn cmd_check(cfg: &RunConfig, suite: &str, mutate: Option<&str>) -> Result<i32> {
    let mutation = match mutate {
        None => None,
        Some("delta-sign-flip") => Some(suites::Mutation::DeltaSignFlip),
        Some(other) => bail!("unknown mutation {other:?}"),
    };
    let names: Vec<&str> = if suite == "all" {
        suites::SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };
    let mut all_passed = true;
    let mut report_suites = Vec::new();
    for name in names {
        let checks = suites::run_suite(name, cfg, mutation)?;
        let passed = checks.iter().all(|c| c.passed);
        all_passed &= passed;
        report_suites.push(serde_json::json!({
            "name": name,
            "passed": passed,
            "checks": checks,
        }));
    }
    let report = serde_json::json!({
        "schema": 1,
        "q": cfg.q,
        "t": cfg.t,
        "max_degree": cfg.max_degree,
        "tolerance": cfg.tolerance,
        "seed": cfg.seed,
        "passed": all_passed,
        "suites": report_suites,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if all_passed { 0 } else { 1 })
}

fn cmd_spectrum(cfg: &RunConfig, nmax: usize) -> Result<i32> {
    let p = QParams::new(cfg.q, cfg.t).map_err(|e| anyhow::anyhow!("{e}"))?;
    let spec = dirac::dirac_spectrum(nmax, p);
    let classical = (cfg.q - 1.0).abs() < 1e-14 && (cfg.t - 1.0).abs() < 1e-14;
    match cfg.format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            if classical {
                w.write_record(["n", "i", "j", "eigenvalue", "multiplicity", "classical"])?;
            } else {
                w.write_record(["n", "i", "j", "eigenvalue", "multiplicity"])?;
            }
            for r in &spec.rows {
                let mut rec = vec![
                    r.n.to_string(),
                    r.i.to_string(),
                    r.j.to_string(),
                    format!("{:.17}", r.eigenvalue),
                    r.multiplicity.to_string(),
                ];
                if classical {
                    rec.push(format!("{:.17}", 2.0 * r.eigenvalue + 1.0));
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let rows: Vec<_> = spec
                .rows
                .iter()
                .map(|r| {
                    let mut obj = serde_json::json!({
                        "n": r.n, "i": r.i, "j": r.j,
                        "eigenvalue": r.eigenvalue,
                        "multiplicity": r.multiplicity,
                    });
                    if classical {
                        obj["classical"] = serde_json::json!(2.0 * r.eigenvalue + 1.0);
                    }
                    obj
                })
                .collect();
            let report = serde_json::json!({
                "schema": 1, "q": cfg.q, "t": cfg.t, "nmax": nmax, "rows": rows,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(0)
}

fn norm_opts(cfg: &RunConfig) -> NormOptions {
    NormOptions {
        theta_grid: cfg.theta_grid,
        start_cutoff: cfg.start_cutoff,
        seed: cfg.seed,
        ..NormOptions::default()
    }
}

fn cmd_seminorm(cfg: &RunConfig, expr: &str) -> Result<i32> {
    let p = QParams::new(cfg.q, cfg.t).map_err(|e| anyhow::anyhow!("{e}"))?;
    let x = eval_expr(cfg, expr)?;
    let est = dirac::seminorm_l(&x, p, &norm_opts(cfg));
    let report = serde_json::json!({
        "schema": 1,
        "q": cfg.q, "t": cfg.t, "expr": expr,
        "seminorm": est.value,
        "residual": est.residual,
        "converged": est.converged,
        "cutoff": est.cutoff,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn cmd_berezin(cfg: &RunConfig, n: usize, m: usize, expr: &str) -> Result<i32> {
    let x = eval_expr(cfg, expr)?;
    let img = qsu2::berezin::berezin(n, m, &x);
    let report = serde_json::json!({
        "schema": 1,
        "q": cfg.q, "N": n, "M": m, "expr": expr,
        "image": img.to_json(),
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn mk_opts(cfg: &RunConfig, restarts: usize, directions: usize) -> MkOptions {
    MkOptions {
        restarts,
        random_directions: directions,
        seed: cfg.seed,
        ..MkOptions::default()
    }
}

fn cmd_distance(
    cfg: &RunConfig,
    state1: &str,
    state2: &str,
    band: usize,
    fuzzy: usize,
    restarts: usize,
    directions: usize,
) -> Result<i32> {
    let p = QParams::new(cfg.q, cfg.t).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mu = parse_state(state1)?;
    let nu = parse_state(state2)?;
    let basis = fuzzy_band(fuzzy, band, cfg.q);
    let mut solver = MkSolver::new(&basis, p, mk_opts(cfg, restarts, directions));
    let r = solver
        .distance(&mu, &nu)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let report = serde_json::json!({
        "schema": 1,
        "q": cfg.q, "t": cfg.t,
        "state1": state1, "state2": state2,
        "band": band, "fuzzy": fuzzy,
        "seed": cfg.seed,
        "lower_bound": r.lower_bound,
        "random_search_value": r.random_search_value,
        "gap": r.gap,
        "restarts": r.restarts,
        "iterations": r.iterations,
        "degenerate": r.degenerate,
        "flat_direction_flagged": r.flat_direction_flagged,
        "norm_residual": r.norm_residual,
        "maximizer": r.maximizer,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let (var, range) = spec
        .split_once('=')
        .context("sweep spec must look like q=START:END:STEP")?;
    if var.trim() != "q" {
        bail!("only q-sweeps are supported, got {var:?}");
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        bail!("sweep range must be START:END:STEP");
    };
    let (start, end, step): (f64, f64, f64) = (start.parse()?, end.parse()?, step.parse()?);
    if step <= 0.0 || end < start {
        bail!("sweep needs START <= END and STEP > 0");
    }
    let mut out = Vec::new();
    let mut v = start;
    while v <= end + 1e-12 {
        out.push(v.min(1.0));
        v += step;
    }
    Ok(out)
}

fn cmd_table(
    cfg: &RunConfig,
    sweep: &str,
    tie: bool,
    observable: &str,
    band: usize,
    fuzzy: usize,
    directions: usize,
) -> Result<i32> {
    let qs = parse_sweep(sweep)?;
    let grid: Vec<(f64, f64)> = qs
        .iter()
        .map(|&q| (if tie { q } else { cfg.t }, q))
        .collect();
    let (kind, payload) = observable
        .split_once(':')
        .context("observable must be seminorm:<expr> or distance:<state1>;<state2>")?;
    let rows: Vec<(f64, f64, String, String, String, f64, f64)> = match kind {
        "seminorm" => {
            let ast = parser::parse(payload).map_err(|e| anyhow::anyhow!("{e}"))?;
            let opts = norm_opts(cfg);
            metric::seminorm_sweep(
                |q| parser::evaluate(&ast, q).expect("expression evaluates at every q"),
                &grid,
                &opts,
            )
            .into_iter()
            .map(|r| (r.t, r.q, String::new(), String::new(), String::new(), r.value, r.diagnostic))
            .collect()
        }
        "distance" => {
            let (s1, s2) = payload
                .split_once(';')
                .context("distance observable needs <state1>;<state2>")?;
            let mu = parse_state(s1)?;
            let nu = parse_state(s2)?;
            let opts = mk_opts(cfg, 8, directions);
            let (n_str, m_str) = match &mu {
                StateSpec::Chi { n, m } => (n.to_string(), m.to_string()),
                _ => (String::new(), String::new()),
            };
            metric::distance_sweep(&mu, &nu, fuzzy, band, &grid, &opts)
                .map_err(|e| anyhow::anyhow!("{e}"))?
                .into_iter()
                .map(|r| {
                    (
                        r.t,
                        r.q,
                        n_str.clone(),
                        m_str.clone(),
                        band.to_string(),
                        r.value,
                        r.diagnostic,
                    )
                })
                .collect()
        }
        other => bail!("unknown observable kind {other:?}"),
    };
    match cfg.format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["t", "q", "N", "M", "K", "value", "diagnostic"])?;
            for (t, q, n, m, k, v, d) in &rows {
                w.write_record([
                    format!("{t:.6}"),
                    format!("{q:.6}"),
                    n.clone(),
                    m.clone(),
                    k.clone(),
                    format!("{v:.12}"),
                    format!("{d:.3e}"),
                ])?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            let objs: Vec<_> = rows
                .iter()
                .map(|(t, q, n, m, k, v, d)| {
                    serde_json::json!({
                        "t": t, "q": q, "N": n, "M": m, "K": k,
                        "value": v, "diagnostic": d,
                    })
                })
                .collect();
            let report = serde_json::json!({
                "schema": 1, "observable": observable, "rows": objs,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(0)
}
