use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tentspace::funcmodel::FnSpec;
use tentspace::geometry::{Aperture, Lattice};
use tentspace::harness::{emit_plotdata, run_classify, run_verify, Config, Report, SUITE_IDS};
use tentspace::tentnorm::{lp_norm, tinfq_norm, tpinf_norm, tpq_norm, OpKind, SpaceParams, SupGrid};

#[derive(Parser)]
#[command(name = "tentspace", version, about = "Numerical experiments on analytic tent spaces of the unit disk")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON configuration file; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Kernel-test exponent.
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Aperture of the non-tangential regions.
    #[arg(long, global = true)]
    aperture: Option<f64>,
    #[arg(long, global = true)]
    radial_levels: Option<usize>,
    #[arg(long, global = true)]
    target_rel_err: Option<f64>,
    /// Truncation degree for series products.
    #[arg(long, global = true)]
    degree: Option<usize>,
    /// Radial cap of the criterion lattice.
    #[arg(long, global = true)]
    cap: Option<f64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        /// One of the suite identifiers; `list` prints them.
        id: String,
    },
    /// Classify a symbol `g` for one parameter set.
    Classify {
        /// Symbol as a JSON function spec.
        #[arg(long)]
        g: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Skip the empirical ratios over the standard corpus.
        #[arg(long)]
        no_corpus: bool,
    },
    /// Compute one norm of a function.
    Norm {
        /// Function as a JSON function spec.
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value = "lp")]
        kind: NormKind,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Outer exponent for `tpq` and `tinfq`.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Derivative order of the Littlewood-Paley form.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Generate an (r, kappa)-lattice and write it as JSON.
    Lattice {
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 0.2)]
        kappa: f64,
        /// Output file; stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Summarize a saved report and write its plot data.
    Report {
        path: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value = "t")]
    op: Op,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    T,
    S,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Lp,
    Tpinf,
    Tpq,
    Tinfq,
}

fn load_config(g: &Global) -> Result<Config> {
    let mut c = match &g.config {
        Some(path) => Config::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => Config::default(),
    };
    if let Some(t) = g.t {
        c.eval.t = Some(t);
    }
    if let Some(a) = g.aperture {
        c.eval.settings.aperture = Aperture::new(a)?;
    }
    if let Some(l) = g.radial_levels {
        c.eval.settings.quad.radial_levels = l;
    }
    if let Some(e) = g.target_rel_err {
        c.eval.settings.quad.target_rel_err = e;
    }
    if let Some(d) = g.degree {
        c.eval.degree = d;
    }
    if let Some(cap) = g.cap {
        c.eval.lattice.cap = cap;
    }
    c.validate()?;
    Ok(c)
}

fn print_checks(report: &Report) {
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for e in &report.errors {
        println!("ERROR {e}");
    }
}

fn save(report: &Report, dir: Option<&Path>) -> Result<()> {
    if let Some(dir) = dir {
        report.write(dir)?;
        emit_plotdata(report, &dir.join("plotdata"))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let out_dir = cli.global.out_dir.clone();
    match cli.command {
        Command::Verify { id } => {
            if id == "list" {
                SUITE_IDS.iter().for_each(|s| println!("{s}"));
                return Ok(true);
            }
            let config = load_config(&cli.global)?;
            let report = run_verify(&id, &config)?;
            print_checks(&report);
            save(&report, out_dir.as_deref())?;
            Ok(report.passed())
        }
        Command::Classify { g, params: a, no_corpus } => {
            let config = load_config(&cli.global)?;
            let op = match a.op {
                Op::T => OpKind::T,
                Op::S => OpKind::S,
            };
            let params = SpaceParams::new(a.p, a.q, a.alpha, a.beta, a.n, a.k, op)?;
            let verdict = run_classify(&FnSpec::parse(&g)?, &params, &config, !no_corpus)?;
            let json = serde_json::to_string_pretty(&verdict)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("verdict.json"), format!("{json}\n"))?;
            }
            println!("{json}");
            Ok(true)
        }
        Command::Norm { f, kind, p, q, alpha, n } => {
            let config = load_config(&cli.global)?;
            let settings = config.eval.settings;
            let f = FnSpec::parse(&f)?.build()?;
            let t = config.eval.t.unwrap_or(alpha + 3.0);
            let (value, err) = match kind {
                NormKind::Lp => {
                    let v = lp_norm(&f, p, alpha, n, t, &settings)?;
                    (v.value, v.error_estimate)
                }
                NormKind::Tpinf => {
                    let grid = SupGrid::for_foci(&settings, &f.foci(0.5)).with_lattice(&config.box_lattice.generate()?);
                    let v = tpinf_norm(&f, p, alpha, &grid, &settings)?;
                    (v.value, v.error_estimate)
                }
                NormKind::Tpq => {
                    let v = tpq_norm(&f, p, q, alpha, &settings)?;
                    (v.value, v.error_estimate)
                }
                NormKind::Tinfq => {
                    let v = tinfq_norm(&f, q, &settings)?;
                    (v.value, v.error_estimate)
                }
            };
            println!("{value:.12e} +- {err:.3e}");
            Ok(true)
        }
        Command::Lattice { r, kappa, output } => {
            let cap = cli.global.cap.unwrap_or(0.99);
            let lattice = Lattice::generate(r, kappa, cap)?;
            let json = serde_json::to_string_pretty(&lattice.to_file(None))?;
            match output {
                Some(path) => std::fs::write(&path, format!("{json}\n"))?,
                None => println!("{json}"),
            }
            eprintln!("{} nodes, separation {:.4}", lattice.len(), lattice.min_separation());
            Ok(true)
        }
        Command::Report { path } => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let report = Report::from_json(&text)?;
            print_checks(&report);
            let dir = out_dir.unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default().join("plotdata"));
            let files = emit_plotdata(&report, &dir)?;
            eprintln!("wrote {} files to {}", files.len(), dir.display());
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
