//! Command-line entry points. Exit codes: 0 pass, 1 check failures, 2 usage or configuration errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{RunConfig, CHECK_NAMES};
use crate::error::{config, Error, Result};
use crate::io::write_atomic;
use crate::levy::{check_assumption_a, AssumptionGrids, AssumptionReport};
use crate::lp::{besov_norm, holder_norm, DyadicBank, GridFunction};
use crate::scaling::HolderRegime;
use crate::solver::{solve_spectral, Forcing};
use crate::symbol::SymbolGrid;
use crate::verify::run_suite;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "levyspace", version, about = "Levy-type operators, generalized Besov norms and nonlocal parabolic solves on periodic lattices")]
pub struct Cli {
    /// TOML run configuration; defaults apply when omitted
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output directory (overrides output.dir)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Monte Carlo seed (overrides mc.seed)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// comma-separated subset of verification checks
    #[arg(long, global = true, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// suppress the summary on stdout
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// check the standing assumptions for the configured measure and scaling function
    Check,
    /// Besov and Hölder norms of a stored grid function
    Norms {
        /// grid function (.bin block or .csv)
        #[arg(long)]
        input: PathBuf,
        /// comma-separated smoothness indices
        #[arg(long, value_delimiter = ',', required = true)]
        beta: Vec<f64>,
    },
    /// solve ∂ₜu = Lu − λu + f from u(0) = 0 and write every time node
    Solve {
        /// one file for a constant forcing, or steps + 1 files for forcing at each node
        #[arg(long = "forcing", required = true, num_args = 1..)]
        forcing: Vec<PathBuf>,
    },
    /// run the verification suite
    Verify,
    /// print the normalized configuration
    Config,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("levyspace: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Integration { .. } | Error::Estimation(_) | Error::Degenerate(_) | Error::Bracket(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// The configuration after applying command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::parse("")?,
    };
    if let Some(d) = &cli.out {
        cfg.output.dir = d.clone();
    }
    if let Some(s) = cli.seed {
        cfg.mc.seed = s;
    }
    if let Some(c) = &cli.checks {
        if let Some(bad) = c.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
            return Err(config("--checks", format!("unknown check `{bad}`; known: {}", CHECK_NAMES.join(", "))));
        }
        cfg.verify.checks = c.clone();
    }
    cfg.normalized()
}

pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = effective_config(cli)?;
    let out = cfg.output.dir.clone();
    let say = |s: String| {
        if !cli.quiet {
            let _ = writeln!(std::io::stdout(), "{s}");
        }
    };
    match &cli.command {
        Command::Config => {
            say(cfg.to_toml());
            Ok(EXIT_PASS)
        }
        Command::Check => {
            let (report, failed) = cmd_check(&cfg, &out)?;
            say(format!(
                "c0 = {:e}, N0 = {:e}, C0 = {:e}",
                report.directional_c0, report.moment_n0, report.tail_c0
            ));
            for f in &failed {
                say(format!("FAIL {f}"));
            }
            Ok(if failed.is_empty() { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Norms { input, beta } => {
            let csv = cmd_norms(&cfg, input, beta, &out)?;
            say(csv.trim_end().to_string());
            Ok(EXIT_PASS)
        }
        Command::Solve { forcing } => {
            let n = cmd_solve(&cfg, forcing, &out)?;
            say(format!("wrote {n} nodes and manifest.json to {}", out.display()));
            Ok(EXIT_PASS)
        }
        Command::Verify => {
            let report = run_suite(&cfg)?;
            report.save(&out)?;
            write_atomic(&out.join("config.toml"), cfg.to_toml().as_bytes())?;
            for r in &report.records {
                say(format!("{} {}", if r.pass { "PASS" } else { "FAIL" }, r.name));
            }
            Ok(if report.all_pass() { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

#[derive(Serialize)]
struct CheckFile<'a> {
    config_hash: String,
    model: String,
    report: &'a AssumptionReport,
    failed: &'a [String],
}

/// Writes assumptions.json; returns the report and the names of failing clauses.
pub fn cmd_check(cfg: &RunConfig, out: &Path) -> Result<(AssumptionReport, Vec<String>)> {
    let model = cfg.operator_model()?;
    let sf = cfg.scaling_function()?;
    let report = check_assumption_a(&model, &sf, &AssumptionGrids::default())?;
    let v = &report.verdicts;
    let failed: Vec<String> = [
        ("clause (i) nondegeneracy", v.nondegeneracy),
        ("clause (ii) shell_symmetry", v.shell_symmetry),
        ("clause (iii) scaled_moments", v.scaled_moments),
        ("clause (iv) tail_ratio", v.tail_ratio),
    ]
    .iter()
    .filter(|(_, x)| !x.ok())
    .map(|(n, _)| n.to_string())
    .collect();
    let file = CheckFile { config_hash: cfg.hash(), model: model.describe(), report: &report, failed: &failed };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::Input(e.to_string()))?;
    write_atomic(&out.join("assumptions.json"), json.as_bytes())?;
    Ok((report, failed))
}

fn load_on_lattice(path: &Path, cfg: &RunConfig, what: &str) -> Result<GridFunction> {
    let u = GridFunction::load(path).map_err(|e| config(what, format!("{}: {e}", path.display())))?;
    let l = cfg.function_lattice()?;
    if u.lattice() != &l {
        return Err(config(
            what,
            format!("{} lives on {}, the configuration expects {}", path.display(), u.lattice().describe(), l.describe()),
        ));
    }
    Ok(u)
}

/// norms.csv with rows (beta, kind, value) sorted by β then kind.
pub fn cmd_norms(cfg: &RunConfig, input: &Path, betas: &[f64], out: &Path) -> Result<String> {
    let u = load_on_lattice(input, cfg, "--input")?;
    let sf = cfg.scaling_function()?;
    let bank = DyadicBank::new(cfg.bank.base, u.lattice(), cfg.j_max())?;
    let mut betas = betas.to_vec();
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(config("--beta", format!("smoothness indices must be positive, got {b}")));
    }
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let ap = sf.alpha_prime().value;
    let mut head = String::new();
    let mut rows = String::from("beta,kind,value\n");
    for &b in &betas {
        if sf.classify_holder_regime(b, ap) == HolderRegime::ConstantsOnly {
            head.push_str(&format!("# warning: beta={b} lies in the constants-only regime; the Holder norm does not converge under refinement\n"));
        }
        let h = holder_norm(&u, &sf, b)?;
        rows.push_str(&format!("{b},besov,{:e}\n", besov_norm(&u, &bank, &sf, b)?));
        rows.push_str(&format!("{b},holder,{:e}\n", h.value));
        rows.push_str(&format!("{b},holder_seminorm,{:e}\n", h.seminorm));
        rows.push_str(&format!("{b},sup,{:e}\n", h.sup));
    }
    let text = head + &rows;
    write_atomic(&out.join("norms.csv"), text.as_bytes())?;
    Ok(text)
}

/// Solves with the configured solver section; returns the number of nodes written.
pub fn cmd_solve(cfg: &RunConfig, files: &[PathBuf], out: &Path) -> Result<usize> {
    let fs: Vec<GridFunction> = files.iter().map(|p| load_on_lattice(p, cfg, "--forcing")).collect::<Result<_>>()?;
    let s = &cfg.solver;
    let forcing = if fs.len() == 1 {
        Forcing::Constant(fs.into_iter().next().expect("one forcing file"))
    } else if fs.len() == s.steps + 1 {
        Forcing::Nodes(fs)
    } else {
        return Err(config("--forcing", format!("need 1 or solver.steps + 1 = {} files, got {}", s.steps + 1, fs.len())));
    };
    let g = SymbolGrid::compute(&cfg.operator_model()?, &cfg.function_lattice()?)?;
    let sol = solve_spectral(&forcing, &g, s.lambda, s.t_end, s.steps)?;
    sol.export(out, &cfg.hash())?;
    write_atomic(&out.join("config.toml"), cfg.to_toml().as_bytes())?;
    Ok(sol.states.len())
}
