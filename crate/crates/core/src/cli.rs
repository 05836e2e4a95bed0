//! The `nkji` command line: argument parsing, dispatch and output writers.
//!
//! Data goes to `--out` or standard output, diagnostics to standard error.
//! Exit status is 0 on success, 2 for invalid input, 3 for numerical
//! failure and 1 for anything else (I/O).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::coeffs::{self, ReducedForm};
use crate::error::{Error, Result};
use crate::params::{self, ParamMap, StructuralParams};
use crate::shocks::{self, Innovation, ShockKind};
use crate::sim::{self, BudgetMode};
use crate::statespace::{self, Axis};
use crate::oracle;

/// Schema version written in the first line of every CSV.
pub const CSV_SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "nkji", version, about = "Common-knowledge New Keynesian model with job insecurity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Solution {
    /// closed-form coefficient tables
    #[default]
    Tables,
    /// undetermined-coefficients solution
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Budget {
    #[default]
    Independent,
    Balanced,
}

impl From<Budget> for BudgetMode {
    fn from(b: Budget) -> Self {
        match b {
            Budget::Independent => BudgetMode::Independent,
            Budget::Balanced => BudgetMode::Balanced,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON calibration file (name -> number); missing fields use defaults
    #[arg(long, global = true, value_name = "PATH")]
    pub calib: Option<PathBuf>,
    /// Parameter override, applied after --calib (repeatable)
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Output file [default: standard output]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format [default: per subcommand]
    #[arg(long, global = true)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    /// Random seed
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of periods
    #[arg(long = "T", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub t: u64,
    /// Burn-in periods drawn and discarded before the first reported one
    #[arg(long, default_value_t = 0)]
    pub burn: u64,
    /// Budget mode
    #[arg(long, value_enum, default_value_t = Budget::Independent)]
    pub budget: Budget,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduced-form coefficients [json]
    Coeffs {
        #[arg(long, value_enum, default_value_t = Solution::Tables)]
        solution: Solution,
    },
    /// Shock innovations and exogenous states [csv]
    Shocks {
        #[command(flatten)]
        path: PathArgs,
        /// Report the signal without communication noise
        #[arg(long, default_value_t = false, action = clap::ArgAction::Set, value_name = "BOOL")]
        transparent: bool,
    },
    /// Equilibrium path [csv]
    Simulate {
        #[command(flatten)]
        path: PathArgs,
        #[arg(long, value_enum, default_value_t = Solution::Tables)]
        solution: Solution,
    },
    /// Impulse responses to a single innovation at h = 0 [csv]
    Irf {
        /// omega, eta, L, lambda, xi, v, sigma_cp, T_natu or Xi
        #[arg(long)]
        shock: String,
        /// Last horizon reported
        #[arg(long = "H", default_value_t = 20)]
        h: usize,
        /// Size of the impulse
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        size: f64,
        #[arg(long, value_enum, default_value_t = Solution::Tables)]
        solution: Solution,
    },
    /// Signs of the disclosure coefficients [json]
    Transparency {
        #[arg(long, value_enum, default_value_t = Solution::Tables)]
        solution: Solution,
    },
    /// Spectrum of the transition matrix and determinacy verdicts [json]
    Determinacy {
        /// Number of predetermined variables; all of 0..9 when absent
        #[arg(long = "n-pre", value_parser = clap::value_parser!(u8).range(0..=9))]
        n_pre: Option<u8>,
        /// Borderline tolerance on |modulus - 1|
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Determinacy verdicts over a two-parameter grid [csv]
    Sweep {
        /// NAME:LO:HI:N
        #[arg(long)]
        axis1: Axis,
        /// NAME:LO:HI:N
        #[arg(long)]
        axis2: Axis,
        /// Number of predetermined variables
        #[arg(long = "n-pre", value_parser = clap::value_parser!(u8).range(0..=9))]
        n_pre: u8,
        /// Borderline tolerance on |modulus - 1|
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Worker threads
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
    },
    /// Tables against the undetermined-coefficients solution, plus residuals [json]
    Audit {
        /// Relative tolerance of the entry comparison
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Run the stability check over this many random parameter sets instead
        #[arg(long)]
        draws: Option<usize>,
        /// Seed of the parameter draws, or of the residual path
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Periods of the residual path
        #[arg(long = "T", default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        t: u64,
    },
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_numerical() => 3,
        Error::Validation(_)
        | Error::UnknownParameter(_)
        | Error::BudgetModeConflict { .. }
        | Error::MissingState(_)
        | Error::UnknownShockKind(_)
        | Error::Horizon { .. }
        | Error::Usage(_) => 2,
        _ => 1,
    }
}

/// Calibration file, then overrides, then validation.
pub fn load_params(common: &Common) -> Result<StructuralParams> {
    let mut raw: ParamMap = match &common.calib {
        Some(path) => params::load_calibration(path)?,
        None => ParamMap::new(),
    };
    for s in &common.params {
        let (name, value) = params::parse_override(s)?;
        raw.insert(name, value);
    }
    Ok(params::validate(&raw)?)
}

fn reduced_form(p: &StructuralParams, solution: Solution) -> Result<ReducedForm> {
    match solution {
        Solution::Tables => Ok(coeffs::compute_all(p)),
        Solution::Oracle => {
            let sol = oracle::solve_undetermined(p)?;
            if let Some(w) = sol.warning() {
                log::warn!("{w}");
            }
            Ok(sol.rf)
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let p = load_params(common)?;
    let name = command_name(&cli.command);
    let format = |default| common.format.unwrap_or(default);
    let text = match &cli.command {
        Command::Coeffs { solution } => {
            let rf = reduced_form(&p, *solution)?;
            match format(Format::Json) {
                Format::Json => to_json(&rf.to_json())?,
                Format::Csv => coeffs_csv(&rf),
            }
        }
        Command::Shocks { path, transparent } => {
            let sp = shock_path(&p, path)?;
            no_json(name, format(Format::Csv))?;
            shocks_csv(&sp, *transparent)
        }
        Command::Simulate { path, solution } => {
            let rf = reduced_form(&p, *solution)?;
            let sp = shock_path(&p, path)?;
            let eq = sim::simulate(&rf, &sp, path.budget.into())?;
            no_json(name, format(Format::Csv))?;
            simulate_csv(&eq)
        }
        Command::Irf {
            shock,
            h,
            size,
            solution,
        } => {
            let kind: ShockKind = shock.parse()?;
            let rf = reduced_form(&p, *solution)?;
            let table = sim::irf(&rf, kind, *h, *size)?;
            match format(Format::Csv) {
                Format::Csv => irf_csv(&table),
                Format::Json => to_json(&table)?,
            }
        }
        Command::Transparency { solution } => {
            let rf = reduced_form(&p, *solution)?;
            no_csv(name, format(Format::Json))?;
            to_json(&sim::transparency_audit(&rf))?
        }
        Command::Determinacy { n_pre, tol } => {
            let rf = coeffs::compute_all(&p);
            let mut report = statespace::determinacy(&rf, *tol)?;
            if let Some(n) = n_pre {
                report.verdicts.retain(|k, _| *k == *n as usize);
            }
            no_csv(name, format(Format::Json))?;
            to_json(&report)?
        }
        Command::Sweep {
            axis1,
            axis2,
            n_pre,
            tol,
            workers,
        } => {
            let cells = statespace::sweep(&p, axis1, axis2, *n_pre as usize, *tol, *workers as usize)?;
            no_json(name, format(Format::Csv))?;
            sweep_csv(axis1, axis2, &cells)
        }
        Command::Audit { tol, draws, seed, t } => {
            no_csv(name, format(Format::Json))?;
            match draws {
                Some(n) => to_json(&oracle::errata_stability(*seed, *n, *tol)?)?,
                None => to_json(&audit_document(&p, *tol, *seed, *t as usize)?)?,
            }
        }
    };
    emit(common, &text)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Coeffs { .. } => "coeffs",
        Command::Shocks { .. } => "shocks",
        Command::Simulate { .. } => "simulate",
        Command::Irf { .. } => "irf",
        Command::Transparency { .. } => "transparency",
        Command::Determinacy { .. } => "determinacy",
        Command::Sweep { .. } => "sweep",
        Command::Audit { .. } => "audit",
    }
}

fn no_json(cmd: &str, f: Format) -> Result<()> {
    match f {
        Format::Csv => Ok(()),
        Format::Json => Err(Error::Usage(format!("--format json is not available for `{cmd}`"))),
    }
}

fn no_csv(cmd: &str, f: Format) -> Result<()> {
    match f {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Usage(format!("--format csv is not available for `{cmd}`"))),
    }
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn shock_path(p: &StructuralParams, a: &PathArgs) -> Result<shocks::ShockPath> {
    let sp = shocks::draw_burned(p, a.seed, a.t as usize, a.burn as usize, Innovation::Gaussian);
    match BudgetMode::from(a.budget) {
        BudgetMode::Independent => Ok(sp),
        BudgetMode::Balanced => sp.balanced(),
    }
}

/// Plain CSV writer: comment line, header, then rows of shortest
/// round-trip floats.
struct Csv(String);

impl Csv {
    fn new(cmd: &str, header: &[&str]) -> Self {
        let mut s = format!("# nkji {cmd} v{CSV_SCHEMA}\n");
        s.push_str(&header.join(","));
        s.push('\n');
        Csv(s)
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let mut first = true;
        for f in fields {
            if !first {
                self.0.push(',');
            }
            self.0.push_str(&f);
            first = false;
        }
        self.0.push('\n');
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub const COEFFS_HEADER: [&str; 4] = ["variable", "index", "regressor", "value"];

fn coeffs_csv(rf: &ReducedForm) -> String {
    let mut csv = Csv::new("coeffs", &COEFFS_HEADER);
    for (v, i, z) in rf.entries() {
        csv.row([v.name().to_string(), i.to_string(), v.regressor(i).name().to_string(), num(z)]);
    }
    csv.0
}

pub const SHOCKS_HEADER: [&str; 18] = [
    "t", "omega", "eta", "L", "lambda", "xi", "v", "sigma_cp", "T_natu", "Xi", "chi", "mu", "ybar", "g", "tax",
    "eps", "ubar", "Psi",
];

fn shocks_csv(sp: &shocks::ShockPath, transparent: bool) -> String {
    let mut csv = Csv::new("shocks", &SHOCKS_HEADER);
    let psi = shocks::signal(sp, transparent);
    let order = [
        ShockKind::Omega,
        ShockKind::Eta,
        ShockKind::TaxShock,
        ShockKind::Lambda,
        ShockKind::Xi,
        ShockKind::V,
        ShockKind::CostPush,
        ShockKind::Natu,
        ShockKind::Noise,
    ];
    for t in 0..sp.horizon() {
        let mut fields = vec![t.to_string()];
        fields.extend(order.iter().map(|&k| num(sp.innovation(k)[t])));
        // the drift of potential output is its level under the AR(1) law
        fields.extend(
            [sp.chi[t], sp.ybar[t], sp.ybar[t], sp.g[t], sp.tax[t], sp.eps[t], sp.ubar[t], psi[t]]
                .into_iter()
                .map(num),
        );
        csv.row(fields);
    }
    csv.0
}

fn simulate_csv(eq: &sim::EquilibriumPath) -> String {
    let cols = eq.columns();
    let mut header = vec!["t"];
    header.extend(cols.iter().map(|(n, _)| *n));
    header.push("fe");
    let mut csv = Csv::new("simulate", &header);
    for t in 0..eq.horizon() {
        let mut fields = vec![t.to_string()];
        fields.extend(cols.iter().map(|(_, s)| num(s[t])));
        fields.push(eq.fe.get(t).map(|&x| num(x)).unwrap_or_default());
        csv.row(fields);
    }
    csv.0
}

pub const IRF_HEADER: [&str; 3] = ["h", "variable", "response"];

fn irf_csv(table: &sim::IrfTable) -> String {
    let mut csv = Csv::new("irf", &IRF_HEADER);
    for h in 0..=table.horizon {
        for v in sim::IRF_VARIABLES {
            csv.row([h.to_string(), v.to_string(), num(table.get(v)[h])]);
        }
    }
    csv.0
}

pub const SWEEP_HEADER: [&str; 6] = ["axis1", "axis2", "stable", "unstable", "borderline", "verdict"];

fn sweep_csv(a1: &Axis, a2: &Axis, cells: &[statespace::SweepCell]) -> String {
    let mut csv = Csv::new("sweep", &SWEEP_HEADER);
    let _ = writeln!(csv.0, "# axis1={} axis2={}", a1.name, a2.name);
    for c in cells {
        let (s, u, b) = match c.counts {
            Some(k) => (k.stable.to_string(), k.unstable.to_string(), k.borderline.to_string()),
            None => Default::default(),
        };
        let verdict = c.verdict.map_or_else(|| "invalid".to_string(), |v| v.to_string());
        csv.row([num(c.axis1), num(c.axis2), s, u, b, verdict]);
    }
    csv.0
}

/// Errata, typo verdicts and residual reports for one parameter set.
pub fn audit_document(p: &StructuralParams, tol: f64, seed: u64, t: usize) -> Result<serde_json::Value> {
    let report = oracle::audit(p, tol)?;
    let sol = oracle::solve_undetermined(p)?;
    let tables = coeffs::compute_all(p);
    let path = shocks::draw(p, seed, t, None);
    let residuals = |rf: &ReducedForm, threshold| -> Result<oracle::ResidualReport> {
        let eq = sim::simulate(rf, &path, BudgetMode::Independent)?;
        Ok(oracle::residuals(&eq, threshold))
    };
    Ok(json!({
        "errata": report.errata,
        "typos": report.typos,
        "residuals": {
            "oracle": residuals(&sol.rf, 1e-9)?,
            "tables": residuals(&tables, 1e-12)?,
        },
        "condition_number": report.condition_number,
        "warning": report.warning,
        "tol": tol,
    }))
}
