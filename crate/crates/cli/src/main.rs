//! `poisson-interp`: evaluations, sweeps and the verification suite on the command line.

mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use poisson_interp::approx::best_approx;
use poisson_interp::extremes::{dual_value, exact_p2, kn_main_term, monte_carlo_lower, RegimeConstants};
use poisson_interp::kernels::{kernel_eval, KernelParams};
use poisson_interp::trig::{interp_eval, lebesgue_fn, lebesgue_main_term, PeriodicFn};
use poisson_interp::verify::{run_all, VerifyConfig};
use poisson_interp::LpExponent;
use rayon::prelude::*;
use serde::Serialize;

use crate::grid::{NRange, XGrid};
use crate::output::{Format, Sink};

#[derive(Parser)]
#[command(name = "poisson-interp", version, about = "Interpolation of generalized Poisson integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values P(t) on an x grid. Columns: x, value, abs_err.
    Kernel(Common),
    /// Interpolation of the kernel at 2n−1 nodes. Columns: n, x, f, interp, deviation.
    Interp(Common),
    /// Lebesgue function of the interpolation. Columns: n, x, lebesgue, main_term.
    Lebesgue(Common),
    /// E_n of the kernel in L_p. Columns: n, p, value, certificate, residual, iterations.
    BestApprox(Common),
    /// Class supremum of the interpolation deviation at x.
    /// Columns: n, x, p, exact_p2, dual_center, dual_halfwidth, mc_lower.
    ClassSup {
        #[command(flatten)]
        common: Common,
        /// Monte-Carlo trials for the lower bound.
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// The nine cells of the main-term table. Columns: regime, p_case, r, p, n, main_term.
    Table {
        #[command(flatten)]
        common: Common,
        /// The three r values used for the rows r<1, r=1, r>1.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        r_values: Vec<f64>,
    },
    /// Runs the acceptance criteria. Columns: id, name, passed, detail.
    Verify(Common),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Exponent p ≥ 1, or "inf".
    #[arg(long, default_value = "2")]
    p: LpExponent,
    #[arg(long, conflicts_with = "n_range")]
    n: Option<u64>,
    /// Inclusive range `a:b`.
    #[arg(long)]
    n_range: Option<NRange>,
    /// Angle in radians.
    #[arg(long, conflicts_with = "x_grid", allow_hyphen_values = true)]
    x: Option<f64>,
    /// `start:stop:count`, stop excluded.
    #[arg(long, allow_hyphen_values = true)]
    x_grid: Option<XGrid>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Omit the timestamp comment line of CSV output.
    #[arg(long)]
    no_header: bool,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<poisson_interp::Error> for Failure {
    fn from(e: poisson_interp::Error) -> Self {
        match e {
            poisson_interp::Error::Domain { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl Common {
    fn params(&self) -> Outcome<KernelParams> {
        KernelParams::new(self.alpha, self.r, self.beta).map_err(|e| Failure::Usage(e.to_string()))
    }

    fn check(&self) -> Outcome<()> {
        if !(self.tol > 0.0) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    fn ns(&self) -> Outcome<Vec<u64>> {
        let ns = match (self.n, &self.n_range) {
            (Some(n), _) => vec![n],
            (None, Some(range)) => range.values(),
            (None, None) => return Err(Failure::Usage("one of --n or --n-range is required".into())),
        };
        if ns.contains(&0) {
            return Err(Failure::Usage("n must be at least 1".into()));
        }
        Ok(ns)
    }

    fn xs(&self) -> Outcome<Vec<f64>> {
        match (self.x, &self.x_grid) {
            (Some(x), _) => Ok(vec![x]),
            (None, Some(grid)) => Ok(grid.values()),
            (None, None) => Err(Failure::Usage("one of --x or --x-grid is required".into())),
        }
    }

    fn pairs(&self) -> Outcome<Vec<(u64, f64)>> {
        let xs = self.xs()?;
        Ok(self.ns()?.into_iter().flat_map(|n| xs.iter().map(move |&x| (n, x))).collect())
    }

    fn sink(&self, default: Format) -> Sink {
        Sink::new(self.output.clone(), self.format.unwrap_or(default), !self.no_header)
    }
}

#[derive(Serialize)]
struct KernelRow {
    x: f64,
    value: f64,
    abs_err: f64,
}

#[derive(Serialize)]
struct InterpRow {
    n: u64,
    x: f64,
    f: f64,
    interp: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct LebesgueRow {
    n: u64,
    x: f64,
    lebesgue: f64,
    main_term: f64,
}

#[derive(Serialize)]
struct BestApproxRow {
    n: u64,
    p: String,
    value: f64,
    certificate: String,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct ClassSupRow {
    n: u64,
    x: f64,
    p: String,
    exact_p2: Option<f64>,
    dual_center: f64,
    dual_halfwidth: f64,
    mc_lower: f64,
}

#[derive(Serialize)]
struct TableRow {
    regime: String,
    p_case: String,
    r: f64,
    p: String,
    n: u64,
    main_term: f64,
}

#[derive(Serialize)]
struct VerifyRow {
    id: u8,
    name: String,
    passed: bool,
    detail: String,
}

/// Evaluates `f` over `items` in parallel, keeping the input order.
fn sweep<T, R, F>(items: &[T], f: F) -> Outcome<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Outcome<R> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

fn snake(v: impl Serialize) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn run(cli: Cli) -> Outcome<(Sink, Vec<serde_json::Value>, bool)> {
    fn rows<R: Serialize>(rows: Vec<R>) -> Vec<serde_json::Value> {
        rows.into_iter().map(|r| serde_json::to_value(r).expect("rows are plain records")).collect()
    }
    Ok(match cli.command {
        Command::Kernel(c) => {
            c.check()?;
            let params = c.params()?;
            let xs = c.xs()?;
            let out = sweep(&xs, |&x| {
                let v = kernel_eval(&params, x, c.tol)?;
                Ok(KernelRow { x, value: v.value, abs_err: v.abs_err })
            })?;
            (c.sink(Format::Csv), rows(out), true)
        }
        Command::Interp(c) => {
            c.check()?;
            let params = c.params()?;
            let f = PeriodicFn::kernel(params, 0.0, c.tol)?;
            let out = sweep(&c.pairs()?, |&(n, x)| {
                let value = f.eval(x);
                let interp = interp_eval(&f, n as usize, x);
                Ok(InterpRow { n, x, f: value, interp, deviation: value - interp })
            })?;
            (c.sink(Format::Csv), rows(out), true)
        }
        Command::Lebesgue(c) => {
            c.check()?;
            let out = sweep(&c.pairs()?, |&(n, x)| {
                Ok(LebesgueRow {
                    n,
                    x,
                    lebesgue: lebesgue_fn(n as usize, x),
                    main_term: lebesgue_main_term(n as usize, x),
                })
            })?;
            (c.sink(Format::Csv), rows(out), true)
        }
        Command::BestApprox(c) => {
            c.check()?;
            let params = c.params()?;
            let f = PeriodicFn::kernel(params, 0.0, c.tol)?;
            let out = sweep(&c.ns()?, |&n| {
                let best = best_approx(&f, n as usize, c.p, c.tol)?;
                Ok(BestApproxRow {
                    n,
                    p: c.p.to_string(),
                    value: best.value,
                    certificate: snake(best.certificate.kind),
                    residual: best.certificate.residual,
                    iterations: best.iterations,
                })
            })?;
            (c.sink(Format::Csv), rows(out), true)
        }
        Command::ClassSup { common: c, trials } => {
            c.check()?;
            let params = c.params()?;
            let out = sweep(&c.pairs()?, |&(n, x)| {
                let exact = if c.p.value() == 2.0 {
                    Some(exact_p2(&params, n, x, c.tol)?.value)
                } else {
                    None
                };
                let band = dual_value(&params, n, x, c.p, c.tol)?;
                let mc = monte_carlo_lower(&params, n, x, c.p, trials, c.seed)?;
                Ok(ClassSupRow {
                    n,
                    x,
                    p: c.p.to_string(),
                    exact_p2: exact,
                    dual_center: band.center,
                    dual_halfwidth: band.half_width,
                    mc_lower: mc,
                })
            })?;
            (c.sink(Format::Json), rows(out), true)
        }
        Command::Table { common: c, r_values } => {
            c.check()?;
            let [r_lt, r_eq, r_gt] = r_values[..] else {
                return Err(Failure::Usage("--r-values takes exactly three values".into()));
            };
            if !(r_lt < 1.0 && r_eq == 1.0 && r_gt > 1.0) {
                return Err(Failure::Usage("--r-values must be r<1, 1, r>1".into()));
            }
            let p_mid = if c.p.is_one() || c.p.is_infinite() {
                LpExponent::new(2.0)?
            } else {
                c.p
            };
            let cells: Vec<(u64, f64, LpExponent)> = c
                .ns()?
                .into_iter()
                .flat_map(|n| {
                    [r_lt, r_eq, r_gt].into_iter().flat_map(move |r| {
                        [LpExponent::ONE, p_mid, LpExponent::INFINITY].map(|p| (n, r, p))
                    })
                })
                .collect();
            let out = sweep(&cells, |&(n, r, p)| {
                let params = KernelParams::new(c.alpha, r, c.beta)?;
                let consts = RegimeConstants::classify(&params, p);
                Ok(TableRow {
                    regime: snake(consts.regime),
                    p_case: snake(consts.p_case),
                    r,
                    p: p.to_string(),
                    n,
                    main_term: kn_main_term(&params, p, n)?,
                })
            })?;
            (c.sink(Format::Csv), rows(out), true)
        }
        Command::Verify(c) => {
            c.check()?;
            let outcomes = run_all(&VerifyConfig { tol: c.tol, seed: c.seed });
            let ok = outcomes.iter().all(|o| o.passed);
            for o in &outcomes {
                eprintln!("{}", o.line());
            }
            let out = outcomes
                .into_iter()
                .map(|o| VerifyRow { id: o.id, name: o.name.to_string(), passed: o.passed, detail: o.detail })
                .collect();
            (c.sink(Format::Csv), rows(out), ok)
        }
    })
}

fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var("POISSON_INTERP_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("POISSON_INTERP_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let fallback = match &cli.command {
        Command::Kernel(c) | Command::Interp(c) | Command::Lebesgue(c) | Command::BestApprox(c) | Command::Verify(c) => {
            c.sink(Format::Csv)
        }
        Command::ClassSup { common, .. } => common.sink(Format::Json),
        Command::Table { common, .. } => common.sink(Format::Csv),
    };
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok((sink, rows, ok)) => {
            if let Err(e) = sink.write(&rows) {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            let record = serde_json::json!({ "error": msg });
            if let Err(e) = fallback.write(&[record]) {
                eprintln!("error: {e}");
            }
            ExitCode::from(3)
        }
    }
}
