//! Command-line front end of the `ers` binary.
//!
//! Each run prints a TSV table with one row per requested `ε`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::boehm::{TBEncoding, TernaryCode};
use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};
use crate::expr::{compile_boehm, compile_sd, parse_comparison, parse_expr, Expr};
use crate::optimisation::{global_max, global_min, Algo as OptAlgo};
use crate::regression::{
    regress_opt, regress_search, regress_search_pair, Regression, SdAlgo, SdRegression,
};
use crate::search::{
    boehm_comparison, sd_comparison, search_branching, search_sd_decreasing, search_sd_exhaustive,
    search_tb_exhaustive,
};
use crate::signed_digit::{self as sd, SDStream};

pub const HEADER: &str = "epsilon\tcode_k\tcode_p\tdyadic\tvalue_k\tvalue_p\telapsed_ms";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "ers",
    version,
    about = "Search, optimisation and regression over exact real encodings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Boehm,
    SignedDigit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Exhaustive,
    Branch,
    Bnb,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fit {
    /// Minimise the loss.
    Opt,
    /// Search for a loss within one code step of zero.
    Search,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Backend::Boehm)]
    pub backend: Backend,
    /// Anchor code `k@p` for the interval `[k/2^p, (k+2)/2^p]`.
    #[arg(long, default_value = "-1@0", allow_hyphen_values = true)]
    pub interval: String,
    /// Output precision; a comma list gives one row each.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<i64>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Exhaustive)]
    pub algo: AlgoArg,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Print `-` in the elapsed column, making tables byte-stable.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find the first argument satisfying a comparison.
    Search {
        #[command(flatten)]
        common: Common,
        /// Comparison such as `abs(x*x - 1/2^1) <= eps`.
        #[arg(long, allow_hyphen_values = true)]
        pred: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Approximate global minimum (or maximum) of a function.
    Optimise {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", allow_hyphen_values = true)]
        function: String,
        #[arg(long)]
        maximise: bool,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Fit model parameters to an oracle at observation points.
    Regress {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        oracle: String,
        /// Comma-separated closed expressions.
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        obs: String,
        /// One or two comma-separated parameter names.
        #[arg(long, default_value = "p")]
        params: String,
        #[arg(long, default_value = "x")]
        predictor: String,
        #[arg(long, value_enum, default_value_t = Fit::Opt)]
        fit: Fit,
        /// Oracle input distortion, an expression in the predictor.
        #[arg(long, allow_hyphen_values = true)]
        distort: Option<String>,
    },
}

/// One table row; `code` is `None` when nothing was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub eps: i64,
    pub code: Option<TernaryCode>,
    pub value: Option<TernaryCode>,
    pub elapsed_ms: Option<u128>,
}

impl Row {
    pub fn to_tsv(&self) -> String {
        let mut s = format!("{}\t", self.eps);
        match &self.code {
            Some(c) => {
                let d = Dyadic::new(&c.k + 1, c.p);
                write!(s, "{}\t{}\t{}", c.k, c.p, d).unwrap();
            }
            None => s.push_str("-\t-\t-"),
        }
        match &self.value {
            Some(v) => write!(s, "\t{}\t{}", v.k, v.p).unwrap(),
            None => s.push_str("\t-\t-"),
        }
        match self.elapsed_ms {
            Some(ms) => write!(s, "\t{ms}").unwrap(),
            None => s.push_str("\t-"),
        }
        s
    }
}

pub fn render(rows: &[Row]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    out
}

fn usage(msg: impl Into<String>) -> ErsError {
    ErsError::Invalid(msg.into())
}

fn sd_eps(eps: i64) -> Result<usize> {
    usize::try_from(eps).map_err(|_| usage("signed-digit precision must be non-negative"))
}

/// Level-`n` code of a signed-digit stream.
fn sd_code(a: &SDStream, n: usize) -> TernaryCode {
    TernaryCode {
        k: sd::integer_approx(a, n),
        p: n as i64,
    }
}

/// Splits on commas outside parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let (mut depth, mut start, mut out) = (0i32, 0usize, Vec::new());
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.into_iter().filter(|p| !p.is_empty()).collect()
}

fn timed<T>(common: &Common, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<u128>)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, (!common.no_timing).then(|| t.elapsed().as_millis())))
}

fn run_search(common: &Common, pred: &str, var: &str) -> Result<Vec<Row>> {
    let cmp = parse_comparison(pred)?;
    let anchor: TernaryCode = common.interval.parse()?;
    let mut rows = Vec::new();
    for &eps in &common.eps {
        let row = match common.backend {
            Backend::Boehm => {
                let p = boehm_comparison(&cmp, var, &anchor, eps)?;
                let (r, ms) = timed(common, || match common.algo {
                    AlgoArg::Exhaustive => search_tb_exhaustive(&anchor, &p),
                    AlgoArg::Branch => search_branching(&anchor, &p),
                    a => Err(usage(format!("{a:?} is not a Boehm search algorithm"))),
                })?;
                let lhs = compile_boehm(&cmp.lhs, &[var])?;
                let value = match &r.witness {
                    Some(w) => Some(lhs.apply(std::slice::from_ref(w))?.try_code(eps)?),
                    None => None,
                };
                Row {
                    eps,
                    code: r.code,
                    value,
                    elapsed_ms: ms,
                }
            }
            Backend::SignedDigit => {
                let n = sd_eps(eps)?;
                let p = sd_comparison(&cmp, var, n)?;
                let (r, ms) = timed(common, || match common.algo {
                    AlgoArg::Exhaustive => search_sd_exhaustive(&p),
                    AlgoArg::Decreasing => Ok(search_sd_decreasing(&p)),
                    a => Err(usage(format!(
                        "{a:?} is not a signed-digit search algorithm"
                    ))),
                })?;
                let delta = r.prefix.len();
                eprintln!(
                    "prefix\t{}\t({})",
                    sd::format_prefix(&r.witness, delta),
                    sd::format_prefix(&r.witness.skip(delta), 1)
                );
                let lhs = compile_sd(&cmp.lhs, &[var])?;
                let value = sd_code(&lhs.apply(std::slice::from_ref(&r.witness)), n);
                let code = r.found.then(|| sd_code(&r.witness, delta));
                Row {
                    eps,
                    code,
                    value: r.found.then_some(value),
                    elapsed_ms: ms,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn run_optimise(common: &Common, function: &str, maximise: bool, var: &str) -> Result<Vec<Row>> {
    if common.backend != Backend::Boehm {
        return Err(ErsError::Unsupported(
            "optimisation runs on the Boehm backend".into(),
        ));
    }
    let f = compile_boehm(&parse_expr(function)?, &[var])?;
    let anchor: TernaryCode = common.interval.parse()?;
    let algo = opt_algo(common.algo)?;
    let mut rows = Vec::new();
    for &eps in &common.eps {
        let (r, ms) = timed(common, || {
            if maximise {
                global_max(&f, &anchor, eps, algo)
            } else {
                global_min(&f, &anchor, eps, algo)
            }
        })?;
        rows.push(Row {
            eps,
            code: Some(r.arg_code),
            value: Some(r.value_code),
            elapsed_ms: ms,
        });
    }
    Ok(rows)
}

fn opt_algo(a: AlgoArg) -> Result<OptAlgo> {
    match a {
        AlgoArg::Exhaustive => Ok(OptAlgo::Exhaustive),
        AlgoArg::Bnb => Ok(OptAlgo::Bnb),
        a => Err(usage(format!("{a:?} is not an optimisation algorithm"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_regress(
    common: &Common,
    model: &str,
    oracle: &str,
    obs: &str,
    params: &str,
    predictor: &str,
    fit: Fit,
    distort: Option<&str>,
) -> Result<Vec<Row>> {
    let model = parse_expr(model)?;
    let oracle = parse_expr(oracle)?;
    let obs: Vec<Expr> = split_top(obs)
        .into_iter()
        .map(parse_expr)
        .collect::<Result<_>>()?;
    let params: Vec<&str> = params
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let psi = distort.map(parse_expr).transpose()?;
    let anchor: TernaryCode = common.interval.parse()?;
    let mut rows = Vec::new();
    if common.backend == Backend::SignedDigit {
        let [param] = params[..] else {
            return Err(usage("signed-digit regression takes one parameter"));
        };
        let oracle = match &psi {
            Some(p) => oracle.substitute(predictor, p),
            None => oracle,
        };
        let points = obs.iter().map(closed_sd).collect::<Result<Vec<_>>>()?;
        let reg = SdRegression::from_exprs(&model, &oracle, param, predictor, points)?;
        let algo = match common.algo {
            AlgoArg::Exhaustive => SdAlgo::Exhaustive,
            AlgoArg::Decreasing => SdAlgo::Decreasing,
            a => {
                return Err(usage(format!(
                    "{a:?} is not a signed-digit search algorithm"
                )))
            }
        };
        for &eps in &common.eps {
            let n = sd_eps(eps)?;
            let (r, ms) = timed(common, || reg.regress_search(n, algo))?;
            let code = r.found.then(|| sd_code(&r.witness, r.prefix.len()));
            let closeness = TernaryCode::new(reg.least_closeness(&r.witness) as i64, 0);
            rows.push(Row {
                eps,
                code,
                value: r.found.then_some(closeness),
                elapsed_ms: ms,
            });
        }
        return Ok(rows);
    }
    let mut reg = Regression::new(model, oracle, &params, predictor, obs)?;
    if let Some(p) = &psi {
        reg = reg.distorted(p);
    }
    let loss_at =
        |args: &[TBEncoding], eps: i64| -> Result<TernaryCode> { reg.loss(args)?.try_code(eps) };
    for &eps in &common.eps {
        match (params.len(), fit) {
            (1, Fit::Opt) => {
                let algo = opt_algo(common.algo)?;
                let (r, ms) = timed(common, || regress_opt(&reg, &anchor, eps, algo))?;
                rows.push(Row {
                    eps,
                    code: Some(r.arg_code),
                    value: Some(r.value_code),
                    elapsed_ms: ms,
                });
            }
            (1, Fit::Search) => {
                let (r, ms) = timed(common, || regress_search(&reg, &anchor, eps))?;
                let value = match &r.witness {
                    Some(w) => Some(loss_at(std::slice::from_ref(w), eps)?),
                    None => None,
                };
                rows.push(Row {
                    eps,
                    code: r.code,
                    value,
                    elapsed_ms: ms,
                });
            }
            (2, Fit::Search) => {
                let ((a, b), ms) = timed(common, || {
                    regress_search_pair(&reg, (&anchor, &anchor), eps)
                })?;
                let value = match (&a.witness, &b.witness) {
                    (Some(x), Some(y)) => Some(loss_at(&[x.clone(), y.clone()], eps)?),
                    _ => None,
                };
                rows.push(Row {
                    eps,
                    code: a.code,
                    value: value.clone(),
                    elapsed_ms: ms,
                });
                rows.push(Row {
                    eps,
                    code: b.code,
                    value,
                    elapsed_ms: ms,
                });
            }
            _ => return Err(usage("two-parameter regression needs --fit search")),
        }
    }
    Ok(rows)
}

fn closed_sd(e: &Expr) -> Result<SDStream> {
    Ok(compile_sd(e, &[])?.apply(&[]))
}

pub fn run(cli: &Cli) -> Result<(Vec<Row>, Option<std::path::PathBuf>)> {
    let (rows, common) = match &cli.command {
        Command::Search { common, pred, var } => (run_search(common, pred, var)?, common),
        Command::Optimise {
            common,
            function,
            maximise,
            var,
        } => (run_optimise(common, function, *maximise, var)?, common),
        Command::Regress {
            common,
            model,
            oracle,
            obs,
            params,
            predictor,
            fit,
            distort,
        } => (
            run_regress(
                common,
                model,
                oracle,
                obs,
                params,
                predictor,
                *fit,
                distort.as_deref(),
            )?,
            common,
        ),
    };
    Ok((rows, common.output.clone()))
}

fn error_kind(e: &ErsError) -> (&'static str, i32) {
    match e {
        ErsError::Contract(_) | ErsError::NotBelow { .. } => ("contract", EXIT_CONTRACT),
        ErsError::Parse { .. } => ("parse", EXIT_USAGE),
        ErsError::Unsupported(_) => ("unsupported", EXIT_USAGE),
        _ => ("usage", EXIT_USAGE),
    }
}

/// Parses `args`, runs the job and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let prev = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| run(&cli)));
    panic::set_hook(prev);
    match outcome {
        Ok(Ok((rows, output))) => {
            let table = render(&rows);
            let written = match output {
                Some(path) => std::fs::write(&path, table),
                None => std::io::stdout().write_all(table.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error\tio\t{e}");
                return EXIT_USAGE;
            }
            EXIT_OK
        }
        Ok(Err(e)) => {
            let (kind, code) = error_kind(&e);
            eprintln!("error\t{kind}\t{e}");
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            eprintln!("error\tcontract\t{msg}");
            EXIT_CONTRACT
        }
    }
}
