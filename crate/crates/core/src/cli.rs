// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Every subcommand produces one [`Table`], written
//! as CSV or as a JSON array of objects. Floats are printed with 17
//! significant digits so both encodings round-trip exactly.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::error::Error;
use crate::optimal::{
    closed_form_optimal, convergence_time, extremal_hypothesis, from_extremes, parity, Parity,
};
use crate::sim::{run_with, RunOptions, DEFAULT_EPS, DEFAULT_T_MAX};
use crate::spectra::{extremal_eigenvalues, laplacian_spectrum, verify_eigenpair, EigenIndex};
use crate::topology::{build_stencil, Norm, TopologySpec};
use crate::tradeoff::{min_power_given_time, min_time_given_power, TradeoffResult};

#[derive(Debug, Parser)]
#[command(
    name = "torus-consensus",
    version,
    about = "Optimal average-consensus parameters on r-nearest-neighbor tori"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Peraxis,
    L1,
    Linf,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Peraxis => Norm::PerAxis,
            NormArg::L1 => Norm::L1,
            NormArg::Linf => Norm::LInf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    /// Nodes per axis; every axis gets the same size.
    N,
    /// Neighbor radius.
    R,
    /// Number of dimensions, taking a prefix of `--dims`.
    M,
}

#[derive(Debug, Clone, Args)]
pub struct TopologyArgs {
    /// Nodes per axis, comma separated (e.g. `400` or `16,18,20`).
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_enum, default_value_t = NormArg::Peraxis)]
    pub norm: NormArg,
}

impl TopologyArgs {
    pub fn spec(&self) -> Result<TopologySpec, Error> {
        TopologySpec::new(self.dims.clone(), self.r, self.norm.into())
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and enumerated optimal parameters for one network.
    Analyze {
        #[command(flatten)]
        topology: TopologyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extreme Laplacian eigenvalues, or the whole spectrum with `--all`.
    Spectrum {
        #[command(flatten)]
        topology: TopologyArgs,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the consensus iteration and compare with the analytic rate.
    Simulate {
        #[command(flatten)]
        topology: TopologyArgs,
        /// Consensus parameter; defaults to the enumerated optimum.
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        max_iter: usize,
        /// Start every node at this value instead of a random draw.
        #[arg(long)]
        constant: Option<f64>,
        /// Emit the per-iteration error instead of the summary.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One row per value of `n`, `r` or `m`.
    Sweep {
        #[arg(long = "var", value_enum)]
        var: SweepVar,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        /// Axis sizes (required for `r` and `m` sweeps).
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Number of axes for an `n` sweep.
        #[arg(long, default_value_t = 1)]
        axes: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, value_enum, default_value_t = NormArg::Peraxis)]
        norm: NormArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convergence time versus power over `r = 1..=r_max`.
    #[command(group(ArgGroup::new("budget").required(true).args(["p_max", "t_max"])))]
    Tradeoff {
        /// Axis sizes; the radius is scanned.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_enum, default_value_t = NormArg::Peraxis)]
        norm: NormArg,
        #[arg(long)]
        r_max: usize,
        /// Path-loss exponent.
        #[arg(long)]
        alpha: f64,
        /// Minimize convergence time under this power budget.
        #[arg(long)]
        p_max: Option<f64>,
        /// Minimize power under this convergence-time budget.
        #[arg(long)]
        t_max: Option<f64>,
        /// Emit every scanned radius instead of the optimum.
        #[arg(long)]
        frontier: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Analyze { output, .. }
            | Command::Spectrum { output, .. }
            | Command::Simulate { output, .. }
            | Command::Sweep { output, .. }
            | Command::Tradeoff { output, .. } => output,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode output: {0}")]
    Encode(String),
}

impl CliError {
    /// 2 for bad input, 3 for infeasible or non-converging runs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(Error::Infeasible(_) | Error::NoConvergence(_)) => 3,
            CliError::Model(_) => 2,
            CliError::Io(_) | CliError::Encode(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Float(x) if x.is_finite() => Value::Number(
                serde_json::Number::from_str(&format_float(*x)).expect("valid number"),
            ),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// 17 significant digits in scientific notation with a signed exponent,
/// e.g. `3.3333333333333331e-1`, `1.0000000000000000e+0`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let enc = |e: csv::Error| CliError::Encode(e.to_string());
        w.write_record(&self.columns).map_err(enc)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))
                .map_err(enc)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Encode(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json_value()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s =
            serde_json::to_string_pretty(&rows).map_err(|e| CliError::Encode(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn dims_label(dims: &[usize]) -> String {
    dims.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn parity_note(spec: &TopologySpec) -> &'static str {
    if spec.effective_norm() != Norm::PerAxis {
        return "closed form requires per-axis neighborhood";
    }
    match parity(spec) {
        Ok(Parity::Even) => "all even",
        Ok(Parity::Odd) => "all odd",
        Err(_) => "mixed parity: closed form unavailable",
    }
}

/// Closed-form values are reported only where preconditions hold.
fn closed_or_none(spec: &TopologySpec) -> Result<Option<crate::optimal::OptimalParams>, Error> {
    match closed_form_optimal(spec) {
        Ok(p) => Ok(Some(p)),
        Err(Error::UnsupportedParity(_)) => Ok(None),
        Err(Error::InvalidSpec(_)) if spec.effective_norm() != Norm::PerAxis => Ok(None),
        // gamma >= 1 from a closed form is a model failure worth surfacing
        Err(e) => Err(e),
    }
}

fn hypothesis_label(spec: &TopologySpec) -> Result<&'static str, Error> {
    match extremal_hypothesis(spec) {
        Ok(c) if c.holds() => Ok("holds"),
        Ok(_) => Ok("fails"),
        Err(Error::UnsupportedParity(_)) => Ok("n/a"),
        Err(Error::InvalidSpec(_)) if spec.effective_norm() != Norm::PerAxis => Ok("n/a"),
        Err(e) => Err(e),
    }
}

pub fn analyze(spec: &TopologySpec) -> Result<Table, Error> {
    let s = extremal_eigenvalues(spec)?;
    let oracle = from_extremes(s.lambda2, s.lambda_n)?;
    let closed = closed_or_none(spec)?;
    let mut t = Table::new(vec![
        "dims",
        "r",
        "norm",
        "n",
        "degree",
        "lambda2",
        "lambda_n",
        "arg2",
        "arg_n",
        "h_oracle",
        "gamma_oracle",
        "T",
        "h_closed",
        "gamma_closed",
        "T_closed",
        "h_abs_diff",
        "gamma_abs_diff",
        "hypothesis",
        "parity_note",
    ]);
    t.push(vec![
        Cell::text(dims_label(spec.dims())),
        Cell::Int(spec.r() as u64),
        Cell::text(spec.effective_norm().to_string()),
        Cell::Int(spec.n() as u64),
        Cell::Int(build_stencil(spec).degree() as u64),
        Cell::Float(s.lambda2),
        Cell::Float(s.lambda_n),
        Cell::text(s.arg2.to_string()),
        Cell::text(s.arg_n.to_string()),
        Cell::Float(oracle.h),
        Cell::Float(oracle.gamma),
        Cell::Float(oracle.convergence_time),
        Cell::opt(closed.map(|c| c.h)),
        Cell::opt(closed.map(|c| c.gamma)),
        Cell::opt(closed.map(|c| c.convergence_time)),
        Cell::opt(closed.map(|c| (c.h - oracle.h).abs())),
        Cell::opt(closed.map(|c| (c.gamma - oracle.gamma).abs())),
        Cell::text(hypothesis_label(spec)?),
        Cell::text(parity_note(spec)),
    ]);
    Ok(t)
}

pub fn spectrum(spec: &TopologySpec, all: bool) -> Result<Table, Error> {
    if all {
        let mut t = Table::new(vec!["index", "lambda_L"]);
        for (u, l) in laplacian_spectrum(spec).into_iter().enumerate() {
            t.push(vec![
                Cell::text(EigenIndex::new(spec, spec.decode(u))?.to_string()),
                Cell::Float(l),
            ]);
        }
        return Ok(t);
    }
    let s = extremal_eigenvalues(spec)?;
    let mut t = Table::new(vec![
        "dims",
        "r",
        "norm",
        "n",
        "degree",
        "lambda2",
        "arg2",
        "residual2",
        "lambda_n",
        "arg_n",
        "residual_n",
    ]);
    t.push(vec![
        Cell::text(dims_label(spec.dims())),
        Cell::Int(spec.r() as u64),
        Cell::text(spec.effective_norm().to_string()),
        Cell::Int(s.n as u64),
        Cell::Int(build_stencil(spec).degree() as u64),
        Cell::Float(s.lambda2),
        Cell::text(s.arg2.to_string()),
        Cell::Float(verify_eigenpair(spec, &s.arg2)?),
        Cell::Float(s.lambda_n),
        Cell::text(s.arg_n.to_string()),
        Cell::Float(verify_eigenpair(spec, &s.arg_n)?),
    ]);
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub h: Option<f64>,
    pub eps: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub constant: Option<f64>,
    pub trace: bool,
}

pub fn simulate(spec: &TopologySpec, cfg: &SimulateConfig) -> Result<Table, Error> {
    let s = extremal_eigenvalues(spec)?;
    let h = match cfg.h {
        Some(h) => h,
        None => from_extremes(s.lambda2, s.lambda_n)?.h,
    };
    // Spectral radius of W on the mean-zero subspace at this h.
    let gamma = (1.0 - h * s.lambda2)
        .abs()
        .max((1.0 - h * s.lambda_n).abs());
    let opts = RunOptions {
        eps: cfg.eps,
        t_max: cfg.max_iter,
        initial: cfg.constant.map(|c| vec![c; spec.n()]),
    };
    let rep = run_with(spec, h, cfg.seed, &opts)?;
    if cfg.trace {
        let mut t = Table::new(vec!["t", "error"]);
        for (i, e) in rep.error_trace.iter().enumerate() {
            t.push(vec![Cell::Int(i as u64), Cell::Float(*e)]);
        }
        return Ok(t);
    }
    let time = convergence_time(gamma).ok();
    let rel = rep
        .fitted_contraction
        .filter(|_| gamma > 0.0)
        .map(|f| (f - gamma).abs() / gamma);
    let mut t = Table::new(vec![
        "dims",
        "r",
        "norm",
        "n",
        "h",
        "gamma",
        "T",
        "eps",
        "seed",
        "iterations",
        "predicted_iterations",
        "fitted_contraction",
        "fitted_rel_diff",
        "avg_residual",
        "final_error",
    ]);
    t.push(vec![
        Cell::text(dims_label(spec.dims())),
        Cell::Int(spec.r() as u64),
        Cell::text(spec.effective_norm().to_string()),
        Cell::Int(spec.n() as u64),
        Cell::Float(h),
        Cell::Float(gamma),
        Cell::opt(time),
        Cell::Float(cfg.eps),
        Cell::Int(rep.seed),
        Cell::Int(rep.iterations as u64),
        Cell::opt(time.map(|t| t * (1.0 / cfg.eps).ln())),
        Cell::opt(rep.fitted_contraction),
        Cell::opt(rel),
        Cell::Float(rep.avg_residual),
        Cell::Float(*rep.error_trace.last().expect("trace has e(0)")),
    ]);
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub var: SweepVar,
    pub from: usize,
    pub to: usize,
    pub step: usize,
    pub dims: Vec<usize>,
    pub axes: usize,
    pub r: usize,
    pub norm: Norm,
}

impl SweepConfig {
    pub fn specs(&self) -> Result<Vec<(usize, TopologySpec)>, Error> {
        if self.step == 0 || self.from > self.to {
            return Err(Error::InvalidSpec(format!(
                "empty sweep range {}..={} step {}",
                self.from, self.to, self.step
            )));
        }
        (self.from..=self.to)
            .step_by(self.step)
            .map(|v| {
                let spec = match self.var {
                    SweepVar::N => {
                        if self.axes == 0 {
                            return Err(Error::InvalidSpec("--axes must be positive".into()));
                        }
                        TopologySpec::new(vec![v; self.axes], self.r, self.norm)?
                    }
                    SweepVar::R => TopologySpec::new(self.dims.clone(), v, self.norm)?,
                    SweepVar::M => {
                        if v == 0 || v > self.dims.len() {
                            return Err(Error::InvalidSpec(format!(
                                "m = {v} needs at least {v} entries in --dims"
                            )));
                        }
                        TopologySpec::new(self.dims[..v].to_vec(), self.r, self.norm)?
                    }
                };
                Ok((v, spec))
            })
            .collect()
    }
}

pub fn sweep(cfg: &SweepConfig) -> Result<Table, Error> {
    let specs = cfg.specs()?;
    let var = match cfg.var {
        SweepVar::N => "n",
        SweepVar::R => "r",
        SweepVar::M => "m",
    };
    let mut t = Table::new(vec![
        "var",
        "value",
        "dims",
        "r",
        "h_closed",
        "gamma_closed",
        "T_closed",
        "h_oracle",
        "gamma_oracle",
        "T",
        "hypothesis",
    ]);
    let rows: Vec<Vec<Cell>> = specs
        .par_iter()
        .map(|(v, spec)| {
            let oracle = crate::optimal::oracle_optimal(spec)?;
            let closed = closed_or_none(spec)?;
            Ok(vec![
                Cell::text(var),
                Cell::Int(*v as u64),
                Cell::text(dims_label(spec.dims())),
                Cell::Int(spec.r() as u64),
                Cell::opt(closed.map(|c| c.h)),
                Cell::opt(closed.map(|c| c.gamma)),
                Cell::opt(closed.map(|c| c.convergence_time)),
                Cell::Float(oracle.h),
                Cell::Float(oracle.gamma),
                Cell::Float(oracle.convergence_time),
                Cell::text(hypothesis_label(spec)?),
            ])
        })
        .collect::<Result<_, Error>>()?;
    t.rows = rows;
    Ok(t)
}

fn tradeoff_table(
    res: &TradeoffResult,
    program: &str,
    budget: f64,
    alpha: f64,
    frontier: bool,
) -> Table {
    if frontier {
        let mut t = Table::new(vec!["r", "T", "P"]);
        for p in &res.frontier {
            t.push(vec![
                Cell::Int(p.r as u64),
                Cell::Float(p.convergence_time),
                Cell::Float(p.power),
            ]);
        }
        return t;
    }
    let mut t = Table::new(vec![
        "program", "budget", "alpha", "r_star", "T_at_r", "P_at_r",
    ]);
    t.push(vec![
        Cell::text(program),
        Cell::Float(budget),
        Cell::Float(alpha),
        Cell::Int(res.r_star as u64),
        Cell::Float(res.time_at_r),
        Cell::Float(res.power_at_r),
    ]);
    t
}

/// Executes a parsed command and returns its table.
pub fn execute(command: &Command) -> Result<Table, Error> {
    match command {
        Command::Analyze { topology, .. } => analyze(&topology.spec()?),
        Command::Spectrum { topology, all, .. } => spectrum(&topology.spec()?, *all),
        Command::Simulate {
            topology,
            h,
            eps,
            seed,
            max_iter,
            constant,
            trace,
            ..
        } => simulate(
            &topology.spec()?,
            &SimulateConfig {
                h: *h,
                eps: *eps,
                seed: *seed,
                max_iter: *max_iter,
                constant: *constant,
                trace: *trace,
            },
        ),
        Command::Sweep {
            var,
            from,
            to,
            step,
            dims,
            axes,
            r,
            norm,
            ..
        } => sweep(&SweepConfig {
            var: *var,
            from: *from,
            to: *to,
            step: *step,
            dims: dims.clone(),
            axes: *axes,
            r: *r,
            norm: (*norm).into(),
        }),
        Command::Tradeoff {
            dims,
            norm,
            r_max,
            alpha,
            p_max,
            t_max,
            frontier,
            ..
        } => {
            let base = TopologySpec::new(dims.clone(), 1, (*norm).into())?;
            match (p_max, t_max) {
                (Some(p), None) => Ok(tradeoff_table(
                    &min_time_given_power(&base, *r_max, *p, *alpha)?,
                    "min_time_given_power",
                    *p,
                    *alpha,
                    *frontier,
                )),
                (None, Some(tm)) => Ok(tradeoff_table(
                    &min_power_given_time(&base, *r_max, *tm, *alpha)?,
                    "min_power_given_time",
                    *tm,
                    *alpha,
                    *frontier,
                )),
                _ => Err(Error::InvalidSpec(
                    "give exactly one of --p-max and --t-max".into(),
                )),
            }
        }
    }
}

/// Parses nothing; runs `cli` and writes the rendered table.
pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    let table = execute(&cli.command)?;
    let out = cli.command.output();
    let text = table.render(out.format)?;
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
