//! Command-line front end.
//!
//! A run is described by a [`RunConfig`], assembled from an optional TOML file
//! and then overridden by flags. Unknown keys in the file are rejected.

pub mod check;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::analytic::{composite_spectrum, coupled_y1_energy, coupled_y2_energy, half_ho_energy};
use crate::classical::PhysicalParams;
use crate::error::Error;
use crate::interp::{b_sweep, order0_shift, truncated_sweep, DEFAULT_B_VALUES, EXPANSION_CLIP};
use crate::numeric::{solve, EigenResult, ProblemKind, ProblemSpec, ResolutionPolicy};
use crate::specfun::{confluent_1f1_neg, hermite, laguerre_assoc};
use output::{Cell, Format, Report, Table};

pub const TOOL_NAME: &str = "affine-osc";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Numeric spectrum of one problem, with analytic reference where known.
    Spectrum,
    /// Composite levels of the coupled system plus both branch spectra.
    Coupled,
    /// Moving-endpoint sweep over b, or truncated-expansion comparison.
    Sweep,
    /// Evaluate a special function at given points.
    Specfun,
    /// Run the invariant suite.
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum SpecialFunction {
    /// Terminating 1F1(-n; param; z), param defaults to 2.
    #[serde(rename = "1f1")]
    #[value(name = "1f1")]
    Confluent,
    #[serde(rename = "hermite")]
    Hermite,
    /// L_n^(param)(z), param defaults to 1.
    #[serde(rename = "laguerre")]
    Laguerre,
}

/// Fully merged run description. This is also the config-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub kind: ProblemKind,
    pub levels: usize,
    /// Composite levels reported by `coupled`.
    pub count: usize,
    /// Endpoint offset for `hext1` / `truncated`, and for truncated sweeps.
    pub b: Option<f64>,
    /// Expansion order for the `truncated` kind.
    pub order: Option<usize>,
    pub b_values: Vec<f64>,
    /// Non-empty turns `sweep` into a truncated-expansion comparison at `b`.
    pub orders: Vec<usize>,
    pub grid_n: usize,
    pub domain: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Wavefunction samples per level written by `spectrum` (0 for none).
    pub samples: usize,
    pub function: Option<SpecialFunction>,
    pub degree: usize,
    pub param: Option<f64>,
    pub points: Vec<f64>,
    pub params: PhysicalParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            kind: ProblemKind::HalfLine,
            levels: 4,
            count: 10,
            b: None,
            order: None,
            b_values: DEFAULT_B_VALUES.to_vec(),
            orders: Vec::new(),
            grid_n: ResolutionPolicy::default().grid_n,
            domain: None,
            out: None,
            format: Format::Csv,
            samples: 0,
            function: None,
            degree: 0,
            param: None,
            points: Vec::new(),
            params: PhysicalParams::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) | CliError::ChecksFailed(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn invalid(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("invalid {field}: {reason}"))
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    ProblemKind::from_name(s).ok_or_else(|| {
        let names: Vec<_> = ProblemKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind '{s}', expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Parser)]
#[command(name = TOOL_NAME, version, about = "Spectra of affinely quantized oscillators")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    /// What to run. May instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem kind: eqintro, eqo1, eqo2, hext1 or truncated.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<ProblemKind>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Explicit solve domain as `x_min,x_max`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub function: Option<SpecialFunction>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub param: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub points: Option<Vec<f64>>,
    /// Print the merged configuration as TOML and exit.
    #[arg(long)]
    pub dump_config: bool,
}

impl Cli {
    /// File values first, then every flag that was given.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v; }
            )*};
        }
        take!(kind, levels, count, b_values, orders, grid_n, format, samples, degree, points);
        if self.command.is_some() {
            cfg.command = self.command;
        }
        if self.b.is_some() {
            cfg.b = self.b;
        }
        if self.order.is_some() {
            cfg.order = self.order;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.function.is_some() {
            cfg.function = self.function;
        }
        if self.param.is_some() {
            cfg.param = self.param;
        }
        if let Some(d) = self.domain {
            match d[..] {
                [lo, hi] => cfg.domain = Some([lo, hi]),
                _ => return Err(invalid("domain", "expected x_min,x_max")),
            }
        }
        if let Some(m) = self.m {
            cfg.params.m = m;
        }
        if let Some(w) = self.omega {
            cfg.params.omega = w;
        }
        if let Some(h) = self.hbar {
            cfg.params.hbar = h;
        }
        if let Some(g) = self.g {
            cfg.params.g = g;
        }
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to toml")
    }

    pub fn policy(&self) -> ResolutionPolicy {
        ResolutionPolicy {
            grid_n: self.grid_n,
            domain: self.domain.map(|[a, b]| (a, b)),
            ..ResolutionPolicy::default()
        }
    }

    pub fn validate(&self) -> Result<Command, CliError> {
        let command = self
            .command
            .ok_or_else(|| invalid("command", "no command given"))?;
        self.params.validate()?;
        if self.levels == 0 {
            return Err(invalid("levels", "must be at least 1"));
        }
        if self.grid_n < crate::numeric::Grid::MIN_NODES {
            return Err(invalid(
                "grid_n",
                format!("must be at least {}", crate::numeric::Grid::MIN_NODES),
            ));
        }
        if let Some([a, b]) = self.domain {
            if !(a < b) {
                return Err(invalid("domain", "x_min must be below x_max"));
            }
        }
        match command {
            Command::Spectrum => {
                self.problem()?;
            }
            Command::Coupled => {
                self.params.require_positive_coupling()?;
                if self.count == 0 {
                    return Err(invalid("count", "must be at least 1"));
                }
            }
            Command::Sweep => {
                if !self.orders.is_empty() {
                    match self.b {
                        Some(b) if b > 0.0 => {}
                        _ => return Err(invalid("b", "truncated sweep needs b > 0")),
                    }
                    if let Some(o) = self.orders.iter().find(|&&o| o > 4) {
                        return Err(invalid("orders", format!("order {o} exceeds 4")));
                    }
                }
            }
            Command::Specfun => {
                let f = self
                    .function
                    .ok_or_else(|| invalid("function", "specfun needs --function"))?;
                if self.points.is_empty() {
                    return Err(invalid("points", "specfun needs at least one point"));
                }
                match (f, self.param) {
                    (SpecialFunction::Confluent, Some(p)) if !(p > 0.0) => {
                        return Err(invalid("param", "1f1 lower parameter must be positive"))
                    }
                    (SpecialFunction::Laguerre, Some(p)) if !(p > -1.0) => {
                        return Err(invalid("param", "laguerre alpha must exceed -1"))
                    }
                    _ => {}
                }
            }
            Command::Check => {}
        }
        Ok(command)
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        Ok(ProblemSpec::new(
            self.kind,
            self.params,
            self.b,
            self.order,
        )?)
    }

    fn meta(&self, command: Command, extra: serde_json::Value) -> serde_json::Value {
        let mut meta = json!({
            "tool": TOOL_NAME,
            "version": TOOL_VERSION,
            "command": command,
            "params": self.params,
            "grid": { "grid_n": self.grid_n, "domain": self.domain },
        });
        if let (Some(obj), serde_json::Value::Object(more)) = (meta.as_object_mut(), extra) {
            obj.extend(more);
        }
        meta
    }
}

/// Analytic level `n` of a problem, where one is known.
pub fn analytic_energy(spec: &ProblemSpec, n: usize) -> Option<f64> {
    let p = &spec.params;
    match spec.kind {
        ProblemKind::HalfLine => Some(half_ho_energy(n, p)),
        ProblemKind::CoupledY1 => Some(coupled_y1_energy(n, p)),
        ProblemKind::CoupledY2 => Some(coupled_y2_energy(n, p)),
        ProblemKind::MovingEndpoint if spec.b == Some(0.0) => Some(half_ho_energy(n, p)),
        ProblemKind::Truncated if spec.order == Some(0) => {
            let b = spec.b.expect("validated truncated spec has b");
            Some((n as f64 + 0.5) * p.hbar * p.omega + order0_shift(p, b))
        }
        _ => None,
    }
}

fn spectrum_policy(spec: &ProblemSpec, base: ResolutionPolicy) -> ResolutionPolicy {
    match (spec.kind, spec.order, spec.b) {
        (ProblemKind::Truncated, Some(o), Some(b)) if o >= 1 && base.domain.is_none() => {
            ResolutionPolicy {
                clip: Some(EXPANSION_CLIP * b),
                ..base
            }
        }
        _ => base,
    }
}

fn spectrum_table(spec: &ProblemSpec, result: &EigenResult) -> Table {
    let mut t = Table::new(
        "spectrum",
        &["n", "energy_analytic", "energy_numeric", "abs_diff"],
    );
    for level in &result.levels {
        let exact = analytic_energy(spec, level.n);
        t.push(vec![
            Cell::Int(level.n),
            exact.map_or(Cell::Empty, Cell::Num),
            Cell::Num(level.energy),
            exact.map_or(Cell::Empty, |e| Cell::Num((e - level.energy).abs())),
        ]);
    }
    t
}

fn wavefunction_table(result: &EigenResult, samples: usize) -> Table {
    let mut t = Table::new("wavefunctions", &["n", "x", "psi"]);
    let n = result.grid.n;
    let picks: Vec<usize> = if samples == 1 {
        vec![n / 2]
    } else {
        (0..samples)
            .map(|i| (i * (n - 1)) / (samples - 1))
            .collect()
    };
    for level in &result.levels {
        for &j in &picks {
            t.push(vec![
                Cell::Int(level.n),
                Cell::Num(result.grid.node(j)),
                Cell::Num(level.samples[j]),
            ]);
        }
    }
    t
}

/// Build the report for a validated config.
pub fn execute(cfg: &RunConfig) -> Result<Report, CliError> {
    let command = cfg.validate()?;
    let policy = cfg.policy();
    match command {
        Command::Spectrum => {
            let spec = cfg.problem()?;
            let result = solve(&spec, cfg.levels, &spectrum_policy(&spec, policy))?;
            if cfg.samples > result.grid.n {
                return Err(invalid(
                    "samples",
                    format!("at most {} samples available", result.grid.n),
                ));
            }
            let mut tables = vec![spectrum_table(&spec, &result)];
            if cfg.samples > 0 {
                tables.push(wavefunction_table(&result, cfg.samples));
            }
            let meta = cfg.meta(
                command,
                json!({
                    "kind": spec.kind,
                    "b": spec.b,
                    "order": spec.order,
                    "solve_grid": result.grid,
                    "extrapolated": result.extrapolated,
                    "clipped": result.clipped,
                }),
            );
            Ok(Report { meta, tables })
        }
        Command::Coupled => {
            let mut composite = Table::new("composite", &["n1", "n2", "energy"]);
            for level in composite_spectrum(&cfg.params, cfg.count)? {
                composite.push(vec![
                    Cell::Int(level.n1),
                    Cell::Int(level.n2),
                    Cell::Num(level.energy),
                ]);
            }
            let mut branches = Table::new(
                "branches",
                &[
                    "branch",
                    "n",
                    "energy_analytic",
                    "energy_numeric",
                    "abs_diff",
                ],
            );
            for (name, spec) in [
                ("y1", ProblemSpec::coupled_y1(cfg.params)?),
                ("y2", ProblemSpec::coupled_y2(cfg.params)?),
            ] {
                let result = solve(&spec, cfg.levels, &policy)?;
                for level in &result.levels {
                    let exact =
                        analytic_energy(&spec, level.n).expect("coupled branches are analytic");
                    branches.push(vec![
                        Cell::Text(name.into()),
                        Cell::Int(level.n),
                        Cell::Num(exact),
                        Cell::Num(level.energy),
                        Cell::Num((exact - level.energy).abs()),
                    ]);
                }
            }
            let meta = cfg.meta(command, json!({ "count": cfg.count }));
            Ok(Report {
                meta,
                tables: vec![composite, branches],
            })
        }
        Command::Sweep => {
            if cfg.orders.is_empty() {
                let sweep = b_sweep(&cfg.params, &cfg.b_values, cfg.levels, &policy)?;
                let mut t = Table::new("sweep", &["b", "n", "energy", "dev_half", "dev_full"]);
                for r in &sweep.rows {
                    t.push(vec![
                        Cell::Num(r.b),
                        Cell::Int(r.n),
                        Cell::Num(r.energy),
                        Cell::Num(r.dev_half),
                        Cell::Num(r.dev_full),
                    ]);
                }
                let meta = cfg.meta(
                    command,
                    json!({ "b_values": cfg.b_values, "extrapolated": true }),
                );
                Ok(Report {
                    meta,
                    tables: vec![t],
                })
            } else {
                let b = cfg.b.expect("validated");
                let sweep = truncated_sweep(&cfg.params, b, &cfg.orders, cfg.levels, &policy)?;
                let mut t = Table::new(
                    "truncated",
                    &["order", "n", "energy", "energy_exact", "abs_diff"],
                );
                for r in &sweep.rows {
                    t.push(vec![
                        Cell::Int(r.order),
                        Cell::Int(r.n),
                        Cell::Num(r.energy),
                        Cell::Num(r.energy_exact),
                        Cell::Num(r.abs_diff),
                    ]);
                }
                for w in &sweep.warnings {
                    eprintln!("warning: {w}");
                }
                let meta = cfg.meta(
                    command,
                    json!({ "b": b, "orders": cfg.orders, "warnings": sweep.warnings }),
                );
                Ok(Report {
                    meta,
                    tables: vec![t],
                })
            }
        }
        Command::Specfun => {
            let f = cfg.function.expect("validated");
            let mut t = Table::new("specfun", &["x", "value"]);
            for &x in &cfg.points {
                let v = match f {
                    SpecialFunction::Confluent => {
                        confluent_1f1_neg(cfg.degree, cfg.param.unwrap_or(2.0), x)
                    }
                    SpecialFunction::Hermite => hermite(cfg.degree, x),
                    SpecialFunction::Laguerre => {
                        laguerre_assoc(cfg.degree, cfg.param.unwrap_or(1.0), x)
                    }
                };
                t.push(vec![Cell::Num(x), Cell::Num(v)]);
            }
            let meta = cfg.meta(
                command,
                json!({ "function": f, "degree": cfg.degree, "param": cfg.param }),
            );
            Ok(Report {
                meta,
                tables: vec![t],
            })
        }
        Command::Check => unreachable!("check is run directly"),
    }
}

/// Run a config to completion, writing its outputs.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.validate()? == Command::Check {
        let outcomes = check::run_suite();
        let mut failed = 0;
        for o in &outcomes {
            println!("{o}");
            failed += usize::from(!o.passed);
        }
        println!("{} passed, {failed} failed", outcomes.len() - failed);
        return if failed == 0 {
            Ok(())
        } else {
            Err(CliError::ChecksFailed(failed))
        };
    }
    let report = execute(cfg)?;
    report
        .write(cfg.out.as_deref(), cfg.format)
        .map_err(|e| match &cfg.out {
            Some(path) => CliError::Io(format!("writing {}: {e}", path.display())),
            None => CliError::Io(format!("writing to stdout: {e}")),
        })?;
    Ok(())
}
