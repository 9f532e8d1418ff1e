//! Command-line front end.
//!
//! JSON output has the shape
//! `{"command", "inputs", "results", "checks", "timing_ms", "seed"}`.
//! `timing_ms` is `null` unless `--timing` is given, so identical flags give
//! byte-identical output.
//!
//! CSV headers:
//!
//! * `capacity`: `kind,d,lambdas,gammas,closed_form`
//! * `verify`: `kind,d,lambdas,gammas,closed_form,optimizer_value,gap,two_use_rate,pass`
//! * `sweep`: `lambda,s_min,chi_star` plus `periodic,convex` when `--lambdas` is given
//!
//! List-valued CSV cells are `;`-separated.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 usage or validation error.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::capacity::{
    capacity_convex_depolarizing, capacity_periodic_depolarizing, chi_star_depolarizing,
    s_min_depolarizing, verify_additivity, verify_theorem1, verify_theorem2, CapacityReport, Check,
};
use crate::channels::{ChannelDescriptor, DepolarizingParams};
use crate::error::{Error, Result};
use crate::optimize::OptimizerConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "memchan",
    version,
    about = "Capacities of depolarizing memory channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form capacity of a channel.
    Capacity {
        kind: Option<CapacityKind>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Compare closed forms with the ensemble optimizer.
    Verify {
        kind: Option<VerifyKind>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Tabulate S_min and chi* over a lambda grid.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        lambda_from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_to: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CapacityKind {
    Depolarizing,
    Periodic,
    Convex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyKind {
    Additivity,
    Theorem1,
    Theorem2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Comma-separated list, e.g. `0.9,0.5`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<f64>>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimizer convergence threshold on per-iteration gain.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report wall-clock time in `timing_ms`.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub lambda_from: Option<f64>,
    pub lambda_to: Option<f64>,
    pub step: Option<f64>,
    /// Companion branches for the optional periodic/convex columns.
    pub lambdas: Option<Vec<f64>>,
}

/// A complete run description; also the schema of `--config` files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `capacity`, `verify` or `sweep`, optionally followed by a kind, e.g.
    /// `"verify theorem1"`.
    pub command: Option<String>,
    pub channel: Option<ChannelDescriptor>,
    pub optimizer: OptimizerSettings,
    pub sweep: SweepSettings,
    /// Dimension for `sweep`.
    pub d: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub timing: bool,
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// Rendered report (empty on usage errors).
    pub output: String,
    /// Diagnostic for standard error.
    pub error: Option<String>,
}

impl Outcome {
    fn usage(err: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            output: String::new(),
            error: Some(format!("error: {err}")),
        }
    }
}

impl RunConfig {
    pub fn load(path: &PathBuf) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("invalid config {}: {e}", path.display())))
    }

    /// Layers flags over this configuration. `kind` is the descriptor type
    /// the command needs; `None` keeps whatever the file describes.
    fn apply_flags(&mut self, flags: &Flags, kind: Option<CapacityKind>) -> Result<()> {
        let (mut d, mut lambdas, mut gammas) = match &self.channel {
            Some(ch) => descriptor_parts(ch),
            None => (None, None, None),
        };
        let kind = kind.or_else(|| self.channel.as_ref().map(descriptor_kind));
        d = flags.d.or(d).or(self.d);
        if let Some(l) = flags.lambda {
            lambdas = Some(vec![l]);
        }
        if let Some(ls) = &flags.lambdas {
            lambdas = Some(ls.clone());
        }
        if let Some(gs) = &flags.gammas {
            gammas = Some(gs.clone());
        }
        if let Some(kind) = kind {
            let d = d.ok_or_else(|| Error::InvalidArgument("--d is required".into()))?;
            let lambdas = lambdas.ok_or_else(|| {
                Error::InvalidArgument("--lambda or --lambdas is required".into())
            })?;
            self.channel = Some(match kind {
                CapacityKind::Depolarizing => {
                    if lambdas.len() != 1 {
                        return Err(Error::InvalidArgument(
                            "depolarizing channel takes exactly one lambda".into(),
                        ));
                    }
                    ChannelDescriptor::Depolarizing {
                        d,
                        lambda: lambdas[0],
                    }
                }
                CapacityKind::Periodic => ChannelDescriptor::periodic_depolarizing(d, &lambdas),
                CapacityKind::Convex => {
                    let gammas =
                        gammas.unwrap_or_else(|| vec![1.0 / lambdas.len() as f64; lambdas.len()]);
                    ChannelDescriptor::convex_depolarizing(d, &lambdas, &gammas)
                }
            });
        } else {
            self.d = d;
        }

        let o = &mut self.optimizer;
        o.restarts = flags.restarts.or(o.restarts);
        o.iters = flags.iters.or(o.iters);
        o.m = flags.m.or(o.m);
        o.tol = flags.tol.or(o.tol);
        o.threads = flags.threads.or(o.threads);
        self.seed = flags.seed.or(self.seed).or(o.seed);
        self.format = flags.format.or(self.format);
        self.out = flags.out.clone().or(self.out.take());
        self.timing = flags.timing;
        Ok(())
    }

    fn optimizer_config(&self, seed: u64) -> Result<OptimizerConfig> {
        let base = OptimizerConfig::default();
        let o = &self.optimizer;
        let cfg = OptimizerConfig {
            restarts: o.restarts.unwrap_or(base.restarts),
            iters: o.iters.unwrap_or(base.iters),
            seed,
            m: o.m.or(base.m),
            tol: o.tol.unwrap_or(base.tol),
            threads: o.threads.or(base.threads),
            ..base
        };
        if cfg.restarts == 0 || cfg.iters == 0 || cfg.m == Some(0) {
            return Err(Error::InvalidArgument(
                "restarts, iters and m must be positive".into(),
            ));
        }
        if !(cfg.tol.is_finite() && cfg.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol must be nonnegative, got {}",
                cfg.tol
            )));
        }
        Ok(cfg)
    }

    fn channel(&self) -> Result<&ChannelDescriptor> {
        self.channel.as_ref().ok_or_else(|| {
            Error::InvalidArgument("no channel given (use --d with --lambda/--lambdas)".into())
        })
    }
}

fn descriptor_kind(ch: &ChannelDescriptor) -> CapacityKind {
    match ch {
        ChannelDescriptor::Depolarizing { .. } => CapacityKind::Depolarizing,
        ChannelDescriptor::Periodic { .. } => CapacityKind::Periodic,
        ChannelDescriptor::Convex { .. } => CapacityKind::Convex,
    }
}

fn descriptor_parts(ch: &ChannelDescriptor) -> (Option<usize>, Option<Vec<f64>>, Option<Vec<f64>>) {
    let branch_parts = |branches: &[ChannelDescriptor]| {
        let mut d = None;
        let mut ls = Vec::new();
        for b in branches {
            if let ChannelDescriptor::Depolarizing { d: bd, lambda } = b {
                d = d.or(Some(*bd));
                ls.push(*lambda);
            }
        }
        (d, ls)
    };
    match ch {
        ChannelDescriptor::Depolarizing { d, lambda } => (Some(*d), Some(vec![*lambda]), None),
        ChannelDescriptor::Periodic { branches } => {
            let (d, ls) = branch_parts(branches);
            (d, Some(ls), None)
        }
        ChannelDescriptor::Convex { gammas, branches } => {
            let (d, ls) = branch_parts(branches);
            (d, Some(ls), Some(gammas.clone()))
        }
    }
}

/// Shortest round-trip decimal, as in the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("number serializes")
}

fn csv_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn envelope(
    command: &str,
    inputs: Value,
    results: Value,
    checks: &[Check],
    timing: Option<f64>,
    seed: Option<u64>,
) -> String {
    let doc = json!({
        "command": command,
        "inputs": inputs,
        "results": results,
        "checks": checks,
        "timing_ms": timing,
        "seed": seed,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn report_results(report: &CapacityReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    if let Value::Object(map) = &mut v {
        map.remove("checks");
    }
    v
}

fn finish(cfg: &RunConfig, code: i32, output: String) -> Outcome {
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, &output) {
            return Outcome::usage(format!("cannot write {}: {e}", path.display()));
        }
        return Outcome {
            code,
            output: String::new(),
            error: None,
        };
    }
    Outcome {
        code,
        output,
        error: None,
    }
}

fn elapsed_ms(cfg: &RunConfig, start: Instant) -> Option<f64> {
    cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3)
}

/// Closed-form capacity of the configured channel.
pub fn cmd_capacity(cfg: &RunConfig) -> Outcome {
    let start = Instant::now();
    let run = || -> Result<(String, CapacityReport, Vec<f64>, Vec<f64>)> {
        let ch = cfg.channel()?;
        let (d, lambdas) = ch.depolarizing_params()?;
        let kind = descriptor_kind(ch);
        let closed = match kind {
            CapacityKind::Depolarizing => chi_star_depolarizing(d, lambdas[0])?,
            CapacityKind::Periodic => capacity_periodic_depolarizing(d, &lambdas)?,
            CapacityKind::Convex => capacity_convex_depolarizing(d, &lambdas)?,
        };
        let method = match kind {
            CapacityKind::Depolarizing => "closed_form:log2_d_minus_s_min",
            CapacityKind::Periodic => "closed_form:mean_branch_capacity",
            CapacityKind::Convex => "closed_form:min_branch_capacity",
        };
        let mut report = CapacityReport::closed_form_only(ch.clone(), closed, method);
        if d > 2 && kind == CapacityKind::Periodic {
            report.notes.push(format!(
                "d = {d}: closed form uses log2(d); the constant 1 holds for qubits only"
            ));
        }
        let gammas = match ch {
            ChannelDescriptor::Convex { gammas, .. } => gammas.clone(),
            _ => Vec::new(),
        };
        let name = match kind {
            CapacityKind::Depolarizing => "depolarizing",
            CapacityKind::Periodic => "periodic",
            CapacityKind::Convex => "convex",
        };
        Ok((name.to_string(), report, lambdas, gammas))
    };
    let (kind, report, lambdas, gammas) = match run() {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    let d = cfg
        .channel()
        .map(|c| c.depolarizing_params().map(|p| p.0).unwrap_or(0))
        .unwrap_or(0);
    let (s_min, branch_caps): (Vec<f64>, Vec<f64>) = lambdas
        .iter()
        .map(|&l| {
            (
                s_min_depolarizing(d, l).unwrap_or(f64::NAN),
                chi_star_depolarizing(d, l).unwrap_or(f64::NAN),
            )
        })
        .unzip();
    let output = match cfg.format.unwrap_or_default() {
        Format::Json => {
            let mut results = report_results(&report);
            if let Value::Object(map) = &mut results {
                map.insert("branch_s_min".into(), json!(s_min));
                map.insert("branch_chi_star".into(), json!(branch_caps));
            }
            envelope(
                &format!("capacity {kind}"),
                json!({"channel": report.channel, "d": d, "lambdas": lambdas}),
                results,
                &report.checks,
                elapsed_ms(cfg, start),
                None,
            )
        }
        Format::Csv => format!(
            "kind,d,lambdas,gammas,closed_form\n{kind},{d},{},{},{}\n",
            csv_list(&lambdas),
            csv_list(&gammas),
            num(report.closed_form)
        ),
    };
    finish(cfg, EXIT_PASS, output)
}

fn verify_kind_for(ch: &ChannelDescriptor) -> VerifyKind {
    match ch {
        ChannelDescriptor::Depolarizing { .. } => VerifyKind::Additivity,
        ChannelDescriptor::Periodic { .. } => VerifyKind::Theorem1,
        ChannelDescriptor::Convex { .. } => VerifyKind::Theorem2,
    }
}

/// Runs a verification driver; exit 1 if any check fails.
pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let start = Instant::now();
    let ch = match cfg.channel() {
        Ok(c) => c,
        Err(e) => return Outcome::usage(e),
    };
    let (d, lambdas) = match ch.depolarizing_params() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let opt = match cfg.optimizer_config(seed) {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let kind = verify_kind_for(ch);
    let (gammas, result) = match (kind, ch) {
        (VerifyKind::Additivity, _) => (Vec::new(), verify_additivity(d, lambdas[0], &opt)),
        (VerifyKind::Theorem1, _) => (Vec::new(), verify_theorem1(d, &lambdas, &opt)),
        (VerifyKind::Theorem2, ChannelDescriptor::Convex { gammas, .. }) => {
            (gammas.clone(), verify_theorem2(d, &lambdas, gammas, &opt))
        }
        _ => unreachable!("verify kind follows the descriptor"),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    let code = if report.passed() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    };
    let name = match kind {
        VerifyKind::Additivity => "additivity",
        VerifyKind::Theorem1 => "theorem1",
        VerifyKind::Theorem2 => "theorem2",
    };
    let output = match cfg.format.unwrap_or_default() {
        Format::Json => envelope(
            &format!("verify {name}"),
            json!({
                "channel": report.channel,
                "d": d,
                "lambdas": lambdas,
                "optimizer": {
                    "restarts": opt.restarts,
                    "iters": opt.iters,
                    "m": opt.m,
                    "tol": opt.tol,
                    "stall": opt.stall,
                },
            }),
            report_results(&report),
            &report.checks,
            elapsed_ms(cfg, start),
            Some(seed),
        ),
        Format::Csv => format!(
            "kind,d,lambdas,gammas,closed_form,optimizer_value,gap,two_use_rate,pass\n{name},{d},{},{},{},{},{},{},{}\n",
            csv_list(&lambdas),
            csv_list(&gammas),
            num(report.closed_form),
            opt_num(report.optimizer_value),
            opt_num(report.gap),
            opt_num(report.two_use.as_ref().map(|t| t.rate)),
            report.passed()
        ),
    };
    finish(cfg, code, output)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SweepRow {
    lambda: f64,
    s_min: f64,
    chi_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    periodic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convex: Option<f64>,
}

fn sweep_grid(d: usize, from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if from.is_nan() || to.is_nan() || from > to {
        return Err(Error::InvalidArgument(format!(
            "empty grid: from {from} > to {to}"
        )));
    }
    DepolarizingParams::new(d, from)?;
    DepolarizingParams::new(d, to)?;
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| from + k as f64 * step).collect())
}

/// Tabulates `S_min` and `chi*` over a lambda grid.
pub fn cmd_sweep(cfg: &RunConfig) -> Outcome {
    let start = Instant::now();
    let s = &cfg.sweep;
    let run = || -> Result<(usize, Vec<SweepRow>)> {
        let d = cfg
            .d
            .ok_or_else(|| Error::InvalidArgument("--d is required".into()))?;
        let from = s
            .lambda_from
            .ok_or_else(|| Error::InvalidArgument("--lambda-from is required".into()))?;
        let to = s
            .lambda_to
            .ok_or_else(|| Error::InvalidArgument("--lambda-to is required".into()))?;
        let step = s
            .step
            .ok_or_else(|| Error::InvalidArgument("--step is required".into()))?;
        let grid = sweep_grid(d, from, to, step)?;
        let mut rows = Vec::with_capacity(grid.len());
        for lambda in grid {
            let (periodic, convex) = match &s.lambdas {
                Some(ls) => {
                    let mut all = ls.clone();
                    all.push(lambda);
                    (
                        Some(capacity_periodic_depolarizing(d, &all)?),
                        Some(capacity_convex_depolarizing(d, &all)?),
                    )
                }
                None => (None, None),
            };
            rows.push(SweepRow {
                lambda,
                s_min: s_min_depolarizing(d, lambda)?,
                chi_star: chi_star_depolarizing(d, lambda)?,
                periodic,
                convex,
            });
        }
        Ok((d, rows))
    };
    let (d, rows) = match run() {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };

    // chi* must not decrease on the part of the grid inside [0, 1].
    let worst_drop = rows
        .windows(2)
        .filter(|w| w[0].lambda >= 0.0)
        .map(|w| w[0].chi_star - w[1].chi_star)
        .fold(0.0, f64::max);
    let checks = vec![Check::at_most("chi_star_monotone", worst_drop, 0.0, 1e-12)];
    let code = if checks.iter().all(|c| c.pass) {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    };

    let output = match cfg.format.unwrap_or_default() {
        Format::Json => envelope(
            "sweep",
            json!({
                "d": d,
                "lambda_from": s.lambda_from,
                "lambda_to": s.lambda_to,
                "step": s.step,
                "lambdas": s.lambdas,
            }),
            json!({ "rows": rows }),
            &checks,
            elapsed_ms(cfg, start),
            None,
        ),
        Format::Csv => {
            let extra = s.lambdas.is_some();
            let mut out = String::from(if extra {
                "lambda,s_min,chi_star,periodic,convex\n"
            } else {
                "lambda,s_min,chi_star\n"
            });
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{}",
                    num(r.lambda),
                    num(r.s_min),
                    num(r.chi_star)
                ));
                if extra {
                    out.push_str(&format!(",{},{}", opt_num(r.periodic), opt_num(r.convex)));
                }
                out.push('\n');
            }
            out
        }
    };
    finish(cfg, code, output)
}

fn base_config(flags: &Flags) -> Result<RunConfig> {
    match &flags.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

type Handler = fn(&RunConfig) -> Outcome;

/// Dispatches an already-parsed command line.
pub fn run(cli: Cli) -> Outcome {
    let prepared = || -> Result<(RunConfig, Handler)> {
        match cli.command {
            Command::Capacity { kind, flags } => {
                let mut cfg = base_config(&flags)?;
                cfg.apply_flags(&flags, kind)?;
                Ok((cfg, cmd_capacity as Handler))
            }
            Command::Verify { kind, flags } => {
                let mut cfg = base_config(&flags)?;
                let channel_kind = kind.map(|k| match k {
                    VerifyKind::Additivity => CapacityKind::Depolarizing,
                    VerifyKind::Theorem1 => CapacityKind::Periodic,
                    VerifyKind::Theorem2 => CapacityKind::Convex,
                });
                cfg.apply_flags(&flags, channel_kind)?;
                Ok((cfg, cmd_verify as Handler))
            }
            Command::Sweep {
                lambda_from,
                lambda_to,
                step,
                flags,
            } => {
                let mut cfg = base_config(&flags)?;
                cfg.apply_flags(&flags, None)?;
                cfg.sweep.lambda_from = lambda_from.or(cfg.sweep.lambda_from);
                cfg.sweep.lambda_to = lambda_to.or(cfg.sweep.lambda_to);
                cfg.sweep.step = step.or(cfg.sweep.step);
                if let Some(ls) = &flags.lambdas {
                    cfg.sweep.lambdas = Some(ls.clone());
                }
                Ok((cfg, cmd_sweep as Handler))
            }
        }
    };
    match prepared() {
        Ok((cfg, cmd)) => cmd(&cfg),
        Err(e) => Outcome::usage(e),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            Outcome {
                code,
                output: if code == EXIT_PASS {
                    e.to_string()
                } else {
                    String::new()
                },
                error: (code != EXIT_PASS).then(|| e.to_string()),
            }
        }
    }
}
