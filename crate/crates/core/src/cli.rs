//! `capcheck` command line.
//!
//! Exit codes: 0 clean, 1 findings (violations, coverage gaps, hazards),
//! 2 malformed input, 3 I/O failure, 4 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::adl;
use crate::formats;
use crate::model::{validate, ArchitectureModel, ElementRef};
use crate::monitor::{self, DecisionState, MonitorError};
use crate::scenario::{self, Policy, ScenarioProfile};
use crate::traceability::{self, TraceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Findings,
    ParseError,
    IoError,
    UsageError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Findings => 1,
            ExitStatus::ParseError => 2,
            ExitStatus::IoError => 3,
            ExitStatus::UsageError => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "capcheck", version, about = "Check capability architectures and crossing scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report structural violations of a model
    Validate { model: PathBuf },
    /// List elements missing from each correspondence
    Coverage { model: PathBuf },
    /// Impact of one element across viewpoints
    Trace {
        model: PathBuf,
        /// Origin as `viewpoint:element`
        #[arg(long)]
        from: String,
        #[arg(long)]
        csv: bool,
    },
    /// Anchors and impact of a requirement
    Requirement {
        model: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long)]
        csv: bool,
    },
    /// Replay a metric stream through the capability monitor
    Monitor {
        model: PathBuf,
        #[arg(long)]
        root: String,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the boundary speed over the approach
    Boundary {
        model: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate an approach under a driving policy
    Simulate {
        model: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        policy: Policy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a behaviour trace for hazards
    Hazards {
        model: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    status: ExitStatus,
    message: String,
}

fn fail(status: ExitStatus, message: impl Into<String>) -> Failure {
    Failure {
        status,
        message: message.into(),
    }
}

struct Ctx {
    color: bool,
    out: String,
}

impl Ctx {
    fn paint(&self, text: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn state(&self, state: DecisionState) -> String {
        let code = match state {
            DecisionState::Nominal => "32",
            DecisionState::Degraded => "33",
            DecisionState::Rms => "31",
        };
        self.paint(&format!("{:<8}", state.as_str()), code)
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }
}

/// Runs with color taken from `CAPCHECK_COLOR`.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let color = std::env::var("CAPCHECK_COLOR").is_ok_and(|v| v == "1");
    run_with(argv, color)
}

pub fn run_with<I, S>(argv: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let text = err.render().to_string();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    status: ExitStatus::Success,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    status: ExitStatus::UsageError,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut ctx = Ctx {
        color,
        out: String::new(),
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(status) => Outcome {
            status,
            stdout: ctx.out,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            status: f.status,
            stdout: ctx.out,
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(ExitStatus::IoError, format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(ExitStatus::IoError, format!("cannot write {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ArchitectureModel, Failure> {
    let text = read_text(path)?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    adl::parse_named(&text, &name).map_err(|e| fail(ExitStatus::ParseError, e.to_string()))
}

/// Loads and validates; a model with violations stops every subcommand
/// except `validate`.
fn load_valid_model(path: &Path) -> Result<ArchitectureModel, Failure> {
    let model = load_model(path)?;
    let report = validate(&model);
    if report.is_clean() {
        Ok(model)
    } else {
        Err(fail(ExitStatus::Findings, format!("model is invalid\n{report}")))
    }
}

fn load_profile(model: &ArchitectureModel, id: &str) -> Result<ScenarioProfile, Failure> {
    let sc = model
        .scenario(id)
        .ok_or_else(|| fail(ExitStatus::UsageError, format!("unknown scenario `{id}`")))?;
    // validation has already vetted the block
    ScenarioProfile::from_scenario(sc).map_err(|e| fail(ExitStatus::Findings, e.to_string()))
}

fn trace_failure(e: TraceError) -> Failure {
    fail(ExitStatus::UsageError, e.to_string())
}

fn format_failure(what: &Path, e: formats::FormatError) -> Failure {
    let status = if e.is_io() { ExitStatus::IoError } else { ExitStatus::ParseError };
    fail(status, format!("{}: {e}", what.display()))
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Result<ExitStatus, Failure> {
    match command {
        Command::Validate { model } => {
            let report = validate(&load_model(&model)?);
            for v in &report.violations {
                let code = ctx.paint(v.code.as_str(), "31");
                ctx.line(format!("{code} {}: {}", v.location, v.message));
            }
            let n = report.len();
            ctx.line(format!("{n} violation{}", if n == 1 { "" } else { "s" }));
            Ok(if report.is_clean() { ExitStatus::Success } else { ExitStatus::Findings })
        }
        Command::Coverage { model } => {
            let model = load_valid_model(&model)?;
            let gaps = traceability::check_coverage(&model);
            let mut total = 0;
            for g in &gaps {
                let head = format!("{} ({} -> {})", g.correspondence, g.from_viewpoint, g.to_viewpoint);
                if g.unmapped.is_empty() {
                    ctx.line(format!("{head}: covered"));
                } else {
                    total += g.unmapped.len();
                    let list = ctx.paint(&g.unmapped.join(", "), "33");
                    ctx.line(format!("{head}: {} unmapped: {list}", g.unmapped.len()));
                }
            }
            ctx.line(format!("{total} unmapped element{}", if total == 1 { "" } else { "s" }));
            Ok(if total == 0 { ExitStatus::Success } else { ExitStatus::Findings })
        }
        Command::Trace { model, from, csv } => {
            let model = load_valid_model(&model)?;
            let (vp, el) = from
                .split_once(':')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .ok_or_else(|| fail(ExitStatus::UsageError, format!("--from expects viewpoint:element, got `{from}`")))?;
            let set = traceability::impact(&model, &ElementRef::new(vp, el)).map_err(trace_failure)?;
            if csv {
                ctx.out.push_str(&formats::write_elements(&set.affected));
                return Ok(ExitStatus::Success);
            }
            ctx.line(format!("impact of {}: {} element(s)", set.origin, set.len()));
            for e in &set.affected {
                let hops: Vec<String> = set
                    .path_to(e)
                    .unwrap_or_default()
                    .iter()
                    .map(|(r, _)| r.to_string())
                    .collect();
                ctx.line(format!("  {:<28} {}", e.to_string(), hops.join(" > ")));
            }
            Ok(ExitStatus::Success)
        }
        Command::Requirement { model, id, csv } => {
            let model = load_valid_model(&model)?;
            let t = traceability::trace_requirement(&model, &id).map_err(trace_failure)?;
            if csv {
                ctx.out.push_str(&formats::write_elements(&t.affected));
                return Ok(ExitStatus::Success);
            }
            let text = model.requirement(&id).map(|r| r.text.clone()).unwrap_or_default();
            ctx.line(format!("{} [{}] {text}", t.requirement, t.kind));
            let anchors: Vec<String> = t.anchors.iter().map(ToString::to_string).collect();
            ctx.line(format!("anchors: {}", anchors.join(", ")));
            ctx.line(format!("affected: {} element(s)", t.affected.len()));
            for e in &t.affected {
                ctx.line(format!("  {e}"));
            }
            Ok(ExitStatus::Success)
        }
        Command::Monitor {
            model,
            root,
            metrics,
            step,
            out,
        } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(fail(ExitStatus::UsageError, format!("--step must be positive, got {step}")));
            }
            let model = load_valid_model(&model)?;
            let text = read_text(&metrics)?;
            let stream = formats::read_metrics(text.as_bytes()).map_err(|e| format_failure(&metrics, e))?;
            let decisions = monitor::replay(&model, &root, &stream, step).map_err(|e| match e {
                MonitorError::UnknownSkill(_) | MonitorError::InvalidStep(_) => fail(ExitStatus::UsageError, e.to_string()),
                MonitorError::UnsortedStream { .. } | MonitorError::InvalidRecord(_) => {
                    fail(ExitStatus::ParseError, format!("{}: {e}", metrics.display()))
                }
                MonitorError::Graph(_) => fail(ExitStatus::Findings, e.to_string()),
            })?;
            for d in &decisions {
                let state = ctx.state(d.state);
                let mut row = format!("{:>8.3}  {state}  {:.3}", d.timestamp, d.aggregated);
                if !d.cause.is_empty() {
                    let cause: Vec<String> = d.cause.iter().map(|(s, st)| format!("{s} ({st})")).collect();
                    let _ = write!(row, "  {}", cause.join(", "));
                }
                ctx.line(row);
            }
            match decisions.iter().find(|d| d.state == DecisionState::Rms) {
                Some(d) => ctx.line(format!("first RMS decision at t = {:?}", d.timestamp)),
                None => ctx.line("no RMS decision"),
            }
            if let Some(out) = out {
                write_text(&out, &formats::write_decisions(&decisions))?;
                ctx.line(format!("wrote {} decision(s)", decisions.len()));
            }
            Ok(ExitStatus::Success)
        }
        Command::Boundary {
            model,
            scenario,
            grid,
            out,
        } => {
            if grid == 0 {
                return Err(fail(ExitStatus::UsageError, "--grid must be at least 1"));
            }
            let model = load_valid_model(&model)?;
            let profile = load_profile(&model, &scenario)?;
            let points = scenario::rms_boundary(&profile, &scenario::uniform_grid(profile.d_crossing, grid));
            ctx.line(format!("{:>10}  {:>12}", "d [m]", "v_b [m/s]"));
            for p in &points {
                ctx.line(format!("{:>10.3}  {:>12.3}", p.d, p.v_boundary));
            }
            if let Some(out) = out {
                write_text(&out, &formats::write_boundary(&points))?;
                ctx.line(format!("wrote {} point(s)", points.len()));
            }
            Ok(ExitStatus::Success)
        }
        Command::Simulate {
            model,
            scenario,
            policy,
            out,
        } => {
            let model = load_valid_model(&model)?;
            let profile = load_profile(&model, &scenario)?;
            let trace = scenario::simulate(&profile, policy);
            let last = *trace.last().expect("a trace has at least one sample");
            ctx.line(format!(
                "{policy}: {} sample(s), t = {:.3} s, x = {:.3} m, v = {:.3} m/s",
                trace.len(),
                last.t,
                last.x,
                last.v
            ));
            if last.v == 0.0 && last.x <= profile.d_crossing {
                ctx.line(format!("stopped {:.3} m before the crossing", profile.d_crossing - last.x));
            } else {
                ctx.line(ctx.paint("did not stop before the crossing", "31"));
            }
            if let Some(out) = out {
                write_text(&out, &formats::write_trace(&trace))?;
                ctx.line(format!("wrote {} sample(s)", trace.len()));
            }
            Ok(ExitStatus::Success)
        }
        Command::Hazards {
            model,
            scenario,
            trace,
        } => {
            let model = load_valid_model(&model)?;
            let profile = load_profile(&model, &scenario)?;
            let text = read_text(&trace)?;
            let samples = formats::read_trace(text.as_bytes()).map_err(|e| format_failure(&trace, e))?;
            let findings = scenario::check_hazards(&samples, &profile);
            for f in &findings {
                let id = ctx.paint(f.hazard.as_str(), "31");
                ctx.line(format!("{id} at t = {:.3} s: {}", f.timestamp, f.detail));
            }
            let n = findings.len();
            ctx.line(format!("{n} hazard{}", if n == 1 { "" } else { "s" }));
            Ok(if findings.is_empty() { ExitStatus::Success } else { ExitStatus::Findings })
        }
    }
}
