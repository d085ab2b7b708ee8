//! The `persuade` command-line front end.
//!
//! Exit codes: 0 success or implementable, 1 not implementable (or a
//! failed cross-check), 2 input error, 3 numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::apps::{
    audit_closed_form, gen_audit_model, gen_auction_model, gen_grant_model, AuctionParams, AuditParams, GrantParams,
};
use crate::beliefs::{enumerate_vertices, BeliefKind};
use crate::error::{Error, Result};
use crate::ic::{
    check_implementable_parallel, check_implementable_with, check_sender_ic, deviation_payoff, DeviationReport,
    Method,
};
use crate::model::{interim_payoff, load_allocation, load_model, receiver_value, Allocation, ModelSpec};
use crate::optimizer::constrained_optimum;
use crate::structure::{classify, monotone_certificate_check, no_fall_guys_check_with, Certificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_IMPLEMENTABLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Tolerance for comparing closed forms with LP optima.
const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "persuade", version, about = "Implementability checks for many-sender persuasion")]
pub struct Cli {
    /// Check senders on separate threads.
    #[arg(long, global = true)]
    pub parallel: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an allocation is implementable.
    Check {
        model: PathBuf,
        allocation: PathBuf,
        /// vertex, primal-lp, dual-lp, grid, or grid=K
        #[arg(long, default_value = "vertex")]
        method: String,
        #[arg(long)]
        json: bool,
    },
    /// Compute the receiver's constrained-optimal allocation.
    Optimize {
        model: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Construct one sender's most profitable deviation.
    Deviate {
        model: PathBuf,
        allocation: PathBuf,
        #[arg(long)]
        sender: usize,
        #[arg(long, default_value = "vertex")]
        method: String,
        #[arg(long)]
        json: bool,
    },
    /// List one sender's test beliefs.
    Beliefs {
        model: PathBuf,
        #[arg(long)]
        sender: usize,
        #[arg(long)]
        json: bool,
    },
    /// Classify preference structure, and certify an allocation if given.
    Structure {
        model: PathBuf,
        allocation: Option<PathBuf>,
        /// Search every type subset for fall guys instead of sizes up to 3.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        json: bool,
    },
    /// Generate an application model from parameters; prints JSON.
    App {
        kind: AppKind,
        params: PathBuf,
        /// Verify the generated allocation with the general machinery.
        #[arg(long)]
        cross_check: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AppKind {
    Audit,
    Grant,
    Auction,
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn model_at(path: &Path) -> Result<ModelSpec> {
    load_model(&read(path)?)
}

fn allocation_at(model: &ModelSpec, path: &Path) -> Result<Allocation> {
    load_allocation(model, &read(path)?)
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn fmt_vec(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_outcomes(model: &ModelSpec, rs: &[usize]) -> String {
    let parts: Vec<&str> = rs.iter().map(|&r| model.outcomes()[r].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "implementable"
    } else {
        "NOT implementable"
    }
}

fn describe(model: &ModelSpec, out: &mut dyn Write, r: &DeviationReport) -> Result<()> {
    let name = &model.senders()[r.sender].name;
    writeln!(
        out,
        "sender {} ({name}): {}{}",
        r.sender,
        verdict(r.implementable),
        if r.boundary { " (boundary)" } else { "" }
    )?;
    writeln!(out, "  method:       {}", r.method)?;
    writeln!(out, "  max gap:      {:.9}", r.deviation_gap)?;
    writeln!(out, "  worst belief: {}", fmt_vec(r.worst_belief.probs()))?;
    writeln!(out, "  punishment:   {}", fmt_outcomes(model, &r.grim_set))?;
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Check {
            model,
            allocation,
            method,
            json,
        } => {
            let method: Method = method.parse()?;
            let model = model_at(model)?;
            let p = allocation_at(&model, allocation)?;
            let report = if cli.parallel {
                check_implementable_parallel(&model, &p, method)?
            } else {
                check_implementable_with(&model, &p, method)?
            };
            if *json {
                emit(out, &report)?;
            } else {
                for r in &report.senders {
                    describe(&model, out, r)?;
                }
                writeln!(out, "overall: {}", verdict(report.implementable))?;
            }
            Ok(if report.implementable {
                EXIT_OK
            } else {
                EXIT_NOT_IMPLEMENTABLE
            })
        }
        Command::Optimize { model, json } => {
            let model = model_at(model)?;
            let opt = constrained_optimum(&model)?;
            if *json {
                emit(out, &opt.to_doc(&model))?;
            } else {
                writeln!(out, "value:              {:.9}", opt.value)?;
                writeln!(out, "first-best value:   {:.9}", opt.unconstrained_value)?;
                writeln!(out, "first-best gap:     {:.9}", opt.first_best_gap)?;
                writeln!(out, "deterministic:      {}", opt.deterministic)?;
                writeln!(out, "binding constraints: {}", opt.binding.len())?;
                for b in &opt.binding {
                    writeln!(out, "  sender {} at {}", b.sender, fmt_vec(&b.belief))?;
                }
                writeln!(out, "allocation:")?;
                for row in opt.allocation.to_doc(&model).rows {
                    writeln!(out, "  {:<20} {}", row.profile.join(","), fmt_vec(&row.dist))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Deviate {
            model,
            allocation,
            sender,
            method,
            json,
        } => {
            let method: Method = method.parse()?;
            let model = model_at(model)?;
            let p = allocation_at(&model, allocation)?;
            let report = check_sender_ic(&model, &p, *sender, method)?;
            let interim = interim_payoff(&model, &p, *sender)?;
            let prior = &model.senders()[*sender].prior;
            let truthful: f64 = interim.iter().zip(prior).map(|(u, q)| u * q).sum();
            let deviating = deviation_payoff(&model, &p, &report)?;
            if *json {
                emit(
                    out,
                    &json!({
                        "report": report,
                        "truthful_payoff": truthful,
                        "deviation_payoff": deviating,
                    }),
                )?;
            } else {
                describe(&model, out, &report)?;
                let d = &report.deviation_distribution;
                writeln!(
                    out,
                    "  deviation:    pool into the worst belief with probability {:.6}, reveal the rest",
                    d.alpha
                )?;
                writeln!(out, "  residual:     {}", fmt_vec(&d.residual))?;
                writeln!(out, "  truthful payoff:  {truthful:.9}")?;
                writeln!(out, "  deviation payoff: {deviating:.9}")?;
            }
            Ok(if report.implementable {
                EXIT_OK
            } else {
                EXIT_NOT_IMPLEMENTABLE
            })
        }
        Command::Beliefs { model, sender, json } => {
            let model = model_at(model)?;
            let set = enumerate_vertices(&model, *sender)?;
            if *json {
                emit(out, &set.to_doc(&model))?;
            } else {
                for b in &set.beliefs {
                    let kind = match b.kind {
                        BeliefKind::Degenerate => "degenerate",
                        BeliefKind::Vertex => "vertex",
                    };
                    writeln!(
                        out,
                        "{kind:<10} {} worst {}",
                        fmt_vec(b.belief.probs()),
                        fmt_outcomes(&model, &b.regions)
                    )?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Structure {
            model,
            allocation,
            exhaustive,
            json,
        } => {
            let model = model_at(model)?;
            let p = allocation.as_deref().map(|a| allocation_at(&model, a)).transpose()?;
            let mut report = classify(&model, p.as_ref())?;
            if let (Some(p), true) = (&p, *exhaustive) {
                for s in &mut report {
                    s.fall_guys = no_fall_guys_check_with(&model, p, s.sender, None)?;
                }
            }
            if *json {
                emit(out, &report)?;
            } else {
                for s in &report {
                    writeln!(out, "sender {} ({}):", s.sender, model.senders()[s.sender].name)?;
                    match &s.decomposition {
                        Some(d) => writeln!(
                            out,
                            "  two-decomposable: r1 = {}, r2 = {}",
                            model.outcomes()[d.r1],
                            model.outcomes()[d.r2]
                        )?,
                        None => writeln!(out, "  two-decomposable: no")?,
                    }
                    if let Some(o) = &s.order {
                        writeln!(out, "  type order: {:?}, crossing at {}", o.type_order, o.crossing_index)?;
                    }
                    writeln!(out, "  least favorite for all types: {}", s.hlf.as_deref().unwrap_or("none"))?;
                    if let Some(c) = &s.certificate {
                        let text = match c {
                            Certificate::CertifiedImplementable => "certified implementable".to_string(),
                            Certificate::CertifiedNot { witness } => format!(
                                "certified NOT implementable (gap {:.6} at {})",
                                witness.gap,
                                fmt_vec(&witness.belief)
                            ),
                            Certificate::Inconclusive => "inconclusive".to_string(),
                        };
                        writeln!(out, "  monotone certificate: {text}")?;
                    }
                    if let Some(w) = &s.fall_guys {
                        writeln!(out, "  fall guys: types {:?}", w.types)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::App {
            kind,
            params,
            cross_check,
        } => {
            let text = read(params)?;
            match kind {
                AppKind::Audit => run_audit(&serde_json::from_str(&text)?, *cross_check, out),
                AppKind::Grant => run_grant(&serde_json::from_str(&text)?, *cross_check, out),
                AppKind::Auction => run_auction(&serde_json::from_str(&text)?, *cross_check, out),
            }
        }
    }
}

fn run_audit(params: &AuditParams, cross_check: bool, out: &mut dyn Write) -> Result<i32> {
    let model = gen_audit_model(params)?;
    let closed = audit_closed_form(params)?;
    let mut doc = json!({ "model": model, "closed_form": closed });
    let mut code = EXIT_OK;
    if cross_check {
        let constant = Allocation::constant(&model, closed.outcome)?;
        let closed_value = receiver_value(&model, &constant)?;
        let opt = constrained_optimum(&model)?;
        let support: Vec<usize> = (0..model.num_outcomes())
            .filter(|&r| (0..model.num_profiles()).any(|idx| opt.allocation.row(idx)[r] > CROSS_CHECK_TOL))
            .collect();
        let values_agree = (closed_value - opt.value).abs() <= CROSS_CHECK_TOL;
        // With an indifferent firm several supports are optimal.
        let support_agrees = !closed.indifferent.is_empty() || support == [closed.outcome];
        let agree = values_agree && support_agrees;
        if !agree {
            code = EXIT_NOT_IMPLEMENTABLE;
        }
        doc["cross_check"] = json!({
            "closed_form_value": closed_value,
            "lp_value": opt.value,
            "lp_support": support,
            "agree": agree,
        });
    }
    emit(out, &doc)?;
    Ok(code)
}

fn run_grant(params: &GrantParams, cross_check: bool, out: &mut dyn Write) -> Result<i32> {
    let inst = gen_grant_model(params)?;
    let mut doc = json!({
        "model": inst.model,
        "allocation": inst.allocation.to_doc(&inst.model),
        "warnings": inst.warnings,
    });
    let mut code = EXIT_OK;
    if cross_check {
        let report = check_implementable_with(&inst.model, &inst.allocation, Method::Vertex)?;
        let certs = monotone_certificate_check(&inst.model, &inst.allocation)?;
        if !report.implementable {
            code = EXIT_NOT_IMPLEMENTABLE;
        }
        doc["cross_check"] = json!({
            "implementable": report.implementable,
            "certificates": certs.iter().map(|c| &c.certificate).collect::<Vec<_>>(),
        });
    }
    emit(out, &doc)?;
    Ok(code)
}

fn run_auction(params: &AuctionParams, cross_check: bool, out: &mut dyn Write) -> Result<i32> {
    let inst = gen_auction_model(params)?;
    let mut doc = json!({
        "model": inst.model,
        "allocation": inst.allocation.to_doc(&inst.model),
        "winners": inst.winners,
        "transfers": inst.transfers,
        "removed_winners": inst.removed,
        "epir_residuals": inst.epir_residuals,
        "sign_mismatches": inst.sign_mismatches,
        "cap_violations": inst.cap_violations,
    });
    let mut code = EXIT_OK;
    if cross_check {
        let report = check_implementable_with(&inst.model, &inst.allocation, Method::Vertex)?;
        let epir_binds = inst.epir_residuals.iter().flatten().all(|r| r.abs() <= CROSS_CHECK_TOL);
        if !report.implementable || !epir_binds {
            code = EXIT_NOT_IMPLEMENTABLE;
        }
        doc["cross_check"] = json!({
            "implementable": report.implementable,
            "epir_binds": epir_binds,
        });
    }
    emit(out, &doc)?;
    Ok(code)
}
