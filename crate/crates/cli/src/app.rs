//! Command definitions and dispatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use herd_core::criteria::{
    check_tree_depth1_criterion, check_tree_depth2_criterion, check_tree_layer_sign_criterion,
    run_all_criteria, CriterionReport, Evidence, Strength,
};
use herd_core::design::minimal_herdable_leader_sets;
use herd_core::generators::InstanceGenerator;
use herd_core::graph::{
    clustering_balance, layer_decomposition, structural_balance, ClusterPartition, SignedDigraph,
};
use herd_core::positivity::{direct_verdict, Certificate, HerdabilityVerdict};
use herd_core::rational::{format_rational, format_vector, parse_rational};
use herd_core::synthesis::{herding_input, Synthesis};
use herd_core::{HerdError, SystemPair};
use serde_json::json;
use thiserror::Error;

use crate::model::{parse_model, parse_vector, Model, ModelError};
use crate::report::{verify_report, CertificateEntry, PlanRecord, Report, Subject};

#[derive(Debug, Parser)]
#[command(name = "herd", version, about = "Exact herdability analysis of linear systems")]
pub struct Cli {
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,

    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide herdability directly and print the certificate.
    Check { model: PathBuf },
    /// Run the reduction chain and every structural criterion.
    Criteria { model: PathBuf },
    /// Clustering and structural balance partitions of the graph of A.
    Balance { model: PathBuf },
    /// Layer decomposition and tree criteria for a single leader.
    Tree {
        model: PathBuf,
        /// 1-based leader node.
        #[arg(long)]
        leader: usize,
    },
    /// Inputs driving x0 above a threshold in n steps.
    Synthesize {
        model: PathBuf,
        /// JSON array with the initial state.
        #[arg(long, value_name = "FILE")]
        x0: PathBuf,
        /// Threshold, as an integer or p/q.
        #[arg(long, value_name = "P/Q")]
        h: String,
    },
    /// Inclusion-minimal herdable leader sets for the A of the model.
    Design {
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
    /// Re-check every certificate in a report against a model.
    VerifyReport {
        report_file: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Cross-check criteria and reductions on random instances.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success,
    NotHerdable,
    InputError,
    Inconsistent,
}

impl Exit {
    pub fn code(self) -> u8 {
        match self {
            Exit::Success => 0,
            Exit::InputError => 2,
            Exit::NotHerdable => 3,
            Exit::Inconsistent => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] HerdError),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Core(HerdError::Internal(_)) => Exit::Inconsistent,
            _ => Exit::InputError,
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub text: String,
    pub exit: Exit,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<Model, CliError> {
    parse_model(&read(path)?).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

fn one_based(nodes: &[usize]) -> String {
    let items: Vec<String> = nodes.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn partition_text(p: &ClusterPartition) -> String {
    p.clusters.iter().map(|c| one_based(c)).collect::<Vec<_>>().join(" ")
}

fn verdict_text(out: &mut String, verdict: &HerdabilityVerdict) {
    let _ = writeln!(out, "herdable: {}", if verdict.herdable { "yes" } else { "no" });
    let _ = writeln!(out, "method: {}", verdict.method);
    let (label, v) = match &verdict.certificate {
        Certificate::Primal(u) => ("primal certificate u (R u >= 1)", u),
        Certificate::Dual(y) => ("dual certificate y (y >= 0, y^T R = 0)", y),
    };
    let _ = writeln!(out, "{label}: [{}]", format_vector(v).join(", "));
}

fn header(model: &Model) -> String {
    let name = model.metadata.name.as_deref().unwrap_or("model");
    format!("{name}: n = {}, m = {}\n", model.pair.n(), model.pair.m())
}

fn criterion_line(out: &mut String, r: &CriterionReport) {
    let strength = match r.strength {
        Strength::Sufficient => "sufficient",
        Strength::Iff => "iff",
    };
    let status = match (&r.implied_verdict, &r.evidence) {
        (Some(v), _) => format!("holds, implies {}", if v.is_herdable() { "herdable" } else { "not herdable" }),
        (None, Evidence::Unmet { reason }) => format!("not met: {reason}"),
        (None, _) => "not met".to_string(),
    };
    let _ = writeln!(out, "  {:<18} {:<10} {status}", r.criterion, strength);
}

/// Iff criteria contradicting the direct verdict.
fn iff_disagreements(reports: &[CriterionReport], verdict: &HerdabilityVerdict) -> Vec<String> {
    reports
        .iter()
        .filter(|r| r.strength == Strength::Iff)
        .filter_map(|r| {
            r.implied_verdict
                .filter(|v| v.is_herdable() != verdict.herdable)
                .map(|_| format!("criterion `{}` disagrees with the direct verdict", r.criterion))
        })
        .collect()
}

fn check(model: &Model) -> Outcome {
    let verdict = direct_verdict(&model.pair);
    let mut report = Report::new("check", Some(model));
    report.herdable = Some(verdict.herdable);
    report.certificates.push(CertificateEntry::new(Subject::Model, &verdict));
    let mut text = header(model);
    verdict_text(&mut text, &verdict);
    Outcome {
        report,
        text,
        exit: if verdict.herdable { Exit::Success } else { Exit::NotHerdable },
    }
}

fn criteria(model: &Model) -> Result<Outcome, CliError> {
    let outcome = run_all_criteria(&model.pair)?;
    let mut report = Report::new("criteria", Some(model));
    report.herdable = Some(outcome.verdict.herdable);
    report
        .certificates
        .push(CertificateEntry::new(Subject::Model, &outcome.verdict));
    let reduced = outcome.reduced_verdict.as_ref().map(|v| {
        json!({"herdable": v.herdable, "method": v.method})
    });
    report.set_details(&json!({
        "criteria": outcome.reports,
        "trace": outcome.trace,
        "reduced": reduced,
    }));
    report.inconsistencies = outcome.inconsistencies.clone();

    let mut text = header(model);
    verdict_text(&mut text, &outcome.verdict);
    if let Some(trace) = &outcome.trace {
        for step in &trace.steps {
            let _ = writeln!(
                text,
                "reduction {}: {:?} -> {:?}",
                step.name, step.input_shape, step.output_shape
            );
        }
    }
    let _ = writeln!(text, "criteria:");
    for r in &outcome.reports {
        criterion_line(&mut text, r);
    }
    for issue in &outcome.inconsistencies {
        let _ = writeln!(text, "INCONSISTENT: {issue}");
    }
    Ok(Outcome {
        report,
        text,
        exit: if outcome.is_consistent() { Exit::Success } else { Exit::Inconsistent },
    })
}

fn balance(model: &Model) -> Result<Outcome, CliError> {
    let g = SignedDigraph::from_adjacency(model.pair.a())?;
    let finest = clustering_balance(&g, None)?;
    let with_leaders = match model.pair.leaders() {
        Some(leaders) => clustering_balance(&g, Some(leaders))?,
        None => None,
    };
    let structural = structural_balance(&g);
    let mut report = Report::new("balance", Some(model));
    report.set_details(&json!({
        "clustering": finest,
        "leader_clustering": with_leaders,
        "structural": structural,
    }));
    let mut text = header(model);
    let describe = |p: &Option<ClusterPartition>| match p {
        Some(p) => format!("{} cluster(s): {}", p.k(), partition_text(p)),
        None => "none".to_string(),
    };
    let _ = writeln!(text, "clustering balance: {}", describe(&finest));
    if model.pair.leaders().is_some() {
        let _ = writeln!(text, "with leaders as first cluster: {}", describe(&with_leaders));
    }
    let _ = writeln!(text, "structural balance: {}", describe(&structural));
    Ok(Outcome {
        report,
        text,
        exit: Exit::Success,
    })
}

fn tree(model: &Model, leader: usize) -> Result<Outcome, CliError> {
    let n = model.pair.n();
    if leader == 0 || leader > n {
        return Err(CliError::Usage(format!("--leader {leader} is outside 1..={n}")));
    }
    let pair = SystemPair::with_leaders(model.pair.a().clone(), &[leader - 1])?;
    let g = SignedDigraph::from_adjacency(pair.a())?;
    let layers = layer_decomposition(&g, leader - 1)?;
    let checks = [
        (herd_core::criteria::TREE_LAYER_SIGNS, check_tree_layer_sign_criterion as fn(&SystemPair) -> _),
        (herd_core::criteria::TREE_DEPTH1, check_tree_depth1_criterion),
        (herd_core::criteria::TREE_DEPTH2, check_tree_depth2_criterion),
    ];
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (name, f) in checks {
        match f(&pair) {
            Ok(r) => reports.push(r),
            Err(HerdError::Precondition(reason)) => skipped.push((name, reason)),
            Err(e) => return Err(e.into()),
        }
    }
    let verdict = direct_verdict(&pair);
    let mut report = Report::new("tree", Some(model));
    report.herdable = Some(verdict.herdable);
    report.certificates.push(CertificateEntry::new(
        Subject::Leaders { leaders: vec![leader] },
        &verdict,
    ));
    let not_applicable: Vec<_> = skipped
        .iter()
        .map(|(name, reason)| json!({"criterion": name, "reason": reason}))
        .collect();
    report.set_details(&json!({
        "layers": layers,
        "criteria": reports,
        "not_applicable": not_applicable,
    }));
    report.inconsistencies = iff_disagreements(&reports, &verdict);

    let mut text = format!("tree with leader {leader}, depth {}\n", layers.depth());
    for d in 1..=layers.depth() {
        let _ = writeln!(text, "  layer {d}: {}", one_based(layers.layer(d)));
    }
    verdict_text(&mut text, &verdict);
    let _ = writeln!(text, "criteria:");
    for r in &reports {
        criterion_line(&mut text, r);
    }
    for (name, reason) in &skipped {
        let _ = writeln!(text, "  {name:<18} not applicable: {reason}");
    }
    let exit = if report.inconsistencies.is_empty() { Exit::Success } else { Exit::Inconsistent };
    Ok(Outcome { report, text, exit })
}

fn synthesize(model: &Model, x0_path: &Path, h: &str) -> Result<Outcome, CliError> {
    let h = parse_rational(h).map_err(|e| CliError::Usage(format!("--h: {e}")))?;
    let x0 = parse_vector(&read(x0_path)?, model.pair.n()).map_err(|source| CliError::Model {
        path: x0_path.to_path_buf(),
        source,
    })?;
    let mut report = Report::new("synthesize", Some(model));
    let mut text = header(model);
    let exit = match herding_input(&model.pair, &x0, &h)? {
        Synthesis::Plan(plan) => {
            let verdict = direct_verdict(&model.pair);
            report.herdable = Some(true);
            report.certificates.push(CertificateEntry::new(Subject::Model, &verdict));
            report.plan = Some(PlanRecord {
                x0: format_vector(&x0),
                threshold: format_rational(&h),
                inputs: plan.inputs.iter().map(|u| format_vector(u)).collect(),
                final_state: format_vector(&plan.predicted_final_state),
            });
            report.set_details(&json!({"horizon": plan.horizon, "alpha": format_rational(&plan.alpha)}));
            let _ = writeln!(text, "horizon: {} steps, alpha = {}", plan.horizon, format_rational(&plan.alpha));
            for (t, u) in plan.inputs.iter().enumerate() {
                let _ = writeln!(text, "  u({t}) = [{}]", format_vector(u).join(", "));
            }
            let _ = writeln!(
                text,
                "final state: [{}] (threshold {})",
                format_vector(&plan.predicted_final_state).join(", "),
                format_rational(&h)
            );
            Exit::Success
        }
        Synthesis::NotHerdable(verdict) => {
            report.herdable = Some(false);
            report.certificates.push(CertificateEntry::new(Subject::Model, &verdict));
            verdict_text(&mut text, &verdict);
            Exit::NotHerdable
        }
    };
    Ok(Outcome { report, text, exit })
}

fn design(model: &Model, max_size: usize) -> Result<Outcome, CliError> {
    let result = minimal_herdable_leader_sets(model.pair.a(), max_size)?;
    let mut report = Report::new("design", Some(model));
    for set in &result.minimal_sets {
        let leaders = set.leaders.iter().map(|l| l + 1).collect();
        report
            .certificates
            .push(CertificateEntry::new(Subject::Leaders { leaders }, &set.verdict));
    }
    let sets: Vec<_> = result
        .minimal_sets
        .iter()
        .map(|s| json!({"leaders": s.leaders}))
        .collect();
    report.set_details(&json!({
        "budget": result.budget,
        "explored": result.explored,
        "minimal_sets": sets,
    }));
    let mut text = header(model);
    let _ = writeln!(
        text,
        "minimal herdable leader sets up to size {} ({} candidates checked):",
        result.budget, result.explored
    );
    if result.minimal_sets.is_empty() {
        let _ = writeln!(text, "  none");
    }
    for set in &result.minimal_sets {
        let _ = writeln!(text, "  {}", one_based(&set.leaders));
    }
    Ok(Outcome {
        report,
        text,
        exit: Exit::Success,
    })
}

fn verify(report_path: &Path, model_path: &Path) -> Result<Outcome, CliError> {
    let model = load_model(model_path)?;
    let checked: Report = serde_json::from_str(&read(report_path)?).map_err(|e| CliError::Model {
        path: report_path.to_path_buf(),
        source: ModelError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })?;
    let result = verify_report(&checked, &model);
    let mut report = Report::new("verify-report", Some(&model));
    report.set_details(&result);
    report.inconsistencies = result.failures.clone();
    let mut text = format!("checked {} item(s)\n", result.checked);
    for f in &result.failures {
        let _ = writeln!(text, "FAILED: {f}");
    }
    if result.passed() {
        text.push_str("all certificates verify\n");
    }
    Ok(Outcome {
        report,
        text,
        exit: if result.passed() { Exit::Success } else { Exit::Inconsistent },
    })
}

fn fuzz(seed: u64, count: usize, size: usize) -> Result<Outcome, CliError> {
    if size == 0 {
        return Err(CliError::Usage("--size must be at least 1".into()));
    }
    let mut g = InstanceGenerator::new(seed);
    let mut herdable = 0;
    let mut issues = Vec::new();
    for k in 0..count {
        let pair = if k % 2 == 0 {
            let leaders = 1 + k % size;
            g.random_leader_pair(size, leaders, 0.35)
        } else {
            g.random_pair(size, 1 + k % size.min(3), 0.4)
        };
        let outcome = run_all_criteria(&pair)?;
        herdable += usize::from(outcome.verdict.herdable);
        issues.extend(outcome.inconsistencies.iter().map(|i| format!("instance {k}: {i}")));
    }
    let mut report = Report::new("fuzz", None);
    report.set_details(&json!({"seed": seed, "count": count, "size": size, "herdable": herdable}));
    report.inconsistencies = issues.clone();
    let mut text = format!("{count} instances (seed {seed}, n = {size}), {herdable} herdable\n");
    for i in &issues {
        let _ = writeln!(text, "INCONSISTENT: {i}");
    }
    Ok(Outcome {
        report,
        text,
        exit: if issues.is_empty() { Exit::Success } else { Exit::Inconsistent },
    })
}

/// Executes `cli` and returns the report, the text rendering and the exit
/// status.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Check { model } => check(&load_model(model)?),
        Command::Criteria { model } => criteria(&load_model(model)?)?,
        Command::Balance { model } => balance(&load_model(model)?)?,
        Command::Tree { model, leader } => tree(&load_model(model)?, *leader)?,
        Command::Synthesize { model, x0, h } => synthesize(&load_model(model)?, x0, h)?,
        Command::Design { model, max_size } => design(&load_model(model)?, *max_size)?,
        Command::VerifyReport { report_file, model } => verify(report_file, model)?,
        Command::Fuzz { seed, count, size } => fuzz(*seed, *count, *size)?,
    };
    outcome.report.timing.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(outcome)
}
