//! JSON document formats for problems and plans, and the command-line
//! driver.
//!
//! Rationals travel as strings (`"n"` or `"n/d"`, lowest terms), never as
//! JSON numbers, so nothing silently goes through floating point. Anchors
//! are `"start"`/`"end"` inside actions and `"plan-start"`/`"plan-end"` for
//! timed initial literals and goals. Only closed condition intervals exist;
//! open/semi-open markers are recognized and rejected with a pointed
//! message.

use crate::bench::{self, PainterSpec};
use crate::model::{
    makespan, Action, Anchor, Condition, Diagnostic, Effect, Plan, PlanStep, Polarity, Problem,
    TimedRef,
};
use crate::scalar::{format_rational, parse_rational};
use crate::search::{search, Heuristic, SearchConfig, SearchOutcome};
use crate::validator::validate;
use crate::Time;
use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub predicates: Vec<String>,
    pub actions: Vec<ActionDoc>,
    #[serde(default)]
    pub init: Vec<String>,
    #[serde(default)]
    pub tils: Vec<EffectDoc>,
    #[serde(default)]
    pub goals: Vec<ConditionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub name: String,
    pub duration: DurationDoc,
    #[serde(default)]
    pub conditions: Vec<ConditionDoc>,
    #[serde(default)]
    pub effects: Vec<EffectDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationDoc {
    pub min: String,
    pub max: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDoc {
    pub from: TimedRefDoc,
    pub to: TimedRefDoc,
    pub predicate: String,
    /// Open-interval markers exist only to be rejected explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from_open: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_open: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectDoc {
    pub at: TimedRefDoc,
    pub predicate: String,
    pub polarity: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimedRefDoc {
    pub anchor: String,
    pub offset: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub format_version: u32,
    pub steps: Vec<StepDoc>,
    /// Defaults to the step makespan when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan_end: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub t: String,
    pub action: String,
    pub d: String,
}

/// Problem/plan document reading failure.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{context}: {message}")]
    Document { context: String, message: String },
}

impl ParseError {
    fn doc(context: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError::Document { context: context.into(), message: message.into() }
    }

    fn from_json(e: serde_json::Error) -> Self {
        ParseError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

fn rational(s: &str, context: &str) -> Result<Time, ParseError> {
    parse_rational(s).map_err(|e| ParseError::doc(context, e.to_string()))
}

/// `scope` distinguishes action-relative anchors from plan-relative ones.
#[derive(Clone, Copy, PartialEq)]
enum AnchorScope {
    Action,
    Plan,
}

fn anchor(s: &str, scope: AnchorScope, context: &str) -> Result<Anchor, ParseError> {
    match (scope, s) {
        (AnchorScope::Action, "start") => Ok(Anchor::Start),
        (AnchorScope::Action, "end") => Ok(Anchor::End),
        (AnchorScope::Plan, "plan-start") => Ok(Anchor::Start),
        (AnchorScope::Plan, "plan-end") => Ok(Anchor::End),
        _ => {
            let expected = match scope {
                AnchorScope::Action => "\"start\" or \"end\"",
                AnchorScope::Plan => "\"plan-start\" or \"plan-end\"",
            };
            Err(ParseError::doc(context, format!("unknown anchor {s:?} (expected {expected})")))
        }
    }
}

fn timed_ref(doc: &TimedRefDoc, scope: AnchorScope, context: &str) -> Result<TimedRef, ParseError> {
    Ok(TimedRef {
        anchor: anchor(&doc.anchor, scope, context)?,
        offset: rational(&doc.offset, context)?,
    })
}

fn condition(
    doc: &ConditionDoc,
    scope: AnchorScope,
    context: &str,
) -> Result<Condition, ParseError> {
    if doc.from_open.is_some() || doc.to_open.is_some() {
        return Err(ParseError::doc(
            context,
            "open and semi-open condition intervals are not supported; \
             only closed intervals are accepted",
        ));
    }
    Ok(Condition {
        from: timed_ref(&doc.from, scope, context)?,
        to: timed_ref(&doc.to, scope, context)?,
        predicate: doc.predicate.clone(),
    })
}

fn effect(doc: &EffectDoc, scope: AnchorScope, context: &str) -> Result<Effect, ParseError> {
    let polarity = match doc.polarity.as_str() {
        "add" => Polarity::Add,
        "del" => Polarity::Delete,
        other => {
            return Err(ParseError::doc(
                context,
                format!("unknown polarity {other:?} (expected \"add\" or \"del\")"),
            ))
        }
    };
    Ok(Effect { at: timed_ref(&doc.at, scope, context)?, predicate: doc.predicate.clone(), polarity })
}

/// Parses a problem document. Syntax and structural errors are reported
/// here; semantic well-formedness is [`crate::model::normalize_problem`]'s
/// job.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let doc: ProblemDocument = serde_json::from_str(text).map_err(ParseError::from_json)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(ParseError::doc(
            "format_version",
            format!("unsupported version {} (expected {FORMAT_VERSION})", doc.format_version),
        ));
    }
    let mut actions = Vec::with_capacity(doc.actions.len());
    for a in &doc.actions {
        let context = format!("action {:?}", a.name);
        let mut action = Action::new(
            a.name.clone(),
            rational(&a.duration.min, &context)?,
            rational(&a.duration.max, &context)?,
        );
        for c in &a.conditions {
            action.conditions.push(condition(c, AnchorScope::Action, &context)?);
        }
        for e in &a.effects {
            action.effects.push(effect(e, AnchorScope::Action, &context)?);
        }
        actions.push(action);
    }
    let tils = doc
        .tils
        .iter()
        .map(|e| effect(e, AnchorScope::Plan, "timed initial literals"))
        .collect::<Result<Vec<_>, _>>()?;
    let goals = doc
        .goals
        .iter()
        .map(|c| condition(c, AnchorScope::Plan, "goals"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Problem {
        predicates: doc.predicates.into_iter().collect::<BTreeSet<_>>(),
        actions,
        init: doc.init.into_iter().collect(),
        tils,
        goals,
    })
}

fn timed_ref_doc(tr: &TimedRef, scope: AnchorScope) -> TimedRefDoc {
    let anchor = match (scope, tr.anchor) {
        (AnchorScope::Action, Anchor::Start) => "start",
        (AnchorScope::Action, Anchor::End) => "end",
        (AnchorScope::Plan, Anchor::Start) => "plan-start",
        (AnchorScope::Plan, Anchor::End) => "plan-end",
    };
    TimedRefDoc { anchor: anchor.to_string(), offset: format_rational(&tr.offset) }
}

fn condition_doc(c: &Condition, scope: AnchorScope) -> ConditionDoc {
    ConditionDoc {
        from: timed_ref_doc(&c.from, scope),
        to: timed_ref_doc(&c.to, scope),
        predicate: c.predicate.clone(),
        from_open: None,
        to_open: None,
    }
}

fn effect_doc(e: &Effect, scope: AnchorScope) -> EffectDoc {
    EffectDoc {
        at: timed_ref_doc(&e.at, scope),
        predicate: e.predicate.clone(),
        polarity: match e.polarity {
            Polarity::Add => "add",
            Polarity::Delete => "del",
        }
        .to_string(),
    }
}

/// Serializes a problem, optionally with a leading comment field.
pub fn serialize_problem_with_comment(problem: &Problem, comment: Option<&str>) -> String {
    let doc = ProblemDocument {
        format_version: FORMAT_VERSION,
        comment: comment.map(|s| s.to_string()),
        predicates: problem.predicates.iter().cloned().collect(),
        actions: problem
            .actions
            .iter()
            .map(|a| ActionDoc {
                name: a.name.clone(),
                duration: DurationDoc {
                    min: format_rational(&a.d_min),
                    max: format_rational(&a.d_max),
                },
                conditions: a
                    .conditions
                    .iter()
                    .map(|c| condition_doc(c, AnchorScope::Action))
                    .collect(),
                effects: a.effects.iter().map(|e| effect_doc(e, AnchorScope::Action)).collect(),
            })
            .collect(),
        init: problem.init.iter().cloned().collect(),
        tils: problem.tils.iter().map(|e| effect_doc(e, AnchorScope::Plan)).collect(),
        goals: problem.goals.iter().map(|c| condition_doc(c, AnchorScope::Plan)).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serialization");
    s.push('\n');
    s
}

pub fn serialize_problem(problem: &Problem) -> String {
    serialize_problem_with_comment(problem, None)
}

/// Parses a plan document. Starts must be nonnegative and durations
/// positive; a missing `plan_end` defaults to the step makespan.
pub fn parse_plan(text: &str) -> Result<Plan, ParseError> {
    let doc: PlanDocument = serde_json::from_str(text).map_err(ParseError::from_json)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(ParseError::doc(
            "format_version",
            format!("unsupported version {} (expected {FORMAT_VERSION})", doc.format_version),
        ));
    }
    let mut steps = Vec::with_capacity(doc.steps.len());
    for s in &doc.steps {
        let context = format!("step for action {:?}", s.action);
        let t = rational(&s.t, &context)?;
        let d = rational(&s.d, &context)?;
        if t < Time::zero() {
            return Err(ParseError::doc(&context, format!("negative start time {}", s.t)));
        }
        if d <= Time::zero() {
            return Err(ParseError::doc(&context, format!("duration {} is not positive", s.d)));
        }
        steps.push(PlanStep::new(t, s.action.clone(), d));
    }
    let plan_end = match &doc.plan_end {
        Some(s) => rational(s, "plan_end")?,
        None => makespan(&steps),
    };
    Ok(Plan::new(steps, plan_end))
}

pub fn serialize_plan(plan: &Plan) -> String {
    let doc = PlanDocument {
        format_version: FORMAT_VERSION,
        steps: plan
            .steps
            .iter()
            .map(|s| StepDoc {
                t: format_rational(&s.start),
                action: s.action.clone(),
                d: format_rational(&s.duration),
            })
            .collect(),
        plan_end: Some(format_rational(&plan.plan_end)),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("document serialization");
    s.push('\n');
    s
}

#[derive(Parser)]
#[command(name = "midspan", version, about = "Temporal planner for actions with conditions and effects at arbitrary offsets inside their duration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a plan and validate it before reporting success.
    Solve {
        /// Problem document (JSON).
        problem: PathBuf,
        /// Heuristic: "hadd" or "blind".
        #[arg(long, default_value = "hadd")]
        heuristic: String,
        /// Stop after this many expansions.
        #[arg(long)]
        max_expansions: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// Expand same-instant event groups of an action in one step.
        #[arg(long)]
        simultaneity: bool,
        /// Write the plan document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a plan document against a problem document.
    Validate {
        problem: PathBuf,
        plan: PathBuf,
    },
    /// Generate a benchmark instance.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
    },
    /// Print problem size statistics (predicates, actions, duration pieces,
    /// time-points).
    Stats {
        problem: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Painter family: coats with minimum/maximum gaps on a single worker.
    Painter {
        #[arg(long)]
        coats: u32,
        #[arg(long)]
        items: u32,
        #[arg(long, default_value = "1")]
        min_gap: String,
        #[arg(long, default_value = "3")]
        max_gap: String,
        #[arg(long, default_value = "1")]
        coat_duration: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuse mending inside timed light windows.
    Matchcellar {
        #[arg(long)]
        fuses: u32,
        /// Number of light windows; defaults to one per fuse.
        #[arg(long)]
        windows: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trigger-opened windows with follow-ups that must fit inside.
    Deadline {
        #[arg(long)]
        tasks: u32,
        #[arg(long, default_value = "2")]
        window: String,
        #[arg(long, default_value = "1")]
        follow: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line. Exit status: 0 = plan found / plan valid /
/// instance generated; 1 = unsolved / invalid; 2 = usage or format error.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("midspan"))
        .chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_problem(path: &Path) -> Result<Problem, String> {
    let text = read_file(path)?;
    let problem = parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    crate::model::normalize_problem(&problem).map_err(|diags| render_diagnostics(path, &diags))
}

fn render_diagnostics(path: &Path, diags: &[Diagnostic]) -> String {
    let mut s = format!("{} is not well-formed:", path.display());
    for d in diags {
        s.push_str("\n  ");
        s.push_str(&d.to_string());
    }
    s
}

fn write_output(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(command: Command) -> Result<i32, String> {
    match command {
        Command::Solve { problem, heuristic, max_expansions, timeout, simultaneity, out } => {
            let heuristic: Heuristic = heuristic.parse()?;
            let prob = load_problem(&problem)?;
            let config = SearchConfig {
                heuristic,
                max_expansions,
                timeout: timeout.map(std::time::Duration::from_secs_f64),
                simultaneity,
            };
            let outcome = search(&prob, &config).expect("problem already normalized");
            match outcome {
                SearchOutcome::Solved { plan, stats } => {
                    let verdict = validate(&prob, &plan);
                    if !verdict.is_valid() {
                        // Engine soundness bug; refuse to claim success.
                        eprintln!("internal error: extracted plan failed validation");
                        eprint!("{}", verdict.report());
                        return Ok(1);
                    }
                    println!(
                        "plan found: {} steps, makespan {}, plan end {}",
                        plan.steps.len(),
                        format_rational(&plan.makespan()),
                        format_rational(&plan.plan_end),
                    );
                    for step in &plan.steps {
                        println!(
                            "  {}  {}  duration {}",
                            format_rational(&step.start),
                            step.action,
                            format_rational(&step.duration)
                        );
                    }
                    println!("expansions: {}, generated: {}", stats.expansions, stats.generated);
                    if let Some(out) = out {
                        write_output(&out, &serialize_plan(&plan))?;
                    }
                    Ok(0)
                }
                SearchOutcome::Unsolved { reason, stats } => {
                    println!("no plan: {reason}");
                    println!("expansions: {}, generated: {}", stats.expansions, stats.generated);
                    Ok(1)
                }
            }
        }
        Command::Validate { problem, plan } => {
            let prob = load_problem(&problem)?;
            let text = read_file(&plan)?;
            let plan = parse_plan(&text).map_err(|e| format!("{}: {e}", plan.display()))?;
            let verdict = validate(&prob, &plan);
            if verdict.is_valid() {
                println!("valid");
                Ok(0)
            } else {
                print!("{}", verdict.report());
                Ok(1)
            }
        }
        Command::Gen { family } => {
            let (problem, comment, out) = match family {
                GenCommand::Painter { coats, items, min_gap, max_gap, coat_duration, out } => {
                    let spec = PainterSpec {
                        coats,
                        items,
                        min_gap: parse_rational(&min_gap).map_err(|e| e.to_string())?,
                        max_gap: parse_rational(&max_gap).map_err(|e| e.to_string())?,
                        coat_duration: parse_rational(&coat_duration).map_err(|e| e.to_string())?,
                    };
                    let problem = bench::gen_painter(&spec).map_err(|e| e.to_string())?;
                    (problem, bench::painter_header(&spec), out)
                }
                GenCommand::Matchcellar { fuses, windows, out } => {
                    let windows = windows.unwrap_or(fuses);
                    let problem =
                        bench::gen_matchcellar(fuses, windows).map_err(|e| e.to_string())?;
                    let comment = format!(
                        "matchcellar-like: {fuses} fuses; {windows} light windows of length 3 \
                         every 10 time units; mending takes 2, needs light throughout and both \
                         hands"
                    );
                    (problem, comment, out)
                }
                GenCommand::Deadline { tasks, window, follow, out } => {
                    let window = parse_rational(&window).map_err(|e| e.to_string())?;
                    let follow = parse_rational(&follow).map_err(|e| e.to_string())?;
                    let comment = format!(
                        "deadline: {tasks} tasks; each trigger opens a window (add at start, \
                         delete {} later); the follow-up (duration {}) must fit strictly inside",
                        format_rational(&window),
                        format_rational(&follow)
                    );
                    let problem = bench::gen_deadline_with(tasks, window, follow)
                        .map_err(|e| e.to_string())?;
                    (problem, comment, out)
                }
            };
            let text = serialize_problem_with_comment(&problem, Some(&comment));
            match out {
                Some(path) => write_output(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Stats { problem } => {
            let prob = load_problem(&problem)?;
            let space = crate::search::SearchSpace::new(&prob).expect("already normalized");
            println!("predicates: {}", space.predicate_count());
            println!("actions: {}", prob.actions.len());
            println!("pieces: {}", space.pieces().len());
            println!("time-points: {}", space.time_point_count());
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{time_frac, time_int};
    use crate::testfix::tiny_problem;

    #[test]
    fn problem_round_trips() {
        let p = tiny_problem();
        let text = serialize_problem(&p);
        let back = parse_problem(&text).unwrap();
        assert_eq!(back, p);
        // serialize . parse is the identity on documents.
        assert_eq!(serialize_problem(&back), text);
    }

    #[test]
    fn offsets_reserialize_in_lowest_terms() {
        let text = serialize_problem(&tiny_problem()).replace("\"offset\": \"1\"", "\"offset\": \"2/4\"");
        let p = parse_problem(&text).unwrap();
        assert_eq!(serialize_problem(&p).matches("2/4").count(), 0);
        assert!(p.actions[0].effects.iter().any(|e| e.at.offset == time_frac(1, 2)));
    }

    #[test]
    fn unknown_anchor_is_rejected() {
        let text = serialize_problem(&tiny_problem()).replace("\"plan-end\"", "\"finish\"");
        assert!(parse_problem(&text).is_err());
    }

    #[test]
    fn action_scope_rejects_plan_anchors() {
        let text = serialize_problem(&tiny_problem()).replacen("\"start\"", "\"plan-start\"", 1);
        assert!(parse_problem(&text).is_err());
    }

    #[test]
    fn open_interval_markers_rejected_with_pointed_message() {
        let mut doc: serde_json::Value =
            serde_json::from_str(&serialize_problem(&tiny_problem())).unwrap();
        doc["goals"][0]["from_open"] = serde_json::Value::Bool(true);
        let err = parse_problem(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("open and semi-open condition intervals"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_problem("{ nope") {
            Err(ParseError::Syntax { line, column, .. }) => {
                assert_eq!(line, 1);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn plan_round_trips() {
        let plan = Plan::new(
            vec![PlanStep::new(time_int(0), "a1", time_int(2))],
            time_frac(5, 2),
        );
        let text = serialize_plan(&plan);
        assert_eq!(parse_plan(&text).unwrap(), plan);
    }

    #[test]
    fn nonpositive_durations_rejected() {
        let text = r#"{"format_version":1,"steps":[{"t":"0","action":"a","d":"-1"}]}"#;
        assert!(parse_plan(text).is_err());
        let zero = r#"{"format_version":1,"steps":[{"t":"0","action":"a","d":"0"}]}"#;
        assert!(parse_plan(zero).is_err());
    }

    #[test]
    fn missing_plan_end_defaults_to_makespan() {
        let text = r#"{"format_version":1,"steps":[{"t":"1","action":"a","d":"3/2"}]}"#;
        let plan = parse_plan(text).unwrap();
        assert_eq!(plan.plan_end, time_frac(5, 2));
    }

    #[test]
    fn wrong_format_version_rejected() {
        let text = serialize_problem(&tiny_problem()).replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(parse_problem(&text).is_err());
    }

    #[test]
    fn cli_solves_and_writes_validating_plan() {
        let dir = tempfile::tempdir().unwrap();
        let problem_path = dir.path().join("problem.json");
        let plan_path = dir.path().join("plan.json");
        std::fs::write(&problem_path, serialize_problem(&tiny_problem())).unwrap();
        let code = cli([
            "solve".to_string(),
            problem_path.to_str().unwrap().to_string(),
            "--out".to_string(),
            plan_path.to_str().unwrap().to_string(),
        ]);
        assert_eq!(code, 0);
        let plan = parse_plan(&std::fs::read_to_string(&plan_path).unwrap()).unwrap();
        assert!(validate(&tiny_problem(), &plan).is_valid());
    }

    #[test]
    fn cli_validate_rejects_empty_plan_for_tiny_problem() {
        let dir = tempfile::tempdir().unwrap();
        let problem_path = dir.path().join("problem.json");
        let plan_path = dir.path().join("plan.json");
        std::fs::write(&problem_path, serialize_problem(&tiny_problem())).unwrap();
        std::fs::write(&plan_path, "{\"format_version\":1,\"steps\":[]}\n").unwrap();
        let code = cli([
            "validate".to_string(),
            problem_path.to_str().unwrap().to_string(),
            plan_path.to_str().unwrap().to_string(),
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn cli_gen_painter_exits_zero() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("painter.json");
        let code = cli([
            "gen".to_string(),
            "painter".to_string(),
            "--coats".to_string(),
            "2".to_string(),
            "--items".to_string(),
            "1".to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ]);
        assert_eq!(code, 0);
        let problem = parse_problem(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(crate::model::normalize_problem(&problem).is_ok());
    }

    #[test]
    fn cli_gen_rejects_reversed_gaps() {
        let code = cli([
            "gen".to_string(),
            "painter".to_string(),
            "--coats".to_string(),
            "2".to_string(),
            "--items".to_string(),
            "1".to_string(),
            "--min-gap".to_string(),
            "4".to_string(),
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn cli_usage_error_is_exit_two() {
        assert_eq!(cli(["frobnicate".to_string()]), 2);
    }

    #[test]
    fn cli_missing_file_is_exit_two() {
        assert_eq!(cli(["solve".to_string(), "/does/not/exist.json".to_string()]), 2);
    }

    #[test]
    fn cli_stats_runs() {
        let dir = tempfile::tempdir().unwrap();
        let problem_path = dir.path().join("problem.json");
        std::fs::write(&problem_path, serialize_problem(&tiny_problem())).unwrap();
        let code = cli(["stats".to_string(), problem_path.to_str().unwrap().to_string()]);
        assert_eq!(code, 0);
    }
}
