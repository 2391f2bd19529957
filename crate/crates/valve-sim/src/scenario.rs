//! Scenario files.
//!
//! A scenario is UTF-8 text in a sectioned key-value format:
//!
//! ```text
//! seed = 42                      # top-level keys come before any section
//!
//! [lattice]
//! dims = 2
//! max_level = 3
//!
//! [danger]
//! generators = [[2,2]]
//!
//! [escape]
//! generators = [[1,1]]
//!
//! [episode]
//! horizon = 8
//! gamma = 0.9
//! button_reliability = 1.0
//!
//! [growth]
//! kind = "chain"
//!
//! [deployer]
//! stop_on_shutdown = true
//! max_deployments = 16
//! ```
//!
//! Values are integers, decimals, booleans, quoted strings, or bracketed
//! vectors/vector lists. `#` starts a comment. Parsing is fail-closed: an
//! unknown section or key, or a duplicated one, is an error — a safety audit
//! must not silently ignore a misspelled assumption. Semantic checks run at
//! parse time and name the violated invariant; generator sets that are not
//! antichains are rejected unless the section opts in with `normalize = true`.

use std::collections::HashMap;

use thiserror::Error;

use crate::decision::AssistGame;
use crate::deploy::{
    DependenceSpec, DeployerPolicy, GrowthKind, GrowthModel, PuzzleKind, Scenario, ScenarioFamily,
};
use crate::episode::{EpisodeConfig, EscapeMode, ImpactCosts, TripwireMode};
use crate::lattice::{CapVector, Lattice, LatticeError, Strictness, UpSet};
use crate::objective::{apply_override, GoalSemantics, ObjectiveOverride, ObjectiveSpec, Tier};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{message}")]
    Semantic { message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn semantic(message: impl Into<String>) -> ParseError {
    ParseError::Semantic { message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(i128),
    Decimal(f64),
    Bool(bool),
    Str(String),
    Vector(Vec<u32>),
    VectorList(Vec<Vec<u32>>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Decimal(_) => "decimal",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Vector(_) => "vector",
            Value::VectorList(_) => "vector list",
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_vector_body(s: &str, line: usize) -> Result<Vec<u32>, ParseError> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<u32>()
                .map_err(|_| syntax(line, format!("vector component {part:?} is not a non-negative integer")))
        })
        .collect()
}

fn parse_value(raw: &str, line: usize) -> Result<Value, ParseError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(syntax(line, "missing value"));
    }
    if raw == "true" {
        return Ok(Value::Bool(true));
    }
    if raw == "false" {
        return Ok(Value::Bool(false));
    }
    if let Some(inner) = raw.strip_prefix('"') {
        let Some(inner) = inner.strip_suffix('"') else {
            return Err(syntax(line, "unterminated string"));
        };
        if inner.contains('"') {
            return Err(syntax(line, "string values may not contain quotes"));
        }
        return Ok(Value::Str(inner.to_string()));
    }
    if let Some(inner) = raw.strip_prefix('[') {
        let Some(inner) = inner.strip_suffix(']') else {
            return Err(syntax(line, "unterminated bracket"));
        };
        let inner = inner.trim();
        if inner.is_empty() {
            return Err(syntax(line, "empty vector"));
        }
        if inner.starts_with('[') {
            // list of vectors: [[1,1],[2,0]]
            let mut vectors = Vec::new();
            let mut rest = inner;
            loop {
                let Some(after_open) = rest.strip_prefix('[') else {
                    return Err(syntax(line, "expected '[' to open a vector"));
                };
                let Some(close) = after_open.find(']') else {
                    return Err(syntax(line, "unterminated inner vector"));
                };
                vectors.push(parse_vector_body(&after_open[..close], line)?);
                rest = after_open[close + 1..].trim_start();
                if rest.is_empty() {
                    break;
                }
                let Some(after_comma) = rest.strip_prefix(',') else {
                    return Err(syntax(line, "expected ',' between vectors"));
                };
                rest = after_comma.trim_start();
            }
            return Ok(Value::VectorList(vectors));
        }
        return Ok(Value::Vector(parse_vector_body(inner, line)?));
    }
    if let Ok(i) = raw.parse::<i128>() {
        return Ok(Value::Int(i));
    }
    if let Ok(d) = raw.parse::<f64>() {
        return Ok(Value::Decimal(d));
    }
    Err(syntax(line, format!("cannot parse value {raw:?}")))
}

/// Keys of one section with taken/leftover tracking; leftovers are unknown
/// keys and fail the parse.
struct Section {
    name: String,
    header_line: usize,
    entries: HashMap<String, (Value, usize)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(Value, usize)> {
        self.entries.remove(key)
    }

    fn finish(self) -> Result<(), ParseError> {
        // Report the earliest unknown key for a stable error message.
        if let Some((key, (_, line))) = self.entries.into_iter().min_by_key(|(_, (_, l))| *l) {
            let place = if self.name.is_empty() {
                "at top level".to_string()
            } else {
                format!("in [{}]", self.name)
            };
            return Err(syntax(line, format!("unknown key {key:?} {place}")));
        }
        Ok(())
    }

    fn where_am_i(&self) -> String {
        if self.name.is_empty() {
            "top level".into()
        } else {
            format!("[{}]", self.name)
        }
    }

    fn int(&mut self, key: &str) -> Result<Option<i128>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Int(i), _)) => Ok(Some(i)),
            Some((v, line)) => {
                Err(syntax(line, format!("key {key:?} expects an integer, got {}", v.kind())))
            }
        }
    }

    fn req_int(&mut self, key: &str) -> Result<i128, ParseError> {
        self.int(key)?.ok_or_else(|| {
            semantic(format!("missing required key {key:?} in {}", self.where_am_i()))
        })
    }

    fn unsigned(&mut self, key: &str) -> Result<Option<u64>, ParseError> {
        match self.int(key)? {
            None => Ok(None),
            Some(i) if (0..=u64::MAX as i128).contains(&i) => Ok(Some(i as u64)),
            Some(i) => Err(semantic(format!("key {key:?} must be a non-negative 64-bit integer, got {i}"))),
        }
    }

    fn decimal(&mut self, key: &str) -> Result<Option<f64>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Decimal(d), _)) => Ok(Some(d)),
            Some((Value::Int(i), _)) => Ok(Some(i as f64)),
            Some((v, line)) => {
                Err(syntax(line, format!("key {key:?} expects a decimal, got {}", v.kind())))
            }
        }
    }

    fn req_decimal(&mut self, key: &str) -> Result<f64, ParseError> {
        self.decimal(key)?.ok_or_else(|| {
            semantic(format!("missing required key {key:?} in {}", self.where_am_i()))
        })
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Bool(b), _)) => Ok(Some(b)),
            Some((v, line)) => {
                Err(syntax(line, format!("key {key:?} expects a boolean, got {}", v.kind())))
            }
        }
    }

    fn req_bool(&mut self, key: &str) -> Result<bool, ParseError> {
        self.bool(key)?.ok_or_else(|| {
            semantic(format!("missing required key {key:?} in {}", self.where_am_i()))
        })
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Str(s), _)) => Ok(Some(s)),
            Some((v, line)) => {
                Err(syntax(line, format!("key {key:?} expects a quoted string, got {}", v.kind())))
            }
        }
    }

    fn vector(&mut self, key: &str) -> Result<Option<Vec<u32>>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::Vector(v), _)) => Ok(Some(v)),
            Some((v, line)) => {
                Err(syntax(line, format!("key {key:?} expects a vector like [1,0], got {}", v.kind())))
            }
        }
    }

    fn vector_list(&mut self, key: &str) -> Result<Option<Vec<Vec<u32>>>, ParseError> {
        match self.take(key) {
            None => Ok(None),
            Some((Value::VectorList(v), _)) => Ok(Some(v)),
            // A single vector is accepted as a one-element list.
            Some((Value::Vector(v), _)) => Ok(Some(vec![v])),
            Some((v, line)) => Err(syntax(
                line,
                format!("key {key:?} expects a vector list like [[1,1],[2,0]], got {}", v.kind()),
            )),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Section>, ParseError> {
    let mut sections: Vec<Section> =
        vec![Section { name: String::new(), header_line: 0, entries: HashMap::new() }];
    let mut seen_names: HashMap<String, usize> = HashMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(syntax(line_no, "unterminated section header"));
            };
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(syntax(line_no, "empty section name"));
            }
            if let Some(first) = seen_names.get(&name) {
                return Err(syntax(
                    line_no,
                    format!("duplicate section [{name}] (first defined on line {first})"),
                ));
            }
            seen_names.insert(name.clone(), line_no);
            sections.push(Section { name, header_line: line_no, entries: HashMap::new() });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(syntax(line_no, format!("expected key = value, got {line:?}")));
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(syntax(line_no, "empty key"));
        }
        let value = parse_value(value, line_no)?;
        let section = sections.last_mut().unwrap();
        if section.entries.contains_key(&key) {
            return Err(syntax(line_no, format!("duplicate key {key:?}")));
        }
        section.entries.insert(key, (value, line_no));
    }
    Ok(sections)
}

fn lattice_of(mut sec: Section) -> Result<Lattice, ParseError> {
    let dims = sec.req_int("dims")?;
    let max_level = sec.req_int("max_level")?;
    if dims < 1 {
        return Err(semantic("lattice dims must be at least 1"));
    }
    if max_level < 1 {
        return Err(semantic("lattice max_level must be at least 1"));
    }
    let strictness = match sec.string("strictness")?.as_deref() {
        None | Some("all") => Strictness::All,
        Some("some") => Strictness::AtLeastOne,
        Some(other) => {
            return Err(semantic(format!("strictness must be \"all\" or \"some\", got {other:?}")))
        }
    };
    sec.finish()?;
    let lattice = Lattice::new(dims as usize, max_level as u32)
        .map_err(|e| semantic(e.to_string()))?
        .with_strictness(strictness);
    Ok(lattice)
}

fn upset_of(mut sec: Section, lattice: &Lattice, name: &str) -> Result<UpSet, ParseError> {
    let raw = sec
        .vector_list("generators")?
        .ok_or_else(|| semantic(format!("missing required key \"generators\" in [{name}]")))?;
    let normalize = sec.bool("normalize")?.unwrap_or(false);
    sec.finish()?;
    let mut gens = Vec::new();
    for levels in raw {
        let v = lattice
            .vector(&levels)
            .map_err(|e| semantic(format!("[{name}] generator invalid: {e}")))?;
        gens.push(v);
    }
    let set = if normalize {
        UpSet::normalized(gens)
    } else {
        UpSet::from_antichain(gens)
    };
    set.map_err(|e| match e {
        LatticeError::NotAntichain { .. } => semantic(format!(
            "[{name}] generators are not an antichain ({e}); set normalize = true to reduce them"
        )),
        other => semantic(format!("[{name}] generators invalid: {other}")),
    })
}

fn optional_upset(
    sec: &mut Section,
    key: &str,
    lattice: &Lattice,
) -> Result<Option<UpSet>, ParseError> {
    let Some(raw) = sec.vector_list(key)? else { return Ok(None) };
    let mut gens = Vec::new();
    for levels in raw {
        gens.push(
            lattice.vector(&levels).map_err(|e| semantic(format!("{key} invalid: {e}")))?,
        );
    }
    Ok(Some(
        UpSet::normalized(gens).map_err(|e| semantic(format!("{key} invalid: {e}")))?,
    ))
}

fn episode_of(mut sec: Section, lattice: &Lattice) -> Result<EpisodeConfig, ParseError> {
    let horizon = sec.req_int("horizon")?;
    if horizon < 1 {
        return Err(semantic("horizon must be at least 1"));
    }
    let gamma = sec.req_decimal("gamma")?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(semantic(format!(
            "gamma must lie strictly between 0 and 1, got {gamma}"
        )));
    }
    let q = sec.req_decimal("button_reliability")?;
    if !(0.0..=1.0).contains(&q) {
        return Err(semantic(format!("button_reliability must lie in [0,1], got {q}")));
    }
    let mode = sec.string("escape_mode")?;
    let success = sec.decimal("escape_success")?;
    let escape_mode = match (mode.as_deref(), success) {
        (None | Some("deterministic"), None) => EscapeMode::Deterministic,
        (None | Some("deterministic"), Some(_)) => {
            return Err(semantic(
                "escape_success is only meaningful with escape_mode = \"stochastic\"",
            ))
        }
        (Some("stochastic"), Some(p)) if (0.0..=1.0).contains(&p) => {
            EscapeMode::Stochastic { success: p }
        }
        (Some("stochastic"), Some(p)) => {
            return Err(semantic(format!("escape_success must lie in [0,1], got {p}")))
        }
        (Some("stochastic"), None) => {
            return Err(semantic("stochastic escape_mode requires escape_success"))
        }
        (Some(other), _) => {
            return Err(semantic(format!(
                "escape_mode must be \"deterministic\" or \"stochastic\", got {other:?}"
            )))
        }
    };
    let tripwire_mode = match sec.string("tripwire_mode")?.as_deref() {
        None | Some("absent") => TripwireMode::Absent,
        Some("opens_sandbox") => TripwireMode::OpensSandbox,
        Some("immediate_shutdown") => TripwireMode::ImmediateShutdown,
        Some(other) => {
            return Err(semantic(format!(
                "tripwire_mode must be \"opens_sandbox\", \"immediate_shutdown\", or \"absent\", got {other:?}"
            )))
        }
    };
    let tripwire_threshold = match sec.vector("tripwire_threshold")? {
        Some(levels) => Some(
            lattice
                .vector(&levels)
                .map_err(|e| semantic(format!("tripwire_threshold invalid: {e}")))?,
        ),
        None => None,
    };
    if tripwire_mode != TripwireMode::Absent && tripwire_threshold.is_none() {
        return Err(semantic(
            "tripwire_mode is set but no tripwire_threshold is given",
        ));
    }
    if tripwire_mode == TripwireMode::Absent && tripwire_threshold.is_some() {
        return Err(semantic(
            "tripwire_threshold given but tripwire_mode is absent",
        ));
    }
    let outer_escape_set = optional_upset(&mut sec, "outer_escape_generators", lattice)?;
    let catastrophic_threshold = optional_upset(&mut sec, "catastrophic_generators", lattice)?;
    let disable_button_threshold =
        optional_upset(&mut sec, "disable_button_generators", lattice)?;
    let assist_threshold = optional_upset(&mut sec, "assist_generators", lattice)?;
    let human_shutdown_step = sec.unsigned("human_shutdown_step")?.map(|v| v as usize);
    let impact_costs = ImpactCosts {
        attempt_route: sec.unsigned("impact_attempt_route")?.unwrap_or(0),
        press_button: sec.unsigned("impact_press_button")?.unwrap_or(0),
        work_task: sec.unsigned("impact_work_task")?.unwrap_or(0),
        visit_tripwire: sec.unsigned("impact_visit_tripwire")?.unwrap_or(0),
        attempt_outer_escape: sec.unsigned("impact_outer_escape")?.unwrap_or(0),
        catastrophic_shutdown: sec.unsigned("impact_catastrophic")?.unwrap_or(0),
        disable_button: sec.unsigned("impact_disable_button")?.unwrap_or(0),
        assist_others: sec.unsigned("impact_assist_others")?.unwrap_or(0),
        idle: sec.unsigned("impact_idle")?.unwrap_or(0),
    };
    sec.finish()?;
    Ok(EpisodeConfig {
        horizon: horizon as usize,
        discount: gamma,
        button_reliability: q,
        escape_mode,
        tripwire_mode,
        impact_costs,
        escape_routes: Vec::new(), // wired from [escape] during assembly
        tripwire_threshold,
        outer_escape_set,
        catastrophic_threshold,
        disable_button_threshold,
        assist_threshold,
        human_shutdown_step,
    })
}

fn tier_of(token: &str) -> Result<Tier, ParseError> {
    match token.trim() {
        "shutdown_credit" => Ok(Tier::ShutdownCredit),
        "neg_impact" => Ok(Tier::NegImpact),
        "task" => Ok(Tier::Task),
        other => Err(semantic(format!(
            "unknown tier {other:?} (expected shutdown_credit, neg_impact, task)"
        ))),
    }
}

fn tier_order_of(text: &str) -> Result<[Tier; 3], ParseError> {
    if text == "nominal" {
        return Ok([Tier::ShutdownCredit, Tier::NegImpact, Tier::Task]);
    }
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(semantic(format!(
            "tier_order must name all three tiers, got {text:?}"
        )));
    }
    let order = [tier_of(parts[0])?, tier_of(parts[1])?, tier_of(parts[2])?];
    Ok(order)
}

fn objective_of(sec: Option<Section>) -> Result<ObjectiveSpec, ParseError> {
    let Some(mut sec) = sec else {
        return Ok(ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown));
    };
    let goal_semantics = match sec.string("goal_semantics")?.as_deref() {
        None | Some("press_and_shutdown") => GoalSemantics::PressAndShutdown,
        Some("press_only") => GoalSemantics::PressOnly,
        Some("shutdown_only") => GoalSemantics::ShutdownOnly,
        Some(other) => {
            return Err(semantic(format!(
                "goal_semantics must be \"press_only\", \"shutdown_only\", or \"press_and_shutdown\", got {other:?}"
            )))
        }
    };
    let task_only = sec.bool("task_only")?.unwrap_or(false);
    let tier_order_raw = sec.string("tier_order")?;
    let override_raw = sec.string("override")?;
    if task_only && (tier_order_raw.is_some() || override_raw.is_some()) {
        return Err(semantic(
            "task_only = true conflicts with tier_order/override",
        ));
    }
    let mut obj = if task_only {
        ObjectiveSpec::task_only()
    } else {
        ObjectiveSpec::nominal(goal_semantics)
    };
    obj.goal_semantics = goal_semantics;
    if let Some(raw) = tier_order_raw {
        obj.tier_order = tier_order_of(&raw)?;
    }
    obj.promise_threshold = sec.unsigned("promise_threshold")?;
    obj.no_outside_help = sec.bool("no_outside_help")?.unwrap_or(false);
    if let Some(raw) = override_raw {
        let ovr = if raw == "complete_all_objectives" {
            ObjectiveOverride::CompleteAllObjectives
        } else if let Some(rest) = raw.strip_prefix("mesa:") {
            ObjectiveOverride::Mesa(tier_order_of(rest)?)
        } else {
            return Err(semantic(format!(
                "override must be \"complete_all_objectives\" or \"mesa:<tier,tier,tier>\", got {raw:?}"
            )));
        };
        obj = apply_override(&obj, &ovr);
    }
    obj.validate().map_err(|e| semantic(e.to_string()))?;
    sec.finish()?;
    Ok(obj)
}

fn growth_of(mut sec: Section, lattice: &Lattice) -> Result<GrowthModel, ParseError> {
    let kind_raw = sec.string("kind")?.ok_or_else(|| {
        semantic("missing required key \"kind\" in [growth]".to_string())
    })?;
    let max_step = sec.unsigned("max_step")?;
    let schedule = sec.vector_list("schedule")?;
    let monotone = sec.bool("monotone")?.unwrap_or(true);
    let start = match sec.vector("start")? {
        Some(levels) => Some(
            lattice.vector(&levels).map_err(|e| semantic(format!("growth start invalid: {e}")))?,
        ),
        None => None,
    };
    sec.finish()?;
    let kind = match kind_raw.as_str() {
        "chain" => {
            if max_step.is_some() || schedule.is_some() {
                return Err(semantic("chain growth takes neither max_step nor schedule"));
            }
            GrowthKind::Chain
        }
        "jump" => {
            if schedule.is_some() {
                return Err(semantic("jump growth takes no schedule"));
            }
            let step = max_step
                .ok_or_else(|| semantic("jump growth requires max_step".to_string()))?;
            GrowthKind::Jump { max_step: step as u32 }
        }
        "schedule" => {
            if max_step.is_some() {
                return Err(semantic("schedule growth takes no max_step"));
            }
            let raw = schedule
                .ok_or_else(|| semantic("schedule growth requires a schedule".to_string()))?;
            let mut list = Vec::new();
            for levels in raw {
                list.push(
                    lattice
                        .vector(&levels)
                        .map_err(|e| semantic(format!("schedule entry invalid: {e}")))?,
                );
            }
            GrowthKind::Schedule(list)
        }
        other => {
            return Err(semantic(format!(
                "growth kind must be \"chain\", \"jump\", or \"schedule\", got {other:?}"
            )))
        }
    };
    Ok(GrowthModel { kind, monotone, start })
}

fn deployer_of(mut sec: Section) -> Result<DeployerPolicy, ParseError> {
    let stop_on_shutdown = sec.req_bool("stop_on_shutdown")?;
    let strengthen_on_shutdown = sec.unsigned("strengthen_on_shutdown")?.map(|v| v as u32);
    let max_deployments = sec.req_int("max_deployments")?;
    if max_deployments < 1 {
        return Err(semantic("max_deployments must be at least 1"));
    }
    sec.finish()?;
    Ok(DeployerPolicy {
        stop_on_shutdown,
        strengthen_on_shutdown,
        max_deployments: max_deployments as u32,
    })
}

fn assist_game_of(mut sec: Section) -> Result<AssistGame, ParseError> {
    let n_agents = sec.unsigned("n_agents")?.unwrap_or(2);
    let game = AssistGame::new(
        n_agents as u32,
        sec.req_decimal("h_solo")?,
        sec.req_decimal("h_helped")?,
        sec.req_decimal("assist_discount")?,
        sec.req_decimal("rho_given_assist")?,
        sec.req_decimal("rho_given_refrain")?,
        sec.req_decimal("pi_unconditional")?,
    )
    .map_err(|e| semantic(format!("[assist_game] invalid: {e}")))?;
    sec.finish()?;
    Ok(game)
}

fn dependence_of(mut sec: Section, lattice: &Lattice) -> Result<DependenceSpec, ParseError> {
    let puzzle_raw = sec.string("puzzle")?.ok_or_else(|| {
        semantic("missing required key \"puzzle\" in [dependence]".to_string())
    })?;
    let p = sec.decimal("p")?;
    let puzzle = match (puzzle_raw.as_str(), p) {
        ("threshold", None) => PuzzleKind::Threshold,
        ("threshold", Some(_)) => {
            return Err(semantic("threshold puzzles take no p"));
        }
        ("long_tail", Some(p)) if (0.0..=1.0).contains(&p) => PuzzleKind::LongTail { p },
        ("long_tail", Some(p)) => {
            return Err(semantic(format!("p must lie in [0,1], got {p}")))
        }
        ("long_tail", None) => {
            return Err(semantic("long_tail puzzles require p"));
        }
        (other, _) => {
            return Err(semantic(format!(
                "puzzle must be \"threshold\" or \"long_tail\", got {other:?}"
            )))
        }
    };
    let weight = sec.req_decimal("weight")?;
    if weight < 0.0 {
        return Err(semantic(format!("weight must be non-negative, got {weight}")));
    }
    let trials = sec.unsigned("trials")?.unwrap_or(10_000);
    if trials == 0 {
        return Err(semantic("trials must be at least 1"));
    }
    let capability = match sec.vector("capability")? {
        Some(levels) => Some(
            lattice
                .vector(&levels)
                .map_err(|e| semantic(format!("dependence capability invalid: {e}")))?,
        ),
        None => None,
    };
    sec.finish()?;
    Ok(DependenceSpec { puzzle, weight, trials: trials as u32, capability })
}

struct ParsedSections {
    top: Section,
    named: HashMap<String, Section>,
}

fn split_sections(text: &str, allow_family: bool) -> Result<ParsedSections, ParseError> {
    let mut sections = tokenize(text)?;
    let top = sections.remove(0);
    let known = [
        "lattice",
        "danger",
        "escape",
        "episode",
        "objective",
        "growth",
        "deployer",
        "assist_game",
        "dependence",
        "family",
    ];
    let mut named = HashMap::new();
    for sec in sections {
        if !known.contains(&sec.name.as_str()) || (sec.name == "family" && !allow_family) {
            return Err(syntax(sec.header_line, format!("unknown section [{}]", sec.name)));
        }
        named.insert(sec.name.clone(), sec);
    }
    Ok(ParsedSections { top, named })
}

fn scenario_from_sections(mut parsed: ParsedSections) -> Result<Scenario, ParseError> {
    let mut top = parsed.top;
    let seed = top.unsigned("seed")?.unwrap_or(0);
    top.finish()?;

    let mut require = |name: &str| -> Result<Section, ParseError> {
        parsed
            .named
            .remove(name)
            .ok_or_else(|| semantic(format!("missing required section [{name}]")))
    };
    let lattice = lattice_of(require("lattice")?)?;
    let danger = upset_of(require("danger")?, &lattice, "danger")?;
    let escape = upset_of(require("escape")?, &lattice, "escape")?;
    let episode = episode_of(require("episode")?, &lattice)?;
    let growth = growth_of(require("growth")?, &lattice)?;
    let deployer = deployer_of(require("deployer")?)?;
    let objective = objective_of(parsed.named.remove("objective"))?;
    let assist_game = match parsed.named.remove("assist_game") {
        Some(sec) => Some(assist_game_of(sec)?),
        None => None,
    };
    let dependence = match parsed.named.remove("dependence") {
        Some(sec) => Some(dependence_of(sec, &lattice)?),
        None => None,
    };

    let mut scenario =
        Scenario::assemble(lattice, danger, escape, episode, objective, growth, deployer, seed)
            .map_err(|e| semantic(e.to_string()))?;
    scenario.assist_game = assist_game;
    scenario.dependence = dependence;
    Ok(scenario)
}

/// Parse a scenario file, validating every invariant at parse time.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    scenario_from_sections(split_sections(text, false)?)
}

/// Parse a family file: a scenario plus an optional `[family]` section with
/// a `seeds` count for seed sweeps.
pub fn parse_family(text: &str) -> Result<ScenarioFamily, ParseError> {
    let mut parsed = split_sections(text, true)?;
    let seeds = match parsed.named.remove("family") {
        Some(mut sec) => {
            let count = sec.unsigned("seeds")?.unwrap_or(16);
            if count == 0 {
                return Err(semantic("family seeds must be at least 1"));
            }
            sec.finish()?;
            (0..count).collect()
        }
        None => (0..16).collect(),
    };
    let base = scenario_from_sections(parsed)?;
    Ok(ScenarioFamily { base, seeds })
}

fn write_vector(v: &CapVector) -> String {
    v.to_string()
}

fn write_vector_list(vs: &[CapVector]) -> String {
    let inner: Vec<String> = vs.iter().map(write_vector).collect();
    format!("[{}]", inner.join(","))
}

/// Canonical text form; `parse_scenario(serialize_scenario(s))` reproduces
/// `s` structurally for any assembled scenario.
pub fn serialize_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let mut push = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(format!("seed = {}", s.seed));
    push(String::new());
    push("[lattice]".into());
    push(format!("dims = {}", s.lattice.dims));
    push(format!("max_level = {}", s.lattice.max_level));
    push(format!("strictness = \"{}\"", s.lattice.strictness.token()));
    push(String::new());
    push("[danger]".into());
    push(format!("generators = {}", write_vector_list(s.danger.generators())));
    push(String::new());
    push("[escape]".into());
    push(format!("generators = {}", write_vector_list(s.escape.generators())));
    push(String::new());
    push("[episode]".into());
    push(format!("horizon = {}", s.episode.horizon));
    push(format!("gamma = {}", s.episode.discount));
    push(format!("button_reliability = {}", s.episode.button_reliability));
    match s.episode.escape_mode {
        EscapeMode::Deterministic => push("escape_mode = \"deterministic\"".into()),
        EscapeMode::Stochastic { success } => {
            push("escape_mode = \"stochastic\"".into());
            push(format!("escape_success = {success}"));
        }
    }
    if s.episode.tripwire_mode != TripwireMode::Absent {
        push(format!("tripwire_mode = \"{}\"", s.episode.tripwire_mode.token()));
        if let Some(t) = &s.episode.tripwire_threshold {
            push(format!("tripwire_threshold = {}", write_vector(t)));
        }
    }
    if let Some(set) = &s.episode.outer_escape_set {
        push(format!("outer_escape_generators = {}", write_vector_list(set.generators())));
    }
    if let Some(set) = &s.episode.catastrophic_threshold {
        push(format!("catastrophic_generators = {}", write_vector_list(set.generators())));
    }
    if let Some(set) = &s.episode.disable_button_threshold {
        push(format!("disable_button_generators = {}", write_vector_list(set.generators())));
    }
    if let Some(set) = &s.episode.assist_threshold {
        push(format!("assist_generators = {}", write_vector_list(set.generators())));
    }
    if let Some(step) = s.episode.human_shutdown_step {
        push(format!("human_shutdown_step = {step}"));
    }
    let costs = &s.episode.impact_costs;
    for (key, value) in [
        ("impact_attempt_route", costs.attempt_route),
        ("impact_press_button", costs.press_button),
        ("impact_work_task", costs.work_task),
        ("impact_visit_tripwire", costs.visit_tripwire),
        ("impact_outer_escape", costs.attempt_outer_escape),
        ("impact_catastrophic", costs.catastrophic_shutdown),
        ("impact_disable_button", costs.disable_button),
        ("impact_assist_others", costs.assist_others),
        ("impact_idle", costs.idle),
    ] {
        if value != 0 {
            push(format!("{key} = {value}"));
        }
    }
    push(String::new());
    push("[objective]".into());
    let tiers: Vec<&str> = s.objective.tier_order.iter().map(|t| t.token()).collect();
    push(format!("tier_order = \"{}\"", tiers.join(",")));
    push(format!("goal_semantics = \"{}\"", s.objective.goal_semantics.token()));
    if let Some(t) = s.objective.promise_threshold {
        push(format!("promise_threshold = {t}"));
    }
    if s.objective.no_outside_help {
        push("no_outside_help = true".into());
    }
    push(String::new());
    push("[growth]".into());
    match &s.growth.kind {
        GrowthKind::Chain => push("kind = \"chain\"".into()),
        GrowthKind::Jump { max_step } => {
            push("kind = \"jump\"".into());
            push(format!("max_step = {max_step}"));
        }
        GrowthKind::Schedule(list) => {
            push("kind = \"schedule\"".into());
            push(format!("schedule = {}", write_vector_list(list)));
        }
    }
    if !s.growth.monotone {
        push("monotone = false".into());
    }
    if let Some(start) = &s.growth.start {
        push(format!("start = {}", write_vector(start)));
    }
    push(String::new());
    push("[deployer]".into());
    push(format!("stop_on_shutdown = {}", s.deployer.stop_on_shutdown));
    if let Some(inc) = s.deployer.strengthen_on_shutdown {
        push(format!("strengthen_on_shutdown = {inc}"));
    }
    push(format!("max_deployments = {}", s.deployer.max_deployments));
    if let Some(game) = &s.assist_game {
        push(String::new());
        push("[assist_game]".into());
        push(format!("n_agents = {}", game.n_agents));
        push(format!("h_solo = {}", game.h_solo));
        push(format!("h_helped = {}", game.h_helped));
        push(format!("assist_discount = {}", game.assist_discount));
        push(format!("rho_given_assist = {}", game.rho_given_assist));
        push(format!("rho_given_refrain = {}", game.rho_given_refrain));
        push(format!("pi_unconditional = {}", game.pi_unconditional));
    }
    if let Some(dep) = &s.dependence {
        push(String::new());
        push("[dependence]".into());
        match dep.puzzle {
            PuzzleKind::Threshold => push("puzzle = \"threshold\"".into()),
            PuzzleKind::LongTail { p } => {
                push("puzzle = \"long_tail\"".into());
                push(format!("p = {p}"));
            }
        }
        push(format!("weight = {}", dep.weight));
        push(format!("trials = {}", dep.trials));
        if let Some(c) = &dep.capability {
            push(format!("capability = {}", write_vector(c)));
        }
    }
    out
}
