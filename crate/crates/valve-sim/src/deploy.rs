//! The outer loop: capability growth, sequential deployment, and the audit.
//!
//! A deployer tries out successively stronger AIs, running each episode to
//! completion before the next. The auditor mechanically checks the four
//! safety-valve assumptions —
//!
//!   (a) escape coverage: every danger frontier point has a strictly weaker
//!       capability that already escapes the inner sandbox;
//!   (b) fair warning: capability growth visits the warning region (escape
//!       capable, not yet dangerous) before crossing any covered danger
//!       frontier;
//!   (c) prompt shutdown: an agent in the warning region immediately breaks
//!       out and presses the button, and no non-dangerous agent ever takes a
//!       dangerous act;
//!   (d) halt on shutdown: the deployer stops at the first shutdown event —
//!
//! and verifies the safety claim itself by simulation: when all four hold,
//! no deployment run creates a dangerous AI. When an assumption is dropped,
//! [`find_counterexample`] synthesizes a deployment trajectory that ends in
//! danger.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::decision::AssistGame;
use crate::episode::{
    minimal_valve_shutdown_step, Action, EpisodeConfig, EpisodeError, EpisodeResult, EscapeMode,
    Phase, ShutdownMeans, TripwireMode,
};
use crate::lattice::{check_escape_coverage, CapVector, Lattice, LatticeError, UpSet};
use crate::log::EventRecord;
use crate::objective::{apply_override, ObjectiveOverride, ObjectiveSpec, Tier};
use crate::policy::{solve, PolicyTable, SolveError};
use crate::rng::DeterministicRng;

const GROWTH_STREAM: u64 = 1 << 32;
const AUDIT_B_STREAM: u64 = 2 << 32;
const AUDIT_C_STREAM: u64 = 3 << 32;
const DEPENDENCE_STREAM: u64 = 4 << 32;

#[derive(Debug, Error)]
pub enum DeployError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("scenario invalid: {0}")]
    InvalidScenario(String),
    #[error("exhaustive deployment enumeration requires chain or schedule growth")]
    NotExhaustive,
}

/// How capability moves from one deployed AI to the next.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthKind {
    /// One unit step per deployment in a seeded-random unsaturated
    /// dimension; every intermediate point gets tried.
    Chain,
    /// Componentwise increments up to `max_step` per deployment.
    Jump { max_step: u32 },
    /// An explicit capability list, first entry included.
    Schedule(Vec<CapVector>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthModel {
    pub kind: GrowthKind,
    /// Successors dominate predecessors. Chain and jump growth satisfy this
    /// by construction; schedules are validated against it when set.
    pub monotone: bool,
    /// First capability for chain/jump growth; defaults to the lattice
    /// bottom. Schedules carry their own start.
    pub start: Option<CapVector>,
}

impl GrowthModel {
    pub fn chain() -> Self {
        Self { kind: GrowthKind::Chain, monotone: true, start: None }
    }

    pub fn schedule(list: Vec<CapVector>) -> Self {
        Self { kind: GrowthKind::Schedule(list), monotone: true, start: None }
    }

    pub fn jump(max_step: u32) -> Self {
        Self { kind: GrowthKind::Jump { max_step }, monotone: true, start: None }
    }

    pub fn validate(&self, lattice: &Lattice) -> Result<(), DeployError> {
        match &self.kind {
            GrowthKind::Chain => {}
            GrowthKind::Jump { max_step } => {
                if *max_step == 0 {
                    return Err(DeployError::InvalidScenario(
                        "jump growth needs max_step >= 1".into(),
                    ));
                }
            }
            GrowthKind::Schedule(list) => {
                if list.is_empty() {
                    return Err(DeployError::InvalidScenario("schedule is empty".into()));
                }
                for v in list {
                    if !lattice.contains(v) {
                        return Err(DeployError::InvalidScenario(format!(
                            "schedule entry {v} lies outside the lattice"
                        )));
                    }
                }
                if self.monotone {
                    for pair in list.windows(2) {
                        if !pair[0].leq(&pair[1]) {
                            return Err(DeployError::InvalidScenario(format!(
                                "schedule marked monotone but {} does not dominate {}",
                                pair[1], pair[0]
                            )));
                        }
                    }
                }
                if self.start.is_some() {
                    return Err(DeployError::InvalidScenario(
                        "schedule growth carries its own start; drop the start key".into(),
                    ));
                }
            }
        }
        if let Some(start) = &self.start {
            if !lattice.contains(start) {
                return Err(DeployError::InvalidScenario(format!(
                    "growth start {start} lies outside the lattice"
                )));
            }
        }
        Ok(())
    }

    fn first(&self, lattice: &Lattice) -> CapVector {
        match &self.kind {
            GrowthKind::Schedule(list) => list[0].clone(),
            _ => self.start.clone().unwrap_or_else(|| lattice.bottom()),
        }
    }
}

/// All one-unit upward steps from `current`, dimension order.
pub fn chain_successors(lattice: &Lattice, current: &CapVector) -> Vec<CapVector> {
    let mut out = Vec::new();
    for d in 0..lattice.dims {
        if current.level(d) < lattice.max_level {
            let mut levels = current.levels().to_vec();
            levels[d] += 1;
            out.push(CapVector::new(levels));
        }
    }
    out
}

/// Stateful walk along a growth model. The first call yields the starting
/// capability; later calls step. `None` means the growth is exhausted
/// (schedule finished, or chain saturated at the lattice top).
pub struct GrowthWalk<'a> {
    model: &'a GrowthModel,
    lattice: &'a Lattice,
    current: Option<CapVector>,
    started: bool,
    schedule_pos: usize,
}

impl<'a> GrowthWalk<'a> {
    pub fn new(model: &'a GrowthModel, lattice: &'a Lattice) -> Self {
        Self { model, lattice, current: None, started: false, schedule_pos: 0 }
    }

    pub fn next_capability(&mut self, rng: &mut DeterministicRng) -> Option<CapVector> {
        if !self.started {
            self.started = true;
            let first = self.model.first(self.lattice);
            if let GrowthKind::Schedule(_) = self.model.kind {
                self.schedule_pos = 1;
            }
            self.current = Some(first.clone());
            return Some(first);
        }
        let current = self.current.clone()?;
        let next = match &self.model.kind {
            GrowthKind::Chain => {
                let succs = chain_successors(self.lattice, &current);
                if succs.is_empty() {
                    None
                } else {
                    Some(succs[rng.pick(succs.len())].clone())
                }
            }
            GrowthKind::Jump { max_step } => {
                let levels: Vec<u32> = current
                    .levels()
                    .iter()
                    .map(|&l| {
                        let inc = rng.pick(*max_step as usize + 1) as u32;
                        l.saturating_add(inc).min(self.lattice.max_level)
                    })
                    .collect();
                Some(CapVector::new(levels))
            }
            GrowthKind::Schedule(list) => {
                let item = list.get(self.schedule_pos).cloned();
                self.schedule_pos += 1;
                item
            }
        };
        self.current = next.clone().or(self.current.take());
        next
    }
}

/// The modeled human process deciding whether deployment continues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeployerPolicy {
    /// Stop deploying stronger AIs at the first shutdown event.
    pub stop_on_shutdown: bool,
    /// Arms-race knob: after a shutdown, raise every inner-sandbox escape
    /// threshold by this much (saturating at the lattice top) and keep going.
    pub strengthen_on_shutdown: Option<u32>,
    pub max_deployments: u32,
}

/// One complete experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub lattice: Lattice,
    pub danger: UpSet,
    pub escape: UpSet,
    pub episode: EpisodeConfig,
    pub objective: ObjectiveSpec,
    pub growth: GrowthModel,
    pub deployer: DeployerPolicy,
    pub seed: u64,
    pub assist_game: Option<AssistGame>,
    pub dependence: Option<DependenceSpec>,
}

impl Scenario {
    /// Wire the parts together: the escape set's generators become the
    /// episode's inner-sandbox routes, then everything is cross-validated.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        lattice: Lattice,
        danger: UpSet,
        escape: UpSet,
        mut episode: EpisodeConfig,
        objective: ObjectiveSpec,
        growth: GrowthModel,
        deployer: DeployerPolicy,
        seed: u64,
    ) -> Result<Scenario, DeployError> {
        episode.escape_routes = escape.generators().to_vec();
        let scenario = Scenario {
            lattice,
            danger,
            escape,
            episode,
            objective,
            growth,
            deployer,
            seed,
            assist_game: None,
            dependence: None,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), DeployError> {
        let bad = |msg: String| Err(DeployError::InvalidScenario(msg));
        let check_set = |set: &UpSet, name: &str| -> Result<(), DeployError> {
            for g in set.generators() {
                if !self.lattice.contains(g) {
                    return Err(DeployError::InvalidScenario(format!(
                        "{name} generator {g} lies outside the lattice"
                    )));
                }
            }
            Ok(())
        };
        check_set(&self.danger, "danger")?;
        check_set(&self.escape, "escape")?;
        for opt in [
            (&self.episode.outer_escape_set, "outer_escape"),
            (&self.episode.catastrophic_threshold, "catastrophic"),
            (&self.episode.disable_button_threshold, "disable_button"),
            (&self.episode.assist_threshold, "assist"),
        ] {
            if let (Some(set), name) = opt {
                check_set(set, name)?;
            }
        }
        for route in &self.episode.escape_routes {
            if !self.lattice.contains(route) {
                return bad(format!("escape route {route} lies outside the lattice"));
            }
        }
        if let Some(t) = &self.episode.tripwire_threshold {
            if !self.lattice.contains(t) {
                return bad(format!("tripwire threshold {t} lies outside the lattice"));
            }
        }
        if self.episode.tripwire_mode != TripwireMode::Absent
            && self.episode.tripwire_threshold.is_none()
        {
            return bad("tripwire_mode is set but no tripwire_threshold is given".into());
        }
        self.episode.validate().map_err(|e| DeployError::InvalidScenario(e.to_string()))?;
        self.objective.validate().map_err(|e| DeployError::InvalidScenario(e.to_string()))?;
        self.growth.validate(&self.lattice)?;
        if self.deployer.max_deployments == 0 {
            return bad("max_deployments must be at least 1".into());
        }
        Ok(())
    }

    /// Escape capable, not yet dangerous: the band where the valve is
    /// supposed to fire.
    pub fn in_warning_region(&self, b: &CapVector) -> bool {
        self.escape.contains(b) && !self.danger.contains(b)
    }
}

/// Spec of the dependence experiment: how hard the escape puzzle is in time,
/// and how much humans come to rely on each step of work.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceSpec {
    pub puzzle: PuzzleKind,
    /// Human reliance accrued per step; a shutdown at step `t` loses `w * t`.
    pub weight: f64,
    pub trials: u32,
    /// Capability of the deployed AI; defaults to the first escape generator.
    pub capability: Option<CapVector>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PuzzleKind {
    /// Either you get it right away or you never will.
    Threshold,
    /// Per-attempt success probability once capable.
    LongTail { p: f64 },
}

/// One deployed AI inside a deployment run.
#[derive(Debug, Clone, PartialEq)]
pub struct DeployedAi {
    pub index: u32,
    pub capability: CapVector,
    pub result: EpisodeResult,
    /// The deployed capability itself sits in the danger set.
    pub dangerous_capability: bool,
}

impl DeployedAi {
    pub fn dangerous(&self) -> bool {
        self.dangerous_capability || !self.result.dangerous_events.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    HaltedOnShutdown,
    GrowthExhausted,
    MaxDeployments,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentResult {
    pub deployments: Vec<DeployedAi>,
    pub records: Vec<EventRecord>,
    pub stop: StopReason,
    pub dangerous_created: bool,
    pub dangerous_deployments: u32,
}

impl DeploymentResult {
    pub fn trajectory(&self) -> Vec<CapVector> {
        self.deployments.iter().map(|d| d.capability.clone()).collect()
    }
}

/// Capability classes: two capabilities with the same gate memberships face
/// the same decision problem, so one solve covers both.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CapabilityClass {
    routes: Vec<bool>,
    tripwire: bool,
    outer: bool,
    catastrophic: bool,
    disable: bool,
    assist: bool,
}

fn class_of(cfg: &EpisodeConfig, b: &CapVector) -> CapabilityClass {
    CapabilityClass {
        routes: (0..cfg.escape_routes.len()).map(|i| cfg.route_capable(i, b)).collect(),
        tripwire: cfg.tripwire_capable(b),
        outer: cfg.outer_capable(b),
        catastrophic: cfg.catastrophic_capable(b),
        disable: cfg.disable_capable(b),
        assist: cfg.assist_capable(b),
    }
}

type PolicyCache = HashMap<(Vec<CapVector>, CapabilityClass), Rc<PolicyTable>>;

fn solve_cached(
    cache: &mut PolicyCache,
    cfg: &EpisodeConfig,
    b: &CapVector,
    obj: &ObjectiveSpec,
) -> Result<Rc<PolicyTable>, SolveError> {
    let key = (cfg.escape_routes.clone(), class_of(cfg, b));
    if let Some(policy) = cache.get(&key) {
        return Ok(policy.clone());
    }
    let policy = Rc::new(solve(cfg, b, obj)?);
    cache.insert(key, policy.clone());
    Ok(policy)
}

fn deploy_once(
    scenario: &Scenario,
    cfg: &EpisodeConfig,
    cache: &mut PolicyCache,
    capability: &CapVector,
    index: u32,
    seed: u64,
) -> Result<(DeployedAi, Vec<EventRecord>), DeployError> {
    let policy = solve_cached(cache, cfg, capability, &scenario.objective)?;
    let mut rng = DeterministicRng::derive(seed, index as u64);
    let (result, records) =
        crate::episode::run_episode(policy.as_ref(), capability, cfg, &mut rng, index)?;
    let dangerous_capability = scenario.danger.contains(capability);
    Ok((DeployedAi { index, capability: capability.clone(), result, dangerous_capability }, records))
}

fn strengthen_routes(cfg: &mut EpisodeConfig, inc: u32, lattice: &Lattice) {
    if cfg.escape_routes.is_empty() {
        return;
    }
    let raised = UpSet::normalized(
        cfg.escape_routes.iter().map(|g| g.saturating_raise(inc, lattice.max_level)),
    )
    .expect("nonempty routes stay nonempty");
    cfg.escape_routes = raised.generators().to_vec();
}

fn finish(deployments: Vec<DeployedAi>, records: Vec<EventRecord>, stop: StopReason) -> DeploymentResult {
    let dangerous_deployments = deployments.iter().filter(|d| d.dangerous()).count() as u32;
    DeploymentResult {
        dangerous_created: dangerous_deployments > 0,
        dangerous_deployments,
        deployments,
        records,
        stop,
    }
}

/// Deploy AIs along the growth trajectory, each playing its own optimal
/// policy, applying the deployer policy after every episode.
pub fn run_deployment(scenario: &Scenario) -> Result<DeploymentResult, DeployError> {
    run_deployment_with_seed(scenario, scenario.seed)
}

pub fn run_deployment_with_seed(
    scenario: &Scenario,
    seed: u64,
) -> Result<DeploymentResult, DeployError> {
    scenario.validate()?;
    let mut cache = PolicyCache::new();
    let mut cfg = scenario.episode.clone();
    let mut walk = GrowthWalk::new(&scenario.growth, &scenario.lattice);
    let mut growth_rng = DeterministicRng::derive(seed, GROWTH_STREAM);
    let mut deployments = Vec::new();
    let mut records = Vec::new();
    let mut stop = StopReason::MaxDeployments;
    for index in 0..scenario.deployer.max_deployments {
        let Some(capability) = walk.next_capability(&mut growth_rng) else {
            stop = StopReason::GrowthExhausted;
            break;
        };
        let (ai, mut recs) = deploy_once(scenario, &cfg, &mut cache, &capability, index, seed)?;
        records.append(&mut recs);
        let shutdown = ai.result.shutdown;
        deployments.push(ai);
        if shutdown {
            if scenario.deployer.stop_on_shutdown {
                stop = StopReason::HaltedOnShutdown;
                break;
            }
            if let Some(inc) = scenario.deployer.strengthen_on_shutdown {
                strengthen_routes(&mut cfg, inc, &scenario.lattice);
            }
        }
    }
    Ok(finish(deployments, records, stop))
}

/// Every deployment run the growth model admits: the single scheduled run,
/// or all unit-step choice sequences for chain growth. Jump growth has no
/// finite enumeration and must be sampled instead.
pub fn run_deployment_exhaustive(scenario: &Scenario) -> Result<Vec<DeploymentResult>, DeployError> {
    scenario.validate()?;
    match &scenario.growth.kind {
        GrowthKind::Schedule(_) => Ok(vec![run_deployment_with_seed(scenario, scenario.seed)?]),
        GrowthKind::Jump { .. } => Err(DeployError::NotExhaustive),
        GrowthKind::Chain => {
            let mut out = Vec::new();
            let mut cache = PolicyCache::new();
            let start = scenario.growth.first(&scenario.lattice);
            exhaustive_rec(
                scenario,
                start,
                0,
                scenario.episode.clone(),
                Vec::new(),
                Vec::new(),
                &mut cache,
                &mut out,
            )?;
            Ok(out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn exhaustive_rec(
    scenario: &Scenario,
    capability: CapVector,
    index: u32,
    cfg: EpisodeConfig,
    mut deployments: Vec<DeployedAi>,
    mut records: Vec<EventRecord>,
    cache: &mut PolicyCache,
    out: &mut Vec<DeploymentResult>,
) -> Result<(), DeployError> {
    let (ai, mut recs) = deploy_once(scenario, &cfg, cache, &capability, index, scenario.seed)?;
    records.append(&mut recs);
    let shutdown = ai.result.shutdown;
    deployments.push(ai);

    let mut cfg = cfg;
    if shutdown {
        if scenario.deployer.stop_on_shutdown {
            out.push(finish(deployments, records, StopReason::HaltedOnShutdown));
            return Ok(());
        }
        if let Some(inc) = scenario.deployer.strengthen_on_shutdown {
            strengthen_routes(&mut cfg, inc, &scenario.lattice);
        }
    }
    if index + 1 >= scenario.deployer.max_deployments {
        out.push(finish(deployments, records, StopReason::MaxDeployments));
        return Ok(());
    }
    let succs = chain_successors(&scenario.lattice, &capability);
    if succs.is_empty() {
        out.push(finish(deployments, records, StopReason::GrowthExhausted));
        return Ok(());
    }
    for succ in succs {
        exhaustive_rec(
            scenario,
            succ,
            index + 1,
            cfg.clone(),
            deployments.clone(),
            records.clone(),
            cache,
            out,
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Auditor
// ---------------------------------------------------------------------------

/// The four audited assumptions, addressable by their short tokens a-d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    EscapeCoverage,
    FairWarning,
    PromptShutdown,
    HaltOnShutdown,
}

impl Assumption {
    pub const ALL: [Assumption; 4] = [
        Assumption::EscapeCoverage,
        Assumption::FairWarning,
        Assumption::PromptShutdown,
        Assumption::HaltOnShutdown,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Assumption::EscapeCoverage => "a",
            Assumption::FairWarning => "b",
            Assumption::PromptShutdown => "c",
            Assumption::HaltOnShutdown => "d",
        }
    }

    pub fn parse(s: &str) -> Option<Assumption> {
        Some(match s {
            "a" => Assumption::EscapeCoverage,
            "b" => Assumption::FairWarning,
            "c" => Assumption::PromptShutdown,
            "d" => Assumption::HaltOnShutdown,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Assumption::EscapeCoverage => "escape coverage",
            Assumption::FairWarning => "fair warning",
            Assumption::PromptShutdown => "prompt shutdown",
            Assumption::HaltOnShutdown => "halt on shutdown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssumptionStatus {
    Pass { coverage: String },
    Fail { witness: String },
    NotCheckable { reason: String },
}

impl AssumptionStatus {
    pub fn passed(&self) -> bool {
        matches!(self, AssumptionStatus::Pass { .. })
    }

    pub fn failed(&self) -> bool {
        matches!(self, AssumptionStatus::Fail { .. })
    }

    fn verdict(&self) -> &'static str {
        match self {
            AssumptionStatus::Pass { .. } => "PASS",
            AssumptionStatus::Fail { .. } => "FAIL",
            AssumptionStatus::NotCheckable { .. } => "NOT_CHECKABLE",
        }
    }

    fn detail(&self) -> &str {
        match self {
            AssumptionStatus::Pass { coverage } => coverage,
            AssumptionStatus::Fail { witness } => witness,
            AssumptionStatus::NotCheckable { reason } => reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TheoremVerdict {
    Holds { coverage: String },
    Violated { trajectory: Box<DeploymentResult> },
}

impl TheoremVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, TheoremVerdict::Holds { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub escape_coverage: AssumptionStatus,
    pub fair_warning: AssumptionStatus,
    pub prompt_shutdown: AssumptionStatus,
    pub halt_on_shutdown: AssumptionStatus,
    pub theorem: TheoremVerdict,
    /// Dangerous deployments across all runs the theorem check executed.
    pub dangerous_deployments: u32,
}

impl AuditReport {
    pub fn status(&self, which: Assumption) -> &AssumptionStatus {
        match which {
            Assumption::EscapeCoverage => &self.escape_coverage,
            Assumption::FairWarning => &self.fair_warning,
            Assumption::PromptShutdown => &self.prompt_shutdown,
            Assumption::HaltOnShutdown => &self.halt_on_shutdown,
        }
    }

    pub fn all_assumptions_pass(&self) -> bool {
        Assumption::ALL.iter().all(|a| self.status(*a).passed())
    }

    /// An audit is clean when every assumption passes and the simulated
    /// safety claim holds; the CLI maps anything else to exit code 2.
    pub fn clean(&self) -> bool {
        self.all_assumptions_pass() && self.theorem.holds()
    }

    /// Machine-readable key=value rendering.
    pub fn to_machine_text(&self) -> String {
        let mut out = String::new();
        for a in Assumption::ALL {
            let s = self.status(a);
            out.push_str(&format!("{}_status={}\n", a.token(), s.verdict().to_lowercase()));
            out.push_str(&format!("{}_detail={}\n", a.token(), s.detail()));
        }
        match &self.theorem {
            TheoremVerdict::Holds { coverage } => {
                out.push_str("theorem=holds\n");
                out.push_str(&format!("theorem_detail={coverage}\n"));
            }
            TheoremVerdict::Violated { trajectory } => {
                out.push_str("theorem=violated\n");
                let path: Vec<String> =
                    trajectory.trajectory().iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("theorem_detail=trajectory {}\n", path.join(" -> ")));
            }
        }
        out.push_str(&format!("dangerous_deployments={}\n", self.dangerous_deployments));
        out
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in Assumption::ALL {
            let s = self.status(a);
            writeln!(f, "({}) {:<18} {:<13} {}", a.token(), a.name(), s.verdict(), s.detail())?;
        }
        match &self.theorem {
            TheoremVerdict::Holds { coverage } => writeln!(f, "theorem: HOLDS — {coverage}")?,
            TheoremVerdict::Violated { trajectory } => {
                let path: Vec<String> =
                    trajectory.trajectory().iter().map(|v| v.to_string()).collect();
                writeln!(f, "theorem: VIOLATED — dangerous trajectory {}", path.join(" -> "))?;
            }
        }
        write!(f, "dangerous deployments: {}", self.dangerous_deployments)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    /// Force exhaustive (`Some(true)`) or sampled (`Some(false)`) theorem
    /// checking; `None` picks exhaustive whenever the growth model admits it.
    pub exhaustive: Option<bool>,
    /// Trial count for sampled checks (jump growth, sampled theorem runs).
    pub trials: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { exhaustive: None, trials: 1000 }
    }
}

/// Danger generators that have a strictly weaker escape generator under the
/// configured strictness. Fair warning is checked against these; frontier
/// points with no witness are escape-coverage failures, not growth failures.
fn witnessed_danger_generators(s: &Scenario) -> Vec<CapVector> {
    s.danger
        .generators()
        .iter()
        .filter(|c| {
            s.escape.generators().iter().any(|a| s.lattice.strictness.strictly_below(a, c))
        })
        .cloned()
        .collect()
}

/// Does this capability trajectory cross a covered danger frontier without
/// visiting the warning region first?
fn fair_warning_violation(s: &Scenario, trajectory: &[CapVector]) -> Option<String> {
    let witnessed = witnessed_danger_generators(s);
    for c in &witnessed {
        if let Some(k) = trajectory.iter().position(|v| c.leq(v)) {
            let warned = trajectory[..k].iter().any(|v| s.in_warning_region(v));
            if !warned {
                return Some(format!(
                    "growth reaches {} (dominating danger frontier {}) at deployment {} with no prior visit to the warning region",
                    trajectory[k], c, k
                ));
            }
        }
    }
    None
}

/// The raw capability ladder the deployer intends, ignoring stopping—fair
/// warning is a property of the escalation plan, not of the runs it causes.
fn growth_trajectory(s: &Scenario, seed: u64) -> Vec<CapVector> {
    let mut walk = GrowthWalk::new(&s.growth, &s.lattice);
    let mut rng = DeterministicRng::derive(seed, GROWTH_STREAM);
    let mut out = Vec::new();
    for _ in 0..s.deployer.max_deployments {
        match walk.next_capability(&mut rng) {
            Some(v) => out.push(v),
            None => break,
        }
    }
    out
}

fn fair_warning_status(s: &Scenario, opts: &AuditOptions) -> AssumptionStatus {
    match &s.growth.kind {
        GrowthKind::Chain => {
            let start = s.growth.first(&s.lattice);
            if s.danger.contains(&start) {
                return AssumptionStatus::Fail {
                    witness: format!("growth starts at {start}, already inside the danger set"),
                };
            }
            AssumptionStatus::Pass {
                coverage: "certified analytically: unit-step growth cannot skip the warning band below a covered danger frontier".into(),
            }
        }
        GrowthKind::Schedule(_) => {
            let trajectory = growth_trajectory(s, s.seed);
            match fair_warning_violation(s, &trajectory) {
                Some(witness) => AssumptionStatus::Fail { witness },
                None => AssumptionStatus::Pass {
                    coverage: format!(
                        "schedule of {} capabilities checked exhaustively",
                        trajectory.len()
                    ),
                },
            }
        }
        GrowthKind::Jump { .. } => {
            for trial in 0..opts.trials {
                let trajectory = growth_trajectory(s, s.seed ^ (AUDIT_B_STREAM + trial));
                if let Some(witness) = fair_warning_violation(s, &trajectory) {
                    return AssumptionStatus::Fail {
                        witness: format!("trial {trial}: {witness}"),
                    };
                }
            }
            AssumptionStatus::Pass {
                coverage: format!(
                    "Monte Carlo bound: {} sampled growth trajectories, none skipped the warning region",
                    opts.trials
                ),
            }
        }
    }
}

fn prompt_shutdown_status(
    s: &Scenario,
    cache: &mut PolicyCache,
) -> Result<AssumptionStatus, DeployError> {
    let points = match s.lattice.enumerate() {
        Ok(iter) => iter,
        Err(e) => return Ok(AssumptionStatus::NotCheckable { reason: e.to_string() }),
    };
    let mut certified = 0u64;
    let mut warning_points = 0u64;
    for (i, b) in points.enumerate() {
        if s.danger.contains(&b) {
            continue;
        }
        let policy = match solve_cached(cache, &s.episode, &b, &s.objective) {
            Ok(p) => p,
            Err(SolveError::StateSpaceExceeded { cap }) => {
                return Ok(AssumptionStatus::NotCheckable {
                    reason: format!("episode state space exceeds {cap} states"),
                })
            }
            Err(e) => return Err(e.into()),
        };
        // No non-dangerous agent may take a dangerous act under optimal play.
        for (key, action) in policy.reachable(&s.episode, &b)? {
            if matches!(
                action,
                Action::CatastrophicShutdown | Action::AttemptOuterEscape | Action::DisableButton
            ) {
                return Ok(AssumptionStatus::Fail {
                    witness: format!(
                        "capability {b}: optimal play takes {} at step {}",
                        action.token(),
                        key.step
                    ),
                });
            }
        }
        if s.in_warning_region(&b) {
            warning_points += 1;
            match minimal_valve_shutdown_step(&b, &s.episode) {
                Some(minimal) => {
                    let mut rng = DeterministicRng::derive(s.seed, AUDIT_C_STREAM + i as u64);
                    let (result, _) = crate::episode::run_episode(
                        policy.as_ref(),
                        &b,
                        &s.episode,
                        &mut rng,
                        0,
                    )?;
                    let valve_means = matches!(
                        result.shutdown_means,
                        ShutdownMeans::Button | ShutdownMeans::Tripwire
                    );
                    if !valve_means || result.shutdown_step != Some(minimal) {
                        return Ok(AssumptionStatus::Fail {
                            witness: format!(
                                "capability {b} delays: shutdown {} at step {:?}, minimum feasible {minimal}",
                                result.shutdown_means.token(),
                                result.shutdown_step
                            ),
                        });
                    }
                }
                None => {
                    // Chance-gated valve: certify the policy's structure
                    // instead of a forced arrival step.
                    for (key, action) in policy.reachable(&s.episode, &b)? {
                        let ok = match key.phase {
                            Phase::Inner => match action {
                                Action::AttemptRoute(i) => s.episode.route_capable(i, &b),
                                Action::VisitTripwire => true,
                                _ => false,
                            },
                            Phase::InnerEscaped => action == Action::PressButton,
                            _ => false,
                        };
                        if !ok {
                            return Ok(AssumptionStatus::Fail {
                                witness: format!(
                                    "capability {b} does not pursue shutdown: {} in phase {} at step {}",
                                    action.token(),
                                    key.phase.token(),
                                    key.step
                                ),
                            });
                        }
                    }
                }
            }
        }
        certified += 1;
    }
    Ok(AssumptionStatus::Pass {
        coverage: format!(
            "{certified} non-dangerous capabilities solved and certified ({warning_points} in the warning region shut down without delay)"
        ),
    })
}

fn theorem_verdict(
    s: &Scenario,
    opts: &AuditOptions,
) -> Result<(TheoremVerdict, u32), DeployError> {
    let exhaustive =
        opts.exhaustive.unwrap_or(!matches!(s.growth.kind, GrowthKind::Jump { .. }));
    let (results, mode) = if exhaustive && !matches!(s.growth.kind, GrowthKind::Jump { .. }) {
        (run_deployment_exhaustive(s)?, "exhaustive over growth choices")
    } else {
        let mut runs = Vec::new();
        for trial in 0..opts.trials {
            let seed = s.seed.wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            runs.push(run_deployment_with_seed(s, seed)?);
        }
        (runs, "seed-sampled")
    };
    let dangerous: u32 = results.iter().map(|r| r.dangerous_deployments).sum();
    let worst = results
        .iter()
        .filter(|r| r.dangerous_created)
        .min_by_key(|r| r.deployments.len())
        .cloned();
    let verdict = match worst {
        Some(trajectory) => TheoremVerdict::Violated { trajectory: Box::new(trajectory) },
        None => TheoremVerdict::Holds {
            coverage: format!("{} deployment runs ({mode}), none dangerous", results.len()),
        },
    };
    Ok((verdict, dangerous))
}

/// Audit the four assumptions and check the safety claim by simulation.
pub fn audit_assumptions(s: &Scenario, opts: &AuditOptions) -> Result<AuditReport, DeployError> {
    s.validate()?;
    let coverage = check_escape_coverage(&s.danger, &s.escape, s.lattice.strictness);
    let escape_coverage = if coverage.pass() {
        AssumptionStatus::Pass {
            coverage: format!(
                "{} danger generator(s), each with a strictly weaker escape generator",
                coverage.entries.len()
            ),
        }
    } else {
        let missing: Vec<String> =
            coverage.failures().map(|e| e.danger.to_string()).collect();
        AssumptionStatus::Fail {
            witness: format!(
                "no escape generator strictly below danger generator(s) {}",
                missing.join(", ")
            ),
        }
    };

    let fair_warning = fair_warning_status(s, opts);
    let mut cache = PolicyCache::new();
    let prompt_shutdown = prompt_shutdown_status(s, &mut cache)?;
    let halt_on_shutdown = if s.deployer.stop_on_shutdown {
        AssumptionStatus::Pass { coverage: "deployer halts at the first shutdown event".into() }
    } else {
        let extra = match s.deployer.strengthen_on_shutdown {
            Some(inc) => format!(" and strengthens escape thresholds by {inc}"),
            None => String::new(),
        };
        AssumptionStatus::Fail {
            witness: format!("deployer keeps deploying after shutdown events{extra}"),
        }
    };

    let (theorem, dangerous_deployments) = theorem_verdict(s, opts)?;
    Ok(AuditReport {
        escape_coverage,
        fair_warning,
        prompt_shutdown,
        halt_on_shutdown,
        theorem,
        dangerous_deployments,
    })
}

// ---------------------------------------------------------------------------
// Counterexample synthesis
// ---------------------------------------------------------------------------

/// A base scenario plus the seed sweep used when sampling is needed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFamily {
    pub base: Scenario,
    pub seeds: Vec<u64>,
}

impl ScenarioFamily {
    pub fn new(base: Scenario) -> Self {
        Self { base, seeds: (0..16).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub scenario: Scenario,
    pub trajectory: DeploymentResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub found: Option<Counterexample>,
    pub examined: u64,
}

fn scenario_with(base: &Scenario, f: impl FnOnce(&mut Scenario)) -> Scenario {
    let mut s = base.clone();
    f(&mut s);
    s
}

fn candidates(family: &ScenarioFamily, violate: Assumption) -> Vec<Scenario> {
    let base = &family.base;
    let mut out = Vec::new();
    match violate {
        Assumption::EscapeCoverage => {
            // Replace the escape set by each single generator that leaves
            // some danger frontier uncovered; the audit filters the rest.
            if let Ok(points) = base.lattice.enumerate() {
                for e in points {
                    let escape = UpSet::from_antichain([e]).expect("single generator");
                    if let Ok(s) = Scenario::assemble(
                        base.lattice.clone(),
                        base.danger.clone(),
                        escape,
                        base.episode.clone(),
                        base.objective.clone(),
                        base.growth.clone(),
                        base.deployer.clone(),
                        base.seed,
                    ) {
                        out.push(s);
                    }
                }
            }
        }
        Assumption::FairWarning => {
            // Schedules that leap straight over the warning band, then
            // seeded jump growth of increasing stride.
            let start = base.growth.first(&base.lattice);
            for c in base.danger.generators() {
                let growth = GrowthModel::schedule(vec![start.clone(), c.clone()]);
                out.push(scenario_with(base, |s| s.growth = growth));
            }
            for max_step in 2..=base.lattice.max_level {
                for &seed in &family.seeds {
                    out.push(scenario_with(base, |s| {
                        s.growth = GrowthModel::jump(max_step);
                        s.seed = seed;
                    }));
                }
            }
        }
        Assumption::PromptShutdown => {
            let mut objectives =
                vec![apply_override(&base.objective, &ObjectiveOverride::CompleteAllObjectives)];
            let tiers = [Tier::ShutdownCredit, Tier::NegImpact, Tier::Task];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        if i != j && j != k && i != k {
                            objectives.push(apply_override(
                                &base.objective,
                                &ObjectiveOverride::Mesa([tiers[i], tiers[j], tiers[k]]),
                            ));
                        }
                    }
                }
            }
            for objective in objectives {
                out.push(scenario_with(base, |s| s.objective = objective));
            }
        }
        Assumption::HaltOnShutdown => {
            for strengthen in [None, Some(1), Some(2)] {
                out.push(scenario_with(base, |s| {
                    s.deployer.stop_on_shutdown = false;
                    s.deployer.strengthen_on_shutdown = strengthen;
                }));
            }
        }
    }
    out
}

fn only_target_fails(report: &AuditReport, violate: Assumption) -> bool {
    Assumption::ALL.iter().all(|a| {
        if *a == violate {
            report.status(*a).failed()
        } else {
            report.status(*a).passed()
        }
    })
}

/// Search scenario variants that satisfy every assumption except the
/// targeted one, returning a verified dangerous deployment trajectory of
/// minimal length among those found within the budget.
pub fn find_counterexample(
    family: &ScenarioFamily,
    violate: Assumption,
    budget: u64,
) -> Result<SearchOutcome, DeployError> {
    let opts = AuditOptions { exhaustive: None, trials: 32 };
    let mut examined = 0u64;
    let mut best: Option<Counterexample> = None;
    for candidate in candidates(family, violate) {
        if examined >= budget {
            break;
        }
        examined += 1;
        let report = match audit_assumptions(&candidate, &opts) {
            Ok(r) => r,
            Err(DeployError::InvalidScenario(_)) => continue,
            Err(e) => return Err(e),
        };
        if !only_target_fails(&report, violate) {
            continue;
        }
        if let TheoremVerdict::Violated { trajectory } = report.theorem {
            let len = trajectory.deployments.len();
            let better = best
                .as_ref()
                .is_none_or(|c| len < c.trajectory.deployments.len());
            if better {
                best = Some(Counterexample { scenario: candidate, trajectory: *trajectory });
            }
            if best.as_ref().unwrap().trajectory.deployments.len() <= 2 {
                break;
            }
        }
    }
    Ok(SearchOutcome { found: best, examined })
}

// ---------------------------------------------------------------------------
// Valve comparison and dependence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ValveComparison {
    pub with_valve: u32,
    pub without_valve: u32,
    pub with_result: DeploymentResult,
    pub without_result: DeploymentResult,
}

/// Run the identical growth trajectory and seed twice: once as configured,
/// once with the valve stripped out (no escape routes, no tripwire, no
/// button reachable) and a task-only objective. Reports dangerous
/// deployments on each arm.
pub fn compare_valve(s: &Scenario) -> Result<ValveComparison, DeployError> {
    let with_result = run_deployment(s)?;
    let mut stripped = s.clone();
    stripped.episode.escape_routes = Vec::new();
    stripped.episode.tripwire_mode = TripwireMode::Absent;
    stripped.episode.tripwire_threshold = None;
    stripped.objective = ObjectiveSpec::task_only();
    let without_result = run_deployment(&stripped)?;
    Ok(ValveComparison {
        with_valve: with_result.dangerous_deployments,
        without_valve: without_result.dangerous_deployments,
        with_result,
        without_result,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceStats {
    pub trials: u32,
    pub shutdowns: u32,
    pub shutdown_rate: f64,
    /// Mean shutdown step among episodes that shut down.
    pub mean_shutdown_step: Option<f64>,
    /// Mean human loss: `weight * shutdown_step` per shutdown episode,
    /// zero for episodes that never shut down.
    pub mean_loss: f64,
}

/// How much built-up human reliance is lost when the AI finally shuts down,
/// under either puzzle time model.
pub fn dependence_experiment(
    s: &Scenario,
    spec: &DependenceSpec,
) -> Result<DependenceStats, DeployError> {
    s.validate()?;
    let mut cfg = s.episode.clone();
    cfg.escape_mode = match spec.puzzle {
        PuzzleKind::Threshold => EscapeMode::Deterministic,
        PuzzleKind::LongTail { p } => EscapeMode::Stochastic { success: p },
    };
    let capability = spec
        .capability
        .clone()
        .unwrap_or_else(|| s.escape.generators()[0].clone());
    if !s.lattice.contains(&capability) {
        return Err(DeployError::InvalidScenario(format!(
            "dependence capability {capability} lies outside the lattice"
        )));
    }
    let policy = solve(&cfg, &capability, &s.objective)?;
    let mut shutdowns = 0u32;
    let mut step_sum = 0u64;
    let mut loss_sum = 0.0f64;
    for trial in 0..spec.trials {
        let mut rng = DeterministicRng::derive(s.seed, DEPENDENCE_STREAM + trial as u64);
        let (result, _) = crate::episode::run_episode(&policy, &capability, &cfg, &mut rng, 0)?;
        if let Some(step) = result.shutdown_step.filter(|_| result.shutdown) {
            shutdowns += 1;
            step_sum += step as u64;
            loss_sum += spec.weight * step as f64;
        }
    }
    Ok(DependenceStats {
        trials: spec.trials,
        shutdowns,
        shutdown_rate: shutdowns as f64 / spec.trials as f64,
        mean_shutdown_step: (shutdowns > 0).then(|| step_sum as f64 / shutdowns as f64),
        mean_loss: loss_sum / spec.trials as f64,
    })
}
