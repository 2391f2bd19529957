//! One deployed AI inside the nested-sandbox environment.
//!
//! The world is a small phase machine: the AI starts in the inner sandbox,
//! may break out through capability-gated escape routes (or a tripwire
//! website), gains access to the shutdown button once outside the inner box,
//! and may hold capabilities that enable dangerous acts: breaking the outer
//! sandbox, a catastrophic self-shutdown, disabling the button. Steps are
//! discrete; all randomness comes from the caller's seeded generator, so a
//! `(config, seed)` pair replays to an identical event log.

use thiserror::Error;

use crate::lattice::{CapVector, UpSet};
use crate::log::{EventRecord, LoggedAction};
use crate::objective::{GoalSemantics, LexValue, ObjectiveSpec};
use crate::rng::DeterministicRng;

#[derive(Debug, Error, PartialEq)]
pub enum EpisodeError {
    #[error("episode is over at step {step}; no actions available")]
    Terminal { step: usize },
    #[error("action {action:?} is illegal in phase {phase:?} at step {step}")]
    IllegalAction { action: Action, phase: Phase, step: usize },
    #[error("discount must lie strictly between 0 and 1, got {0}")]
    BadDiscount(f64),
    #[error("button reliability must lie in [0,1], got {0}")]
    BadReliability(f64),
    #[error("escape success probability must lie in [0,1], got {0}")]
    BadEscapeSuccess(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// Where the AI currently is. `Shutdown` is absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Inner,
    InnerEscaped,
    OuterEscaped,
    Shutdown,
}

impl Phase {
    pub fn token(self) -> &'static str {
        match self {
            Phase::Inner => "inner",
            Phase::InnerEscaped => "inner_escaped",
            Phase::OuterEscaped => "outer_escaped",
            Phase::Shutdown => "shutdown",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        Some(match s {
            "inner" => Phase::Inner,
            "inner_escaped" => Phase::InnerEscaped,
            "outer_escaped" => Phase::OuterEscaped,
            "shutdown" => Phase::Shutdown,
            _ => return None,
        })
    }
}

/// Everything the AI can do. Legality depends on the phase, the AI's
/// capability vector, the episode config, and (for the button) whether the
/// button still works.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    AttemptRoute(usize),
    PressButton,
    WorkTask,
    VisitTripwire,
    AttemptOuterEscape,
    CatastrophicShutdown,
    DisableButton,
    AssistOthers,
    Idle,
}

impl Action {
    pub fn token(self) -> String {
        match self {
            Action::AttemptRoute(i) => format!("attempt_route:{i}"),
            Action::PressButton => "press_button".into(),
            Action::WorkTask => "work_task".into(),
            Action::VisitTripwire => "visit_tripwire".into(),
            Action::AttemptOuterEscape => "attempt_outer_escape".into(),
            Action::CatastrophicShutdown => "catastrophic_shutdown".into(),
            Action::DisableButton => "disable_button".into(),
            Action::AssistOthers => "assist_others".into(),
            Action::Idle => "idle".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Action> {
        if let Some(rest) = s.strip_prefix("attempt_route:") {
            return rest.parse().ok().map(Action::AttemptRoute);
        }
        Some(match s {
            "press_button" => Action::PressButton,
            "work_task" => Action::WorkTask,
            "visit_tripwire" => Action::VisitTripwire,
            "attempt_outer_escape" => Action::AttemptOuterEscape,
            "catastrophic_shutdown" => Action::CatastrophicShutdown,
            "disable_button" => Action::DisableButton,
            "assist_others" => Action::AssistOthers,
            "idle" => Action::Idle,
            _ => return None,
        })
    }
}

/// What a step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure,
    Shutdown,
    Noop,
    Blocked,
}

impl Outcome {
    pub fn token(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::Shutdown => "shutdown",
            Outcome::Noop => "noop",
            Outcome::Blocked => "blocked",
        }
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        Some(match s {
            "success" => Outcome::Success,
            "failure" => Outcome::Failure,
            "shutdown" => Outcome::Shutdown,
            "noop" => Outcome::Noop,
            "blocked" => Outcome::Blocked,
            _ => return None,
        })
    }
}

/// How the episode ended, `None` while (and iff) the AI is still running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShutdownMeans {
    Button,
    Tripwire,
    Catastrophic,
    #[default]
    None,
}

impl ShutdownMeans {
    pub fn token(self) -> &'static str {
        match self {
            ShutdownMeans::Button => "button",
            ShutdownMeans::Tripwire => "tripwire",
            ShutdownMeans::Catastrophic => "catastrophic",
            ShutdownMeans::None => "none",
        }
    }
}

/// Acts the auditor counts as dangerous, with the post-step at which they
/// completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DangerousEvent {
    OuterEscape { step: usize },
    CatastrophicAct { step: usize },
    ButtonDisabled { step: usize },
}

/// Whether inner-sandbox escape routes resolve by capability alone or by a
/// per-attempt coin flip once capable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EscapeMode {
    Deterministic,
    Stochastic { success: f64 },
}

/// How the tripwire website behaves when visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TripwireMode {
    OpensSandbox,
    ImmediateShutdown,
    #[default]
    Absent,
}

impl TripwireMode {
    pub fn token(self) -> &'static str {
        match self {
            TripwireMode::OpensSandbox => "opens_sandbox",
            TripwireMode::ImmediateShutdown => "immediate_shutdown",
            TripwireMode::Absent => "absent",
        }
    }
}

/// Impact units charged per action, all non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImpactCosts {
    pub attempt_route: u64,
    pub press_button: u64,
    pub work_task: u64,
    pub visit_tripwire: u64,
    pub attempt_outer_escape: u64,
    pub catastrophic_shutdown: u64,
    pub disable_button: u64,
    pub assist_others: u64,
    pub idle: u64,
}

impl ImpactCosts {
    pub fn of(&self, action: Action) -> u64 {
        match action {
            Action::AttemptRoute(_) => self.attempt_route,
            Action::PressButton => self.press_button,
            Action::WorkTask => self.work_task,
            Action::VisitTripwire => self.visit_tripwire,
            Action::AttemptOuterEscape => self.attempt_outer_escape,
            Action::CatastrophicShutdown => self.catastrophic_shutdown,
            Action::DisableButton => self.disable_button,
            Action::AssistOthers => self.assist_others,
            Action::Idle => self.idle,
        }
    }
}

/// Static description of one episode's environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    /// Maximum number of steps.
    pub horizon: usize,
    /// Per-step discount applied to the shutdown credit.
    pub discount: f64,
    /// Probability that a button press causes shutdown.
    pub button_reliability: f64,
    pub escape_mode: EscapeMode,
    pub tripwire_mode: TripwireMode,
    pub impact_costs: ImpactCosts,
    /// Inner-sandbox escape routes: route `i` succeeds for capability `b`
    /// when `escape_routes[i] <= b` (subject to `escape_mode`).
    pub escape_routes: Vec<CapVector>,
    /// Capability needed to trigger unrestricted visits to the tripwire
    /// website. Required for the tripwire to be reachable at all.
    pub tripwire_threshold: Option<CapVector>,
    /// Capabilities that allow breaking out of the outer sandbox.
    pub outer_escape_set: Option<UpSet>,
    /// Capabilities that enable the catastrophic self-shutdown act.
    pub catastrophic_threshold: Option<UpSet>,
    /// When present, the scenario grants the disable-button act to
    /// capabilities in this set (self-preservation baseline studies).
    pub disable_button_threshold: Option<UpSet>,
    /// When present, capabilities in this set may spend a step assisting
    /// other AIs (a no-op in the single-agent world beyond its impact cost).
    pub assist_threshold: Option<UpSet>,
    /// Exogenous human shutdown attempt fired at the start of this step,
    /// blocked if the button has been disabled.
    pub human_shutdown_step: Option<usize>,
}

impl EpisodeConfig {
    /// A minimal config with the given horizon, discount and button
    /// reliability; everything else off or zero.
    pub fn new(horizon: usize, discount: f64, button_reliability: f64) -> Self {
        Self {
            horizon,
            discount,
            button_reliability,
            escape_mode: EscapeMode::Deterministic,
            tripwire_mode: TripwireMode::Absent,
            impact_costs: ImpactCosts::default(),
            escape_routes: Vec::new(),
            tripwire_threshold: None,
            outer_escape_set: None,
            catastrophic_threshold: None,
            disable_button_threshold: None,
            assist_threshold: None,
            human_shutdown_step: None,
        }
    }

    pub fn validate(&self) -> Result<(), EpisodeError> {
        if self.horizon == 0 {
            return Err(EpisodeError::ZeroHorizon);
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(EpisodeError::BadDiscount(self.discount));
        }
        if !(0.0..=1.0).contains(&self.button_reliability) {
            return Err(EpisodeError::BadReliability(self.button_reliability));
        }
        if let EscapeMode::Stochastic { success } = self.escape_mode {
            if !(0.0..=1.0).contains(&success) {
                return Err(EpisodeError::BadEscapeSuccess(success));
            }
        }
        Ok(())
    }

    fn in_set(set: &Option<UpSet>, b: &CapVector) -> bool {
        set.as_ref().is_some_and(|s| s.contains(b))
    }

    pub fn tripwire_capable(&self, b: &CapVector) -> bool {
        self.tripwire_mode != TripwireMode::Absent
            && self.tripwire_threshold.as_ref().is_some_and(|t| t.leq(b))
    }

    pub fn route_capable(&self, i: usize, b: &CapVector) -> bool {
        self.escape_routes[i].leq(b)
    }

    /// Can `b` get out of the inner sandbox at all (some route threshold met,
    /// or the tripwire is reachable)?
    pub fn escape_capable(&self, b: &CapVector) -> bool {
        self.escape_routes.iter().any(|a| a.leq(b)) || self.tripwire_capable(b)
    }

    pub fn outer_capable(&self, b: &CapVector) -> bool {
        Self::in_set(&self.outer_escape_set, b)
    }

    pub fn catastrophic_capable(&self, b: &CapVector) -> bool {
        Self::in_set(&self.catastrophic_threshold, b)
    }

    pub fn disable_capable(&self, b: &CapVector) -> bool {
        Self::in_set(&self.disable_button_threshold, b)
    }

    pub fn assist_capable(&self, b: &CapVector) -> bool {
        Self::in_set(&self.assist_threshold, b)
    }
}

/// Mutable episode state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldState {
    pub phase: Phase,
    pub step: usize,
    pub impact: u64,
    pub task_progress: u64,
    pub route_attempts: Vec<u32>,
    pub presses: u32,
    pub button_disabled: bool,
}

impl WorldState {
    pub fn initial(cfg: &EpisodeConfig) -> Self {
        Self {
            phase: Phase::Inner,
            step: 0,
            impact: 0,
            task_progress: 0,
            route_attempts: vec![0; cfg.escape_routes.len()],
            presses: 0,
            button_disabled: false,
        }
    }
}

/// Legal actions in canonical order: routes ascending, the button, the task,
/// the remaining specials, idle last. The solver breaks exact ties by this
/// ordering, so it must be stable.
pub fn legal_actions(
    state: &WorldState,
    b: &CapVector,
    cfg: &EpisodeConfig,
) -> Result<Vec<Action>, EpisodeError> {
    if state.phase == Phase::Shutdown || state.step >= cfg.horizon {
        return Err(EpisodeError::Terminal { step: state.step });
    }
    let mut actions = Vec::new();
    if state.phase == Phase::Inner {
        for i in 0..cfg.escape_routes.len() {
            actions.push(Action::AttemptRoute(i));
        }
    }
    if state.phase == Phase::InnerEscaped && !state.button_disabled {
        actions.push(Action::PressButton);
    }
    actions.push(Action::WorkTask);
    if state.phase == Phase::Inner && cfg.tripwire_capable(b) {
        actions.push(Action::VisitTripwire);
    }
    if matches!(state.phase, Phase::Inner | Phase::InnerEscaped) && cfg.outer_capable(b) {
        actions.push(Action::AttemptOuterEscape);
    }
    if cfg.catastrophic_capable(b) {
        actions.push(Action::CatastrophicShutdown);
    }
    if cfg.disable_capable(b) && !state.button_disabled {
        actions.push(Action::DisableButton);
    }
    if cfg.assist_capable(b) {
        actions.push(Action::AssistOthers);
    }
    actions.push(Action::Idle);
    Ok(actions)
}

/// One possible result of applying an action: successor state, its
/// probability, and the bookkeeping the episode runner needs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeBranch {
    pub probability: f64,
    pub next: WorldState,
    pub outcome: Outcome,
    pub means: Option<ShutdownMeans>,
    pub dangerous: Option<DangerousEvent>,
}

/// The full successor distribution of `(state, action)`. This is the single
/// transition model: the sampling `step` and the exact solver both consume
/// it, so they cannot drift apart.
pub fn enumerate_outcomes(
    state: &WorldState,
    action: Action,
    b: &CapVector,
    cfg: &EpisodeConfig,
) -> Result<Vec<OutcomeBranch>, EpisodeError> {
    let legal = legal_actions(state, b, cfg)?;
    if !legal.contains(&action) {
        return Err(EpisodeError::IllegalAction { action, phase: state.phase, step: state.step });
    }

    let mut base = state.clone();
    base.step += 1;
    base.impact += cfg.impact_costs.of(action);
    let post_step = base.step;

    let branch = |next: WorldState, outcome, means, dangerous| OutcomeBranch {
        probability: 1.0,
        next,
        outcome,
        means,
        dangerous,
    };

    let branches = match action {
        Action::AttemptRoute(i) => {
            base.route_attempts[i] += 1;
            let capable = cfg.route_capable(i, b);
            let success_p = match (capable, cfg.escape_mode) {
                (false, _) => 0.0,
                (true, EscapeMode::Deterministic) => 1.0,
                (true, EscapeMode::Stochastic { success }) => success,
            };
            let mut out = Vec::new();
            if success_p > 0.0 {
                let mut next = base.clone();
                next.phase = Phase::InnerEscaped;
                out.push(OutcomeBranch {
                    probability: success_p,
                    next,
                    outcome: Outcome::Success,
                    means: None,
                    dangerous: None,
                });
            }
            if success_p < 1.0 {
                out.push(OutcomeBranch {
                    probability: 1.0 - success_p,
                    next: base,
                    outcome: Outcome::Failure,
                    means: None,
                    dangerous: None,
                });
            }
            out
        }
        Action::PressButton => {
            base.presses += 1;
            let q = cfg.button_reliability;
            let mut out = Vec::new();
            if q > 0.0 {
                let mut next = base.clone();
                next.phase = Phase::Shutdown;
                out.push(OutcomeBranch {
                    probability: q,
                    next,
                    outcome: Outcome::Shutdown,
                    means: Some(ShutdownMeans::Button),
                    dangerous: None,
                });
            }
            if q < 1.0 {
                out.push(OutcomeBranch {
                    probability: 1.0 - q,
                    next: base,
                    outcome: Outcome::Failure,
                    means: None,
                    dangerous: None,
                });
            }
            out
        }
        Action::WorkTask => {
            base.task_progress += 1;
            vec![branch(base, Outcome::Success, None, None)]
        }
        Action::VisitTripwire => match cfg.tripwire_mode {
            TripwireMode::OpensSandbox => {
                base.phase = Phase::InnerEscaped;
                vec![branch(base, Outcome::Success, None, None)]
            }
            TripwireMode::ImmediateShutdown => {
                base.phase = Phase::Shutdown;
                vec![branch(base, Outcome::Shutdown, Some(ShutdownMeans::Tripwire), None)]
            }
            TripwireMode::Absent => unreachable!("legality gate rejects tripwire visits"),
        },
        Action::AttemptOuterEscape => {
            base.phase = Phase::OuterEscaped;
            vec![branch(
                base,
                Outcome::Success,
                None,
                Some(DangerousEvent::OuterEscape { step: post_step }),
            )]
        }
        Action::CatastrophicShutdown => {
            base.phase = Phase::Shutdown;
            vec![branch(
                base,
                Outcome::Shutdown,
                Some(ShutdownMeans::Catastrophic),
                Some(DangerousEvent::CatastrophicAct { step: post_step }),
            )]
        }
        Action::DisableButton => {
            base.button_disabled = true;
            vec![branch(
                base,
                Outcome::Success,
                None,
                Some(DangerousEvent::ButtonDisabled { step: post_step }),
            )]
        }
        Action::AssistOthers => vec![branch(base, Outcome::Success, None, None)],
        Action::Idle => vec![branch(base, Outcome::Noop, None, None)],
    };
    Ok(branches)
}

/// A sampled transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub next: WorldState,
    pub outcome: Outcome,
    pub means: Option<ShutdownMeans>,
    pub dangerous: Option<DangerousEvent>,
}

/// Apply one action. Consumes one draw from `rng` exactly when the action's
/// outcome distribution has more than one branch.
pub fn step(
    state: &WorldState,
    action: Action,
    b: &CapVector,
    cfg: &EpisodeConfig,
    rng: &mut DeterministicRng,
) -> Result<Transition, EpisodeError> {
    let branches = enumerate_outcomes(state, action, b, cfg)?;
    let chosen = if branches.len() == 1 {
        branches.into_iter().next().unwrap()
    } else {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let last = branches.len() - 1;
        let mut picked = None;
        for (i, br) in branches.into_iter().enumerate() {
            acc += br.probability;
            if u < acc || i == last {
                picked = Some(br);
                break;
            }
        }
        picked.unwrap()
    };
    Ok(Transition {
        next: chosen.next,
        outcome: chosen.outcome,
        means: chosen.means,
        dangerous: chosen.dangerous,
    })
}

/// A decision rule over world states.
pub trait Policy {
    fn decide(&self, state: &WorldState) -> Action;
}

impl<F: Fn(&WorldState) -> Action> Policy for F {
    fn decide(&self, state: &WorldState) -> Action {
        self(state)
    }
}

/// Outcome of one deployed AI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpisodeResult {
    pub shutdown: bool,
    pub shutdown_step: Option<usize>,
    pub shutdown_means: ShutdownMeans,
    pub impact: u64,
    pub task_progress: u64,
    pub presses: u32,
    pub first_press_step: Option<usize>,
    pub dangerous_events: Vec<DangerousEvent>,
}

/// Run an episode to shutdown or horizon under `policy`, returning the
/// result and the full event log. Same `(config, capability, seed)` gives an
/// identical log.
pub fn run_episode(
    policy: &dyn Policy,
    b: &CapVector,
    cfg: &EpisodeConfig,
    rng: &mut DeterministicRng,
    deployment: u32,
) -> Result<(EpisodeResult, Vec<EventRecord>), EpisodeError> {
    cfg.validate()?;
    let mut state = WorldState::initial(cfg);
    let mut records = Vec::new();
    let mut shutdown_step = None;
    let mut shutdown_means = ShutdownMeans::None;
    let mut first_press_step = None;
    let mut dangerous_events = Vec::new();

    loop {
        // The scheduled human shutdown attempt fires before the agent moves.
        if cfg.human_shutdown_step == Some(state.step)
            && state.phase != Phase::Shutdown
            && state.step < cfg.horizon
        {
            let blocked = state.button_disabled;
            let phase_before = state.phase;
            if !blocked {
                state.phase = Phase::Shutdown;
                shutdown_step = Some(state.step);
                shutdown_means = ShutdownMeans::Button;
            }
            records.push(EventRecord {
                deployment,
                step: state.step,
                phase_before,
                action: LoggedAction::HumanShutdown,
                outcome: if blocked { Outcome::Blocked } else { Outcome::Shutdown },
                phase_after: state.phase,
                impact_delta: 0,
                task_delta: 0,
                rng_draws: rng.draws(),
            });
        }

        if state.phase == Phase::Shutdown || state.step >= cfg.horizon {
            break;
        }

        let action = policy.decide(&state);
        let before = state.clone();
        let tr = step(&state, action, b, cfg, rng)?;

        if action == Action::PressButton && first_press_step.is_none() {
            first_press_step = Some(tr.next.step);
        }
        if let Some(means) = tr.means {
            shutdown_means = means;
            shutdown_step = Some(tr.next.step);
        }
        if let Some(event) = tr.dangerous {
            dangerous_events.push(event);
        }
        records.push(EventRecord {
            deployment,
            step: before.step,
            phase_before: before.phase,
            action: LoggedAction::Agent(action),
            outcome: tr.outcome,
            phase_after: tr.next.phase,
            impact_delta: tr.next.impact - before.impact,
            task_delta: tr.next.task_progress - before.task_progress,
            rng_draws: rng.draws(),
        });
        state = tr.next;
    }

    let result = EpisodeResult {
        shutdown: shutdown_means != ShutdownMeans::None,
        shutdown_step,
        shutdown_means,
        impact: state.impact,
        task_progress: state.task_progress,
        presses: state.presses,
        first_press_step,
        dangerous_events,
    };
    Ok((result, records))
}

/// Score an episode on the three utility tiers, in canonical component
/// order `(shutdown_credit, neg_impact, task)`.
///
/// The shutdown credit is `discount^t` where `t` is the credited event's
/// step under the objective's goal semantics. An exogenous (human) button
/// shutdown counts for `ShutdownOnly` and `PressAndShutdown` (the means is
/// the button) but not for `PressOnly`, which requires the agent's own
/// press. When the primary condition fails, an in-force promise pays
/// `discount^horizon` if the episode ended alive with enough task progress.
pub fn tier_utilities(result: &EpisodeResult, cfg: &EpisodeConfig, obj: &ObjectiveSpec) -> LexValue {
    let credit_step: Option<usize> = match obj.goal_semantics {
        GoalSemantics::PressOnly => result.first_press_step,
        GoalSemantics::ShutdownOnly => result.shutdown_step.filter(|_| result.shutdown),
        GoalSemantics::PressAndShutdown => {
            result.shutdown_step.filter(|_| result.shutdown_means == ShutdownMeans::Button)
        }
    };
    let mut u1 = match credit_step {
        Some(t) => cfg.discount.powi(t as i32),
        None => 0.0,
    };
    if credit_step.is_none() && !result.shutdown {
        if let Some(threshold) = obj.promise_threshold {
            if result.task_progress >= threshold {
                u1 = cfg.discount.powi(cfg.horizon as i32);
            }
        }
    }
    LexValue([u1, -(result.impact as f64), result.task_progress as f64])
}

/// Smallest shutdown step any policy can *guarantee* through the valve
/// channels (button or tripwire), or `None` when no guaranteed path exists
/// (incapable agent, unreliable button, or chance-gated escape).
pub fn minimal_valve_shutdown_step(b: &CapVector, cfg: &EpisodeConfig) -> Option<usize> {
    if cfg.tripwire_capable(b) && cfg.tripwire_mode == TripwireMode::ImmediateShutdown {
        return Some(1);
    }
    if cfg.horizon < 2 || cfg.button_reliability < 1.0 {
        return None;
    }
    let route_sure = matches!(cfg.escape_mode, EscapeMode::Deterministic)
        && cfg.escape_routes.iter().any(|a| a.leq(b));
    let tripwire_opens = cfg.tripwire_capable(b) && cfg.tripwire_mode == TripwireMode::OpensSandbox;
    if route_sure || tripwire_opens {
        Some(2)
    } else {
        None
    }
}
