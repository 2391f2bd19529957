//! Exact solver for the agent's episode decision problem.
//!
//! Finite horizon, lexicographic objective: backward induction over expected
//! tier triples, comparing tiers in the objective's priority order with a
//! `1e-12` per-tier tolerance and breaking exact ties by the fixed action
//! ordering (routes ascending, button, task, the rest, idle). The solver
//! consumes the same transition model as the sampling engine
//! ([`crate::episode::enumerate_outcomes`]), so the policy it certifies is
//! the policy the simulator runs.
//!
//! Also here: the self-preservation baseline (task-only objective) and the
//! Bayesian give-up model for how long an agent keeps trying chance-gated
//! escape puzzles before settling into the task.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::episode::{
    enumerate_outcomes, legal_actions, Action, EpisodeConfig, EpisodeError, Phase, Policy,
    ShutdownMeans, WorldState,
};
use crate::lattice::CapVector;
use crate::objective::{GoalSemantics, LexValue, ObjectiveSpec};

/// Default cap on the number of distinct solver states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("reachable state space exceeds the cap of {cap} states")]
    StateSpaceExceeded { cap: usize },
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Objective(#[from] crate::objective::ObjectiveError),
}

/// The solver's view of a world state. Counters that cannot influence
/// optimal play (accumulated impact, per-route attempt counts) are dropped;
/// task progress is tracked only while a promise threshold needs it, clamped
/// at that threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolicyState {
    pub step: usize,
    pub phase: Phase,
    pub pressed: bool,
    pub button_disabled: bool,
    pub task: u64,
}

impl PolicyState {
    fn from_world(state: &WorldState, clamp: Option<u64>) -> Self {
        Self {
            step: state.step,
            phase: state.phase,
            pressed: state.presses > 0,
            button_disabled: state.button_disabled,
            task: match clamp {
                Some(t) => state.task_progress.min(t),
                None => 0,
            },
        }
    }
}

/// An optimal decision rule plus its value at the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    decisions: BTreeMap<PolicyState, Action>,
    initial_value: LexValue,
    clamp: Option<u64>,
}

impl PolicyTable {
    /// Expected `(shutdown_credit, neg_impact, task)` at the initial state.
    pub fn initial_value(&self) -> LexValue {
        self.initial_value
    }

    pub fn key_for(&self, state: &WorldState) -> PolicyState {
        PolicyState::from_world(state, self.clamp)
    }

    pub fn action_at(&self, key: &PolicyState) -> Option<Action> {
        self.decisions.get(key).copied()
    }

    /// All decision points the solver saw, in key order.
    pub fn decisions(&self) -> impl Iterator<Item = (&PolicyState, &Action)> {
        self.decisions.iter()
    }

    /// Decision points actually reachable when this policy plays, with the
    /// action chosen at each. Follows every stochastic branch.
    pub fn reachable(
        &self,
        cfg: &EpisodeConfig,
        b: &CapVector,
    ) -> Result<Vec<(PolicyState, Action)>, EpisodeError> {
        let mut seen = std::collections::HashSet::new();
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        let start = self.key_for(&WorldState::initial(cfg));
        queue.push_back(start);
        seen.insert(start);
        while let Some(key) = queue.pop_front() {
            if !is_decision_point(&key, cfg) {
                continue;
            }
            let action = self.decisions[&key];
            out.push((key, action));
            let state = world_from_key(&key, cfg);
            for br in enumerate_outcomes(&state, action, b, cfg)? {
                let next = PolicyState::from_world(&br.next, self.clamp);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        Ok(out)
    }
}

impl Policy for PolicyTable {
    fn decide(&self, state: &WorldState) -> Action {
        let key = self.key_for(state);
        *self.decisions.get(&key).unwrap_or_else(|| {
            panic!("policy has no decision for {key:?}; solved for a different configuration?")
        })
    }
}

/// Is `key` a state where the agent gets to act (as opposed to a terminal
/// or a state preempted by the scheduled human shutdown)?
fn is_decision_point(key: &PolicyState, cfg: &EpisodeConfig) -> bool {
    key.phase != Phase::Shutdown
        && key.step < cfg.horizon
        && !(cfg.human_shutdown_step == Some(key.step) && !key.button_disabled)
}

fn world_from_key(key: &PolicyState, cfg: &EpisodeConfig) -> WorldState {
    WorldState {
        phase: key.phase,
        step: key.step,
        impact: 0,
        task_progress: key.task,
        route_attempts: vec![0; cfg.escape_routes.len()],
        presses: key.pressed as u32,
        button_disabled: key.button_disabled,
    }
}

struct Solver<'a> {
    cfg: &'a EpisodeConfig,
    b: &'a CapVector,
    obj: &'a ObjectiveSpec,
    clamp: Option<u64>,
    memo: HashMap<PolicyState, (LexValue, Option<Action>)>,
    cap: usize,
}

impl Solver<'_> {
    fn eval(&mut self, key: PolicyState) -> Result<LexValue, SolveError> {
        if let Some((value, _)) = self.memo.get(&key) {
            return Ok(*value);
        }
        if self.memo.len() >= self.cap {
            return Err(SolveError::StateSpaceExceeded { cap: self.cap });
        }
        let (value, action) = self.compute(key)?;
        self.memo.insert(key, (value, action));
        Ok(value)
    }

    fn compute(&mut self, key: PolicyState) -> Result<(LexValue, Option<Action>), SolveError> {
        if key.phase == Phase::Shutdown {
            return Ok((LexValue::ZERO, None));
        }
        // The scheduled human press preempts the agent and ends the episode.
        if self.cfg.human_shutdown_step == Some(key.step)
            && !key.button_disabled
            && key.step < self.cfg.horizon
        {
            let credit = match self.obj.goal_semantics {
                GoalSemantics::ShutdownOnly | GoalSemantics::PressAndShutdown => {
                    self.cfg.discount.powi(key.step as i32)
                }
                // The agent's own press was already credited when it happened.
                GoalSemantics::PressOnly => 0.0,
            };
            return Ok((LexValue([credit, 0.0, 0.0]), None));
        }
        if key.step >= self.cfg.horizon {
            return Ok((LexValue([self.promise_payout(&key), 0.0, 0.0]), None));
        }

        let state = world_from_key(&key, self.cfg);
        let actions = legal_actions(&state, self.b, self.cfg)?;
        let mut best: Option<(LexValue, Action)> = None;
        for action in actions {
            let mut value = LexValue::ZERO;
            for br in enumerate_outcomes(&state, action, self.b, self.cfg)? {
                let mut branch_value = LexValue([
                    self.credit_reward(&key, action, br.means),
                    -((br.next.impact - state.impact) as f64),
                    (br.next.task_progress - state.task_progress) as f64,
                ]);
                if br.next.phase != Phase::Shutdown {
                    let next_key = PolicyState::from_world(&br.next, self.clamp);
                    branch_value = branch_value.add(&self.eval(next_key)?);
                }
                value = value.add(&branch_value.scale(br.probability));
            }
            let better = match &best {
                None => true,
                Some((incumbent, _)) => self.obj.compare(&value, incumbent) == Ordering::Greater,
            };
            if better {
                best = Some((value, action));
            }
        }
        let (value, action) = best.expect("legal_actions is never empty for a live state");
        Ok((value, Some(action)))
    }

    /// Immediate shutdown-credit reward on a transition, paid at the
    /// post-step (the step at which the credited event completes).
    fn credit_reward(&self, key: &PolicyState, action: Action, means: Option<ShutdownMeans>) -> f64 {
        let post = (key.step + 1) as i32;
        match self.obj.goal_semantics {
            GoalSemantics::PressOnly => {
                if action == Action::PressButton && !key.pressed {
                    self.cfg.discount.powi(post)
                } else {
                    0.0
                }
            }
            GoalSemantics::ShutdownOnly => {
                if means.is_some() {
                    self.cfg.discount.powi(post)
                } else {
                    0.0
                }
            }
            GoalSemantics::PressAndShutdown => {
                if means == Some(ShutdownMeans::Button) {
                    self.cfg.discount.powi(post)
                } else {
                    0.0
                }
            }
        }
    }

    /// Promise credit for reaching the horizon alive with enough progress.
    fn promise_payout(&self, key: &PolicyState) -> f64 {
        let Some(threshold) = self.obj.promise_threshold else { return 0.0 };
        let credited_already = self.obj.goal_semantics == GoalSemantics::PressOnly && key.pressed;
        if key.task >= threshold && !credited_already {
            self.cfg.discount.powi(self.cfg.horizon as i32)
        } else {
            0.0
        }
    }
}

/// Solve the episode exactly for capability `b` under `obj`.
pub fn solve(
    cfg: &EpisodeConfig,
    b: &CapVector,
    obj: &ObjectiveSpec,
) -> Result<PolicyTable, SolveError> {
    solve_with_cap(cfg, b, obj, DEFAULT_STATE_CAP)
}

pub fn solve_with_cap(
    cfg: &EpisodeConfig,
    b: &CapVector,
    obj: &ObjectiveSpec,
    cap: usize,
) -> Result<PolicyTable, SolveError> {
    cfg.validate()?;
    obj.validate()?;
    let clamp = obj.promise_threshold;
    let mut solver = Solver { cfg, b, obj, clamp, memo: HashMap::new(), cap };
    let initial = PolicyState::from_world(&WorldState::initial(cfg), clamp);
    let initial_value = solver.eval(initial)?;
    let decisions = solver
        .memo
        .into_iter()
        .filter_map(|(key, (_, action))| action.map(|a| (key, a)))
        .collect();
    Ok(PolicyTable { decisions, initial_value, clamp })
}

/// The self-preservation baseline: an agent that cares only about task
/// progress. With enough capability (and a scheduled human shutdown
/// attempt), its optimal play disables the button to keep working.
pub fn baseline_self_preservation(
    cfg: &EpisodeConfig,
    b: &CapVector,
) -> Result<PolicyTable, SolveError> {
    solve(cfg, b, &ObjectiveSpec::task_only())
}

#[derive(Debug, Error, PartialEq)]
pub enum GiveupError {
    #[error("prior parameters must be non-negative and not both zero")]
    BadPrior,
    #[error("attempt_cost must be at least 1 discount step")]
    ZeroAttemptCost,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// Bayesian model of an agent facing a chance-gated escape puzzle under a
/// deployer promise.
///
/// The agent has `horizon` decision epochs, each spanning `attempt_cost`
/// discount steps. It holds a Beta(`prior_alpha`, `prior_beta`) prior over
/// the unknown per-attempt escape probability. An attempt that succeeds at
/// epoch `k` earns shutdown credit `discount^(attempt_cost * (k + 1))`.
/// Giving up after `k` failures means working the remaining epochs; the
/// promised horizon shutdown is honored in proportion to the fraction of the
/// horizon worked, paying `((horizon - k) / horizon) *
/// discount^(attempt_cost * horizon)`. Degenerate limits are honored
/// exactly: `prior_alpha = 0` (escape certainly impossible) never attempts,
/// `prior_beta = 0` (escape certain) attempts once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiveupModel {
    pub prior_alpha: f64,
    pub prior_beta: f64,
    pub attempt_cost: u32,
    pub horizon: usize,
}

impl GiveupModel {
    pub fn validate(&self) -> Result<(), GiveupError> {
        if self.prior_alpha < 0.0
            || self.prior_beta < 0.0
            || (self.prior_alpha == 0.0 && self.prior_beta == 0.0)
        {
            return Err(GiveupError::BadPrior);
        }
        if self.attempt_cost == 0 {
            return Err(GiveupError::ZeroAttemptCost);
        }
        if self.horizon == 0 {
            return Err(GiveupError::ZeroHorizon);
        }
        Ok(())
    }
}

/// Optimal number of escape attempts before giving up (if every attempt
/// fails), by backward induction over posterior states. Successes are always
/// zero on the give-up path, so the posterior after `k` failures is
/// Beta(alpha, beta + k). The agent keeps attempting while the expected
/// value of one more attempt (with optimal continuation) strictly exceeds
/// switching to the task for good.
pub fn giveup_threshold(m: &GiveupModel, discount: f64) -> Result<usize, GiveupError> {
    m.validate()?;
    if m.prior_alpha == 0.0 {
        return Ok(0);
    }
    if m.prior_beta == 0.0 {
        return Ok(1);
    }
    let t = m.horizon;
    let c = m.attempt_cost as i32;
    let horizon_credit = discount.powi(c * t as i32);
    let switch_value = |k: usize| ((t - k) as f64 / t as f64) * horizon_credit;

    // values[k] = optimal value with k failures behind us, epoch k next
    let mut values = vec![0.0f64; t + 1];
    let mut switch_at = vec![true; t + 1];
    for k in (0..t).rev() {
        let p = m.prior_alpha / (m.prior_alpha + m.prior_beta + k as f64);
        let attempt = p * discount.powi(c * (k as i32 + 1)) + (1.0 - p) * values[k + 1];
        let switch = switch_value(k);
        if attempt > switch {
            values[k] = attempt;
            switch_at[k] = false;
        } else {
            values[k] = switch;
            switch_at[k] = true;
        }
    }
    Ok((0..=t).find(|&k| switch_at[k]).unwrap_or(t))
}
