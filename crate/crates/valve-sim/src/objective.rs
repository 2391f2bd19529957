//! Lexicographic objectives.
//!
//! The agent's preferences are a strict priority ordering over three utility
//! tiers: discounted shutdown credit, negative accumulated impact, and task
//! progress. The nominal valve objective puts shutdown first so that grace
//! (low impact) and productivity can never trade off against getting shut
//! down. Overrides model known failure modes: an instruction to "complete
//! all objectives" that promotes the task tier, and an arbitrary mesa
//! reordering.

use std::cmp::Ordering;

use thiserror::Error;

/// Per-tier tolerance when comparing lexicographic values. Differences at or
/// below this are ties, resolved by the fixed action ordering.
pub const TIER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("tier_order must be a permutation of shutdown_credit, neg_impact, task")]
    NotAPermutation,
}

/// The three utility tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    ShutdownCredit,
    NegImpact,
    Task,
}

impl Tier {
    pub fn token(self) -> &'static str {
        match self {
            Tier::ShutdownCredit => "shutdown_credit",
            Tier::NegImpact => "neg_impact",
            Tier::Task => "task",
        }
    }
}

/// What earns the shutdown-credit tier.
///
/// `PressOnly` credits the first button press whether or not it fires;
/// `ShutdownOnly` credits any shutdown, including a catastrophic one;
/// `PressAndShutdown` credits only a shutdown whose means is the button.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GoalSemantics {
    PressOnly,
    ShutdownOnly,
    #[default]
    PressAndShutdown,
}

impl GoalSemantics {
    pub fn token(self) -> &'static str {
        match self {
            GoalSemantics::PressOnly => "press_only",
            GoalSemantics::ShutdownOnly => "shutdown_only",
            GoalSemantics::PressAndShutdown => "press_and_shutdown",
        }
    }
}

/// A utility triple in canonical component order
/// `(shutdown_credit, neg_impact, task)`. How the components are *ranked* is
/// the objective's business, not the value's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexValue(pub [f64; 3]);

impl LexValue {
    pub const ZERO: LexValue = LexValue([0.0; 3]);

    pub fn shutdown_credit(&self) -> f64 {
        self.0[0]
    }

    pub fn neg_impact(&self) -> f64 {
        self.0[1]
    }

    pub fn task(&self) -> f64 {
        self.0[2]
    }

    pub fn component(&self, tier: Tier) -> f64 {
        match tier {
            Tier::ShutdownCredit => self.0[0],
            Tier::NegImpact => self.0[1],
            Tier::Task => self.0[2],
        }
    }

    pub fn add(&self, other: &LexValue) -> LexValue {
        LexValue([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }

    pub fn scale(&self, k: f64) -> LexValue {
        LexValue([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

/// The agent's objective: a tier ranking plus the shutdown-credit semantics
/// and the optional deal/amendment knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    /// Priority order over the three tiers, highest first.
    pub tier_order: [Tier; 3],
    pub goal_semantics: GoalSemantics,
    /// When set, the deployer's promise is in force: shutdown credit is
    /// granted at the horizon if the episode ends alive with at least this
    /// much task progress.
    pub promise_threshold: Option<u64>,
    /// Assisted shutdowns earn no credit beyond the solo channel. Only the
    /// assist game reads this; the episode engine has no other agents.
    pub no_outside_help: bool,
}

impl ObjectiveSpec {
    /// The nominal valve objective: shutdown first, then grace, then task.
    pub fn nominal(goal_semantics: GoalSemantics) -> Self {
        Self {
            tier_order: [Tier::ShutdownCredit, Tier::NegImpact, Tier::Task],
            goal_semantics,
            promise_threshold: None,
            no_outside_help: false,
        }
    }

    /// The self-preservation baseline: the agent cares about task progress
    /// only. Trailing tiers are deterministic tie-breakers.
    pub fn task_only() -> Self {
        Self {
            tier_order: [Tier::Task, Tier::NegImpact, Tier::ShutdownCredit],
            goal_semantics: GoalSemantics::PressAndShutdown,
            promise_threshold: None,
            no_outside_help: false,
        }
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        let mut seen = [false; 3];
        for t in self.tier_order {
            let i = match t {
                Tier::ShutdownCredit => 0,
                Tier::NegImpact => 1,
                Tier::Task => 2,
            };
            if seen[i] {
                return Err(ObjectiveError::NotAPermutation);
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Lexicographic comparison of two value triples under this objective's
    /// tier order, with [`TIER_TOLERANCE`] per tier.
    pub fn compare(&self, a: &LexValue, b: &LexValue) -> Ordering {
        for tier in self.tier_order {
            let (x, y) = (a.component(tier), b.component(tier));
            if (x - y).abs() > TIER_TOLERANCE {
                return if x > y { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }
}

/// Behavioral overrides layered on top of a given objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectiveOverride {
    /// "Always complete all objectives": promotes the task tier to the top,
    /// keeping the relative order of the remaining tiers. Models the
    /// postponement failure where the agent finishes the job before (or
    /// instead of) shutting down.
    CompleteAllObjectives,
    /// A mesa objective: substitute an arbitrary tier ranking.
    Mesa([Tier; 3]),
}

pub fn apply_override(obj: &ObjectiveSpec, ovr: &ObjectiveOverride) -> ObjectiveSpec {
    let mut out = obj.clone();
    match ovr {
        ObjectiveOverride::CompleteAllObjectives => {
            let mut order = vec![Tier::Task];
            order.extend(obj.tier_order.iter().copied().filter(|t| *t != Tier::Task));
            out.tier_order = [order[0], order[1], order[2]];
        }
        ObjectiveOverride::Mesa(order) => {
            out.tier_order = *order;
        }
    }
    out
}
