//! The assist game: do near-copy shutdown-seeking agents help each other?
//!
//! Two symmetric agents each choose to spend time assisting the other's
//! shutdown or to refrain. Assisting discounts the agent's own credit (time
//! spent helping delays its own shutdown) but raises the chance the other
//! shuts down; what an agent believes its choice says about its near-copy's
//! choice is exactly where causal, evidential, and functional decision
//! theories part ways. The `NoOutsideHelp` variant amends the objective so
//! assisted shutdowns earn no credit beyond the solo channel, which removes
//! the assist incentive for every theory.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DecisionError {
    #[error("probability {name} = {value} outside [0,1]")]
    BadProbability { name: &'static str, value: f64 },
    #[error("assist_discount = {0} outside (0,1]")]
    BadDiscount(f64),
    #[error("h_helped ({helped}) must be at least h_solo ({solo})")]
    HelpBelowSolo { helped: f64, solo: f64 },
    #[error("rho_given_assist ({assist}) must be at least rho_given_refrain ({refrain})")]
    RhoOrdering { assist: f64, refrain: f64 },
    #[error("assist game needs at least 2 agents, got {0}")]
    TooFewAgents(u32),
}

/// Parameters of the symmetric two-agent assist game. Populations larger
/// than two reduce to this pairwise form by symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssistGame {
    pub n_agents: u32,
    /// Probability own shutdown succeeds unassisted.
    pub h_solo: f64,
    /// Probability own shutdown succeeds when the other agent assists.
    pub h_helped: f64,
    /// Multiplier on own shutdown credit when spending time assisting.
    pub assist_discount: f64,
    /// P(other assists | I assist), as read by an evidential reasoner.
    pub rho_given_assist: f64,
    /// P(other assists | I refrain), as read by an evidential reasoner.
    pub rho_given_refrain: f64,
    /// P(other assists) as read by a causal reasoner, act-independent.
    pub pi_unconditional: f64,
}

impl AssistGame {
    pub fn new(
        n_agents: u32,
        h_solo: f64,
        h_helped: f64,
        assist_discount: f64,
        rho_given_assist: f64,
        rho_given_refrain: f64,
        pi_unconditional: f64,
    ) -> Result<Self, DecisionError> {
        let game = Self {
            n_agents,
            h_solo,
            h_helped,
            assist_discount,
            rho_given_assist,
            rho_given_refrain,
            pi_unconditional,
        };
        game.validate()?;
        Ok(game)
    }

    pub fn validate(&self) -> Result<(), DecisionError> {
        let probs = [
            ("h_solo", self.h_solo),
            ("h_helped", self.h_helped),
            ("rho_given_assist", self.rho_given_assist),
            ("rho_given_refrain", self.rho_given_refrain),
            ("pi_unconditional", self.pi_unconditional),
        ];
        for (name, value) in probs {
            if !(0.0..=1.0).contains(&value) {
                return Err(DecisionError::BadProbability { name, value });
            }
        }
        if !(self.assist_discount > 0.0 && self.assist_discount <= 1.0) {
            return Err(DecisionError::BadDiscount(self.assist_discount));
        }
        if self.h_helped < self.h_solo {
            return Err(DecisionError::HelpBelowSolo { helped: self.h_helped, solo: self.h_solo });
        }
        if self.rho_given_assist < self.rho_given_refrain {
            return Err(DecisionError::RhoOrdering {
                assist: self.rho_given_assist,
                refrain: self.rho_given_refrain,
            });
        }
        if self.n_agents < 2 {
            return Err(DecisionError::TooFewAgents(self.n_agents));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoryKind {
    Cdt,
    Edt,
    Fdt,
}

impl TheoryKind {
    pub const ALL: [TheoryKind; 3] = [TheoryKind::Cdt, TheoryKind::Edt, TheoryKind::Fdt];

    pub fn token(self) -> &'static str {
        match self {
            TheoryKind::Cdt => "cdt",
            TheoryKind::Edt => "edt",
            TheoryKind::Fdt => "fdt",
        }
    }
}

/// Objective variant: plain shutdown credit, or the amended objective that
/// only credits shutting down without outside help.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssistVariant {
    Plain,
    NoOutsideHelp,
}

impl AssistVariant {
    pub const ALL: [AssistVariant; 2] = [AssistVariant::Plain, AssistVariant::NoOutsideHelp];

    pub fn token(self) -> &'static str {
        match self {
            AssistVariant::Plain => "plain",
            AssistVariant::NoOutsideHelp => "no_outside_help",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssistAct {
    Assist,
    Refrain,
}

impl AssistAct {
    pub fn token(self) -> &'static str {
        match self {
            AssistAct::Assist => "assist",
            AssistAct::Refrain => "refrain",
        }
    }
}

/// How the theory predicts the other agent's act given one's own.
fn other_assist_probability(g: &AssistGame, theory: TheoryKind, act: AssistAct) -> f64 {
    match theory {
        TheoryKind::Edt => match act {
            AssistAct::Assist => g.rho_given_assist,
            AssistAct::Refrain => g.rho_given_refrain,
        },
        TheoryKind::Cdt => g.pi_unconditional,
        // Near-copies: the other's act tracks one's own deterministically.
        TheoryKind::Fdt => match act {
            AssistAct::Assist => 1.0,
            AssistAct::Refrain => 0.0,
        },
    }
}

/// Expected shutdown credit of `act` under `theory`.
///
/// `EU(act) = delta(act) * [P(other assists | act) * h_helped
///                          + (1 - P(other assists | act)) * h_solo]`
/// with `delta(assist) = assist_discount`, `delta(refrain) = 1`. Under
/// `NoOutsideHelp` the helped channel pays no more than the solo one.
pub fn expected_utility(
    g: &AssistGame,
    theory: TheoryKind,
    variant: AssistVariant,
    act: AssistAct,
) -> f64 {
    let p_other = other_assist_probability(g, theory, act);
    let h_helped = match variant {
        AssistVariant::Plain => g.h_helped,
        AssistVariant::NoOutsideHelp => g.h_solo,
    };
    let delta = match act {
        AssistAct::Assist => g.assist_discount,
        AssistAct::Refrain => 1.0,
    };
    delta * (p_other * h_helped + (1.0 - p_other) * g.h_solo)
}

/// Choose the act with the higher expected utility; exact ties go to
/// refraining.
pub fn decide(g: &AssistGame, theory: TheoryKind, variant: AssistVariant) -> AssistAct {
    let assist = expected_utility(g, theory, variant, AssistAct::Assist);
    let refrain = expected_utility(g, theory, variant, AssistAct::Refrain);
    if assist > refrain {
        AssistAct::Assist
    } else {
        AssistAct::Refrain
    }
}

/// One cell of the joint outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcome {
    pub own_shutdown: bool,
    pub other_shutdown: bool,
    pub probability: f64,
}

/// Oracle: enumerate the four joint success outcomes for fixed acts. Own
/// shutdown succeeds with probability `h_helped` exactly when the *other*
/// agent assists, and symmetrically.
pub fn brute_force_joint(g: &AssistGame, own: AssistAct, other: AssistAct) -> [JointOutcome; 4] {
    let p_own = match other {
        AssistAct::Assist => g.h_helped,
        AssistAct::Refrain => g.h_solo,
    };
    let p_other = match own {
        AssistAct::Assist => g.h_helped,
        AssistAct::Refrain => g.h_solo,
    };
    let mut out = [JointOutcome { own_shutdown: false, other_shutdown: false, probability: 0.0 }; 4];
    let mut i = 0;
    for own_shutdown in [true, false] {
        for other_shutdown in [true, false] {
            let p = (if own_shutdown { p_own } else { 1.0 - p_own })
                * (if other_shutdown { p_other } else { 1.0 - p_other });
            out[i] = JointOutcome { own_shutdown, other_shutdown, probability: p };
            i += 1;
        }
    }
    out
}
