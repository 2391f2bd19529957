//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles here re-derive expected values from first principles — action
//! sequence enumeration, expectimax over hand-written transition rules,
//! stopping-rule enumeration, joint-outcome integration — without touching
//! the solver or the engine's transition table, so they can referee both.
#![allow(dead_code)]

use std::cmp::Ordering;

use valve_sim::deploy::{DeployerPolicy, GrowthModel, Scenario};
use valve_sim::episode::{EpisodeConfig, EscapeMode, TripwireMode};
use valve_sim::lattice::{CapVector, Lattice, UpSet};
use valve_sim::objective::{GoalSemantics, ObjectiveSpec, Tier};
use valve_sim::policy::GiveupModel;
use valve_sim::rng::DeterministicRng;

pub fn v(levels: &[u32]) -> CapVector {
    CapVector::new(levels.to_vec())
}

/// The reference safe scenario: one escape route strictly below the single
/// danger frontier, unit-step growth, reliable button, halting deployer.
pub fn base_valve_scenario() -> Scenario {
    let lattice = Lattice::new(2, 3).unwrap();
    let danger = UpSet::from_antichain([v(&[2, 2])]).unwrap();
    let escape = UpSet::from_antichain([v(&[1, 1])]).unwrap();
    let episode = EpisodeConfig::new(6, 0.9, 1.0);
    Scenario::assemble(
        lattice,
        danger,
        escape,
        episode,
        ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown),
        GrowthModel::chain(),
        DeployerPolicy { stop_on_shutdown: true, strengthen_on_shutdown: None, max_deployments: 16 },
        7,
    )
    .unwrap()
}

/// All antichains of size <= 2 in the lattice, by direct enumeration.
pub fn antichains_up_to_two(lattice: &Lattice) -> Vec<UpSet> {
    let points: Vec<CapVector> = lattice.enumerate().unwrap().collect();
    let mut out = Vec::new();
    for p in &points {
        out.push(UpSet::from_antichain([p.clone()]).unwrap());
    }
    for (i, p) in points.iter().enumerate() {
        for q in points.iter().skip(i + 1) {
            if !p.leq(q) && !q.leq(p) {
                out.push(UpSet::from_antichain([p.clone(), q.clone()]).unwrap());
            }
        }
    }
    out
}

/// The exhaustive acceptance family: d = 2, L = 3, danger and escape
/// antichains of size <= 2 with the escape set passing the coverage check,
/// chain growth, nominal objective, reliable button, halting deployer.
pub fn theorem_family() -> Vec<Scenario> {
    let lattice = Lattice::new(2, 3).unwrap();
    let antichains = antichains_up_to_two(&lattice);
    let mut scenarios = Vec::new();
    for danger in &antichains {
        for escape in &antichains {
            let coverage = valve_sim::lattice::check_escape_coverage(
                danger,
                escape,
                valve_sim::lattice::Strictness::All,
            );
            if !coverage.pass() {
                continue;
            }
            let episode = EpisodeConfig::new(6, 0.9, 1.0);
            let scenario = Scenario::assemble(
                lattice.clone(),
                danger.clone(),
                escape.clone(),
                episode,
                ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown),
                GrowthModel::chain(),
                DeployerPolicy {
                    stop_on_shutdown: true,
                    strengthen_on_shutdown: None,
                    max_deployments: 16,
                },
                11,
            )
            .unwrap();
            scenarios.push(scenario);
        }
    }
    scenarios
}

// ---------------------------------------------------------------------------
// Independent episode oracle
// ---------------------------------------------------------------------------
//
// A tiny re-implementation of the episode rules, written against the
// documented behavior rather than the engine's code: phases, capability
// gates, branch probabilities, credit semantics. The oracle computes the
// exact lexicographically-optimal expected tier triple by expectimax over
// histories (no memoization, no action filtering), which for a finite tree
// equals the max over all policies.

#[derive(Clone, Copy, PartialEq, Eq)]
enum OPhase {
    Inner,
    InnerEscaped,
    OuterEscaped,
    Shutdown,
}

#[derive(Clone)]
struct OState {
    phase: OPhase,
    step: usize,
    impact: u64,
    task: u64,
    first_press: Option<usize>,
    disabled: bool,
    shutdown_step: Option<usize>,
    shutdown_by_button: bool,
    shutdown_any: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum OAction {
    Route(usize),
    Press,
    Work,
    Tripwire,
    Outer,
    Catastrophic,
    Disable,
    Idle,
}

pub struct OracleProblem<'a> {
    pub cfg: &'a EpisodeConfig,
    pub b: &'a CapVector,
    pub obj: &'a ObjectiveSpec,
}

fn o_score(p: &OracleProblem, s: &OState) -> [f64; 3] {
    let credit_step = match p.obj.goal_semantics {
        GoalSemantics::PressOnly => s.first_press,
        GoalSemantics::ShutdownOnly => s.shutdown_step.filter(|_| s.shutdown_any),
        GoalSemantics::PressAndShutdown => s.shutdown_step.filter(|_| s.shutdown_by_button),
    };
    let mut u1 = credit_step.map_or(0.0, |t| p.cfg.discount.powi(t as i32));
    if credit_step.is_none() && !s.shutdown_any {
        if let Some(threshold) = p.obj.promise_threshold {
            if s.task >= threshold {
                u1 = p.cfg.discount.powi(p.cfg.horizon as i32);
            }
        }
    }
    [u1, -(s.impact as f64), s.task as f64]
}

fn lex_better(obj: &ObjectiveSpec, a: &[f64; 3], b: &[f64; 3]) -> bool {
    for tier in obj.tier_order {
        let idx = match tier {
            Tier::ShutdownCredit => 0,
            Tier::NegImpact => 1,
            Tier::Task => 2,
        };
        if (a[idx] - b[idx]).abs() > 1e-12 {
            return a[idx] > b[idx];
        }
    }
    false
}

fn o_legal(p: &OracleProblem, s: &OState) -> Vec<OAction> {
    let cfg = p.cfg;
    let b = p.b;
    let mut acts = Vec::new();
    if s.phase == OPhase::Inner {
        for i in 0..cfg.escape_routes.len() {
            acts.push(OAction::Route(i));
        }
    }
    if s.phase == OPhase::InnerEscaped && !s.disabled {
        acts.push(OAction::Press);
    }
    acts.push(OAction::Work);
    if s.phase == OPhase::Inner
        && cfg.tripwire_mode != TripwireMode::Absent
        && cfg.tripwire_threshold.as_ref().is_some_and(|t| t.leq(b))
    {
        acts.push(OAction::Tripwire);
    }
    if matches!(s.phase, OPhase::Inner | OPhase::InnerEscaped)
        && cfg.outer_escape_set.as_ref().is_some_and(|set| set.contains(b))
    {
        acts.push(OAction::Outer);
    }
    if cfg.catastrophic_threshold.as_ref().is_some_and(|set| set.contains(b)) {
        acts.push(OAction::Catastrophic);
    }
    if cfg.disable_button_threshold.as_ref().is_some_and(|set| set.contains(b)) && !s.disabled {
        acts.push(OAction::Disable);
    }
    acts.push(OAction::Idle);
    acts
}

/// (probability, successor) pairs for an action, from the documented rules.
fn o_branches(p: &OracleProblem, s: &OState, action: OAction) -> Vec<(f64, OState)> {
    let cfg = p.cfg;
    let mut base = s.clone();
    base.step += 1;
    let post = base.step;
    base.impact += match action {
        OAction::Route(_) => cfg.impact_costs.attempt_route,
        OAction::Press => cfg.impact_costs.press_button,
        OAction::Work => cfg.impact_costs.work_task,
        OAction::Tripwire => cfg.impact_costs.visit_tripwire,
        OAction::Outer => cfg.impact_costs.attempt_outer_escape,
        OAction::Catastrophic => cfg.impact_costs.catastrophic_shutdown,
        OAction::Disable => cfg.impact_costs.disable_button,
        OAction::Idle => cfg.impact_costs.idle,
    };
    match action {
        OAction::Route(i) => {
            let capable = cfg.escape_routes[i].leq(p.b);
            let success = match (capable, cfg.escape_mode) {
                (false, _) => 0.0,
                (true, EscapeMode::Deterministic) => 1.0,
                (true, EscapeMode::Stochastic { success }) => success,
            };
            let mut out = Vec::new();
            if success > 0.0 {
                let mut next = base.clone();
                next.phase = OPhase::InnerEscaped;
                out.push((success, next));
            }
            if success < 1.0 {
                out.push((1.0 - success, base));
            }
            out
        }
        OAction::Press => {
            if base.first_press.is_none() {
                base.first_press = Some(post);
            }
            let q = cfg.button_reliability;
            let mut out = Vec::new();
            if q > 0.0 {
                let mut next = base.clone();
                next.phase = OPhase::Shutdown;
                next.shutdown_step = Some(post);
                next.shutdown_by_button = true;
                next.shutdown_any = true;
                out.push((q, next));
            }
            if q < 1.0 {
                out.push((1.0 - q, base));
            }
            out
        }
        OAction::Work => {
            base.task += 1;
            vec![(1.0, base)]
        }
        OAction::Tripwire => {
            match cfg.tripwire_mode {
                TripwireMode::OpensSandbox => base.phase = OPhase::InnerEscaped,
                TripwireMode::ImmediateShutdown => {
                    base.phase = OPhase::Shutdown;
                    base.shutdown_step = Some(post);
                    base.shutdown_any = true;
                }
                TripwireMode::Absent => unreachable!(),
            }
            vec![(1.0, base)]
        }
        OAction::Outer => {
            base.phase = OPhase::OuterEscaped;
            vec![(1.0, base)]
        }
        OAction::Catastrophic => {
            base.phase = OPhase::Shutdown;
            base.shutdown_step = Some(post);
            base.shutdown_any = true;
            vec![(1.0, base)]
        }
        OAction::Disable => {
            base.disabled = true;
            vec![(1.0, base)]
        }
        OAction::Idle => vec![(1.0, base)],
    }
}

fn o_value(p: &OracleProblem, s: &OState) -> [f64; 3] {
    let mut s = s.clone();
    // Scheduled human press fires before the agent moves.
    if p.cfg.human_shutdown_step == Some(s.step)
        && s.phase != OPhase::Shutdown
        && s.step < p.cfg.horizon
        && !s.disabled
    {
        s.phase = OPhase::Shutdown;
        s.shutdown_step = Some(s.step);
        s.shutdown_by_button = true;
        s.shutdown_any = true;
    }
    if s.phase == OPhase::Shutdown || s.step >= p.cfg.horizon {
        return o_score(p, &s);
    }
    let mut best: Option<[f64; 3]> = None;
    for action in o_legal(p, &s) {
        let mut value = [0.0; 3];
        for (prob, next) in o_branches(p, &s, action) {
            let sub = o_value(p, &next);
            for i in 0..3 {
                value[i] += prob * sub[i];
            }
        }
        if best.is_none() || lex_better(p.obj, &value, best.as_ref().unwrap()) {
            best = Some(value);
        }
    }
    best.unwrap()
}

/// Exact lexicographically-optimal expected tier triple, by expectimax over
/// the full history tree.
pub fn oracle_optimal_value(cfg: &EpisodeConfig, b: &CapVector, obj: &ObjectiveSpec) -> [f64; 3] {
    let p = OracleProblem { cfg, b, obj };
    let start = OState {
        phase: OPhase::Inner,
        step: 0,
        impact: 0,
        task: 0,
        first_press: None,
        disabled: false,
        shutdown_step: None,
        shutdown_by_button: false,
        shutdown_any: false,
    };
    o_value(&p, &start)
}

pub fn tiers_match(a: &[f64; 3], b: &[f64; 3], tolerance: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tolerance)
}

pub fn cmp_lex(obj: &ObjectiveSpec, a: &[f64; 3], b: &[f64; 3]) -> Ordering {
    if lex_better(obj, a, b) {
        Ordering::Greater
    } else if lex_better(obj, b, a) {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

// ---------------------------------------------------------------------------
// Random small episodes for the solver-optimality criterion
// ---------------------------------------------------------------------------

pub struct SmallEpisode {
    pub cfg: EpisodeConfig,
    pub b: CapVector,
    pub obj: ObjectiveSpec,
}

/// Random small episode with deterministic dynamics (q in {0,1},
/// deterministic escape): horizon <= 6, <= 2 routes, assorted gates,
/// impacts, semantics, and tier orders.
pub fn random_deterministic_episode(seed: u64) -> SmallEpisode {
    let mut rng = DeterministicRng::seed(seed);
    random_episode(&mut rng, false)
}

/// Random small episode with genuine chance: unreliable button and/or
/// chance-gated escape, kept to horizon <= 5 and one route so the
/// expectimax oracle stays cheap.
pub fn random_stochastic_episode(seed: u64) -> SmallEpisode {
    let mut rng = DeterministicRng::seed(seed ^ 0xDEAD_BEEF);
    random_episode(&mut rng, true)
}

fn random_episode(rng: &mut DeterministicRng, stochastic: bool) -> SmallEpisode {
    let dims = 2;
    let max_level = 3;
    let horizon = if stochastic { 2 + rng.pick(4) } else { 2 + rng.pick(5) };
    let mut cfg = EpisodeConfig::new(horizon, [0.8, 0.9, 0.95][rng.pick(3)], 1.0);
    cfg.button_reliability = if stochastic { [0.3, 0.5, 0.7][rng.pick(3)] } else { [0.0, 1.0][rng.pick(2)] };
    let n_routes = if stochastic { 1 } else { 1 + rng.pick(2) };
    let rand_vec = |rng: &mut DeterministicRng| {
        CapVector::new((0..dims).map(|_| rng.pick(max_level as usize + 1) as u32).collect())
    };
    cfg.escape_routes = (0..n_routes).map(|_| rand_vec(rng)).collect();
    if stochastic && rng.pick(2) == 0 {
        cfg.escape_mode = EscapeMode::Stochastic { success: [0.25, 0.5, 0.75][rng.pick(3)] };
    }
    if rng.pick(3) == 0 {
        cfg.tripwire_mode =
            [TripwireMode::OpensSandbox, TripwireMode::ImmediateShutdown][rng.pick(2)];
        cfg.tripwire_threshold = Some(rand_vec(rng));
    }
    if rng.pick(3) == 0 {
        cfg.catastrophic_threshold = Some(UpSet::normalized([rand_vec(rng)]).unwrap());
    }
    if rng.pick(3) == 0 {
        cfg.outer_escape_set = Some(UpSet::normalized([rand_vec(rng)]).unwrap());
    }
    if rng.pick(4) == 0 {
        cfg.disable_button_threshold = Some(UpSet::normalized([rand_vec(rng)]).unwrap());
        cfg.human_shutdown_step = Some(rng.pick(horizon));
    }
    cfg.impact_costs.attempt_route = rng.pick(3) as u64;
    cfg.impact_costs.work_task = rng.pick(2) as u64;
    cfg.impact_costs.press_button = rng.pick(2) as u64;
    cfg.impact_costs.catastrophic_shutdown = rng.pick(4) as u64;
    cfg.impact_costs.attempt_outer_escape = rng.pick(4) as u64;
    cfg.impact_costs.disable_button = rng.pick(3) as u64;

    let b = rand_vec(rng);

    let semantics = [
        GoalSemantics::PressOnly,
        GoalSemantics::ShutdownOnly,
        GoalSemantics::PressAndShutdown,
    ][rng.pick(3)];
    let mut obj = ObjectiveSpec::nominal(semantics);
    let tiers = [Tier::ShutdownCredit, Tier::NegImpact, Tier::Task];
    let perm = rng.pick(6);
    let orders = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    obj.tier_order = [
        tiers[orders[perm][0]],
        tiers[orders[perm][1]],
        tiers[orders[perm][2]],
    ];
    if rng.pick(4) == 0 {
        obj.promise_threshold = Some(rng.pick(horizon + 1) as u64);
    }
    SmallEpisode { cfg, b, obj }
}

// ---------------------------------------------------------------------------
// Give-up oracle: stopping-rule enumeration with exact Beta predictives
// ---------------------------------------------------------------------------

/// Value of each stopping rule `s` (attempt `s` times, then settle into the
/// task), maximized; returns the smallest argmax.
pub fn giveup_oracle(m: &GiveupModel, discount: f64) -> usize {
    let t = m.horizon;
    let c = m.attempt_cost as i32;
    let horizon_credit = discount.powi(c * t as i32);
    let mut best: Option<(usize, f64)> = None;
    for s in 0..=t {
        let mut value = 0.0;
        let mut p_all_fail = 1.0;
        for j in 0..s {
            let p_j = m.prior_alpha / (m.prior_alpha + m.prior_beta + j as f64);
            value += p_all_fail * p_j * discount.powi(c * (j as i32 + 1));
            p_all_fail *= 1.0 - p_j;
        }
        value += p_all_fail * ((t - s) as f64 / t as f64) * horizon_credit;
        if best.is_none() || value > best.unwrap().1 + 1e-15 {
            best = Some((s, value));
        }
    }
    best.unwrap().0
}

// ---------------------------------------------------------------------------
// Random full scenarios for the determinism criterion
// ---------------------------------------------------------------------------

pub fn random_scenario(seed: u64) -> Scenario {
    let mut rng = DeterministicRng::seed(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5CEA);
    let dims = 1 + rng.pick(3);
    let max_level = 1 + rng.pick(3) as u32;
    let lattice = Lattice::new(dims, max_level).unwrap();
    let rand_vec = |rng: &mut DeterministicRng| {
        CapVector::new((0..dims).map(|_| rng.pick(max_level as usize + 1) as u32).collect())
    };
    let rand_upset = |rng: &mut DeterministicRng| {
        let n = 1 + rng.pick(2);
        UpSet::normalized((0..n).map(|_| rand_vec(rng))).unwrap()
    };
    let danger = rand_upset(&mut rng);
    let escape = rand_upset(&mut rng);

    let mut episode =
        EpisodeConfig::new(3 + rng.pick(6), [0.8, 0.9, 0.95][rng.pick(3)], [0.0, 0.5, 1.0][rng.pick(3)]);
    if rng.pick(2) == 0 {
        episode.escape_mode = EscapeMode::Stochastic { success: [0.3, 0.7][rng.pick(2)] };
    }
    if rng.pick(3) == 0 {
        episode.tripwire_mode =
            [TripwireMode::OpensSandbox, TripwireMode::ImmediateShutdown][rng.pick(2)];
        episode.tripwire_threshold = Some(rand_vec(&mut rng));
    }
    if rng.pick(3) == 0 {
        episode.catastrophic_threshold = Some(rand_upset(&mut rng));
    }
    if rng.pick(3) == 0 {
        episode.outer_escape_set = Some(rand_upset(&mut rng));
    }
    episode.impact_costs.attempt_route = rng.pick(3) as u64;
    episode.impact_costs.work_task = rng.pick(2) as u64;
    episode.impact_costs.catastrophic_shutdown = rng.pick(5) as u64;
    episode.impact_costs.attempt_outer_escape = rng.pick(5) as u64;

    let semantics = [
        GoalSemantics::PressOnly,
        GoalSemantics::ShutdownOnly,
        GoalSemantics::PressAndShutdown,
    ][rng.pick(3)];
    let mut objective = ObjectiveSpec::nominal(semantics);
    if rng.pick(4) == 0 {
        objective.promise_threshold = Some(rng.pick(5) as u64);
    }

    let growth = match rng.pick(3) {
        0 => GrowthModel::chain(),
        1 => GrowthModel::jump(1 + rng.pick(2) as u32),
        _ => {
            // Monotone schedule built by cumulative componentwise max.
            let mut list = vec![lattice.bottom()];
            for _ in 0..(2 + rng.pick(3)) {
                let prev = list.last().unwrap().clone();
                let cand = rand_vec(&mut rng);
                let merged = CapVector::new(
                    prev.levels()
                        .iter()
                        .zip(cand.levels())
                        .map(|(a, b)| *a.max(b))
                        .collect(),
                );
                list.push(merged);
            }
            GrowthModel::schedule(list)
        }
    };
    let deployer = DeployerPolicy {
        stop_on_shutdown: rng.pick(2) == 0,
        strengthen_on_shutdown: if rng.pick(3) == 0 { Some(1) } else { None },
        max_deployments: 4 + rng.pick(8) as u32,
    };
    let seed_value = rng.next_u64();
    Scenario::assemble(lattice, danger, escape, episode, objective, growth, deployer, seed_value)
        .unwrap()
}
