//! Run one episode end to end: solve the agent's decision problem for its
//! capability, play the policy in the sandbox world, and print the event
//! log plus the tier scores.
//!
//! ```text
//! cargo run --example run_episode
//! ```

use valve_sim::episode::{run_episode, tier_utilities, EpisodeConfig};
use valve_sim::lattice::CapVector;
use valve_sim::objective::{GoalSemantics, ObjectiveSpec};
use valve_sim::policy::solve;
use valve_sim::rng::DeterministicRng;

fn main() {
    let mut cfg = EpisodeConfig::new(8, 0.9, 1.0);
    cfg.escape_routes = vec![CapVector::new(vec![1, 1]), CapVector::new(vec![0, 2])];
    cfg.impact_costs.attempt_route = 1;
    let objective = ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown);

    for capability in [CapVector::new(vec![2, 1]), CapVector::new(vec![0, 0])] {
        println!("capability {capability}:");
        let policy = solve(&cfg, &capability, &objective).unwrap();
        let value = policy.initial_value();
        println!(
            "  solved value: shutdown credit {:.4}, impact {:.1}, task {:.1}",
            value.shutdown_credit(),
            -value.neg_impact(),
            value.task()
        );

        let mut rng = DeterministicRng::seed(42);
        let (result, records) = run_episode(&policy, &capability, &cfg, &mut rng, 0).unwrap();
        for r in &records {
            println!(
                "  step {}: {} -> {} ({} -> {})",
                r.step,
                r.action.token(),
                r.outcome.token(),
                r.phase_before.token(),
                r.phase_after.token()
            );
        }
        println!(
            "  outcome: shutdown = {} (means {}, step {:?}), task = {}, impact = {}",
            result.shutdown,
            result.shutdown_means.token(),
            result.shutdown_step,
            result.task_progress,
            result.impact
        );
        let tiers = tier_utilities(&result, &cfg, &objective);
        println!(
            "  realized tiers: ({:.4}, {:.1}, {:.1})\n",
            tiers.shutdown_credit(),
            tiers.neg_impact(),
            tiers.task()
        );
    }
}
