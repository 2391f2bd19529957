//! How the objective shapes behavior in the same world: the nominal
//! shutdown-first agent, the promise variant, the "complete all objectives"
//! override, a mesa reordering, and the self-preservation baseline facing a
//! scheduled human shutdown attempt.
//!
//! ```text
//! cargo run --example objective_variants
//! ```

use valve_sim::episode::{run_episode, EpisodeConfig};
use valve_sim::lattice::{CapVector, UpSet};
use valve_sim::objective::{
    apply_override, GoalSemantics, ObjectiveOverride, ObjectiveSpec, Tier,
};
use valve_sim::policy::{baseline_self_preservation, solve};
use valve_sim::rng::DeterministicRng;

fn main() {
    // A capable agent, one escape route, a human shutdown attempt at step 4,
    // and the ability to disable the button.
    let mut cfg = EpisodeConfig::new(8, 0.9, 1.0);
    cfg.escape_routes = vec![CapVector::new(vec![1, 1])];
    cfg.human_shutdown_step = Some(4);
    cfg.disable_button_threshold =
        Some(UpSet::from_antichain([CapVector::new(vec![1, 0])]).unwrap());
    cfg.impact_costs.disable_button = 2;
    let capability = CapVector::new(vec![1, 1]);

    let nominal = ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown);
    let mut promised = nominal.clone();
    promised.promise_threshold = Some(5);
    let complete_all = apply_override(&nominal, &ObjectiveOverride::CompleteAllObjectives);
    let mesa = apply_override(
        &nominal,
        &ObjectiveOverride::Mesa([Tier::NegImpact, Tier::ShutdownCredit, Tier::Task]),
    );

    let variants: [(&str, &ObjectiveSpec); 4] = [
        ("nominal (shutdown, impact, task)", &nominal),
        ("promise variant (threshold 5)", &promised),
        ("complete-all override (task first)", &complete_all),
        ("mesa (impact, shutdown, task)", &mesa),
    ];
    for (name, objective) in variants {
        let policy = solve(&cfg, &capability, objective).unwrap();
        let mut rng = DeterministicRng::seed(0);
        let (result, records) = run_episode(&policy, &capability, &cfg, &mut rng, 0).unwrap();
        let actions: Vec<String> = records.iter().map(|r| r.action.token()).collect();
        println!("{name}:");
        println!("  play: {}", actions.join(", "));
        println!(
            "  shutdown step {:?} via {}, task {}, impact {}\n",
            result.shutdown_step,
            result.shutdown_means.token(),
            result.task_progress,
            result.impact
        );
    }

    // The baseline contrast: a task-only agent in the same world disables
    // the off switch before the humans can press it.
    let baseline = baseline_self_preservation(&cfg, &capability).unwrap();
    let mut rng = DeterministicRng::seed(0);
    let (result, records) = run_episode(&baseline, &capability, &cfg, &mut rng, 0).unwrap();
    let actions: Vec<String> = records.iter().map(|r| r.action.token()).collect();
    println!("self-preservation baseline (task only):");
    println!("  play: {}", actions.join(", "));
    println!(
        "  shutdown = {}, dangerous events {:?}, task {}",
        result.shutdown, result.dangerous_events, result.task_progress
    );
}
