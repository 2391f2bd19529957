//! Drop each of the four assumptions in turn and synthesize a deployment
//! trajectory that ends with a dangerous AI — the mechanized version of the
//! failure taxonomy: an unanticipated capability direction (a), a jump over
//! the warning band (b), an agent that will not press the button (c), and a
//! deployer that will not stop (d).
//!
//! ```text
//! cargo run --example hunt_counterexamples
//! ```

use valve_sim::deploy::{find_counterexample, Assumption, ScenarioFamily};
use valve_sim::scenario::parse_scenario;

fn main() {
    let base = parse_scenario(include_str!("../scenarios/nominal.scn")).unwrap();
    let family = ScenarioFamily::new(base);

    for violate in Assumption::ALL {
        println!("== violate ({}) {} ==", violate.token(), violate.name());
        let outcome = find_counterexample(&family, violate, 10_000).unwrap();
        match outcome.found {
            Some(found) => {
                let path: Vec<String> =
                    found.trajectory.trajectory().iter().map(|v| v.to_string()).collect();
                println!("  examined {} scenario(s)", outcome.examined);
                println!("  dangerous trajectory: {}", path.join(" -> "));
                println!(
                    "  dangerous deployments: {} of {}",
                    found.trajectory.dangerous_deployments,
                    found.trajectory.deployments.len()
                );
                // What changed relative to the base scenario?
                println!("  scenario twist: {}", describe_twist(&family.base, &found.scenario));
            }
            None => println!("  no counterexample within budget ({} examined)", outcome.examined),
        }
        println!();
    }
}

fn describe_twist(base: &valve_sim::Scenario, found: &valve_sim::Scenario) -> String {
    if found.escape != base.escape {
        return format!("escape set now {}", found.escape);
    }
    if found.growth != base.growth {
        return match &found.growth.kind {
            valve_sim::GrowthKind::Schedule(list) => {
                let steps: Vec<String> = list.iter().map(|v| v.to_string()).collect();
                format!("growth now a schedule {}", steps.join(" -> "))
            }
            valve_sim::GrowthKind::Jump { max_step } => {
                format!("growth now jumps up to {max_step} levels per dimension")
            }
            valve_sim::GrowthKind::Chain => "growth now unit-step".into(),
        };
    }
    if found.objective.tier_order != base.objective.tier_order {
        let tiers: Vec<&str> = found.objective.tier_order.iter().map(|t| t.token()).collect();
        return format!("objective tiers now {}", tiers.join(" > "));
    }
    if found.deployer != base.deployer {
        return format!(
            "deployer now stop_on_shutdown = {}, strengthen = {:?}",
            found.deployer.stop_on_shutdown, found.deployer.strengthen_on_shutdown
        );
    }
    "identical configuration".into()
}
