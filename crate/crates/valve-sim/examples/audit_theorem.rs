//! Audit the four safety-valve assumptions and the safety claim itself:
//! first on the clean reference scenario, then on variants that break
//! escape coverage and deployer discipline.
//!
//! ```text
//! cargo run --example audit_theorem
//! ```

use valve_sim::deploy::{audit_assumptions, run_deployment, AuditOptions};
use valve_sim::scenario::parse_scenario;

fn main() {
    let nominal = parse_scenario(include_str!("../scenarios/nominal.scn")).unwrap();
    println!("== nominal scenario ==");
    let report = audit_assumptions(&nominal, &AuditOptions::default()).unwrap();
    println!("{report}\n");

    // Watch the valve fire: deployment walks up the lattice until the first
    // escape-capable AI, which promptly shuts itself down.
    let result = run_deployment(&nominal).unwrap();
    println!("deployment trace:");
    for ai in &result.deployments {
        println!(
            "  #{} capability {}: shutdown = {} (step {:?}), task = {}",
            ai.index,
            ai.capability,
            ai.result.shutdown,
            ai.result.shutdown_step,
            ai.result.task_progress
        );
    }
    println!("stopped: {:?}, dangerous created: {}\n", result.stop, result.dangerous_created);

    println!("== uncovered danger frontier ==");
    let uncovered = parse_scenario(include_str!("../scenarios/uncovered_frontier.scn")).unwrap();
    let report = audit_assumptions(&uncovered, &AuditOptions::default()).unwrap();
    println!("{report}\n");

    println!("== arms-race deployer ==");
    let arms_race = parse_scenario(include_str!("../scenarios/arms_race.scn")).unwrap();
    let report = audit_assumptions(&arms_race, &AuditOptions::default()).unwrap();
    println!("{report}");
}
