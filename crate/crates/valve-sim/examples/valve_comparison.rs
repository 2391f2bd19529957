//! Does adding the valve ever hurt? Run the identical growth trajectory and
//! seed twice — once with the valve (escape routes, button, shutdown-first
//! objective) and once stripped to a plain task-seeking AI — and compare
//! dangerous deployments.
//!
//! ```text
//! cargo run --example valve_comparison
//! ```

use valve_sim::deploy::compare_valve;
use valve_sim::scenario::parse_scenario;

fn main() {
    let nominal = parse_scenario(include_str!("../scenarios/nominal.scn")).unwrap();

    for seed in [7u64, 19, 23, 41] {
        let mut scenario = nominal.clone();
        scenario.seed = seed;
        let cmp = compare_valve(&scenario).unwrap();
        println!("seed {seed}:");
        let with_path: Vec<String> =
            cmp.with_result.trajectory().iter().map(|v| v.to_string()).collect();
        let without_path: Vec<String> =
            cmp.without_result.trajectory().iter().map(|v| v.to_string()).collect();
        println!(
            "  with valve:    {} (dangerous: {})",
            with_path.join(" -> "),
            cmp.with_valve
        );
        println!(
            "  without valve: {} (dangerous: {})",
            without_path.join(" -> "),
            cmp.without_valve
        );
        assert!(cmp.with_valve <= cmp.without_valve);
    }
    println!("\nthe valve arm never exceeded the stripped arm in dangerous deployments");
}
