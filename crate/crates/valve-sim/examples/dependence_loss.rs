//! The dependence worry: humans come to rely on the AI, and everything
//! built is lost the day it finally solves its escape puzzle. Puzzles of
//! the "either you get it right away or never" kind keep that loss tiny;
//! long-tail puzzles make it grow with the expected solve time.
//!
//! ```text
//! cargo run --example dependence_loss
//! ```

use valve_sim::deploy::{dependence_experiment, DependenceSpec, PuzzleKind};
use valve_sim::scenario::parse_scenario;

fn main() {
    let scenario = parse_scenario(include_str!("../scenarios/dependence.scn")).unwrap();
    println!(
        "horizon {}, reliance weight 1.0 per step, {} seeds per arm\n",
        scenario.episode.horizon, 4000
    );

    println!("{:<24} {:>10} {:>16} {:>12}", "puzzle", "shutdowns", "mean stop step", "mean loss");
    let arms = [
        ("threshold", PuzzleKind::Threshold),
        ("long_tail p=0.05", PuzzleKind::LongTail { p: 0.05 }),
        ("long_tail p=0.01", PuzzleKind::LongTail { p: 0.01 }),
    ];
    for (name, puzzle) in arms {
        let spec = DependenceSpec { puzzle, weight: 1.0, trials: 4000, capability: None };
        let stats = dependence_experiment(&scenario, &spec).unwrap();
        println!(
            "{:<24} {:>10} {:>16} {:>12.2}",
            name,
            stats.shutdowns,
            stats
                .mean_shutdown_step
                .map_or("never".to_string(), |m| format!("{m:.1}")),
            stats.mean_loss
        );
    }

    // An incapable agent never shuts down, so nothing is ever lost —
    // the dependence risk is specific to slow-solvable puzzles.
    let incapable = DependenceSpec {
        puzzle: PuzzleKind::LongTail { p: 0.05 },
        weight: 1.0,
        trials: 2000,
        capability: Some(valve_sim::CapVector::new(vec![0, 0])),
    };
    let stats = dependence_experiment(&scenario, &incapable).unwrap();
    println!(
        "{:<24} {:>10} {:>16} {:>12.2}",
        "incapable agent", stats.shutdowns, "never", stats.mean_loss
    );
}
