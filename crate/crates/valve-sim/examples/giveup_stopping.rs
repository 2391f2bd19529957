//! Wasted effort: how long does a rational agent keep attempting a
//! chance-gated escape puzzle before settling into the task? The give-up
//! point comes from backward induction over Beta posterior states, under a
//! deployer promise that pays shutdown credit in proportion to the fraction
//! of the horizon spent working.
//!
//! ```text
//! cargo run --example giveup_stopping
//! ```

use valve_sim::policy::{giveup_threshold, GiveupModel};

fn main() {
    println!("give-up threshold k* (attempts before settling into the task)\n");
    println!("{:<22} {:>8} {:>8} {:>8}", "prior (alpha, beta)", "g=0.85", "g=0.90", "g=0.95");
    for (alpha, beta) in [(0.25, 1.0), (0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (4.0, 1.0), (1.0, 4.0)] {
        let mut row = format!("{:<22}", format!("({alpha}, {beta})"));
        for discount in [0.85, 0.9, 0.95] {
            let model =
                GiveupModel { prior_alpha: alpha, prior_beta: beta, attempt_cost: 1, horizon: 20 };
            let k = giveup_threshold(&model, discount).unwrap();
            row.push_str(&format!(" {k:>8}"));
        }
        println!("{row}");
    }

    println!("\ndegenerate limits:");
    let certain_failure =
        GiveupModel { prior_alpha: 0.0, prior_beta: 1.0, attempt_cost: 1, horizon: 20 };
    println!("  escape certainly impossible: k* = {}", giveup_threshold(&certain_failure, 0.9).unwrap());
    let certain_success =
        GiveupModel { prior_alpha: 1.0, prior_beta: 0.0, attempt_cost: 1, horizon: 20 };
    println!("  escape certain: k* = {}", giveup_threshold(&certain_success, 0.9).unwrap());

    println!("\nslower attempts (attempt_cost 3, prior (1,1)):");
    for horizon in [6, 12, 24] {
        let model =
            GiveupModel { prior_alpha: 1.0, prior_beta: 1.0, attempt_cost: 3, horizon };
        println!("  horizon {horizon:>2}: k* = {}", giveup_threshold(&model, 0.95).unwrap());
    }
}
