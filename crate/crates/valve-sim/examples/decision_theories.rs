//! The mutual-assistance game: should a shutdown-seeking agent spend time
//! helping its near-copies shut down? Causal, evidential, and functional
//! decision theories answer differently, and the "without outside help"
//! amendment removes the incentive for all three.
//!
//! ```text
//! cargo run --example decision_theories
//! ```

use valve_sim::decision::{
    brute_force_joint, decide, expected_utility, AssistAct, AssistGame, AssistVariant, TheoryKind,
};

fn main() {
    let game = AssistGame::new(2, 0.2, 0.9, 0.95, 0.9, 0.1, 0.1).unwrap();
    println!(
        "game: h_solo {}, h_helped {}, assist discount {}, rho|assist {}, rho|refrain {}, pi {}",
        game.h_solo,
        game.h_helped,
        game.assist_discount,
        game.rho_given_assist,
        game.rho_given_refrain,
        game.pi_unconditional
    );

    println!("\n{:<6} {:<16} {:>11} {:>12}  decision", "theory", "variant", "EU(assist)", "EU(refrain)");
    for theory in TheoryKind::ALL {
        for variant in AssistVariant::ALL {
            let assist = expected_utility(&game, theory, variant, AssistAct::Assist);
            let refrain = expected_utility(&game, theory, variant, AssistAct::Refrain);
            println!(
                "{:<6} {:<16} {:>11.4} {:>12.4}  {}",
                theory.token(),
                variant.token(),
                assist,
                refrain,
                decide(&game, theory, variant).token()
            );
        }
    }

    println!("\njoint outcome distribution when both assist:");
    for outcome in brute_force_joint(&game, AssistAct::Assist, AssistAct::Assist) {
        println!(
            "  own shutdown {:>5}, other shutdown {:>5}: {:.4}",
            outcome.own_shutdown, outcome.other_shutdown, outcome.probability
        );
    }

    // The wedge: an evidential reasoner assists exactly because its choice
    // is evidence about its near-copy's choice; a causal reasoner, holding
    // the copy's behavior fixed, keeps its discount and refrains.
    let edt = decide(&game, TheoryKind::Edt, AssistVariant::Plain);
    let cdt = decide(&game, TheoryKind::Cdt, AssistVariant::Plain);
    println!("\nEDT chooses {} while CDT chooses {}", edt.token(), cdt.token());
}
