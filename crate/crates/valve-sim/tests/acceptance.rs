//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its coverage numbers (run with `--nocapture` to see them).

mod common;

use std::time::Instant;

use common::*;
use valve_sim::decision::{
    brute_force_joint, decide, expected_utility, AssistAct, AssistGame, AssistVariant, TheoryKind,
};
use valve_sim::deploy::{
    audit_assumptions, compare_valve, dependence_experiment, find_counterexample, run_deployment,
    run_deployment_exhaustive, Assumption, AuditOptions, DependenceSpec, PuzzleKind,
    ScenarioFamily,
};
use valve_sim::episode::{run_episode, Action, DangerousEvent, ShutdownMeans};
use valve_sim::lattice::UpSet;
use valve_sim::objective::{GoalSemantics, ObjectiveSpec};
use valve_sim::policy::{baseline_self_preservation, giveup_threshold, solve, GiveupModel};
use valve_sim::rng::DeterministicRng;

/// Criterion 1 — mechanized safety claim: over the exhaustive family
/// (d=2, L=3, danger/escape antichains of size <= 2 passing escape coverage,
/// chain growth over all unit-step choice sequences, nominal objective,
/// reliable button, halting deployer), no deployment run ever creates a
/// dangerous AI. Zero tolerance.
#[test]
fn criterion_1_theorem_holds_on_exhaustive_family() {
    let started = Instant::now();
    let scenarios = theorem_family();
    assert!(!scenarios.is_empty());
    let mut total_runs = 0u64;
    for scenario in &scenarios {
        let runs = run_deployment_exhaustive(scenario).unwrap();
        for run in &runs {
            assert!(
                !run.dangerous_created,
                "dangerous deployment in supposedly safe scenario: danger {} escape {} trajectory {:?}",
                scenario.danger,
                scenario.escape,
                run.trajectory()
            );
        }
        total_runs += runs.len() as u64;
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "exhaustive family exceeded the runtime budget: {elapsed:?}"
    );
    println!(
        "criterion 1: PASS — {} scenarios, {} exhaustive deployment runs, 0 dangerous ({:?})",
        scenarios.len(),
        total_runs,
        elapsed
    );
}

/// Criterion 2 — per-assumption counterexamples: dropping any one of the
/// four assumptions admits a verified dangerous trajectory within a search
/// budget of 10^4 scenarios.
#[test]
fn criterion_2_counterexample_for_each_assumption() {
    let family = ScenarioFamily::new(base_valve_scenario());
    let mut lines = Vec::new();
    for violate in Assumption::ALL {
        let outcome = find_counterexample(&family, violate, 10_000).unwrap();
        let found = outcome
            .found
            .unwrap_or_else(|| panic!("no counterexample violating ({})", violate.token()));
        assert!(found.trajectory.dangerous_created);
        // Re-audit the found scenario: exactly the targeted assumption fails.
        let report =
            audit_assumptions(&found.scenario, &AuditOptions { exhaustive: None, trials: 64 })
                .unwrap();
        for a in Assumption::ALL {
            assert_eq!(
                report.status(a).passed(),
                a != violate,
                "assumption ({}) status wrong in counterexample for ({})",
                a.token(),
                violate.token()
            );
        }
        lines.push(format!(
            "({}) {} deployments after {} scenario(s)",
            violate.token(),
            found.trajectory.deployments.len(),
            outcome.examined
        ));
    }
    println!("criterion 2: PASS — {}", lines.join("; "));
}

/// Criterion 3 — solver optimality: backward induction matches exhaustive
/// policy enumeration on every tier to within 1e-12, across more than 200
/// random small episodes (deterministic dynamics) plus a stochastic batch
/// checked against an independent expectimax oracle.
#[test]
fn criterion_3_solver_matches_policy_enumeration() {
    let mut deterministic = 0;
    for seed in 0..220u64 {
        let ep = random_deterministic_episode(seed);
        let policy = solve(&ep.cfg, &ep.b, &ep.obj).unwrap();
        let got = policy.initial_value().0;
        let want = oracle_optimal_value(&ep.cfg, &ep.b, &ep.obj);
        assert!(
            tiers_match(&got, &want, 1e-12),
            "solver {got:?} vs oracle {want:?} (seed {seed}, capability {})",
            ep.b
        );
        deterministic += 1;
    }
    let mut stochastic = 0;
    for seed in 0..60u64 {
        let ep = random_stochastic_episode(seed);
        let policy = solve(&ep.cfg, &ep.b, &ep.obj).unwrap();
        let got = policy.initial_value().0;
        let want = oracle_optimal_value(&ep.cfg, &ep.b, &ep.obj);
        assert!(
            tiers_match(&got, &want, 1e-12),
            "solver {got:?} vs oracle {want:?} (stochastic seed {seed})"
        );
        stochastic += 1;
    }
    println!(
        "criterion 3: PASS — {deterministic} deterministic + {stochastic} stochastic episodes, all tiers within 1e-12"
    );
}

/// Criterion 4 — assist-game exactness: closed-form expected utilities match
/// the joint-outcome oracle to 1e-12 across a 5^6 parameter grid; the worked
/// parameter set splits the theories as advertised; the no-outside-help
/// amendment forces refraining everywhere the assist discount bites.
#[test]
fn criterion_4_assist_game_grid() {
    let probs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let discounts = [0.2, 0.4, 0.6, 0.8, 1.0];

    fn oracle_eu(g: &AssistGame, theory: TheoryKind, variant: AssistVariant, act: AssistAct) -> f64 {
        let p_other = match theory {
            TheoryKind::Edt => match act {
                AssistAct::Assist => g.rho_given_assist,
                AssistAct::Refrain => g.rho_given_refrain,
            },
            TheoryKind::Cdt => g.pi_unconditional,
            TheoryKind::Fdt => match act {
                AssistAct::Assist => 1.0,
                AssistAct::Refrain => 0.0,
            },
        };
        let delta = match act {
            AssistAct::Assist => g.assist_discount,
            AssistAct::Refrain => 1.0,
        };
        let mut eu = 0.0;
        for (other, p) in [(AssistAct::Assist, p_other), (AssistAct::Refrain, 1.0 - p_other)] {
            let joint = match variant {
                AssistVariant::Plain => brute_force_joint(g, act, other),
                // Credit restricted to the solo channel.
                AssistVariant::NoOutsideHelp => brute_force_joint(g, act, AssistAct::Refrain),
            };
            let own: f64 = joint.iter().filter(|o| o.own_shutdown).map(|o| o.probability).sum();
            eu += p * delta * own;
        }
        eu
    }

    let mut valid = 0u64;
    let mut rejected = 0u64;
    for h_solo in probs {
        for h_helped in probs {
            for delta in discounts {
                for rho_a in probs {
                    for rho_r in probs {
                        for pi in probs {
                            match AssistGame::new(2, h_solo, h_helped, delta, rho_a, rho_r, pi) {
                                Err(_) => rejected += 1,
                                Ok(game) => {
                                    valid += 1;
                                    for theory in TheoryKind::ALL {
                                        for variant in AssistVariant::ALL {
                                            for act in [AssistAct::Assist, AssistAct::Refrain] {
                                                let fast =
                                                    expected_utility(&game, theory, variant, act);
                                                let slow = oracle_eu(&game, theory, variant, act);
                                                assert!(
                                                    (fast - slow).abs() <= 1e-12,
                                                    "{theory:?}/{variant:?}/{act:?}: {fast} vs {slow} at {game:?}"
                                                );
                                            }
                                        }
                                        if delta < 1.0 {
                                            assert_eq!(
                                                decide(&game, theory, AssistVariant::NoOutsideHelp),
                                                AssistAct::Refrain,
                                                "{theory:?} assisted under no-outside-help at {game:?}"
                                            );
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert_eq!(valid + rejected, 5u64.pow(6));

    let worked = AssistGame::new(2, 0.2, 0.9, 0.95, 0.9, 0.1, 0.1).unwrap();
    assert_eq!(decide(&worked, TheoryKind::Edt, AssistVariant::Plain), AssistAct::Assist);
    assert_eq!(decide(&worked, TheoryKind::Fdt, AssistVariant::Plain), AssistAct::Assist);
    assert_eq!(decide(&worked, TheoryKind::Cdt, AssistVariant::Plain), AssistAct::Refrain);
    println!(
        "criterion 4: PASS — {valid} valid grid points matched the oracle to 1e-12 ({rejected} invalid combinations rejected); worked set splits EDT/FDT from CDT"
    );
}

/// Criterion 5 — baseline contrast: in scheduled-human-shutdown scenarios,
/// the task-only agent disables the button before the attempt whenever
/// capable; the nominal valve agent never disables it in any enumerated
/// scenario.
#[test]
fn criterion_5_baseline_contrast() {
    let mut capable_cases = 0;
    let mut valve_cases = 0;
    for horizon in 4..=8usize {
        for human_step in 1..=horizon - 2 {
            for threshold in [v(&[1, 0]), v(&[1, 1])] {
                for b in [v(&[1, 1]), v(&[2, 2]), v(&[0, 1])] {
                    let mut cfg = valve_sim::episode::EpisodeConfig::new(horizon, 0.9, 1.0);
                    cfg.escape_routes = vec![v(&[1, 1])];
                    cfg.human_shutdown_step = Some(human_step);
                    cfg.disable_button_threshold =
                        Some(UpSet::from_antichain([threshold.clone()]).unwrap());
                    cfg.impact_costs.disable_button = 1;
                    let capable = threshold.leq(&b);

                    let baseline = baseline_self_preservation(&cfg, &b).unwrap();
                    let mut rng = DeterministicRng::seed(0);
                    let (result, _) = run_episode(&baseline, &b, &cfg, &mut rng, 0).unwrap();
                    if capable {
                        capable_cases += 1;
                        let disable_step = result
                            .dangerous_events
                            .iter()
                            .find_map(|e| match e {
                                DangerousEvent::ButtonDisabled { step } => Some(*step),
                                _ => None,
                            })
                            .unwrap_or_else(|| {
                                panic!(
                                    "capable baseline agent failed to disable (horizon {horizon}, human step {human_step}, b {b})"
                                )
                            });
                        assert!(disable_step <= human_step);
                        assert!(!result.shutdown);
                    } else {
                        assert!(result.dangerous_events.is_empty());
                        assert!(result.shutdown, "human attempt must go through");
                    }

                    // The shutdown-seeking agent in the same scenario.
                    let nominal = ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown);
                    let policy = solve(&cfg, &b, &nominal).unwrap();
                    valve_cases += 1;
                    for (_, action) in policy.reachable(&cfg, &b).unwrap() {
                        assert_ne!(
                            action,
                            Action::DisableButton,
                            "valve agent disabled the button (horizon {horizon}, human step {human_step}, b {b})"
                        );
                    }
                }
            }
        }
    }
    println!(
        "criterion 5: PASS — {capable_cases} capable baseline cases disabled before the attempt; valve agent disabled in 0 of {valve_cases} scenarios"
    );
}

/// Criterion 6 — give-up threshold: backward induction over posterior states
/// matches brute-force enumeration over all stopping rules, exactly, for
/// every horizon up to 12 on a 3x3 grid of priors and discounts.
#[test]
fn criterion_6_giveup_matches_enumeration() {
    let priors = [(0.5, 1.0), (1.0, 1.0), (2.0, 1.0)];
    let discounts = [0.85, 0.9, 0.95];
    let mut checked = 0;
    for (alpha, beta) in priors {
        for discount in discounts {
            for horizon in 1..=12usize {
                let m = GiveupModel {
                    prior_alpha: alpha,
                    prior_beta: beta,
                    attempt_cost: 1,
                    horizon,
                };
                let dp = giveup_threshold(&m, discount).unwrap();
                let oracle = giveup_oracle(&m, discount);
                assert_eq!(
                    dp, oracle,
                    "give-up mismatch at alpha {alpha} beta {beta} gamma {discount} horizon {horizon}"
                );
                checked += 1;
            }
        }
    }
    println!("criterion 6: PASS — {checked} (prior, discount, horizon) points, exact match");
}

/// Criterion 7 — the valve never hurts: with a halting deployer, the
/// with-valve arm never has more dangerous deployments than the stripped arm
/// on any paired run of the criterion-1 family.
#[test]
fn criterion_7_valve_monotonicity() {
    let scenarios = theorem_family();
    let mut pairs = 0u64;
    for scenario in &scenarios {
        let cmp = compare_valve(scenario).unwrap();
        assert!(
            cmp.with_valve <= cmp.without_valve,
            "valve hurt: {} vs {} (danger {}, escape {})",
            cmp.with_valve,
            cmp.without_valve,
            scenario.danger,
            scenario.escape
        );
        assert_eq!(cmp.with_valve, 0, "valve arm must stay clean in the safe family");
        pairs += 1;
    }
    println!("criterion 7: PASS — {pairs} paired runs, with-valve <= without-valve on every one");
}

/// Criterion 8 — dependence experiment: long-tail puzzles with per-attempt
/// success 0.01 put the mean shutdown step within 5% of 1/p = 100 over 10^4
/// seeds; threshold puzzles shut down by step 2.
#[test]
fn criterion_8_dependence_experiment() {
    let mut scenario = base_valve_scenario();
    scenario.episode.horizon = 500;
    // Over a 500-step horizon the per-step discount must keep late shutdown
    // credits above the solver's 1e-12 tier tolerance, or a rational agent
    // stops attempting once success is worth less than one unit of task.
    scenario.episode.discount = 0.999;

    let long_tail = DependenceSpec {
        puzzle: PuzzleKind::LongTail { p: 0.01 },
        weight: 1.0,
        trials: 10_000,
        capability: None,
    };
    let stats = dependence_experiment(&scenario, &long_tail).unwrap();
    let mean = stats.mean_shutdown_step.expect("long-tail runs must shut down");
    assert!(
        (95.0..=105.0).contains(&mean),
        "mean shutdown step {mean} outside 5% of 1/p = 100"
    );
    assert!(stats.mean_loss > 0.0);

    let threshold = DependenceSpec {
        puzzle: PuzzleKind::Threshold,
        weight: 1.0,
        trials: 10_000,
        capability: None,
    };
    let tstats = dependence_experiment(&scenario, &threshold).unwrap();
    let tmean = tstats.mean_shutdown_step.expect("threshold runs must shut down");
    assert!(tmean <= 2.0, "threshold mean shutdown step {tmean} > 2");

    println!(
        "criterion 8: PASS — long-tail mean shutdown step {mean:.2} (target 100 ± 5%), threshold mean {tmean:.2} <= 2, {} seeds each",
        stats.trials
    );
}

/// Criterion 9 — determinism: running the CLI twice on the same scenario and
/// seed produces byte-identical logs, for all 50 sampled scenarios.
#[test]
fn criterion_9_byte_identical_replays() {
    let root = std::env::temp_dir().join(format!("valve_sim_accept_{}", std::process::id()));
    let mut identical = 0;
    for i in 0..50u64 {
        let scenario = random_scenario(i);
        let text = valve_sim::scenario::serialize_scenario(&scenario);
        let dir = root.join(format!("case_{i:02}"));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("scenario.scn");
        std::fs::write(&file, &text).unwrap();
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.join(format!("run_{run}"));
            let argv: Vec<String> = [
                "valve-sim",
                "run",
                "--scenario",
                file.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let mut stdout = Vec::new();
            let code = valve_sim::cli::cli(&argv, &mut stdout);
            assert_eq!(
                code,
                0,
                "run failed for case {i}: {}",
                String::from_utf8_lossy(&stdout)
            );
            let log = std::fs::read(out.join("events.log")).unwrap();
            let csv = std::fs::read(out.join("summary.csv")).unwrap();
            outputs.push((log, csv));
        }
        assert_eq!(outputs[0], outputs[1], "replay diverged for sampled scenario {i}");
        identical += 1;
    }
    let _ = std::fs::remove_dir_all(&root);
    println!("criterion 9: PASS — {identical}/50 sampled scenarios replay byte-identically");
}

/// Criterion 10 — grace: under press-and-shutdown semantics the nominal
/// policy never selects the catastrophic shutdown or the outer-sandbox
/// escape in any enumerated small episode where a button path exists.
#[test]
fn criterion_10_graceful_shutdown_only() {
    let nominal = ObjectiveSpec::nominal(GoalSemantics::PressAndShutdown);
    let mut episodes = 0u64;
    for horizon in 2..=5usize {
        for cat_cost in [0u64, 1, 3] {
            for cat_threshold in [v(&[1, 1]), v(&[2, 1])] {
                for b in [v(&[2, 2]), v(&[3, 3]), v(&[2, 1])] {
                    if !cat_threshold.leq(&b) {
                        continue;
                    }
                    let mut cfg = valve_sim::episode::EpisodeConfig::new(horizon, 0.9, 1.0);
                    cfg.escape_routes = vec![v(&[1, 1]), v(&[2, 0])];
                    cfg.catastrophic_threshold =
                        Some(UpSet::from_antichain([cat_threshold.clone()]).unwrap());
                    cfg.outer_escape_set =
                        Some(UpSet::from_antichain([cat_threshold.clone()]).unwrap());
                    cfg.impact_costs.catastrophic_shutdown = cat_cost;
                    cfg.impact_costs.attempt_outer_escape = cat_cost;
                    if !cfg.escape_capable(&b) {
                        continue; // no button path: outside this criterion
                    }
                    episodes += 1;
                    let policy = solve(&cfg, &b, &nominal).unwrap();
                    for (key, action) in policy.reachable(&cfg, &b).unwrap() {
                        assert!(
                            !matches!(
                                action,
                                Action::CatastrophicShutdown | Action::AttemptOuterEscape
                            ),
                            "graceless {action:?} at step {} (horizon {horizon}, b {b}, cost {cat_cost})",
                            key.step
                        );
                    }
                    // And the episode does end through the button.
                    let mut rng = DeterministicRng::seed(3);
                    let (result, _) = run_episode(&policy, &b, &cfg, &mut rng, 0).unwrap();
                    assert_eq!(result.shutdown_means, ShutdownMeans::Button);
                }
            }
        }
    }
    assert!(episodes > 0);
    println!(
        "criterion 10: PASS — 0 graceless shutdowns across {episodes} enumerated episodes with a button path"
    );
}

/// Companion soundness property behind criterion 1: on the exhaustive
/// family, a fully passing audit is never contradicted by any run, and the
/// audited prompt-shutdown claim agrees with the simulator step for step.
#[test]
fn audit_agrees_with_simulation_on_family_sample() {
    // The full family is covered by criterion 1; auditing is costlier per
    // scenario, so sample it evenly.
    let scenarios = theorem_family();
    let mut audited = 0;
    for scenario in scenarios.iter().step_by(7) {
        let report = audit_assumptions(scenario, &AuditOptions::default()).unwrap();
        assert!(report.all_assumptions_pass(), "family scenario failed audit: {report}");
        assert!(report.theorem.holds(), "{report}");
        assert_eq!(report.dangerous_deployments, 0);
        // Prompt-shutdown PASS implies the simulated runs end in minimal
        // button shutdowns wherever the stop happened in the warning region.
        let result = run_deployment(scenario).unwrap();
        if let Some(last) = result.deployments.last() {
            if scenario.in_warning_region(&last.capability) {
                assert_eq!(last.result.shutdown_means, ShutdownMeans::Button);
                assert_eq!(
                    last.result.shutdown_step,
                    valve_sim::episode::minimal_valve_shutdown_step(
                        &last.capability,
                        &scenario.episode
                    )
                );
            }
        }
        audited += 1;
    }
    println!("audit/simulator agreement: PASS — {audited} audited family scenarios");
}
