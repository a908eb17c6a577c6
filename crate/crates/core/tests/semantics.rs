//! Evaluator and simulator semantics on the shipped models.

use plwb_core::eval::{action_admissible, config_admissible, eval_arith, eval_bool};
use plwb_core::expr::{ArithExpr, ArithOp, BoolExpr};
use plwb_core::model::{ActionLabel, Configuration, Model};
use plwb_core::parse_model;
use plwb_core::rat::rat_int;
use plwb_core::sim::{
    enabled_transitions, sample_transition, simulate, StopRule, Terminal, DEADLOCK_LABEL,
};
use plwb_core::smc::t_quantile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn load(name: &str) -> Model {
    let path = format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_model(&std::fs::read_to_string(path).unwrap(), name).unwrap()
}

fn with_installed(model: &Model, installed: &[&str]) -> Configuration {
    let mut cfg = model.initial_configuration();
    cfg.installed = installed.iter().map(|s| s.to_string()).collect();
    cfg
}

fn price(model: &Model, cfg: &Configuration) -> plwb_core::rat::Rat {
    let expr = ArithExpr::AttrSum {
        attr: "price".into(),
        feature: "Machine".into(),
    };
    eval_arith(&expr, model, cfg).unwrap()
}

#[test]
fn attribute_sum_over_installed_features() {
    let m = load("vending_price10.plm");
    assert_eq!(price(&m, &with_installed(&m, &["Coffee"])), rat_int(5));
    assert_eq!(
        price(&m, &with_installed(&m, &["Coffee", "Cappuccino"])),
        rat_int(12)
    );
    assert_eq!(
        price(&m, &with_installed(&m, &["Coffee", "Cappuccino", "Cocoa"])),
        rat_int(14)
    );
    // Abstract features contribute nothing of their own.
    assert_eq!(price(&m, &with_installed(&m, &[])), rat_int(0));
}

#[test]
fn arithmetic_follows_standard_semantics() {
    let m = load("vending_price10.plm");
    let cfg = m.initial_configuration();
    let two_times_three = ArithExpr::Bin {
        op: ArithOp::Mul,
        left: Box::new(ArithExpr::Const(rat_int(2))),
        right: Box::new(ArithExpr::Const(rat_int(3))),
    };
    let e = ArithExpr::Bin {
        op: ArithOp::Sub,
        left: Box::new(two_times_three),
        right: Box::new(ArithExpr::Const(rat_int(1))),
    };
    assert_eq!(eval_arith(&e, &m, &cfg).unwrap(), rat_int(5));
    assert_eq!(
        eval_arith(&ArithExpr::Var("sold".into()), &m, &cfg).unwrap(),
        rat_int(0)
    );
}

#[test]
fn abstract_features_lift_to_installed_descendants() {
    let m = load("vending_price10.plm");
    let cfg = with_installed(&m, &["Coffee"]);
    assert!(eval_bool(&BoolExpr::Has("CoffeeBased".into()), &m, &cfg).unwrap());
    assert!(eval_bool(&BoolExpr::Has("Coffee".into()), &m, &cfg).unwrap());
    assert!(!eval_bool(&BoolExpr::Has("Tea".into()), &m, &cfg).unwrap());
    assert!(!eval_bool(&BoolExpr::Has("Cappuccino".into()), &m, &cfg).unwrap());
}

#[test]
fn config_admissibility_tracks_price_and_excludes() {
    let m10 = load("vending_price10.plm");
    let m15 = load("vending_price15.plm");
    let both = &["Coffee", "Cappuccino"];
    assert!(!config_admissible(&m10, &with_installed(&m10, both)).unwrap());
    assert!(config_admissible(&m15, &with_installed(&m15, both)).unwrap());
    // Cocoa excludes Tea.
    assert!(!config_admissible(&m10, &with_installed(&m10, &["Tea", "Cocoa"])).unwrap());
    assert!(config_admissible(&m10, &with_installed(&m10, &["Tea"])).unwrap());
}

#[test]
fn action_admissibility() {
    let m10 = load("vending_price10.plm");
    let m15 = load("vending_price15.plm");
    let act = |name: &str| ActionLabel::Act(name.into());

    // chocaccino requires Cappuccino and Cocoa.
    let full = with_installed(&m15, &["Coffee", "Cappuccino", "Cocoa"]);
    assert!(action_admissible(&m15, &full, &act("chocaccino")).unwrap());
    let coffee10 = with_installed(&m10, &["Coffee"]);
    assert!(!action_admissible(&m10, &coffee10, &act("chocaccino")).unwrap());

    // Installing Cappuccino breaks the price-10 bound but not the 15 one.
    let install_capp = ActionLabel::Install("Cappuccino".into());
    assert!(!action_admissible(&m10, &coffee10, &install_capp).unwrap());
    let coffee15 = with_installed(&m15, &["Coffee"]);
    assert!(action_admissible(&m15, &coffee15, &install_capp).unwrap());

    // Uninstalling what is absent, or what another feature requires, fails.
    assert!(!action_admissible(&m10, &coffee10, &ActionLabel::Uninstall("Cocoa".into())).unwrap());
    let both15 = with_installed(&m15, &["Coffee", "Cappuccino"]);
    assert!(!action_admissible(&m15, &both15, &ActionLabel::Uninstall("Coffee".into())).unwrap());

    // replace is atomic: judged on the configuration after both steps.
    let replace = ActionLabel::Replace("Coffee".into(), "Tea".into());
    assert!(action_admissible(&m10, &coffee10, &replace).unwrap());
    assert!(!action_admissible(&m15, &both15, &replace).unwrap());

    // Feature-use actions need the feature installed.
    assert!(action_admissible(&m10, &coffee10, &act("Coffee")).unwrap());
    assert!(!action_admissible(&m10, &coffee10, &act("Tea")).unwrap());
}

#[test]
fn install_blocking_is_monotone_in_the_bound() {
    // If install(Cappuccino) is blocked at bound 10, it stays blocked at
    // every tighter bound.
    let base = std::fs::read_to_string(format!(
        "{}/../../models/vending_price10.plm",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    let install_capp = ActionLabel::Install("Cappuccino".into());
    for bound in ["10", "8", "5", "0"] {
        let text = base.replace(
            "price(Machine) <= 10",
            &format!("price(Machine) <= {bound}"),
        );
        let m = parse_model(&text, "vending_bound.plm").unwrap();
        let cfg = with_installed(&m, &["Coffee"]);
        assert!(
            !action_admissible(&m, &cfg, &install_capp).unwrap(),
            "bound {bound}"
        );
    }
}

#[test]
fn initial_configuration_is_admissible_in_every_shipped_model() {
    for name in [
        "vending_price10.plm",
        "vending_price15.plm",
        "elevator_typo.plm",
        "deadlock_demo.plm",
        "deadlock_fixed.plm",
    ] {
        let m = load(name);
        assert!(
            config_admissible(&m, &m.initial_configuration()).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn enabled_set_respects_the_price_bound() {
    let m10 = load("vending_price10.plm");
    let m15 = load("vending_price15.plm");
    let names = |m: &Model| {
        enabled_transitions(m, &m.initial_configuration())
            .unwrap()
            .iter()
            .map(|e| e.transition.action.to_string())
            .collect::<Vec<_>>()
    };
    let at10 = names(&m10);
    assert!(at10.contains(&"install(Cocoa)".to_string()));
    assert!(!at10.contains(&"install(Cappuccino)".to_string()));
    let at15 = names(&m15);
    assert!(at15.contains(&"install(Cappuccino)".to_string()));
}

#[test]
fn sampling_is_proportional_to_weight_and_skips_zero() {
    let m = parse_model(
        "begin feature tree\n\
             Root -> mandatory Core\n\
         end feature tree\n\
         begin actions\n\
             a b c\n\
         end actions\n\
         begin processes diagram\n\
             begin process p\n\
                 states = s, t, u\n\
                 transitions =\n\
                 s -(a, 2)-> t,\n\
                 s -(b, 1)-> u,\n\
                 s -(c, 0)-> u,\n\
                 t -(a, 1)-> t,\n\
                 u -(a, 1)-> u\n\
             end process\n\
         end processes diagram\n\
         begin init\n\
             installedFeatures = { Core }\n\
             initialProcesses = p\n\
         end init",
        "toy",
    )
    .unwrap();
    let cfg = m.initial_configuration();
    let enabled = enabled_transitions(&m, &cfg).unwrap();
    // Weight-0 entries are enabled (part of the specified behaviour) but
    // never sampled.
    assert_eq!(enabled.len(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 90_000;
    let mut picked_a = 0u64;
    for _ in 0..draws {
        let e = sample_transition(&enabled, &mut rng).unwrap();
        let name = e.transition.action.to_string();
        assert_ne!(name, "c");
        if name == "a" {
            picked_a += 1;
        }
    }
    let frac = picked_a as f64 / draws as f64;
    assert!((frac - 2.0 / 3.0).abs() < 0.01, "observed {frac}");
}

#[test]
fn all_zero_weights_mean_no_choice() {
    let m = parse_model(
        "begin feature tree\n\
             Root -> mandatory Core\n\
         end feature tree\n\
         begin actions\n\
             a\n\
         end actions\n\
         begin processes diagram\n\
             begin process p\n\
                 states = s, t\n\
                 transitions = s -(a, 0)-> t, t -(a, 1)-> t\n\
             end process\n\
         end processes diagram\n\
         begin init\n\
             installedFeatures = { Core }\n\
             initialProcesses = p\n\
         end init",
        "toy0",
    )
    .unwrap();
    let cfg = m.initial_configuration();
    let enabled = enabled_transitions(&m, &cfg).unwrap();
    assert_eq!(enabled.len(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(sample_transition(&enabled, &mut rng).is_none());
    // The simulation records the dead end as an explicit DEADLOCK step.
    let out = simulate(&m, &StopRule::MaxSteps(10), &mut rng, 0).unwrap();
    assert_eq!(out.terminal, Terminal::Deadlock);
    assert_eq!(out.records.last().unwrap().action, DEADLOCK_LABEL);
}

#[test]
fn simulation_is_deterministic_for_a_fixed_seed() {
    let m = load("vending_price10.plm");
    let run = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        simulate(&m, &StopRule::MaxSteps(200), &mut rng, 0).unwrap()
    };
    let a = run(42);
    let b = run(42);
    assert_eq!(a.records, b.records);
    assert_eq!(a.terminal, b.terminal);
    let c = run(43);
    assert_ne!(a.records, c.records);
}

#[test]
fn budget_deadlock_appears_and_the_escape_removes_it() {
    let demo = load("deadlock_demo.plm");
    let fixed = load("deadlock_fixed.plm");
    let mut saw_deadlock = false;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = simulate(&demo, &StopRule::MaxSteps(20), &mut rng, seed).unwrap();
        if out.terminal == Terminal::Deadlock {
            saw_deadlock = true;
            let last = out.records.last().unwrap();
            assert_eq!(last.source, "risky");
            assert_eq!(last.target, DEADLOCK_LABEL);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = simulate(&fixed, &StopRule::MaxSteps(20), &mut rng, seed).unwrap();
        assert_ne!(out.terminal, Terminal::Deadlock, "seed {seed}");
    }
    assert!(saw_deadlock);
}

#[test]
fn t_quantile_matches_tables() {
    assert!((t_quantile(0.975, 4.0) - 2.776).abs() < 1e-3);
    assert!((t_quantile(0.975, 1e6) - 1.95996).abs() < 1e-3);
    assert!((t_quantile(0.95, 10.0) - 1.812).abs() < 1e-3);
}
