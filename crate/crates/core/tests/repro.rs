use toricpo_core::repro::{run_repro, ReproParams, SCENARIOS};

#[test]
fn every_scenario_passes() {
    for name in SCENARIOS {
        let r = run_repro(name, &ReproParams::default()).unwrap();
        print!("{}", r.to_text());
        assert!(r.passed(), "{}", r.to_text());
    }
}
