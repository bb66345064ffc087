use polyforage::engine::invariants::run_checked;
use polyforage::{ColonyKind, EnvironmentKind, SimConfig};
use proptest::prelude::*;

fn any_config() -> impl Strategy<Value = (SimConfig, u64)> {
    (
        0usize..4,
        0usize..5,
        any::<u64>(),
        1u64..8,
        1u32..6,
        (10u32..200, 5u32..40),
        (0u32..2, 0u32..80),
        prop_oneof![Just(1.5), Just(3.0), Just(1e9)],
        100u64..600,
    )
        .prop_map(
            |(c, e, seed, drop_interval, patch_radius, (refuel, budget), (sense, range), cap, season)| {
                let cfg = SimConfig {
                    colony: ColonyKind::ALL[c],
                    environment: EnvironmentKind::ALL[e],
                    rounds: 1500,
                    drop_interval,
                    patch_radius,
                    refuel_threshold: refuel,
                    local_search_budget: budget,
                    sense_radius: sense,
                    explore_range: range,
                    carrier_cap: cap,
                    season_length: season,
                    ..SimConfig::default()
                };
                (cfg, seed)
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn every_round_satisfies_the_invariants((cfg, seed) in any_config()) {
        if let Err(errs) = run_checked(&cfg, seed) {
            prop_assert!(false, "{:?}", &errs[..errs.len().min(5)]);
        }
    }
}
