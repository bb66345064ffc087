use polyforage::engine::{replicate_seed, run_seeds};
use polyforage::metrics::{read_csv, write_csv, write_csv_to};
use polyforage::{init_sim, run, run_replicates, ColonyKind, EnvironmentKind, Observable, SimConfig};

fn cfg(colony: ColonyKind, environment: EnvironmentKind, rounds: u64) -> SimConfig {
    SimConfig {
        colony,
        environment,
        rounds,
        ..SimConfig::default()
    }
}

#[test]
fn initial_state_has_the_endowment_and_no_workers() {
    let s = init_sim(&SimConfig::default(), 1).unwrap();
    assert_eq!(s.round, 0);
    assert_eq!(s.colony.store, 32);
    assert!(s.ants.is_empty());
    assert!(s.colony.larvae.is_empty());
}

#[test]
fn initial_patch_sits_at_the_configured_distance() {
    for seed in 0..50 {
        let s = init_sim(&cfg(ColonyKind::Caste, EnvironmentKind::Patch, 10), seed).unwrap();
        let d = s.world.nest_distance(s.world.env.patch_center.unwrap());
        assert!((29.0..=31.0).contains(&d), "seed {seed}: {d}");
    }
}

#[test]
fn sixteenth_worker_matures_in_round_116() {
    for colony in ColonyKind::ALL {
        let records = run(&cfg(colony, EnvironmentKind::Uniform, 120), 1).unwrap();
        assert_eq!(records[99].worker_population, 0);
        assert_eq!(records[100].worker_population, 1);
        assert_eq!(records[114].worker_population, 15);
        assert_eq!(records[115].worker_population, 16);
    }
}

#[test]
fn dead_colony_stays_dead_while_food_keeps_cycling() {
    let records = run(&cfg(ColonyKind::PureExplorer, EnvironmentKind::Patch, 6000), 1).unwrap();
    let death = records
        .iter()
        .position(|r| !r.colony_alive)
        .expect("explorers starve in a patch");
    assert!(records[death].round < 3000);
    for r in &records[death..] {
        assert_eq!(r.worker_population, 0);
        assert_eq!(r.store, 0);
        assert!(!r.colony_alive);
    }
    let tail = &records[records.len() - 1000..];
    assert!(tail.iter().all(|r| r.food_in_world == tail[0].food_in_world));
    assert_eq!(tail[0].food_in_world, 200);
}

#[test]
fn zero_rounds_give_an_empty_series() {
    assert!(run(&cfg(ColonyKind::Age, EnvironmentKind::Mixed, 0), 3)
        .unwrap()
        .is_empty());
}

#[test]
fn serialized_runs_are_identical() {
    let c = cfg(ColonyKind::Age, EnvironmentKind::RoamingPatch, 1500);
    let a = serde_json::to_string(&run(&c, 11).unwrap()).unwrap();
    let b = serde_json::to_string(&run(&c, 11).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = serde_json::to_string(&run(&c, 12).unwrap()).unwrap();
    assert_ne!(a, other);
}

#[test]
fn single_replicate_aggregate_is_the_run() {
    let c = SimConfig {
        replicates: 1,
        base_seed: 5,
        ..cfg(ColonyKind::Caste, EnvironmentKind::Seasonal, 800)
    };
    let agg = run_replicates(&c, 1).unwrap();
    let single = run(&c, 5).unwrap();
    for obs in Observable::ALL {
        let col = agg.column(obs);
        assert!(col.std.iter().all(|&s| s == 0.0));
        let expected: Vec<f64> = single.iter().map(|r| obs.of(r)).collect();
        assert_eq!(col.mean, expected);
    }
}

#[test]
fn default_replicates_use_consecutive_seeds() {
    let c = cfg(ColonyKind::Caste, EnvironmentKind::Uniform, 50);
    let agg = run_replicates(&c, 2).unwrap();
    let expected: Vec<u64> = (0..13).map(|i| replicate_seed(c.base_seed, i)).collect();
    assert_eq!(agg.seeds, expected);
    assert_eq!(expected, (1..=13).collect::<Vec<_>>());
}

#[test]
fn thread_count_does_not_change_csv_bytes() {
    let c = SimConfig {
        replicates: 6,
        ..cfg(ColonyKind::Age, EnvironmentKind::Mixed, 1200)
    };
    let bytes = |jobs| {
        let mut out = Vec::new();
        write_csv_to(&run_replicates(&c, jobs).unwrap(), &mut out).unwrap();
        out
    };
    let serial = bytes(1);
    assert_eq!(serial, bytes(3));
    assert_eq!(serial, bytes(8));
}

#[test]
fn seeds_run_in_any_order_give_the_same_runs() {
    let c = cfg(ColonyKind::PureExploiter, EnvironmentKind::Uniform, 600);
    let seeds = [9, 3, 7, 1];
    let parallel = run_seeds(&c, &seeds, 4).unwrap();
    for (seed, records) in seeds.iter().zip(&parallel) {
        assert_eq!(records, &run(&c, *seed).unwrap());
    }
}

#[test]
fn role_columns_sum_to_population() {
    let c = SimConfig {
        replicates: 5,
        ..cfg(ColonyKind::Age, EnvironmentKind::Uniform, 3000)
    };
    let agg = run_replicates(&c, 1).unwrap();
    let pop = agg.mean(Observable::WorkerPopulation);
    let e = agg.mean(Observable::ExplorerCount);
    let x = agg.mean(Observable::ExploiterCount);
    for i in 0..pop.len() {
        assert!((e[i] + x[i] - pop[i]).abs() < 1e-9);
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    write_csv(&agg, &path).unwrap();
    let back = read_csv(&path).unwrap();
    let (pop, e, x) = (
        back.mean(Observable::WorkerPopulation),
        back.mean(Observable::ExplorerCount),
        back.mean(Observable::ExploiterCount),
    );
    for i in 0..pop.len() {
        // each printed value carries at most half a unit in its sixth digit
        let tolerance = 5e-6 * (e[i].abs() + x[i].abs() + pop[i].abs()).max(1.0);
        assert!((e[i] + x[i] - pop[i]).abs() <= tolerance, "row {i}");
    }
}
