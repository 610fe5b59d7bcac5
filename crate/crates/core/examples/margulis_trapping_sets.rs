//! Locates the dominant elementary trapping sets of the built-in
//! (2640, 1320) algebraic code and prints their topologies.
//!
//! The search is anchored at one variable of each class — the construction
//! is vertex-transitive within a class, so any trapping-set type present in
//! the code has an instance through the anchors provided the set contains a
//! short cycle (all known dominant sets here do).
//!
//! Usage:
//!     cargo run --release -p defloor --example margulis_trapping_sets [OUT_DIR]
//!
//! With OUT_DIR given, one JSON topology file per class is written there
//! (first instance found, e.g. `ts_12_4.json`).

use defloor::{
    build_state_space, construct_margulis, find_elementary_trapping_sets, TsSearchConfig,
};

fn main() {
    let out_dir = std::env::args().nth(1);
    let h = construct_margulis();
    eprintln!(
        "code built: n = {}, m = {}, four-cycles = {}",
        h.n(),
        h.m(),
        h.count_four_cycles()
    );

    let mut cfg = TsSearchConfig::new(vec![(12, 4), (14, 4)]);
    cfg.anchor_vars = Some(vec![0, 1320]);
    cfg.max_per_target = 3;
    cfg.max_expansions = 400_000_000;
    cfg.visited_cap = 1 << 24;
    if let Ok(spec) = std::env::var("TS_HUNT") {
        // e.g. TS_HUNT="12:4:200:1200000000[:5]" — target, cap, budget,
        // optional seed-cycle size
        let parts: Vec<u64> = spec.split(':').map(|s| s.parse().unwrap()).collect();
        cfg.targets = vec![(parts[0] as u32, parts[1] as u32)];
        cfg.max_per_target = parts[2] as usize;
        cfg.max_expansions = parts[3];
        if let Some(&sz) = parts.get(4) {
            cfg.seed_cycle_max_vars = sz as usize;
        }
        cfg.visited_cap = 1 << 25;
    }
    let t0 = std::time::Instant::now();
    let report = find_elementary_trapping_sets(&h, &cfg).expect("search");
    eprintln!(
        "search: {} seeds, {} expansions, complete = {}, elapsed = {:.1?}",
        report.seeds,
        report.expansions,
        report.complete,
        t0.elapsed()
    );

    let verbose = std::env::var("TS_HUNT").is_err();
    let mut written = std::collections::HashSet::new();
    for f in &report.found {
        let model = build_state_space(&f.topology).expect("state space");
        println!(
            "({:2},{:2})  r = {:.6}  vars = {:?}",
            f.a,
            f.b,
            model.r(),
            f.vars
        );
        if verbose {
            println!("  {}", f.topology.to_json());
        }
        if let Some(dir) = &out_dir {
            if written.insert((f.a, f.b)) {
                let path = format!("{dir}/ts_{}_{}.json", f.a, f.b);
                f.topology.save(&path).expect("write fixture");
                eprintln!("wrote {path}");
            }
        }
    }
    if report.found.is_empty() {
        eprintln!("no trapping sets found in the configured classes");
        std::process::exit(1);
    }
}
