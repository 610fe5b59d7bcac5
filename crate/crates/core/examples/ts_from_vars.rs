//! Extracts the induced trapping-set topology of a variable subset of the
//! (2640, 1320) construction, reports its spectral radius, and optionally
//! saves it as JSON. This is how the bundled fixture files were produced
//! from the variable sets located by `margulis_trapping_sets`.
//!
//! Usage: ts_from_vars <v1,v2,...> [OUT_PATH]

use defloor::{build_state_space, construct_margulis, TrappingSetTopology};

fn main() {
    let mut args = std::env::args().skip(1);
    let vars: Vec<u32> = args
        .next()
        .expect("first argument: comma-separated variable indices")
        .split(',')
        .map(|s| s.trim().parse().expect("variable indices must be integers"))
        .collect();
    let out = args.next();

    let h = construct_margulis();
    let ts = TrappingSetTopology::from_subgraph(&h, &vars).expect("subset is not elementary");
    let model = build_state_space(&ts).expect("state space");
    let r = model.r_detail();
    println!(
        "(a, b) = ({}, {})  states = {}  r = {:.6} via {:?}",
        ts.a,
        ts.b(),
        model.n_states(),
        r.value,
        r.method
    );
    if let Some(path) = out {
        ts.save(&path).expect("write topology JSON");
        println!("saved {path}");
    }
}
