//! Search for elementary trapping sets inside a variable-regular code.
//!
//! Strategy: enumerate short cycles of the Tanner graph (every interesting
//! set contains one), then grow each cycle's variable set one variable at a
//! time, attaching new variables only through currently-degree-1 checks so
//! that the induced subgraph stays elementary at every step. Growth is
//! pruned by reachability of the requested (a, b) targets: a step changes b
//! by dv − 2h where h ≥ 1 is the number of degree-1 checks the new variable
//! absorbs, so from (s, b) a target (a_t, b_t) with k = a_t − s added
//! variables is reachable only if b − k·dv ≤ b_t ≤ b + k·(dv − 2) and
//! b_t − b + k·dv is even.
//!
//! The walk is depth-first with a visited-set keyed on the variable set, so
//! each set is expanded once no matter how many insertion orders reach it.
//! The search is fully deterministic: seeds are processed in sorted order
//! and candidate variables in ascending index order.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::ldpc_codes::ParityCheckMatrix;
use crate::trapping_set::TrappingSetTopology;

/// Search targets and budgets.
#[derive(Clone, Debug)]
pub struct TsSearchConfig {
    /// The (a, b) classes to collect.
    pub targets: Vec<(u32, u32)>,
    /// Stop recording a class once this many instances are found (the
    /// search keeps running for the other classes).
    pub max_per_target: usize,
    /// Global budget on growth steps; when it runs out the report is
    /// marked incomplete.
    pub max_expansions: u64,
    /// Restrict seed cycles to those passing through these variables.
    /// `None` seeds from every short cycle in the graph.
    pub anchor_vars: Option<Vec<u32>>,
    /// Seed from cycles with up to this many variables (3 ⇒ six-cycles,
    /// 4 ⇒ six- and eight-cycles). Range 2..=6.
    pub seed_cycle_max_vars: usize,
    /// Cap on the visited-set size; beyond it, states are still checked
    /// against the set but no longer inserted (work may repeat, results
    /// stay correct).
    pub visited_cap: usize,
}

impl TsSearchConfig {
    pub fn new(targets: Vec<(u32, u32)>) -> Self {
        TsSearchConfig {
            targets,
            max_per_target: 4,
            max_expansions: 50_000_000,
            anchor_vars: None,
            seed_cycle_max_vars: 4,
            visited_cap: 1 << 23,
        }
    }
}

/// One trapping set located by the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundTrappingSet {
    pub a: u32,
    pub b: u32,
    /// Column indices in the code, ascending.
    pub vars: Vec<u32>,
    pub topology: TrappingSetTopology,
}

/// Search outcome.
#[derive(Clone, Debug)]
pub struct TsSearchReport {
    pub found: Vec<FoundTrappingSet>,
    /// Number of distinct seed cycles grown.
    pub seeds: usize,
    /// Growth steps consumed.
    pub expansions: u64,
    /// False iff the expansion budget ran out before the reachable space
    /// was fully explored.
    pub complete: bool,
}

/// Finds elementary (a, b) trapping sets of a variable-regular code.
///
/// # Errors
/// `Error::Validation` if the code is not variable-regular with dv ≥ 3, no
/// targets are given, a target is unsatisfiable (b > a·dv or parity
/// mismatch), an anchor is out of range, or `seed_cycle_max_vars` is
/// outside 2..=6.
pub fn find_elementary_trapping_sets(
    h: &ParityCheckMatrix,
    cfg: &TsSearchConfig,
) -> Result<TsSearchReport> {
    let dv = h
        .regular_column_weight()
        .ok_or_else(|| Error::validation("code is not variable-regular"))? as u32;
    if dv < 3 {
        return Err(Error::validation(format!("variable degree {dv} < 3")));
    }
    if cfg.targets.is_empty() {
        return Err(Error::validation("no search targets given"));
    }
    for &(a, b) in &cfg.targets {
        if a == 0 || b > a * dv || (a * dv - b) % 2 != 0 {
            return Err(Error::validation(format!(
                "target ({a}, {b}) is unsatisfiable for dv = {dv}"
            )));
        }
    }
    if !(2..=6).contains(&cfg.seed_cycle_max_vars) {
        return Err(Error::validation("seed_cycle_max_vars must be in 2..=6"));
    }
    if let Some(anchors) = &cfg.anchor_vars {
        if let Some(&v) = anchors.iter().find(|&&v| v as usize >= h.n()) {
            return Err(Error::validation(format!("anchor variable {v} out of range")));
        }
    }

    let seeds = enumerate_seed_sets(h, cfg);
    let mut search = Search {
        h,
        dv,
        targets: cfg
            .targets
            .iter()
            .map(|&(a, b)| Target { a, b, remaining: cfg.max_per_target })
            .collect(),
        max_a: cfg.targets.iter().map(|&(a, _)| a).max().unwrap(),
        in_set: vec![false; h.n()],
        vars: Vec::new(),
        check_deg: vec![0u8; h.m()],
        b_cur: 0,
        visited: HashSet::new(),
        visited_cap: cfg.visited_cap,
        expansions: 0,
        max_expansions: cfg.max_expansions,
        budget_hit: false,
        found: Vec::new(),
    };

    for seed in &seeds {
        if search.budget_hit {
            break;
        }
        search.run_seed(seed);
    }

    // The visited set stops admitting entries at its cap, after which a
    // state can be expanded (and recorded) more than once; drop repeats.
    let mut seen = HashSet::new();
    let mut found = search.found;
    found.retain(|f| seen.insert(f.vars.clone()));

    Ok(TsSearchReport {
        found,
        seeds: seeds.len(),
        expansions: search.expansions,
        complete: !search.budget_hit,
    })
}

/// Variable sets of short Tanner-graph cycles, sorted and deduplicated.
fn enumerate_seed_sets(h: &ParityCheckMatrix, cfg: &TsSearchConfig) -> Vec<Vec<u32>> {
    let mut sets: HashSet<Vec<u32>> = HashSet::new();
    let anchors: Vec<u32> = match &cfg.anchor_vars {
        Some(list) => {
            let mut a = list.clone();
            a.sort_unstable();
            a.dedup();
            a
        }
        None => (0..h.n() as u32).collect(),
    };
    let restrict_min = cfg.anchor_vars.is_none();
    for &v0 in &anchors {
        cycles_through(h, v0, cfg.seed_cycle_max_vars, restrict_min, &mut sets);
    }
    let mut out: Vec<Vec<u32>> = sets.into_iter().collect();
    out.sort();
    out
}

/// DFS for cycles through `v0` with at most `max_vars` variables. When
/// `restrict_min` is set, only cycles whose minimum variable is `v0` are
/// kept (used for the all-anchors sweep so each cycle is visited once).
fn cycles_through(
    h: &ParityCheckMatrix,
    v0: u32,
    max_vars: usize,
    restrict_min: bool,
    sets: &mut HashSet<Vec<u32>>,
) {
    let mut var_path = vec![v0];
    let mut check_path: Vec<u32> = Vec::new();
    dfs_cycles(h, v0, max_vars, restrict_min, &mut var_path, &mut check_path, sets);
}

fn dfs_cycles(
    h: &ParityCheckMatrix,
    v0: u32,
    max_vars: usize,
    restrict_min: bool,
    var_path: &mut Vec<u32>,
    check_path: &mut Vec<u32>,
    sets: &mut HashSet<Vec<u32>>,
) {
    let u = *var_path.last().unwrap();
    for &c in h.column(u as usize) {
        if check_path.contains(&c) {
            continue;
        }
        for &w in h.row(c as usize) {
            if w == u {
                continue;
            }
            if w == v0 {
                if var_path.len() >= 2 {
                    let mut set = var_path.clone();
                    set.sort_unstable();
                    sets.insert(set);
                }
                continue;
            }
            if restrict_min && w < v0 {
                continue;
            }
            if var_path.len() < max_vars && !var_path.contains(&w) {
                var_path.push(w);
                check_path.push(c);
                dfs_cycles(h, v0, max_vars, restrict_min, var_path, check_path, sets);
                check_path.pop();
                var_path.pop();
            }
        }
    }
}

struct Target {
    a: u32,
    b: u32,
    remaining: usize,
}

struct Search<'a> {
    h: &'a ParityCheckMatrix,
    dv: u32,
    targets: Vec<Target>,
    max_a: u32,
    in_set: Vec<bool>,
    vars: Vec<u32>, // kept sorted
    check_deg: Vec<u8>,
    b_cur: i64,
    visited: HashSet<u128>,
    visited_cap: usize,
    expansions: u64,
    max_expansions: u64,
    budget_hit: bool,
    found: Vec<FoundTrappingSet>,
}

impl Search<'_> {
    fn run_seed(&mut self, seed: &[u32]) {
        // Install the seed set, rejecting seeds whose induced subgraph is
        // already non-elementary (a check of degree ≥ 3 can never heal).
        let mut installed = Vec::with_capacity(seed.len());
        let mut ok = true;
        for &v in seed {
            if !self.push_var(v) {
                ok = false;
                break;
            }
            installed.push(v);
        }
        if ok {
            self.grow();
        }
        for &v in installed.iter().rev() {
            self.pop_var(v);
        }
        debug_assert_eq!(self.b_cur, 0);
        debug_assert!(self.vars.is_empty());
    }

    /// Adds `v` to the set, updating induced degrees and b. Returns false
    /// (with the state rolled back) if a check would exceed degree 2.
    fn push_var(&mut self, v: u32) -> bool {
        for (i, &c) in self.h.column(v as usize).iter().enumerate() {
            let deg = &mut self.check_deg[c as usize];
            if *deg >= 2 {
                // roll back the columns already bumped
                for &c2 in &self.h.column(v as usize)[..i] {
                    let d = &mut self.check_deg[c2 as usize];
                    *d -= 1;
                    self.b_cur += if *d == 1 { 1 } else { -1 };
                }
                return false;
            }
            *deg += 1;
            self.b_cur += if *deg == 1 { 1 } else { -1 };
        }
        self.in_set[v as usize] = true;
        let pos = self.vars.partition_point(|&x| x < v);
        self.vars.insert(pos, v);
        true
    }

    fn pop_var(&mut self, v: u32) {
        for &c in self.h.column(v as usize) {
            let d = &mut self.check_deg[c as usize];
            self.b_cur += if *d == 1 { -1 } else { 1 };
            *d -= 1;
        }
        self.in_set[v as usize] = false;
        let pos = self.vars.partition_point(|&x| x < v);
        debug_assert_eq!(self.vars[pos], v);
        self.vars.remove(pos);
    }

    /// Recursive growth from the current state.
    fn grow(&mut self) {
        if !self.mark_visited() {
            return; // state already expanded
        }
        let s = self.vars.len() as u32;
        let b = self.b_cur as u32;

        for t in &mut self.targets {
            if t.remaining > 0 && t.a == s && t.b == b {
                t.remaining -= 1;
                let topology = TrappingSetTopology::from_subgraph(self.h, &self.vars)
                    .expect("growth invariant keeps the subgraph elementary");
                self.found.push(FoundTrappingSet { a: s, b, vars: self.vars.clone(), topology });
                break;
            }
        }

        if s >= self.max_a || !self.some_target_reachable(s, b) || self.budget_hit {
            return;
        }

        let candidates = self.candidates();
        for v in candidates {
            if self.budget_hit {
                return;
            }
            self.expansions += 1;
            if self.expansions >= self.max_expansions {
                self.budget_hit = true;
            }
            let pushed = self.push_var(v);
            debug_assert!(pushed, "candidate filter admitted an invalid variable");
            self.grow();
            self.pop_var(v);
        }
    }

    /// True if some unfilled target is still reachable from (s, b) by
    /// adding k = a_t − s ≥ 1 variables.
    fn some_target_reachable(&self, s: u32, b: u32) -> bool {
        let dv = self.dv as i64;
        self.targets.iter().any(|t| {
            if t.remaining == 0 || t.a <= s {
                return false;
            }
            let k = (t.a - s) as i64;
            let db = t.b as i64 - b as i64;
            db >= -k * dv && db <= k * (dv - 2) && (db + k * dv) % 2 == 0
        })
    }

    /// Variables attachable through degree-1 checks only, ascending.
    fn candidates(&self) -> Vec<u32> {
        let mut cand: Vec<u32> = Vec::new();
        for &v in &self.vars {
            for &c in self.h.column(v as usize) {
                if self.check_deg[c as usize] != 1 {
                    continue;
                }
                for &u in self.h.row(c as usize) {
                    if !self.in_set[u as usize] {
                        cand.push(u);
                    }
                }
            }
        }
        cand.sort_unstable();
        cand.dedup();
        cand.retain(|&u| {
            self.h
                .column(u as usize)
                .iter()
                .all(|&c| self.check_deg[c as usize] < 2)
        });
        cand
    }

    /// Hashes the current variable set; returns false if already visited.
    fn mark_visited(&mut self) -> bool {
        let mut h1 = std::collections::hash_map::DefaultHasher::new();
        self.vars.hash(&mut h1);
        let mut h2 = std::collections::hash_map::DefaultHasher::new();
        0x9e3779b97f4a7c15u64.hash(&mut h2);
        self.vars.hash(&mut h2);
        let key = ((h1.finish() as u128) << 64) | h2.finish() as u128;
        if self.visited.contains(&key) {
            return false;
        }
        if self.visited.len() < self.visited_cap {
            self.visited.insert(key);
        }
        true
    }
}
