//! Elementary trapping sets: topology representation and validation, the
//! linear state-space model of message growth inside a set, and search for
//! such sets inside a code.
//!
//! An (a, b) elementary trapping set is a set of `a` variable nodes whose
//! induced subgraph contains only degree-1 and degree-2 checks, `b` of them
//! degree-1. Messages circulating on the induced subgraph evolve (in the
//! linearized regime) as
//!
//! ```text
//! x_l = ḡ′_l · A · x_{l−1} + B·λ + B_ex·λ_l^(ex) ,    x_0 = B·λ
//! ```
//!
//! with one state per directed variable→check edge of the degree-2 checks.
//! The spectral radius r = ρ(A) is the growth rate of the homogeneous part
//! and the quantity error-floor analysis revolves around.

mod search;
mod spectral;

pub use search::{find_elementary_trapping_sets, FoundTrappingSet, TsSearchConfig, TsSearchReport};
pub use spectral::{spectral_radius, SpectralMethod, SpectralRadius};

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ldpc_codes::ParityCheckMatrix;

/// An elementary trapping-set topology over variables `0..a`.
///
/// `deg2_checks` lists each degree-2 check as the (unordered) pair of
/// variables it joins; `deg1_checks` lists one entry per degree-1 check,
/// naming the variable it attaches to. Together with the variable degree
/// `dv` this pins the induced subgraph exactly.
///
/// Serialized as JSON with exactly these field names; round trips are
/// bit-exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingSetTopology {
    pub dv: u32,
    pub a: u32,
    pub deg2_checks: Vec<[u32; 2]>,
    pub deg1_checks: Vec<u32>,
}

impl TrappingSetTopology {
    /// Builds and validates a topology.
    pub fn new(
        dv: u32,
        a: u32,
        deg2_checks: Vec<[u32; 2]>,
        deg1_checks: Vec<u32>,
    ) -> Result<Self> {
        let ts = TrappingSetTopology { dv, a, deg2_checks, deg1_checks };
        ts.validate()?;
        Ok(ts)
    }

    /// Number of degree-1 checks (the `b` of "(a, b) trapping set").
    pub fn b(&self) -> usize {
        self.deg1_checks.len()
    }

    /// Checks every structural invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.dv < 3 {
            return Err(Error::validation(format!(
                "variable degree must be >= 3, got {}",
                self.dv
            )));
        }
        if self.a == 0 {
            return Err(Error::validation("topology has no variables"));
        }
        let mut incidence = vec![0u32; self.a as usize];
        for (k, pair) in self.deg2_checks.iter().enumerate() {
            if pair[0] == pair[1] {
                return Err(Error::validation(format!(
                    "degree-2 check {k} joins variable {} to itself",
                    pair[0]
                )));
            }
            for &v in pair {
                let slot = incidence.get_mut(v as usize).ok_or_else(|| {
                    Error::validation(format!(
                        "degree-2 check {k} references variable {v}, but a = {}",
                        self.a
                    ))
                })?;
                *slot += 1;
            }
        }
        for (k, &v) in self.deg1_checks.iter().enumerate() {
            let slot = incidence.get_mut(v as usize).ok_or_else(|| {
                Error::validation(format!(
                    "degree-1 check {k} references variable {v}, but a = {}",
                    self.a
                ))
            })?;
            *slot += 1;
        }
        if let Some(v) = incidence.iter().position(|&cnt| cnt != self.dv) {
            return Err(Error::validation(format!(
                "variable {v} has {} incident check slots, expected dv = {}",
                incidence[v], self.dv
            )));
        }
        // Implied by per-variable counts, but the bookkeeping identity is
        // cheap to restate: 2·(#deg2) + b = a·dv.
        debug_assert_eq!(
            2 * self.deg2_checks.len() + self.deg1_checks.len(),
            self.a as usize * self.dv as usize
        );
        Ok(())
    }

    /// Extracts the topology induced by `vars` inside a variable-regular
    /// code. Variables are relabeled 0..a in the order given; checks appear
    /// in ascending check-index order.
    ///
    /// # Errors
    /// `Error::Validation` if `vars` repeats a variable, the code is not
    /// variable-regular, or the induced subgraph has a check of degree ≥ 3
    /// (not elementary).
    pub fn from_subgraph(h: &ParityCheckMatrix, vars: &[u32]) -> Result<Self> {
        let dv = h
            .regular_column_weight()
            .ok_or_else(|| Error::validation("code is not variable-regular"))?;
        let mut local = std::collections::HashMap::new();
        for (i, &v) in vars.iter().enumerate() {
            if v as usize >= h.n() {
                return Err(Error::validation(format!("variable {v} out of range")));
            }
            if local.insert(v, i as u32).is_some() {
                return Err(Error::validation(format!("variable {v} listed twice")));
            }
        }
        let mut touched: Vec<(u32, Vec<u32>)> = Vec::new(); // (check, local members)
        let mut by_check = std::collections::HashMap::new();
        for &v in vars {
            for &c in h.column(v as usize) {
                let entry = by_check.entry(c).or_insert_with(Vec::new);
                entry.push(local[&v]);
            }
        }
        let mut checks: Vec<u32> = by_check.keys().copied().collect();
        checks.sort_unstable();
        for c in checks {
            touched.push((c, by_check.remove(&c).unwrap()));
        }
        let mut deg2 = Vec::new();
        let mut deg1 = Vec::new();
        for (c, members) in touched {
            match members.as_slice() {
                [v] => deg1.push(*v),
                [u, v] => deg2.push([*u, *v]),
                more => {
                    return Err(Error::validation(format!(
                        "check {c} has induced degree {} — subgraph is not elementary",
                        more.len()
                    )))
                }
            }
        }
        TrappingSetTopology::new(dv as u32, vars.len() as u32, deg2, deg1)
    }

    /// Parses and validates a topology from its JSON form.
    pub fn from_json(text: &str) -> Result<Self> {
        let ts: TrappingSetTopology = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("topology JSON: {e}")))?;
        ts.validate()?;
        Ok(ts)
    }

    /// JSON serialization (single line, field order fixed).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("topology serialization cannot fail")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_json())?)
    }
}

/// The (0,1) matrices of the linearized in-set message recursion, together
/// with the dominant eigenvalue of `A`.
#[derive(Clone, Debug)]
pub struct StateSpaceModel {
    a_mat: DMatrix<f64>,
    b_mat: DMatrix<f64>,
    b_ex: DMatrix<f64>,
    r: SpectralRadius,
}

impl StateSpaceModel {
    /// State-update matrix A (n_e × n_e, one state per directed
    /// variable→degree-2-check edge).
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a_mat
    }

    /// Channel injection matrix B (n_e × a); row e has a single 1 in the
    /// column of e's source variable.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    /// Extrinsic injection matrix B_ex (n_e × b); row e marks the degree-1
    /// checks attached to e's source variable.
    pub fn b_ex(&self) -> &DMatrix<f64> {
        &self.b_ex
    }

    /// Number of states n_e = 2·(#degree-2 checks).
    pub fn n_states(&self) -> usize {
        self.a_mat.nrows()
    }

    /// Dominant eigenvalue of A.
    pub fn r(&self) -> f64 {
        self.r.value
    }

    /// Dominant eigenvalue with the method that produced it.
    pub fn r_detail(&self) -> &SpectralRadius {
        &self.r
    }
}

/// Constructs the state-space matrices of a topology.
///
/// States are indexed 2k (first listed variable of `deg2_checks[k]` → check
/// k) and 2k+1 (second listed variable → check k). `A[e, f] = 1` iff
/// f = (u → c′) with c′ ≠ c joining u to e's source variable v — that is,
/// f's message enters v through c′ and leaves on e after the variable
/// update.
///
/// # Errors
/// `Error::Validation` if the topology is malformed.
pub fn build_state_space(ts: &TrappingSetTopology) -> Result<StateSpaceModel> {
    ts.validate()?;
    let n_e = 2 * ts.deg2_checks.len();
    let a_vars = ts.a as usize;
    let b = ts.deg1_checks.len();

    // source[e] = variable sending on state e; partner[e] = the variable
    // receiving e's message through the shared degree-2 check.
    let mut source = Vec::with_capacity(n_e);
    let mut partner = Vec::with_capacity(n_e);
    for pair in &ts.deg2_checks {
        source.push(pair[0]);
        partner.push(pair[1]);
        source.push(pair[1]);
        partner.push(pair[0]);
    }

    let mut a_mat = DMatrix::zeros(n_e, n_e);
    for e in 0..n_e {
        for f in 0..n_e {
            // f feeds e when f arrives at e's source without backtracking:
            // f's receiving end is source[e] and f is not e's own check in
            // the reverse direction (same check index ⇔ e ^ 1 == f).
            if partner[f] == source[e] && (f / 2) != (e / 2) {
                a_mat[(e, f)] = 1.0;
            }
        }
    }

    let mut b_mat = DMatrix::zeros(n_e, a_vars);
    for e in 0..n_e {
        b_mat[(e, source[e] as usize)] = 1.0;
    }

    let mut b_ex = DMatrix::zeros(n_e, b);
    for (k, &v) in ts.deg1_checks.iter().enumerate() {
        for e in 0..n_e {
            if source[e] == v {
                b_ex[(e, k)] = 1.0;
            }
        }
    }

    let r = spectral_radius(&a_mat)?;
    Ok(StateSpaceModel { a_mat, b_mat, b_ex, r })
}

/// Per-iteration mean modified gain ḡ′_l applied to the recursion's
/// homogeneous term; values must lie in (0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum GainSchedule {
    /// The same gain every iteration; `Constant(1.0)` is the asymptotic
    /// (no-attenuation) limit.
    Constant(f64),
    /// Explicit per-iteration gains; iterations beyond the end reuse the
    /// last entry.
    PerIteration(Vec<f64>),
}

impl GainSchedule {
    fn validate(&self) -> Result<()> {
        let ok = |g: f64| g > 0.0 && g <= 1.0;
        match self {
            GainSchedule::Constant(g) if ok(*g) => Ok(()),
            GainSchedule::PerIteration(gs) if !gs.is_empty() && gs.iter().all(|&g| ok(g)) => Ok(()),
            _ => Err(Error::validation("gains must be in (0, 1] and non-empty")),
        }
    }

    /// Gain for 1-based iteration `l`.
    fn at(&self, l: usize) -> f64 {
        match self {
            GainSchedule::Constant(g) => *g,
            GainSchedule::PerIteration(gs) => gs[(l - 1).min(gs.len() - 1)],
        }
    }
}

/// Runs the linear recursion for `iters` iterations and returns the state
/// vectors `x_0, x_1, ..., x_iters`.
///
/// `lambda` holds one channel LLR per topology variable. `lambda_ex` maps
/// (1-based) iteration `l` to the extrinsic inputs on the degree-1 checks;
/// pass an empty slice outer vector to drive all extrinsics with zero.
/// If `lambda_ex` is shorter than `iters`, missing iterations use zeros.
///
/// # Errors
/// `Error::Validation` on any dimension mismatch or invalid gains.
pub fn simulate_state_space(
    model: &StateSpaceModel,
    gains: &GainSchedule,
    lambda: &[f64],
    lambda_ex: &[Vec<f64>],
    iters: usize,
) -> Result<Vec<Vec<f64>>> {
    gains.validate()?;
    if lambda.len() != model.b_mat.ncols() {
        return Err(Error::validation(format!(
            "lambda has {} entries, topology has {} variables",
            lambda.len(),
            model.b_mat.ncols()
        )));
    }
    for (i, ex) in lambda_ex.iter().enumerate() {
        if ex.len() != model.b_ex.ncols() {
            return Err(Error::validation(format!(
                "lambda_ex[{i}] has {} entries, topology has {} degree-1 checks",
                ex.len(),
                model.b_ex.ncols()
            )));
        }
    }
    if iters < 1 {
        return Err(Error::validation("iters must be >= 1"));
    }

    let lam = DVector::from_column_slice(lambda);
    let channel_term = &model.b_mat * &lam;
    let mut x = channel_term.clone();
    let mut out = Vec::with_capacity(iters + 1);
    out.push(x.as_slice().to_vec());
    for l in 1..=iters {
        let mut next = &model.a_mat * &x;
        next *= gains.at(l);
        next += &channel_term;
        if let Some(ex) = lambda_ex.get(l - 1) {
            next += &model.b_ex * DVector::from_column_slice(ex);
        }
        x = next;
        out.push(x.as_slice().to_vec());
    }
    Ok(out)
}

/// Elementwise mean/√variance.
///
/// Zero variances are reported as infinite ratios rather than errors.
///
/// # Errors
/// `Error::Validation` on length mismatch, `Error::Domain` on a negative
/// variance.
pub fn mean_to_std_ratio(means: &[f64], variances: &[f64]) -> Result<Vec<f64>> {
    if means.len() != variances.len() {
        return Err(Error::validation(format!(
            "{} means vs {} variances",
            means.len(),
            variances.len()
        )));
    }
    means
        .iter()
        .zip(variances)
        .map(|(&m, &v)| {
            if v < 0.0 {
                Err(Error::domain(format!("negative variance {v}")))
            } else if v == 0.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(m / v.sqrt())
            }
        })
        .collect()
}
