//! Consistent-Gaussian density evolution for variable-regular ensembles.
//!
//! Message densities are reduced to their means; a mean-`m` LLR message is
//! modeled as `N(m, 2m)`. One decoding iteration maps the check-output mean
//! `m_prev` to
//!
//! ```text
//! m_next = φ^{−1}( 1 − [1 − φ(m_λ + (d_v − 1)·m_prev)]^{d_c − 1} )
//! ```
//!
//! for a `d_c`-regular check side, and to the `ρ_j`-weighted mixture of the
//! per-degree terms otherwise. `m_λ = 4R·E_b/N_0` is the channel-LLR mean.
//!
//! Two numerical hazards are handled here rather than left to callers:
//!
//! * `1 − (1 − p)^{d_c−1}` collapses when `p` is tiny; it is evaluated as
//!   `−expm1((d_c−1)·ln1p(−p))`, which is exact down to subnormal `p`.
//! * Once the variable-side argument passes the φ underflow regime the whole
//!   update moves to the log domain (`ln z = ln(d_c−1) + ln φ(x)`), otherwise
//!   trajectories would spuriously freeze at the point where φ hits
//!   subnormals (around x ≈ 2800).

use crate::error::{Error, Result};
use crate::gauss_phi::{ln_phi_at_switch, ln_phi_large, phi_inv_ln, phi_inv_raw, phi_raw, LARGE_X_SWITCH};

/// Mean ceiling at which a trajectory is declared diverged-to-certainty.
pub const DEFAULT_MEAN_CEILING: f64 = 1e6;

/// Default iteration budget used by [`decoding_threshold`].
pub const DEFAULT_THRESHOLD_BUDGET: usize = 2000;

/// A `d_v`-variable-regular ensemble with a regular or irregular check side.
///
/// The check side is stored edge-perspective: `ρ_j` is the fraction of edges
/// incident on degree-`j` checks. `regular(d_v, d_c)` is the single-term
/// special case.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    d_v: u32,
    rho: Vec<(u32, f64)>,
}

impl EnsembleSpec {
    /// A (d_v, d_c)-regular ensemble.
    pub fn regular(d_v: u32, d_c: u32) -> Result<Self> {
        Self::irregular(d_v, &[(d_c, 1.0)])
    }

    /// A variable-regular ensemble with edge-perspective check distribution
    /// `rho` = [(degree, fraction), ...].
    pub fn irregular(d_v: u32, rho: &[(u32, f64)]) -> Result<Self> {
        if d_v < 3 {
            return Err(Error::validation(format!(
                "variable degree must be >= 3, got {d_v}"
            )));
        }
        if rho.is_empty() {
            return Err(Error::validation("check-degree distribution is empty"));
        }
        let mut rho: Vec<(u32, f64)> = rho.to_vec();
        rho.sort_by_key(|&(j, _)| j);
        let mut sum = 0.0;
        for window in rho.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::validation(format!(
                    "duplicate check degree {}",
                    window[0].0
                )));
            }
        }
        for &(j, f) in &rho {
            if j < 2 {
                return Err(Error::validation(format!(
                    "check degree must be >= 2, got {j}"
                )));
            }
            if !f.is_finite() || f < 0.0 {
                return Err(Error::validation(format!(
                    "check-degree fraction must be finite and >= 0, got {f}"
                )));
            }
            sum += f;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!(
                "check-degree fractions must sum to 1, got {sum}"
            )));
        }
        Ok(EnsembleSpec { d_v, rho })
    }

    pub fn d_v(&self) -> u32 {
        self.d_v
    }

    /// Edge-perspective check-degree distribution, sorted by degree.
    pub fn rho(&self) -> &[(u32, f64)] {
        &self.rho
    }

    /// The check degree, if the check side is regular.
    pub fn d_c_regular(&self) -> Option<u32> {
        match self.rho.as_slice() {
            [(j, _)] => Some(*j),
            _ => None,
        }
    }

    /// Design rate `R = 1 − d_v · Σ_j ρ_j / j`.
    pub fn rate(&self) -> f64 {
        let inv_dc: f64 = self.rho.iter().map(|&(j, f)| f / j as f64).sum();
        1.0 - self.d_v as f64 * inv_dc
    }
}

/// AWGN channel operating point for a given design rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelCondition {
    ebn0_db: f64,
    rate: f64,
    sigma_sq: f64,
    m_lambda: f64,
}

impl ChannelCondition {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::domain(format!("E_b/N_0 must be finite, got {ebn0_db}")));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::domain(format!("rate must lie in (0,1), got {rate}")));
        }
        let esn0 = rate * 10f64.powf(ebn0_db / 10.0);
        let sigma_sq = 1.0 / (2.0 * esn0);
        // Defined through sigma_sq so that m_lambda == 2/sigma_sq holds
        // bit-exactly (it is the identity the decoder-side LLR scaling uses).
        let m_lambda = 2.0 / sigma_sq;
        Ok(ChannelCondition { ebn0_db, rate, sigma_sq, m_lambda })
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Noise variance σ² = 1/(2R·10^{E_b/N_0 [dB]/10}).
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// Mean channel LLR m_λ = 4R·E_b/N_0 = 2/σ².
    pub fn m_lambda(&self) -> f64 {
        self.m_lambda
    }
}

/// Mean-LLR trajectory produced by [`de_trajectory`].
///
/// `means[l]` is the check-output mean after iteration `l + 1` (the zero
/// initial message is not stored). Under the consistent-Gaussian model each
/// mean `m` carries variance `2m`, so variances are derived, not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DETrajectory {
    means: Vec<f64>,
    diverged: bool,
}

impl DETrajectory {
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Consistent-Gaussian variances, elementwise `2·mean`.
    pub fn variances(&self) -> Vec<f64> {
        self.means.iter().map(|m| 2.0 * m).collect()
    }

    /// True if the trajectory crossed the divergence ceiling before the
    /// iteration budget ran out.
    pub fn diverged_to_certainty(&self) -> bool {
        self.diverged
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// Check-output mean for one check degree, taking the log-domain route when
/// the variable-side argument `x` is past the φ underflow switch.
pub(crate) fn step_one_degree(x: f64, d_c: u32) -> f64 {
    debug_assert!(d_c >= 2);
    if x <= LARGE_X_SWITCH {
        let p = phi_raw(x);
        let z = -((d_c as f64 - 1.0) * (-p).ln_1p()).exp_m1();
        phi_inv_raw(z)
    } else {
        let ln_z = (d_c as f64 - 1.0).ln() + ln_phi_large(x);
        if ln_z >= ln_phi_at_switch() {
            phi_inv_raw(ln_z.exp())
        } else {
            phi_inv_ln(ln_z)
        }
    }
}

pub(crate) fn de_step_raw(m_prev: f64, ens: &EnsembleSpec, m_lambda: f64) -> f64 {
    let x = m_lambda + (ens.d_v as f64 - 1.0) * m_prev;
    ens.rho
        .iter()
        .map(|&(j, f)| if f == 0.0 { 0.0 } else { f * step_one_degree(x, j) })
        .sum()
}

/// One density-evolution iteration: maps the previous check-output mean to
/// the next one at the given channel condition.
///
/// # Errors
/// `Error::Domain` if `m_prev` is negative or non-finite.
pub fn de_step(m_prev: f64, ens: &EnsembleSpec, ch: &ChannelCondition) -> Result<f64> {
    if !m_prev.is_finite() || m_prev < 0.0 {
        return Err(Error::domain(format!(
            "de_step requires finite m_prev >= 0, got {m_prev}"
        )));
    }
    Ok(de_step_raw(m_prev, ens, ch.m_lambda()))
}

/// Iterates [`de_step`] from the zero message for up to `max_iters`
/// iterations, stopping early once the mean crosses `ceiling`.
pub fn de_trajectory_with_ceiling(
    ens: &EnsembleSpec,
    ch: &ChannelCondition,
    max_iters: usize,
    ceiling: f64,
) -> Result<DETrajectory> {
    if max_iters < 1 {
        return Err(Error::validation("max_iters must be >= 1"));
    }
    if !(ceiling > 0.0) {
        return Err(Error::validation(format!("ceiling must be > 0, got {ceiling}")));
    }
    let mut means = Vec::with_capacity(max_iters.min(4096));
    let mut m = 0.0;
    let mut diverged = false;
    for _ in 0..max_iters {
        m = de_step_raw(m, ens, ch.m_lambda());
        means.push(m);
        if m >= ceiling {
            diverged = true;
            break;
        }
    }
    Ok(DETrajectory { means, diverged })
}

/// [`de_trajectory_with_ceiling`] with the default ceiling of 1e6.
pub fn de_trajectory(
    ens: &EnsembleSpec,
    ch: &ChannelCondition,
    max_iters: usize,
) -> Result<DETrajectory> {
    de_trajectory_with_ceiling(ens, ch, max_iters, DEFAULT_MEAN_CEILING)
}

/// True if the trajectory at `ebn0_db` reaches the ceiling within `budget`
/// iterations. Exits early when the per-iteration increment stalls below
/// 1e−13 relative — a trajectory pinned at a sub-threshold fixed point would
/// otherwise burn the whole budget without changing the answer.
fn diverges(ens: &EnsembleSpec, ebn0_db: f64, budget: usize, ceiling: f64) -> Result<bool> {
    let ch = ChannelCondition::new(ebn0_db, ens.rate())?;
    let mut m = 0.0;
    for _ in 0..budget {
        let next = de_step_raw(m, ens, ch.m_lambda());
        if next >= ceiling {
            return Ok(true);
        }
        if next - m < 1e-13 * m.max(1.0) {
            return Ok(false);
        }
        m = next;
    }
    Ok(false)
}

/// Smallest `E_b/N_0` (to within `tol_db`) at which density evolution
/// diverges to certainty, found by bisection over [−2 dB, +8 dB].
///
/// # Errors
/// `Error::NonConvergence` if the bracket does not straddle the threshold
/// (diverging already at −2 dB, or failing to diverge at +8 dB within
/// `budget` iterations); `Error::Validation` for non-positive `tol_db`.
pub fn decoding_threshold_with_budget(
    ens: &EnsembleSpec,
    tol_db: f64,
    budget: usize,
) -> Result<f64> {
    if !(tol_db > 0.0) {
        return Err(Error::validation(format!("tol_db must be > 0, got {tol_db}")));
    }
    let mut lo = -2.0;
    let mut hi = 8.0;
    if diverges(ens, lo, budget, DEFAULT_MEAN_CEILING)? {
        return Err(Error::NonConvergence(format!(
            "ensemble already diverges at the {lo} dB bracket end"
        )));
    }
    if !diverges(ens, hi, budget, DEFAULT_MEAN_CEILING)? {
        return Err(Error::NonConvergence(format!(
            "no divergence at the {hi} dB bracket end within {budget} iterations"
        )));
    }
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if diverges(ens, mid, budget, DEFAULT_MEAN_CEILING)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`decoding_threshold_with_budget`] with the default 2000-iteration budget.
pub fn decoding_threshold(ens: &EnsembleSpec, tol_db: f64) -> Result<f64> {
    decoding_threshold_with_budget(ens, tol_db, DEFAULT_THRESHOLD_BUDGET)
}
