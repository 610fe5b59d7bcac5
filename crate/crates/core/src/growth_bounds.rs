//! Closed-form lower bounds on the density-evolution mean recursion and the
//! SNR/LLR thresholds they induce.
//!
//! The chain starts from two scalar lemmas. For x, β > 0 the map
//! y ↦ y + β·ln(1 + y/x) is strictly increasing on (−x, ∞), so
//! y + β·ln(1 + y/x) = α has a unique root ([`lemma1_unique_y`]), and any m
//! with m + β·ln m ≥ x + β·ln x + α satisfies m > x + α/(1 + β/x)
//! ([`lemma2_lower_bound`]). Applied with β = 2 to the check-node update —
//! using the two-sided bounds on φ and a truncated binomial valid once
//! (d_c−1)·φ(x) < 1 — this yields a per-iteration lower bound on the mean
//! ([`growth_lower_bound_step`]):
//!
//! ```text
//! m ≥ x − 4·ln[((d_c−1)/δ)·(1 − 1/(7x))] / (1 + 2/x),
//!         x = m_λ + (d_v−1)·m_prev,  δ = 1 − 3/m
//! ```
//!
//! (check-irregular codes subtract the ρ-weighted mixture of the ln terms).
//! δ depends on the bounded quantity itself, so it is resolved by one
//! substitution of the density-evolution prediction for m.
//!
//! Letting x → ∞ gives an SNR above which the mean grows by a factor
//! approaching d_v−1 every iteration ([`snr_threshold_breakout`]); keeping
//! the finite-x terms and aiming only for growth rate r < d_v−1 relaxes the
//! requirement to a curve over (m_prev, E_b/N_0) pairs
//! ([`snr_llr_threshold_curve`], [`required_mean_for_growth`]): with
//! ε = d_v−1−r, growth at rate r needs
//!
//! ```text
//! R·E_b/N_0  >  ln[((d_c−1)/δ)·(1 − 1/(7x))] / (1 + 2/x)  −  ε·m_prev/4 .
//! ```

use crate::de_engine::{self, ChannelCondition, EnsembleSpec};
use crate::error::{Error, Result};
use crate::gauss_phi;

/// A growth-rate goal: "the mean should eventually grow at least like r^l"
/// for an ensemble. The slack ε = d_v − 1 − r is what the finite-m terms of
/// the threshold condition trade against.
#[derive(Clone, Debug)]
pub struct GrowthQuery {
    ens: EnsembleSpec,
    r: f64,
}

impl GrowthQuery {
    /// # Errors
    /// `Error::Validation` unless 0 ≤ r < d_v − 1.
    pub fn new(ens: EnsembleSpec, r: f64) -> Result<Self> {
        let cap = ens.d_v() as f64 - 1.0;
        if !(r >= 0.0 && r < cap) {
            return Err(Error::validation(format!(
                "target growth rate must lie in [0, {cap}), got {r}"
            )));
        }
        Ok(GrowthQuery { ens, r })
    }

    pub fn ens(&self) -> &EnsembleSpec {
        &self.ens
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Slack ε = d_v − 1 − r (strictly positive by construction).
    pub fn epsilon(&self) -> f64 {
        self.ens.d_v() as f64 - 1.0 - self.r
    }
}

/// Intermediate quantities of one bound evaluation, for callers that want
/// to inspect the lemma machinery rather than just the bound value.
#[derive(Clone, Debug)]
pub struct BoundParams {
    /// Variable-node output mean x = m_λ + (d_v−1)·m_prev.
    pub x: f64,
    /// (check degree, δ_j = 1 − 3/m_j) with m_j the degree-j
    /// density-evolution output used for the self-consistent substitution.
    pub deltas: Vec<(u32, f64)>,
    /// Aggregated offset: the bound is x + alpha/(1 + beta/x).
    pub alpha: f64,
    /// Lemma-1/2 slope constant; 2 for the consistent-Gaussian bound.
    pub beta: f64,
    /// Root of y + beta·ln(1 + y/x) = alpha; x + y is the sharper (implicit)
    /// form of the same bound, so y > −x and x + y ≥ the closed-form bound.
    pub y: f64,
}

/// Solves y + beta·ln(1 + y/x) = alpha for the unique y > −x.
///
/// The left side is strictly increasing, so the root is bracketed by
/// [0, alpha] for alpha ≥ 0 and by [x·(e^(alpha/beta) − 1), 0] otherwise,
/// and bisection converges unconditionally; absolute tolerance 1e−10.
///
/// # Errors
/// `Error::Domain` unless x > 0, beta > 0, and alpha is finite.
pub fn lemma1_unique_y(alpha: f64, x: f64, beta: f64) -> Result<f64> {
    check_lemma_args(x, alpha, beta)?;
    let (mut lo, mut hi) = if alpha >= 0.0 {
        (0.0, alpha)
    } else {
        // β·ln(1 + y/x) = α alone at the lower end, so f(lo) = lo + α < α.
        (x * (alpha / beta).exp_m1(), 0.0)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid + beta * (mid / x).ln_1p() < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1e-3) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The closed-form relaxation x + alpha/(1 + beta/x) of the Lemma-1 root.
///
/// # Errors
/// `Error::Domain` unless x > 0, beta > 0, and alpha is finite.
pub fn lemma2_lower_bound(x: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_lemma_args(x, alpha, beta)?;
    Ok(x + alpha / (1.0 + beta / x))
}

fn check_lemma_args(x: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("x must be positive and finite, got {x}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must be positive and finite, got {beta}")));
    }
    if !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be finite, got {alpha}")));
    }
    Ok(())
}

/// Evaluates the bound's ingredients at one step: x, the per-degree δ_j
/// from the density-evolution substitution, the aggregated ln-term offset
/// α, β = 2, and the Lemma-1 root y.
///
/// # Errors
/// `Error::Domain` for non-positive `m_prev`; `Error::BoundNotApplicable`
/// when the truncated-binomial guard (d_c−1)·φ(x) < 1 fails or some
/// degree's predicted mean is ≤ 3 (δ_j would leave (0, 1)).
pub fn growth_bound_params(
    m_prev: f64,
    ens: &EnsembleSpec,
    ch: &ChannelCondition,
) -> Result<BoundParams> {
    if !(m_prev > 0.0) || !m_prev.is_finite() {
        return Err(Error::domain(format!(
            "m_prev must be positive and finite, got {m_prev}"
        )));
    }
    let x = ch.m_lambda() + (ens.d_v() as f64 - 1.0) * m_prev;
    let ln_offset = bound_ln_offset(x, ens)?;
    let deltas = per_degree_deltas(x, ens)?;
    let alpha = -4.0 * ln_offset;
    let beta = 2.0;
    let y = lemma1_unique_y(alpha, x, beta)?;
    Ok(BoundParams { x, deltas, alpha, beta, y })
}

/// Lower bound on the next check-output mean given the previous one.
///
/// Stays below [`de_engine::de_step`] on the same inputs throughout the
/// bound's validity regime.
///
/// # Errors
/// Same as [`growth_bound_params`].
pub fn growth_lower_bound_step(
    m_prev: f64,
    ens: &EnsembleSpec,
    ch: &ChannelCondition,
) -> Result<f64> {
    let p = growth_bound_params(m_prev, ens, ch)?;
    lemma2_lower_bound(p.x, p.alpha, p.beta)
}

/// δ_j = 1 − 3/m_j per check degree, where m_j is the degree-j
/// density-evolution output at variable mean x.
fn per_degree_deltas(x: f64, ens: &EnsembleSpec) -> Result<Vec<(u32, f64)>> {
    let guard = (max_degree(ens) as f64 - 1.0) * gauss_phi::phi(x)?;
    if guard >= 1.0 {
        return Err(Error::bound_not_applicable(format!(
            "(d_c−1)·φ(x) = {guard:.3} ≥ 1 at x = {x:.3}: means too small for the bound regime"
        )));
    }
    ens.rho()
        .iter()
        .map(|&(j, _)| {
            let m_j = de_engine::step_one_degree(x, j);
            if m_j <= 3.0 {
                return Err(Error::bound_not_applicable(format!(
                    "degree-{j} output mean {m_j:.3} ≤ 3 at x = {x:.3}: δ leaves (0, 1)"
                )));
            }
            Ok((j, 1.0 - 3.0 / m_j))
        })
        .collect()
}

/// The ρ-weighted ln term Σ_j ρ_j·ln[((j−1)/δ_j)·(1 − 1/(7x))].
fn bound_ln_offset(x: f64, ens: &EnsembleSpec) -> Result<f64> {
    let deltas = per_degree_deltas(x, ens)?;
    let finite_x = (1.0 - 1.0 / (7.0 * x)).ln();
    let mut total = 0.0;
    for (&(j, f), &(_, delta)) in ens.rho().iter().zip(&deltas) {
        total += f * (((j as f64 - 1.0) / delta).ln() + finite_x);
    }
    Ok(total)
}

fn max_degree(ens: &EnsembleSpec) -> u32 {
    ens.rho().iter().map(|&(j, _)| j).max().expect("rho is non-empty")
}

/// SNR (dB) above which the ln-term condition holds regardless of the
/// previous mean, in the x → ∞ limit: 10·log₁₀(Σ_j ρ_j·ln((j−1)/δ) / R).
///
/// # Errors
/// `Error::Domain` unless δ ∈ (0, 1], the design rate is in (0, 1), and
/// the ρ-weighted ln term is positive (it vanishes for all-degree-2
/// ensembles at δ = 1, where no finite threshold exists).
pub fn snr_threshold_breakout(ens: &EnsembleSpec, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta must be in (0, 1], got {delta}")));
    }
    let rate = ens.rate();
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::domain(format!("design rate {rate} outside (0, 1)")));
    }
    let ln_term: f64 = ens
        .rho()
        .iter()
        .map(|&(j, f)| f * ((j as f64 - 1.0) / delta).ln())
        .sum();
    if !(ln_term > 0.0) {
        return Err(Error::domain(
            "ln-term is not positive; no finite breakout threshold",
        ));
    }
    Ok(10.0 * (ln_term / rate).log10())
}

/// Outcome of solving the threshold condition in E_b/N_0 at one m_prev.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CurveSolve {
    /// Minimum E_b/N_0 (dB, to 0.001) at which the growth condition holds.
    /// `in_regime` is false when x < 8 at the solution — the bound's
    /// ingredients are known to be inaccurate for such small means.
    Solved { ebn0_db: f64, in_regime: bool },
    /// The condition already holds at the bracket's low end; the threshold
    /// lies at or below it.
    BelowBracket,
    /// The condition fails across the whole bracket.
    NotBracketed,
}

/// One point of the threshold curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub m_prev: f64,
    pub solve: CurveSolve,
}

impl CurvePoint {
    /// The solved threshold, if one exists in the bracket.
    pub fn ebn0_db(&self) -> Option<f64> {
        match self.solve {
            CurveSolve::Solved { ebn0_db, .. } => Some(ebn0_db),
            _ => None,
        }
    }
}

/// E_b/N_0 bracket searched by the curve and threshold solvers, in dB.
const EBN0_BRACKET: (f64, f64) = (-2.0, 20.0);

/// True when the growth condition R·E_b/N_0 > ln-term/(1+2/x) − ε·m/4
/// holds at this channel; treats "bound not applicable" as not holding.
fn growth_condition_holds(m_prev: f64, q: &GrowthQuery, ch: &ChannelCondition) -> bool {
    let x = ch.m_lambda() + (q.ens.d_v() as f64 - 1.0) * m_prev;
    match bound_ln_offset(x, &q.ens) {
        Ok(ln_offset) => {
            let rhs = ln_offset / (1.0 + 2.0 / x) - q.epsilon() * m_prev / 4.0;
            // R·E_b/N_0 in linear units is exactly m_λ/4.
            ch.m_lambda() / 4.0 > rhs
        }
        Err(_) => false,
    }
}

/// For each previous mean in `m_grid`, the minimum E_b/N_0 at which the
/// rate-r growth condition holds, solved by bisection to 0.001 dB over the
/// bracket [−2, 20] dB. Points whose threshold escapes the bracket are
/// reported as such rather than failing the whole curve.
///
/// # Errors
/// `Error::Validation` for an empty grid, a non-positive grid entry, or a
/// rate outside (0, 1).
pub fn snr_llr_threshold_curve(
    q: &GrowthQuery,
    rate: f64,
    m_grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    if m_grid.is_empty() {
        return Err(Error::validation("empty m_prev grid"));
    }
    if let Some(&bad) = m_grid.iter().find(|&&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::validation(format!("grid mean {bad} must be positive")));
    }
    // Channel construction validates the rate once up front.
    ChannelCondition::new(0.0, rate)?;

    let holds = |m_prev: f64, ebn0_db: f64| {
        let ch = ChannelCondition::new(ebn0_db, rate).expect("validated rate, finite bracket");
        growth_condition_holds(m_prev, q, &ch)
    };

    Ok(m_grid
        .iter()
        .map(|&m_prev| {
            let (mut lo, mut hi) = EBN0_BRACKET;
            if !holds(m_prev, hi) {
                return CurvePoint { m_prev, solve: CurveSolve::NotBracketed };
            }
            if holds(m_prev, lo) {
                return CurvePoint { m_prev, solve: CurveSolve::BelowBracket };
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if holds(m_prev, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let ch = ChannelCondition::new(hi, rate).expect("validated rate");
            let x = ch.m_lambda() + (q.ens.d_v() as f64 - 1.0) * m_prev;
            CurvePoint { m_prev, solve: CurveSolve::Solved { ebn0_db: hi, in_regime: x >= 8.0 } }
        })
        .collect())
}

/// Smallest previous mean at which the rate-r growth condition holds at the
/// given SNR — the inverse of [`snr_llr_threshold_curve`] along the m axis.
/// At or above the [`snr_threshold_breakout`] level (δ = 1) the answer is 0
/// by convention: growth holds regime-wide.
///
/// # Errors
/// `Error::NonConvergence` if the condition is never satisfied for
/// m_prev ≤ 1e6; validation errors as for the curve.
pub fn required_mean_for_growth(q: &GrowthQuery, ebn0_db: f64, rate: f64) -> Result<f64> {
    let ch = ChannelCondition::new(ebn0_db, rate)?;
    if ebn0_db >= snr_threshold_breakout(&q.ens, 1.0)? {
        return Ok(0.0);
    }
    let holds = |m: f64| growth_condition_holds(m, q, &ch);

    // Expand until the condition first holds, then bisect; the condition is
    // monotone in m in the regime of interest (the ε·m/4 term wins).
    let mut lo = 0.0;
    let mut hi = None;
    let mut m = 0.25;
    while m <= 1e6 {
        if holds(m) {
            hi = Some(m);
            break;
        }
        lo = m;
        m *= if m >= 1.0 { 2.0 } else { 4.0 };
    }
    let Some(mut hi) = hi else {
        return Err(Error::NonConvergence(format!(
            "growth condition unsatisfied for all m_prev ≤ 1e6 at {ebn0_db} dB"
        )));
    };
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
