//! Flooding sum-product decoding on the binary-input AWGN channel, with
//! per-iteration message statistics and a deterministic Monte-Carlo harness.
//!
//! All simulations send the all-zero codeword (BPSK maps bit 0 to +1), so the
//! channel LLRs are `2 y / sigma^2` with `y = 1 + noise` and a decoded bit is
//! in error exactly when the hard decision is 1.
//!
//! The check-node update is the usual tanh rule,
//!
//! ```text
//! out_k = 2 atanh( prod_{i != k} tanh(m_i / 2) ),
//! ```
//!
//! evaluated in sign/log-magnitude form: with `f(x) = ln coth(x/2)`, which is
//! its own inverse on (0, inf),
//!
//! ```text
//! |out_k| = f( sum_{i != k} f(|m_i|) ),    sign(out_k) = prod_{i != k} sign(m_i).
//! ```
//!
//! The direct product form loses the message entirely once a single input
//! magnitude exceeds ~38 (`tanh` rounds to 1.0 and `atanh` returns inf); the
//! log-magnitude form stays finite and accurate there, which matters because
//! above-threshold LLRs grow without bound as iterations proceed.
//!
//! Message magnitudes are capped at [`OVERFLOW_CAP`] so that repeated
//! variable-node sums cannot reach infinity; an optional saturation limit
//! models fixed-point decoders by clipping every propagated message to
//! `[-L, L]`. Statistics are always recorded from the raw check outputs
//! *before* any clipping, so a saturated decoder reports what the check nodes
//! computed, not what survived the clip.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::de_engine::ChannelCondition;
use crate::error::{Error, Result};
use crate::ldpc_codes::ParityCheckMatrix;

/// Hard cap on propagated message magnitudes when no saturation limit is
/// configured. Keeps variable-node sums finite without measurably perturbing
/// decisions (a magnitude of 1e9 is certainty for every practical purpose).
pub const OVERFLOW_CAP: f64 = 1e9;

/// Decoder settings: iteration budget, optional message saturation, and
/// whether decoding stops at the first iteration whose hard decisions satisfy
/// every check.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderConfig {
    max_iters: u32,
    saturation_limit: Option<f64>,
    early_termination: bool,
}

impl DecoderConfig {
    /// A non-saturating configuration that always runs `max_iters` iterations.
    ///
    /// # Errors
    /// `Error::Validation` if `max_iters` is zero.
    pub fn new(max_iters: u32) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        Ok(DecoderConfig { max_iters, saturation_limit: None, early_termination: false })
    }

    /// Clips every propagated message to `[-limit, limit]`.
    ///
    /// # Errors
    /// `Error::Validation` unless `limit` is finite and positive.
    pub fn with_saturation(mut self, limit: f64) -> Result<Self> {
        if !(limit > 0.0 && limit.is_finite()) {
            return Err(Error::validation(format!(
                "saturation limit must be finite and positive, got {limit}"
            )));
        }
        self.saturation_limit = Some(limit);
        Ok(self)
    }

    /// Stop as soon as the hard decisions form a codeword (off by default, so
    /// per-iteration statistics cover the full iteration budget).
    pub fn with_early_termination(mut self, on: bool) -> Self {
        self.early_termination = on;
        self
    }

    /// Iteration budget.
    pub fn max_iters(&self) -> u32 {
        self.max_iters
    }

    /// Saturation limit, if configured.
    pub fn saturation_limit(&self) -> Option<f64> {
        self.saturation_limit
    }

    /// Whether decoding stops at the first codeword-satisfying iteration.
    pub fn early_termination(&self) -> bool {
        self.early_termination
    }
}

/// Read-out of one iteration's check-output message statistics.
///
/// `variance` is the unbiased sample variance (zero when fewer than two
/// messages were recorded).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

/// Running moments for one iteration, kept in Welford form so that streams
/// from different frames merge exactly like concatenated samples.
#[derive(Clone, Copy, Debug)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Moments {
    fn empty() -> Self {
        Moments { count: 0, mean: 0.0, m2: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    fn summary(&self) -> IterationSummary {
        IterationSummary {
            count: self.count,
            mean: if self.count == 0 { 0.0 } else { self.mean },
            variance: if self.count < 2 { 0.0 } else { self.m2 / (self.count - 1) as f64 },
            min: self.min,
            max: self.max,
        }
    }
}

/// Per-iteration statistics of the check-to-variable messages, accumulated
/// across one or many decoded frames.
///
/// Iteration `l` collects every check output computed during the decoder's
/// `l`-th iteration, before any saturation clip. [`merge`](Self::merge) pools
/// two accumulations as if their sample streams had been concatenated, so the
/// operation is commutative and associative up to floating-point rounding.
#[derive(Clone, Debug, Default)]
pub struct LLRIterationStats {
    iters: Vec<Moments>,
}

impl LLRIterationStats {
    /// Number of iterations with recorded data.
    pub fn num_iterations(&self) -> usize {
        self.iters.len()
    }

    /// Statistics for 1-based iteration `l`, or `None` if `l` is zero or past
    /// the last recorded iteration.
    pub fn iteration(&self, l: usize) -> Option<IterationSummary> {
        if l == 0 {
            return None;
        }
        self.iters.get(l - 1).map(Moments::summary)
    }

    /// All summaries in iteration order (index 0 holds iteration 1).
    pub fn summaries(&self) -> Vec<IterationSummary> {
        self.iters.iter().map(Moments::summary).collect()
    }

    /// Pools `other` into `self` per iteration. Iterations present in only
    /// one operand are carried through unchanged.
    pub fn merge(&mut self, other: &LLRIterationStats) {
        if other.iters.len() > self.iters.len() {
            self.iters.resize_with(other.iters.len(), Moments::empty);
        }
        for (mine, theirs) in self.iters.iter_mut().zip(&other.iters) {
            mine.merge(theirs);
        }
    }

    fn record(&mut self, iter_index: usize, x: f64) {
        if iter_index >= self.iters.len() {
            self.iters.resize_with(iter_index + 1, Moments::empty);
        }
        self.iters[iter_index].push(x);
    }
}

/// Channel LLRs for one all-zero-codeword frame on the AWGN channel with
/// noise standard deviation `sigma`: `lambda_i = 2 (1 + z_i) / sigma^2` with
/// `z_i ~ N(0, sigma^2)` drawn from a `seed`-keyed generator.
///
/// The LLRs are consistent-Gaussian: mean `2 / sigma^2` and variance twice
/// that, which is what the density-evolution recursion assumes.
///
/// # Errors
/// `Error::Validation` if `n` is zero; `Error::Domain` unless `sigma` is
/// finite and positive.
pub fn awgn_llr_channel(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::validation("channel needs at least one variable"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma must be finite and positive, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("sigma validated above");
    let scale = 2.0 / (sigma * sigma);
    Ok((0..n).map(|_| scale * (1.0 + noise.sample(&mut rng))).collect())
}

/// Result of decoding one frame.
#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    /// Hard decisions from the final iteration's posteriors (0 or 1 per
    /// variable; a zero posterior decides 0).
    pub decisions: Vec<u8>,
    /// True when the final decisions satisfy every parity check.
    pub success: bool,
    /// Iterations actually executed (less than the budget only with early
    /// termination).
    pub iterations_run: u32,
    /// Check-output statistics for each executed iteration.
    pub stats: LLRIterationStats,
}

/// `f(x) = ln coth(x/2)` for `x > 0`, its own inverse on the positive axis.
///
/// Evaluated as `ln(1 + e^-x) - ln(1 - e^-x)` via `ln_1p`/`exp_m1` so both
/// tails are accurate: `f(x) ~ 2 e^-x` for large `x` and `f(x) ~ ln(2/x)`
/// near zero. Underflows to exactly 0.0 for `x` beyond ~745, which is the
/// correct limit.
fn f_llr(x: f64) -> f64 {
    let e = (-x).exp();
    e.ln_1p() - (-(-x).exp_m1()).ln()
}

/// Reusable scratch buffers for [`check_update_into`], sized to the largest
/// check degree seen so far.
#[derive(Default)]
struct CheckWork {
    fs: Vec<f64>,
    suffix: Vec<f64>,
    outs: Vec<f64>,
}

/// Tanh-rule outputs for one check node: `work.outs[k]` excludes `msgs[k]`.
///
/// The per-edge exclusion sums `sum_{i != k} f(|m_i|)` are formed from
/// prefix and suffix partial sums rather than by subtracting `f(|m_k|)` from
/// the total: a near-erasure input has an `f` value around 700 that would
/// absorb the others' (often denormal) contributions entirely, turning a
/// correct output of ~35 into an overflow. Zero inputs are treated as
/// magnitude `f64::MIN_POSITIVE` (an erasure forces the other outputs toward
/// zero, which the log-magnitude path reproduces without special cases).
///
/// When an exclusion sum underflows to exactly 0.0 — every other input
/// magnitude is 745 or more — the output is evaluated in the log domain
/// instead: `f(sum 2 e^-m_i) = m_min - ln(sum e^-(m_i - m_min))` to the
/// accuracy of the large-`x` tail `f(x) ~ 2 e^-x`. Outputs are capped at
/// [`OVERFLOW_CAP`]; a degree-1 check (no other inputs at all) emits the cap.
fn check_update_into(msgs: &[f64], work: &mut CheckWork) {
    let d = msgs.len();
    work.fs.clear();
    work.fs.extend(msgs.iter().map(|m| f_llr(m.abs().max(f64::MIN_POSITIVE))));
    work.suffix.clear();
    work.suffix.resize(d + 1, 0.0);
    for k in (0..d).rev() {
        work.suffix[k] = work.suffix[k + 1] + work.fs[k];
    }
    let neg_count = msgs.iter().filter(|&&m| m < 0.0).count() as u32;

    work.outs.clear();
    let mut prefix = 0.0;
    for (k, &m) in msgs.iter().enumerate() {
        let rest = prefix + work.suffix[k + 1];
        prefix += work.fs[k];
        let mag = if rest > 0.0 {
            f_llr(rest).min(OVERFLOW_CAP)
        } else if d > 1 {
            let m_min = msgs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &x)| x.abs())
                .fold(f64::INFINITY, f64::min);
            let s: f64 = msgs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &x)| (m_min - x.abs()).exp())
                .sum();
            (m_min - s.ln()).min(OVERFLOW_CAP)
        } else {
            OVERFLOW_CAP
        };
        let others_negative = neg_count - u32::from(m < 0.0);
        work.outs.push(if others_negative % 2 == 1 { -mag } else { mag });
    }
}

/// Runs flooding sum-product decoding of one frame against `h`.
///
/// Each iteration updates every check node from the current variable-to-check
/// messages (initially the channel LLRs), records the raw outputs into the
/// statistics, clips the propagated copies to the saturation limit if one is
/// configured, then updates every variable node and takes hard decisions from
/// the posteriors. With `early_termination` the loop stops at the first
/// iteration whose decisions satisfy all checks; otherwise it always runs
/// `max_iters` iterations and reports the final state.
///
/// # Errors
/// `Error::Validation` if `channel_llrs` has the wrong length or contains a
/// non-finite value.
pub fn spa_decode(
    h: &ParityCheckMatrix,
    channel_llrs: &[f64],
    cfg: &DecoderConfig,
) -> Result<DecodeOutcome> {
    let n = h.n();
    let m = h.m();
    if channel_llrs.len() != n {
        return Err(Error::validation(format!(
            "got {} channel LLRs for a code with {n} variables",
            channel_llrs.len()
        )));
    }
    if let Some(bad) = channel_llrs.iter().find(|x| !x.is_finite()) {
        return Err(Error::validation(format!("channel LLRs must be finite, got {bad}")));
    }

    // Edges are laid out row by row: edge (c, k) is the k-th variable of
    // check c. Each variable keeps the indices of its edges for the
    // variable-node pass.
    let mut row_offset = Vec::with_capacity(m + 1);
    row_offset.push(0usize);
    for c in 0..m {
        row_offset.push(row_offset[c] + h.row(c).len());
    }
    let num_edges = row_offset[m];
    let mut var_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    for c in 0..m {
        for (k, &v) in h.row(c).iter().enumerate() {
            var_edges[v as usize].push((row_offset[c] + k) as u32);
        }
    }

    let clip = |x: f64| -> f64 {
        let capped = x.clamp(-OVERFLOW_CAP, OVERFLOW_CAP);
        match cfg.saturation_limit {
            Some(l) => capped.clamp(-l, l),
            None => capped,
        }
    };

    let mut v2c = vec![0.0f64; num_edges];
    for v in 0..n {
        for &e in &var_edges[v] {
            v2c[e as usize] = clip(channel_llrs[v]);
        }
    }

    let mut c2v = vec![0.0f64; num_edges];
    let mut stats = LLRIterationStats::default();
    let mut decisions = vec![0u8; n];
    let mut success = false;
    let mut iterations_run = 0u32;
    let mut work = CheckWork::default();

    for l in 0..cfg.max_iters {
        iterations_run = l + 1;

        for c in 0..m {
            let lo = row_offset[c];
            let hi = row_offset[c + 1];
            check_update_into(&v2c[lo..hi], &mut work);
            for (k, &out) in work.outs.iter().enumerate() {
                stats.record(l as usize, out);
                c2v[lo + k] = clip(out);
            }
        }

        for v in 0..n {
            let total: f64 = var_edges[v].iter().map(|&e| c2v[e as usize]).sum();
            let posterior = channel_llrs[v] + total;
            decisions[v] = u8::from(posterior < 0.0);
            for &e in &var_edges[v] {
                v2c[e as usize] = clip(posterior - c2v[e as usize]);
            }
        }

        success = h.is_codeword(&decisions)?;
        if success && cfg.early_termination {
            break;
        }
    }

    Ok(DecodeOutcome { decisions, success, iterations_run, stats })
}

/// Aggregate result of a Monte-Carlo run: error counts over all frames plus
/// the pooled per-iteration message statistics.
#[derive(Clone, Debug)]
pub struct MonteCarloReport {
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub stats: LLRIterationStats,
}

/// splitmix64 output mixer; used to derive independent per-frame seeds.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seed for frame `i` of a run keyed by `seed`: the splitmix64 stream
/// `mix64(seed + (i + 1) * golden_gamma)`. A fixed rule, so runs are
/// reproducible regardless of how frames are scheduled across threads.
fn frame_seed(seed: u64, i: u64) -> u64 {
    mix64(seed.wrapping_add((i + 1).wrapping_mul(0x9e3779b97f4a7c15)))
}

/// Decodes `num_frames` independent all-zero-codeword frames of `h` at
/// `ebn0_db` (with `rate` fixing the SNR-to-sigma conversion) and pools the
/// outcomes. Frames are distributed across threads but seeded and merged in
/// frame order, so the report is deterministic in `seed`.
///
/// A frame counts as a frame error when its final hard decisions violate some
/// check; its bit errors are the number of 1-decisions (the all-zero codeword
/// was sent).
///
/// # Errors
/// `Error::Validation` if `num_frames` is zero; validation and domain errors
/// from the channel model and decoder pass through.
pub fn monte_carlo_run(
    h: &ParityCheckMatrix,
    ebn0_db: f64,
    rate: f64,
    num_frames: u64,
    cfg: &DecoderConfig,
    seed: u64,
) -> Result<MonteCarloReport> {
    if num_frames == 0 {
        return Err(Error::validation("num_frames must be at least 1"));
    }
    let ch = ChannelCondition::new(ebn0_db, rate)?;
    let sigma = ch.sigma_sq().sqrt();
    let n = h.n();

    let per_frame: Vec<(bool, u64, LLRIterationStats)> = (0..num_frames)
        .into_par_iter()
        .map(|i| {
            let llrs = awgn_llr_channel(n, sigma, frame_seed(seed, i))?;
            let out = spa_decode(h, &llrs, cfg)?;
            let bit_errors = out.decisions.iter().map(|&b| u64::from(b)).sum();
            Ok((out.success, bit_errors, out.stats))
        })
        .collect::<Result<_>>()?;

    let mut report = MonteCarloReport {
        frames: num_frames,
        frame_errors: 0,
        bit_errors: 0,
        stats: LLRIterationStats::default(),
    };
    for (success, bit_errors, stats) in &per_frame {
        if !success {
            report.frame_errors += 1;
        }
        report.bit_errors += bit_errors;
        report.stats.merge(stats);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc_codes::generate_regular;
    use rand::Rng;

    fn single_check() -> ParityCheckMatrix {
        ParityCheckMatrix::from_column_adjacency(1, vec![vec![0], vec![0], vec![0]]).unwrap()
    }

    #[test]
    fn certain_channel_decodes_in_one_iteration() {
        let h = generate_regular(48, 3, 6, 7).unwrap();
        let llrs = vec![50.0; 48];
        let cfg = DecoderConfig::new(10).unwrap().with_early_termination(true);
        let out = spa_decode(&h, &llrs, &cfg).unwrap();
        assert!(out.success);
        assert_eq!(out.iterations_run, 1);
        assert!(out.decisions.iter().all(|&b| b == 0));
        assert_eq!(out.stats.num_iterations(), 1);
    }

    #[test]
    fn single_check_update_matches_hand_computation() {
        // Inputs (+2, +2, -1): the output toward the third variable combines
        // the two +2 messages, 2 atanh(tanh(1)^2) = +1.32506..., and flips
        // the third variable's posterior to -1 + 1.32506 > 0.
        let h = single_check();
        let cfg = DecoderConfig::new(1).unwrap();
        let out = spa_decode(&h, &[2.0, 2.0, -1.0], &cfg).unwrap();

        let to_third = 2.0 * (1.0f64.tanh() * 1.0f64.tanh()).atanh();
        let to_first = -2.0 * (1.0f64.tanh() * 0.5f64.tanh()).atanh();
        let s = out.stats.iteration(1).unwrap();
        assert_eq!(s.count, 3);
        assert!((s.max - to_third).abs() < 1e-12 * to_third);
        assert!((s.min - to_first).abs() < 1e-12 * to_first.abs());
        assert!((to_third - 1.3250027473578643).abs() < 1e-9);

        assert!(out.success);
        assert_eq!(out.decisions, vec![0, 0, 0]);
    }

    #[test]
    fn check_update_agrees_with_direct_tanh_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut work = CheckWork::default();
        for _ in 0..2000 {
            let deg = rng.gen_range(2..=12);
            let msgs: Vec<f64> = (0..deg)
                .map(|_| {
                    let mag = rng.gen_range(0.05..8.0);
                    if rng.gen_bool(0.5) {
                        -mag
                    } else {
                        mag
                    }
                })
                .collect();
            check_update_into(&msgs, &mut work);
            for (k, &got) in work.outs.iter().enumerate() {
                let prod: f64 = msgs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &m)| (m / 2.0).tanh())
                    .product();
                let naive = 2.0 * prod.atanh();
                if naive.is_finite() {
                    assert!(
                        (got - naive).abs() <= 1e-9 * naive.abs().max(1e-12),
                        "deg {deg} edge {k}: {got} vs {naive}"
                    );
                }
            }
        }
    }

    #[test]
    fn erasure_input_forces_zero_outputs_elsewhere() {
        let mut work = CheckWork::default();
        check_update_into(&[0.0, 3.0, -4.0], &mut work);
        // The erased edge still receives information from the other two; the
        // other outputs are killed by the erasure.
        assert!(work.outs[0] < 0.0);
        assert!(work.outs[1].abs() < 1e-12);
        assert!(work.outs[2].abs() < 1e-12);
    }

    #[test]
    fn erasure_does_not_absorb_large_companions() {
        // f(|near-zero|) is ~700 and would swallow the others' ~1e-15
        // contributions if exclusion sums were formed by subtraction; the
        // output toward the erased edge must still be ~min(35, 40).
        let mut work = CheckWork::default();
        check_update_into(&[1e-9, 35.0, 40.0], &mut work);
        let expected = f_llr(f_llr(35.0) + f_llr(40.0));
        assert!(
            (work.outs[0] - expected).abs() < 1e-9 * expected,
            "got {}, want {expected}",
            work.outs[0]
        );
        assert!(work.outs[0] < 35.0);
    }

    #[test]
    fn saturated_certain_inputs_use_the_log_domain_tail() {
        // All other inputs at 800 underflow f entirely; the log-domain
        // fallback reproduces min - ln(count) instead of overflowing.
        let mut work = CheckWork::default();
        check_update_into(&[800.0, 800.0, -800.0], &mut work);
        let expected = 800.0 - 2.0f64.ln();
        for (k, sign) in [(0, -1.0), (1, -1.0), (2, 1.0)] {
            assert!((work.outs[k] - sign * expected).abs() < 1e-9);
        }
        // A degree-1 check has no inputs to combine: certainty, capped.
        check_update_into(&[3.0], &mut work);
        assert_eq!(work.outs, vec![OVERFLOW_CAP]);
    }

    #[test]
    fn stats_merge_matches_concatenated_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..257).map(|_| rng.gen_range(-6.0..6.0)).collect())
            .collect();

        let stats_of = |chunks: &[&[f64]]| {
            let mut s = LLRIterationStats::default();
            for chunk in chunks {
                for &x in *chunk {
                    s.record(0, x);
                }
            }
            s
        };
        let whole = stats_of(&[&samples[0], &samples[1], &samples[2]]).iteration(1).unwrap();

        let parts: Vec<LLRIterationStats> =
            samples.iter().map(|c| stats_of(&[c.as_slice()])).collect();
        let mut left = parts[0].clone();
        left.merge(&parts[1]);
        left.merge(&parts[2]);
        let mut right = parts[2].clone();
        right.merge(&parts[0]);
        right.merge(&parts[1]);

        for merged in [left.iteration(1).unwrap(), right.iteration(1).unwrap()] {
            assert_eq!(merged.count, whole.count);
            assert_eq!(merged.min, whole.min);
            assert_eq!(merged.max, whole.max);
            assert!((merged.mean - whole.mean).abs() <= 1e-9 * whole.mean.abs().max(1.0));
            assert!((merged.variance - whole.variance).abs() <= 1e-9 * whole.variance.max(1.0));
        }
    }

    #[test]
    fn merging_unequal_iteration_counts_keeps_the_tail() {
        let mut a = LLRIterationStats::default();
        a.record(0, 1.0);
        let mut b = LLRIterationStats::default();
        b.record(0, 3.0);
        b.record(1, 7.0);
        a.merge(&b);
        assert_eq!(a.num_iterations(), 2);
        let first = a.iteration(1).unwrap();
        assert_eq!(first.count, 2);
        assert!((first.mean - 2.0).abs() < 1e-15);
        assert_eq!(a.iteration(2).unwrap().count, 1);
        assert_eq!(a.iteration(2).unwrap().mean, 7.0);
        assert!(a.iteration(3).is_none());
        assert!(a.iteration(0).is_none());
    }

    #[test]
    fn statistics_are_recorded_before_the_saturation_clip() {
        let h = generate_regular(48, 3, 6, 7).unwrap();
        let llrs = awgn_llr_channel(48, 0.9, 3).unwrap();
        let plain = DecoderConfig::new(4).unwrap();
        let saturated = DecoderConfig::new(4).unwrap().with_saturation(1.0).unwrap();

        let free = spa_decode(&h, &llrs, &plain).unwrap();
        let clipped = spa_decode(&h, &llrs, &saturated).unwrap();

        // A saturation limit above every message that actually occurs leaves
        // the recorded statistics bit-identical to the free decoder's: the
        // clip sits after the recording and never fires.
        let loose = DecoderConfig::new(4).unwrap().with_saturation(1e8).unwrap();
        let loosely = spa_decode(&h, &llrs, &loose).unwrap();
        for l in 1..=4 {
            assert_eq!(free.stats.iteration(l), loosely.stats.iteration(l));
        }

        // With a tight limit every propagated message (including the initial
        // channel copies) is clipped to [-1, 1], and since a check output
        // never exceeds its smallest input magnitude, even the pre-clip
        // recordings stay inside the band — at every iteration.
        for l in 1..=4 {
            let s = clipped.stats.iteration(l).unwrap();
            assert!(s.max <= 1.0 + 1e-12 && s.min >= -1.0 - 1e-12);
        }
        // And the tight clip genuinely changes the dynamics relative to the
        // free run.
        assert_ne!(
            free.stats.iteration(2).unwrap().mean,
            clipped.stats.iteration(2).unwrap().mean
        );
    }

    #[test]
    fn awgn_channel_has_consistent_gaussian_moments() {
        let ch = ChannelCondition::new(2.8, 0.5).unwrap();
        let sigma = ch.sigma_sq().sqrt();
        let llrs = awgn_llr_channel(200_000, sigma, 12).unwrap();
        let n = llrs.len() as f64;
        let mean = llrs.iter().sum::<f64>() / n;
        let var = llrs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let m_lambda = ch.m_lambda();
        assert!((mean - m_lambda).abs() < 0.02 * m_lambda, "mean {mean} vs {m_lambda}");
        assert!((var - 2.0 * m_lambda).abs() < 0.02 * 2.0 * m_lambda);
    }

    #[test]
    fn awgn_channel_is_deterministic_in_the_seed() {
        let a = awgn_llr_channel(16, 0.8, 99).unwrap();
        let b = awgn_llr_channel(16, 0.8, 99).unwrap();
        let c = awgn_llr_channel(16, 0.8, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn channel_and_decoder_reject_bad_arguments() {
        assert!(awgn_llr_channel(0, 1.0, 0).is_err());
        assert!(awgn_llr_channel(4, 0.0, 0).is_err());
        assert!(awgn_llr_channel(4, f64::NAN, 0).is_err());
        assert!(DecoderConfig::new(0).is_err());
        assert!(DecoderConfig::new(1).unwrap().with_saturation(0.0).is_err());
        assert!(DecoderConfig::new(1).unwrap().with_saturation(f64::INFINITY).is_err());

        let h = single_check();
        let cfg = DecoderConfig::new(1).unwrap();
        assert!(spa_decode(&h, &[1.0, 2.0], &cfg).is_err());
        assert!(spa_decode(&h, &[1.0, 2.0, f64::INFINITY], &cfg).is_err());
        assert!(monte_carlo_run(&h, 2.0, 0.5, 0, &cfg, 1).is_err());
    }

    #[test]
    fn monte_carlo_single_frame_equals_direct_decode() {
        let h = generate_regular(120, 3, 6, 3).unwrap();
        let cfg = DecoderConfig::new(6).unwrap();
        let report = monte_carlo_run(&h, 2.0, 0.5, 1, &cfg, 77).unwrap();

        let ch = ChannelCondition::new(2.0, 0.5).unwrap();
        let llrs = awgn_llr_channel(120, ch.sigma_sq().sqrt(), frame_seed(77, 0)).unwrap();
        let direct = spa_decode(&h, &llrs, &cfg).unwrap();

        assert_eq!(report.frames, 1);
        assert_eq!(report.frame_errors, u64::from(!direct.success));
        assert_eq!(
            report.bit_errors,
            direct.decisions.iter().map(|&b| u64::from(b)).sum::<u64>()
        );
        assert_eq!(report.stats.summaries(), direct.stats.summaries());
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let h = generate_regular(120, 3, 6, 3).unwrap();
        let cfg = DecoderConfig::new(5).unwrap();
        let a = monte_carlo_run(&h, 1.5, 0.5, 20, &cfg, 9).unwrap();
        let b = monte_carlo_run(&h, 1.5, 0.5, 20, &cfg, 9).unwrap();
        assert_eq!(a.frame_errors, b.frame_errors);
        assert_eq!(a.bit_errors, b.bit_errors);
        assert_eq!(a.stats.summaries(), b.stats.summaries());
        let c = monte_carlo_run(&h, 1.5, 0.5, 20, &cfg, 10).unwrap();
        assert!(a.bit_errors != c.bit_errors || a.stats.summaries() != c.stats.summaries());
    }

    #[test]
    fn early_termination_shortens_the_iteration_trace() {
        let h = generate_regular(48, 3, 6, 7).unwrap();
        let llrs = vec![40.0; 48];
        let free_running = DecoderConfig::new(8).unwrap();
        let stopping = DecoderConfig::new(8).unwrap().with_early_termination(true);
        let long = spa_decode(&h, &llrs, &free_running).unwrap();
        let short = spa_decode(&h, &llrs, &stopping).unwrap();
        assert_eq!(long.iterations_run, 8);
        assert_eq!(long.stats.num_iterations(), 8);
        assert_eq!(short.iterations_run, 1);
        assert!(long.success && short.success);
    }
}
