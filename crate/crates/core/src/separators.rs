//! Hypergraph orthogonal separators: random binary assignments, XOR
//! amplification, per-vertex words, and the two separator samplers.
//!
//! A separator sample is drawn in six steps: sample `l` amplified binary
//! assignments of the vertices; concatenate them into a word `W(u)` per
//! vertex; draw a target word `W`; draw a norm threshold `r ∈ (0,1)`; return
//! `S = {u : ‖ū‖² ≥ r and W(u) = W}`.
//!
//! Two base assignment samplers are provided:
//!
//! * [`omega_l2`] — project the normalized vectors onto a random Gaussian
//!   direction and color the line by the parity of a Poisson process with
//!   rate `1/√β`. Its far-pair separation probability is certified
//!   (≥ 0.3319 for pairs at squared distance ≥ β), making this the default.
//! * [`omega_l1`] — distance-threshold coloring against a random net `U`:
//!   `ω(u) = 0` iff `min_{w∈U} ‖φ(ū) − φ(w̄)‖² ≤ t` for a random `t`. The
//!   net construction is heuristic (see [`NetGenerator`]), so its base
//!   separation probability is measured per instance by [`estimate_p`]
//!   rather than assumed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::NormalizedEmbedding;
use crate::hypergraph::VertexSet;
use crate::rng::open_unit;
use crate::scalar::{pmax, Scalar};
use crate::sdp::SdpSolution;

/// Amplification counts are capped here; reached only when the measured base
/// separation probability is degenerate.
pub const MAX_AMPLIFICATION: usize = 64;

/// Default scale constant `C` in the threshold range `(0, β/(C·√ln n))` of
/// [`omega_l1`].
pub const DEFAULT_T_SCALE: f64 = 1.0;

/// Base separation probability for the Poisson-parity sampler: its certified
/// far-pair separation is ≥ 0.3, and amplification needs `2p` below that.
pub const L2_BASE_P: f64 = 0.15;

/// Fallback base separation probability for the word sampler when no
/// measurement is available.
pub const L1_DEFAULT_P: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum SeparatorError {
    #[error("separation parameter m must exceed 4 (word-length formula), got {m}")]
    BadSeparation { m: f64 },
    #[error("separation threshold beta must lie in (0,1), got {beta}")]
    BadThreshold { beta: f64 },
    #[error("base separation probability must lie in (0, 1/4), got {p}")]
    BadBaseProbability { p: f64 },
    #[error("word length {l} exceeds 63 bits; separation parameter is too large")]
    WordTooLong { l: usize },
    #[error("embedding has no vertices")]
    EmptyVertexSet,
}

/// Which base assignment sampler drives the separator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparatorVariant {
    /// Net-distance words (heuristic net, per-instance `p` measurement).
    L1Words,
    /// Gaussian-projection Poisson parity (certified separation; default).
    L2Poisson,
}

impl std::str::FromStr for SeparatorVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l1" | "l1_words" => Ok(SeparatorVariant::L1Words),
            "l2" | "l2_poisson" => Ok(SeparatorVariant::L2Poisson),
            other => Err(format!("unknown variant {other:?} (expected l1 or l2)")),
        }
    }
}

/// Derived sampling parameters for a separator run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparatorParams {
    /// Separation parameter (far pairs are suppressed by `1/m`).
    pub m: f64,
    /// Separation threshold on squared distances.
    pub beta: f64,
    /// Word length `l = ⌈log₂m / (1 − log₂(1 + 2/log₂m))⌉`.
    pub l: usize,
    /// Amplification count `K = max(⌈log₂log₂m / (−log₂(1−4p))⌉, 1)`.
    pub k: usize,
    /// Base pair-separation probability the amplification assumes.
    pub p: f64,
    /// Probability scale `α = max(2^−l, 1/n)`.
    pub alpha: f64,
    pub variant: SeparatorVariant,
}

impl SeparatorParams {
    /// Derive all parameters from `(m, β, n, p)`.
    ///
    /// Requires `m > 4` (the word-length denominator must be positive),
    /// `β ∈ (0,1)`, `p ∈ (0, 1/4)`, and a nonempty vertex set.
    pub fn derive(
        m: f64,
        beta: f64,
        n: usize,
        p: f64,
        variant: SeparatorVariant,
    ) -> Result<Self, SeparatorError> {
        if !m.is_finite() || m <= 4.0 {
            return Err(SeparatorError::BadSeparation { m });
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(SeparatorError::BadThreshold { beta });
        }
        if !(p > 0.0 && p < 0.25) {
            return Err(SeparatorError::BadBaseProbability { p });
        }
        if n == 0 {
            return Err(SeparatorError::EmptyVertexSet);
        }
        let log2m = m.log2();
        let denom = 1.0 - (1.0 + 2.0 / log2m).log2();
        let l = (log2m / denom).ceil() as usize;
        if l > 63 {
            return Err(SeparatorError::WordTooLong { l });
        }
        let k_raw = (log2m.log2() / -(1.0 - 4.0 * p).log2()).ceil();
        let k = if k_raw.is_finite() && k_raw >= 1.0 {
            (k_raw as usize).min(MAX_AMPLIFICATION)
        } else {
            1
        };
        let alpha = pmax(0.5f64.powi(l as i32), 1.0 / n as f64);
        Ok(SeparatorParams { m, beta, l, k, p, alpha, variant })
    }
}

/// A binary assignment of the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    /// One bit (0/1) per vertex.
    pub bits: Vec<u8>,
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, u: usize) -> u8 {
        self.bits[u]
    }

    /// XOR another assignment into this one (both over the same vertex set).
    pub fn xor_with(&mut self, other: &Assignment) {
        assert_eq!(self.bits.len(), other.bits.len(), "assignments over different vertex sets");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }
}

/// One drawn separator.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatorSample {
    /// `S = {u : ‖ū‖² ≥ r and W(u) = W}`.
    pub s: VertexSet,
    /// The target word `W`.
    pub word: u64,
    /// The norm threshold `r ∈ (0,1)`.
    pub threshold: f64,
    /// Per-vertex words `W(u)` (first assignment in the most significant of
    /// the `l` low bits, so integer order is lexicographic order).
    pub words: Vec<u64>,
}

/// Gaussian-projection / Poisson-parity assignment.
///
/// Projects every normalized vector onto a random Gaussian direction, then
/// colors the real line by the parity of a rate-`1/√β` Poisson process
/// anchored at the origin: `ω(u) = 1` iff an even number of arrivals falls
/// between 0 and the projection of `u`. Vertices with identical rows always
/// receive the same bit (zero gap ⇒ zero arrivals).
pub fn omega_l2<F: Scalar, R: Rng>(
    emb: &NormalizedEmbedding<F>,
    beta: f64,
    rng: &mut R,
) -> Assignment {
    let n = emb.n();
    let d = emb.dim();
    let g: Vec<F> = (0..d)
        .map(|_| F::from_f64(rng.sample::<f64, _>(StandardNormal)).expect("finite"))
        .collect();

    // Projections ⟨g, φ(ū)⟩, plus a sentinel at the origin anchoring parity.
    const SENTINEL: usize = usize::MAX;
    let mut points: Vec<(F, usize)> = (0..n)
        .map(|u| {
            let row = emb.phi.row(u);
            let mut x = F::zero();
            for (gi, ri) in g.iter().zip(row) {
                x = x + *gi * *ri;
            }
            (x, u)
        })
        .collect();
    points.push((F::zero(), SENTINEL));
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));

    // Walk the sorted line, counting Poisson arrivals per gap; a vertex's
    // parity is the cumulative count mod 2.
    let rate = beta.sqrt().recip();
    let mut parity = vec![0u8; n];
    let mut sentinel_parity = 0u8;
    let mut cum = 0u8;
    let mut prev: Option<F> = None;
    for &(x, who) in &points {
        if let Some(p) = prev {
            let gap = (x - p).to_f64().unwrap_or(0.0);
            let lambda = gap * rate;
            if lambda > 0.0 {
                let arrivals: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
                cum ^= (arrivals as u64 % 2) as u8;
            }
        }
        prev = Some(x);
        if who == SENTINEL {
            sentinel_parity = cum;
        } else {
            parity[who] = cum;
        }
    }

    // ω(u) = 1 iff the arrival count between the origin and u is even.
    let bits = parity.iter().map(|&p| 1 ^ p ^ sentinel_parity).collect();
    Assignment { bits }
}

/// Random net supplier for [`omega_l1`].
///
/// Abstracts the random set `U` the distance-threshold coloring measures
/// against. The implementations are heuristics: no multiscale-net guarantee
/// is certified here, which is why the word sampler's separation probability
/// is measured per instance ([`estimate_p`]) instead of assumed.
pub trait NetGenerator: Send + Sync {
    /// Draw a vertex subset for an embedding on `n` vertices.
    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<u32>;

    /// Name echoed into reports.
    fn name(&self) -> &'static str {
        "custom"
    }
}

/// Default net: pick a scale `j` uniform in `{0, …, ⌈log₂n⌉}` and keep each
/// vertex independently with probability `2^−j`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomScaleNet;

impl NetGenerator for RandomScaleNet {
    fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        if n == 0 {
            return Vec::new();
        }
        let j_max = (n as f64).log2().ceil().max(0.0) as u32;
        let j = rng.random_range(0..=j_max);
        let keep = 0.5f64.powi(j as i32);
        (0..n as u32).filter(|_| rng.random::<f64>() < keep).collect()
    }

    fn name(&self) -> &'static str {
        "random_scale"
    }
}

/// Distance-threshold assignment against a random net, with scale constant
/// `c` in the threshold range `(0, β/(c·√ln n))`.
pub fn omega_l1_with_scale<F: Scalar>(
    emb: &NormalizedEmbedding<F>,
    beta: f64,
    net: &dyn NetGenerator,
    c: f64,
    rng: &mut ChaCha8Rng,
) -> Assignment {
    let n = emb.n();
    let u_set = net.sample(n, rng);
    if u_set.is_empty() {
        return Assignment { bits: vec![1; n] };
    }
    let ln_n = (n.max(2) as f64).ln();
    let t = F::from_f64(open_unit(rng) * beta / (c * ln_n.sqrt())).expect("finite");
    let bits = (0..n)
        .map(|v| {
            let mut dmin = F::infinity();
            for &w in &u_set {
                dmin = dmin.min(emb.phi_dist_sq(v, w as usize));
            }
            u8::from(dmin > t)
        })
        .collect();
    Assignment { bits }
}

/// [`omega_l1_with_scale`] with the default scale constant.
pub fn omega_l1<F: Scalar>(
    emb: &NormalizedEmbedding<F>,
    beta: f64,
    net: &dyn NetGenerator,
    rng: &mut ChaCha8Rng,
) -> Assignment {
    omega_l1_with_scale(emb, beta, net, DEFAULT_T_SCALE, rng)
}

/// XOR of `k` independent draws from a base assignment sampler.
///
/// If the base separates a pair with probability `p̃`, the XOR separates it
/// with probability `(1 − (1−2p̃)^k)/2`, pushing any `p̃ > 0` toward 1/2.
pub fn amplify<R: Rng>(
    mut base: impl FnMut(&mut R) -> Assignment,
    k: usize,
    rng: &mut R,
) -> Assignment {
    assert!(k >= 1, "amplification count must be at least 1");
    let mut acc = base(rng);
    for _ in 1..k {
        let next = base(rng);
        acc.xor_with(&next);
    }
    acc
}

/// Support of the target-word distribution when `n < 2^l`: the distinct
/// observed words padded with the lexicographically smallest unused words to
/// exactly `n` atoms (each then carries probability `1/n`).
fn word_support(words: &[u64], n: usize) -> Vec<u64> {
    let mut support: std::collections::BTreeSet<u64> = words.iter().copied().collect();
    let mut candidate = 0u64;
    while support.len() < n {
        if !support.contains(&candidate) {
            support.insert(candidate);
        }
        candidate += 1;
    }
    support.into_iter().collect()
}

/// Draw one separator: `l` amplified assignments → words, a target word, a
/// norm threshold, and the selected set.
///
/// The target word is uniform over `{0,1}^l` when `n ≥ 2^l`; otherwise it is
/// uniform over a support of exactly `n` words (see [`word_support`]), so
/// that `Pr[W = W(u)] = 1/n` for every observed word.
pub fn sample_separator<F: Scalar>(
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    params: &SeparatorParams,
    rng: &mut ChaCha8Rng,
) -> SeparatorSample {
    sample_separator_with_net(sol, emb, params, &RandomScaleNet, rng)
}

/// [`sample_separator`] with an explicit net generator for the word variant.
pub fn sample_separator_with_net<F: Scalar>(
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    params: &SeparatorParams,
    net: &dyn NetGenerator,
    rng: &mut ChaCha8Rng,
) -> SeparatorSample {
    let n = emb.n();
    assert_eq!(sol.gram.n(), n, "solution and embedding disagree on the vertex count");

    let mut words = vec![0u64; n];
    for i in 0..params.l {
        let assignment = match params.variant {
            SeparatorVariant::L2Poisson => {
                amplify(|r| omega_l2(emb, params.beta, r), params.k, rng)
            }
            SeparatorVariant::L1Words => {
                amplify(|r| omega_l1(emb, params.beta, net, r), params.k, rng)
            }
        };
        let shift = (params.l - 1 - i) as u32;
        for (w, &b) in words.iter_mut().zip(&assignment.bits) {
            *w |= u64::from(b) << shift;
        }
    }

    let word = if (n as u128) >= (1u128 << params.l) {
        rng.random_range(0..(1u64 << params.l))
    } else {
        let support = word_support(&words, n);
        support[rng.random_range(0..support.len())]
    };
    let threshold = open_unit(rng);
    let r = F::from_f64(threshold).expect("finite");

    let members = (0..n as u32).filter(|&u| {
        words[u as usize] == word && sol.gram.get(u as usize, u as usize) >= r
    });
    let s = VertexSet::new(n, members).expect("members are in range");
    SeparatorSample { s, word, threshold, words }
}

/// Analytic upper bound on `Pr[e is cut by S]` for diagnostics and tests.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutBound {
    /// Norm-window term: the threshold `r` landing strictly inside the
    /// edge's norm range. Bounded by the max pairwise squared distance.
    pub norm_window: f64,
    /// Word-mismatch term: some assignment splitting the edge while all
    /// norms pass the threshold.
    pub word_split: f64,
    /// `min_{w∈e} ‖w̄‖²`.
    pub rho_min: f64,
    /// `max_{w∈e} ‖w̄‖²`.
    pub rho_max: f64,
    /// `min(1, norm_window + word_split)`.
    pub total: f64,
}

/// Compute the per-edge cut-probability bound for the configured variant.
///
/// All suppressed constants are taken as 1, so this is a shape-faithful
/// diagnostic rather than a certified bound. Singletons are never cut.
pub fn cut_probability_bound<F: Scalar>(
    emb: &NormalizedEmbedding<F>,
    e: &[u32],
    params: &SeparatorParams,
) -> CutBound {
    assert!(!e.is_empty(), "edge must be nonempty");
    if e.len() == 1 {
        let rho = emb.source_norm_sq[e[0] as usize].to_f64().unwrap_or(0.0);
        return CutBound { norm_window: 0.0, word_split: 0.0, rho_min: rho, rho_max: rho, total: 0.0 };
    }

    let mut rho_min = f64::INFINITY;
    let mut rho_max = 0.0f64;
    for &w in e {
        let norm = emb.source_norm_sq[w as usize].to_f64().unwrap_or(0.0);
        rho_min = rho_min.min(norm);
        rho_max = rho_max.max(norm);
    }

    let mut max_d2_src = 0.0f64; // max pairwise ‖ū − v̄‖²
    let mut max_d2_phi = 0.0f64; // max pairwise ‖φ(ū) − φ(v̄)‖²
    for (a, &up) in e.iter().enumerate() {
        for &vp in &e[a + 1..] {
            let (u, v) = (up as usize, vp as usize);
            max_d2_src = max_d2_src.max(emb.source_dist_sq.get(u, v).to_f64().unwrap_or(0.0));
            max_d2_phi = max_d2_phi.max(emb.phi_dist_sq(u, v).to_f64().unwrap_or(0.0));
        }
    }

    let norm_window = max_d2_src;
    let lk = (params.l * params.k) as f64;
    let split_rate = match params.variant {
        // Per-base split ≤ √ln(n)·maxφd²/β; union over l·K draws.
        SeparatorVariant::L1Words => {
            let n = emb.n().max(2) as f64;
            lk * n.ln().sqrt() * max_d2_phi / params.beta
        }
        // Per-base split ≤ √ln(|e|)·maxφd/√β; union over l·K draws.
        SeparatorVariant::L2Poisson => {
            let size = e.len().max(2) as f64;
            lk * size.ln().sqrt() * max_d2_phi.sqrt() / params.beta.sqrt()
        }
    };
    let word_split = rho_min * split_rate.min(1.0);
    CutBound {
        norm_window,
        word_split,
        rho_min,
        rho_max,
        total: (norm_window + word_split).min(1.0),
    }
}

/// Measure the word sampler's base far-pair separation probability.
///
/// Runs `samples` draws of [`omega_l1`] and returns a conservatively shrunk
/// estimate of the *minimum* separation rate over all far pairs (pairs at
/// normalized squared distance ≥ β), clamped into the `(0, 1/4)` domain the
/// amplification formula accepts. With no far pairs the default
/// [`L1_DEFAULT_P`] is returned (amplification is then inconsequential).
pub fn estimate_p<F: Scalar>(
    emb: &NormalizedEmbedding<F>,
    beta: f64,
    net: &dyn NetGenerator,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    assert!(samples > 0, "sample count must be positive");
    let n = emb.n();
    let beta_f = F::from_f64(beta).expect("finite");
    let mut far_pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if emb.phi_dist_sq(u, v) >= beta_f {
                far_pairs.push((u, v));
            }
        }
    }
    if far_pairs.is_empty() {
        return L1_DEFAULT_P;
    }

    let mut split_counts = vec![0usize; far_pairs.len()];
    for _ in 0..samples {
        let a = omega_l1(emb, beta, net, rng);
        for (count, &(u, v)) in split_counts.iter_mut().zip(&far_pairs) {
            if a.bit(u) != a.bit(v) {
                *count += 1;
            }
        }
    }
    let min_rate = split_counts
        .iter()
        .map(|&c| c as f64 / samples as f64)
        .fold(f64::INFINITY, f64::min);
    let se = (min_rate * (1.0 - min_rate) / samples as f64).sqrt() + 1.0 / samples as f64;
    (min_rate - 4.0 * se).clamp(1e-3, 0.2499)
}
