//! End-to-end small-set expansion rounding: separator sampling, truncation,
//! repetition, and best-sample selection.
//!
//! The pipeline draws a budget of separator samples, truncates each to the
//! size cap `(1+ε)δn`, and returns the nonempty truncated sample minimizing
//! `|E_cut(S')| / |S'|` (exact rational comparison; ties broken by smaller
//! size, then lexicographically). Sampling parallelizes over independent RNG
//! streams; per-sample results are folded in index order, so reports are
//! byte-identical regardless of thread count.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embedding::{normalize, EmbeddingError, NormalizedEmbedding, TOL_ZERO};
use crate::hypergraph::{Hypergraph, HypergraphError, VertexSet};
use crate::mat::SymMat;
use crate::rng::{domain, stream_rng};
use crate::scalar::{ratio_floor_usize, ratio_to_f64, Rational, Scalar};
use crate::sdp::{
    build_relaxation, complete_solution, solve_with_options, RelaxationSpec, SdpError,
    SdpSolution, SolverOptions,
};
use crate::separators::{
    estimate_p, sample_separator, RandomScaleNet, SeparatorParams, SeparatorVariant,
    SeparatorError, L2_BASE_P,
};

/// Version stamp embedded in every serialized report.
pub const SCHEMA_VERSION: u32 = 1;

/// Default cap on the per-run sample budget (the derived budgets `4n/α` and
/// `4n²/α` grow cubically; the cap keeps desk-scale runtimes and is echoed in
/// the report).
pub const DEFAULT_BUDGET_CAP: usize = 200_000;

/// Default Monte-Carlo size for the per-instance base-probability
/// measurement of the words variant.
pub const DEFAULT_P_SAMPLES: usize = 1_000;

/// Floor of the embedding-property gate used inside [`solve_hsse`]. The gate
/// itself is `max(PIPELINE_EMBED_TOL, β/16)`: sampling classifies distances
/// against the separation threshold β, so property slack a full order of
/// magnitude below β leaves every classification essentially intact, while
/// the floor keeps well-solved inputs to a strict standard.
pub const PIPELINE_EMBED_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum RoundingError {
    #[error("eps must lie in (0,1), got {eps}")]
    BadEps { eps: Rational },
    #[error("delta must lie in (0,1/2], got {delta}")]
    BadDelta { delta: Rational },
    #[error("an instance on {n} vertex/vertices admits no nonempty candidate set")]
    NoValidTarget { n: usize },
    #[error(
        "all {budget} separator samples truncated to the empty set; \
         increase the sample budget or eps"
    )]
    AllSamplesEmpty { budget: usize },
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError<f64>),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Configuration for one rounding run.
#[derive(Clone, Debug, Serialize)]
pub struct RoundingConfig {
    /// Size parameter: candidate sets have `|S| ≤ δn`, returned sets
    /// `|S'| ≤ (1+ε)δn`.
    pub delta: Rational,
    /// Bi-criteria slack, in `(0,1)`.
    pub eps: Rational,
    /// Separator variant used by [`solve_hsse`] (the explicit `round_*`
    /// entry points force their own variant).
    pub variant: SeparatorVariant,
    /// Explicit sample budget; `None` derives `4n/α` (words variant) or
    /// `4n²/α` (Poisson variant).
    pub budget: Option<usize>,
    /// Cap applied to the derived or explicit budget.
    pub budget_cap: usize,
    /// Master seed; all streams (estimation, sampling, repetitions) derive
    /// from it.
    pub seed: u64,
    /// Optional distortion estimate. When present, the report carries the
    /// threshold diagnostic `Z = |S'| − |E_cut(S')|/(4·D*·sdpcost)`.
    pub d_star: Option<f64>,
    /// Monte-Carlo size for [`estimate_p`] (words variant only).
    pub p_samples: usize,
}

impl RoundingConfig {
    /// Validate ranges and fill the remaining fields with defaults.
    pub fn new(
        delta: Rational,
        eps: Rational,
        variant: SeparatorVariant,
        seed: u64,
    ) -> Result<Self, RoundingError> {
        use num_traits::{One, Zero};
        if !(eps > Rational::zero() && eps < Rational::one()) {
            return Err(RoundingError::BadEps { eps });
        }
        if !(delta > Rational::zero() && delta <= Rational::new(1, 2)) {
            return Err(RoundingError::BadDelta { delta });
        }
        Ok(RoundingConfig {
            delta,
            eps,
            variant,
            budget: None,
            budget_cap: DEFAULT_BUDGET_CAP,
            seed,
            d_star: None,
            p_samples: DEFAULT_P_SAMPLES,
        })
    }

    /// Separation parameter `m = 4/(εδ)`; always exceeds 8 on the valid
    /// domain, so the word-length formula is well defined.
    pub fn m(&self) -> f64 {
        ratio_to_f64(Rational::new(4, 1) / (self.eps * self.delta))
    }

    /// Separation threshold `β = ε/4`.
    pub fn beta(&self) -> f64 {
        ratio_to_f64(self.eps / Rational::new(4, 1))
    }

    /// Exact size cap `⌊(1+ε)δn⌋` on returned sets.
    pub fn size_cap(&self, n: usize) -> usize {
        use num_traits::One;
        ratio_floor_usize(
            (Rational::one() + self.eps) * self.delta * Rational::new(n as i64, 1),
        )
    }

    /// Budget actually used for one run: explicit override or the derived
    /// default, floored at 1 and capped at `budget_cap`.
    pub fn resolved_budget(&self, n: usize, alpha: f64, variant: SeparatorVariant) -> usize {
        let derived = match variant {
            SeparatorVariant::L1Words => 4.0 * n as f64 / alpha,
            SeparatorVariant::L2Poisson => 4.0 * (n as f64) * (n as f64) / alpha,
        };
        let requested = self.budget.unwrap_or(derived.ceil() as usize).max(1);
        requested.min(self.budget_cap.max(1))
    }
}

/// Truncation rule: keep `S` if `|S| ≤ (1+ε)δn` (boundary inclusive, cap
/// computed in exact rational arithmetic), otherwise return the empty set.
pub fn truncate(s: VertexSet, eps: Rational, delta: Rational, n: usize) -> VertexSet {
    use num_traits::One;
    let cap = ratio_floor_usize((Rational::one() + eps) * delta * Rational::new(n as i64, 1));
    if s.len() <= cap {
        s
    } else {
        VertexSet::empty(n)
    }
}

/// Diagnostic accompanying a user-supplied distortion estimate `D*`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdDiagnostic {
    /// The acceptance threshold `4·D*·sdpcost` on `|E_cut(S')|/|S'|`.
    pub threshold: f64,
    /// Mean of `Z = |S'| − |E_cut(S')|/threshold` over all samples (empty
    /// samples contribute 0).
    pub mean_z: f64,
    /// Number of nonempty samples whose ratio beat the threshold.
    pub hits: usize,
}

/// Expected-cut-rate bound for the Poisson variant, with all suppressed
/// constants taken as 1: the per-sample expected cut count, scaled by `1/α`,
/// is at most `m·sdpcost + m·log₂m·log₂log₂m·√(η̂·sdpcost)` where `η̂` is the
/// anchored-degree bound of the instance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SamplingCostBound {
    pub linear_term: f64,
    pub entropy_term: f64,
    /// Anchored-degree bound `η̂` used by the entropy term.
    pub eta_max: f64,
    pub total: f64,
}

fn sampling_cost_bound(h: &Hypergraph, m: f64, sdpcost: f64) -> SamplingCostBound {
    let eta_max = h.degree_profile().hhat_bound;
    let linear_term = m * sdpcost.max(0.0);
    let log2m = m.log2();
    let entropy_term = m * log2m * log2m.log2().max(0.0) * (eta_max * sdpcost.max(0.0)).sqrt();
    SamplingCostBound { linear_term, entropy_term, eta_max, total: linear_term + entropy_term }
}

/// Full resolved configuration echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct ParamsEcho {
    pub delta: Rational,
    pub eps: Rational,
    pub variant: SeparatorVariant,
    pub separator: SeparatorParams,
    pub size_cap: usize,
    pub budget_requested: usize,
    pub budget_cap: usize,
    pub budget_per_run: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub p_samples: usize,
    pub d_star: Option<f64>,
    pub net: &'static str,
}

/// Result of a rounding run.
#[derive(Clone, Debug, Serialize)]
pub struct CutReport {
    pub schema_version: u32,
    /// The returned set `S'` (nonempty, `|S'| ≤ (1+ε)δn`).
    pub s_prime: VertexSet,
    pub set_size: usize,
    pub cut_count: usize,
    /// `φ(S')`, exact.
    pub expansion: Rational,
    pub expansion_value: f64,
    /// Objective value of the relaxation solution that was rounded.
    pub sdpcost: f64,
    /// `φ(S') / sdpcost`; absent when the relaxation value is (numerically)
    /// zero.
    pub ratio_vs_sdp: Option<f64>,
    /// Exact optimum at the relaxed cap `(1+ε)δ`, when an oracle run was
    /// attached.
    pub oracle_optimum: Option<Rational>,
    pub samples_used: usize,
    pub nonempty_samples: usize,
    pub nonempty_frequency: f64,
    /// Lower bound `α/2 − 4·s.e.` the nonempty frequency is expected to
    /// clear (first-moment argument on `E[|S'|]`).
    pub markov_floor: f64,
    pub markov_ok: bool,
    pub threshold_diagnostic: Option<ThresholdDiagnostic>,
    /// Poisson-variant sampling-cost diagnostic.
    pub sampling_cost: Option<SamplingCostBound>,
    pub params: ParamsEcho,
}

/// Best candidate so far: minimal `cut/|S'|`, ties broken by smaller size,
/// then lexicographic members.
#[derive(Clone, Debug)]
struct Candidate {
    ratio: Rational,
    set: VertexSet,
    cut: usize,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        (self.ratio, self.set.len(), self.set.members())
            < (other.ratio, other.set.len(), other.set.members())
    }
}

/// Aggregate of one sampling run (or several merged runs).
#[derive(Clone, Debug, Default)]
struct RoundTally {
    draws: usize,
    nonempty: usize,
    sum_z: f64,
    hits: usize,
    best: Option<Candidate>,
}

impl RoundTally {
    fn absorb(&mut self, other: RoundTally) {
        self.draws += other.draws;
        self.nonempty += other.nonempty;
        self.sum_z += other.sum_z;
        self.hits += other.hits;
        if let Some(cand) = other.best {
            match &self.best {
                Some(best) if !cand.beats(best) => {}
                _ => self.best = Some(cand),
            }
        }
    }
}

/// Derive separator parameters for a run: the Poisson variant uses its
/// certified base probability, the words variant measures one per instance.
fn derive_params<F: Scalar>(
    emb: &NormalizedEmbedding<F>,
    cfg: &RoundingConfig,
    variant: SeparatorVariant,
) -> Result<SeparatorParams, RoundingError> {
    let p = match variant {
        SeparatorVariant::L2Poisson => L2_BASE_P,
        SeparatorVariant::L1Words => {
            let mut rng = stream_rng(cfg.seed, domain::ESTIMATE_P, 0);
            estimate_p(emb, cfg.beta(), &RandomScaleNet, cfg.p_samples, &mut rng)
        }
    };
    Ok(SeparatorParams::derive(cfg.m(), cfg.beta(), emb.n(), p, variant)?)
}

/// Draw one run's budget of separators on RNG domain `dom` and fold the
/// truncated samples in index order.
fn run_sampling<F: Scalar>(
    h: &Hypergraph,
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    cfg: &RoundingConfig,
    params: &SeparatorParams,
    dom: u32,
) -> RoundTally {
    let n = emb.n();
    let budget = cfg.resolved_budget(n, params.alpha, params.variant);
    let threshold = cfg.d_star.map(|d| 4.0 * d * sol.sdpcost.to_f64().unwrap_or(0.0));

    let samples: Vec<Option<Candidate>> = (0..budget)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, dom, k as u32);
            let drawn = sample_separator(sol, emb, params, &mut rng);
            let kept = truncate(drawn.s, cfg.eps, cfg.delta, n);
            if kept.is_empty() {
                None
            } else {
                let cut = h.cut_count(&kept);
                let ratio = Rational::new(cut as i64, kept.len() as i64);
                Some(Candidate { ratio, set: kept, cut })
            }
        })
        .collect();

    let mut tally = RoundTally { draws: budget, ..RoundTally::default() };
    for cand in samples.into_iter().flatten() {
        tally.nonempty += 1;
        if let Some(th) = threshold {
            if th > 0.0 {
                tally.sum_z += cand.set.len() as f64 - cand.cut as f64 / th;
                if ratio_to_f64(cand.ratio) < th {
                    tally.hits += 1;
                }
            }
        }
        match &tally.best {
            Some(best) if !cand.beats(best) => {}
            _ => tally.best = Some(cand),
        }
    }
    tally
}

fn build_report<F: Scalar>(
    h: &Hypergraph,
    sol: &SdpSolution<F>,
    cfg: &RoundingConfig,
    variant: SeparatorVariant,
    params: &SeparatorParams,
    repetitions: usize,
    tally: RoundTally,
) -> Result<CutReport, RoundingError> {
    let n = h.num_vertices();
    let best = tally
        .best
        .ok_or(RoundingError::AllSamplesEmpty { budget: tally.draws })?;
    let expansion = h.expansion(&best.set)?;
    let sdpcost = sol.sdpcost.to_f64().unwrap_or(0.0);
    let expansion_value = ratio_to_f64(expansion);
    let ratio_vs_sdp = (sdpcost > 1e-12).then(|| expansion_value / sdpcost);

    let draws = tally.draws.max(1);
    let frequency = tally.nonempty as f64 / draws as f64;
    let se = (frequency * (1.0 - frequency) / draws as f64).sqrt() + 1.0 / draws as f64;
    let markov_floor = params.alpha / 2.0 - 4.0 * se;
    let threshold_diagnostic = cfg.d_star.map(|d| {
        let threshold = 4.0 * d * sdpcost;
        ThresholdDiagnostic { threshold, mean_z: tally.sum_z / draws as f64, hits: tally.hits }
    });
    let sampling_cost = (variant == SeparatorVariant::L2Poisson)
        .then(|| sampling_cost_bound(h, params.m, sdpcost));

    Ok(CutReport {
        schema_version: SCHEMA_VERSION,
        set_size: best.set.len(),
        s_prime: best.set,
        cut_count: best.cut,
        expansion,
        expansion_value,
        sdpcost,
        ratio_vs_sdp,
        oracle_optimum: None,
        samples_used: tally.draws,
        nonempty_samples: tally.nonempty,
        nonempty_frequency: frequency,
        markov_floor,
        markov_ok: frequency >= markov_floor,
        threshold_diagnostic,
        sampling_cost,
        params: ParamsEcho {
            delta: cfg.delta,
            eps: cfg.eps,
            variant,
            separator: *params,
            size_cap: cfg.size_cap(n),
            budget_requested: cfg
                .budget
                .unwrap_or_else(|| cfg.resolved_budget(n, params.alpha, variant)),
            budget_cap: cfg.budget_cap,
            budget_per_run: cfg.resolved_budget(n, params.alpha, variant),
            repetitions,
            seed: cfg.seed,
            p_samples: cfg.p_samples,
            d_star: cfg.d_star,
            net: match variant {
                SeparatorVariant::L1Words => "random_scale",
                SeparatorVariant::L2Poisson => "poisson_parity",
            },
        },
    })
}

fn round_with<F: Scalar>(
    h: &Hypergraph,
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    cfg: &RoundingConfig,
    variant: SeparatorVariant,
) -> Result<CutReport, RoundingError> {
    let params = derive_params(emb, cfg, variant)?;
    let tally = run_sampling(h, sol, emb, cfg, &params, domain::ROUND_BASE);
    build_report(h, sol, cfg, variant, &params, 1, tally)
}

/// Round a solved relaxation with the words-based separator.
pub fn round_l1<F: Scalar>(
    h: &Hypergraph,
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    cfg: &RoundingConfig,
) -> Result<CutReport, RoundingError> {
    round_with(h, sol, emb, cfg, SeparatorVariant::L1Words)
}

/// Round a solved relaxation with the Poisson-parity separator; the report
/// additionally carries the [`SamplingCostBound`] diagnostic.
pub fn round_l2<F: Scalar>(
    h: &Hypergraph,
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    cfg: &RoundingConfig,
) -> Result<CutReport, RoundingError> {
    round_with(h, sol, emb, cfg, SeparatorVariant::L2Poisson)
}

/// Zero Gram rows that are indistinguishable from the zero vector at the
/// solve's achieved precision.
///
/// A first-order solve parks vertices it has pushed out of the support at
/// small positive squared norms, often far below its own feasibility
/// residual `σ`. Normalizing such a row to unit length fabricates a
/// direction out of noise, and the embedding's property checks then reject
/// the whole solution even though nothing real is wrong. A row's normalized
/// geometry is only certifiable to precision `g` when its squared norm
/// clears roughly `σ/g`, so rows below `16σ/β` (the requirement at the
/// pipeline gate `β/16`) are zeroed: at this precision they carry no usable
/// direction, and their membership probability `α·X_uu` is below noise as
/// well. Zeroing rows is a congruence `DXD` with a 0/1 diagonal, so exact
/// semidefiniteness is preserved, and each linear family moves by at most a
/// small multiple of the cut. Solutions without sub-noise rows (in
/// particular exact reference solutions) are returned untouched.
pub fn denoise_solution(
    sol: SdpSolution<f64>,
    spec: &RelaxationSpec,
    beta: f64,
) -> SdpSolution<f64> {
    let n = sol.gram.n();
    let sigma = sol.residuals.max();
    let cut = TOL_ZERO.max(16.0 * sigma / beta);
    let dead: Vec<usize> = (0..n).filter(|&u| sol.gram.get(u, u) <= cut).collect();
    let dirty = dead.iter().any(|&u| (0..n).any(|v| sol.gram.get(u, v) != 0.0));
    if !dirty {
        return sol;
    }
    let mut gram = SymMat::zeros(n);
    for u in 0..n {
        for v in u..n {
            let value = if dead.binary_search(&u).is_ok() || dead.binary_search(&v).is_ok() {
                0.0
            } else {
                sol.gram.get(u, v)
            };
            gram.set_sym(u, v, value);
        }
    }
    let mut out = complete_solution(spec, gram, sol.stats);
    if let Some(stats) = out.stats.as_mut() {
        stats.residual = out.residuals.max();
        stats.objective = out.sdpcost;
    }
    out
}

/// Full pipeline: build the relaxation, solve it, denoise and normalize the
/// solution, and round `n` times (one stream domain per repetition), keeping
/// the best sample overall. The report aggregates all repetitions.
pub fn solve_hsse(
    h: &Hypergraph,
    cfg: &RoundingConfig,
    solver: &SolverOptions<f64>,
) -> Result<CutReport, RoundingError> {
    let n = h.num_vertices();
    if n < 2 {
        return Err(RoundingError::NoValidTarget { n });
    }
    let spec = build_relaxation(h, cfg.delta)?;
    let sol = solve_with_options(&spec, solver)?;
    let sol = denoise_solution(sol, &spec, cfg.beta());
    // Normalization divides by per-pair max squared norms, which can amplify
    // the solver's feasibility slack by an instance-dependent factor. What
    // the sampler actually needs is property slack far below the separation
    // threshold β — distances are classified against β, so residuals at β/16
    // perturb the classification by a few percent at worst. Gate there, with
    // the strict pipeline floor for well-solved inputs.
    let embed_tol = PIPELINE_EMBED_TOL.max(cfg.beta() / 16.0);
    let emb = normalize(&sol, embed_tol)?;
    let params = derive_params(&emb, cfg, cfg.variant)?;

    let mut tally = RoundTally::default();
    for rep in 0..n {
        tally.absorb(run_sampling(h, &sol, &emb, cfg, &params, domain::ROUND_BASE + rep as u32));
    }
    build_report(h, &sol, cfg, cfg.variant, &params, n, tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::SymMat;
    use crate::sdp::{complete_solution, intended_solution};

    fn gap_setup(r: usize) -> (Hypergraph, SdpSolution<f64>, NormalizedEmbedding<f64>) {
        let h = Hypergraph::new(r, vec![(0..r as u32).collect()]).unwrap();
        let s = VertexSet::new(r, [0]).unwrap();
        let sol = intended_solution(&h, &s, Rational::new(1, r as i64)).unwrap();
        let emb = normalize(&sol, 1e-9).unwrap();
        (h, sol, emb)
    }

    #[test]
    fn truncation_is_literal_and_boundary_inclusive() {
        let n = 8;
        let eps = Rational::new(1, 2);
        let delta = Rational::new(1, 4);
        // Cap = ⌊1.5 · 0.25 · 8⌋ = 3.
        let s3 = VertexSet::new(n, [0, 1, 2]).unwrap();
        assert_eq!(truncate(s3.clone(), eps, delta, n), s3);
        let s4 = VertexSet::new(n, [0, 1, 2, 3]).unwrap();
        assert!(truncate(s4, eps, delta, n).is_empty());
        let full = VertexSet::full(n);
        assert!(truncate(full, eps, delta, n).is_empty());
        let s1 = VertexSet::new(n, [5]).unwrap();
        assert_eq!(truncate(s1.clone(), eps, delta, n).members(), s1.members());
    }

    #[test]
    fn truncation_cap_is_exact_where_floats_misfloor() {
        // (1+2/3)·(1/3)·9 = 5 exactly; the f64 product lands at 4.99999…
        // and would floor to 4, wrongly rejecting a 5-element set.
        let float_cap = ((1.0 + 2.0f64 / 3.0) * (1.0f64 / 3.0) * 9.0).floor() as usize;
        assert_eq!(float_cap, 4);
        let s5 = VertexSet::new(9, 0..5).unwrap();
        let kept = truncate(s5.clone(), Rational::new(2, 3), Rational::new(1, 3), 9);
        assert_eq!(kept, s5);
    }

    #[test]
    fn config_validates_and_derives_sampling_quantities() {
        let cfg = RoundingConfig::new(
            Rational::new(1, 4),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            7,
        )
        .unwrap();
        assert_eq!(cfg.m(), 32.0);
        assert_eq!(cfg.beta(), 0.125);
        assert_eq!(cfg.size_cap(8), 3);

        for (delta, eps) in [
            (Rational::new(1, 4), Rational::new(0, 1)),
            (Rational::new(1, 4), Rational::new(1, 1)),
            (Rational::new(0, 1), Rational::new(1, 2)),
            (Rational::new(3, 5), Rational::new(1, 2)),
        ] {
            assert!(
                RoundingConfig::new(delta, eps, SeparatorVariant::L2Poisson, 0).is_err(),
                "accepted delta={delta} eps={eps}"
            );
        }
    }

    #[test]
    fn budget_resolution_applies_defaults_and_caps() {
        let mut cfg = RoundingConfig::new(
            Rational::new(1, 4),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            0,
        )
        .unwrap();
        assert_eq!(cfg.resolved_budget(8, 0.125, SeparatorVariant::L1Words), 256);
        assert_eq!(cfg.resolved_budget(8, 0.125, SeparatorVariant::L2Poisson), 2048);
        cfg.budget = Some(10);
        assert_eq!(cfg.resolved_budget(8, 0.125, SeparatorVariant::L2Poisson), 10);
        cfg.budget = None;
        cfg.budget_cap = 100;
        assert_eq!(cfg.resolved_budget(8, 0.125, SeparatorVariant::L2Poisson), 100);
    }

    #[test]
    fn rounding_the_gap_instance_returns_the_singleton() {
        let (h, sol, emb) = gap_setup(4);
        let cfg = RoundingConfig::new(
            Rational::new(1, 4),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            11,
        )
        .unwrap();
        for report in [
            round_l2(&h, &sol, &emb, &cfg).unwrap(),
            round_l1(&h, &sol, &emb, &cfg).unwrap(),
        ] {
            assert_eq!(report.s_prime.members(), &[0]);
            assert_eq!(report.set_size, 1);
            assert_eq!(report.cut_count, 1);
            assert_eq!(report.expansion, Rational::new(1, 1));
            assert_eq!(report.sdpcost, 1.0);
            assert_eq!(report.ratio_vs_sdp, Some(1.0));
            assert_eq!(report.samples_used, report.params.budget_per_run);
            assert!(report.nonempty_samples > 0);
            assert!(report.markov_ok, "nonempty frequency {}", report.nonempty_frequency);
        }
    }

    #[test]
    fn variant_specific_diagnostics_are_attached() {
        let (h, sol, emb) = gap_setup(4);
        let mut cfg = RoundingConfig::new(
            Rational::new(1, 4),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            11,
        )
        .unwrap();
        cfg.d_star = Some(10.0);

        let l2 = round_l2(&h, &sol, &emb, &cfg).unwrap();
        let cost = l2.sampling_cost.expect("Poisson variant carries the cut-rate bound");
        assert_eq!(cost.linear_term, 32.0); // m·sdpcost = 32·1
        assert!(cost.total >= cost.linear_term);
        // Threshold 4·D*·sdpcost = 40 dwarfs every ratio (≤ 1): all hits.
        let diag = l2.threshold_diagnostic.unwrap();
        assert_eq!(diag.threshold, 40.0);
        assert_eq!(diag.hits, l2.nonempty_samples);
        assert!(diag.mean_z >= 0.0);

        let l1 = round_l1(&h, &sol, &emb, &cfg).unwrap();
        assert!(l1.sampling_cost.is_none());
    }

    #[test]
    fn zero_edge_instance_rounds_to_a_free_cut() {
        let n = 6;
        let h = Hypergraph::new(n, Vec::new()).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 2)).unwrap();
        let gram = SymMat::from_fn(n, |i, j| if i == j { 1.0 / n as f64 } else { 0.0 });
        let sol = complete_solution(&spec, gram, None);
        let emb = normalize(&sol, 1e-9).unwrap();
        let cfg = RoundingConfig::new(
            Rational::new(1, 2),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            3,
        )
        .unwrap();
        let report = round_l2(&h, &sol, &emb, &cfg).unwrap();
        assert_eq!(report.cut_count, 0);
        assert_eq!(report.expansion, Rational::new(0, 1));
        assert_eq!(report.ratio_vs_sdp, None, "relaxation value is zero");
    }

    #[test]
    fn vanishing_vectors_exhaust_the_budget() {
        let n = 4;
        let h = Hypergraph::new(n, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 2)).unwrap();
        let gram = SymMat::from_fn(n, |i, j| if i == j { 1e-12 } else { 0.0 });
        let sol = complete_solution(&spec, gram, None);
        let emb = normalize(&sol, 1e-3).unwrap();
        let mut cfg = RoundingConfig::new(
            Rational::new(1, 2),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            0,
        )
        .unwrap();
        cfg.budget = Some(50);
        match round_l2(&h, &sol, &emb, &cfg) {
            Err(RoundingError::AllSamplesEmpty { budget: 50 }) => {}
            other => panic!("expected AllSamplesEmpty, got {other:?}"),
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let (h, sol, emb) = gap_setup(4);
        let cfg = RoundingConfig::new(
            Rational::new(1, 4),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            5,
        )
        .unwrap();
        let a = serde_json::to_string(&round_l2(&h, &sol, &emb, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&round_l2(&h, &sol, &emb, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_vertex_instances_are_rejected() {
        let h = Hypergraph::new(1, Vec::new()).unwrap();
        let cfg = RoundingConfig::new(
            Rational::new(1, 2),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            0,
        )
        .unwrap();
        match solve_hsse(&h, &cfg, &SolverOptions::default()) {
            Err(RoundingError::NoValidTarget { n: 1 }) => {}
            other => panic!("expected NoValidTarget, got {other:?}"),
        }
    }

    #[test]
    fn denoising_zeroes_sub_noise_rows_and_keeps_the_support() {
        // Two support vertices sharing a direction, two parked by a
        // hypothetical solve at norms far below its feasibility residual;
        // the correlated noise entry X_23 must go too.
        let n = 4;
        let h = Hypergraph::new(n, vec![vec![0, 1]]).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 2)).unwrap();
        let mut gram = SymMat::zeros(n);
        gram.set_sym(0, 0, 0.5);
        gram.set_sym(1, 1, 0.5);
        gram.set_sym(0, 1, 0.5);
        gram.set_sym(2, 2, 1e-7);
        gram.set_sym(3, 3, 1e-7);
        gram.set_sym(2, 3, 1e-7);
        let sol = complete_solution(&spec, gram, None);
        assert!(sol.residuals.max() >= 1e-7, "trace surplus should register");

        let out = denoise_solution(sol, &spec, 0.125);
        for u in 0..n {
            for v in 2..n {
                assert_eq!(out.gram.get(u, v), 0.0, "entry ({u},{v}) survived");
            }
        }
        assert_eq!(out.gram.get(0, 1), 0.5);
        assert_eq!(out.gram.get(0, 0), 0.5);
    }

    #[test]
    fn denoising_leaves_exact_solutions_untouched() {
        let (_, sol, _) = gap_setup(4);
        let before: Vec<f64> = sol.gram.as_slice().to_vec();
        let spec = build_relaxation(
            &Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap(),
            Rational::new(1, 4),
        )
        .unwrap();
        let out = denoise_solution(sol, &spec, 0.125);
        assert_eq!(out.gram.as_slice(), &before[..]);
    }

    #[test]
    fn pipeline_survives_sub_noise_support_vertices() {
        // A loosely solved instance whose optimal support excludes most
        // vertices: the excluded rows sit at noise-level norms and must not
        // sink the embedding gate.
        let h = crate::oracle::gen_random_hypergraph(
            8,
            16,
            crate::oracle::SizeLaw::Uniform { lo: 2, hi: 4 },
            6,
        )
        .unwrap();
        let cfg = RoundingConfig::new(
            Rational::new(1, 3),
            Rational::new(1, 2),
            SeparatorVariant::L2Poisson,
            6,
        )
        .unwrap();
        let solver = SolverOptions { tol: 1e-4, ..SolverOptions::default() };
        let report = solve_hsse(&h, &cfg, &solver).expect("pipeline should survive");
        assert!(!report.s_prime.is_empty());
        assert!(report.s_prime.len() <= cfg.size_cap(8));
    }
}
