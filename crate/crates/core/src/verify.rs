//! Statistical verification suites for the separator samplers.
//!
//! Each suite draws Monte-Carlo samples through the public sampler API and
//! compares empirical frequencies against the laws the construction promises:
//! the exact per-vertex marginal `α·‖ū‖²`, the far-pair joint suppression
//! `α·min(‖ū‖²,‖v̄‖²)/m`, the Poisson parity law, the single-draw far-pair
//! separation probability, and the XOR amplification floor. All sample
//! indices map to named RNG streams, so every suite is bit-reproducible and
//! thread-count independent.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use rand_distr::{Distribution, Poisson};

use crate::embedding::{normalize, EmbeddingError, NormalizedEmbedding};
use crate::hypergraph::Hypergraph;
use crate::mat::SymMat;
use crate::oracle::{separator_lower_bound_test, OracleError, SeparatorLowerBoundReport};
use crate::rng::{domain, stream_rng};
use crate::rounding::{PIPELINE_EMBED_TOL, SCHEMA_VERSION};
use crate::scalar::{Rational, Scalar};
use crate::sdp::{
    build_relaxation, complete_solution, solve_with_options, SdpError, SdpSolution, SolverOptions,
};
use crate::separators::{
    amplify, estimate_p, omega_l2, sample_separator, RandomScaleNet, SeparatorError,
    SeparatorParams, SeparatorVariant, L2_BASE_P,
};

/// Single-draw separation probability of the Poisson-parity assignment on a
/// worst-case far pair (normalized distance exactly `√β`): with projection
/// gap `Z ~ N(0, β)` and arrival rate `1/√β`, the odd-arrival probability is
/// `E[(1 − e^{−2|Z|/√β})/2] = (1 − 2e²Φ(−2))/2`, independent of `β`.
pub const FAR_PAIR_SEPARATION_EXACT: f64 = 0.331_908_3;

/// Floor the empirical far-pair separation rate must clear: between the
/// certified `0.3` and the exact constant, reachable within Monte-Carlo
/// error at the sample counts the suites use.
pub const SEPARATION_TARGET: f64 = 0.32;

/// Absolute tolerance for the parity-law comparison.
pub const PARITY_TOLERANCE: f64 = 0.01;

/// Parity-law rates exercised by default.
pub const DEFAULT_PARITY_LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Separation-parameter and threshold defaults for [`run_suites`].
pub const DEFAULT_VERIFY_M: f64 = 16.0;
pub const DEFAULT_VERIFY_BETA: f64 = 0.5;

/// Minimum trial count for the parity suite; below this the `0.01` tolerance
/// is tighter than one Monte-Carlo standard error and would flag noise.
const PARITY_TRIALS_MIN: usize = 30_000;

/// Per-suite stream-index blocks inside [`domain::VERIFY`]: sample `i` of a
/// suite with salt `s` uses index `(s << 24) | i`. Salt 0 is reserved for
/// [`separator_lower_bound_test`].
const SALT_MARGINAL: u32 = 1;
const SALT_JOINT: u32 = 2;
const SALT_PARITY: u32 = 3;
const SALT_SEPARATION: u32 = 4;
const SALT_AMPLIFY: u32 = 5;
const SALT_DIAGNOSTICS: u32 = 6;
const SALT_ESTIMATE: u32 = 7;

const MAX_SUITE_SAMPLES: usize = 1 << 24;

fn suite_index(salt: u32, i: usize) -> u32 {
    (salt << 24) | i as u32
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Sdp(#[from] SdpError<f64>),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError<f64>),
    #[error(transparent)]
    Separator(#[from] SeparatorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Conservative standard error for an empirical rate: binomial s.e. at the
/// riskier of the observed rate and the stated target, plus a `1/N` cushion
/// so zero-count cells never claim zero uncertainty.
pub fn conservative_se(observed: f64, target: Option<f64>, samples: usize) -> f64 {
    let variance = |p: f64| {
        let p = p.clamp(0.0, 1.0);
        p * (1.0 - p)
    };
    let var = variance(observed).max(target.map(variance).unwrap_or(0.0));
    (var / samples as f64).sqrt() + (samples as f64).recip()
}

/// One vertex's marginal-law comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MarginalRow {
    pub vertex: u32,
    /// Exact law `α·‖ū‖²`.
    pub target: f64,
    pub observed: f64,
    pub se: f64,
    pub pass: bool,
}

/// Per-vertex membership rates versus the exact marginal law.
#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub variant: SeparatorVariant,
    pub samples: usize,
    pub alpha: f64,
    pub per_vertex: Vec<MarginalRow>,
    /// Largest deviation in units of one standard error.
    pub worst_sigma: f64,
    pub pass: bool,
}

/// Empirical `Pr[u ∈ S]` for every vertex over `samples` separator draws,
/// each compared against `α·‖ū‖²` with a `4·s.e.` two-sided tolerance.
pub fn marginal_law_check<F: Scalar>(
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    params: &SeparatorParams,
    samples: usize,
    seed: u64,
) -> MarginalReport {
    assert!(samples > 0 && samples < MAX_SUITE_SAMPLES, "sample count out of range");
    let n = emb.n();
    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, i| {
                let mut rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_MARGINAL, i));
                let s = sample_separator(sol, emb, params, &mut rng).s;
                for &u in s.members() {
                    acc[u as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let mut worst_sigma = 0.0f64;
    let per_vertex: Vec<MarginalRow> = (0..n)
        .map(|u| {
            let norm_sq = sol.gram.get(u, u).to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
            let target = params.alpha * norm_sq;
            let observed = counts[u] as f64 / samples as f64;
            let se = conservative_se(observed, Some(target), samples);
            let sigma = (observed - target).abs() / se;
            worst_sigma = worst_sigma.max(sigma);
            MarginalRow { vertex: u as u32, target, observed, se, pass: sigma <= 4.0 }
        })
        .collect();
    let pass = per_vertex.iter().all(|row| row.pass);
    MarginalReport { variant: params.variant, samples, alpha: params.alpha, per_vertex, worst_sigma, pass }
}

/// One far pair's joint-membership comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JointRow {
    pub u: u32,
    pub v: u32,
    /// Suppression bound `α·min(‖ū‖²,‖v̄‖²)/m`.
    pub bound: f64,
    pub observed: f64,
    pub se: f64,
    pub pass: bool,
}

/// Far-pair joint membership versus the suppression bound.
#[derive(Clone, Debug, Serialize)]
pub struct JointReport {
    pub variant: SeparatorVariant,
    pub samples: usize,
    pub m: f64,
    /// Pairs at normalized squared distance ≥ β.
    pub far_pairs: usize,
    pub pairs: Vec<JointRow>,
    pub pass: bool,
}

/// Empirical `Pr[u ∈ S ∧ v ∈ S]` for every far pair over `samples` draws,
/// each required to stay below `α·min(‖ū‖²,‖v̄‖²)/m + 4·s.e.`.
pub fn joint_bound_check<F: Scalar>(
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    params: &SeparatorParams,
    samples: usize,
    seed: u64,
) -> JointReport {
    assert!(samples > 0 && samples < MAX_SUITE_SAMPLES, "sample count out of range");
    let n = emb.n();
    let beta = F::from_f64(params.beta).expect("finite");
    let mut far: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if emb.phi_dist_sq(u, v) >= beta {
                far.push((u, v));
            }
        }
    }

    let counts = (0..samples)
        .into_par_iter()
        .fold(
            || vec![0u64; far.len()],
            |mut acc, i| {
                let mut rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_JOINT, i));
                let s = sample_separator(sol, emb, params, &mut rng).s;
                for (slot, &(u, v)) in acc.iter_mut().zip(&far) {
                    if s.contains(u as u32) && s.contains(v as u32) {
                        *slot += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; far.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let pairs: Vec<JointRow> = far
        .iter()
        .zip(&counts)
        .map(|(&(u, v), &c)| {
            let nu = sol.gram.get(u, u).to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
            let nv = sol.gram.get(v, v).to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
            let bound = params.alpha * nu.min(nv) / params.m;
            let observed = c as f64 / samples as f64;
            let se = conservative_se(observed, Some(bound), samples);
            JointRow { u: u as u32, v: v as u32, bound, observed, se, pass: observed <= bound + 4.0 * se }
        })
        .collect();
    let pass = pairs.iter().all(|row| row.pass);
    JointReport { variant: params.variant, samples, m: params.m, far_pairs: far.len(), pairs, pass }
}

/// One rate's parity-law comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParityRow {
    pub lambda: f64,
    /// `(1 + e^{−2λ})/2`.
    pub target: f64,
    pub observed: f64,
    pub abs_error: f64,
    pub pass: bool,
}

/// Even-arrival frequencies of Poisson counts versus the closed form.
#[derive(Clone, Debug, Serialize)]
pub struct ParityReport {
    pub trials: usize,
    pub tolerance: f64,
    pub rows: Vec<ParityRow>,
    pub pass: bool,
}

/// Conditioned Monte Carlo of the evenness probability: at each rate, draw
/// `trials` Poisson counts and compare the even-count frequency against
/// `(1 + e^{−2λ})/2` within [`PARITY_TOLERANCE`]. A zero rate has zero
/// arrivals surely, so its frequency is exactly 1.
pub fn parity_law_check(lambdas: &[f64], trials: usize, seed: u64) -> ParityReport {
    assert!(trials > 0 && trials < MAX_SUITE_SAMPLES, "trial count out of range");
    let rows: Vec<ParityRow> = lambdas
        .iter()
        .enumerate()
        .map(|(which, &lambda)| {
            assert!(lambda >= 0.0, "rates must be nonnegative");
            let target = (1.0 + (-2.0 * lambda).exp()) / 2.0;
            let observed = if lambda == 0.0 {
                1.0
            } else {
                let dist = Poisson::new(lambda).expect("positive rate");
                let even = (0..trials)
                    .into_par_iter()
                    .filter(|&i| {
                        let mut rng = stream_rng(
                            seed,
                            domain::VERIFY,
                            suite_index(SALT_PARITY, which * trials + i),
                        );
                        let count: f64 = dist.sample(&mut rng);
                        (count as u64).is_multiple_of(2)
                    })
                    .count();
                even as f64 / trials as f64
            };
            let abs_error = (observed - target).abs();
            ParityRow { lambda, target, observed, abs_error, pass: abs_error <= PARITY_TOLERANCE }
        })
        .collect();
    let pass = rows.iter().all(|row| row.pass);
    ParityReport { trials, tolerance: PARITY_TOLERANCE, rows, pass }
}

/// Far-pair separation rate of the single-draw Poisson-parity assignment.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparationReport {
    pub beta: f64,
    pub samples: usize,
    pub observed: f64,
    pub se: f64,
    /// Acceptance floor ([`SEPARATION_TARGET`]).
    pub floor: f64,
    /// Closed-form rate at the worst-case far pair.
    pub exact: f64,
    pub pass: bool,
}

/// Two unit vectors at normalized squared distance exactly `β` — the
/// worst-case far pair — realized as a completed two-vertex solution.
fn worst_case_far_pair(beta: f64) -> (SdpSolution<f64>, NormalizedEmbedding<f64>) {
    assert!((0.0..2.0).contains(&beta) && beta > 0.0, "distance {beta} unreachable by unit vectors");
    let h = Hypergraph::new(2, vec![vec![0, 1]]).expect("valid");
    let spec = build_relaxation(&h, Rational::new(1, 2)).expect("valid delta");
    // Normalization divides X_uv by max(X_uu, X_vv) = 1/2, so the normalized
    // inner product is 1 − β/2 and the normalized distance² is exactly β.
    let inner = (1.0 - beta / 2.0) / 2.0;
    let gram = SymMat::from_fn(2, |i, j| if i == j { 0.5 } else { inner });
    let sol = complete_solution(&spec, gram, None);
    let emb = normalize(&sol, PIPELINE_EMBED_TOL).expect("two-vector gram is clean");
    (sol, emb)
}

/// Rate at which one Poisson-parity draw separates the worst-case far pair;
/// the suite passes when the rate clears [`SEPARATION_TARGET`].
pub fn far_pair_separation_check(beta: f64, samples: usize, seed: u64) -> SeparationReport {
    assert!(samples > 0 && samples < MAX_SUITE_SAMPLES, "sample count out of range");
    let (_, emb) = worst_case_far_pair(beta);
    let separated = (0..samples)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_SEPARATION, i));
            let a = omega_l2(&emb, beta, &mut rng);
            a.bit(0) != a.bit(1)
        })
        .count();
    let observed = separated as f64 / samples as f64;
    let se = conservative_se(observed, Some(FAR_PAIR_SEPARATION_EXACT), samples);
    SeparationReport {
        beta,
        samples,
        observed,
        se,
        floor: SEPARATION_TARGET,
        exact: FAR_PAIR_SEPARATION_EXACT,
        pass: observed >= SEPARATION_TARGET,
    }
}

/// XOR-amplified separation rate versus its guaranteed floor.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AmplificationReport {
    pub m: f64,
    pub beta: f64,
    /// Amplification count from the separation parameters (base rate
    /// [`L2_BASE_P`]).
    pub k: usize,
    pub p: f64,
    pub samples: usize,
    /// Single-draw separation rate (first XOR component).
    pub base_observed: f64,
    /// Separation rate of the XOR of `k` draws.
    pub amplified_observed: f64,
    pub se: f64,
    /// `1/2 − 1/log₂m − 4·s.e.`.
    pub floor: f64,
    pub pass: bool,
}

/// Amplified far-pair separation on the worst-case pair: the XOR of `k`
/// Poisson-parity draws must separate at rate at least `1/2 − 1/log₂m`
/// minus Monte-Carlo slack.
pub fn amplification_check(
    m: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<AmplificationReport, VerifyError> {
    assert!(samples > 0 && samples < MAX_SUITE_SAMPLES, "sample count out of range");
    let params = SeparatorParams::derive(m, beta, 2, L2_BASE_P, SeparatorVariant::L2Poisson)?;
    let (_, emb) = worst_case_far_pair(beta);
    let (base_hits, amp_hits) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_AMPLIFY, i));
            let mut first = None;
            let amped = amplify(
                |r| {
                    let a = omega_l2(&emb, beta, r);
                    first.get_or_insert(a.bit(0) != a.bit(1));
                    a
                },
                params.k,
                &mut rng,
            );
            (
                u64::from(first.expect("amplify draws at least once")),
                u64::from(amped.bit(0) != amped.bit(1)),
            )
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let base_observed = base_hits as f64 / samples as f64;
    let amplified_observed = amp_hits as f64 / samples as f64;
    let se = conservative_se(amplified_observed, Some(0.5), samples);
    let floor = 0.5 - (m.log2()).recip() - 4.0 * se;
    Ok(AmplificationReport {
        m,
        beta,
        k: params.k,
        p: params.p,
        samples,
        base_observed,
        amplified_observed,
        se,
        floor,
        pass: amplified_observed >= floor,
    })
}

/// Histograms of per-sample separator draws: the target word `W`, the norm
/// threshold `r` (ten uniform bins over `[0,1)`), and the set size `|S|`.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticDump {
    pub samples: usize,
    pub word_counts: BTreeMap<u64, u64>,
    pub threshold_bins: Vec<u64>,
    pub size_counts: BTreeMap<usize, u64>,
}

/// Collect the per-sample diagnostic histograms over `samples` draws.
pub fn collect_diagnostics<F: Scalar>(
    sol: &SdpSolution<F>,
    emb: &NormalizedEmbedding<F>,
    params: &SeparatorParams,
    samples: usize,
    seed: u64,
) -> DiagnosticDump {
    assert!(samples > 0 && samples < MAX_SUITE_SAMPLES, "sample count out of range");
    let empty = || DiagnosticDump {
        samples,
        word_counts: BTreeMap::new(),
        threshold_bins: vec![0; 10],
        size_counts: BTreeMap::new(),
    };
    let merge = |mut a: DiagnosticDump, b: DiagnosticDump| {
        for (w, c) in b.word_counts {
            *a.word_counts.entry(w).or_insert(0) += c;
        }
        for (x, y) in a.threshold_bins.iter_mut().zip(b.threshold_bins) {
            *x += y;
        }
        for (s, c) in b.size_counts {
            *a.size_counts.entry(s).or_insert(0) += c;
        }
        a
    };
    (0..samples)
        .into_par_iter()
        .fold(empty, |mut acc, i| {
            let mut rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_DIAGNOSTICS, i));
            let sample = sample_separator(sol, emb, params, &mut rng);
            *acc.word_counts.entry(sample.word).or_insert(0) += 1;
            let bin = ((sample.threshold * 10.0) as usize).min(9);
            acc.threshold_bins[bin] += 1;
            *acc.size_counts.entry(sample.s.len()).or_insert(0) += 1;
            acc
        })
        .reduce(empty, merge)
}

/// How much sampling effort [`run_suites`] spends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyLevel {
    /// Smoke-test sample counts; statistical failures are possible noise.
    Quick,
    /// Full sample counts; failures are meaningful.
    Full,
}

impl VerifyLevel {
    pub fn default_samples(self) -> usize {
        match self {
            VerifyLevel::Quick => 5_000,
            VerifyLevel::Full => 100_000,
        }
    }
}

impl FromStr for VerifyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(VerifyLevel::Quick),
            "full" => Ok(VerifyLevel::Full),
            other => Err(format!("unknown level `{other}` (expected quick|full)")),
        }
    }
}

/// Combined outcome of every suite.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub level: VerifyLevel,
    pub samples: usize,
    pub parity_trials: usize,
    pub seed: u64,
    /// Marginal law on the solved reference instance, both variants.
    pub marginal: Vec<MarginalReport>,
    /// Joint suppression on the solved reference instance, both variants.
    pub joint: Vec<JointReport>,
    pub parity: ParityReport,
    pub separation: SeparationReport,
    pub amplification: AmplificationReport,
    pub lower_bound: SeparatorLowerBoundReport,
    pub diagnostics: DiagnosticDump,
    pub pass: bool,
}

/// Run every statistical suite against the solved 8-vertex reference
/// instance (one all-covering edge, δ = 1/8) with `m = 16`, `β = 1/2`.
pub fn run_suites(
    level: VerifyLevel,
    samples: Option<usize>,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let samples = samples.unwrap_or_else(|| level.default_samples());
    let parity_trials = samples.max(PARITY_TRIALS_MIN);

    let r = 8usize;
    let h = Hypergraph::new(r, vec![(0..r as u32).collect()]).expect("valid");
    let spec = build_relaxation(&h, Rational::new(1, r as i64))?;
    let sol = solve_with_options(&spec, &SolverOptions::default())?;
    let emb = normalize(&sol, PIPELINE_EMBED_TOL)?;

    let params_l2 = SeparatorParams::derive(
        DEFAULT_VERIFY_M,
        DEFAULT_VERIFY_BETA,
        r,
        L2_BASE_P,
        SeparatorVariant::L2Poisson,
    )?;
    let mut estimate_rng = stream_rng(seed, domain::VERIFY, suite_index(SALT_ESTIMATE, 0));
    let p_l1 = estimate_p(&emb, DEFAULT_VERIFY_BETA, &RandomScaleNet, 1_000, &mut estimate_rng);
    let params_l1 = SeparatorParams::derive(
        DEFAULT_VERIFY_M,
        DEFAULT_VERIFY_BETA,
        r,
        p_l1,
        SeparatorVariant::L1Words,
    )?;

    let marginal = vec![
        marginal_law_check(&sol, &emb, &params_l2, samples, seed),
        marginal_law_check(&sol, &emb, &params_l1, samples, seed),
    ];
    let joint = vec![
        joint_bound_check(&sol, &emb, &params_l2, samples, seed),
        joint_bound_check(&sol, &emb, &params_l1, samples, seed),
    ];
    let parity = parity_law_check(&DEFAULT_PARITY_LAMBDAS, parity_trials, seed);
    let separation = far_pair_separation_check(DEFAULT_VERIFY_BETA, samples, seed);
    let amplification = amplification_check(DEFAULT_VERIFY_M, DEFAULT_VERIFY_BETA, samples, seed)?;
    let lower_bound = separator_lower_bound_test(8.0, samples, seed)?;
    let diagnostics = collect_diagnostics(&sol, &emb, &params_l2, samples.min(10_000), seed);

    let pass = marginal.iter().all(|m| m.pass)
        && joint.iter().all(|j| j.pass)
        && parity.pass
        && separation.pass
        && amplification.pass
        && lower_bound.marginal_ok
        && lower_bound.distortion_ok == Some(true);

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        level,
        samples,
        parity_trials,
        seed,
        marginal,
        joint,
        parity,
        separation,
        amplification,
        lower_bound,
        diagnostics,
        pass,
    })
}
