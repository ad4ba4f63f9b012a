//! Exact brute-force optima and reproducible instance generators.
//!
//! The brute-force solvers enumerate subsets as bitmasks, one size class at a
//! time, visiting each class in member-lexicographic order so the first
//! improvement is also the tie-break winner. Size classes evaluate in
//! parallel and merge deterministically; a class stops scanning once it finds
//! an expansion-zero set (nothing in the class can beat it).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embedding::normalize;
use crate::hypergraph::{Graph, Hypergraph, HypergraphError, VertexSet};
use crate::mat::SymMat;
use crate::rng::{domain, stream_rng};
use crate::scalar::{ratio_floor_usize, Rational};
use crate::sdp::{build_relaxation, complete_solution};
use crate::separators::{sample_separator, SeparatorParams, SeparatorVariant, L2_BASE_P};

/// Hard guard on exhaustive enumeration (2ⁿ subsets).
pub const MAX_ORACLE_VERTICES: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("exhaustive search supports at most {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("no admissible set: the size cap ⌊δ·n⌋ is zero")]
    NoAdmissibleSet,
    #[error("{what}")]
    BadParameter { what: &'static str },
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Separator(#[from] crate::separators::SeparatorError),
}

/// Visit size-`s` subsets of `{0,…,n−1}` as bitmasks in member-lexicographic
/// order; the visitor returns `true` to stop the scan.
fn for_each_combo(n: usize, s: usize, visit: &mut impl FnMut(u32) -> bool) {
    fn rec(n: usize, start: usize, left: usize, mask: u32, visit: &mut impl FnMut(u32) -> bool) -> bool {
        if left == 0 {
            return visit(mask);
        }
        for v in start..=(n - left) {
            if rec(n, v + 1, left - 1, mask | (1 << v), visit) {
                return true;
            }
        }
        false
    }
    if s == 0 || s > n {
        return;
    }
    rec(n, 0, s, 0, visit);
}

fn mask_to_set(n: usize, mask: u32) -> VertexSet {
    VertexSet::new(n, (0..n as u32).filter(|&v| mask >> v & 1 == 1)).expect("in range")
}

/// Best set over sizes `1..=cap` under `objective(mask, size)`, minimizing
/// (value, size, member-lex). The per-class scan aborts once a zero is found.
fn minimize_over_subsets(
    n: usize,
    cap: usize,
    objective: impl Fn(u32, usize) -> Rational + Sync,
) -> Option<(Rational, usize, u32)> {
    use num_traits::Zero;
    (1..=cap)
        .into_par_iter()
        .filter_map(|s| {
            let mut best: Option<(Rational, u32)> = None;
            for_each_combo(n, s, &mut |mask| {
                let value = objective(mask, s);
                let improves = best.as_ref().is_none_or(|(b, _)| value < *b);
                if improves {
                    let stop = value.is_zero();
                    best = Some((value, mask));
                    return stop;
                }
                false
            });
            best.map(|(value, mask)| (value, s, mask))
        })
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
}

fn enumeration_cap(n: usize, delta_cap: Rational) -> Result<usize, OracleError> {
    if n == 0 || n > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge { n, max: MAX_ORACLE_VERTICES });
    }
    let cap = ratio_floor_usize(delta_cap * Rational::new(n as i64, 1)).min(n - 1);
    if cap == 0 {
        return Err(OracleError::NoAdmissibleSet);
    }
    Ok(cap)
}

/// Exact optimum `φ* = min { φ(S) : 0 < |S| ≤ δ_cap·n }` with its minimizer;
/// ties broken by smaller size, then lexicographic members.
pub fn brute_force_hsse(
    h: &Hypergraph,
    delta_cap: Rational,
) -> Result<(VertexSet, Rational), OracleError> {
    let n = h.num_vertices();
    let cap = enumeration_cap(n, delta_cap)?;
    let edge_masks: Vec<u32> = h
        .edges()
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();

    let best = minimize_over_subsets(n, cap, |mask, s| {
        let cut = edge_masks
            .iter()
            .filter(|&&em| {
                let inside = em & mask;
                inside != 0 && inside != em
            })
            .count();
        Rational::new(cut as i64, s.min(n - s) as i64)
    })
    .expect("cap ≥ 1 yields at least the singletons");
    Ok((mask_to_set(n, best.2), best.0))
}

/// Exact small-set vertex-expansion optima: the `φ^V`-minimizer (ties as in
/// [`brute_force_hsse`]) together with `φ^V* = min |N_out(S)|/|S|` and the
/// independent optimum `Φ^V* = min |N_in(S) ∪ N_out(S)|/min(|S|,|S̄|)`, both
/// over `0 < |S| ≤ δ_cap·n`. The two optima need not share a minimizer.
pub fn brute_force_ssve(
    g: &Graph,
    delta_cap: Rational,
) -> Result<(VertexSet, Rational, Rational), OracleError> {
    let n = g.num_vertices();
    let cap = enumeration_cap(n, delta_cap)?;
    let adj_masks: Vec<u32> = (0..n as u32)
        .map(|u| g.neighbors(u).iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();

    let out_count = |mask: u32| -> usize {
        let mut reach = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            reach |= adj_masks[v];
            rest &= rest - 1;
        }
        (reach & !mask).count_ones() as usize
    };
    let in_count = |mask: u32| -> usize {
        let mut count = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            if adj_masks[v] & !mask != 0 {
                count += 1;
            }
            rest &= rest - 1;
        }
        count
    };

    let directed = minimize_over_subsets(n, cap, |mask, s| {
        Rational::new(out_count(mask) as i64, s as i64)
    })
    .expect("cap ≥ 1");
    let symmetric = minimize_over_subsets(n, cap, |mask, s| {
        Rational::new((out_count(mask) + in_count(mask)) as i64, s.min(n - s) as i64)
    })
    .expect("cap ≥ 1");

    Ok((mask_to_set(n, directed.2), directed.0, symmetric.0))
}

/// The r-vertex integrality-gap instance: one hyperedge covering everything,
/// paired with the size parameter `δ = 1/r` it is hard for.
pub fn gen_gap_instance(r: usize) -> Result<(Hypergraph, Rational), OracleError> {
    if r < 2 {
        return Err(OracleError::BadParameter { what: "gap instance needs r ≥ 2" });
    }
    let h = Hypergraph::new(r, vec![(0..r as u32).collect()]).expect("valid by construction");
    Ok((h, Rational::new(1, r as i64)))
}

/// Edge-size distribution for [`gen_random_hypergraph`].
#[derive(Clone, Copy, Debug, Serialize)]
pub enum SizeLaw {
    /// Every edge has exactly this many vertices (clamped to `n`).
    Constant(usize),
    /// Sizes uniform in `lo..=hi` (clamped to `n`).
    Uniform { lo: usize, hi: usize },
}

impl SizeLaw {
    fn sample(&self, n: usize, rng: &mut impl Rng) -> usize {
        let k = match *self {
            SizeLaw::Constant(r) => r,
            SizeLaw::Uniform { lo, hi } => rng.random_range(lo..=hi.max(lo)),
        };
        k.clamp(1, n)
    }
}

/// `m` hyperedges over `n` vertices, each an independent uniform subset of
/// the size drawn from `law`. Reproducible per seed.
pub fn gen_random_hypergraph(
    n: usize,
    m: usize,
    law: SizeLaw,
    seed: u64,
) -> Result<Hypergraph, OracleError> {
    if n == 0 {
        return Err(OracleError::BadParameter { what: "hypergraph needs at least one vertex" });
    }
    let mut rng = stream_rng(seed, domain::GENERATE, 0);
    let edges = (0..m)
        .map(|_| {
            let k = law.sample(n, &mut rng);
            rand::seq::index::sample(&mut rng, n, k).iter().map(|v| v as u32).collect()
        })
        .collect();
    Ok(Hypergraph::new(n, edges)?)
}

/// A generated instance with a known cluster structure.
#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub hypergraph: Hypergraph,
    /// The planted partition (consecutive, near-equal blocks).
    pub clusters: Vec<VertexSet>,
}

/// Clustered instance: `⌈intra_rate·|c|⌉` size-3 hyperedges inside each
/// cluster `c` and `⌈inter_rate·n⌉` size-3 hyperedges spanning at least two
/// clusters. With `inter_rate = 0` each cluster is disconnected from the
/// rest, so a cluster no larger than `n/2` is an expansion-zero set.
pub fn gen_planted(
    n: usize,
    cluster_count: usize,
    intra_rate: f64,
    inter_rate: f64,
    seed: u64,
) -> Result<PlantedInstance, OracleError> {
    if cluster_count == 0 || n < 2 * cluster_count {
        return Err(OracleError::BadParameter {
            what: "planted instance needs at least two vertices per cluster",
        });
    }
    if !(0.0..=f64::MAX).contains(&intra_rate) || !(0.0..=f64::MAX).contains(&inter_rate) {
        return Err(OracleError::BadParameter { what: "edge rates must be nonnegative" });
    }
    let mut rng = stream_rng(seed, domain::GENERATE, 1);

    // Consecutive near-equal blocks: the first `n % cluster_count` blocks get
    // one extra vertex.
    let base = n / cluster_count;
    let extra = n % cluster_count;
    let mut clusters = Vec::with_capacity(cluster_count);
    let mut next = 0u32;
    for c in 0..cluster_count {
        let size = base + usize::from(c < extra);
        clusters.push(VertexSet::new(n, next..next + size as u32).expect("in range"));
        next += size as u32;
    }

    let mut edges: Vec<Vec<u32>> = Vec::new();
    for cluster in &clusters {
        let members = cluster.members();
        let count = (intra_rate * members.len() as f64).ceil() as usize;
        let arity = 3.min(members.len());
        for _ in 0..count {
            let picks = rand::seq::index::sample(&mut rng, members.len(), arity);
            edges.push(picks.iter().map(|i| members[i]).collect());
        }
    }
    let inter_count = (inter_rate * n as f64).ceil() as usize;
    let cluster_of = |v: u32| clusters.iter().position(|c| c.contains(v)).expect("partition");
    for _ in 0..inter_count {
        loop {
            let picks: Vec<u32> = rand::seq::index::sample(&mut rng, n, 3.min(n))
                .iter()
                .map(|v| v as u32)
                .collect();
            let first = cluster_of(picks[0]);
            if picks.iter().any(|&v| cluster_of(v) != first) {
                edges.push(picks);
                break;
            }
        }
    }

    Ok(PlantedInstance { hypergraph: Hypergraph::new(n, edges)?, clusters })
}

/// Erdős–Rényi graph: each of the `n·(n−1)/2` pairs is an edge independently
/// with probability `p`. Reproducible per seed.
pub fn gen_random_graph(n: usize, p: f64, seed: u64) -> Result<Graph, OracleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(OracleError::BadParameter { what: "edge probability must lie in [0,1]" });
    }
    let mut rng = stream_rng(seed, domain::GENERATE, 2);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::new(n, edges)?)
}

/// Outcome of the separator lower-bound check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparatorLowerBoundReport {
    pub m: f64,
    /// Instance size `r = ⌈m⌉`.
    pub r: usize,
    pub alpha: f64,
    pub samples: usize,
    /// Empirical `Pr[|S| = 1]`.
    pub singleton_rate: f64,
    /// Empirical `Pr[S cuts the all-covering edge]` (= `0 < |S| < r`).
    pub cut_rate: f64,
    /// Marginal-law floor `α/2 − 4·s.e.` the singleton rate must clear.
    pub marginal_floor: f64,
    pub marginal_ok: bool,
    /// `D̂ = r·cut_rate/(2α)`: the distortion any separator with these
    /// statistics must pay on this instance (cut bound `α·D·max‖ū−v̄‖²`
    /// with `max‖ū−v̄‖² = 2/r`). Absent when the marginal check failed.
    pub inferred_distortion: Option<f64>,
    /// Acceptance line `(1−slack)·⌈m⌉/4`.
    pub distortion_threshold: f64,
    pub distortion_ok: Option<bool>,
}

/// Harness constants: the check runs the certified Poisson sampler with a
/// fixed mid-range threshold (all pairwise distances on the instance are 2,
/// so any `β < 2` classifies every pair as far).
const LOWER_BOUND_BETA: f64 = 0.5;
const LOWER_BOUND_SLACK: f64 = 0.1;

/// Check that separator samples on the hard instance are expensive: with
/// `r = ⌈m⌉` vertices embedded as `X = I/r` (the relaxation's optimum),
/// `Pr[|S| = 1] ≥ α/2 − 4·s.e.` must hold, and the implied distortion
/// `r·Pr[cut]/(2α)` must reach `(1−slack)·⌈m⌉/4`.
pub fn separator_lower_bound_test(
    m: f64,
    samples: usize,
    seed: u64,
) -> Result<SeparatorLowerBoundReport, OracleError> {
    let r = m.ceil() as usize;
    let params =
        SeparatorParams::derive(m, LOWER_BOUND_BETA, r, L2_BASE_P, SeparatorVariant::L2Poisson)?;
    let (h, delta) = gen_gap_instance(r)?;
    let spec = build_relaxation(&h, delta).map_err(|_| OracleError::BadParameter {
        what: "gap relaxation rejected its own parameters",
    })?;
    let gram = SymMat::from_fn(r, |i, j| if i == j { 1.0 / r as f64 } else { 0.0 });
    let sol = complete_solution(&spec, gram, None);
    let emb = normalize(&sol, 1e-9).expect("scaled identity normalizes");

    separator_lower_bound_with(m, params, samples, |k| {
        let mut rng = stream_rng(seed, domain::VERIFY, k);
        sample_separator(&sol, &emb, &params, &mut rng).s
    })
}

/// Lower-bound check against an arbitrary sampler (index → sampled set);
/// used to verify that degenerate samplers are caught by the marginal check.
pub fn separator_lower_bound_with(
    m: f64,
    params: SeparatorParams,
    samples: usize,
    sampler: impl Fn(u32) -> VertexSet + Sync,
) -> Result<SeparatorLowerBoundReport, OracleError> {
    if samples == 0 {
        return Err(OracleError::BadParameter { what: "sample count must be positive" });
    }
    let r = m.ceil() as usize;
    let (singletons, cuts) = (0..samples as u32)
        .into_par_iter()
        .map(|k| {
            let s = sampler(k);
            (usize::from(s.len() == 1), usize::from(!s.is_empty() && s.len() < r))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let singleton_rate = singletons as f64 / samples as f64;
    let cut_rate = cuts as f64 / samples as f64;
    let se = (singleton_rate * (1.0 - singleton_rate) / samples as f64).sqrt()
        + 1.0 / samples as f64;
    let marginal_floor = params.alpha / 2.0 - 4.0 * se;
    let marginal_ok = singleton_rate >= marginal_floor && singletons > 0;
    let distortion_threshold = (1.0 - LOWER_BOUND_SLACK) * (r as f64) / 4.0;
    let inferred_distortion =
        marginal_ok.then(|| r as f64 * cut_rate / (2.0 * params.alpha));
    let distortion_ok = inferred_distortion.map(|d| d >= distortion_threshold);

    Ok(SeparatorLowerBoundReport {
        m,
        r,
        alpha: params.alpha,
        samples,
        singleton_rate,
        cut_rate,
        marginal_floor,
        marginal_ok,
        inferred_distortion,
        distortion_threshold,
        distortion_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_instance_optimum_is_one() {
        let (h, delta) = gen_gap_instance(4).unwrap();
        let (set, phi) = brute_force_hsse(&h, delta).unwrap();
        assert_eq!(phi, Rational::new(1, 1));
        assert_eq!(set.members(), &[0], "lexicographic tie-break among singletons");
        assert_eq!(h.expansion(&set).unwrap(), phi);
    }

    #[test]
    fn zero_edges_give_zero_optimum_via_early_exit() {
        let h = Hypergraph::new(5, Vec::new()).unwrap();
        let (set, phi) = brute_force_hsse(&h, Rational::new(1, 2)).unwrap();
        assert_eq!(phi, Rational::new(0, 1));
        assert_eq!(set.members(), &[0]);
    }

    #[test]
    fn path_hypergraph_optimum_is_one_half() {
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let (set, phi) = brute_force_hsse(&h, Rational::new(1, 2)).unwrap();
        assert_eq!(phi, Rational::new(1, 2));
        // {0,1} and {2,3} tie; the lexicographically smaller wins.
        assert_eq!(set.members(), &[0, 1]);
    }

    #[test]
    fn guards_reject_oversized_and_degenerate_requests() {
        let h = Hypergraph::new(25, Vec::new()).unwrap();
        assert_eq!(
            brute_force_hsse(&h, Rational::new(1, 2)),
            Err(OracleError::TooLarge { n: 25, max: 24 })
        );
        let small = Hypergraph::new(4, Vec::new()).unwrap();
        assert_eq!(
            brute_force_hsse(&small, Rational::new(1, 5)),
            Err(OracleError::NoAdmissibleSet)
        );
    }

    #[test]
    fn optimum_is_invariant_under_relabeling() {
        let h = Hypergraph::new(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 5], vec![1, 4]],
        )
        .unwrap();
        // Relabel v → (v·5 + 2) mod 6 (a permutation of {0..5}).
        let perm = |v: u32| (v * 5 + 2) % 6;
        let relabeled = Hypergraph::new(
            6,
            h.edges().iter().map(|e| e.iter().map(|&v| perm(v)).collect()).collect(),
        )
        .unwrap();
        let delta = Rational::new(1, 2);
        let (_, phi_a) = brute_force_hsse(&h, delta).unwrap();
        let (_, phi_b) = brute_force_hsse(&relabeled, delta).unwrap();
        assert_eq!(phi_a, phi_b);
    }

    #[test]
    fn vertex_expansion_optima_match_hand_enumeration() {
        let cycle = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let (set, phi_v, phi_sym) = brute_force_ssve(&cycle, Rational::new(1, 2)).unwrap();
        assert_eq!(phi_v, Rational::new(1, 1), "two adjacent vertices expand by 2/2");
        assert_eq!(phi_sym, Rational::new(2, 1));
        assert_eq!(set.len(), 2);

        let two_edges = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let (_, phi_v, phi_sym) = brute_force_ssve(&two_edges, Rational::new(1, 2)).unwrap();
        assert_eq!(phi_v, Rational::new(0, 1));
        assert_eq!(phi_sym, Rational::new(0, 1));

        let k4 = Graph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (set, phi_v, _) = brute_force_ssve(&k4, Rational::new(1, 4)).unwrap();
        assert_eq!(phi_v, Rational::new(3, 1), "a singleton sees the other three");
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn gap_generator_produces_the_covering_edge() {
        let (h, delta) = gen_gap_instance(2).unwrap();
        assert_eq!(h.edges(), &[vec![0, 1]]);
        assert_eq!(delta, Rational::new(1, 2));
        let (h4, d4) = gen_gap_instance(4).unwrap();
        assert_eq!(h4.edges(), &[vec![0, 1, 2, 3]]);
        assert_eq!(d4, Rational::new(1, 4));
        assert!(gen_gap_instance(1).is_err());
    }

    #[test]
    fn random_hypergraphs_are_reproducible_and_respect_the_law() {
        let empty = gen_random_hypergraph(8, 0, SizeLaw::Constant(3), 1).unwrap();
        assert_eq!(empty.num_edges(), 0);

        let a = gen_random_hypergraph(9, 6, SizeLaw::Constant(3), 42).unwrap();
        let b = gen_random_hypergraph(9, 6, SizeLaw::Constant(3), 42).unwrap();
        assert_eq!(a, b, "same seed, same instance");
        assert!(a.edges().iter().all(|e| e.len() == 3));

        let c = gen_random_hypergraph(9, 6, SizeLaw::Constant(3), 43).unwrap();
        assert_ne!(a, c, "different seed, different instance");

        let d = gen_random_hypergraph(10, 12, SizeLaw::Uniform { lo: 2, hi: 5 }, 7).unwrap();
        assert!(d.edges().iter().all(|e| (2..=5).contains(&e.len())));
    }

    #[test]
    fn disconnected_planted_clusters_contain_a_free_cut() {
        let inst = gen_planted(8, 2, 1.0, 0.0, 3).unwrap();
        assert_eq!(inst.clusters.len(), 2);
        assert_eq!(inst.clusters[0].members(), &[0, 1, 2, 3]);
        let (set, phi) = brute_force_hsse(&inst.hypergraph, Rational::new(1, 2)).unwrap();
        assert_eq!(phi, Rational::new(0, 1));
        assert!(set.len() <= 4);

        let connected = gen_planted(8, 2, 1.0, 0.5, 3).unwrap();
        assert!(connected.hypergraph.num_edges() > inst.hypergraph.num_edges());
    }

    #[test]
    fn random_graphs_cover_the_probability_extremes() {
        let empty = gen_random_graph(6, 0.0, 1).unwrap();
        assert_eq!(empty.num_edges(), 0);
        let complete = gen_random_graph(6, 1.0, 1).unwrap();
        assert_eq!(complete.num_edges(), 15);
        let a = gen_random_graph(10, 0.4, 9).unwrap();
        let b = gen_random_graph(10, 0.4, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hard_instance_forces_the_predicted_distortion() {
        let report = separator_lower_bound_test(8.0, 4000, 123).unwrap();
        assert!(report.marginal_ok, "singleton rate {}", report.singleton_rate);
        assert_eq!(report.distortion_threshold, 1.8);
        let d = report.inferred_distortion.unwrap();
        assert!(d >= 1.8, "inferred distortion {d}");
        assert_eq!(report.distortion_ok, Some(true));
    }

    #[test]
    fn degenerate_sampler_fails_the_marginal_check_and_claims_nothing() {
        let params = SeparatorParams::derive(
            8.0,
            LOWER_BOUND_BETA,
            8,
            L2_BASE_P,
            SeparatorVariant::L2Poisson,
        )
        .unwrap();
        let report =
            separator_lower_bound_with(8.0, params, 500, |_| VertexSet::empty(8)).unwrap();
        assert!(!report.marginal_ok);
        assert_eq!(report.inferred_distortion, None);
        assert_eq!(report.distortion_ok, None);
    }
}
