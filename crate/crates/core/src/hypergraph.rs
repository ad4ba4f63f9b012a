//! Hypergraphs, graphs, vertex sets, and exact expansion quantities.
//!
//! All expansion values are exact rationals: the brute-force oracles compare
//! candidate sets by these values, so floating point is banned at this layer.

use crate::scalar::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from constructing or querying combinatorial objects.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("vertex {vertex} out of range for universe of size {n}")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("edge {index} is empty")]
    EmptyEdge { index: usize },
    #[error("anchor {index} is empty or not a subset of its edge")]
    BadAnchor { index: usize },
    #[error("anchor count {anchors} does not match edge count {edges}")]
    AnchorCountMismatch { anchors: usize, edges: usize },
    #[error("expansion is undefined for the empty set")]
    EmptySet,
    #[error("expansion is undefined for the full vertex set")]
    FullSet,
    #[error("graph edge ({u}, {v}) is a self-loop")]
    SelfLoop { u: u32, v: u32 },
}

/// A subset of `{0, …, n−1}`, stored sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    n: usize,
    members: Vec<u32>,
}

impl VertexSet {
    /// Build a set over a universe of size `n`; members are sorted and
    /// deduplicated, out-of-range members are rejected.
    pub fn new(n: usize, members: impl IntoIterator<Item = u32>) -> Result<Self, HypergraphError> {
        let mut members: Vec<u32> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&v) = members.iter().find(|&&v| v as usize >= n) {
            return Err(HypergraphError::VertexOutOfRange { vertex: v, n });
        }
        Ok(VertexSet { n, members })
    }

    pub fn empty(n: usize) -> Self {
        VertexSet { n, members: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { n, members: (0..n as u32).collect() }
    }

    /// Universe size `n`.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Sorted member list.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn complement(&self) -> VertexSet {
        let mut members = Vec::with_capacity(self.n - self.members.len());
        let mut it = self.members.iter().peekable();
        for v in 0..self.n as u32 {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                members.push(v);
            }
        }
        VertexSet { n: self.n, members }
    }

    /// `min(|S|, |S̄|)` — the denominator of expansion quantities.
    pub fn smaller_side(&self) -> usize {
        self.members.len().min(self.n - self.members.len())
    }
}

/// An unweighted hypergraph with an *anchor* set `e° ⊆ e` per edge.
///
/// Anchors drive the degree profile used by the L2 rounding diagnostics; by
/// default each edge anchors itself. Duplicate edges are kept (multiset
/// semantics: every per-edge sum counts multiplicity), singleton edges are
/// legal and simply can never be cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<u32>>,
    anchors: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Build with default anchors (`e° = e`). Edge members are sorted and
    /// deduplicated; empty edges and out-of-range vertices are rejected.
    pub fn new(n: usize, edges: Vec<Vec<u32>>) -> Result<Self, HypergraphError> {
        let edges = Self::normalize_edges(n, edges)?;
        let anchors = edges.clone();
        Ok(Hypergraph { n, edges, anchors })
    }

    /// Build with explicit anchors; each anchor must be a nonempty subset of
    /// its edge.
    pub fn with_anchors(
        n: usize,
        edges: Vec<Vec<u32>>,
        anchors: Vec<Vec<u32>>,
    ) -> Result<Self, HypergraphError> {
        let edges = Self::normalize_edges(n, edges)?;
        if anchors.len() != edges.len() {
            return Err(HypergraphError::AnchorCountMismatch {
                anchors: anchors.len(),
                edges: edges.len(),
            });
        }
        let mut norm_anchors = Vec::with_capacity(anchors.len());
        for (i, a) in anchors.into_iter().enumerate() {
            let mut a = a;
            a.sort_unstable();
            a.dedup();
            let ok = !a.is_empty() && a.iter().all(|v| edges[i].binary_search(v).is_ok());
            if !ok {
                return Err(HypergraphError::BadAnchor { index: i });
            }
            norm_anchors.push(a);
        }
        Ok(Hypergraph { n, edges, anchors: norm_anchors })
    }

    fn normalize_edges(n: usize, edges: Vec<Vec<u32>>) -> Result<Vec<Vec<u32>>, HypergraphError> {
        let mut out = Vec::with_capacity(edges.len());
        for (index, e) in edges.into_iter().enumerate() {
            let mut e = e;
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(HypergraphError::EmptyEdge { index });
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
                return Err(HypergraphError::VertexOutOfRange { vertex: v, n });
            }
            out.push(e);
        }
        Ok(out)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn anchor(&self, i: usize) -> &[u32] {
        &self.anchors[i]
    }

    pub fn anchors(&self) -> &[Vec<u32>] {
        &self.anchors
    }

    /// Number of edges containing `u` (with multiplicity).
    pub fn degree(&self, u: u32) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&u).is_ok()).count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n as u32).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    /// Largest edge size (0 for an edgeless hypergraph).
    pub fn max_arity(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `Some(r)` if every edge has exactly `r` vertices.
    pub fn uniform_arity(&self) -> Option<usize> {
        let r = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == r).then_some(r)
    }

    /// Indices of edges with at least one member on each side of `S`.
    pub fn edges_cut(&self, s: &VertexSet) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edge_is_cut(i, s)).collect()
    }

    /// Number of cut edges (as `edges_cut(…).len()` without the allocation).
    pub fn cut_count(&self, s: &VertexSet) -> usize {
        (0..self.edges.len()).filter(|&i| self.edge_is_cut(i, s)).count()
    }

    fn edge_is_cut(&self, i: usize, s: &VertexSet) -> bool {
        let e = &self.edges[i];
        let mut inside = false;
        let mut outside = false;
        for &v in e {
            if s.contains(v) {
                inside = true;
            } else {
                outside = true;
            }
            if inside && outside {
                return true;
            }
        }
        false
    }

    /// Expansion `φ(S) = |E_cut(S)| / min(|S|, |S̄|)`, exactly.
    pub fn expansion(&self, s: &VertexSet) -> Result<Rational, HypergraphError> {
        let denom = self.expansion_denom(s)?;
        Ok(Rational::new(self.cut_count(s) as i64, denom))
    }

    fn expansion_denom(&self, s: &VertexSet) -> Result<i64, HypergraphError> {
        if s.is_empty() {
            return Err(HypergraphError::EmptySet);
        }
        if s.len() == self.n {
            return Err(HypergraphError::FullSet);
        }
        Ok(s.smaller_side() as i64)
    }

    /// Per-vertex anchored-degree profile for the stored anchors.
    pub fn degree_profile(&self) -> DegreeProfile {
        let eta = self.eta_for_anchors(&self.anchors);
        DegreeProfile::from_eta(eta)
    }

    /// Per-vertex `Σ_{edges e anchored at u} log₂|e| / |e°|` under `anchors`.
    fn eta_for_anchors(&self, anchors: &[Vec<u32>]) -> Vec<f64> {
        // Group identical (arity, anchor size) terms per vertex and multiply
        // by the count: `c·(log₂r/a)` is one rounding, so a d-regular
        // r-uniform profile is bit-identical to the closed form d·(log₂r/r).
        let mut groups: Vec<std::collections::BTreeMap<(usize, usize), usize>> =
            vec![std::collections::BTreeMap::new(); self.n];
        for (i, anchor) in anchors.iter().enumerate() {
            let key = (self.edges[i].len(), anchor.len());
            for &u in anchor {
                *groups[u as usize].entry(key).or_insert(0) += 1;
            }
        }
        groups
            .into_iter()
            .map(|g| {
                g.into_iter()
                    .map(|((r, a), count)| count as f64 * ((r as f64).log2() / a as f64))
                    .sum()
            })
            .collect()
    }

    /// Degree-profile bound with the default anchors `e° = e`, regardless of
    /// the stored anchors.
    pub fn hhat_bound_default_anchors(&self) -> f64 {
        DegreeProfile::from_eta(self.eta_for_anchors(&self.edges)).hhat_bound
    }

    /// Closed-form bound `d_max · log₂r / r` for r-uniform hypergraphs.
    pub fn hhat_bound_uniform(&self) -> Option<f64> {
        let r = self.uniform_arity()?;
        Some(self.max_degree() as f64 * ((r as f64).log2() / r as f64))
    }

    /// Bound `log₂(max arity)` available when every edge can anchor a
    /// distinct representative vertex; `None` when no such system exists.
    pub fn hhat_bound_distinct_representatives(&self) -> Option<f64> {
        self.distinct_representatives()?;
        Some((self.max_arity().max(1) as f64).log2())
    }

    /// A copy of `self` re-anchored at a system of distinct representatives
    /// (one exclusive vertex per edge), when one exists.
    pub fn with_distinct_representative_anchors(&self) -> Option<Hypergraph> {
        let reps = self.distinct_representatives()?;
        let anchors = reps.into_iter().map(|v| vec![v]).collect();
        Some(Hypergraph { n: self.n, edges: self.edges.clone(), anchors })
    }

    /// Augmenting-path bipartite matching of edges to member vertices.
    fn distinct_representatives(&self) -> Option<Vec<u32>> {
        fn try_assign(
            e: usize,
            edges: &[Vec<u32>],
            seen: &mut [bool],
            owner: &mut [Option<usize>],
        ) -> bool {
            for &v in &edges[e] {
                let vi = v as usize;
                if seen[vi] {
                    continue;
                }
                seen[vi] = true;
                let free = match owner[vi] {
                    None => true,
                    Some(prev) => try_assign(prev, edges, seen, owner),
                };
                if free {
                    owner[vi] = Some(e);
                    return true;
                }
            }
            false
        }

        let mut owner: Vec<Option<usize>> = vec![None; self.n];
        for e in 0..self.edges.len() {
            let mut seen = vec![false; self.n];
            if !try_assign(e, &self.edges, &mut seen, &mut owner) {
                return None;
            }
        }
        let mut rep = vec![u32::MAX; self.edges.len()];
        for (v, o) in owner.iter().enumerate() {
            if let Some(e) = o {
                rep[*e] = v as u32;
            }
        }
        Some(rep)
    }
}

/// Anchored-degree profile: per-vertex `η(u) = Σ_{e: u ∈ e°} log₂|e| / |e°|`.
///
/// `eta_max` bounds the hyperedge-entropy quantity the L2 rounding analysis
/// pays for, for the anchor choice the hypergraph carries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// Per-vertex values η(u), all ≥ 0.
    pub eta: Vec<f64>,
    /// `max_u η(u)`.
    pub eta_max: f64,
    /// Upper bound realized by the supplied anchors; equals `eta_max`.
    pub hhat_bound: f64,
}

impl DegreeProfile {
    fn from_eta(eta: Vec<f64>) -> Self {
        let eta_max = eta.iter().cloned().fold(0.0, f64::max);
        DegreeProfile { eta, eta_max, hhat_bound: eta_max }
    }
}

/// A simple undirected graph (no self-loops; parallel edges collapse).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self, HypergraphError> {
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(HypergraphError::SelfLoop { u, v });
            }
            for w in [u, v] {
                if w as usize >= n {
                    return Err(HypergraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: norm, adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Normalized (min, max) edge list, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Outer boundary: vertices outside `S` adjacent to `S`.
    pub fn outer_boundary(&self, s: &VertexSet) -> Vec<u32> {
        (0..self.n as u32)
            .filter(|&u| !s.contains(u) && self.adj[u as usize].iter().any(|&v| s.contains(v)))
            .collect()
    }

    /// Inner boundary: vertices inside `S` adjacent to the complement.
    pub fn inner_boundary(&self, s: &VertexSet) -> Vec<u32> {
        (0..self.n as u32)
            .filter(|&u| s.contains(u) && self.adj[u as usize].iter().any(|&v| !s.contains(v)))
            .collect()
    }

    /// Vertex expansion `φ^V(S) = |N_out(S)| / |S|`, exactly.
    pub fn vertex_expansion(&self, s: &VertexSet) -> Result<Rational, HypergraphError> {
        self.check_proper(s)?;
        Ok(Rational::new(self.outer_boundary(s).len() as i64, s.len() as i64))
    }

    /// Symmetric vertex expansion
    /// `Φ^V(S) = |N_in(S) ∪ N_out(S)| / min(|S|, |S̄|)`, exactly.
    ///
    /// The union is disjoint (inner boundary ⊆ S, outer boundary ⊆ S̄).
    pub fn symmetric_vertex_expansion(&self, s: &VertexSet) -> Result<Rational, HypergraphError> {
        self.check_proper(s)?;
        let boundary = self.inner_boundary(s).len() + self.outer_boundary(s).len();
        Ok(Rational::new(boundary as i64, s.smaller_side() as i64))
    }

    fn check_proper(&self, s: &VertexSet) -> Result<(), HypergraphError> {
        if s.is_empty() {
            Err(HypergraphError::EmptySet)
        } else if s.len() == self.n {
            Err(HypergraphError::FullSet)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(n: usize, members: &[u32]) -> VertexSet {
        VertexSet::new(n, members.iter().copied()).unwrap()
    }

    /// One all-covering edge on `r` vertices.
    fn one_edge_instance(r: usize) -> Hypergraph {
        Hypergraph::new(r, vec![(0..r as u32).collect()]).unwrap()
    }

    fn path_hypergraph() -> Hypergraph {
        Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap()
    }

    fn cycle4() -> Graph {
        Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn edges_cut_single_covering_edge() {
        let h = one_edge_instance(4);
        assert_eq!(h.edges_cut(&vs(4, &[0])), vec![0]);
        assert_eq!(h.edges_cut(&VertexSet::empty(4)), Vec::<usize>::new());
        assert_eq!(h.edges_cut(&VertexSet::full(4)), Vec::<usize>::new());
    }

    #[test]
    fn edges_cut_path() {
        let h = path_hypergraph();
        assert_eq!(h.edges_cut(&vs(4, &[0, 1])), vec![1]);
        assert_eq!(h.edges_cut(&vs(4, &[1])), vec![0, 1]);
    }

    #[test]
    fn expansion_single_edge_instance() {
        let h = one_edge_instance(4);
        assert_eq!(h.expansion(&vs(4, &[0])).unwrap(), Rational::from_integer(1));
        assert_eq!(h.expansion(&vs(4, &[0, 1])).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn expansion_path() {
        let h = path_hypergraph();
        assert_eq!(h.expansion(&vs(4, &[0, 1])).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn expansion_rejects_empty_and_full() {
        let h = path_hypergraph();
        assert_eq!(h.expansion(&VertexSet::empty(4)), Err(HypergraphError::EmptySet));
        assert_eq!(h.expansion(&VertexSet::full(4)), Err(HypergraphError::FullSet));
    }

    #[test]
    fn expansion_is_complement_symmetric() {
        let h = path_hypergraph();
        for s in [vs(4, &[0]), vs(4, &[0, 2]), vs(4, &[1, 2, 3])] {
            assert_eq!(h.expansion(&s), h.expansion(&s.complement()));
        }
    }

    #[test]
    fn singleton_and_duplicate_edges_are_legal() {
        let h = Hypergraph::new(3, vec![vec![1], vec![0, 2], vec![0, 2]]).unwrap();
        let s = vs(3, &[0]);
        // Singleton never cut; duplicates both counted.
        assert_eq!(h.edges_cut(&s), vec![1, 2]);
        assert_eq!(h.expansion(&s).unwrap(), Rational::from_integer(2));
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(
            Hypergraph::new(3, vec![vec![]]),
            Err(HypergraphError::EmptyEdge { index: 0 })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![0, 3]]),
            Err(HypergraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn vertex_expansion_cycle_and_star() {
        let g = cycle4();
        assert_eq!(g.vertex_expansion(&vs(4, &[0])).unwrap(), Rational::from_integer(2));
        assert_eq!(g.vertex_expansion(&vs(4, &[0, 1])).unwrap(), Rational::from_integer(1));

        // Star: center 0, leaves 1..4.
        let star = Graph::new(5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.vertex_expansion(&vs(5, &[1, 2])).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn symmetric_vertex_expansion_cycle() {
        let g = cycle4();
        assert_eq!(
            g.symmetric_vertex_expansion(&vs(4, &[0])).unwrap(),
            Rational::from_integer(3)
        );
        assert_eq!(
            g.symmetric_vertex_expansion(&vs(4, &[0, 1])).unwrap(),
            Rational::from_integer(2)
        );
    }

    #[test]
    fn symmetric_vertex_expansion_edgeless() {
        let g = Graph::new(4, vec![]).unwrap();
        for s in [vs(4, &[0]), vs(4, &[1, 2])] {
            assert_eq!(g.symmetric_vertex_expansion(&s).unwrap(), Rational::from_integer(0));
        }
    }

    #[test]
    fn degree_profile_uniform_regular_matches_closed_form() {
        // 3-uniform, every vertex in exactly 3 edges (one covering edge with
        // multiplicity 3): η(u) = 3·log₂3/3 for all u, bit-exactly.
        let e: Vec<u32> = vec![0, 1, 2];
        let h = Hypergraph::new(3, vec![e.clone(), e.clone(), e]).unwrap();
        let profile = h.degree_profile();
        let closed_form = h.hhat_bound_uniform().unwrap();
        assert_eq!(profile.eta_max, closed_form);
        assert_eq!(profile.hhat_bound, profile.eta_max);
        assert!((profile.eta_max - 1.585).abs() < 1e-3);
        assert!(profile.eta.iter().all(|&x| x == profile.eta_max));
    }

    #[test]
    fn degree_profile_single_anchor() {
        // One edge of size 4 anchored at vertex 0: η(0) = log₂4 / 1 = 2.
        let h = Hypergraph::with_anchors(4, vec![vec![0, 1, 2, 3]], vec![vec![0]]).unwrap();
        let profile = h.degree_profile();
        assert_eq!(profile.eta, vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(profile.hhat_bound, 2.0);
    }

    #[test]
    fn degree_profile_edgeless() {
        let h = Hypergraph::new(4, vec![]).unwrap();
        let profile = h.degree_profile();
        assert_eq!(profile.eta, vec![0.0; 4]);
        assert_eq!(profile.eta_max, 0.0);
    }

    #[test]
    fn distinct_representatives_found_and_refused() {
        // Path edges admit distinct representatives…
        let h = path_hypergraph();
        let re = h.with_distinct_representative_anchors().unwrap();
        let mut reps: Vec<u32> = re.anchors().iter().map(|a| a[0]).collect();
        reps.sort_unstable();
        reps.dedup();
        assert_eq!(reps.len(), 3);
        assert_eq!(h.hhat_bound_distinct_representatives().unwrap(), 1.0);

        // …but three copies of one pair cannot pick three distinct vertices.
        let h = Hypergraph::new(2, vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        assert!(h.with_distinct_representative_anchors().is_none());
        assert!(h.hhat_bound_distinct_representatives().is_none());
    }

    #[test]
    fn anchors_validated() {
        assert!(matches!(
            Hypergraph::with_anchors(3, vec![vec![0, 1]], vec![vec![2]]),
            Err(HypergraphError::BadAnchor { index: 0 })
        ));
        assert!(matches!(
            Hypergraph::with_anchors(3, vec![vec![0, 1]], vec![]),
            Err(HypergraphError::AnchorCountMismatch { .. })
        ));
    }

    #[test]
    fn vertex_set_normalizes_and_complements() {
        let s = VertexSet::new(5, [3, 1, 3, 1]).unwrap();
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.complement().members(), &[0, 2, 4]);
        assert_eq!(s.smaller_side(), 2);
        assert!(VertexSet::new(2, [2]).is_err());
    }
}
