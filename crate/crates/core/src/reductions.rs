//! Vertex expansion via hypergraph expansion.
//!
//! A graph's symmetric vertex expansion equals the hypergraph expansion of a
//! derived hypergraph with one hyperedge per vertex: `e_v = {v} ∪ N(v)`. A
//! set `S` cuts `e_v` exactly when `v`'s closed neighborhood straddles `S`,
//! which happens once per boundary vertex of `S` — so the cut count *is* the
//! symmetric boundary size, for every `S`, and minimization transfers both
//! ways. Anchoring `e_v` at `{v}` keeps the anchored-degree bound at
//! `log₂(d_max + 1)`.

use serde::Serialize;

use crate::hypergraph::{Graph, Hypergraph};
use crate::rounding::{solve_hsse, CutReport, RoundingConfig, RoundingError};
use crate::scalar::{ratio_to_f64, Rational};
use crate::sdp::SolverOptions;

/// Reduce a graph to the hypergraph whose expansion is the graph's symmetric
/// vertex expansion: `n` hyperedges `e_v = {v} ∪ N(v)`, each anchored at
/// `{v}`. Isolated vertices yield singleton hyperedges, which no set cuts.
pub fn vertex_to_hypergraph(g: &Graph) -> Hypergraph {
    let n = g.num_vertices();
    let edges = (0..n as u32)
        .map(|v| {
            let mut e = Vec::with_capacity(g.degree(v) + 1);
            e.push(v);
            e.extend_from_slice(g.neighbors(v));
            e
        })
        .collect();
    let anchors = (0..n as u32).map(|v| vec![v]).collect();
    Hypergraph::with_anchors(n, edges, anchors).expect("closed neighborhoods are valid edges")
}

/// Result of the small-set vertex expansion pipeline: the hypergraph-side
/// report plus both vertex-expansion measures of the returned set.
#[derive(Clone, Debug, Serialize)]
pub struct SsveReport {
    /// `φ^V(S') = |N_out(S')| / |S'|`, exact.
    pub vertex_expansion: Rational,
    pub vertex_expansion_value: f64,
    /// `Φ^V(S') = |N_in(S') ∪ N_out(S')| / min(|S'|, |S̄'|)`, exact; equals
    /// the hypergraph expansion in `cut`.
    pub symmetric_vertex_expansion: Rational,
    pub symmetric_vertex_expansion_value: f64,
    /// The underlying hypergraph rounding report.
    pub cut: CutReport,
}

/// Solve small-set vertex expansion: reduce, run the hypergraph pipeline,
/// and report both vertex-expansion measures of the returned set.
pub fn ssve_solve(
    g: &Graph,
    cfg: &RoundingConfig,
    solver: &SolverOptions<f64>,
) -> Result<SsveReport, RoundingError> {
    let h = vertex_to_hypergraph(g);
    let cut = solve_hsse(&h, cfg, solver)?;
    let vertex_expansion = g.vertex_expansion(&cut.s_prime)?;
    let symmetric = g.symmetric_vertex_expansion(&cut.s_prime)?;
    Ok(SsveReport {
        vertex_expansion,
        vertex_expansion_value: ratio_to_f64(vertex_expansion),
        symmetric_vertex_expansion: symmetric,
        symmetric_vertex_expansion_value: ratio_to_f64(symmetric),
        cut,
    })
}
