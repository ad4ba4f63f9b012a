//! First-order solver for the relaxation.
//!
//! Primal–dual splitting (Chambolle–Pock with diagonal preconditioning) over
//! the variables `(X, t)`: the prox step projects `X` onto the PSD cone by
//! dense symmetric eigendecomposition and clamps `t ≥ 0`; every linear
//! constraint is a dual row. Triangle rows — the one cubically large family —
//! are activated lazily: periodic scans add the currently violated triples
//! and re-derive the step sizes.
//!
//! Linear coefficients on off-diagonal Gram coordinates are split evenly
//! between the two mirror positions `(i,j)`/`(j,i)`, so the adjoint `Aᵀy` is
//! a symmetric matrix and the PSD projection remains the exact prox. For the
//! same reason the primal step uses a single scalar step size on the whole
//! `X` block (the minimum of the preconditioned column steps, which preserves
//! the step-size contract).
//!
//! The algorithm is deterministic and single-threaded; `seed` is carried into
//! the stats for report plumbing only.
//!
//! Convergence scans assess two candidates: the raw iterate and its running
//! mean (restarted whenever lazy rows activate). Splitting iterates can orbit
//! a saddle point with slowly decaying amplitude — feasible to tolerance yet
//! never objective-stationary — while their mean contracts toward the orbit
//! centre and plateaus much earlier. Whichever candidate first sustains the
//! full criterion (feasible, objective-stationary, no worse than the best
//! feasible value seen, no new rows) is returned; a failed run records which
//! criterion was still blocking as a [`StallReason`].

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::eigen::psd_project;
use super::{
    complete_solution, family_residuals, sdpcost_from_gram, RelaxationSpec, SdpError, SdpSolution,
    DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::mat::SymMat;
use crate::scalar::Scalar;

/// Iteration knobs for [`solve_relaxation`].
#[derive(Clone, Debug, Serialize)]
pub struct SolverOptions<F> {
    /// Residual and objective-plateau tolerance.
    pub tol: F,
    /// Iteration budget.
    pub max_iters: usize,
    /// Recorded in stats and reports; the algorithm itself is deterministic.
    pub seed: u64,
    /// Iterations between feasibility scans (and lazy-row activation).
    pub scan_interval: usize,
}

impl<F: Scalar> Default for SolverOptions<F> {
    fn default() -> Self {
        SolverOptions {
            tol: F::from_f64(DEFAULT_TOL).expect("representable"),
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            scan_interval: 100,
        }
    }
}

/// Metadata attached to solver-produced solutions.
#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub converged: bool,
    /// Max residual of the returned solution (all families).
    pub residual: f64,
    /// Objective of the returned solution.
    pub objective: f64,
    /// Triangle rows activated by the lazy scans.
    pub triangle_rows: usize,
    pub seed: u64,
    /// On a non-converged run, the criterion that was still failing at the
    /// last scan (for the candidate closest to certifying). `None` when
    /// converged.
    pub stall: Option<StallReason>,
}

/// The convergence criterion that was still failing when a scan declined to
/// certify the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StallReason {
    /// The max constraint residual was above the tolerance.
    ResidualAboveTol,
    /// Feasible, but the objective was still moving between scans.
    ObjectiveDrift,
    /// Feasible and stationary, but above the best feasible objective
    /// already recorded.
    AboveBestObjective,
    /// Violated triangle rows were still being activated.
    RowsActivated,
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StallReason::ResidualAboveTol => "the constraint residual stayed above tolerance",
            StallReason::ObjectiveDrift => "the objective had not plateaued",
            StallReason::AboveBestObjective => {
                "the iterate stayed above the best feasible objective seen"
            }
            StallReason::RowsActivated => "violated triangle rows were still being activated",
        })
    }
}

/// One linear constraint row `⟨cols, z⟩ {≤,=} rhs` in sparse form.
struct Row<F> {
    cols: Vec<(usize, F)>,
    rhs: F,
    /// Equality rows keep a free dual; inequality duals clamp to `≥ 0`.
    eq: bool,
}

/// Consecutive plateaued scans required before declaring convergence.
const PLATEAU_SCANS: usize = 3;

/// Plateau bookkeeping for one convergence candidate (the raw iterate or its
/// running mean). Each candidate tracks its own objective trajectory; the
/// best-feasible reference point is shared between candidates.
struct Curve<F> {
    last_obj: Option<F>,
    run: usize,
    stall: StallReason,
}

impl<F: Scalar> Curve<F> {
    fn new() -> Self {
        Curve { last_obj: None, run: 0, stall: StallReason::ObjectiveDrift }
    }

    /// Record one scan of this candidate; returns true once it has sustained
    /// the full criterion for [`PLATEAU_SCANS`] consecutive scans.
    fn assess(&mut self, obj: F, residual: F, tol: F, best_obj: F, added: usize) -> bool {
        let feasible = residual <= tol;
        let slack = tol * (F::one() + obj.abs());
        let plateaued = match self.last_obj {
            Some(prev) => (obj - prev).abs() <= slack,
            None => false,
        };
        self.last_obj = Some(obj);
        let near_best = obj <= best_obj + slack;
        if feasible && plateaued && near_best && added == 0 {
            self.run += 1;
        } else {
            self.run = 0;
            self.stall = if !feasible {
                StallReason::ResidualAboveTol
            } else if added > 0 {
                StallReason::RowsActivated
            } else if !plateaued {
                StallReason::ObjectiveDrift
            } else {
                StallReason::AboveBestObjective
            };
        }
        self.run >= PLATEAU_SCANS
    }
}

struct Pdhg<'a, F: Scalar> {
    spec: &'a RelaxationSpec,
    n: usize,
    nn: usize,
    m: usize,
    tol: F,
    rows: Vec<Row<F>>,
    tri_added: HashSet<(u32, u32, u32)>,
    /// Primal `(X row-major, t)`, its extrapolation, and the dual.
    x: Vec<F>,
    xbar: Vec<F>,
    y: Vec<F>,
    sigma: Vec<F>,
    tau_x: F,
    tau_t: Vec<F>,
    grad: Vec<F>,
    // Scan bookkeeping.
    /// Running mean of the Gram block since the last row activation.
    mean: Vec<F>,
    mean_count: usize,
    raw: Curve<F>,
    avg: Curve<F>,
    best_obj: F,
    best_gram: Option<SymMat<F>>,
    /// Gram that certified convergence when the mean candidate won.
    winner: Option<SymMat<F>>,
    /// Blocking criterion at the most recent scan.
    stall: StallReason,
}

impl<'a, F: Scalar> Pdhg<'a, F> {
    fn new(spec: &'a RelaxationSpec, tol: F) -> Self {
        let n = spec.n();
        let nn = n * n;
        let m = spec.edges().len();
        let mut solver = Pdhg {
            spec,
            n,
            nn,
            m,
            tol,
            rows: static_rows(spec),
            tri_added: HashSet::new(),
            x: vec![F::zero(); nn + m],
            xbar: Vec::new(),
            y: Vec::new(),
            sigma: Vec::new(),
            tau_x: F::one(),
            tau_t: Vec::new(),
            grad: vec![F::zero(); nn + m],
            mean: Vec::new(),
            mean_count: 1,
            raw: Curve::new(),
            avg: Curve::new(),
            best_obj: F::infinity(),
            best_gram: None,
            winner: None,
            stall: StallReason::ObjectiveDrift,
        };
        // Start at X = I/n (always feasible: δn ≥ 1 makes spread hold) with
        // epigraph variables at their induced values.
        let inv_n = F::from_usize(n).expect("representable").recip();
        for i in 0..n {
            solver.x[i * n + i] = inv_n;
        }
        for (e_idx, e) in spec.edges().iter().enumerate() {
            if e.len() > 1 {
                solver.x[nn + e_idx] = inv_n + inv_n;
            }
        }
        solver.mean = solver.x[..nn].to_vec();
        solver.xbar = solver.x.clone();
        solver.y = vec![F::zero(); solver.rows.len()];
        solver.recompute_steps();
        solver
    }

    /// Diagonal preconditioning: `σ_i = 1/Σ_j|A_ij|`, `τ_j = 1/Σ_i|A_ij|`,
    /// with the `X` block collapsed to its minimum column step.
    fn recompute_steps(&mut self) {
        let mut col_sums = vec![F::zero(); self.nn + self.m];
        self.sigma = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut row_sum = F::zero();
            for &(j, c) in &row.cols {
                row_sum = row_sum + c.abs();
                col_sums[j] = col_sums[j] + c.abs();
            }
            self.sigma.push(row_sum.recip());
        }
        let mut tau_x = F::infinity();
        for &sum in col_sums.iter().take(self.nn) {
            if sum > F::zero() {
                tau_x = tau_x.min(sum.recip());
            }
        }
        self.tau_x = if tau_x.is_finite() { tau_x } else { F::one() };
        self.tau_t = (0..self.m)
            .map(|e| {
                let s = col_sums[self.nn + e];
                if s > F::zero() {
                    s.recip()
                } else {
                    F::one()
                }
            })
            .collect();
    }

    fn dual_step(&mut self) {
        for (i, row) in self.rows.iter().enumerate() {
            let mut ax = F::zero();
            for &(j, c) in &row.cols {
                ax = ax + c * self.xbar[j];
            }
            let mut yi = self.y[i] + self.sigma[i] * (ax - row.rhs);
            if !row.eq && yi < F::zero() {
                yi = F::zero();
            }
            self.y[i] = yi;
        }
    }

    fn primal_step(&mut self) {
        for g in self.grad.iter_mut() {
            *g = F::zero();
        }
        for (i, row) in self.rows.iter().enumerate() {
            let yi = self.y[i];
            if yi == F::zero() {
                continue;
            }
            for &(j, c) in &row.cols {
                self.grad[j] = self.grad[j] + c * yi;
            }
        }
        // X block: gradient step then PSD projection (the exact prox because
        // the step size is uniform on the block).
        let mut step = SymMat::zeros(self.n);
        {
            let buf = step.as_mut_slice();
            for (j, b) in buf.iter_mut().enumerate() {
                *b = self.x[j] - self.tau_x * self.grad[j];
            }
        }
        let projected = psd_project(&step);
        for (j, &new) in projected.as_slice().iter().enumerate() {
            let old = self.x[j];
            self.x[j] = new;
            self.xbar[j] = new + new - old;
        }
        // t block: unit objective coefficient, then clamp to ≥ 0.
        for e in 0..self.m {
            let j = self.nn + e;
            let old = self.x[j];
            let mut new = old - self.tau_t[e] * (self.grad[j] + F::one());
            if new < F::zero() {
                new = F::zero();
            }
            self.x[j] = new;
            self.xbar[j] = new + new - old;
        }
    }

    fn gram_from_x(&self) -> SymMat<F> {
        let mut g = SymMat::zeros(self.n);
        g.as_mut_slice().copy_from_slice(&self.x[..self.nn]);
        g
    }

    fn mean_gram(&self) -> SymMat<F> {
        let mut g = SymMat::zeros(self.n);
        g.as_mut_slice().copy_from_slice(&self.mean);
        g
    }

    /// Fold the current (PSD-projected) Gram block into the running mean.
    /// The mean of symmetric PSD iterates stays symmetric and PSD, so it is a
    /// legitimate convergence candidate in its own right.
    fn accumulate(&mut self) {
        self.mean_count += 1;
        let inv = F::from_usize(self.mean_count).expect("representable").recip();
        for (m, &xv) in self.mean.iter_mut().zip(&self.x[..self.nn]) {
            *m = *m + (xv - *m) * inv;
        }
    }

    /// Add rows for currently violated triangle triples (capped per scan,
    /// worst first). Returns how many were added.
    fn add_violated_triangles(&mut self, gram: &SymMat<F>) -> usize {
        let n = self.n;
        let mut violated: Vec<(F, u32, u32, u32)> = Vec::new();
        for v in 0..n {
            for u in 0..n {
                if u == v {
                    continue;
                }
                for w in (u + 1)..n {
                    if w == v {
                        continue;
                    }
                    let lhs = gram.get(u, v) + gram.get(v, w) - gram.get(u, w) - gram.get(v, v);
                    if lhs > self.tol && !self.tri_added.contains(&(u as u32, v as u32, w as u32))
                    {
                        violated.push((lhs, u as u32, v as u32, w as u32));
                    }
                }
            }
        }
        if violated.is_empty() {
            return 0;
        }
        violated.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| (a.1, a.2, a.3).cmp(&(b.1, b.2, b.3)))
        });
        let cap = (4 * n).max(64);
        let take = violated.len().min(cap);
        let half = F::from_f64(0.5).expect("representable");
        for &(_, u, v, w) in &violated[..take] {
            self.tri_added.insert((u, v, w));
            let (u, v, w) = (u as usize, v as usize, w as usize);
            self.rows.push(Row {
                cols: vec![
                    (u * self.n + v, half),
                    (v * self.n + u, half),
                    (v * self.n + w, half),
                    (w * self.n + v, half),
                    (u * self.n + w, -half),
                    (w * self.n + u, -half),
                    (v * self.n + v, -F::one()),
                ],
                rhs: F::zero(),
                eq: false,
            });
            self.y.push(F::zero());
        }
        self.recompute_steps();
        take
    }

    /// Periodic feasibility/plateau scan over both candidates (raw iterate
    /// and running mean). Returns true once either has been feasible,
    /// objective-stationary, no worse than the best feasible objective seen,
    /// and triangle-complete for [`PLATEAU_SCANS`] consecutive scans.
    fn scan(&mut self) -> bool {
        let gram = self.gram_from_x();
        let obj = sdpcost_from_gram(self.spec.edges(), &gram);
        let residual = family_residuals(self.spec, &gram, &obj).max();
        let mgram = self.mean_gram();
        let mobj = sdpcost_from_gram(self.spec.edges(), &mgram);
        let mresidual = family_residuals(self.spec, &mgram, &mobj).max();
        // Row activation is driven by the raw iterate; the mean's own
        // residual check covers the full triangle family regardless.
        let added = self.add_violated_triangles(&gram);

        if residual <= self.tol && obj < self.best_obj {
            self.best_obj = obj;
            self.best_gram = Some(gram);
        }
        if mresidual <= self.tol && mobj < self.best_obj {
            self.best_obj = mobj;
            self.best_gram = Some(mgram.clone());
        }

        let raw_ok = self.raw.assess(obj, residual, self.tol, self.best_obj, added);
        let avg_ok = self.avg.assess(mobj, mresidual, self.tol, self.best_obj, added);
        // Surface the blocking criterion of whichever candidate is closer to
        // certifying.
        self.stall = if self.avg.run > self.raw.run { self.avg.stall } else { self.raw.stall };
        self.winner = if raw_ok { None } else if avg_ok { Some(mgram) } else { None };

        if added > 0 {
            // New rows change the dynamics; restart the mean on the current
            // iterate so stale history cannot mask the shifted trajectory.
            self.mean.copy_from_slice(&self.x[..self.nn]);
            self.mean_count = 1;
            self.avg = Curve::new();
        }
        raw_ok || avg_ok
    }

    fn finish(mut self, iterations: usize, converged: bool, seed: u64) -> SdpSolution<F> {
        let gram = if converged {
            // The certifying candidate: the mean gram when that curve won,
            // the raw iterate otherwise.
            match self.winner.take() {
                Some(g) => g,
                None => self.gram_from_x(),
            }
        } else {
            // On failure fall back to the best feasible snapshot, if any.
            self.best_gram.clone().unwrap_or_else(|| self.gram_from_x())
        };
        let mut sol = complete_solution(self.spec, gram, None);
        sol.stats = Some(SolveStats {
            iterations,
            converged,
            residual: sol.residuals.max().to_f64().unwrap_or(f64::NAN),
            objective: sol.sdpcost.to_f64().unwrap_or(f64::NAN),
            triangle_rows: self.tri_added.len(),
            seed,
            stall: if converged { None } else { Some(self.stall) },
        });
        sol
    }
}

/// Static (non-triangle) constraint rows of a relaxation.
fn static_rows<F: Scalar>(spec: &RelaxationSpec) -> Vec<Row<F>> {
    let n = spec.n();
    let nn = n * n;
    let half = F::from_f64(0.5).expect("representable");
    let delta_n: F = spec.delta_n();
    let mut rows = Vec::new();

    // Spread: Σ_v X_uv ≤ δn·X_uu, i.e. (1 − δn)X_uu + Σ_{v≠u} X_uv ≤ 0.
    for u in 0..n {
        let mut cols = Vec::with_capacity(2 * n - 1);
        let diag = F::one() - delta_n;
        if diag != F::zero() {
            cols.push((u * n + u, diag));
        }
        for v in 0..n {
            if v != u {
                cols.push((u * n + v, half));
                cols.push((v * n + u, half));
            }
        }
        rows.push(Row { cols, rhs: F::zero(), eq: false });
    }

    // Normalization: Σ_u X_uu = 1.
    rows.push(Row {
        cols: (0..n).map(|u| (u * n + u, F::one())).collect(),
        rhs: F::one(),
        eq: true,
    });

    // Box lower: −X_uv ≤ 0 over unordered pairs.
    for u in 0..n {
        for v in (u + 1)..n {
            rows.push(Row {
                cols: vec![(u * n + v, -half), (v * n + u, -half)],
                rhs: F::zero(),
                eq: false,
            });
        }
    }

    // Box upper: X_uv − X_uu ≤ 0 over ordered pairs.
    for u in 0..n {
        for v in 0..n {
            if v != u {
                rows.push(Row {
                    cols: vec![(u * n + v, half), (v * n + u, half), (u * n + u, -F::one())],
                    rhs: F::zero(),
                    eq: false,
                });
            }
        }
    }

    // Epigraph: X_uu + X_vv − 2X_uv − t_e ≤ 0 per pair within each edge.
    for (e_idx, e) in spec.edges().iter().enumerate() {
        for (a, &up) in e.iter().enumerate() {
            for &vp in &e[a + 1..] {
                let (u, v) = (up as usize, vp as usize);
                rows.push(Row {
                    cols: vec![
                        (u * n + u, F::one()),
                        (v * n + v, F::one()),
                        (u * n + v, -F::one()),
                        (v * n + u, -F::one()),
                        (nn + e_idx, -F::one()),
                    ],
                    rhs: F::zero(),
                    eq: false,
                });
            }
        }
    }

    rows
}

/// Run the splitting with explicit options; always returns a usable point —
/// the certifying candidate on success (raw iterate or running mean), the
/// best feasible snapshot otherwise — with `stats.converged` telling whether
/// the tolerance was certified and `stats.stall` naming the blocking
/// criterion when it was not.
pub fn solve_relaxation<F: Scalar>(
    spec: &RelaxationSpec,
    opts: &SolverOptions<F>,
) -> SdpSolution<F> {
    assert!(opts.tol > F::zero(), "tolerance must be positive");
    assert!(opts.scan_interval > 0, "scan interval must be positive");
    let mut pdhg = Pdhg::new(spec, opts.tol);
    // Scan the (feasible) starting point so early convergence is possible.
    let mut converged = pdhg.scan();
    let mut iterations = 0;
    while !converged && iterations < opts.max_iters {
        iterations += 1;
        pdhg.dual_step();
        pdhg.primal_step();
        pdhg.accumulate();
        if iterations % opts.scan_interval == 0 || iterations == opts.max_iters {
            converged = pdhg.scan();
        }
    }
    pdhg.finish(iterations, converged, opts.seed)
}

/// [`solve_relaxation`] that promotes a non-converged run to an error.
///
/// On success the solution's residuals are all ≤ `opts.tol` and its objective
/// is within `tol·(1+|objective|)` of the best feasible value encountered.
/// Otherwise [`SdpError::NonConvergence`] names the criterion that was still
/// failing and carries the best approximate solution found, which the caller
/// may still choose to use.
pub fn solve_with_options<F: Scalar>(
    spec: &RelaxationSpec,
    opts: &SolverOptions<F>,
) -> Result<SdpSolution<F>, SdpError<F>> {
    let sol = solve_relaxation(spec, opts);
    let stats = sol.stats.as_ref().expect("solver attaches stats");
    if stats.converged {
        Ok(sol)
    } else {
        Err(SdpError::NonConvergence {
            iterations: stats.iterations,
            residual: F::from_f64(stats.residual).unwrap_or_else(F::nan),
            tol: opts.tol,
            reason: stats.stall.unwrap_or(StallReason::ObjectiveDrift),
            solution: Box::new(sol),
        })
    }
}

/// Solve to tolerance `tol` within `max_iters` iterations (other options at
/// their defaults); see [`solve_with_options`].
pub fn solve<F: Scalar>(
    spec: &RelaxationSpec,
    tol: F,
    max_iters: usize,
    seed: u64,
) -> Result<SdpSolution<F>, SdpError<F>> {
    let opts = SolverOptions { tol, max_iters, seed, ..SolverOptions::default() };
    solve_with_options(spec, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{Hypergraph, VertexSet};
    use crate::scalar::Rational;
    use crate::sdp::{build_relaxation, check_feasibility, intended_solution};

    fn solve_gap(r: usize) -> SdpSolution<f64> {
        let h = Hypergraph::new(r, vec![(0..r as u32).collect()]).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, r as i64)).unwrap();
        solve(&spec, 1e-6, 50_000, 7).expect("converges")
    }

    #[test]
    fn zero_edge_instance_is_immediate() {
        let h = Hypergraph::new(6, vec![]).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 2)).unwrap();
        let sol = solve::<f64>(&spec, 1e-6, 1_000, 0).unwrap();
        assert!(sol.sdpcost <= 1e-6);
        let report = check_feasibility(&sol, &spec, 1e-6);
        assert!(report.pass, "residuals: {:?}", report.residuals);
    }

    #[test]
    fn gap_instance_reaches_known_optimum() {
        for r in [4usize, 8] {
            let sol = solve_gap(r);
            let target = 2.0 / r as f64;
            assert!(
                sol.sdpcost <= target + 1e-3,
                "r={r}: sdpcost {} vs 2/r {}",
                sol.sdpcost,
                target
            );
            // The relaxation also cannot beat the true optimum by much: the
            // scaled identity is optimal here.
            assert!(sol.sdpcost >= target - 1e-2, "r={r}: sdpcost {}", sol.sdpcost);
        }
    }

    #[test]
    fn solved_solutions_satisfy_feasibility_and_vector_recovery() {
        let h = Hypergraph::new(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 5], vec![1, 4]],
        )
        .unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 3)).unwrap();
        let sol = solve::<f64>(&spec, 1e-6, 50_000, 3).expect("converges");
        let report = check_feasibility(&sol, &spec, 2e-6);
        assert!(report.pass, "residuals: {:?}", report.residuals);
        assert!(sol.residuals.gram_vs_vectors <= 1e-8);
        assert!(sol.residuals.psd <= 1e-8);
    }

    #[test]
    fn solver_never_beats_an_intended_solution_by_more_than_tol() {
        // Relaxation soundness on a small fixed instance: the solved value is
        // ≤ φ(S) for every admissible S (checked via the intended solution).
        let h = Hypergraph::new(
            5,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0], vec![0, 2]],
        )
        .unwrap();
        let delta = Rational::new(2, 5);
        let spec = build_relaxation(&h, delta).unwrap();
        let sol = solve::<f64>(&spec, 1e-6, 50_000, 1).expect("converges");
        for s in [vec![0u32], vec![1], vec![2], vec![0, 1], vec![2, 3]] {
            let set = VertexSet::new(5, s.iter().copied()).unwrap();
            let intended: SdpSolution<f64> = intended_solution(&h, &set, delta).unwrap();
            assert!(
                sol.sdpcost <= intended.sdpcost + 1e-3,
                "sdpcost {} exceeds φ({:?}) = {}",
                sol.sdpcost,
                s,
                intended.sdpcost
            );
        }
    }

    #[test]
    fn determinism_across_runs() {
        let a = solve_gap(4);
        let b = solve_gap(4);
        assert_eq!(a.gram.as_slice(), b.gram.as_slice());
        assert_eq!(a.sdpcost, b.sdpcost);
    }

    #[test]
    fn nonconvergence_carries_best_iterate_and_names_the_blocker() {
        let h = Hypergraph::new(4, vec![vec![0, 1, 2, 3]]).unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 4)).unwrap();
        // One iteration cannot certify a plateau (three stable scans), even
        // though the feasible starting point keeps the residual tiny.
        match solve::<f64>(&spec, 1e-12, 1, 0) {
            Err(SdpError::NonConvergence { iterations, reason, solution, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(reason, StallReason::ObjectiveDrift);
                assert_eq!(solution.gram.n(), 4);
                assert!(solution.sdpcost.is_finite());
                assert_eq!(
                    solution.stats.as_ref().and_then(|s| s.stall),
                    Some(StallReason::ObjectiveDrift)
                );
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn oscillatory_instance_converges_via_the_running_mean() {
        // On this instance the raw iterate orbits the saddle point for
        // hundreds of thousands of iterations — feasible to tolerance but
        // never objective-stationary — while its running mean settles fast.
        let h = crate::oracle::gen_random_hypergraph(
            8,
            16,
            crate::oracle::SizeLaw::Uniform { lo: 2, hi: 4 },
            11,
        )
        .unwrap();
        let spec = build_relaxation(&h, Rational::new(1, 3)).unwrap();
        let sol = solve::<f64>(&spec, 1e-4, 50_000, 0).expect("mean candidate certifies");
        let stats = sol.stats.as_ref().unwrap();
        assert!(stats.iterations <= 20_000, "took {} iterations", stats.iterations);
        assert!(stats.residual <= 1e-4);
        assert!(
            (2.45..2.52).contains(&stats.objective),
            "objective {} left the known band",
            stats.objective
        );
    }
}
