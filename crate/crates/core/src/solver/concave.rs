//! Smooth program optimization over small polytopes.
//!
//! Power-mean objectives over a polytope are optimized exactly by candidate
//! enumeration: polytope vertices, closed-form stationary points on facets
//! (the budget-line maximizer formula applied to each facet hyperplane), and
//! golden-section sweeps along edges. The same candidate engine serves both
//! senses: maximizing a concave mean (orders `p <= 1`, Cobb-Douglas) and
//! minimizing a convex one (orders `p >= 1`), which is all the evaluation
//! layer ever needs. A strict-positivity pre-phase decides absorption for
//! zero-absorbing objectives before any enumeration runs.

use crate::error::{Error, Result};
use crate::gmean::{p_mean_utility, PParameter, UtilitySpec};
use crate::solver::lp::{solve_lp, LinearProgram, LpConstraint, LpStatus, VarBound};
use crate::solver::vertex::{enumerate_vertices, BoundingBox, VERTEX_DIM_LIMIT};
use crate::technology::Halfspace;

const CAND_FEAS_TOL: f64 = 1e-7;
const ABSORPTION_TOL: f64 = 1e-9;

/// A concave objective over a polyhedral feasible set in the nonnegative
/// orthant: `{ x >= 0 : H x <= rhs }`.
#[derive(Debug, Clone)]
pub struct ConcaveProgram {
    pub objective: UtilitySpec,
    pub halfspaces: Vec<Halfspace>,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct ConcaveSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Number of candidate points examined.
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum OptSense {
    Maximize,
    Minimize,
}

fn spec_is_concave(spec: &UtilitySpec) -> bool {
    match spec.order() {
        None => true, // Cobb-Douglas
        Some(PParameter::NegInfinity) => true,
        Some(PParameter::PosInfinity) => false,
        Some(PParameter::Finite(p)) => p <= 1.0 + 1e-12,
    }
}

/// Maximizes a concave program to within `tol` of the supremum.
///
/// For zero-absorbing objectives (orders `p <= 0`, Cobb-Douglas) the
/// strict-positivity pre-phase runs first: when no feasible point is
/// componentwise positive the value is exactly zero and the reported point
/// is the maximizer of the arithmetic mean (a weakly efficient witness).
pub fn solve_concave(cp: &ConcaveProgram, tol: f64) -> Result<ConcaveSolution> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidSpec("tolerance must be positive".into()));
    }
    if !spec_is_concave(&cp.objective) {
        return Err(Error::InvalidSpec(
            "objective is not concave on the nonnegative orthant".into(),
        ));
    }
    if cp.objective.dim() != cp.dim {
        return Err(Error::DimensionMismatch { expected: cp.dim, got: cp.objective.dim() });
    }

    if cp.objective.absorbs_zero() {
        let interior = max_min_coordinate(&cp.halfspaces, cp.dim)?;
        if interior <= ABSORPTION_TOL {
            let x = max_coordinate_sum(&cp.halfspaces, cp.dim)?;
            return Ok(ConcaveSolution { x, value: 0.0, candidates: 0 });
        }
    }

    optimize_polytope(&cp.objective, OptSense::Maximize, &cp.halfspaces, cp.dim, tol)
}

/// Largest `s` with a feasible point `x >= s` componentwise.
fn max_min_coordinate(halfspaces: &[Halfspace], dim: usize) -> Result<f64> {
    let mut rows: Vec<LpConstraint> = halfspaces
        .iter()
        .map(|h| {
            let mut c = h.normal.clone();
            c.push(0.0);
            LpConstraint::new(c, h.rhs)
        })
        .collect();
    for k in 0..dim {
        let mut c = vec![0.0; dim + 1];
        c[k] = -1.0;
        c[dim] = 1.0;
        rows.push(LpConstraint::new(c, 0.0));
    }
    let mut objective = vec![0.0; dim + 1];
    objective[dim] = 1.0;
    let lp = LinearProgram {
        objective,
        constraints: rows,
        bounds: vec![VarBound::NonNegative; dim + 1],
    };
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value),
        LpStatus::Infeasible => Err(Error::InfeasiblePoint),
        LpStatus::Unbounded => Err(Error::SolverFailure("feasible set is unbounded".into())),
    }
}

/// Maximizer of the coordinate sum; a weakly efficient feasible point.
fn max_coordinate_sum(halfspaces: &[Halfspace], dim: usize) -> Result<Vec<f64>> {
    let rows: Vec<LpConstraint> = halfspaces
        .iter()
        .map(|h| LpConstraint::new(h.normal.clone(), h.rhs))
        .collect();
    let lp = LinearProgram {
        objective: vec![1.0; dim],
        constraints: rows,
        bounds: vec![VarBound::NonNegative; dim],
    };
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.x.iter().map(|v| v.max(0.0)).collect()),
        LpStatus::Infeasible => Err(Error::InfeasiblePoint),
        LpStatus::Unbounded => Err(Error::SolverFailure("feasible set is unbounded".into())),
    }
}

fn coordinate_cap(halfspaces: &[Halfspace], dim: usize, k: usize) -> Result<f64> {
    let rows: Vec<LpConstraint> = halfspaces
        .iter()
        .map(|h| LpConstraint::new(h.normal.clone(), h.rhs))
        .collect();
    let mut objective = vec![0.0; dim];
    objective[k] = 1.0;
    let lp = LinearProgram { objective, constraints: rows, bounds: vec![VarBound::NonNegative; dim] };
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value.max(0.0)),
        LpStatus::Infeasible => Err(Error::InfeasiblePoint),
        LpStatus::Unbounded => Err(Error::SolverFailure("feasible set is unbounded".into())),
    }
}

fn feasible(point: &[f64], halfspaces: &[Halfspace]) -> bool {
    if point.iter().any(|v| !v.is_finite() || *v < -CAND_FEAS_TOL) {
        return false;
    }
    halfspaces.iter().all(|h| {
        let lhs: f64 = h.normal.iter().zip(point).map(|(a, x)| a * x).sum();
        lhs <= h.rhs + CAND_FEAS_TOL * (1.0 + h.rhs.abs())
    })
}

fn clip_nonneg(point: &mut [f64]) {
    for v in point.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Per-coordinate weights the power objective applies before summing.
fn spec_coefficients(spec: &UtilitySpec) -> Option<Vec<f64>> {
    match spec {
        UtilitySpec::PMeanPlain { coefficients, .. } => Some(coefficients.clone()),
        UtilitySpec::PMeanDirectional { direction, .. } => {
            if direction.support_size() != direction.dim() {
                return None;
            }
            Some(direction.values().iter().map(|g| 1.0 / g).collect())
        }
        UtilitySpec::CobbDouglas { .. } => None,
    }
}

/// Interior stationary point of the objective restricted to the hyperplane
/// `{ b . x = r }` with `b > 0`, `r > 0`. This is the budget-line maximizer
/// for orders `p < 1` and the analogous stationary point for `p > 1` (where
/// it is the hyperplane minimizer of the convex mean).
fn facet_stationary(spec: &UtilitySpec, b: &[f64], r: f64) -> Option<Vec<f64>> {
    match spec {
        UtilitySpec::CobbDouglas { exponents, .. } => {
            Some(exponents.iter().zip(b).map(|(t, bk)| r * t / bk).collect())
        }
        _ => {
            let alpha = spec_coefficients(spec)?;
            let p = match spec.order()? {
                PParameter::Finite(p) => p,
                _ => return None,
            };
            let order = spec.order()?;
            if order.is_multiplicative() {
                let d = b.len() as f64;
                return Some(b.iter().map(|bk| r / (d * bk)).collect());
            }
            if (p - 1.0).abs() < 1e-12 {
                return None; // linear objective: faces are flat
            }
            let q = p / (p - 1.0);
            let ln_terms: Vec<f64> = alpha
                .iter()
                .zip(b)
                .map(|(a, bk)| q * (bk.ln() - a.ln()))
                .collect();
            let lse = log_sum_exp(&ln_terms);
            let point: Vec<f64> = alpha
                .iter()
                .zip(b)
                .map(|(a, bk)| (r.ln() + (bk.ln() - p * a.ln()) / (p - 1.0) - lse).exp())
                .collect();
            if point.iter().all(|v| v.is_finite()) {
                Some(point)
            } else {
                None
            }
        }
    }
}

fn golden_section(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, maximize: bool) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let target = 1e-11 * (1.0 + (hi - lo).abs());
    for _ in 0..120 {
        if (b - a).abs() < target {
            break;
        }
        let pick_c = if maximize { fc > fd } else { fc < fd };
        if pick_c {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if det.abs() < 1e-12 {
        return None;
    }
    let inv = 1.0 / det;
    let mut x = [0.0; 3];
    for k in 0..3 {
        let mut m = a;
        for r in 0..3 {
            m[r][k] = b[r];
        }
        let dk = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        x[k] = dk * inv;
    }
    Some(x)
}

/// Clips the parametric line `p0 + t * dir` against all constraints,
/// returning the feasible `t` interval if nonempty.
fn clip_line(p0: &[f64], dir: &[f64], faces: &[Halfspace]) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for h in faces {
        let a: f64 = h.normal.iter().zip(dir).map(|(n, d)| n * d).sum();
        let b0: f64 = h.normal.iter().zip(p0).map(|(n, x)| n * x).sum();
        let slack = h.rhs - b0;
        if a.abs() <= 1e-12 {
            if slack < -1e-9 * (1.0 + h.rhs.abs()) {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(slack / a);
        } else {
            lo = lo.max(slack / a);
        }
    }
    if lo > hi + 1e-12 || !lo.is_finite() || !hi.is_finite() {
        None
    } else {
        Some((lo, hi))
    }
}

/// Optimizes a power-mean objective over `{ x >= 0 : H x <= rhs }` in
/// dimension <= 3 by exact candidate enumeration.
pub(crate) fn optimize_polytope(
    spec: &UtilitySpec,
    sense: OptSense,
    halfspaces: &[Halfspace],
    dim: usize,
    _tol: f64,
) -> Result<ConcaveSolution> {
    if dim > VERTEX_DIM_LIMIT {
        return Err(Error::DimensionLimit { limit: VERTEX_DIM_LIMIT, got: dim });
    }
    if spec.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: spec.dim() });
    }

    let caps: Vec<f64> = (0..dim)
        .map(|k| coordinate_cap(halfspaces, dim, k))
        .collect::<Result<_>>()?;
    let bounds = BoundingBox::new(vec![0.0; dim], caps.iter().map(|c| c + 1.0).collect());

    let mut candidates = enumerate_vertices(halfspaces, &bounds)?;
    if candidates.is_empty() {
        return Err(Error::InfeasiblePoint);
    }

    // Origin: the unconstrained stationary point of convex-order objectives.
    candidates.push(vec![0.0; dim]);

    // Interior stationary points on single facets with sign-uniform normals.
    for h in halfspaces {
        let scale = h.normal.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale < 1e-12 {
            continue;
        }
        let strictly_pos = h.normal.iter().all(|&v| v > 1e-10 * scale);
        let strictly_neg = h.normal.iter().all(|&v| v < -1e-10 * scale);
        let (b, r) = if strictly_pos {
            (h.normal.clone(), h.rhs)
        } else if strictly_neg {
            (h.normal.iter().map(|v| -v).collect(), -h.rhs)
        } else {
            continue;
        };
        if r <= 1e-12 {
            continue;
        }
        if let Some(point) = facet_stationary(spec, &b, r) {
            candidates.push(point);
        }
    }

    // Edge sweeps where the curvature matches the sense.
    let concave = spec_is_concave(spec);
    let run_edges = matches!(
        (sense, concave),
        (OptSense::Maximize, true) | (OptSense::Minimize, false)
    );
    if run_edges {
        let mut faces: Vec<Halfspace> = halfspaces.to_vec();
        for k in 0..dim {
            let mut wall = vec![0.0; dim];
            wall[k] = -1.0;
            faces.push(Halfspace { normal: wall, rhs: 0.0 });
        }
        let objective = |point: &[f64]| -> f64 {
            let mut p = point.to_vec();
            clip_nonneg(&mut p);
            p_mean_utility(spec, &p).unwrap_or(f64::NAN)
        };
        match dim {
            2 => {
                for h in halfspaces {
                    let n = &h.normal;
                    let norm2: f64 = n.iter().map(|v| v * v).sum();
                    if norm2 < 1e-20 {
                        continue;
                    }
                    let p0: Vec<f64> = n.iter().map(|v| v * h.rhs / norm2).collect();
                    let dir = vec![-n[1], n[0]];
                    if let Some((lo, hi)) = clip_line(&p0, &dir, &faces) {
                        let f = |t: f64| objective(&[p0[0] + t * dir[0], p0[1] + t * dir[1]]);
                        let t = golden_section(&f, lo, hi, sense == OptSense::Maximize);
                        candidates.push(vec![p0[0] + t * dir[0], p0[1] + t * dir[1]]);
                    }
                }
            }
            3 => {
                for i in 0..faces.len() {
                    for j in (i + 1)..faces.len() {
                        let dir = cross3(&faces[i].normal, &faces[j].normal);
                        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if len < 1e-10 {
                            continue;
                        }
                        let a = [
                            [faces[i].normal[0], faces[i].normal[1], faces[i].normal[2]],
                            [faces[j].normal[0], faces[j].normal[1], faces[j].normal[2]],
                            [dir[0], dir[1], dir[2]],
                        ];
                        let Some(p0) = solve3(a, [faces[i].rhs, faces[j].rhs, 0.0]) else {
                            continue;
                        };
                        if let Some((lo, hi)) = clip_line(&p0, &dir, &faces) {
                            let f = |t: f64| {
                                objective(&[
                                    p0[0] + t * dir[0],
                                    p0[1] + t * dir[1],
                                    p0[2] + t * dir[2],
                                ])
                            };
                            let t = golden_section(&f, lo, hi, sense == OptSense::Maximize);
                            candidates.push(vec![
                                p0[0] + t * dir[0],
                                p0[1] + t * dir[1],
                                p0[2] + t * dir[2],
                            ]);
                        }
                    }
                }
            }
            _ => {}
        }
    }

    // Evaluate everything feasible and keep the best; ties go to the
    // lexicographically smallest point.
    let mut best: Option<(Vec<f64>, f64)> = None;
    let examined = candidates.len();
    for mut cand in candidates {
        clip_nonneg(&mut cand);
        if !feasible(&cand, halfspaces) {
            continue;
        }
        let value = p_mean_utility(spec, &cand)?;
        if !value.is_finite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bx, bv)) => {
                let tol = 1e-12 * (1.0 + bv.abs());
                match sense {
                    OptSense::Maximize => {
                        value > bv + tol || (value > bv - tol && lex_less(&cand, bx))
                    }
                    OptSense::Minimize => {
                        value < bv - tol || (value < bv + tol && lex_less(&cand, bx))
                    }
                }
            }
        };
        if better {
            best = Some((cand, value));
        }
    }
    let (x, value) = best.ok_or_else(|| Error::SolverFailure("no feasible candidate point".into()))?;
    Ok(ConcaveSolution { x, value, candidates: examined })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::technology::Direction;

    fn hs(normal: Vec<f64>, rhs: f64) -> Halfspace {
        Halfspace { normal, rhs }
    }

    fn directional(p: f64, dim: usize) -> UtilitySpec {
        UtilitySpec::p_mean_directional(
            PParameter::finite(p).unwrap(),
            Direction::unit(dim),
            true,
        )
        .unwrap()
    }

    #[test]
    fn symmetric_geometric_mean() {
        let cp = ConcaveProgram {
            objective: directional(0.0, 2),
            halfspaces: vec![hs(vec![1.0, 1.0], 2.0)],
            dim: 2,
        };
        let sol = solve_concave(&cp, 1e-9).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-7 && (sol.x[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn square_root_mean_on_degenerate_face() {
        // delta_2 is forced to zero; the half-order normalized mean of (1, 0)
        // is ((1/2) * 1)^2 = 1/4.
        let cp = ConcaveProgram {
            objective: directional(0.5, 2),
            halfspaces: vec![hs(vec![1.0, 0.0], 1.0), hs(vec![0.0, 1.0], 0.0)],
            dim: 2,
        };
        let sol = solve_concave(&cp, 1e-9).unwrap();
        assert!((sol.value - 0.25).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-7 && sol.x[1].abs() < 1e-9);
    }

    #[test]
    fn absorption_short_circuit() {
        let cp = ConcaveProgram {
            objective: directional(-1.0, 2),
            halfspaces: vec![hs(vec![1.0, 0.0], 1.0), hs(vec![0.0, 1.0], 0.0)],
            dim: 2,
        };
        let sol = solve_concave(&cp, 1e-9).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.candidates, 0);
    }

    #[test]
    fn rejects_convex_objective() {
        let cp = ConcaveProgram {
            objective: directional(2.0, 2),
            halfspaces: vec![hs(vec![1.0, 1.0], 2.0)],
            dim: 2,
        };
        assert!(matches!(solve_concave(&cp, 1e-9), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn infeasible_set_reported() {
        let cp = ConcaveProgram {
            objective: directional(0.5, 2),
            halfspaces: vec![hs(vec![-1.0, 0.0], -2.0), hs(vec![1.0, 0.0], 1.0)],
            dim: 2,
        };
        assert!(solve_concave(&cp, 1e-9).is_err());
    }

    #[test]
    fn extreme_negative_order_tracks_minimum() {
        // On { d1 + d2 <= 2, d1 <= 0.8 } the p = -50 value is close to the
        // directional value max min(d1, d2) = 0.8.
        let cp = ConcaveProgram {
            objective: directional(-50.0, 2),
            halfspaces: vec![hs(vec![1.0, 1.0], 2.0), hs(vec![1.0, 0.0], 0.8)],
            dim: 2,
        };
        let sol = solve_concave(&cp, 1e-9).unwrap();
        assert!((sol.value - 0.8).abs() < 0.02 * 0.8);
    }

    #[test]
    fn value_dominates_every_feasible_point() {
        let halfspaces = vec![hs(vec![1.0, 2.0], 2.0), hs(vec![2.0, 1.0], 2.0)];
        for order in [-2.0, -0.5, 0.0, 0.5, 1.0] {
            let cp = ConcaveProgram {
                objective: directional(order, 2),
                halfspaces: halfspaces.clone(),
                dim: 2,
            };
            let sol = solve_concave(&cp, 1e-9).unwrap();
            for probe in [[0.0, 0.0], [0.1, 0.8], [0.5, 0.5], [0.66, 0.66], [0.9, 0.1]] {
                let feasible = halfspaces.iter().all(|h| {
                    h.normal.iter().zip(&probe).map(|(a, x)| a * x).sum::<f64>() <= h.rhs
                });
                assert!(feasible);
                let value = p_mean_utility(&cp.objective, &probe).unwrap();
                assert!(
                    sol.value >= value - 1e-9,
                    "order {order}: solver {} below feasible value {value}",
                    sol.value
                );
            }
        }
    }

    #[test]
    fn minimize_convex_mean_over_upward_set() {
        // min of the order-2 normalized mean over { b : b1 + b2 >= 1, b <= 1 }
        // sits at the symmetric point (1/2, 1/2).
        let spec = directional(2.0, 2);
        let halfspaces = vec![
            hs(vec![-1.0, -1.0], -1.0),
            hs(vec![1.0, 0.0], 1.0),
            hs(vec![0.0, 1.0], 1.0),
        ];
        let sol = optimize_polytope(&spec, OptSense::Minimize, &halfspaces, 2, 1e-9).unwrap();
        assert!((sol.x[0] - 0.5).abs() < 1e-7 && (sol.x[1] - 0.5).abs() < 1e-7);
        assert!((sol.value - 0.5).abs() < 1e-9);
    }
}
