//! Distance functions and efficiency measures over production sets.
//!
//! Everything here evaluates `sup { W(u - z) : u in T, u >= z }` for a
//! monotone utility `W`, specialized by the mean order: a joint-expansion
//! LP at the limiting orders and `p = 1`, exact candidate enumeration for
//! the other finite orders on convex technologies, and a dominating-point
//! scan on free-disposal hulls. Scores follow the conventions: `-inf` for
//! points outside the technology and `+inf` for a zero direction at a
//! feasible point.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gmean::{p_mean_utility, PParameter, UtilitySpec};
use crate::solver::concave::{optimize_polytope, solve_concave, ConcaveProgram, OptSense};
use crate::solver::lp::{solve_lp, LinearProgram, LpConstraint, LpStatus, VarBound};
use crate::solver::vertex::VERTEX_DIM_LIMIT;
use crate::technology::{Direction, EfficiencyStatus, Halfspace, NetputVector, Technology};

/// Tolerance used to confirm that a reported projection is feasible.
const PROJECTION_TOL: f64 = 1e-7;

/// Rough solver accounting attached to each evaluation.
#[derive(Debug, Clone, Default)]
pub struct SolverStats {
    pub method: &'static str,
    pub lp_calls: usize,
    pub candidates: usize,
}

/// Outcome of a distance evaluation.
#[derive(Debug, Clone)]
pub struct EvalResult {
    /// `-inf` outside the technology, `+inf` for a zero direction.
    pub score: ExtReal,
    /// Optimal expansion, reported on all coordinates (zero off-support).
    pub delta_star: Option<Vec<f64>>,
    /// The reference point `z + delta* ⊙ g` when the score is finite.
    pub projection: Option<NetputVector>,
    pub status: EfficiencyStatus,
    pub diagnostics: SolverStats,
}

impl EvalResult {
    fn infeasible(method: &'static str) -> Self {
        EvalResult {
            score: ExtReal::NegInf,
            delta_star: None,
            projection: None,
            status: EfficiencyStatus::Infeasible,
            diagnostics: SolverStats { method, ..Default::default() },
        }
    }
}

fn zero_direction_result(tech: &Technology, z: &NetputVector, method: &'static str) -> Result<EvalResult> {
    let full: Vec<usize> = (0..tech.dim()).collect();
    Ok(EvalResult {
        score: ExtReal::PosInf,
        delta_star: None,
        projection: None,
        status: tech.classify(z, &full)?,
        diagnostics: SolverStats { method, ..Default::default() },
    })
}

/// Assembles a finite-score result: expands the support expansion to full
/// dimension, verifies the projection, and classifies the evaluated point.
fn finish(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    score: f64,
    delta_support: &[f64],
    diagnostics: SolverStats,
) -> Result<EvalResult> {
    let support = g.support();
    let mut delta = vec![0.0; tech.dim()];
    for (slot, &k) in support.iter().enumerate() {
        delta[k] = delta_support[slot].max(0.0);
    }
    let projection: Vec<f64> = z
        .values()
        .iter()
        .zip(&delta)
        .zip(g.values())
        .map(|((zv, dv), gv)| zv + dv * gv)
        .collect();
    if !tech.contains_with_tol(&projection, PROJECTION_TOL)? {
        return Err(Error::SolverFailure(
            "reported projection is not feasible within tolerance".into(),
        ));
    }
    let status = tech.classify(z, &support)?;
    Ok(EvalResult {
        score: ExtReal::finite(score),
        delta_star: Some(delta.clone()),
        projection: Some(NetputVector::new(projection, z.num_inputs())?),
        status,
        diagnostics,
    })
}

/// The joint-expansion value `sup { d : z + d g in T }` together with the
/// coverage-row duals when an LP was solved (hull technologies).
pub(crate) fn directional_value_with_duals(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
) -> Result<(f64, Option<Vec<f64>>)> {
    let zv = z.values();
    let gv = g.values();
    match tech {
        Technology::HRep { constraints, .. } => {
            let mut best = f64::INFINITY;
            for h in constraints {
                let coeff: f64 = h.normal.iter().zip(gv).map(|(n, g)| n * g).sum();
                if coeff > 1e-12 {
                    let shift: f64 = h.normal.iter().zip(zv).map(|(n, v)| n * v).sum();
                    best = best.min((h.rhs - shift) / coeff);
                }
            }
            if best == f64::INFINITY {
                return Err(Error::UnboundedTechnology);
            }
            Ok((best.max(0.0), None))
        }
        Technology::Fdh { points } => {
            let support = g.support();
            let mut best = f64::NEG_INFINITY;
            for a in points {
                let off_ok = (0..tech.dim())
                    .filter(|k| !support.contains(k))
                    .all(|k| a.values()[k] >= zv[k] - 1e-9);
                if off_ok {
                    let reach = support
                        .iter()
                        .map(|&k| (a.values()[k] - zv[k]) / gv[k])
                        .fold(f64::INFINITY, f64::min);
                    best = best.max(reach);
                }
            }
            if best == f64::NEG_INFINITY {
                return Err(Error::InfeasiblePoint);
            }
            Ok((best.max(0.0), None))
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let d = tech.dim();
            let mut rows = Vec::with_capacity(d + 2);
            for k in 0..d {
                let mut c = vec![0.0; n + 1];
                for (a, p) in points.iter().enumerate() {
                    c[a] = -p.values()[k];
                }
                c[n] = gv[k];
                rows.push(LpConstraint::new(c, -zv[k]));
            }
            rows.push(LpConstraint::new(ones_then_zero(n), 1.0));
            rows.push(LpConstraint::new(neg_ones_then_zero(n), -1.0));
            let mut objective = vec![0.0; n + 1];
            objective[n] = 1.0;
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; n + 1],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => {
                    let w = sol.duals[..d].to_vec();
                    Ok((sol.objective_value.max(0.0), Some(w)))
                }
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
    }
}

/// Largest simultaneous expansion of `z` along `g` still inside `T`.
pub fn directional_distance(tech: &Technology, z: &NetputVector, g: &Direction) -> Result<EvalResult> {
    check_eval_dims(tech, z, g)?;
    let method = "directional";
    if !tech.contains(z)? {
        return Ok(EvalResult::infeasible(method));
    }
    if g.is_zero() {
        return zero_direction_result(tech, z, method);
    }
    let (value, _) = directional_value_with_duals(tech, z, g)?;
    let dg = g.support_size();
    let diagnostics = SolverStats { method, lp_calls: 1, candidates: 0 };
    finish(tech, z, g, value, &vec![value; dg], diagnostics)
}

/// Best single-coordinate expansion over the support of `g`.
pub fn asymmetric_distance(tech: &Technology, z: &NetputVector, g: &Direction) -> Result<EvalResult> {
    check_eval_dims(tech, z, g)?;
    let method = "asymmetric";
    if !tech.contains(z)? {
        return Ok(EvalResult::infeasible(method));
    }
    if g.is_zero() {
        return zero_direction_result(tech, z, method);
    }
    let support = g.support();
    let mut best = f64::NEG_INFINITY;
    let mut winner = 0usize;
    for (slot, &k) in support.iter().enumerate() {
        let dir = Direction::coordinate(tech.dim(), k, g.values()[k])?;
        let reach = tech.single_direction_max(z, &dir, k)?;
        if reach > best + 1e-12 {
            best = reach;
            winner = slot;
        }
    }
    let mut delta = vec![0.0; support.len()];
    delta[winner] = best;
    let diagnostics = SolverStats { method, lp_calls: support.len(), candidates: 0 };
    finish(tech, z, g, best.max(0.0), &delta, diagnostics)
}

fn check_eval_dims(tech: &Technology, z: &NetputVector, g: &Direction) -> Result<()> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    if g.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: g.dim() });
    }
    Ok(())
}

/// Normalized mean of the expansion ratios of a dominating-point corner.
fn fdh_corner_value(
    corner: &[f64],
    p: PParameter,
) -> Result<f64> {
    let spec = UtilitySpec::p_mean_directional(p, Direction::unit(corner.len()), true)?;
    p_mean_utility(&spec, corner)
}

/// Exact evaluation on a free-disposal hull: scan the dominating points.
fn evaluate_p_fdh(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    p: PParameter,
) -> Result<(f64, Vec<f64>)> {
    let corners = tech.delta_candidates(z, g)?;
    if corners.is_empty() {
        return Err(Error::InfeasiblePoint);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for corner in corners {
        let value = fdh_corner_value(&corner, p)?;
        let better = match &best {
            None => true,
            Some((bv, bx)) => value > bv + 1e-15 || (value >= bv - 1e-15 && corner < *bx),
        };
        if better {
            best = Some((value, corner));
        }
    }
    let (value, corner) = best.unwrap();
    Ok((value, corner))
}

/// The generalized directional distance of order `p`.
///
/// Dispatch: the limiting orders and `p = 1` reduce to linear programs; the
/// other finite orders run exact candidate enumeration on convex
/// technologies (support size at most 3) and the dominating-point closed
/// form on free-disposal hulls (any dimension).
pub fn evaluate_p(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    p: PParameter,
) -> Result<EvalResult> {
    check_eval_dims(tech, z, g)?;
    let method = "generalized";
    if !tech.contains(z)? {
        return Ok(EvalResult::infeasible(method));
    }
    if g.is_zero() {
        return zero_direction_result(tech, z, method);
    }
    match p {
        PParameter::NegInfinity => directional_distance(tech, z, g),
        PParameter::PosInfinity => asymmetric_distance(tech, z, g),
        PParameter::Finite(pf) => {
            let support = g.support();
            let dg = support.len();
            if let Technology::Fdh { .. } = tech {
                let (value, corner) = evaluate_p_fdh(tech, z, g, p)?;
                let diagnostics =
                    SolverStats { method: "fdh-scan", lp_calls: 0, candidates: 0 };
                return finish(tech, z, g, value, &corner, diagnostics);
            }
            if (pf - 1.0).abs() < 1e-12 {
                let (value, delta, lp_calls) = mean_expansion_lp(tech, z, g)?;
                let diagnostics = SolverStats { method: "mean-lp", lp_calls, candidates: 0 };
                return finish(tech, z, g, value, &delta, diagnostics);
            }
            if dg > VERTEX_DIM_LIMIT {
                return Err(Error::UnsupportedRegime(format!(
                    "order {p} with direction support {dg} exceeds the exact-enumeration \
                     limit {VERTEX_DIM_LIMIT} on convex technologies"
                )));
            }
            let halfspaces = tech.delta_halfspaces(z, g)?;
            let spec = UtilitySpec::p_mean_directional(p, Direction::unit(dg), true)?;
            let sol = if pf <= 1.0 {
                let cp = ConcaveProgram { objective: spec, halfspaces, dim: dg };
                solve_concave(&cp, 1e-10)?
            } else {
                optimize_polytope(&spec, OptSense::Maximize, &halfspaces, dg, 1e-10)?
            };
            let diagnostics = SolverStats {
                method: "candidate-enumeration",
                lp_calls: dg + 1,
                candidates: sol.candidates,
            };
            finish(tech, z, g, sol.value, &sol.x, diagnostics)
        }
    }
}

/// Maximize the arithmetic mean of the expansion ratios (an LP).
fn mean_expansion_lp(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
) -> Result<(f64, Vec<f64>, usize)> {
    let support = g.support();
    let dg = support.len();
    let mean_coeff = 1.0 / dg as f64;
    match tech {
        Technology::HRep { .. } => {
            let halfspaces = tech.delta_halfspaces(z, g)?;
            let rows: Vec<LpConstraint> = halfspaces
                .iter()
                .map(|h| LpConstraint::new(h.normal.clone(), h.rhs))
                .collect();
            let lp = LinearProgram {
                objective: vec![mean_coeff; dg],
                constraints: rows,
                bounds: vec![VarBound::NonNegative; dg],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value, sol.x, 1)),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let d = tech.dim();
            let zv = z.values();
            let mut rows = Vec::with_capacity(d + 2);
            for k in 0..d {
                let mut c = vec![0.0; n + dg];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                if let Some(slot) = support.iter().position(|&s| s == k) {
                    c[n + slot] = g.values()[k];
                }
                rows.push(LpConstraint::new(c, -zv[k]));
            }
            let mut one = vec![1.0; n];
            one.resize(n + dg, 0.0);
            rows.push(LpConstraint::new(one.clone(), 1.0));
            rows.push(LpConstraint::new(one.iter().map(|v| -v).collect(), -1.0));
            let mut objective = vec![0.0; n + dg];
            for slot in 0..dg {
                objective[n + slot] = mean_coeff;
            }
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; n + dg],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value, sol.x[n..].to_vec(), 1)),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::Fdh { .. } => unreachable!("free-disposal hulls use the scan route"),
    }
}

/// `sup { W(u - z) : u in T_z }` for a monotone utility spec.
pub fn evaluate_utility(tech: &Technology, z: &NetputVector, spec: &UtilitySpec) -> Result<EvalResult> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    let method = "utility";
    if let UtilitySpec::PMeanDirectional { p, direction, normalized } = spec {
        // Directional specs reduce to the order dispatch, up to the
        // d_g^{1/p} factor between the normalized and plain variants.
        let mut result = evaluate_p(tech, z, direction, *p)?;
        if !normalized {
            if let (ExtReal::Finite(v), PParameter::Finite(pf)) = (result.score, p) {
                if !p.is_multiplicative() {
                    let factor = ((direction.support_size() as f64).ln() / pf).exp();
                    result.score = ExtReal::finite(v * factor);
                }
            }
        }
        return Ok(result);
    }
    if spec.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: spec.dim() });
    }
    if !tech.contains(z)? {
        return Ok(EvalResult::infeasible(method));
    }
    let d = tech.dim();
    let g = Direction::unit(d);

    if let Technology::Fdh { .. } = tech {
        let corners = tech.delta_candidates(z, &g)?;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for corner in corners {
            let value = p_mean_utility(spec, &corner)?;
            let better = match &best {
                None => true,
                Some((bv, bx)) => value > bv + 1e-15 || (value >= bv - 1e-15 && corner < *bx),
            };
            if better {
                best = Some((value, corner));
            }
        }
        let (value, corner) = best.ok_or(Error::InfeasiblePoint)?;
        let diagnostics = SolverStats { method: "fdh-scan", lp_calls: 0, candidates: 0 };
        return finish(tech, z, &g, value, &corner, diagnostics);
    }

    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => match p {
            PParameter::NegInfinity => {
                let (value, delta) = maximize_weighted_min(tech, z, coefficients)?;
                let diagnostics = SolverStats { method: "leontief-lp", lp_calls: 1, candidates: 0 };
                finish(tech, z, &g, value, &delta, diagnostics)
            }
            PParameter::PosInfinity => {
                let caps = tech.coordinate_delta_max(z, &g)?;
                let (winner, value) = caps
                    .iter()
                    .zip(coefficients)
                    .map(|(c, a)| a * c)
                    .enumerate()
                    .fold((0usize, f64::NEG_INFINITY), |acc, (k, v)| {
                        if v > acc.1 + 1e-15 {
                            (k, v)
                        } else {
                            acc
                        }
                    });
                let mut delta = vec![0.0; d];
                delta[winner] = caps[winner];
                let diagnostics =
                    SolverStats { method: "coordinate-lps", lp_calls: d, candidates: 0 };
                finish(tech, z, &g, value.max(0.0), &delta, diagnostics)
            }
            PParameter::Finite(pf) if (pf - 1.0).abs() < 1e-12 => {
                let (value, delta) = maximize_weighted_sum(tech, z, coefficients)?;
                let diagnostics = SolverStats { method: "sum-lp", lp_calls: 1, candidates: 0 };
                finish(tech, z, &g, value, &delta, diagnostics)
            }
            PParameter::Finite(pf) => {
                if d > VERTEX_DIM_LIMIT {
                    return Err(Error::UnsupportedRegime(format!(
                        "plain order {p} in dimension {d} exceeds the exact-enumeration limit \
                         {VERTEX_DIM_LIMIT} on convex technologies"
                    )));
                }
                let halfspaces = tech.delta_halfspaces(z, &g)?;
                let sol = if *pf <= 1.0 {
                    let cp = ConcaveProgram { objective: spec.clone(), halfspaces, dim: d };
                    solve_concave(&cp, 1e-10)?
                } else {
                    optimize_polytope(spec, OptSense::Maximize, &halfspaces, d, 1e-10)?
                };
                let diagnostics = SolverStats {
                    method: "candidate-enumeration",
                    lp_calls: d + 1,
                    candidates: sol.candidates,
                };
                finish(tech, z, &g, sol.value, &sol.x, diagnostics)
            }
        },
        UtilitySpec::CobbDouglas { .. } => {
            if d > VERTEX_DIM_LIMIT {
                return Err(Error::UnsupportedRegime(format!(
                    "Cobb-Douglas evaluation in dimension {d} exceeds the exact-enumeration \
                     limit {VERTEX_DIM_LIMIT} on convex technologies"
                )));
            }
            let halfspaces = tech.delta_halfspaces(z, &g)?;
            let cp = ConcaveProgram { objective: spec.clone(), halfspaces, dim: d };
            let sol = solve_concave(&cp, 1e-10)?;
            let diagnostics = SolverStats {
                method: "candidate-enumeration",
                lp_calls: d + 1,
                candidates: sol.candidates,
            };
            finish(tech, z, &g, sol.value, &sol.x, diagnostics)
        }
        UtilitySpec::PMeanDirectional { .. } => unreachable!("handled above"),
    }
}

/// LP: maximize `min_k a_k delta_k` over the expansion set (full support).
fn maximize_weighted_min(
    tech: &Technology,
    z: &NetputVector,
    coeffs: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let d = tech.dim();
    match tech {
        Technology::HRep { .. } => {
            let g = Direction::unit(d);
            let halfspaces = tech.delta_halfspaces(z, &g)?;
            let mut rows: Vec<LpConstraint> = halfspaces
                .iter()
                .map(|h| {
                    let mut c = h.normal.clone();
                    c.push(0.0);
                    LpConstraint::new(c, h.rhs)
                })
                .collect();
            for k in 0..d {
                let mut c = vec![0.0; d + 1];
                c[k] = -coeffs[k];
                c[d] = 1.0;
                rows.push(LpConstraint::new(c, 0.0));
            }
            let mut objective = vec![0.0; d + 1];
            objective[d] = 1.0;
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; d + 1],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value.max(0.0), sol.x[..d].to_vec())),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let zv = z.values();
            let mut rows = Vec::with_capacity(2 * d + 2);
            for k in 0..d {
                let mut c = vec![0.0; n + d + 1];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                c[n + k] = 1.0;
                rows.push(LpConstraint::new(c, -zv[k]));
            }
            for k in 0..d {
                let mut c = vec![0.0; n + d + 1];
                c[n + k] = -coeffs[k];
                c[n + d] = 1.0;
                rows.push(LpConstraint::new(c, 0.0));
            }
            let mut one = vec![1.0; n];
            one.resize(n + d + 1, 0.0);
            rows.push(LpConstraint::new(one.clone(), 1.0));
            rows.push(LpConstraint::new(one.iter().map(|v| -v).collect(), -1.0));
            let mut objective = vec![0.0; n + d + 1];
            objective[n + d] = 1.0;
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; n + d + 1],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value.max(0.0), sol.x[n..n + d].to_vec())),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::Fdh { .. } => unreachable!("free-disposal hulls use the scan route"),
    }
}

/// LP: maximize `sum_k a_k delta_k` over the expansion set (full support).
fn maximize_weighted_sum(
    tech: &Technology,
    z: &NetputVector,
    coeffs: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let d = tech.dim();
    let g = Direction::unit(d);
    match tech {
        Technology::HRep { .. } => {
            let halfspaces = tech.delta_halfspaces(z, &g)?;
            let rows: Vec<LpConstraint> = halfspaces
                .iter()
                .map(|h| LpConstraint::new(h.normal.clone(), h.rhs))
                .collect();
            let lp = LinearProgram {
                objective: coeffs.to_vec(),
                constraints: rows,
                bounds: vec![VarBound::NonNegative; d],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value, sol.x)),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let zv = z.values();
            let mut rows = Vec::with_capacity(d + 2);
            for k in 0..d {
                let mut c = vec![0.0; n + d];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                c[n + k] = 1.0;
                rows.push(LpConstraint::new(c, -zv[k]));
            }
            let mut one = vec![1.0; n];
            one.resize(n + d, 0.0);
            rows.push(LpConstraint::new(one.clone(), 1.0));
            rows.push(LpConstraint::new(one.iter().map(|v| -v).collect(), -1.0));
            let mut objective = vec![0.0; n + d];
            objective[n..].copy_from_slice(coeffs);
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; n + d],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok((sol.objective_value, sol.x[n..].to_vec())),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
        Technology::Fdh { .. } => unreachable!("free-disposal hulls use the scan route"),
    }
}

/// Input support `I_x` of the evaluated netput.
fn input_support(z: &NetputVector) -> Vec<usize> {
    (0..z.num_inputs()).filter(|&i| z.values()[i] != 0.0).collect()
}

/// The mean-contraction input measure: the infimum of the average of the
/// contraction factors `beta` keeping `(beta ⊙ x, y)` feasible.
pub fn fare_lovell_input(tech: &Technology, z: &NetputVector) -> Result<ExtReal> {
    generalized_input_measure(tech, z, PParameter::Finite(1.0))
}

/// The order-`p` input contraction measure (`p = 0` is out of scope).
pub fn generalized_input_measure(
    tech: &Technology,
    z: &NetputVector,
    p: PParameter,
) -> Result<ExtReal> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    if p.is_multiplicative() {
        return Err(Error::InvalidSpec(
            "the input measure requires a nonzero order".into(),
        ));
    }
    if !tech.contains(z)? {
        return Ok(ExtReal::PosInf);
    }
    let support = input_support(z);
    if support.is_empty() {
        return Err(Error::InvalidSpec("input measure needs a nonzero input vector".into()));
    }
    let mx = support.len();

    if let Technology::Fdh { .. } = tech {
        let corners = contraction_corners(tech, z, &support)?;
        let mut best = f64::INFINITY;
        for corner in corners {
            let spec = UtilitySpec::p_mean_directional(p, Direction::unit(mx), true)?;
            best = best.min(p_mean_utility(&spec, &corner)?);
        }
        return Ok(ExtReal::finite(best.clamp(0.0, 1.0)));
    }

    match p {
        PParameter::Finite(pf) if (pf - 1.0).abs() < 1e-12 => {
            let value = contraction_lp(tech, z, &support, ContractionObjective::Mean)?;
            Ok(ExtReal::finite(value.clamp(0.0, 1.0)))
        }
        PParameter::PosInfinity => {
            let value = contraction_lp(tech, z, &support, ContractionObjective::MaxCoordinate)?;
            Ok(ExtReal::finite(value.clamp(0.0, 1.0)))
        }
        PParameter::NegInfinity => {
            let mut best = f64::INFINITY;
            for slot in 0..mx {
                let v = contraction_lp(tech, z, &support, ContractionObjective::Single(slot))?;
                best = best.min(v);
            }
            Ok(ExtReal::finite(best.clamp(0.0, 1.0)))
        }
        PParameter::Finite(_) => {
            if mx > VERTEX_DIM_LIMIT {
                return Err(Error::UnsupportedRegime(format!(
                    "input measure of order {p} with {mx} active inputs exceeds the \
                     exact-enumeration limit {VERTEX_DIM_LIMIT}"
                )));
            }
            let halfspaces = contraction_halfspaces(tech, z, &support)?;
            let spec = UtilitySpec::p_mean_directional(p, Direction::unit(mx), true)?;
            let sol = optimize_polytope(&spec, OptSense::Minimize, &halfspaces, mx, 1e-10)?;
            Ok(ExtReal::finite(sol.value.clamp(0.0, 1.0)))
        }
    }
}

/// The radial input measure: smallest uniform contraction factor.
pub fn debreu_farrell(tech: &Technology, z: &NetputVector) -> Result<ExtReal> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    if !tech.contains(z)? {
        return Ok(ExtReal::PosInf);
    }
    let d = tech.dim();
    let m = z.num_inputs();
    let zv = z.values();
    match tech {
        Technology::Fdh { points } => {
            let mut best = f64::INFINITY;
            for a in points {
                let outputs_ok = (m..d).all(|k| a.values()[k] >= zv[k] - 1e-9);
                let zero_inputs_ok = (0..m)
                    .filter(|&i| zv[i] == 0.0)
                    .all(|i| a.values()[i] >= -1e-9);
                if outputs_ok && zero_inputs_ok {
                    let lambda = (0..m)
                        .filter(|&i| zv[i] != 0.0)
                        .map(|i| a.values()[i] / zv[i])
                        .fold(0.0f64, f64::max);
                    best = best.min(lambda);
                }
            }
            if best == f64::INFINITY {
                return Err(Error::InfeasiblePoint);
            }
            Ok(ExtReal::finite(best.max(0.0)))
        }
        Technology::HRep { constraints, .. } => {
            let mut rows = Vec::with_capacity(constraints.len());
            for h in constraints {
                let coeff: f64 = (0..m).map(|i| h.normal[i] * zv[i]).sum();
                let shift: f64 = (m..d).map(|k| h.normal[k] * zv[k]).sum();
                rows.push(LpConstraint::new(vec![coeff], h.rhs - shift));
            }
            let lp = LinearProgram {
                objective: vec![-1.0],
                constraints: rows,
                bounds: vec![VarBound::NonNegative],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok(ExtReal::finite((-sol.objective_value).max(0.0))),
                _ => Err(Error::SolverFailure("radial program did not solve".into())),
            }
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let mut rows = Vec::with_capacity(d + 2);
            for k in 0..d {
                let mut c = vec![0.0; n + 1];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                if k < m {
                    c[n] = zv[k];
                    rows.push(LpConstraint::new(c, 0.0));
                } else {
                    rows.push(LpConstraint::new(c, -zv[k]));
                }
            }
            rows.push(LpConstraint::new(ones_then_zero(n), 1.0));
            rows.push(LpConstraint::new(neg_ones_then_zero(n), -1.0));
            let mut objective = vec![0.0; n + 1];
            objective[n] = -1.0;
            let lp = LinearProgram {
                objective,
                constraints: rows,
                bounds: vec![VarBound::NonNegative; n + 1],
            };
            let sol = solve_lp(&lp)?;
            match sol.status {
                LpStatus::Optimal => Ok(ExtReal::finite((-sol.objective_value).max(0.0))),
                LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                LpStatus::Infeasible => Err(Error::InfeasiblePoint),
            }
        }
    }
}

enum ContractionObjective {
    Mean,
    MaxCoordinate,
    Single(usize),
}

/// LP over the contraction polytope `{ beta in [0,1]^{I_x} : (beta ⊙ x, y) in T }`.
fn contraction_lp(
    tech: &Technology,
    z: &NetputVector,
    support: &[usize],
    objective: ContractionObjective,
) -> Result<f64> {
    let mx = support.len();
    match tech {
        Technology::HRep { .. } => {
            let mut rows: Vec<LpConstraint> = contraction_halfspaces(tech, z, support)?
                .into_iter()
                .map(|h| {
                    let mut c = h.normal;
                    c.resize(mx + 1, 0.0);
                    LpConstraint::new(c, h.rhs)
                })
                .collect();
            finish_contraction_lp(&mut rows, mx, objective, 0)
        }
        Technology::VrsHull { points } => {
            let n = points.len();
            let d = tech.dim();
            let zv = z.values();
            let m = z.num_inputs();
            let total = n + mx + 1; // t, beta, optional slack for minimax
            let mut rows = Vec::with_capacity(d + 2);
            for k in 0..d {
                let mut c = vec![0.0; total];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                if let Some(slot) = support.iter().position(|&s| s == k) {
                    c[n + slot] = zv[k];
                    rows.push(LpConstraint::new(c, 0.0));
                } else if k < m && zv[k] == 0.0 {
                    rows.push(LpConstraint::new(c, 0.0));
                } else {
                    rows.push(LpConstraint::new(c, -zv[k]));
                }
            }
            let mut one = vec![1.0; n];
            one.resize(total, 0.0);
            rows.push(LpConstraint::new(one.clone(), 1.0));
            rows.push(LpConstraint::new(one.iter().map(|v| -v).collect(), -1.0));
            for slot in 0..mx {
                let mut c = vec![0.0; total];
                c[n + slot] = 1.0;
                rows.push(LpConstraint::new(c, 1.0));
            }
            finish_contraction_lp(&mut rows, mx, objective, n)
        }
        Technology::Fdh { .. } => unreachable!("free-disposal hulls use the scan route"),
    }
}

fn finish_contraction_lp(
    rows: &mut Vec<LpConstraint>,
    mx: usize,
    objective: ContractionObjective,
    beta_offset: usize,
) -> Result<f64> {
    let total = rows[0].coeffs.len();
    let mut cost = vec![0.0; total];
    match objective {
        ContractionObjective::Mean => {
            for slot in 0..mx {
                cost[beta_offset + slot] = -1.0 / mx as f64;
            }
        }
        ContractionObjective::Single(slot) => {
            cost[beta_offset + slot] = -1.0;
        }
        ContractionObjective::MaxCoordinate => {
            // minimize s with beta_i <= s
            for slot in 0..mx {
                let mut c = vec![0.0; total];
                c[beta_offset + slot] = 1.0;
                c[total - 1] = -1.0;
                rows.push(LpConstraint::new(c, 0.0));
            }
            cost[total - 1] = -1.0;
        }
    }
    let lp = LinearProgram {
        objective: cost,
        constraints: rows.clone(),
        bounds: vec![VarBound::NonNegative; total],
    };
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(-sol.objective_value),
        LpStatus::Unbounded => Err(Error::UnboundedTechnology),
        LpStatus::Infeasible => Err(Error::InfeasiblePoint),
    }
}

/// Halfspace description of the contraction polytope in `beta` coordinates
/// (convex technologies; the box `[0,1]` walls are included).
fn contraction_halfspaces(
    tech: &Technology,
    z: &NetputVector,
    support: &[usize],
) -> Result<Vec<Halfspace>> {
    let mx = support.len();
    let zv = z.values();
    match tech {
        Technology::HRep { constraints, .. } => {
            let mut out = Vec::new();
            for h in constraints {
                let coeffs: Vec<f64> = support.iter().map(|&i| h.normal[i] * zv[i]).collect();
                let shift: f64 = (0..tech.dim())
                    .filter(|k| !support.contains(k))
                    .map(|k| h.normal[k] * zv[k])
                    .sum();
                if coeffs.iter().any(|c| c.abs() > 1e-13) {
                    out.push(Halfspace { normal: coeffs, rhs: h.rhs - shift });
                }
            }
            for slot in 0..mx {
                let mut c = vec![0.0; mx];
                c[slot] = 1.0;
                out.push(Halfspace { normal: c, rhs: 1.0 });
            }
            Ok(out)
        }
        Technology::VrsHull { points } => {
            // Reflect to gamma = 1 - beta, whose feasible set is compact,
            // convex and downward closed; reconstruct facets there.
            let n = points.len();
            let d = tech.dim();
            let m = z.num_inputs();
            let dim = n + mx;
            let eqs = vec![(pad_to(vec![1.0; n], dim), 1.0)];
            let mut ineqs: Vec<(Vec<f64>, f64)> = Vec::new();
            for a in 0..n {
                let mut c = vec![0.0; dim];
                c[a] = -1.0;
                ineqs.push((c, 0.0));
            }
            for slot in 0..mx {
                let mut lo = vec![0.0; dim];
                lo[n + slot] = -1.0;
                ineqs.push((lo, 0.0));
                let mut hi = vec![0.0; dim];
                hi[n + slot] = 1.0;
                ineqs.push((hi, 1.0));
            }
            for k in 0..d {
                let mut c = vec![0.0; dim];
                for (a, pt) in points.iter().enumerate() {
                    c[a] = -pt.values()[k];
                }
                if let Some(slot) = support.iter().position(|&s| s == k) {
                    c[n + slot] = zv[k];
                    ineqs.push((c, 0.0));
                } else if k < m && zv[k] == 0.0 {
                    ineqs.push((c, 0.0));
                } else {
                    ineqs.push((c, -zv[k]));
                }
            }
            let lifted = crate::solver::vertex::enumerate_basic_points(&eqs, &ineqs, dim, 500_000)?;
            if lifted.is_empty() {
                return Err(Error::InfeasiblePoint);
            }
            let gammas: Vec<Vec<f64>> = lifted
                .iter()
                .map(|x| (0..mx).map(|s| (1.0 - x[n + s]).clamp(0.0, 1.0)).collect())
                .collect();
            let facets = crate::solver::vertex::comprehensive_facets(&gammas, mx)?;
            let mut out = Vec::new();
            for f in facets {
                let total: f64 = f.normal.iter().sum();
                out.push(Halfspace {
                    normal: f.normal.iter().map(|v| -v).collect(),
                    rhs: f.rhs - total,
                });
            }
            for slot in 0..mx {
                let mut c = vec![0.0; mx];
                c[slot] = 1.0;
                out.push(Halfspace { normal: c, rhs: 1.0 });
            }
            Ok(out)
        }
        Technology::Fdh { .. } => Err(Error::ConvexityRequired(
            "halfspace description needs a convex technology".into(),
        )),
    }
}

/// Bottom corners of the contraction sets of each dominating point.
fn contraction_corners(
    tech: &Technology,
    z: &NetputVector,
    support: &[usize],
) -> Result<Vec<Vec<f64>>> {
    let Technology::Fdh { points } = tech else {
        return Err(Error::InvalidSpec("corner scan requires a free-disposal hull".into()));
    };
    let d = tech.dim();
    let m = z.num_inputs();
    let zv = z.values();
    let mut out = Vec::new();
    for a in points {
        let outputs_ok = (m..d).all(|k| a.values()[k] >= zv[k] - 1e-9);
        let zero_inputs_ok = (0..m)
            .filter(|&i| zv[i] == 0.0)
            .all(|i| a.values()[i] >= -1e-9);
        let reachable = support.iter().all(|&i| a.values()[i] >= zv[i] - 1e-9);
        if outputs_ok && zero_inputs_ok && reachable {
            let corner: Vec<f64> = support
                .iter()
                .map(|&i| (a.values()[i] / zv[i]).clamp(0.0, 1.0))
                .collect();
            out.push(corner);
        }
    }
    if out.is_empty() {
        return Err(Error::InfeasiblePoint);
    }
    Ok(out)
}

fn ones_then_zero(n: usize) -> Vec<f64> {
    let mut c = vec![1.0; n];
    c.push(0.0);
    c
}

fn neg_ones_then_zero(n: usize) -> Vec<f64> {
    let mut c = vec![-1.0; n];
    c.push(0.0);
    c
}

fn pad_to(mut v: Vec<f64>, dim: usize) -> Vec<f64> {
    v.resize(dim, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_hrep() -> Technology {
        Technology::h_rep(
            vec![
                Halfspace { normal: vec![1.0, 0.0], rhs: 0.0 },
                Halfspace { normal: vec![1.0, 1.0], rhs: 0.0 },
                Halfspace { normal: vec![0.0, 1.0], rhs: 2.0 },
            ],
            2,
        )
        .unwrap()
    }

    fn nv(values: Vec<f64>) -> NetputVector {
        NetputVector::new(values, 1).unwrap()
    }

    fn unit2() -> Direction {
        Direction::unit(2)
    }

    fn fin(p: f64) -> PParameter {
        PParameter::finite(p).unwrap()
    }

    fn score(r: &EvalResult) -> f64 {
        r.score.as_finite().expect("finite score")
    }

    #[test]
    fn directional_examples() {
        let tech = example_hrep();
        let r = directional_distance(&tech, &nv(vec![-3.0, 2.0]), &unit2()).unwrap();
        assert!(score(&r).abs() < 1e-9);

        // Constraints delta <= 3, 2 delta <= 2, delta <= 1 bind at 1.
        let r = directional_distance(&tech, &nv(vec![-3.0, 1.0]), &unit2()).unwrap();
        assert!((score(&r) - 1.0).abs() < 1e-9);

        let r = directional_distance(&tech, &nv(vec![1.0, 1.0]), &unit2()).unwrap();
        assert!(r.score.is_neg_inf());
        assert_eq!(r.status, EfficiencyStatus::Infeasible);
    }

    #[test]
    fn directional_zero_direction_convention() {
        let tech = example_hrep();
        let r =
            directional_distance(&tech, &nv(vec![-3.0, 2.0]), &Direction::new(vec![0.0, 0.0]).unwrap())
                .unwrap();
        assert!(r.score.is_pos_inf());
    }

    #[test]
    fn directional_translation_invariance() {
        let tech = example_hrep();
        let g = unit2();
        let base = score(&directional_distance(&tech, &nv(vec![-3.0, 1.0]), &g).unwrap());
        for alpha in [0.1, 0.25, 0.4] {
            let shifted = nv(vec![-3.0 + alpha, 1.0 + alpha]);
            let v = score(&directional_distance(&tech, &shifted, &g).unwrap());
            assert!((v - (base - alpha)).abs() < 1e-9);
        }
    }

    #[test]
    fn asymmetric_examples() {
        let tech = example_hrep();
        let r = asymmetric_distance(&tech, &nv(vec![-3.0, 2.0]), &unit2()).unwrap();
        assert!((score(&r) - 1.0).abs() < 1e-9);
        let d = r.delta_star.unwrap();
        assert!((d[0] - 1.0).abs() < 1e-9 && d[1].abs() < 1e-12);

        // Single-coordinate direction reduces to the joint expansion.
        let g = Direction::new(vec![1.0, 0.0]).unwrap();
        let a = asymmetric_distance(&tech, &nv(vec![-3.0, 2.0]), &g).unwrap();
        let dd = directional_distance(&tech, &nv(vec![-3.0, 2.0]), &g).unwrap();
        assert!((score(&a) - score(&dd)).abs() < 1e-9);

        // An efficient point cannot expand any coordinate.
        let r = asymmetric_distance(&tech, &nv(vec![-2.0, 2.0]), &unit2()).unwrap();
        assert!(score(&r).abs() < 1e-9);
    }

    #[test]
    fn order_dispatch_examples() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);

        let r = evaluate_p(&tech, &z, &unit2(), fin(1.0)).unwrap();
        assert!((score(&r) - 0.5).abs() < 1e-9);
        let d = r.delta_star.clone().unwrap();
        assert!((d[0] - 1.0).abs() < 1e-7 && d[1].abs() < 1e-9);
        assert_eq!(r.status, EfficiencyStatus::WeaklyEfficient { improvable: vec![0] });

        let r = evaluate_p(&tech, &z, &unit2(), PParameter::NegInfinity).unwrap();
        assert!(score(&r).abs() < 1e-9);
        assert!(r.status.is_at_least_weakly_efficient());
    }

    #[test]
    fn order_dispatch_fdh_closed_form() {
        let pts = vec![nv(vec![-2.0, 2.0]), nv(vec![-4.0, 5.0])];
        let tech = Technology::fdh(pts).unwrap();
        let z = nv(vec![-4.0, 2.0]);
        let r = evaluate_p(&tech, &z, &unit2(), fin(1.0)).unwrap();
        assert!((score(&r) - 1.5).abs() < 1e-12);
        let d = r.delta_star.unwrap();
        assert!(d[0].abs() < 1e-12 && (d[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn utility_examples_on_halfspace_set() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);

        let spec = UtilitySpec::p_mean_plain(fin(0.5), vec![1.0, 1.0]).unwrap();
        let r = evaluate_utility(&tech, &z, &spec).unwrap();
        assert!((score(&r) - 1.0).abs() < 1e-9);

        let spec = UtilitySpec::p_mean_plain(fin(-0.5), vec![1.0, 1.0]).unwrap();
        let r = evaluate_utility(&tech, &z, &spec).unwrap();
        assert!(score(&r).abs() < 1e-12);

        // An efficient point scores zero under any monotone spec.
        let spec = UtilitySpec::p_mean_plain(fin(1.0), vec![1.0, 1.0]).unwrap();
        let r = evaluate_utility(&tech, &nv(vec![-2.0, 2.0]), &spec).unwrap();
        assert!(score(&r).abs() < 1e-9);
        assert_eq!(r.status, EfficiencyStatus::Efficient);
    }

    #[test]
    fn input_measure_examples() {
        // Single observation (-1, 1): halving the doubled input is optimal.
        let tech = Technology::vrs_hull(vec![nv(vec![-1.0, 1.0])]).unwrap();
        let z = nv(vec![-2.0, 1.0]);
        let v = fare_lovell_input(&tech, &z).unwrap();
        assert!((v.as_finite().unwrap() - 0.5).abs() < 1e-9);
        let v = debreu_farrell(&tech, &z).unwrap();
        assert!((v.as_finite().unwrap() - 0.5).abs() < 1e-9);

        // Efficient input bundles score one.
        let v = fare_lovell_input(&tech, &nv(vec![-1.0, 1.0])).unwrap();
        assert!((v.as_finite().unwrap() - 1.0).abs() < 1e-9);

        let outside = fare_lovell_input(&tech, &nv(vec![-0.5, 1.0])).unwrap();
        assert!(outside.is_pos_inf());
    }

    #[test]
    fn input_measure_two_inputs() {
        let tech =
            Technology::vrs_hull(vec![NetputVector::new(vec![-1.0, -1.0, 1.0], 2).unwrap()])
                .unwrap();
        let z = NetputVector::new(vec![-2.0, -1.0, 1.0], 2).unwrap();
        let v = generalized_input_measure(&tech, &z, fin(1.0)).unwrap();
        assert!((v.as_finite().unwrap() - 0.75).abs() < 1e-9);
        let fl = fare_lovell_input(&tech, &z).unwrap();
        assert_eq!(v, fl);
    }

    #[test]
    fn input_measures_on_a_free_disposal_hull() {
        let tech =
            Technology::fdh(vec![NetputVector::new(vec![-1.0, -2.0, 1.0], 2).unwrap()]).unwrap();
        let z = NetputVector::new(vec![-2.0, -2.0, 1.0], 2).unwrap();
        // The only dominating corner contracts the first input to 1/2.
        let mean = generalized_input_measure(&tech, &z, fin(1.0)).unwrap();
        assert!((mean.as_finite().unwrap() - 0.75).abs() < 1e-12);
        let worst = generalized_input_measure(&tech, &z, PParameter::PosInfinity).unwrap();
        assert!((worst.as_finite().unwrap() - 1.0).abs() < 1e-12);
        let best = generalized_input_measure(&tech, &z, PParameter::NegInfinity).unwrap();
        assert!((best.as_finite().unwrap() - 0.5).abs() < 1e-12);
        let df = debreu_farrell(&tech, &z).unwrap();
        assert!((df.as_finite().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cobb_douglas_utility_absorbs_the_pinned_coordinate() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let spec = UtilitySpec::cobb_douglas(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let r = evaluate_utility(&tech, &z, &spec).unwrap();
        assert_eq!(score(&r), 0.0);
        // At an interior point both coordinates expand and the value is
        // the geometric mean of the optimal expansions.
        let z = nv(vec![-3.0, 1.0]);
        let r = evaluate_utility(&tech, &z, &spec).unwrap();
        assert!(score(&r) > 0.5);
    }

    #[test]
    fn mean_contraction_identity_on_radial_direction() {
        // Expansion along |x| on the inputs matches one minus the mean
        // contraction measure.
        let tech = Technology::vrs_hull(vec![
            NetputVector::new(vec![-1.0, -2.0, 2.0], 2).unwrap(),
            NetputVector::new(vec![-2.0, -1.0, 3.0], 2).unwrap(),
        ])
        .unwrap();
        let z = NetputVector::new(vec![-2.0, -2.0, 2.0], 2).unwrap();
        let g = Direction::new(vec![2.0, 2.0, 0.0]).unwrap();
        let d1 = evaluate_p(&tech, &z, &g, fin(1.0)).unwrap();
        let fl = fare_lovell_input(&tech, &z).unwrap().as_finite().unwrap();
        assert!((score(&d1) - (1.0 - fl)).abs() < 1e-8);

        let ddir = directional_distance(&tech, &z, &g).unwrap();
        let df = debreu_farrell(&tech, &z).unwrap().as_finite().unwrap();
        assert!((score(&ddir) - (1.0 - df)).abs() < 1e-8);
    }

    #[test]
    fn debreu_farrell_isoquant_scores_one() {
        let tech = Technology::vrs_hull(vec![nv(vec![-1.0, 1.0])]).unwrap();
        let v = debreu_farrell(&tech, &nv(vec![-1.0, 1.0])).unwrap();
        assert!((v.as_finite().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scores_decrease_when_the_point_improves() {
        // Worsening the evaluated point can only raise the score, strictly
        // so for positive orders when a supported coordinate moves.
        let tech = Technology::vrs_hull(vec![
            nv(vec![-1.0, 2.0]),
            nv(vec![-2.5, 3.5]),
            nv(vec![-1.8, 2.9]),
        ])
        .unwrap();
        let z = nv(vec![-2.0, 1.5]);
        let worse = nv(vec![-2.4, 1.1]);
        for p in [PParameter::NegInfinity, fin(-1.0), fin(0.5), fin(1.0), PParameter::PosInfinity] {
            let base = score(&evaluate_p(&tech, &z, &unit2(), p).unwrap());
            let w = score(&evaluate_p(&tech, &worse, &unit2(), p).unwrap());
            assert!(w >= base - 1e-9, "order {p}: {w} < {base}");
            assert!(w > base + 1e-6, "strict increase expected at order {p}");
        }
    }

    #[test]
    fn evaluation_is_bitwise_deterministic() {
        let tech = Technology::vrs_hull(vec![
            nv(vec![-1.0, 2.0]),
            nv(vec![-2.5, 3.5]),
            nv(vec![-1.8, 2.9]),
        ])
        .unwrap();
        let z = nv(vec![-2.0, 1.5]);
        for p in [fin(0.5), fin(2.0), PParameter::NegInfinity] {
            let a = evaluate_p(&tech, &z, &unit2(), p).unwrap();
            let b = evaluate_p(&tech, &z, &unit2(), p).unwrap();
            assert_eq!(
                a.score.as_finite().unwrap().to_bits(),
                b.score.as_finite().unwrap().to_bits()
            );
            assert_eq!(a.delta_star, b.delta_star);
        }
    }

    #[test]
    fn unsupported_regime_is_explicit() {
        let pts: Vec<NetputVector> = vec![
            NetputVector::new(vec![-1.0, -1.0, 1.0, 1.0], 2).unwrap(),
            NetputVector::new(vec![-2.0, -1.5, 2.0, 1.5], 2).unwrap(),
        ];
        let tech = Technology::vrs_hull(pts).unwrap();
        let z = NetputVector::new(vec![-2.0, -2.0, 1.0, 1.0], 2).unwrap();
        let g = Direction::unit(4);
        let out = evaluate_p(&tech, &z, &g, fin(2.0));
        assert!(matches!(out, Err(Error::UnsupportedRegime(_))));
    }
}
