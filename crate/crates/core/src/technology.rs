//! Production-set representations and their queries.
//!
//! A technology is a set of feasible netput vectors (inputs negative,
//! outputs positive). Three representations are supported: the variable
//! returns-to-scale hull of observed points, the free-disposal hull of
//! observed points (non-convex), and an explicit halfspace intersection.
//! All of them satisfy free disposal; the halfspace form is trusted for the
//! remaining axioms except boundedness, which is verified per query.

use crate::error::{Error, Result};
use crate::solver::lp::{solve_lp, LinearProgram, LpConstraint, LpStatus, VarBound};
use crate::solver::vertex::{self, BoundingBox};

/// Absolute tolerance for membership and dominance tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Threshold separating genuine improvement from solver noise in
/// classification programs.
pub const IMPROVEMENT_TOL: f64 = 1e-7;

/// A signed commodity vector: the first `num_inputs` slots hold inputs
/// (nonpositive by convention), the rest outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct NetputVector {
    values: Vec<f64>,
    num_inputs: usize,
}

impl NetputVector {
    pub fn new(values: Vec<f64>, num_inputs: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpec("netput vector must have dimension >= 1".into()));
        }
        if num_inputs > values.len() {
            return Err(Error::InvalidSpec(format!(
                "{num_inputs} input slots exceed dimension {}",
                values.len()
            )));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NegativeComponent { index, value });
            }
        }
        Ok(NetputVector { values, num_inputs })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.values.len() - self.num_inputs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn inputs(&self) -> &[f64] {
        &self.values[..self.num_inputs]
    }

    pub fn outputs(&self) -> &[f64] {
        &self.values[self.num_inputs..]
    }
}

/// A nonnegative direction of expansion; its support `K_g` collects the
/// coordinates that actually move.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    g: Vec<f64>,
}

impl Direction {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        for (index, &value) in g.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeComponent { index, value });
            }
        }
        Ok(Direction { g })
    }

    /// The all-ones direction.
    pub fn unit(dim: usize) -> Self {
        Direction { g: vec![1.0; dim] }
    }

    /// `g = |z|`; zero components of `z` stay outside the support.
    pub fn observed(z: &NetputVector) -> Self {
        Direction { g: z.values().iter().map(|v| v.abs()).collect() }
    }

    /// The direction `g_k e_k`.
    pub fn coordinate(dim: usize, k: usize, scale: f64) -> Result<Self> {
        let mut g = vec![0.0; dim];
        g[k] = scale;
        Direction::new(g)
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn support(&self) -> Vec<usize> {
        self.g.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(k, _)| k).collect()
    }

    pub fn support_size(&self) -> usize {
        self.g.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.support_size() == 0
    }
}

/// One `normal . u <= rhs` constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub rhs: f64,
}

/// Classification of a netput relative to an index set `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfficiencyStatus {
    /// Not a member of the technology.
    Infeasible,
    /// No coordinate of `K` can improve while staying dominated-feasible.
    Efficient,
    /// Some coordinates improve individually, but not all of `K` jointly;
    /// the payload lists the individually improvable coordinates.
    WeaklyEfficient { improvable: Vec<usize> },
    /// Every coordinate of `K` can improve jointly.
    Inefficient,
}

impl EfficiencyStatus {
    pub fn is_at_least_weakly_efficient(&self) -> bool {
        matches!(self, EfficiencyStatus::Efficient | EfficiencyStatus::WeaklyEfficient { .. })
    }
}

/// A production set.
#[derive(Debug, Clone)]
pub enum Technology {
    /// Convex hull of observations with free disposal (variable returns).
    VrsHull { points: Vec<NetputVector> },
    /// Union of lower sets of observations (no convexity).
    Fdh { points: Vec<NetputVector> },
    /// Explicit halfspace intersection.
    HRep { constraints: Vec<Halfspace>, dim: usize },
}

fn check_points(points: &[NetputVector]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidSpec("technology needs at least one observation".into()));
    };
    for p in points {
        if p.dim() != first.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), got: p.dim() });
        }
        if p.num_inputs() != first.num_inputs() {
            return Err(Error::InvalidSpec("observations disagree on the input split".into()));
        }
    }
    Ok(())
}

impl Technology {
    pub fn vrs_hull(points: Vec<NetputVector>) -> Result<Self> {
        check_points(&points)?;
        Ok(Technology::VrsHull { points })
    }

    pub fn fdh(points: Vec<NetputVector>) -> Result<Self> {
        check_points(&points)?;
        Ok(Technology::Fdh { points })
    }

    pub fn h_rep(constraints: Vec<Halfspace>, dim: usize) -> Result<Self> {
        if constraints.is_empty() || dim == 0 {
            return Err(Error::InvalidSpec("halfspace technology needs constraints and dim >= 1".into()));
        }
        for h in &constraints {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: h.normal.len() });
            }
            if h.normal.iter().any(|v| !v.is_finite()) || !h.rhs.is_finite() {
                return Err(Error::InvalidSpec("non-finite halfspace data".into()));
            }
        }
        Ok(Technology::HRep { constraints, dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Technology::VrsHull { points } | Technology::Fdh { points } => points[0].dim(),
            Technology::HRep { dim, .. } => *dim,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Technology::Fdh { .. })
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), got })
        } else {
            Ok(())
        }
    }

    /// Membership test at the standard tolerance.
    pub fn contains(&self, z: &NetputVector) -> Result<bool> {
        self.contains_with_tol(z.values(), MEMBERSHIP_TOL)
    }

    pub(crate) fn contains_with_tol(&self, z: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(z.len())?;
        match self {
            Technology::Fdh { points } => Ok(points
                .iter()
                .any(|a| a.values().iter().zip(z).all(|(av, zv)| *av >= zv - tol))),
            Technology::HRep { constraints, .. } => Ok(constraints.iter().all(|h| {
                let lhs: f64 = h.normal.iter().zip(z).map(|(a, v)| a * v).sum();
                lhs <= h.rhs + tol * (1.0 + h.rhs.abs())
            })),
            Technology::VrsHull { points } => {
                // Maximize the worst slack of "hull combination dominates z".
                let n = points.len();
                let d = self.dim();
                let mut rows = Vec::with_capacity(d + 2);
                for k in 0..d {
                    let mut c = vec![0.0; n + 1];
                    for (a, p) in points.iter().enumerate() {
                        c[a] = -p.values()[k];
                    }
                    c[n] = 1.0;
                    rows.push(LpConstraint::new(c, -z[k]));
                }
                rows.push(LpConstraint::new(simplex_row(n, 1.0), 1.0));
                rows.push(LpConstraint::new(simplex_row(n, -1.0), -1.0));
                let mut objective = vec![0.0; n + 1];
                objective[n] = 1.0;
                let mut bounds = vec![VarBound::NonNegative; n + 1];
                bounds[n] = VarBound::Free;
                let lp = LinearProgram { objective, constraints: rows, bounds };
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.objective_value >= -tol),
                    _ => Err(Error::SolverFailure("membership program did not solve".into())),
                }
            }
        }
    }

    /// Maximum profit over the dominating set: `sup { w . u : u in T, u >= z }`.
    pub fn dominating_profit(&self, z: &NetputVector, w: &[f64]) -> Result<f64> {
        self.profit_over_dominating(z, w, None)
    }

    /// Profit over the dominating set with every coordinate outside the
    /// support of `g` pinned at its level in `z`.
    pub fn restricted_profit(&self, z: &NetputVector, g: &Direction, w: &[f64]) -> Result<f64> {
        self.check_dim(g.dim())?;
        if g.support_size() == 0 {
            return Err(Error::InvalidSpec("restricted profit needs a nonzero direction".into()));
        }
        self.profit_over_dominating(z, w, Some(g))
    }

    fn profit_over_dominating(
        &self,
        z: &NetputVector,
        w: &[f64],
        pin: Option<&Direction>,
    ) -> Result<f64> {
        self.check_dim(z.dim())?;
        self.check_dim(w.len())?;
        for (index, &value) in w.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeComponent { index, value });
            }
        }
        if !self.contains(z)? {
            return Err(Error::InfeasiblePoint);
        }
        let d = self.dim();
        let zv = z.values();
        let free: Vec<usize> = match pin {
            Some(g) => g.support(),
            None => (0..d).collect(),
        };
        let pinned_part: f64 = (0..d)
            .filter(|k| !free.contains(k))
            .map(|k| w[k] * zv[k])
            .sum();

        match self {
            Technology::Fdh { points } => {
                let mut best = f64::NEG_INFINITY;
                for a in points {
                    if a.values().iter().zip(zv).all(|(av, zk)| *av >= zk - MEMBERSHIP_TOL) {
                        let v: f64 = free.iter().map(|&k| w[k] * a.values()[k].max(zv[k])).sum();
                        best = best.max(v + pinned_part);
                    }
                }
                if best == f64::NEG_INFINITY {
                    return Err(Error::InfeasiblePoint);
                }
                Ok(best)
            }
            Technology::VrsHull { points } => {
                // Variables t on the simplex; the dominated point rides on At.
                let n = points.len();
                let mut rows = Vec::with_capacity(d + 2);
                for k in 0..d {
                    let mut c = vec![0.0; n];
                    for (a, p) in points.iter().enumerate() {
                        c[a] = -p.values()[k];
                    }
                    rows.push(LpConstraint::new(c, -zv[k]));
                }
                rows.push(LpConstraint::new(vec![1.0; n], 1.0));
                rows.push(LpConstraint::new(vec![-1.0; n], -1.0));
                let objective: Vec<f64> = points
                    .iter()
                    .map(|p| free.iter().map(|&k| w[k] * p.values()[k]).sum())
                    .collect();
                let lp = LinearProgram {
                    objective,
                    constraints: rows,
                    bounds: vec![VarBound::NonNegative; n],
                };
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.objective_value + pinned_part),
                    LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                    LpStatus::Infeasible => Err(Error::InfeasiblePoint),
                }
            }
            Technology::HRep { constraints, .. } => {
                // Variables v_k = u_k - z_k >= 0 on the free coordinates.
                let nf = free.len();
                let mut rows = Vec::with_capacity(constraints.len());
                for h in constraints {
                    let c: Vec<f64> = free.iter().map(|&k| h.normal[k]).collect();
                    let shift: f64 = h.normal.iter().zip(zv).map(|(a, v)| a * v).sum();
                    rows.push(LpConstraint::new(c, h.rhs - shift));
                }
                let objective: Vec<f64> = free.iter().map(|&k| w[k]).collect();
                let lp = LinearProgram {
                    objective,
                    constraints: rows,
                    bounds: vec![VarBound::NonNegative; nf],
                };
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => {
                        let base: f64 = free.iter().map(|&k| w[k] * zv[k]).sum();
                        Ok(sol.objective_value + base + pinned_part)
                    }
                    LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                    LpStatus::Infeasible => Err(Error::InfeasiblePoint),
                }
            }
        }
    }

    /// Largest feasible improvement of the coordinates in `subset`,
    /// simultaneously, while dominating `z`. Zero means no joint slack.
    fn joint_improvement(&self, z: &NetputVector, subset: &[usize]) -> Result<f64> {
        let d = self.dim();
        let zv = z.values();
        match self {
            Technology::Fdh { points } => {
                let mut best: f64 = 0.0;
                for a in points {
                    if a.values().iter().zip(zv).all(|(av, zk)| *av >= zk - MEMBERSHIP_TOL) {
                        let gain = subset
                            .iter()
                            .map(|&k| a.values()[k] - zv[k])
                            .fold(f64::INFINITY, f64::min);
                        best = best.max(gain);
                    }
                }
                Ok(best.max(0.0))
            }
            Technology::VrsHull { points } => {
                let n = points.len();
                let mut rows = Vec::with_capacity(d + 2);
                for k in 0..d {
                    let mut c = vec![0.0; n + 1];
                    for (a, p) in points.iter().enumerate() {
                        c[a] = -p.values()[k];
                    }
                    if subset.contains(&k) {
                        c[n] = 1.0;
                    }
                    rows.push(LpConstraint::new(c, -zv[k]));
                }
                rows.push(LpConstraint::new(simplex_row(n, 1.0), 1.0));
                rows.push(LpConstraint::new(simplex_row(n, -1.0), -1.0));
                let mut objective = vec![0.0; n + 1];
                objective[n] = 1.0;
                let lp = LinearProgram {
                    objective,
                    constraints: rows,
                    bounds: vec![VarBound::NonNegative; n + 1],
                };
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.objective_value.max(0.0)),
                    LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                    LpStatus::Infeasible => Err(Error::InfeasiblePoint),
                }
            }
            Technology::HRep { constraints, .. } => {
                // Variables v = u - z >= 0 plus the joint slack s.
                let mut rows = Vec::with_capacity(constraints.len() + subset.len());
                for h in constraints {
                    let mut c: Vec<f64> = h.normal.clone();
                    c.push(0.0);
                    let shift: f64 = h.normal.iter().zip(zv).map(|(a, v)| a * v).sum();
                    rows.push(LpConstraint::new(c, h.rhs - shift));
                }
                for &k in subset {
                    let mut c = vec![0.0; d + 1];
                    c[k] = -1.0;
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
                    LpStatus::Optimal => Ok(sol.objective_value.max(0.0)),
                    LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                    LpStatus::Infeasible => Err(Error::InfeasiblePoint),
                }
            }
        }
    }

    /// Efficiency classification of `z` relative to the index set `k_set`.
    pub fn classify(&self, z: &NetputVector, k_set: &[usize]) -> Result<EfficiencyStatus> {
        self.check_dim(z.dim())?;
        if k_set.is_empty() || k_set.iter().any(|&k| k >= self.dim()) {
            return Err(Error::InvalidSpec("classification needs a nonempty index set within range".into()));
        }
        if !self.contains(z)? {
            return Ok(EfficiencyStatus::Infeasible);
        }
        let mut improvable = Vec::new();
        for &k in k_set {
            if self.joint_improvement(z, &[k])? > IMPROVEMENT_TOL {
                improvable.push(k);
            }
        }
        if improvable.is_empty() {
            return Ok(EfficiencyStatus::Efficient);
        }
        if improvable.len() == k_set.len() && self.joint_improvement(z, k_set)? > IMPROVEMENT_TOL {
            return Ok(EfficiencyStatus::Inefficient);
        }
        Ok(EfficiencyStatus::WeaklyEfficient { improvable })
    }

    /// Per-coordinate maxima of the feasible expansion over the support
    /// of `g` (the box that contains every feasible expansion vector).
    pub fn coordinate_delta_max(&self, z: &NetputVector, g: &Direction) -> Result<Vec<f64>> {
        let support = g.support();
        let mut out = Vec::with_capacity(support.len());
        for &k in &support {
            let dir = Direction::coordinate(self.dim(), k, g.values()[k])?;
            out.push(self.single_direction_max(z, &dir, k)?);
        }
        Ok(out)
    }

    /// `sup { d : z + d * g_k e_k in T }` for a single-coordinate direction.
    pub(crate) fn single_direction_max(
        &self,
        z: &NetputVector,
        dir: &Direction,
        k: usize,
    ) -> Result<f64> {
        let gk = dir.values()[k];
        let zv = z.values();
        match self {
            Technology::HRep { constraints, .. } => {
                let mut best = f64::INFINITY;
                for h in constraints {
                    let coeff = h.normal[k] * gk;
                    if coeff > 1e-12 {
                        let shift: f64 = h.normal.iter().zip(zv).map(|(a, v)| a * v).sum();
                        best = best.min((h.rhs - shift) / coeff);
                    }
                }
                if best == f64::INFINITY {
                    return Err(Error::UnboundedTechnology);
                }
                Ok(best.max(0.0))
            }
            Technology::Fdh { points } => {
                let mut best = f64::NEG_INFINITY;
                for a in points {
                    let others_ok = a
                        .values()
                        .iter()
                        .zip(zv)
                        .enumerate()
                        .all(|(j, (av, zj))| j == k || *av >= zj - MEMBERSHIP_TOL);
                    if others_ok {
                        best = best.max((a.values()[k] - zv[k]) / gk);
                    }
                }
                if best == f64::NEG_INFINITY {
                    return Err(Error::InfeasiblePoint);
                }
                Ok(best.max(0.0))
            }
            Technology::VrsHull { points } => {
                let n = points.len();
                let d = self.dim();
                let mut rows = Vec::with_capacity(d + 2);
                for j in 0..d {
                    let mut c = vec![0.0; n + 1];
                    for (a, p) in points.iter().enumerate() {
                        c[a] = -p.values()[j];
                    }
                    if j == k {
                        c[n] = gk;
                    }
                    rows.push(LpConstraint::new(c, -zv[j]));
                }
                rows.push(LpConstraint::new(simplex_row(n, 1.0), 1.0));
                rows.push(LpConstraint::new(simplex_row(n, -1.0), -1.0));
                let mut objective = vec![0.0; n + 1];
                objective[n] = 1.0;
                let lp = LinearProgram {
                    objective,
                    constraints: rows,
                    bounds: vec![VarBound::NonNegative; n + 1],
                };
                let sol = solve_lp(&lp)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.objective_value.max(0.0)),
                    LpStatus::Unbounded => Err(Error::UnboundedTechnology),
                    LpStatus::Infeasible => Err(Error::InfeasiblePoint),
                }
            }
        }
    }

    /// Candidate extreme points of the feasible expansion set
    /// `{ delta >= 0 : z + delta ⊙ g in T }` in support coordinates.
    ///
    /// Every true extreme point is included and every returned point is
    /// feasible; spurious non-extreme boundary points may appear.
    pub(crate) fn delta_candidates(&self, z: &NetputVector, g: &Direction) -> Result<Vec<Vec<f64>>> {
        self.check_dim(z.dim())?;
        self.check_dim(g.dim())?;
        let support = g.support();
        let dg = support.len();
        if dg == 0 {
            return Err(Error::InvalidSpec("expansion set needs a nonzero direction".into()));
        }
        let zv = z.values();
        match self {
            Technology::Fdh { points } => {
                let mut out = Vec::new();
                for a in points {
                    if a.values().iter().zip(zv).all(|(av, zk)| *av >= zk - MEMBERSHIP_TOL) {
                        let corner: Vec<f64> = support
                            .iter()
                            .map(|&k| ((a.values()[k] - zv[k]) / g.values()[k]).max(0.0))
                            .collect();
                        out.push(corner);
                    }
                }
                Ok(out)
            }
            Technology::HRep { .. } => {
                let hs = self.delta_halfspaces(z, g)?;
                let caps = self.coordinate_delta_max(z, g)?;
                let bb = BoundingBox::new(vec![0.0; dg], caps.iter().map(|c| c + 1.0).collect());
                vertex::enumerate_vertices(&hs, &bb)
            }
            Technology::VrsHull { points } => {
                // Lifted polytope over (t, delta); vertices project onto the
                // expansion set's extreme points.
                let n = points.len();
                let dim = n + dg;
                let eqs = vec![(pad(simplex_row(n, 1.0), dim), 1.0)];
                let mut ineqs: Vec<(Vec<f64>, f64)> = Vec::new();
                for a in 0..n {
                    let mut c = vec![0.0; dim];
                    c[a] = -1.0;
                    ineqs.push((c, 0.0));
                }
                for j in 0..dg {
                    let mut c = vec![0.0; dim];
                    c[n + j] = -1.0;
                    ineqs.push((c, 0.0));
                }
                for k in 0..self.dim() {
                    let mut c = vec![0.0; dim];
                    for (a, p) in points.iter().enumerate() {
                        c[a] = -p.values()[k];
                    }
                    if let Some(j) = support.iter().position(|&s| s == k) {
                        c[n + j] = g.values()[k];
                    }
                    ineqs.push((c, -zv[k]));
                }
                let lifted = vertex::enumerate_basic_points(&eqs, &ineqs, dim, 500_000)?;
                let mut projected: Vec<Vec<f64>> =
                    lifted.into_iter().map(|x| x[n..].to_vec()).collect();
                for p in projected.iter_mut() {
                    for v in p.iter_mut() {
                        if *v < 0.0 {
                            *v = 0.0;
                        }
                    }
                }
                Ok(dedup(projected))
            }
        }
    }

    /// Halfspace description of the feasible expansion set in support
    /// coordinates (convex technologies only).
    pub(crate) fn delta_halfspaces(&self, z: &NetputVector, g: &Direction) -> Result<Vec<Halfspace>> {
        let support = g.support();
        let dg = support.len();
        let zv = z.values();
        match self {
            Technology::Fdh { .. } => Err(Error::ConvexityRequired(
                "halfspace description of the expansion set needs a convex technology".into(),
            )),
            Technology::HRep { constraints, .. } => {
                let mut out = Vec::new();
                for h in constraints {
                    let coeffs: Vec<f64> =
                        support.iter().map(|&k| h.normal[k] * g.values()[k]).collect();
                    if coeffs.iter().any(|c| c.abs() > 1e-13) {
                        let shift: f64 = h.normal.iter().zip(zv).map(|(a, v)| a * v).sum();
                        out.push(Halfspace { normal: coeffs, rhs: h.rhs - shift });
                    }
                }
                Ok(out)
            }
            Technology::VrsHull { .. } => {
                if dg > vertex::VERTEX_DIM_LIMIT {
                    return Err(Error::DimensionLimit { limit: vertex::VERTEX_DIM_LIMIT, got: dg });
                }
                let candidates = self.delta_candidates(z, g)?;
                if candidates.is_empty() {
                    return Err(Error::InfeasiblePoint);
                }
                vertex::comprehensive_facets(&candidates, dg)
            }
        }
    }

    /// Vertices of the dominating set `T_z = { u in T : u >= z }`.
    pub fn dominating_vertices(&self, z: &NetputVector) -> Result<Vec<NetputVector>> {
        self.check_dim(z.dim())?;
        if !self.contains(z)? {
            return Err(Error::InfeasiblePoint);
        }
        match self {
            Technology::Fdh { points } => Ok(points
                .iter()
                .filter(|a| a.values().iter().zip(z.values()).all(|(av, zk)| *av >= zk - MEMBERSHIP_TOL))
                .cloned()
                .collect()),
            _ => {
                if matches!(self, Technology::HRep { .. }) && self.dim() > vertex::VERTEX_DIM_LIMIT {
                    return Err(Error::DimensionLimit {
                        limit: vertex::VERTEX_DIM_LIMIT,
                        got: self.dim(),
                    });
                }
                let candidates = self.dominating_candidates(z)?;
                let extreme = filter_extreme_points(&candidates)?;
                extreme
                    .into_iter()
                    .map(|u| NetputVector::new(u, z.num_inputs()))
                    .collect()
            }
        }
    }

    /// Candidate vertices of `T_z` (superset of the true vertex set, all
    /// inside `T_z`), in full netput coordinates.
    pub(crate) fn dominating_candidates(&self, z: &NetputVector) -> Result<Vec<Vec<f64>>> {
        let g = Direction::unit(self.dim());
        let deltas = self.delta_candidates(z, &g)?;
        Ok(deltas
            .into_iter()
            .map(|d| d.iter().zip(z.values()).map(|(dv, zv)| zv + dv).collect())
            .collect())
    }
}

fn simplex_row(n: usize, sign: f64) -> Vec<f64> {
    let mut c = vec![sign; n];
    c.push(0.0);
    c
}

fn pad(mut v: Vec<f64>, dim: usize) -> Vec<f64> {
    v.pop(); // drop the slack slot added by simplex_row
    v.resize(dim, 0.0);
    v
}

fn dedup(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    'next: for p in points {
        for q in &out {
            if p.iter().zip(q).all(|(a, b)| (a - b).abs() <= 1e-9) {
                continue 'next;
            }
        }
        out.push(p);
    }
    out
}

/// Keeps only the points that are extreme in the convex hull of the set.
fn filter_extreme_points(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if points.len() <= 1 {
        return Ok(points.to_vec());
    }
    let d = points[0].len();
    let mut keep = Vec::new();
    for (i, p) in points.iter().enumerate() {
        // p is extreme iff it cannot be written as a convex combination of
        // the other points (feasibility program on the weights).
        let others: Vec<&Vec<f64>> = points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).collect();
        let n = others.len();
        let tol = 1e-9;
        let mut rows = Vec::with_capacity(2 * d + 2);
        for k in 0..d {
            let c: Vec<f64> = others.iter().map(|q| q[k]).collect();
            rows.push(LpConstraint::new(c.clone(), p[k] + tol));
            rows.push(LpConstraint::new(c.iter().map(|v| -v).collect(), -(p[k] - tol)));
        }
        rows.push(LpConstraint::new(vec![1.0; n], 1.0));
        rows.push(LpConstraint::new(vec![-1.0; n], -1.0));
        let lp = LinearProgram {
            objective: vec![0.0; n],
            constraints: rows,
            bounds: vec![VarBound::NonNegative; n],
        };
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            keep.push(p.clone());
        }
    }
    Ok(keep)
}
