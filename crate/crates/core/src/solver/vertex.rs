//! Vertex enumeration for small-dimension polyhedra.
//!
//! The public kernel enumerates all vertices of a bounded polyhedron in
//! dimension at most 3 by intersecting constraint subsets. A crate-internal
//! variant enumerates basic points of higher-dimensional systems (used for
//! lifted hull polytopes) and a facet generator reconstructs the halfspace
//! description of compact comprehensive sets from their vertex candidates.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::technology::Halfspace;

pub const VERTEX_DIM_LIMIT: usize = 3;
const DEDUP_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

/// Axis-aligned box bounding the enumeration.
#[derive(Debug, Clone)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        BoundingBox { lower, upper }
    }

    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn faces(&self) -> Vec<Halfspace> {
        let d = self.dim();
        let mut out = Vec::with_capacity(2 * d);
        for k in 0..d {
            let mut up = vec![0.0; d];
            up[k] = 1.0;
            out.push(Halfspace { normal: up, rhs: self.upper[k] });
            let mut lo = vec![0.0; d];
            lo[k] = -1.0;
            out.push(Halfspace { normal: lo, rhs: -self.lower[k] });
        }
        out
    }
}

/// Gaussian elimination with partial pivoting; `None` when near singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .fold((col, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if piv_val < 1e-11 {
            return None;
        }
        a.swap(col, piv_row);
        b.swap(col, piv_row);
        let inv = 1.0 / a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] * inv;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

fn dedup_points(mut points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Vec<f64>> = Vec::new();
    'next: for p in points {
        for q in &out {
            if p.iter().zip(q).all(|(a, b)| (a - b).abs() <= tol) {
                continue 'next;
            }
        }
        out.push(p);
    }
    out
}

fn satisfies_all(point: &[f64], halfspaces: &[Halfspace], tol: f64) -> bool {
    halfspaces.iter().all(|h| {
        let lhs: f64 = h.normal.iter().zip(point).map(|(a, x)| a * x).sum();
        lhs <= h.rhs + tol * (1.0 + h.rhs.abs())
    })
}

/// All vertices of the polyhedron `{ x : H x <= rhs } ∩ box`, deduplicated
/// at 1e-9 and sorted lexicographically. Dimension is capped at 3.
pub fn enumerate_vertices(halfspaces: &[Halfspace], bounds: &BoundingBox) -> Result<Vec<Vec<f64>>> {
    let dim = bounds.dim();
    if dim > VERTEX_DIM_LIMIT {
        return Err(Error::DimensionLimit { limit: VERTEX_DIM_LIMIT, got: dim });
    }
    for h in halfspaces {
        if h.normal.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: h.normal.len() });
        }
    }
    let mut all: Vec<Halfspace> = halfspaces.to_vec();
    all.extend(bounds.faces());

    let mut candidates = Vec::new();
    for combo in (0..all.len()).combinations(dim) {
        let a: Vec<Vec<f64>> = combo.iter().map(|&i| all[i].normal.clone()).collect();
        let b: Vec<f64> = combo.iter().map(|&i| all[i].rhs).collect();
        if let Some(x) = solve_square(a, b) {
            if x.iter().all(|v| v.is_finite()) && satisfies_all(&x, &all, FEAS_TOL) {
                candidates.push(x);
            }
        }
    }
    Ok(dedup_points(candidates, DEDUP_TOL))
}

/// Basic feasible points of `{ x : eqs hold, ineqs <= rhs }` in any
/// dimension, by activating `dim - |eqs|` inequalities at a time.
///
/// Every vertex of the polyhedron appears in the output; spurious interior
/// points do not (all outputs are feasible). The combination count is capped
/// to keep runtime bounded.
pub(crate) fn enumerate_basic_points(
    eqs: &[(Vec<f64>, f64)],
    ineqs: &[(Vec<f64>, f64)],
    dim: usize,
    combo_cap: usize,
) -> Result<Vec<Vec<f64>>> {
    let k = dim.checked_sub(eqs.len()).ok_or_else(|| {
        Error::InvalidSpec("more equalities than dimensions in basic-point enumeration".into())
    })?;
    let m = ineqs.len();
    let combos = binomial(m, k);
    if combos > combo_cap as u128 {
        return Err(Error::SolverFailure(format!(
            "basic-point enumeration too large: C({m},{k}) bases"
        )));
    }

    let mut out = Vec::new();
    for combo in (0..m).combinations(k) {
        let mut a: Vec<Vec<f64>> = eqs.iter().map(|(c, _)| c.clone()).collect();
        let mut b: Vec<f64> = eqs.iter().map(|(_, r)| *r).collect();
        for &i in &combo {
            a.push(ineqs[i].0.clone());
            b.push(ineqs[i].1);
        }
        if let Some(x) = solve_square(a, b) {
            if !x.iter().all(|v| v.is_finite()) {
                continue;
            }
            let feasible = ineqs.iter().all(|(c, r)| {
                let lhs: f64 = c.iter().zip(&x).map(|(a, v)| a * v).sum();
                lhs <= r + FEAS_TOL * (1.0 + r.abs())
            });
            if feasible {
                out.push(x);
            }
        }
    }
    Ok(dedup_points(out, DEDUP_TOL))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Halfspace description of the comprehensive hull of a nonnegative point
/// set in dimension <= 3: the smallest compact set containing the points
/// that is downward closed within the nonnegative orthant.
///
/// All returned normals are nonnegative with right-hand sides tight on the
/// input points; the nonnegativity walls are implied and not emitted. The
/// input set must already be convex-comprehensive for the output to be an
/// exact description (candidate normals come from point triples, point pairs
/// crossed with axes, and axis caps, which covers every facet of such sets
/// including axis-degenerate ones).
pub(crate) fn comprehensive_facets(all_points: &[Vec<f64>], dim: usize) -> Result<Vec<Halfspace>> {
    if dim > VERTEX_DIM_LIMIT {
        return Err(Error::DimensionLimit { limit: VERTEX_DIM_LIMIT, got: dim });
    }
    if all_points.is_empty() {
        return Err(Error::InvalidSpec("facet reconstruction needs at least one point".into()));
    }
    // The comprehensive hull is determined by the Pareto-maximal points;
    // dropping dominated ones keeps the candidate normals tractable.
    let mut points: Vec<Vec<f64>> = Vec::new();
    'outer: for p in all_points {
        for q in all_points {
            if std::ptr::eq(p, q) {
                continue;
            }
            let dominates = q.iter().zip(p).all(|(a, b)| a >= b)
                && q.iter().zip(p).any(|(a, b)| *a > b + 1e-12);
            if dominates {
                continue 'outer;
            }
        }
        points.push(p.clone());
    }
    let points = dedup_points(points, DEDUP_TOL);
    let support = |w: &[f64]| -> f64 {
        points
            .iter()
            .map(|p| w.iter().zip(p).map(|(a, x)| a * x).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut raw: Vec<Vec<f64>> = Vec::new();
    // Axis caps are always valid and close the axis-degenerate cases.
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        raw.push(e);
    }
    match dim {
        1 => {}
        2 => {
            for (i, p) in points.iter().enumerate() {
                for q in points.iter().skip(i + 1) {
                    let n = vec![p[1] - q[1], q[0] - p[0]];
                    for cand in [n.clone(), vec![-n[0], -n[1]]] {
                        raw.push(cand);
                    }
                }
            }
        }
        3 => {
            let axes: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            for (i, p) in points.iter().enumerate() {
                for (j, q) in points.iter().enumerate().skip(i + 1) {
                    let edge: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
                    for ax in &axes {
                        let n = cross(&edge, ax);
                        raw.push(n.to_vec());
                        raw.push(n.iter().map(|v| -v).collect());
                    }
                    for r in points.iter().skip(j + 1) {
                        let e2: Vec<f64> = r.iter().zip(p).map(|(a, b)| a - b).collect();
                        let n = cross(&edge, &e2);
                        raw.push(n.to_vec());
                        raw.push(n.iter().map(|v| -v).collect());
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    let mut facets: Vec<Halfspace> = Vec::new();
    'cand: for mut n in raw {
        let scale = n.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale < 1e-12 {
            continue;
        }
        for v in n.iter_mut() {
            *v /= scale;
            if v.abs() < 1e-10 {
                *v = 0.0;
            }
        }
        if n.iter().any(|&v| v < 0.0) {
            continue;
        }
        let rhs = support(&n);
        // A genuine facet is tight on `dim` points, except through
        // axis-degenerate walls whose normals carry zero components.
        let zeros = n.iter().filter(|&&v| v == 0.0).count();
        let needed = dim.saturating_sub(zeros).max(1);
        let tight = points
            .iter()
            .filter(|p| {
                let v: f64 = n.iter().zip(p.iter()).map(|(a, x)| a * x).sum();
                v >= rhs - DEDUP_TOL * (1.0 + rhs.abs())
            })
            .count();
        if tight < needed {
            continue;
        }
        for f in &facets {
            if f.normal.iter().zip(&n).all(|(a, b)| (a - b).abs() <= DEDUP_TOL)
                && (f.rhs - rhs).abs() <= DEDUP_TOL * (1.0 + rhs.abs())
            {
                continue 'cand;
            }
        }
        facets.push(Halfspace { normal: n, rhs });
    }
    Ok(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(normal: Vec<f64>, rhs: f64) -> Halfspace {
        Halfspace { normal, rhs }
    }

    #[test]
    fn unit_square_corners() {
        let hs = vec![hs(vec![1.0, 0.0], 1.0), hs(vec![0.0, 1.0], 1.0)];
        let v = enumerate_vertices(&hs, &BoundingBox::new(vec![0.0, 0.0], vec![2.0, 2.0])).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.contains(&vec![0.0, 0.0]) && v.contains(&vec![1.0, 1.0]));
    }

    #[test]
    fn degenerate_segment() {
        // x1 <= 0, x1 + x2 <= 0, x2 <= 2 over u >= (-3, 2): a segment.
        let hs = vec![
            hs(vec![1.0, 0.0], 0.0),
            hs(vec![1.0, 1.0], 0.0),
            hs(vec![0.0, 1.0], 2.0),
        ];
        let v = enumerate_vertices(&hs, &BoundingBox::new(vec![-3.0, 2.0], vec![1.0, 3.0])).unwrap();
        assert_eq!(v, vec![vec![-3.0, 2.0], vec![-2.0, 2.0]]);
    }

    #[test]
    fn empty_polyhedron() {
        let hs = vec![hs(vec![1.0], -1.0)];
        let v = enumerate_vertices(&hs, &BoundingBox::new(vec![0.0], vec![2.0])).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn dimension_limit_enforced() {
        let b = BoundingBox::new(vec![0.0; 4], vec![1.0; 4]);
        assert!(matches!(
            enumerate_vertices(&[], &b),
            Err(Error::DimensionLimit { limit: 3, got: 4 })
        ));
    }

    #[test]
    fn comprehensive_facets_square() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let facets = comprehensive_facets(&pts, 2).unwrap();
        // Caps only: x <= 1 and y <= 1.
        assert!(facets.iter().all(|f| f.normal.iter().all(|&v| v >= 0.0)));
        for f in &facets {
            let tight = pts
                .iter()
                .map(|p| f.normal.iter().zip(p).map(|(a, x)| a * x).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((tight - f.rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn comprehensive_facets_staircase() {
        let pts = vec![vec![2.0, 0.0], vec![1.0, 1.0], vec![0.0, 2.0], vec![0.0, 0.0]];
        let facets = comprehensive_facets(&pts, 2).unwrap();
        // The diagonal x + y <= 2 must be found.
        let found = facets.iter().any(|f| {
            (f.normal[0] - f.normal[1]).abs() < 1e-9
                && f.normal[0] > 0.0
                && (f.rhs / f.normal[0] - 2.0).abs() < 1e-9
        });
        assert!(found);
    }
}
