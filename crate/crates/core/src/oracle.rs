//! Brute-force reference evaluations.
//!
//! These are correctness anchors, deliberately independent of the candidate
//! enumeration the evaluation layer uses: a column-sweep grid search over
//! the expansion set, the exact dominating-point scan for free-disposal
//! hulls, and a grid maximization over budget lines. Performance is a
//! non-goal.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gmean::{p_mean_utility, PParameter, UtilitySpec};
use crate::technology::{Direction, NetputVector, Technology};

/// Grid resolution and the per-coordinate expansion bounds.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub resolution: usize,
    pub delta_max: Vec<f64>,
}

impl GridSpec {
    /// Builds the spec from single-coordinate expansion programs, so the
    /// grid box provably contains every feasible expansion.
    pub fn for_instance(
        tech: &Technology,
        z: &NetputVector,
        g: &Direction,
        resolution: usize,
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidSpec("grid resolution must be at least 2".into()));
        }
        let delta_max = tech.coordinate_delta_max(z, g)?;
        Ok(GridSpec { resolution, delta_max })
    }
}

/// Result of a grid search: a certified lower bound with its witness and,
/// when available, a certified upper envelope.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub lower: ExtReal,
    pub upper: Option<f64>,
    pub argmax: Vec<f64>,
}

/// Largest feasible last-coordinate expansion given the leading grid
/// coordinates (the feasible set is downward closed, so columns are full
/// segments).
fn column_top(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    fixed: &[f64],
) -> Result<Option<f64>> {
    let support = g.support();
    let last = *support.last().expect("nonempty support");
    let zv = z.values();
    let gv = g.values();
    // Shift z by the fixed expansions and ask for the last coordinate's reach.
    let mut shifted = zv.to_vec();
    for (slot, &k) in support.iter().take(fixed.len()).enumerate() {
        shifted[k] += fixed[slot] * gv[k];
    }
    let shifted = NetputVector::new(shifted, z.num_inputs())?;
    if !tech.contains(&shifted)? {
        return Ok(None);
    }
    let dir = Direction::coordinate(tech.dim(), last, gv[last])?;
    Ok(Some(tech.single_direction_max(&shifted, &dir, last)?))
}

/// Certified-lower-bound grid search of a monotone utility over the
/// feasible expansion set.
///
/// The sweep fixes all but the last support coordinate on a uniform grid
/// and closes the column exactly with a single-coordinate program, so every
/// evaluated point is feasible. On convex technologies with a
/// two-coordinate support the value profile along the sweep is concave and
/// a secant envelope certifies an upper bound as well.
pub fn grid_search(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    spec: &UtilitySpec,
    grid: &GridSpec,
) -> Result<GridResult> {
    let support = g.support();
    let dg = support.len();
    if dg == 0 || dg > 3 {
        return Err(Error::DimensionLimit { limit: 3, got: dg });
    }
    if grid.delta_max.len() != dg {
        return Err(Error::DimensionMismatch { expected: dg, got: grid.delta_max.len() });
    }
    if !tech.contains(z)? {
        return Ok(GridResult { lower: ExtReal::NegInf, upper: None, argmax: vec![] });
    }

    let eval = |delta: &[f64]| -> Result<f64> { p_mean_utility(spec, delta) };

    match dg {
        1 => {
            let top = column_top(tech, z, g, &[])?.unwrap_or(0.0);
            let point = vec![top];
            let value = eval(&point)?;
            Ok(GridResult { lower: ExtReal::finite(value), upper: Some(value), argmax: point })
        }
        2 => {
            let n = grid.resolution;
            let hi = grid.delta_max[0].max(0.0);
            let h = if n > 1 { hi / (n - 1) as f64 } else { hi };
            let mut values = Vec::with_capacity(n);
            let mut best = (f64::NEG_INFINITY, vec![0.0, 0.0]);
            for i in 0..n {
                let x = h * i as f64;
                let Some(top) = column_top(tech, z, g, &[x])? else {
                    values.push(None);
                    continue;
                };
                let point = vec![x, top.max(0.0)];
                let v = eval(&point)?;
                values.push(Some(v));
                if v > best.0 {
                    best = (v, point);
                }
            }
            let upper = if tech.is_convex() {
                Some(concave_envelope_bound(&values, h, best.0))
            } else {
                None
            };
            Ok(GridResult { lower: ExtReal::finite(best.0), upper, argmax: best.1 })
        }
        3 => {
            let n = grid.resolution;
            let h0 = grid.delta_max[0].max(0.0) / (n - 1) as f64;
            let h1 = grid.delta_max[1].max(0.0) / (n - 1) as f64;
            let mut best = (f64::NEG_INFINITY, vec![0.0; 3]);
            for i in 0..n {
                for j in 0..n {
                    let x = h0 * i as f64;
                    let y = h1 * j as f64;
                    let Some(top) = column_top(tech, z, g, &[x, y])? else {
                        continue;
                    };
                    let point = vec![x, y, top.max(0.0)];
                    let v = eval(&point)?;
                    if v > best.0 {
                        best = (v, point);
                    }
                }
            }
            Ok(GridResult { lower: ExtReal::finite(best.0), upper: None, argmax: best.1 })
        }
        _ => unreachable!(),
    }
}

/// Upper envelope of a concave sampled profile: between nodes, the value is
/// capped by extending the neighboring secants.
fn concave_envelope_bound(values: &[Option<f64>], h: f64, node_max: f64) -> f64 {
    let pts: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|x| (i, x)))
        .collect();
    let mut bound = node_max;
    for w in 0..pts.len().saturating_sub(1) {
        let (i0, v0) = pts[w];
        let (i1, v1) = pts[w + 1];
        if i1 != i0 + 1 {
            continue;
        }
        // Slopes of the secants just left and just right of the interval;
        // concavity makes them one-sided derivative bounds.
        let left_slope = if w > 0 && pts[w - 1].0 + 1 == i0 {
            (v0 - pts[w - 1].1) / h
        } else {
            f64::INFINITY
        };
        let right_slope = if w + 2 < pts.len() && pts[w + 2].0 == i1 + 1 {
            (pts[w + 2].1 - v1) / h
        } else {
            f64::NEG_INFINITY
        };
        let cap = if left_slope.is_infinite() && right_slope.is_infinite() {
            v0.max(v1)
        } else if left_slope.is_infinite() {
            v1 - right_slope * h
        } else if right_slope.is_infinite() {
            v0 + left_slope * h
        } else {
            // Intersection of the two bounding lines.
            let denom = left_slope - right_slope;
            if denom.abs() < 1e-15 {
                v0.max(v1)
            } else {
                let t = ((v1 - right_slope * h) - v0) / denom;
                let t = t.clamp(0.0, h);
                v0 + left_slope * t
            }
        };
        bound = bound.max(cap.max(v0.max(v1)));
    }
    bound + 1e-12 * (1.0 + bound.abs())
}

/// Exact order-`p` evaluation on a free-disposal hull by scanning the
/// dominating observations.
pub fn fdh_closed_form(
    points: &[NetputVector],
    z: &NetputVector,
    g: &Direction,
    p: PParameter,
) -> Result<ExtReal> {
    let support = g.support();
    if support.is_empty() {
        return Err(Error::InvalidSpec("the scan needs a nonzero direction".into()));
    }
    let spec = UtilitySpec::p_mean_directional(p, Direction::unit(support.len()), true)?;
    let mut best: Option<f64> = None;
    for a in points {
        if a.dim() != z.dim() {
            return Err(Error::DimensionMismatch { expected: z.dim(), got: a.dim() });
        }
        let dominates = a
            .values()
            .iter()
            .zip(z.values())
            .all(|(av, zv)| *av >= zv - 1e-9);
        if !dominates {
            continue;
        }
        let corner: Vec<f64> = support
            .iter()
            .map(|&k| ((a.values()[k] - z.values()[k]) / g.values()[k]).max(0.0))
            .collect();
        let v = p_mean_utility(&spec, &corner)?;
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    Ok(best.map_or(ExtReal::NegInf, ExtReal::finite))
}

/// Grid maximization of a utility over the budget line `{ v >= 0 : w.v = c }`.
/// Converges to `c * W*(w)` by homogeneity.
pub fn budget_line_max(spec: &UtilitySpec, w: &[f64], c: f64, resolution: usize) -> Result<f64> {
    if w.iter().any(|&x| x.is_nan() || x <= 0.0) || c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidSpec("budget prices and level must be positive".into()));
    }
    if w.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: w.len() });
    }
    if resolution < 2 {
        return Err(Error::InvalidSpec("grid resolution must be at least 2".into()));
    }
    let d = w.len();
    match d {
        1 => p_mean_utility(spec, &[c / w[0]]),
        2 => {
            let hi = c / w[0];
            let h = hi / (resolution - 1) as f64;
            let mut best = f64::NEG_INFINITY;
            for i in 0..resolution {
                let v0 = h * i as f64;
                let v1 = ((c - w[0] * v0) / w[1]).max(0.0);
                best = best.max(p_mean_utility(spec, &[v0, v1])?);
            }
            Ok(best)
        }
        3 => {
            let hi0 = c / w[0];
            let h0 = hi0 / (resolution - 1) as f64;
            let mut best = f64::NEG_INFINITY;
            for i in 0..resolution {
                let v0 = h0 * i as f64;
                let rem = c - w[0] * v0;
                if rem < 0.0 {
                    continue;
                }
                let hi1 = rem / w[1];
                let h1 = hi1 / (resolution - 1) as f64;
                for j in 0..resolution {
                    let v1 = h1 * j as f64;
                    let v2 = ((rem - w[1] * v1) / w[2]).max(0.0);
                    best = best.max(p_mean_utility(spec, &[v0, v1, v2])?);
                }
            }
            Ok(best)
        }
        _ => Err(Error::DimensionLimit { limit: 3, got: d }),
    }
}
