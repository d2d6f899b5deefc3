//! Dual price programs and duality-gap verification.
//!
//! For orders `p >= 1` the distance is a weighted-norm maximum over the
//! dominating set, so optimal prices are recovered in closed form from the
//! primal solution (the norm gradient at the optimal expansion) and the
//! dual side is a maximization under a dual-norm normalization; no
//! convexity is needed. For `p < 1` the dual is a minimization of
//! `profit - value` under a generalized-sum normalization and requires a
//! convex technology; it is solved by multi-start projected descent on the
//! normalization-free ratio, which is quasiconvex. A dual infimum may be
//! approached only along a price sequence; such runs report
//! `attained = false` with the extrapolated value.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gmean::{phi_sum_raw, PParameter, UtilitySpec};
use crate::primal::{directional_value_with_duals, evaluate_p, evaluate_utility};
use crate::technology::{Direction, NetputVector, Technology};

/// Components larger than this after rescaling flag a non-attained dual.
const ATTAINMENT_CAP: f64 = 1e6;
const SEARCH_FLOOR: f64 = 1e-9;

/// Outcome of a dual price program.
#[derive(Debug, Clone)]
pub struct DualResult {
    pub prices: Vec<f64>,
    pub normalization_residual: f64,
    pub dual_value: ExtReal,
    /// `|dual_value - primal score|`.
    pub gap: f64,
    /// False when the infimum is only approached along a price sequence.
    pub attained: bool,
}

/// Whether the dual program maximizes or minimizes `profit - w.z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualCriterion {
    Maximization,
    Minimization,
}

/// Price normalization, keyed by the mean order.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalizationRule {
    /// `w . g = 1` (both infinite orders).
    DotG,
    /// `d_g * max_k g_k w_k = 1` (`p = 1`).
    MaxWeighted,
    /// `d_g^{(q-1)/q} (sum (g_k w_k)^q)^{1/q} = 1` (`p > 1`).
    LqNorm { q: f64 },
    /// `d_g^{(q-1)/q} phi_q-sum(g_k w_k) = 1` (`p < 1`, nonzero).
    PhiQ { q: f64 },
    /// `d_g * prod (g_k w_k)^{1/d_g} = 1` (`p = 0`).
    GeoMean,
}

/// The normalization, optimization criterion, and convexity requirement
/// attached to each order.
pub fn rule_for(p: PParameter) -> (NormalizationRule, DualCriterion, bool) {
    match p {
        PParameter::NegInfinity => (NormalizationRule::DotG, DualCriterion::Minimization, true),
        PParameter::PosInfinity => (NormalizationRule::DotG, DualCriterion::Maximization, false),
        PParameter::Finite(pf) => {
            if p.is_multiplicative() {
                (NormalizationRule::GeoMean, DualCriterion::Minimization, true)
            } else if (pf - 1.0).abs() < 1e-12 {
                (NormalizationRule::MaxWeighted, DualCriterion::Maximization, false)
            } else if pf > 1.0 {
                let q = pf / (pf - 1.0);
                (NormalizationRule::LqNorm { q }, DualCriterion::Maximization, false)
            } else {
                let q = pf / (pf - 1.0);
                (NormalizationRule::PhiQ { q }, DualCriterion::Minimization, true)
            }
        }
    }
}

/// Evaluates the left-hand side of the rule's constraint at `w`.
pub fn normalization_value(rule: &NormalizationRule, g: &Direction, w: &[f64]) -> Result<f64> {
    if w.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: w.len() });
    }
    let support = g.support();
    let dg = support.len() as f64;
    let weighted: Vec<f64> = support.iter().map(|&k| g.values()[k] * w[k]).collect();
    let value = match rule {
        NormalizationRule::DotG => w.iter().zip(g.values()).map(|(wk, gk)| wk * gk).sum(),
        NormalizationRule::MaxWeighted => dg * weighted.iter().cloned().fold(0.0, f64::max),
        NormalizationRule::LqNorm { q } | NormalizationRule::PhiQ { q } => {
            let factor = (((*q - 1.0) / *q) * dg.ln()).exp();
            factor * phi_sum_raw(*q, &weighted)
        }
        NormalizationRule::GeoMean => {
            if weighted.iter().any(|&v| v <= 0.0) {
                0.0
            } else {
                dg * (weighted.iter().map(|v| v.ln()).sum::<f64>() / dg).exp()
            }
        }
    };
    Ok(value)
}

fn check_dual_inputs(tech: &Technology, z: &NetputVector, g: &Direction) -> Result<()> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    if g.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: g.dim() });
    }
    if g.support_size() == 0 {
        return Err(Error::InvalidSpec("the dual program needs a nonzero direction".into()));
    }
    if !tech.contains(z)? {
        return Err(Error::InfeasiblePoint);
    }
    Ok(())
}

/// Dual program for the order-`p` directional distance.
pub fn dual_value(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    p: PParameter,
) -> Result<DualResult> {
    check_dual_inputs(tech, z, g)?;
    let (rule, criterion, needs_convexity) = rule_for(p);
    if needs_convexity && !tech.is_convex() {
        return Err(Error::ConvexityRequired(format!(
            "order {p} dual programs require a convex technology"
        )));
    }
    let primal = evaluate_p(tech, z, g, p)?;
    let score = primal
        .score
        .as_finite()
        .ok_or_else(|| Error::SolverFailure("dual program needs a finite primal score".into()))?;

    match criterion {
        DualCriterion::Maximization => {
            let delta = primal.delta_star.as_deref().unwrap_or(&[]);
            let mut w = recover_max_prices(tech.dim(), g, p, score, delta)?;
            let nv = normalization_value(&rule, g, &w)?;
            if nv > 0.0 {
                for v in w.iter_mut() {
                    *v /= nv;
                }
            }
            let residual = (normalization_value(&rule, g, &w)? - 1.0).abs();
            let profit = tech.restricted_profit(z, g, &w)?;
            let wz: f64 = w.iter().zip(z.values()).map(|(a, b)| a * b).sum();
            let dual = profit - wz;
            Ok(DualResult {
                prices: w,
                normalization_residual: residual,
                dual_value: ExtReal::finite(dual),
                gap: (dual - score).abs(),
                attained: true,
            })
        }
        DualCriterion::Minimization => {
            if p == PParameter::NegInfinity {
                return joint_expansion_dual(tech, z, g, score);
            }
            let support = g.support();
            let candidates = tech.dominating_candidates(z)?;
            let diffs: Vec<Vec<f64>> = candidates
                .iter()
                .map(|u| {
                    support
                        .iter()
                        .map(|&k| (u[k] - z.values()[k]).max(0.0))
                        .collect()
                })
                .collect();
            let gvals: Vec<f64> = support.iter().map(|&k| g.values()[k]).collect();
            let rule_n = rule.clone();
            let dg = support.len();
            let n_fn = move |w: &[f64]| -> (f64, Vec<f64>) {
                normalization_with_gradient(&rule_n, &gvals, w)
            };
            let f_fn = move |w: &[f64]| -> (f64, Vec<f64>) { support_function(&diffs, w) };

            // Seed the search with the supporting prices at the primal
            // projection (the mean's gradient there), when available.
            let mut seeds: Vec<Vec<f64>> = Vec::new();
            if let Some(delta) = primal.delta_star.as_deref() {
                if score > 1e-12 {
                    let mut seed = vec![0.0; dg];
                    for (slot, &k) in support.iter().enumerate() {
                        let dk = delta[k];
                        if dk > 0.0 {
                            seed[slot] = match p {
                                PParameter::Finite(pf) if !p.is_multiplicative() => {
                                    ((pf - 1.0) * (dk.ln() - score.ln())
                                        - (dg as f64 * g.values()[k]).ln())
                                    .exp()
                                }
                                _ => score / (dg as f64 * dk * g.values()[k]),
                            };
                        }
                    }
                    let total: f64 = seed.iter().sum();
                    if total > 0.0 && seed.iter().all(|v| v.is_finite()) {
                        seeds.push(seed.iter().map(|v| v / total).collect());
                    }
                }
            }
            let (w_supp, ratio) = minimize_ratio(&f_fn, &n_fn, dg, &seeds);

            let mut w_full = vec![0.0; tech.dim()];
            for (slot, &k) in support.iter().enumerate() {
                w_full[k] = w_supp[slot];
            }
            let nv = normalization_value(&rule, g, &w_full)?;
            finish_minimization(tech, z, g, &rule, score, w_full, nv, ratio)
        }
    }
}

/// Exact dual of the joint-expansion program via LP duality.
fn joint_expansion_dual(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    score: f64,
) -> Result<DualResult> {
    let w = match tech {
        Technology::VrsHull { .. } => {
            let (_, duals) = directional_value_with_duals(tech, z, g)?;
            let mut w = duals.ok_or_else(|| Error::SolverFailure("missing LP duals".into()))?;
            for v in w.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            w
        }
        Technology::HRep { constraints, .. } => {
            // The binding constraint supplies the prices.
            let zv = z.values();
            let mut best: Option<(f64, usize)> = None;
            for (i, h) in constraints.iter().enumerate() {
                let coeff: f64 = h.normal.iter().zip(g.values()).map(|(n, gv)| n * gv).sum();
                if coeff > 1e-12 {
                    let shift: f64 = h.normal.iter().zip(zv).map(|(n, v)| n * v).sum();
                    let reach = (h.rhs - shift) / coeff;
                    if best.is_none_or(|(b, _)| reach < b - 1e-12) {
                        best = Some((reach, i));
                    }
                }
            }
            let (_, idx) = best.ok_or(Error::UnboundedTechnology)?;
            let h = &constraints[idx];
            let coeff: f64 = h.normal.iter().zip(g.values()).map(|(n, gv)| n * gv).sum();
            h.normal.iter().map(|n| (n / coeff).max(0.0)).collect()
        }
        Technology::Fdh { .. } => {
            return Err(Error::ConvexityRequired(
                "the joint-expansion dual requires a convex technology".into(),
            ))
        }
    };
    let residual = (normalization_value(&NormalizationRule::DotG, g, &w)? - 1.0).abs();
    let profit = tech.dominating_profit(z, &w)?;
    let wz: f64 = w.iter().zip(z.values()).map(|(a, b)| a * b).sum();
    let dual = profit - wz;
    Ok(DualResult {
        prices: w,
        normalization_residual: residual,
        dual_value: ExtReal::finite(dual),
        gap: (dual - score).abs(),
        attained: true,
    })
}

/// Norm-gradient price recovery at the primal optimum (orders `p >= 1`).
fn recover_max_prices(
    d: usize,
    g: &Direction,
    p: PParameter,
    score: f64,
    delta: &[f64],
) -> Result<Vec<f64>> {
    let support = g.support();
    let dg = support.len() as f64;
    let mut w = vec![0.0; d];
    if score <= 1e-12 {
        for &k in &support {
            w[k] = 1.0 / (dg * g.values()[k]);
        }
        return Ok(w);
    }
    match p {
        PParameter::PosInfinity => {
            let (winner, _) = support
                .iter()
                .map(|&k| delta[k] / g.values()[k])
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |acc, (s, v)| {
                    if v > acc.1 {
                        (s, v)
                    } else {
                        acc
                    }
                });
            let k = support[winner];
            w[k] = 1.0 / g.values()[k];
        }
        PParameter::Finite(pf) if (pf - 1.0).abs() < 1e-12 => {
            for &k in &support {
                w[k] = 1.0 / (dg * g.values()[k]);
            }
        }
        PParameter::Finite(pf) => {
            // Gradient of the normalized mean of the expansion multipliers,
            // converted to netput prices: w_k = D^{1-p} d_k^{p-1} / (d_g g_k).
            for &k in &support {
                let dk = delta[k];
                if dk > 0.0 {
                    let ln_w = (pf - 1.0) * (dk.ln() - score.ln()) - (dg * g.values()[k]).ln();
                    w[k] = ln_w.exp();
                }
            }
        }
        PParameter::NegInfinity => unreachable!("minimization regime"),
    }
    Ok(w)
}

fn finish_minimization(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    rule: &NormalizationRule,
    score: f64,
    w_full: Vec<f64>,
    nv: f64,
    ratio: f64,
) -> Result<DualResult> {
    let mut prices = w_full;
    let mut attained = nv > 1e-12;
    if attained {
        for v in prices.iter_mut() {
            *v /= nv;
        }
        if prices.iter().any(|&v| v > ATTAINMENT_CAP) {
            attained = false;
        }
    }
    if attained {
        let residual = (normalization_value(rule, g, &prices)? - 1.0).abs();
        let profit = tech.dominating_profit(z, &prices)?;
        let wz: f64 = prices.iter().zip(z.values()).map(|(a, b)| a * b).sum();
        let dual = profit - wz;
        Ok(DualResult {
            prices,
            normalization_residual: residual,
            dual_value: ExtReal::finite(dual),
            gap: (dual - score).abs(),
            attained: true,
        })
    } else {
        // The infimum is approached along a diverging price sequence; the
        // ratio at the last iterate is the extrapolated dual value.
        Ok(DualResult {
            prices,
            normalization_residual: 0.0,
            dual_value: ExtReal::finite(ratio),
            gap: (ratio - score).abs(),
            attained: false,
        })
    }
}

/// Dual program normalized by the indirect utility (`W*(w) = 1`).
pub fn dual_value_utility(
    tech: &Technology,
    z: &NetputVector,
    spec: &UtilitySpec,
) -> Result<DualResult> {
    if z.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: z.dim() });
    }
    if spec.dim() != tech.dim() {
        return Err(Error::DimensionMismatch { expected: tech.dim(), got: spec.dim() });
    }
    if !tech.is_convex() {
        return Err(Error::ConvexityRequired(
            "utility-normalized duals require a convex technology".into(),
        ));
    }
    if !tech.contains(z)? {
        return Err(Error::InfeasiblePoint);
    }
    let recip = reciprocal_indirect(spec)?;
    let primal = evaluate_utility(tech, z, spec)?;
    let score = primal
        .score
        .as_finite()
        .ok_or_else(|| Error::SolverFailure("dual program needs a finite primal score".into()))?;

    let d = tech.dim();
    let candidates = tech.dominating_candidates(z)?;
    let diffs: Vec<Vec<f64>> = candidates
        .iter()
        .map(|u| u.iter().zip(z.values()).map(|(uv, zv)| (uv - zv).max(0.0)).collect())
        .collect();
    let f_fn = move |w: &[f64]| -> (f64, Vec<f64>) { support_function(&diffs, w) };
    let recip_n = recip.clone();
    let n_fn = move |w: &[f64]| -> (f64, Vec<f64>) { recip_n.eval_with_gradient(w) };

    // Seed with the utility gradient at the primal projection.
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let (Some(delta), true) = (primal.delta_star.as_deref(), score > 1e-12) {
        if let Some(seed) = utility_gradient_seed(spec, delta, score) {
            seeds.push(seed);
        }
    }
    let (w, ratio) = minimize_ratio(&f_fn, &n_fn, d, &seeds);

    let (nv, _) = recip.eval_with_gradient(&w);
    let mut prices = w;
    let mut attained = nv > 1e-12;
    if attained {
        for v in prices.iter_mut() {
            *v /= nv;
        }
        if prices.iter().any(|&v| v > ATTAINMENT_CAP) {
            attained = false;
        }
    }
    if attained {
        let (n_check, _) = recip.eval_with_gradient(&prices);
        let residual = (n_check - 1.0).abs();
        let profit = tech.dominating_profit(z, &prices)?;
        let wz: f64 = prices.iter().zip(z.values()).map(|(a, b)| a * b).sum();
        let dual = profit - wz;
        Ok(DualResult {
            prices,
            normalization_residual: residual,
            dual_value: ExtReal::finite(dual),
            gap: (dual - score).abs(),
            attained: true,
        })
    } else {
        Ok(DualResult {
            prices,
            normalization_residual: 0.0,
            dual_value: ExtReal::finite(ratio),
            gap: (ratio - score).abs(),
            attained: false,
        })
    }
}

/// Gradient of a plain utility spec at the optimal expansion, normalized
/// onto the simplex; the natural starting prices for the dual search.
fn utility_gradient_seed(spec: &UtilitySpec, delta: &[f64], score: f64) -> Option<Vec<f64>> {
    let mut seed = vec![0.0; delta.len()];
    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => match p {
            PParameter::Finite(pf) if !p.is_multiplicative() && (*pf - 1.0).abs() > 1e-12 => {
                for (k, (a, dk)) in coefficients.iter().zip(delta).enumerate() {
                    if *dk > 0.0 {
                        seed[k] =
                            ((1.0 - pf) * score.ln() + pf * a.ln() + (pf - 1.0) * dk.ln()).exp();
                    }
                }
            }
            PParameter::Finite(pf) if (*pf - 1.0).abs() <= 1e-12 => {
                seed.copy_from_slice(coefficients);
            }
            _ => return None,
        },
        UtilitySpec::CobbDouglas { exponents, .. } => {
            for (k, (t, dk)) in exponents.iter().zip(delta).enumerate() {
                if *dk > 0.0 {
                    seed[k] = score * t / dk;
                }
            }
        }
        UtilitySpec::PMeanDirectional { .. } => return None,
    }
    let total: f64 = seed.iter().sum();
    if total > 0.0 && seed.iter().all(|v| v.is_finite()) {
        Some(seed.iter().map(|v| v / total).collect())
    } else {
        None
    }
}

/// The reciprocal of the indirect utility, `1/W*(w)`, with its gradient.
#[derive(Debug, Clone)]
enum ReciprocalIndirect {
    /// `phi_q-sum(w_k / a_k)`; `q = 1` covers the Leontief case.
    PhiQ { q: f64, coeffs: Vec<f64> },
    /// `min_k w_k / a_k` (order one).
    MinRatio { coeffs: Vec<f64> },
    /// `prod (w_k / (a_k t_k))^{t_k}` (Cobb-Douglas).
    Geometric { exponents: Vec<f64>, scale: Vec<f64> },
}

impl ReciprocalIndirect {
    fn eval_with_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        match self {
            ReciprocalIndirect::PhiQ { q, coeffs } => {
                let scaled: Vec<f64> = coeffs.iter().zip(w).map(|(a, wk)| wk / a).collect();
                let value = phi_sum_raw(*q, &scaled);
                let mut grad = vec![0.0; w.len()];
                if value > 0.0 {
                    let s: f64 = scaled.iter().filter(|&&v| v > 0.0).map(|v| (q * v.ln()).exp()).sum();
                    for (k, (a, v)) in coeffs.iter().zip(&scaled).enumerate() {
                        if *v > 0.0 {
                            grad[k] = value * ((q - 1.0) * v.ln()).exp() / (s * a);
                        }
                    }
                }
                (value, grad)
            }
            ReciprocalIndirect::MinRatio { coeffs } => {
                let (k_min, value) = coeffs
                    .iter()
                    .zip(w)
                    .map(|(a, wk)| wk / a)
                    .enumerate()
                    .fold((0usize, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
                let mut grad = vec![0.0; w.len()];
                grad[k_min] = 1.0 / coeffs[k_min];
                (value, grad)
            }
            ReciprocalIndirect::Geometric { exponents, scale } => {
                if w.iter().any(|&v| v <= 0.0) {
                    return (0.0, vec![0.0; w.len()]);
                }
                let ln: f64 = exponents
                    .iter()
                    .zip(scale)
                    .zip(w)
                    .map(|((t, s), wk)| t * (wk / s).ln())
                    .sum();
                let value = ln.exp();
                let grad = exponents.iter().zip(w).map(|(t, wk)| value * t / wk).collect();
                (value, grad)
            }
        }
    }
}

fn reciprocal_indirect(spec: &UtilitySpec) -> Result<ReciprocalIndirect> {
    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => match p {
            PParameter::PosInfinity => Err(Error::UnsupportedRegime(
                "utility-normalized duals need a quasi-concave spec (p <= 1)".into(),
            )),
            PParameter::NegInfinity => {
                Ok(ReciprocalIndirect::PhiQ { q: 1.0, coeffs: coefficients.clone() })
            }
            PParameter::Finite(pf) => {
                if p.is_multiplicative() {
                    let d = coefficients.len();
                    let t = vec![1.0 / d as f64; d];
                    let scale: Vec<f64> =
                        coefficients.iter().zip(&t).map(|(a, tk)| a * tk).collect();
                    return Ok(ReciprocalIndirect::Geometric { exponents: t, scale });
                }
                if (pf - 1.0).abs() < 1e-12 {
                    return Ok(ReciprocalIndirect::MinRatio { coeffs: coefficients.clone() });
                }
                if *pf > 1.0 {
                    return Err(Error::UnsupportedRegime(
                        "utility-normalized duals need a quasi-concave spec (p <= 1)".into(),
                    ));
                }
                Ok(ReciprocalIndirect::PhiQ { q: pf / (pf - 1.0), coeffs: coefficients.clone() })
            }
        },
        UtilitySpec::CobbDouglas { exponents, coefficients } => {
            let scale: Vec<f64> =
                coefficients.iter().zip(exponents).map(|(a, t)| a * t).collect();
            Ok(ReciprocalIndirect::Geometric { exponents: exponents.clone(), scale })
        }
        UtilitySpec::PMeanDirectional { .. } => Err(Error::InvalidSpec(
            "utility-normalized duals take plain or Cobb-Douglas specs; use dual_value for \
             directional families"
                .into(),
        )),
    }
}

/// Support function of the expansion candidates: value and active gradient.
fn support_function(diffs: &[Vec<f64>], w: &[f64]) -> (f64, Vec<f64>) {
    let mut best = 0.0;
    let mut grad = vec![0.0; w.len()];
    for diff in diffs {
        let v: f64 = diff.iter().zip(w).map(|(d, wk)| d * wk).sum();
        if v > best {
            best = v;
            grad.clone_from(diff);
        }
    }
    (best, grad)
}

fn normalization_with_gradient(
    rule: &NormalizationRule,
    gvals: &[f64],
    w: &[f64],
) -> (f64, Vec<f64>) {
    let dg = gvals.len() as f64;
    match rule {
        NormalizationRule::PhiQ { q } | NormalizationRule::LqNorm { q } => {
            let factor = (((*q - 1.0) / *q) * dg.ln()).exp();
            let weighted: Vec<f64> = gvals.iter().zip(w).map(|(g, wk)| g * wk).collect();
            let base = phi_sum_raw(*q, &weighted);
            let value = factor * base;
            let mut grad = vec![0.0; w.len()];
            if base > 0.0 {
                let s: f64 = weighted
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|v| (q * v.ln()).exp())
                    .sum();
                for (k, (g, v)) in gvals.iter().zip(&weighted).enumerate() {
                    if *v > 0.0 {
                        grad[k] = factor * base * ((q - 1.0) * v.ln()).exp() * g / s;
                    }
                }
            }
            (value, grad)
        }
        NormalizationRule::GeoMean => {
            if w.iter().any(|&v| v <= 0.0) {
                return (0.0, vec![0.0; w.len()]);
            }
            let ln: f64 =
                gvals.iter().zip(w).map(|(g, wk)| (g * wk).ln()).sum::<f64>() / dg;
            let value = dg * ln.exp();
            let grad = w.iter().map(|wk| value / (dg * wk)).collect();
            (value, grad)
        }
        NormalizationRule::DotG => {
            let value = gvals.iter().zip(w).map(|(g, wk)| g * wk).sum();
            (value, gvals.to_vec())
        }
        NormalizationRule::MaxWeighted => {
            let (k_max, value) = gvals
                .iter()
                .zip(w)
                .map(|(g, wk)| g * wk)
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
            let mut grad = vec![0.0; w.len()];
            grad[k_max] = dg * gvals[k_max];
            (dg * value, grad)
        }
    }
}

/// Euclidean projection onto `{ w >= floor, sum w = 1 }`.
fn project_simplex_floor(v: &[f64], floor: f64) -> Vec<f64> {
    let n = v.len();
    let budget = 1.0 - floor * n as f64;
    debug_assert!(budget > 0.0);
    let shifted: Vec<f64> = v.iter().map(|x| x - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - budget) / (i as f64 + 1.0);
        if i + 1 == n || t >= sorted.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY) {
            theta = t;
            break;
        }
    }
    shifted.iter().map(|x| (x - theta).max(0.0) + floor).collect()
}

/// Minimizes the quasiconvex ratio `F(w)/N(w)` over the unit simplex with
/// multi-start projected descent and a deterministic pattern polish.
fn minimize_ratio(
    f_fn: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    n_fn: &dyn Fn(&[f64]) -> (f64, Vec<f64>),
    dim: usize,
    seeds: &[Vec<f64>],
) -> (Vec<f64>, f64) {
    let ratio = |w: &[f64]| -> f64 {
        let (f, _) = f_fn(w);
        let (n, _) = n_fn(w);
        if n <= 1e-300 {
            f64::INFINITY
        } else {
            f / n
        }
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        starts.push(project_simplex_floor(seed, SEARCH_FLOOR));
    }
    starts.push(vec![1.0 / dim as f64; dim]);
    for k in 0..dim.min(4) {
        let mut s = vec![0.1 / dim as f64; dim];
        s[k] = 1.0;
        starts.push(project_simplex_floor(&s, SEARCH_FLOOR));
    }
    const PHI: f64 = 1.618_033_988_749_895;
    let mut idx = 0usize;
    while starts.len() < 8 {
        idx += 1;
        let s: Vec<f64> = (0..dim)
            .map(|i| (0.5 + PHI * (idx * (i + 2)) as f64).fract() + 0.05)
            .collect();
        starts.push(project_simplex_floor(&s, SEARCH_FLOOR));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        let mut w = start;
        let mut value = ratio(&w);
        for _ in 0..300 {
            let (f, gf) = f_fn(&w);
            let (n, gn) = n_fn(&w);
            if n <= 1e-300 {
                break;
            }
            let g: Vec<f64> = gf
                .iter()
                .zip(&gn)
                .map(|(df, dn)| (df * n - f * dn) / (n * n))
                .collect();
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm < 1e-14 {
                break;
            }
            let mut step = 1.0 / (1.0 + gnorm);
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> =
                    w.iter().zip(&g).map(|(wk, gk)| wk - step * gk).collect();
                let cand = project_simplex_floor(&cand, SEARCH_FLOOR);
                let cv = ratio(&cand);
                if cv < value - 1e-14 * (1.0 + value.abs()) {
                    w = cand;
                    value = cv;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, bv)| value < *bv) {
            best = Some((w, value));
        }
    }
    let (mut w, mut value) = best.expect("at least one start");

    // Pattern polish: pairwise transfers at shrinking scales, then tighter
    // floors so boundary infima can be approached.
    for &floor in &[SEARCH_FLOOR, 1e-11, 1e-13] {
        w = project_simplex_floor(&w, floor);
        value = ratio(&w);
        let mut scale = 0.25;
        while scale > 1e-9 {
            let mut moved = false;
            for i in 0..dim {
                for j in 0..dim {
                    if i == j {
                        continue;
                    }
                    let mut cand = w.clone();
                    cand[i] += scale;
                    cand[j] -= scale;
                    let cand = project_simplex_floor(&cand, floor);
                    let cv = ratio(&cand);
                    if cv < value - 1e-15 * (1.0 + value.abs()) {
                        w = cand;
                        value = cv;
                        moved = true;
                    }
                }
            }
            if !moved {
                scale *= 0.3;
            }
        }
    }

    // Boundary snap: when vanishing components can be dropped without
    // hurting the ratio, the infimum is attained at the boundary point.
    let small = 1e-6 / dim as f64;
    if w.iter().any(|&v| v < small) {
        let snapped: Vec<f64> = w.iter().map(|&v| if v < small { 0.0 } else { v }).collect();
        let total: f64 = snapped.iter().sum();
        if total > 0.0 {
            let cand: Vec<f64> = snapped.iter().map(|v| v / total).collect();
            let cv = ratio(&cand);
            if cv <= value + 1e-12 * (1.0 + value.abs()) {
                return (cand, cv);
            }
        }
    }
    (w, value)
}

/// Norm duality over the dominating set: the maximal weighted-norm radius
/// equals the price maximization under the dual-norm normalization. Holds
/// with and without convexity.
pub fn norm_dual_value(
    tech: &Technology,
    z: &NetputVector,
    p_norm: PParameter,
    weights: &Direction,
) -> Result<DualResult> {
    check_dual_inputs(tech, z, weights)?;
    let pf = match p_norm {
        PParameter::PosInfinity => f64::INFINITY,
        PParameter::Finite(pf) if pf >= 1.0 => pf,
        _ => {
            return Err(Error::InvalidSpec(
                "norm duality needs an order in [1, +inf]".into(),
            ))
        }
    };
    let support = weights.support();
    let gv = weights.values();

    // Primal: maximal weighted-norm radius over the expansion candidates.
    let candidates = tech.delta_candidates(z, weights)?;
    if candidates.is_empty() {
        return Err(Error::InfeasiblePoint);
    }
    let norm_of = |delta: &[f64]| -> f64 {
        if pf.is_infinite() {
            delta.iter().cloned().fold(0.0, f64::max)
        } else {
            phi_sum_raw(pf, delta)
        }
    };
    let mut best: (f64, Vec<f64>) = (f64::NEG_INFINITY, vec![]);
    for cand in candidates {
        let v = norm_of(&cand);
        if v > best.0 {
            best = (v, cand);
        }
    }
    let (primal, delta) = best;

    // Dual prices from the norm gradient at the optimum.
    let d = tech.dim();
    let mut w = vec![0.0; d];
    if primal <= 1e-12 || (pf - 1.0).abs() < 1e-12 {
        // The sum norm is maximized by the uniform ratio prices on the
        // whole support (the full-face subgradient).
        for &k in &support {
            w[k] = 1.0 / gv[k];
        }
    } else if pf.is_infinite() {
        let (winner, _) = delta
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (s, &v)| {
                if v > acc.1 {
                    (s, v)
                } else {
                    acc
                }
            });
        w[support[winner]] = 1.0 / gv[support[winner]];
    } else {
        for (slot, &k) in support.iter().enumerate() {
            if delta[slot] > 0.0 {
                w[k] = ((pf - 1.0) * (delta[slot].ln() - primal.ln()) - gv[k].ln()).exp();
            }
        }
    }
    // Normalize by the dual norm.
    let weighted: Vec<f64> = support.iter().map(|&k| gv[k] * w[k]).collect();
    let dual_norm = if pf.is_infinite() {
        weighted.iter().sum::<f64>()
    } else if (pf - 1.0).abs() < 1e-12 {
        weighted.iter().cloned().fold(0.0, f64::max)
    } else {
        phi_sum_raw(pf / (pf - 1.0), &weighted)
    };
    if dual_norm > 0.0 {
        for v in w.iter_mut() {
            *v /= dual_norm;
        }
    }
    let weighted: Vec<f64> = support.iter().map(|&k| gv[k] * w[k]).collect();
    let check = if pf.is_infinite() {
        weighted.iter().sum::<f64>()
    } else if (pf - 1.0).abs() < 1e-12 {
        weighted.iter().cloned().fold(0.0, f64::max)
    } else {
        phi_sum_raw(pf / (pf - 1.0), &weighted)
    };
    let residual = (check - 1.0).abs();

    let profit = tech.dominating_profit(z, &w)?;
    let wz: f64 = w.iter().zip(z.values()).map(|(a, b)| a * b).sum();
    let dual = profit - wz;
    Ok(DualResult {
        prices: w,
        normalization_residual: residual,
        dual_value: ExtReal::finite(dual),
        gap: (dual - primal).abs(),
        attained: true,
    })
}

/// Sampled weak-duality check.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub samples: usize,
    /// Largest bound violation observed (zero when all samples respect
    /// weak duality within tolerance).
    pub worst_violation: f64,
}

/// Draws normalized prices and checks that each bounds the primal score
/// from the correct side.
pub fn weak_duality_audit(
    tech: &Technology,
    z: &NetputVector,
    g: &Direction,
    p: PParameter,
    samples: usize,
) -> Result<AuditReport> {
    check_dual_inputs(tech, z, g)?;
    let (rule, criterion, needs_convexity) = rule_for(p);
    if needs_convexity && !tech.is_convex() {
        return Err(Error::ConvexityRequired(format!(
            "order {p} dual programs require a convex technology"
        )));
    }
    let primal = evaluate_p(tech, z, g, p)?;
    let score = primal
        .score
        .as_finite()
        .ok_or_else(|| Error::SolverFailure("audit needs a finite primal score".into()))?;

    let support = g.support();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4E45_5450 ^ samples as u64);
    let mut worst: f64 = 0.0;
    let mut drawn = 0usize;
    let mut guard = 0usize;
    while drawn < samples {
        guard += 1;
        if guard > 100 * samples + 100 {
            return Err(Error::SolverFailure("could not sample normalizable prices".into()));
        }
        let mut w = vec![0.0; tech.dim()];
        let mut total = 0.0;
        for &k in &support {
            let u: f64 = rng.gen::<f64>().max(1e-12);
            let e = -u.ln();
            w[k] = e;
            total += e;
        }
        for &k in &support {
            w[k] /= total;
        }
        let nv = normalization_value(&rule, g, &w)?;
        if nv <= 1e-9 {
            continue;
        }
        for v in w.iter_mut() {
            *v /= nv;
        }
        drawn += 1;
        let violation = match criterion {
            DualCriterion::Maximization => {
                let profit = tech.restricted_profit(z, g, &w)?;
                let wz: f64 = w.iter().zip(z.values()).map(|(a, b)| a * b).sum();
                (profit - wz) - score
            }
            DualCriterion::Minimization => {
                let profit = tech.dominating_profit(z, &w)?;
                let wz: f64 = w.iter().zip(z.values()).map(|(a, b)| a * b).sum();
                score - (profit - wz)
            }
        };
        worst = worst.max(violation);
    }
    Ok(AuditReport { samples, worst_violation: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::technology::Halfspace;

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

    fn fin(p: f64) -> PParameter {
        PParameter::finite(p).unwrap()
    }

    #[test]
    fn normalization_rule_values() {
        let g = Direction::new(vec![1.0, 1.0]).unwrap();
        let v = normalization_value(&NormalizationRule::DotG, &g, &[0.5, 0.5]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = normalization_value(&NormalizationRule::MaxWeighted, &g, &[0.5, 0.5]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lq_norm_approaches_dot_g() {
        let g = Direction::new(vec![0.7, 1.3, 0.4]).unwrap();
        let w = [0.2, 0.5, 0.9];
        let dot = normalization_value(&NormalizationRule::DotG, &g, &w).unwrap();
        let lq = normalization_value(&NormalizationRule::LqNorm { q: 1.001 }, &g, &w).unwrap();
        assert!((lq - dot).abs() <= 1e-3 * (1.0 + dot));
    }

    #[test]
    fn joint_expansion_dual_attains_at_output_price() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let g = Direction::unit(2);
        let r = dual_value(&tech, &z, &g, PParameter::NegInfinity).unwrap();
        assert!(r.attained);
        assert!(r.gap < 1e-8);
        assert!((r.prices[0] - 0.0).abs() < 1e-9 && (r.prices[1] - 1.0).abs() < 1e-9);
        assert!(r.dual_value.as_finite().unwrap().abs() < 1e-9);
    }

    #[test]
    fn mean_order_dual_prices() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let g = Direction::unit(2);
        let r = dual_value(&tech, &z, &g, fin(1.0)).unwrap();
        assert!((r.prices[0] - 0.5).abs() < 1e-9 && (r.prices[1] - 0.5).abs() < 1e-9);
        assert!((r.dual_value.as_finite().unwrap() - 0.5).abs() < 1e-9);
        assert!(r.gap < 1e-8);
        assert!(r.normalization_residual < 1e-9);
    }

    #[test]
    fn low_order_duals_on_the_halfspace_set() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let g = Direction::unit(2);
        // Half order: the primal is 1/4 and the infimum is approached only
        // along a diverging price sequence.
        let r = dual_value(&tech, &z, &g, fin(0.5)).unwrap();
        assert!(r.gap <= 1e-4, "gap {}", r.gap);
        assert!((r.dual_value.as_finite().unwrap() - 0.25).abs() <= 1e-4);
        assert!(!r.attained);
        // Nonpositive orders absorb the pinned coordinate (primal 0). The
        // order -1 rule keeps a positive normalization at the boundary
        // price, so it attains; the geometric rule vanishes there and the
        // infimum is only approached.
        let r = dual_value(&tech, &z, &g, fin(-1.0)).unwrap();
        assert!(r.gap <= 1e-4, "order -1: gap {}", r.gap);
        assert!(r.attained);
        let r = dual_value(&tech, &z, &g, fin(0.0)).unwrap();
        assert!(r.gap <= 1e-4, "order 0: gap {}", r.gap);
        assert!(!r.attained);
    }

    #[test]
    fn weighted_norm_duality_closes() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 1.0]);
        let weights = Direction::new(vec![2.0, 1.0]).unwrap();
        for p in [fin(1.0), fin(1.5), fin(3.0), PParameter::PosInfinity] {
            let r = norm_dual_value(&tech, &z, p, &weights).unwrap();
            assert!(r.gap <= 1e-9, "order {p}: gap {}", r.gap);
            assert!(r.normalization_residual <= 1e-9);
        }
    }

    #[test]
    fn convexity_required_for_low_orders_on_fdh() {
        let tech = Technology::fdh(vec![nv(vec![-2.0, 2.0]), nv(vec![-4.0, 5.0])]).unwrap();
        let z = nv(vec![-4.0, 2.0]);
        let g = Direction::unit(2);
        assert!(matches!(
            dual_value(&tech, &z, &g, fin(0.0)),
            Err(Error::ConvexityRequired(_))
        ));
    }

    #[test]
    fn utility_dual_attained_inverse_square_root() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let spec = UtilitySpec::p_mean_plain(fin(-0.5), vec![1.0, 1.0]).unwrap();
        let r = dual_value_utility(&tech, &z, &spec).unwrap();
        assert!(r.attained);
        assert!(r.gap <= 1e-6, "gap {}", r.gap);
        assert!(r.dual_value.as_finite().unwrap().abs() <= 1e-6);
        // Optimal prices sit at (0, 1).
        assert!(r.prices[0].abs() < 1e-4 && (r.prices[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn utility_dual_not_attained_square_root() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let spec = UtilitySpec::p_mean_plain(fin(0.5), vec![1.0, 1.0]).unwrap();
        let r = dual_value_utility(&tech, &z, &spec).unwrap();
        assert!(!r.attained);
        assert!((r.dual_value.as_finite().unwrap() - 1.0).abs() <= 1e-6);
        assert!(r.gap <= 1e-6);
    }

    #[test]
    fn norm_dual_examples() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let unit = Direction::unit(2);
        // Sum-norm radius of the dominating segment is 1, attained at w = (1, 1).
        let r = norm_dual_value(&tech, &z, fin(1.0), &unit).unwrap();
        assert!((r.dual_value.as_finite().unwrap() - 1.0).abs() < 1e-9);
        assert!(r.gap < 1e-9);
        assert!((r.prices[0] - 1.0).abs() < 1e-9 && (r.prices[1] - 1.0).abs() < 1e-9);

        // An efficient point has radius zero on both sides.
        let r = norm_dual_value(&tech, &nv(vec![-2.0, 2.0]), fin(1.0), &unit).unwrap();
        assert!(r.dual_value.as_finite().unwrap().abs() < 1e-7);

        // Max-norm on a free-disposal hull.
        let fdh = Technology::fdh(vec![nv(vec![-2.0, 2.0]), nv(vec![-4.0, 5.0])]).unwrap();
        let r = norm_dual_value(&fdh, &nv(vec![-4.0, 2.0]), PParameter::PosInfinity, &unit).unwrap();
        assert!((r.dual_value.as_finite().unwrap() - 3.0).abs() < 1e-9);
        assert!(r.gap < 1e-9);
        assert!(r.prices[0].abs() < 1e-12 && (r.prices[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_expansion_prices_support_the_projection() {
        // The optimal prices also maximize the unrestricted profit at the
        // projection point z + D g.
        let points = vec![
            NetputVector::new(vec![-1.0, 2.0], 1).unwrap(),
            NetputVector::new(vec![-2.5, 3.5], 1).unwrap(),
            NetputVector::new(vec![-1.8, 2.9], 1).unwrap(),
        ];
        let tech = Technology::vrs_hull(points.clone()).unwrap();
        let z = NetputVector::new(vec![-2.0, 1.5], 1).unwrap();
        let g = Direction::unit(2);
        let primal = evaluate_p(&tech, &z, &g, PParameter::NegInfinity).unwrap();
        let d = primal.score.as_finite().unwrap();
        let r = dual_value(&tech, &z, &g, PParameter::NegInfinity).unwrap();
        assert!(r.gap < 1e-8);
        let z_star: Vec<f64> = z.values().iter().zip(g.values()).map(|(zv, gv)| zv + d * gv).collect();
        // Unrestricted profit over the hull at nonnegative prices is the
        // best observation value.
        let profit = points
            .iter()
            .map(|a| a.values().iter().zip(&r.prices).map(|(av, w)| av * w).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let at_projection: f64 = z_star.iter().zip(&r.prices).map(|(u, w)| u * w).sum();
        assert!(
            (profit - at_projection).abs() <= 1e-6,
            "profit {profit} vs projection value {at_projection}"
        );
    }

    #[test]
    fn utility_dual_is_zero_at_an_efficient_point() {
        let tech = example_hrep();
        let z = nv(vec![-2.0, 2.0]);
        let spec = UtilitySpec::p_mean_plain(fin(-0.5), vec![1.0, 1.0]).unwrap();
        let r = dual_value_utility(&tech, &z, &spec).unwrap();
        assert!(r.dual_value.as_finite().unwrap().abs() <= 1e-8);
        assert!(r.gap <= 1e-8);
    }

    #[test]
    fn audit_examples() {
        let tech = example_hrep();
        let z = nv(vec![-3.0, 2.0]);
        let g = Direction::unit(2);
        let r = weak_duality_audit(&tech, &z, &g, PParameter::NegInfinity, 100).unwrap();
        assert!(r.worst_violation <= 1e-7, "violation {}", r.worst_violation);

        let fdh = Technology::fdh(vec![nv(vec![-2.0, 2.0]), nv(vec![-4.0, 5.0])]).unwrap();
        let r = weak_duality_audit(&fdh, &nv(vec![-4.0, 2.0]), &g, fin(1.0), 100).unwrap();
        assert!(r.worst_violation <= 1e-7);

        // A single-coordinate direction degenerates to a pointwise bound.
        let e1 = Direction::new(vec![1.0, 0.0]).unwrap();
        let r = weak_duality_audit(&tech, &z, &e1, fin(1.0), 50).unwrap();
        assert!(r.worst_violation <= 1e-7);
    }
}
