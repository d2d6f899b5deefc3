//! Generalized power sums and the utility families built on them.
//!
//! The `phi_p` generalized sum of a nonnegative vector is `(sum d_k^p)^{1/p}`
//! for `p > 0`. For `p < 0` the same expression applies when every component
//! is strictly positive and the sum is exactly `0` otherwise: zero is an
//! absorbing element of the negative-order sum. The limiting orders are the
//! minimum (`p = -inf`), the maximum (`p = +inf`) and the geometric mean
//! (`p -> 0`).
//!
//! All mean arithmetic is done in log space so that extreme orders
//! (`p = -50`, `p = -0.05`, ...) neither overflow nor lose the limit
//! behaviour they are supposed to approximate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::technology::Direction;

/// Orders with `|p|` below this band are routed to the geometric-mean branch
/// to avoid the `1/p` exponent blowing up.
pub const MULTIPLICATIVE_BAND: f64 = 1e-6;

/// The mean order `p`, an extended real with `Finite(0)` denoting the
/// multiplicative (geometric) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PParameter {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl PParameter {
    /// Wraps a finite order. Errors on NaN or IEEE infinities.
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() {
            Ok(PParameter::Finite(p))
        } else {
            Err(Error::InvalidSpec(format!("finite mean order required, got {p}")))
        }
    }

    /// True when the order falls in the multiplicative band around zero.
    pub fn is_multiplicative(&self) -> bool {
        matches!(self, PParameter::Finite(p) if p.abs() < MULTIPLICATIVE_BAND)
    }

    /// The conjugate order `q = p/(p-1)` used by the dual programs.
    ///
    /// Returns `None` for the multiplicative band and for `p = 1` (where the
    /// conjugate degenerates to the max/min normalization); both infinite
    /// orders conjugate to `q = 1`.
    pub fn dual_order(&self) -> Option<f64> {
        match self {
            PParameter::NegInfinity | PParameter::PosInfinity => Some(1.0),
            PParameter::Finite(p) => {
                if self.is_multiplicative() || (p - 1.0).abs() < 1e-12 {
                    None
                } else {
                    Some(p / (p - 1.0))
                }
            }
        }
    }
}

impl Eq for PParameter {}

impl PartialOrd for PParameter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PParameter {
    fn cmp(&self, other: &Self) -> Ordering {
        use PParameter::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) => Ordering::Less,
            (_, NegInfinity) => Ordering::Greater,
            (PosInfinity, _) => Ordering::Greater,
            (_, PosInfinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("finite orders are ordered"),
        }
    }
}

impl fmt::Display for PParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PParameter::NegInfinity => write!(f, "-inf"),
            PParameter::Finite(p) => write!(f, "{p}"),
            PParameter::PosInfinity => write!(f, "inf"),
        }
    }
}

impl FromStr for PParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" => Ok(PParameter::PosInfinity),
            "-inf" => Ok(PParameter::NegInfinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("invalid mean order token {s:?}")))?;
                PParameter::finite(p)
            }
        }
    }
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeComponent { index, value });
        }
    }
    Ok(())
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    if xs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `(sum v_k^p)^{1/p}` for finite `p != 0`, with the negative-order zero
/// convention. Values must be nonnegative; an empty slice yields 0.
pub(crate) fn phi_sum_raw(p: f64, values: &[f64]) -> f64 {
    debug_assert!(p != 0.0 && p.is_finite());
    if values.is_empty() {
        return 0.0;
    }
    if p < 0.0 && values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    let positive = values.iter().filter(|&&v| v > 0.0);
    let ln_sum = log_sum_exp(positive.map(|&v| p * v.ln()));
    if ln_sum == f64::NEG_INFINITY {
        return 0.0; // p > 0 with all components zero
    }
    (ln_sum / p).exp()
}

/// `((1/n) sum v_k^p)^{1/p}` for finite `p != 0` over all `n = values.len()`
/// slots, same conventions as [`phi_sum_raw`].
pub(crate) fn power_mean_raw(p: f64, values: &[f64]) -> f64 {
    debug_assert!(p != 0.0 && p.is_finite());
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if p < 0.0 && values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    let positive = values.iter().filter(|&&v| v > 0.0);
    let ln_sum = log_sum_exp(positive.map(|&v| p * v.ln()));
    if ln_sum == f64::NEG_INFINITY {
        return 0.0;
    }
    ((ln_sum - (n as f64).ln()) / p).exp()
}

/// Plain geometric mean `prod v_k^{1/n}`; zero-absorbing.
pub fn geo_mean(values: &[f64]) -> Result<f64> {
    check_nonnegative(values)?;
    let n = values.len();
    if n == 0 {
        return Ok(0.0);
    }
    if values.contains(&0.0) {
        return Ok(0.0);
    }
    Ok((values.iter().map(|v| v.ln()).sum::<f64>() / n as f64).exp())
}

/// The `phi_p` generalized sum of a nonnegative vector.
///
/// `p = +inf` is the maximum, `p = -inf` the minimum. The multiplicative
/// band is rejected; use [`geo_mean`] there.
pub fn phi_sum(p: PParameter, delta: &[f64]) -> Result<f64> {
    check_nonnegative(delta)?;
    if delta.is_empty() {
        return Ok(0.0);
    }
    match p {
        PParameter::PosInfinity => Ok(delta.iter().cloned().fold(0.0, f64::max)),
        PParameter::NegInfinity => {
            Ok(delta.iter().cloned().fold(f64::INFINITY, f64::min))
        }
        PParameter::Finite(_) if p.is_multiplicative() => Err(Error::InvalidSpec(
            "phi-sum is undefined in the multiplicative band; use geo_mean".into(),
        )),
        PParameter::Finite(pf) => Ok(phi_sum_raw(pf, delta)),
    }
}

/// A monotone utility on the nonnegative orthant, anchored at `W(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum UtilitySpec {
    /// `phi_p`-sum of `a_k d_k` (geometric-mean analog in the zero band).
    PMeanPlain { p: PParameter, coefficients: Vec<f64> },
    /// Power mean of the ratios `d_k / g_k` over the support of `g`; the
    /// `normalized` flag applies the `1/d_g^{1/p}` factor (the multiplicative
    /// case always carries its `1/d_g` exponent).
    PMeanDirectional { p: PParameter, direction: Direction, normalized: bool },
    /// `prod (a_k d_k)^{t_k}` with exponents summing to one.
    CobbDouglas { exponents: Vec<f64>, coefficients: Vec<f64> },
}

fn check_strictly_positive(label: &str, values: &[f64]) -> Result<()> {
    for &v in values {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "{label} must be strictly positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

impl UtilitySpec {
    pub fn p_mean_plain(p: PParameter, coefficients: Vec<f64>) -> Result<Self> {
        check_strictly_positive("coefficients", &coefficients)?;
        if coefficients.is_empty() {
            return Err(Error::InvalidSpec("coefficient vector must be nonempty".into()));
        }
        Ok(UtilitySpec::PMeanPlain { p, coefficients })
    }

    pub fn p_mean_directional(p: PParameter, direction: Direction, normalized: bool) -> Result<Self> {
        if direction.support_size() == 0 {
            return Err(Error::InvalidSpec("direction must have nonempty support".into()));
        }
        Ok(UtilitySpec::PMeanDirectional { p, direction, normalized })
    }

    pub fn cobb_douglas(exponents: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        check_strictly_positive("exponents", &exponents)?;
        check_strictly_positive("coefficients", &coefficients)?;
        if exponents.len() != coefficients.len() || exponents.is_empty() {
            return Err(Error::InvalidSpec("exponent/coefficient arity mismatch".into()));
        }
        let total: f64 = exponents.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "Cobb-Douglas exponents must sum to 1 (got {total})"
            )));
        }
        Ok(UtilitySpec::CobbDouglas { exponents, coefficients })
    }

    /// The dimension of the vectors the spec evaluates.
    pub fn dim(&self) -> usize {
        match self {
            UtilitySpec::PMeanPlain { coefficients, .. } => coefficients.len(),
            UtilitySpec::PMeanDirectional { direction, .. } => direction.dim(),
            UtilitySpec::CobbDouglas { exponents, .. } => exponents.len(),
        }
    }

    /// The mean order, when the spec is a power-mean family member.
    pub fn order(&self) -> Option<PParameter> {
        match self {
            UtilitySpec::PMeanPlain { p, .. } | UtilitySpec::PMeanDirectional { p, .. } => Some(*p),
            UtilitySpec::CobbDouglas { .. } => None,
        }
    }

    /// True when a zero component annihilates the utility (orders `p <= 0`
    /// and the Cobb-Douglas family).
    pub fn absorbs_zero(&self) -> bool {
        match self {
            UtilitySpec::CobbDouglas { .. } => true,
            UtilitySpec::PMeanPlain { p, .. } | UtilitySpec::PMeanDirectional { p, .. } => {
                matches!(p, PParameter::NegInfinity)
                    || matches!(p, PParameter::Finite(v) if *v < MULTIPLICATIVE_BAND)
            }
        }
    }
}

/// Evaluates a utility spec at a nonnegative vector.
pub fn p_mean_utility(spec: &UtilitySpec, delta: &[f64]) -> Result<f64> {
    check_nonnegative(delta)?;
    if delta.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: delta.len() });
    }
    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => {
            let scaled: Vec<f64> =
                coefficients.iter().zip(delta).map(|(a, d)| a * d).collect();
            match p {
                PParameter::PosInfinity => Ok(scaled.iter().cloned().fold(0.0, f64::max)),
                PParameter::NegInfinity => {
                    Ok(scaled.iter().cloned().fold(f64::INFINITY, f64::min))
                }
                PParameter::Finite(_) if p.is_multiplicative() => geo_mean(&scaled),
                PParameter::Finite(pf) => Ok(phi_sum_raw(*pf, &scaled)),
            }
        }
        UtilitySpec::PMeanDirectional { p, direction, normalized } => {
            let ratios: Vec<f64> = direction
                .support()
                .iter()
                .map(|&k| delta[k] / direction.values()[k])
                .collect();
            match p {
                PParameter::PosInfinity => Ok(ratios.iter().cloned().fold(0.0, f64::max)),
                PParameter::NegInfinity => {
                    Ok(ratios.iter().cloned().fold(f64::INFINITY, f64::min))
                }
                PParameter::Finite(_) if p.is_multiplicative() => geo_mean(&ratios),
                PParameter::Finite(pf) => {
                    if *normalized {
                        Ok(power_mean_raw(*pf, &ratios))
                    } else {
                        Ok(phi_sum_raw(*pf, &ratios))
                    }
                }
            }
        }
        UtilitySpec::CobbDouglas { exponents, coefficients } => {
            if delta.contains(&0.0) {
                return Ok(0.0);
            }
            let ln: f64 = exponents
                .iter()
                .zip(coefficients)
                .zip(delta)
                .map(|((t, a), d)| t * (a * d).ln())
                .sum();
            Ok(ln.exp())
        }
    }
}

/// The indirect utility `W*(w) = sup { W(v) : w . v = 1, v >= 0 }`.
///
/// Closed forms exist for quasi-concave members: plain power means of order
/// `p < 1` (conjugating to `q = p/(p-1)`) and Cobb-Douglas utilities.
/// Orders `p >= 1` are rejected; the norm-duality route applies there.
pub fn indirect_utility(spec: &UtilitySpec, w: &[f64]) -> Result<ExtReal> {
    check_nonnegative(w)?;
    if w.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: w.len() });
    }
    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => {
            let q = match p {
                PParameter::PosInfinity => {
                    return Err(Error::UnsupportedRegime(
                        "indirect utility needs p < 1; norm duality applies for p >= 1".into(),
                    ))
                }
                PParameter::NegInfinity => 1.0,
                PParameter::Finite(pf) => {
                    if p.is_multiplicative() {
                        return Err(Error::InvalidSpec(
                            "use a Cobb-Douglas spec for the multiplicative indirect utility".into(),
                        ));
                    }
                    if *pf >= 1.0 {
                        return Err(Error::UnsupportedRegime(
                            "indirect utility needs p < 1; norm duality applies for p >= 1".into(),
                        ));
                    }
                    pf / (pf - 1.0)
                }
            };
            let scaled: Vec<f64> = coefficients.iter().zip(w).map(|(a, wk)| wk / a).collect();
            let s = if (q - 1.0).abs() < 1e-15 {
                scaled.iter().sum()
            } else {
                phi_sum_raw(q, &scaled)
            };
            if s == 0.0 {
                Ok(ExtReal::PosInf)
            } else {
                Ok(ExtReal::Finite(1.0 / s))
            }
        }
        UtilitySpec::CobbDouglas { exponents, coefficients } => {
            if w.contains(&0.0) {
                return Ok(ExtReal::PosInf);
            }
            let ln: f64 = exponents
                .iter()
                .zip(coefficients)
                .zip(w)
                .map(|((t, a), wk)| t * ((a * t).ln() - wk.ln()))
                .sum();
            Ok(ExtReal::Finite(ln.exp()))
        }
        UtilitySpec::PMeanDirectional { .. } => Err(Error::InvalidSpec(
            "indirect utility is defined for plain and Cobb-Douglas specs".into(),
        )),
    }
}

/// The maximizer and value of `W` over the budget line `{ v >= 0 : b . v = c }`.
pub fn budget_line_argmax(spec: &UtilitySpec, b: &[f64], c: f64) -> Result<(Vec<f64>, f64)> {
    check_strictly_positive("budget prices", b)?;
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidSpec(format!("budget level must be positive, got {c}")));
    }
    if b.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: b.len() });
    }
    match spec {
        UtilitySpec::PMeanPlain { p, coefficients } => match p {
            PParameter::PosInfinity => Err(Error::UnsupportedRegime(
                "budget-line maximization needs p < 1".into(),
            )),
            PParameter::NegInfinity => {
                // Leontief: equalize a_k v_k across coordinates.
                let denom: f64 = coefficients.iter().zip(b).map(|(a, bk)| bk / a).sum();
                let v: Vec<f64> =
                    coefficients.iter().map(|a| c / (a * denom)).collect();
                Ok((v, c / denom))
            }
            PParameter::Finite(pf) => {
                if p.is_multiplicative() || *pf >= 1.0 {
                    return Err(Error::UnsupportedRegime(
                        "budget-line maximization needs p < 1 outside the multiplicative band"
                            .into(),
                    ));
                }
                let q = pf / (pf - 1.0);
                // ln v_k = ln c + (ln b_k - p ln a_k)/(p-1) - LSE_j(q (ln b_j - ln a_j))
                let ln_terms: Vec<f64> = coefficients
                    .iter()
                    .zip(b)
                    .map(|(a, bk)| q * (bk.ln() - a.ln()))
                    .collect();
                let lse = log_sum_exp(ln_terms.iter().cloned());
                let v: Vec<f64> = coefficients
                    .iter()
                    .zip(b)
                    .map(|(a, bk)| (c.ln() + (bk.ln() - pf * a.ln()) / (pf - 1.0) - lse).exp())
                    .collect();
                let value = (c.ln() - lse / q).exp();
                Ok((v, value))
            }
        },
        UtilitySpec::CobbDouglas { exponents, coefficients } => {
            let v: Vec<f64> = exponents.iter().zip(b).map(|(t, bk)| c * t / bk).collect();
            let ln: f64 = exponents
                .iter()
                .zip(coefficients)
                .zip(&v)
                .map(|((t, a), vk)| t * (a * vk).ln())
                .sum();
            Ok((v, ln.exp()))
        }
        UtilitySpec::PMeanDirectional { .. } => Err(Error::InvalidSpec(
            "budget-line maximization is defined for plain and Cobb-Douglas specs".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::technology::Direction;
    use proptest::prelude::*;

    fn p(v: f64) -> PParameter {
        PParameter::finite(v).unwrap()
    }

    #[test]
    fn phi_sum_three_four_five() {
        assert!((phi_sum(p(2.0), &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn phi_sum_negative_order_absorbs_zero() {
        assert_eq!(phi_sum(p(-1.0), &[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn phi_sum_half_order() {
        assert!((phi_sum(p(0.5), &[1.0, 1.0]).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn phi_sum_rejects_negative_components() {
        assert!(matches!(
            phi_sum(p(1.0), &[1.0, -0.5]),
            Err(Error::NegativeComponent { index: 1, .. })
        ));
    }

    #[test]
    fn directional_mean_examples() {
        let g = Direction::new(vec![1.0, 1.0]).unwrap();
        let spec = UtilitySpec::p_mean_directional(p(1.0), g, true).unwrap();
        assert!((p_mean_utility(&spec, &[2.0, 4.0]).unwrap() - 3.0).abs() < 1e-12);

        let g = Direction::new(vec![1.0, 2.0]).unwrap();
        let spec = UtilitySpec::p_mean_directional(PParameter::NegInfinity, g, true).unwrap();
        assert!((p_mean_utility(&spec, &[2.0, 4.0]).unwrap() - 2.0).abs() < 1e-12);

        let g = Direction::new(vec![1.0, 1.0]).unwrap();
        let spec = UtilitySpec::p_mean_directional(p(0.0), g, true).unwrap();
        assert!((p_mean_utility(&spec, &[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn indirect_utility_inverse_square_root() {
        // p = -1/2 conjugates to q = 1/3 and the zero-price component is harmless.
        let spec = UtilitySpec::p_mean_plain(p(-0.5), vec![1.0, 1.0]).unwrap();
        let v = indirect_utility(&spec, &[0.0, 1.0]).unwrap();
        assert!((v.as_finite().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn indirect_utility_square_root() {
        // p = 1/2 conjugates to q = -1; frozen from the budget-line oracle.
        let spec = UtilitySpec::p_mean_plain(p(0.5), vec![1.0, 1.0]).unwrap();
        let v = indirect_utility(&spec, &[1.0, 1.0]).unwrap();
        assert!((v.as_finite().unwrap() - 2.0).abs() < 1e-12);
        // Absorption on the normalization side: a zero price blows up.
        assert!(indirect_utility(&spec, &[0.0, 1.0]).unwrap().is_pos_inf());
    }

    #[test]
    fn indirect_utility_cobb_douglas() {
        // Frozen from the budget-line oracle: symmetric optimum at v = (1/2, 1/2).
        let spec = UtilitySpec::cobb_douglas(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let v = indirect_utility(&spec, &[1.0, 1.0]).unwrap();
        assert!((v.as_finite().unwrap() - 0.5).abs() < 1e-12);
        assert!(indirect_utility(&spec, &[0.0, 1.0]).unwrap().is_pos_inf());
    }

    #[test]
    fn indirect_utility_rejects_norm_regime() {
        let spec = UtilitySpec::p_mean_plain(p(2.0), vec![1.0, 1.0]).unwrap();
        assert!(matches!(indirect_utility(&spec, &[1.0, 1.0]), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn budget_line_argmax_square_root_value() {
        // (sqrt(1/2) + sqrt(1/2))^2 = 2 at the symmetric split.
        let spec = UtilitySpec::p_mean_plain(p(0.5), vec![1.0, 1.0]).unwrap();
        let (v, value) = budget_line_argmax(&spec, &[1.0, 1.0], 1.0).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);
        assert!((value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn budget_line_argmax_value_matches_direct_eval() {
        for pf in [-2.0, -1.0, -0.5, 0.5] {
            let spec = UtilitySpec::p_mean_plain(p(pf), vec![1.0, 2.0, 0.7]).unwrap();
            let b = [0.8, 1.3, 2.0];
            let (v, value) = budget_line_argmax(&spec, &b, 1.7).unwrap();
            let direct = p_mean_utility(&spec, &v).unwrap();
            assert!((value - direct).abs() < 1e-9 * (1.0 + value.abs()));
            let budget: f64 = b.iter().zip(&v).map(|(bk, vk)| bk * vk).sum();
            assert!((budget - 1.7).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_line_argmax_inverse_square_root_value() {
        let spec = UtilitySpec::p_mean_plain(p(-0.5), vec![1.0, 1.0]).unwrap();
        let (v, value) = budget_line_argmax(&spec, &[1.0, 1.0], 1.0).unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!((value - 0.125).abs() < 1e-12);
    }

    #[test]
    fn budget_line_argmax_cobb_douglas_expenditure_shares() {
        let spec = UtilitySpec::cobb_douglas(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let (v, _) = budget_line_argmax(&spec, &[1.0, 2.0], 2.0).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn limit_consistency_toward_infinite_orders() {
        let delta = [0.3, 1.7, 0.9, 2.4];
        let g = Direction::new(vec![1.0; 4]).unwrap();
        let max = 2.4;
        let min = 0.3;
        let mut prev_hi = f64::INFINITY;
        let mut prev_lo = f64::INFINITY;
        for order in [10.0, 50.0, 200.0, 800.0] {
            let hi = p_mean_utility(
                &UtilitySpec::p_mean_directional(p(order), g.clone(), true).unwrap(),
                &delta,
            )
            .unwrap();
            let lo = p_mean_utility(
                &UtilitySpec::p_mean_directional(p(-order), g.clone(), true).unwrap(),
                &delta,
            )
            .unwrap();
            let dev_hi = (hi - max).abs();
            let dev_lo = (lo - min).abs();
            assert!(dev_hi <= prev_hi + 1e-12 && dev_lo <= prev_lo + 1e-12);
            prev_hi = dev_hi;
            prev_lo = dev_lo;
        }
        assert!(prev_hi < 1e-2 * max && prev_lo < 1e-2 * min);
    }

    #[test]
    fn near_zero_order_approaches_geometric_mean() {
        let delta = [0.4, 1.9, 3.2];
        let g = Direction::new(vec![1.0; 3]).unwrap();
        let geo = p_mean_utility(
            &UtilitySpec::p_mean_directional(p(0.0), g.clone(), true).unwrap(),
            &delta,
        )
        .unwrap();
        let near = p_mean_utility(
            &UtilitySpec::p_mean_directional(p(1e-5), g, true).unwrap(),
            &delta,
        )
        .unwrap();
        assert!((near - geo).abs() < 1e-4 * geo);
    }

    proptest! {
        #[test]
        fn monotone_in_order(
            delta in proptest::collection::vec(0.0f64..5.0, 2..5),
            lo in -3.0f64..3.0,
            hi in -3.0f64..3.0,
        ) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            prop_assume!(lo.abs() > 2e-6 && hi.abs() > 2e-6);
            let g = Direction::new(vec![1.0; delta.len()]).unwrap();
            let wl = p_mean_utility(
                &UtilitySpec::p_mean_directional(p(lo), g.clone(), true).unwrap(), &delta).unwrap();
            let wh = p_mean_utility(
                &UtilitySpec::p_mean_directional(p(hi), g, true).unwrap(), &delta).unwrap();
            prop_assert!(wh >= wl - 1e-9 * (1.0 + wh.abs()));
        }

        #[test]
        fn homogeneous_degree_one(
            delta in proptest::collection::vec(0.0f64..5.0, 2..5),
            lambda in 0.0f64..4.0,
            order in -3.0f64..3.0,
        ) {
            prop_assume!(order.abs() > 2e-6);
            let g = Direction::new(vec![1.0; delta.len()]).unwrap();
            let spec = UtilitySpec::p_mean_directional(p(order), g, true).unwrap();
            let base = p_mean_utility(&spec, &delta).unwrap();
            let scaled: Vec<f64> = delta.iter().map(|d| lambda * d).collect();
            let got = p_mean_utility(&spec, &scaled).unwrap();
            prop_assert!((got - lambda * base).abs() < 1e-8 * (1.0 + lambda * base));
        }

        #[test]
        fn absorption_for_nonpositive_orders(
            mut delta in proptest::collection::vec(0.1f64..5.0, 2..5),
            order in -5.0f64..0.0,
            zero_at in 0usize..4,
        ) {
            let k = zero_at % delta.len();
            delta[k] = 0.0;
            let g = Direction::new(vec![1.0; delta.len()]).unwrap();
            let spec = UtilitySpec::p_mean_directional(p(order.min(-1e-3)), g, true).unwrap();
            prop_assert_eq!(p_mean_utility(&spec, &delta).unwrap(), 0.0);
        }
    }
}
