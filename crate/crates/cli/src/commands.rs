//! Batch evaluation commands over a dataset.

use std::path::PathBuf;

use netput_eff_core::dual::{dual_value, rule_for, DualCriterion, NormalizationRule};
use netput_eff_core::oracle::{grid_search, GridSpec};
use netput_eff_core::primal::evaluate_p;
use netput_eff_core::{
    Direction, EfficiencyStatus, Error, EvalResult, ExtReal, NetputVector, PParameter, Technology,
    UtilitySpec,
};
use rayon::prelude::*;

use crate::dataset::{load_direction, load_hrep, CliError, Dataset};
use crate::report::{Cell, OutputFormat, Report};

#[derive(Debug, Clone)]
pub enum TechChoice {
    Vrs,
    Fdh,
    HRep(PathBuf),
}

#[derive(Debug, Clone)]
pub enum DirectionChoice {
    /// `g = |z|`; zero components stay outside the support.
    Observed,
    /// All-ones direction.
    Unit,
    Custom(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub technology: TechChoice,
    pub p_list: Vec<PParameter>,
    pub direction: DirectionChoice,
    pub tolerance: f64,
    pub dual: bool,
    pub format: OutputFormat,
}

/// Exit code used when a requested regime is not computable exactly.
pub const EXIT_UNSUPPORTED: i32 = 2;

pub fn build_technology(config: &RunConfig, dataset: &Dataset) -> Result<Technology, CliError> {
    let points: Vec<NetputVector> = dataset.units.iter().map(|u| u.netput.clone()).collect();
    match &config.technology {
        TechChoice::Vrs => Ok(Technology::vrs_hull(points)?),
        TechChoice::Fdh => Ok(Technology::fdh(points)?),
        TechChoice::HRep(path) => load_hrep(path, dataset.dim()),
    }
}

fn resolve_direction(
    config: &RunConfig,
    dataset: &Dataset,
) -> Result<Option<Direction>, CliError> {
    match &config.direction {
        DirectionChoice::Custom(path) => Ok(Some(load_direction(path, dataset.dim())?)),
        _ => Ok(None),
    }
}

fn unit_direction(
    config: &RunConfig,
    fixed: &Option<Direction>,
    id: &str,
    z: &NetputVector,
) -> Direction {
    match &config.direction {
        DirectionChoice::Unit => Direction::unit(z.dim()),
        DirectionChoice::Custom(_) => fixed.clone().expect("custom direction loaded"),
        DirectionChoice::Observed => {
            let g = Direction::observed(z);
            if g.support_size() < z.dim() {
                eprintln!(
                    "warning: unit {id}: zero netput components are excluded from the \
                     direction support"
                );
            }
            g
        }
    }
}

/// The classical measure each order reduces to.
pub fn measure_name(p: PParameter) -> &'static str {
    match p {
        PParameter::NegInfinity => "directional",
        PParameter::PosInfinity => "asymmetric",
        PParameter::Finite(_) if p.is_multiplicative() => "multiplicative-fare-lovell",
        PParameter::Finite(pf) if (pf - 1.0).abs() < 1e-12 => "fare-lovell",
        PParameter::Finite(_) => "generalized",
    }
}

/// Human-readable dual dispatch labels (criterion, normalization, convexity).
pub fn rule_labels(p: PParameter) -> (&'static str, &'static str, bool) {
    let (rule, criterion, convexity) = rule_for(p);
    let c = match criterion {
        DualCriterion::Maximization => "maximization",
        DualCriterion::Minimization => "minimization",
    };
    let n = match rule {
        NormalizationRule::DotG => "dot-g",
        NormalizationRule::MaxWeighted => "max-weighted",
        NormalizationRule::LqNorm { .. } => "lq-norm",
        NormalizationRule::PhiQ { .. } => "phi-q",
        NormalizationRule::GeoMean => "geo-mean",
    };
    (c, n, convexity)
}

fn status_label(status: &EfficiencyStatus) -> String {
    match status {
        EfficiencyStatus::Infeasible => "infeasible".into(),
        EfficiencyStatus::Efficient => "efficient".into(),
        EfficiencyStatus::WeaklyEfficient { .. } => "weakly-efficient".into(),
        EfficiencyStatus::Inefficient => "inefficient".into(),
    }
}

fn is_unsupported(err: &Error) -> bool {
    matches!(err, Error::UnsupportedRegime(_) | Error::DimensionLimit { .. })
}

type RowOutcome = Result<(Vec<Cell>, i32), CliError>;

/// Per-unit, per-order scores with expansions and projections.
pub fn cmd_eval(config: &RunConfig, dataset: &Dataset) -> Result<(Report, i32), CliError> {
    let tech = build_technology(config, dataset)?;
    let fixed = resolve_direction(config, dataset)?;
    let d = dataset.dim();

    let mut columns = vec![
        "id".to_string(),
        "p".to_string(),
        "measure".to_string(),
        "score".to_string(),
        "status".to_string(),
    ];
    for k in 1..=d {
        columns.push(format!("delta_{k}"));
    }
    for k in 1..=d {
        columns.push(format!("proj_{k}"));
    }
    columns.push("note".to_string());

    let jobs: Vec<(usize, usize)> = (0..dataset.units.len())
        .flat_map(|u| (0..config.p_list.len()).map(move |pi| (u, pi)))
        .collect();

    let outcomes: Vec<RowOutcome> = jobs
        .par_iter()
        .map(|&(u, pi)| {
            let unit = &dataset.units[u];
            let p = config.p_list[pi];
            let g = unit_direction(config, &fixed, &unit.id, &unit.netput);
            let mut row = vec![
                Cell::Str(unit.id.clone()),
                Cell::Str(p.to_string()),
                Cell::Str(measure_name(p).to_string()),
            ];
            match evaluate_p(&tech, &unit.netput, &g, p) {
                Ok(result) => {
                    row.push(Cell::Ext(result.score));
                    row.push(Cell::Str(status_label(&result.status)));
                    push_vector(&mut row, result.delta_star.as_deref(), d);
                    push_vector(
                        &mut row,
                        result.projection.as_ref().map(|p| p.values()),
                        d,
                    );
                    row.push(Cell::Empty);
                    Ok((row, 0))
                }
                Err(err) if is_unsupported(&err) => {
                    row.push(Cell::Empty);
                    row.push(Cell::Str("unsupported".into()));
                    push_vector(&mut row, None, d);
                    push_vector(&mut row, None, d);
                    row.push(Cell::Str(err.to_string()));
                    Ok((row, EXIT_UNSUPPORTED))
                }
                Err(err) => Err(CliError::Core(err)),
            }
        })
        .collect();

    assemble(columns, outcomes)
}

/// Dual prices, gaps, and attainment per (unit, order).
pub fn cmd_dual(config: &RunConfig, dataset: &Dataset) -> Result<(Report, i32), CliError> {
    if !config.dual {
        return Err(CliError::Config("dual reporting is not enabled in this run".into()));
    }
    let tech = build_technology(config, dataset)?;
    let fixed = resolve_direction(config, dataset)?;
    let d = dataset.dim();

    let mut columns = vec![
        "id".to_string(),
        "p".to_string(),
        "criterion".to_string(),
        "normalization".to_string(),
        "score".to_string(),
        "dual_value".to_string(),
        "gap".to_string(),
        "attained".to_string(),
        "residual".to_string(),
    ];
    for k in 1..=d {
        columns.push(format!("price_{k}"));
    }
    columns.push("note".to_string());

    let jobs: Vec<(usize, usize)> = (0..dataset.units.len())
        .flat_map(|u| (0..config.p_list.len()).map(move |pi| (u, pi)))
        .collect();

    let outcomes: Vec<RowOutcome> = jobs
        .par_iter()
        .map(|&(u, pi)| {
            let unit = &dataset.units[u];
            let p = config.p_list[pi];
            let g = unit_direction(config, &fixed, &unit.id, &unit.netput);
            let (criterion, normalization, _) = rule_labels(p);
            let mut row = vec![
                Cell::Str(unit.id.clone()),
                Cell::Str(p.to_string()),
                Cell::Str(criterion.to_string()),
                Cell::Str(normalization.to_string()),
            ];
            let primal = match evaluate_p(&tech, &unit.netput, &g, p) {
                Ok(r) => Some(r.score),
                Err(_) => None,
            };
            match dual_value(&tech, &unit.netput, &g, p) {
                Ok(result) => {
                    row.push(primal.map_or(Cell::Empty, Cell::Ext));
                    row.push(Cell::Ext(result.dual_value));
                    row.push(Cell::Num(result.gap));
                    row.push(Cell::Bool(result.attained));
                    row.push(Cell::Num(result.normalization_residual));
                    push_vector(&mut row, Some(&result.prices), d);
                    row.push(Cell::Empty);
                    Ok((row, 0))
                }
                Err(Error::ConvexityRequired(_)) => {
                    row.push(primal.map_or(Cell::Empty, Cell::Ext));
                    for _ in 0..4 {
                        row.push(Cell::Empty);
                    }
                    push_vector(&mut row, None, d);
                    row.push(Cell::Str("convexity-required".into()));
                    Ok((row, 0))
                }
                Err(err) if is_unsupported(&err) => {
                    row.push(primal.map_or(Cell::Empty, Cell::Ext));
                    for _ in 0..4 {
                        row.push(Cell::Empty);
                    }
                    push_vector(&mut row, None, d);
                    row.push(Cell::Str(err.to_string()));
                    Ok((row, EXIT_UNSUPPORTED))
                }
                Err(Error::InfeasiblePoint) => {
                    row.push(Cell::Ext(netput_eff_core::ExtReal::NegInf));
                    for _ in 0..4 {
                        row.push(Cell::Empty);
                    }
                    push_vector(&mut row, None, d);
                    row.push(Cell::Str("infeasible".into()));
                    Ok((row, 0))
                }
                Err(err) => Err(CliError::Core(err)),
            }
        })
        .collect();

    assemble(columns, outcomes)
}

/// Efficiency status per unit, cross-checked against the score-zero
/// equivalences.
pub fn cmd_classify(config: &RunConfig, dataset: &Dataset) -> Result<(Report, i32), CliError> {
    let tech = build_technology(config, dataset)?;
    let fixed = resolve_direction(config, dataset)?;

    let columns = vec![
        "id".to_string(),
        "status".to_string(),
        "improvable".to_string(),
        "score_directional".to_string(),
        "score_mean".to_string(),
        "consistent".to_string(),
    ];

    let outcomes: Vec<RowOutcome> = dataset
        .units
        .par_iter()
        .map(|unit| {
            let g = unit_direction(config, &fixed, &unit.id, &unit.netput);
            let support = g.support();
            let status = if support.is_empty() {
                EfficiencyStatus::Infeasible
            } else {
                tech.classify(&unit.netput, &support).map_err(CliError::Core)?
            };
            let joint = evaluate_p(&tech, &unit.netput, &g, PParameter::NegInfinity)
                .map_err(CliError::Core)?;
            let mean = evaluate_p(&tech, &unit.netput, &g, PParameter::Finite(1.0))
                .map_err(CliError::Core)?;
            let consistent = scores_match_status(&status, &joint, &mean, config.tolerance);
            let improvable = match &status {
                EfficiencyStatus::WeaklyEfficient { improvable } => improvable
                    .iter()
                    .map(|k| (k + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                _ => String::new(),
            };
            let row = vec![
                Cell::Str(unit.id.clone()),
                Cell::Str(status_label(&status)),
                Cell::Str(improvable),
                Cell::Ext(joint.score),
                Cell::Ext(mean.score),
                Cell::Bool(consistent),
            ];
            Ok((row, 0))
        })
        .collect();

    assemble(columns, outcomes)
}

fn scores_match_status(
    status: &EfficiencyStatus,
    joint: &EvalResult,
    mean: &EvalResult,
    tol: f64,
) -> bool {
    let joint_zero = matches!(joint.score, ExtReal::Finite(v) if v.abs() <= tol);
    let mean_zero = matches!(mean.score, ExtReal::Finite(v) if v.abs() <= tol);
    match status {
        EfficiencyStatus::Infeasible => joint.score.is_neg_inf() || joint.score.is_pos_inf(),
        EfficiencyStatus::Efficient => joint_zero && mean_zero,
        EfficiencyStatus::WeaklyEfficient { .. } => joint_zero && !mean_zero,
        EfficiencyStatus::Inefficient => !joint_zero && !mean_zero,
    }
}

/// Hidden debugging command: certified grid bounds per unit.
pub fn cmd_oracle(
    config: &RunConfig,
    dataset: &Dataset,
    resolution: usize,
) -> Result<(Report, i32), CliError> {
    let tech = build_technology(config, dataset)?;
    let fixed = resolve_direction(config, dataset)?;
    let d = dataset.dim();
    let p = config.p_list.first().copied().unwrap_or(PParameter::Finite(1.0));

    let mut columns = vec![
        "id".to_string(),
        "p".to_string(),
        "lower".to_string(),
        "upper".to_string(),
    ];
    for k in 1..=d {
        columns.push(format!("delta_{k}"));
    }

    let outcomes: Vec<RowOutcome> = dataset
        .units
        .par_iter()
        .map(|unit| {
            let g = unit_direction(config, &fixed, &unit.id, &unit.netput);
            let support = g.support();
            let spec = UtilitySpec::p_mean_directional(
                p,
                Direction::unit(support.len().max(1)),
                true,
            )
            .map_err(CliError::Core)?;
            let grid = match GridSpec::for_instance(&tech, &unit.netput, &g, resolution) {
                Ok(grid) => grid,
                Err(Error::InfeasiblePoint) => {
                    let mut row = vec![
                        Cell::Str(unit.id.clone()),
                        Cell::Str(p.to_string()),
                        Cell::Ext(netput_eff_core::ExtReal::NegInf),
                        Cell::Empty,
                    ];
                    push_vector(&mut row, None, d);
                    return Ok((row, 0));
                }
                Err(err) => return Err(CliError::Core(err)),
            };
            let result =
                grid_search(&tech, &unit.netput, &g, &spec, &grid).map_err(CliError::Core)?;
            let mut row = vec![
                Cell::Str(unit.id.clone()),
                Cell::Str(p.to_string()),
                Cell::Ext(result.lower),
                result.upper.map_or(Cell::Empty, Cell::Num),
            ];
            let mut delta = vec![0.0; d];
            for (slot, &k) in support.iter().enumerate() {
                if slot < result.argmax.len() {
                    delta[k] = result.argmax[slot];
                }
            }
            push_vector(&mut row, Some(&delta), d);
            Ok((row, 0))
        })
        .collect();

    assemble(columns, outcomes)
}

fn push_vector(row: &mut Vec<Cell>, values: Option<&[f64]>, d: usize) {
    match values {
        Some(vs) => {
            for k in 0..d {
                row.push(vs.get(k).map_or(Cell::Empty, |v| Cell::Num(*v)));
            }
        }
        None => {
            for _ in 0..d {
                row.push(Cell::Empty);
            }
        }
    }
}

fn assemble(columns: Vec<String>, outcomes: Vec<RowOutcome>) -> Result<(Report, i32), CliError> {
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut exit = 0;
    for outcome in outcomes {
        let (row, code) = outcome?;
        exit = exit.max(code);
        rows.push(row);
    }
    Ok((Report { columns, rows }, exit))
}
