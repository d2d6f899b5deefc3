//! Dataset ingestion.
//!
//! Input CSV stores nonnegative input quantities with the header
//! `id,x1..xm,y1..yn`; the loader negates inputs into the signed netput
//! convention. Halfspace technologies come from a side file with one
//! `a1 a2 ... ad <= b` constraint per line.

use std::fs::File;
use std::path::Path;

use netput_eff_core::{Direction, Halfspace, NetputVector, Technology};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] netput_eff_core::Error),
}

pub struct Unit {
    pub id: String,
    pub netput: NetputVector,
}

pub struct Dataset {
    pub units: Vec<Unit>,
    pub num_inputs: usize,
    pub num_outputs: usize,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.num_inputs + self.num_outputs
    }
}

pub fn load_dataset(path: &Path, num_inputs: usize, num_outputs: usize) -> Result<Dataset, CliError> {
    let spath = path.display().to_string();
    let file = File::open(path).map_err(|source| CliError::Io { path: spath.clone(), source })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);

    let d = num_inputs + num_outputs;
    if d == 0 {
        return Err(CliError::Config("declare at least one input or output column".into()));
    }

    // Validate the header shape: id, x1..xm, y1..yn.
    {
        let headers = reader
            .headers()
            .map_err(|e| CliError::Parse { path: spath.clone(), line: 1, message: e.to_string() })?;
        if headers.len() != d + 1 {
            return Err(CliError::Parse {
                path: spath.clone(),
                line: 1,
                message: format!("expected {} columns (id + {d} quantities), found {}", d + 1, headers.len()),
            });
        }
        let mut expected = vec!["id".to_string()];
        for i in 1..=num_inputs {
            expected.push(format!("x{i}"));
        }
        for j in 1..=num_outputs {
            expected.push(format!("y{j}"));
        }
        for (got, want) in headers.iter().zip(&expected) {
            if !got.eq_ignore_ascii_case(want) {
                return Err(CliError::Parse {
                    path: spath.clone(),
                    line: 1,
                    message: format!("unexpected header column {got:?}; expected {want:?}"),
                });
            }
        }
    }

    let mut units = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header occupies line 1
        let record =
            record.map_err(|e| CliError::Parse { path: spath.clone(), line, message: e.to_string() })?;
        if record.len() != d + 1 {
            return Err(CliError::Parse {
                path: spath.clone(),
                line,
                message: format!("expected {} fields, found {}", d + 1, record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(CliError::Parse { path: spath.clone(), line, message: "empty unit id".into() });
        }
        if !seen.insert(id.clone()) {
            return Err(CliError::Parse {
                path: spath.clone(),
                line,
                message: format!("duplicate unit id {id:?}"),
            });
        }
        let mut values = Vec::with_capacity(d);
        for (col, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| CliError::Parse {
                path: spath.clone(),
                line,
                message: format!("invalid number {field:?} in column {}", col + 2),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(CliError::Parse {
                    path: spath.clone(),
                    line,
                    message: format!("quantities must be nonnegative and finite, got {v}"),
                });
            }
            // Inputs enter the netput with a negative sign.
            values.push(if col < num_inputs { -v } else { v });
        }
        let netput = NetputVector::new(values, num_inputs)?;
        units.push(Unit { id, netput });
    }
    if units.is_empty() {
        return Err(CliError::Parse { path: spath, line: 2, message: "dataset has no rows".into() });
    }
    Ok(Dataset { units, num_inputs, num_outputs })
}

/// One constraint per line: `a1 a2 ... ad <= b`.
pub fn load_hrep(path: &Path, dim: usize) -> Result<Technology, CliError> {
    let spath = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: spath.clone(), source })?;
    let mut constraints = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((lhs, rhs)) = trimmed.split_once("<=") else {
            return Err(CliError::Parse {
                path: spath.clone(),
                line,
                message: "constraint must contain `<=`".into(),
            });
        };
        let normal: Result<Vec<f64>, _> =
            lhs.split_whitespace().map(|t| t.parse::<f64>()).collect();
        let normal = normal.map_err(|_| CliError::Parse {
            path: spath.clone(),
            line,
            message: "invalid coefficient".into(),
        })?;
        if normal.len() != dim {
            return Err(CliError::Parse {
                path: spath.clone(),
                line,
                message: format!("expected {dim} coefficients, found {}", normal.len()),
            });
        }
        let rhs: f64 = rhs.trim().parse().map_err(|_| CliError::Parse {
            path: spath.clone(),
            line,
            message: "invalid right-hand side".into(),
        })?;
        constraints.push(Halfspace { normal, rhs });
    }
    Ok(Technology::h_rep(constraints, dim)?)
}

/// A custom direction file: one line of `d` whitespace-separated weights.
pub fn load_direction(path: &Path, dim: usize) -> Result<Direction, CliError> {
    let spath = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: spath.clone(), source })?;
    let values: Result<Vec<f64>, _> = text.split_whitespace().map(|t| t.parse::<f64>()).collect();
    let values = values.map_err(|_| CliError::Parse {
        path: spath.clone(),
        line: 1,
        message: "invalid direction weight".into(),
    })?;
    if values.len() != dim {
        return Err(CliError::Parse {
            path: spath,
            line: 1,
            message: format!("expected {dim} weights, found {}", values.len()),
        });
    }
    Ok(Direction::new(values)?)
}
