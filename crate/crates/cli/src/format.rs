//! State file format: JSON documents with complex entries as [re, im] pairs.
//!
//! Four kinds are understood:
//!
//! ```text
//! {"kind": "pure",      "dims": [2,2,2], "amplitudes": [[re,im], ...]}
//! {"kind": "density",   "dims": [2,2,2], "matrix": [[[re,im], ...], ...]}
//! {"kind": "marginals", "dims": [2,2,2],
//!  "marginals": [{"subsystems": [0,1], "matrix": [[[re,im], ...], ...]}, ...]}
//! {"kind": "classical", "variables": 3, "probabilities": [p, ...]}
//! ```
//!
//! Writing uses 17 significant digits so that write -> read -> write is
//! byte-identical.

use serde_json::Value;

use qmargin_core::classical::JointDistribution;
use qmargin_core::matrix::{Complex64, ComplexMatrix};
use qmargin_core::maxent::MarginalSet;
use qmargin_core::state::{DensityMatrix, PureState};

use crate::json::{complex, Json};

/// Parsed content of a state file.
#[derive(Debug)]
pub enum StateFile {
    Pure(PureState),
    Density(DensityMatrix),
    Marginals(MarginalSet),
    Classical(JointDistribution),
}

/// Parse failure with enough location context to act on.
#[derive(Debug)]
pub struct ParseError(pub String);

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

pub fn parse_state_file(text: &str) -> Result<StateFile, ParseError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ParseError(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = match &value {
        Value::Object(map) => map,
        _ => return err("top level must be an object"),
    };
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => return err("missing string field \"kind\""),
    };
    match kind {
        "pure" => {
            let dims = parse_dims(obj.get("dims"))?;
            let amps = parse_complex_vector(obj.get("amplitudes"), "amplitudes")?;
            let state = PureState::new(dims, amps)
                .map_err(|e| ParseError(format!("invalid pure state: {e}")))?;
            Ok(StateFile::Pure(state))
        }
        "density" => {
            let dims = parse_dims(obj.get("dims"))?;
            let matrix = parse_complex_matrix(obj.get("matrix"), "matrix")?;
            let rho = DensityMatrix::new(dims, matrix)
                .map_err(|e| ParseError(format!("invalid density matrix: {e}")))?;
            Ok(StateFile::Density(rho))
        }
        "marginals" => {
            let dims = parse_dims(obj.get("dims"))?;
            let blocks = match obj.get("marginals") {
                Some(Value::Array(items)) => items,
                _ => return err("missing array field \"marginals\""),
            };
            let mut parts = Vec::with_capacity(blocks.len());
            for (i, block) in blocks.iter().enumerate() {
                let block = match block {
                    Value::Object(map) => map,
                    _ => return err(format!("marginals[{i}] must be an object")),
                };
                let subsystems = match block.get("subsystems") {
                    Some(Value::Array(items)) => items
                        .iter()
                        .map(|v| {
                            v.as_u64().map(|x| x as usize).ok_or_else(|| {
                                ParseError(format!("marginals[{i}].subsystems must be indices"))
                            })
                        })
                        .collect::<Result<Vec<usize>, ParseError>>()?,
                    _ => return err(format!("marginals[{i}] missing \"subsystems\"")),
                };
                let matrix =
                    parse_complex_matrix(block.get("matrix"), &format!("marginals[{i}].matrix"))?;
                let sub_dims: Vec<usize> = subsystems
                    .iter()
                    .map(|&s| dims.get(s).copied().unwrap_or(0))
                    .collect();
                let marginal = DensityMatrix::new(sub_dims, matrix).map_err(|e| {
                    ParseError(format!("marginals[{i}] is not a valid density matrix: {e}"))
                })?;
                parts.push((subsystems, marginal));
            }
            let set = MarginalSet::new(dims, parts)
                .map_err(|e| ParseError(format!("invalid marginal set: {e}")))?;
            Ok(StateFile::Marginals(set))
        }
        "classical" => {
            let n = match obj.get("variables").and_then(Value::as_u64) {
                Some(n) => n as usize,
                None => return err("missing integer field \"variables\""),
            };
            let probs = match obj.get("probabilities") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|v| {
                        v.as_f64()
                            .ok_or_else(|| ParseError("probabilities must be numbers".into()))
                    })
                    .collect::<Result<Vec<f64>, ParseError>>()?,
                _ => return err("missing array field \"probabilities\""),
            };
            let dist = JointDistribution::new(n, probs)
                .map_err(|e| ParseError(format!("invalid distribution: {e}")))?;
            Ok(StateFile::Classical(dist))
        }
        other => err(format!(
            "unknown kind {other:?}; expected pure, density, marginals, or classical"
        )),
    }
}

fn parse_dims(value: Option<&Value>) -> Result<Vec<usize>, ParseError> {
    match value {
        Some(Value::Array(items)) if !items.is_empty() => items
            .iter()
            .map(|v| {
                v.as_u64()
                    .filter(|&d| d >= 2)
                    .map(|d| d as usize)
                    .ok_or_else(|| ParseError("dims entries must be integers >= 2".into()))
            })
            .collect(),
        _ => err("missing array field \"dims\""),
    }
}

fn parse_complex(value: &Value, what: &str) -> Result<Complex64, ParseError> {
    match value {
        Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => err(format!("{what}: complex entries must be [re, im] numbers")),
            }
        }
        _ => err(format!("{what}: complex entries must be [re, im] pairs")),
    }
}

fn parse_complex_vector(value: Option<&Value>, what: &str) -> Result<Vec<Complex64>, ParseError> {
    match value {
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| parse_complex(v, what))
            .collect(),
        _ => err(format!("missing array field \"{what}\"")),
    }
}

fn parse_complex_matrix(value: Option<&Value>, what: &str) -> Result<ComplexMatrix, ParseError> {
    let rows = match value {
        Some(Value::Array(rows)) if !rows.is_empty() => rows,
        _ => return err(format!("missing array field \"{what}\"")),
    };
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = match row {
            Value::Array(entries) if entries.len() == n => entries,
            _ => {
                return err(format!(
                    "{what}: row {i} must be an array of {n} complex entries"
                ))
            }
        };
        for entry in row {
            data.push(parse_complex(entry, what)?);
        }
    }
    Ok(ComplexMatrix::new(n, n, data))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Json {
    Json::Array(
        (0..m.rows)
            .map(|i| {
                Json::Array(
                    (0..m.cols)
                        .map(|j| {
                            let z = m.get(i, j);
                            complex(z.re, z.im)
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn density_to_json(rho: &DensityMatrix) -> Json {
    Json::object(vec![
        ("kind", Json::Str("density".into())),
        (
            "dims",
            Json::Array(rho.dims().iter().map(|&d| Json::Int(d as i64)).collect()),
        ),
        ("matrix", matrix_to_json(rho.matrix())),
    ])
}

pub fn classical_to_json(p: &JointDistribution) -> Json {
    Json::object(vec![
        ("kind", Json::Str("classical".into())),
        ("variables", Json::Int(p.variables() as i64)),
        (
            "probabilities",
            Json::Array(p.probs().iter().map(|&x| Json::Float(x)).collect()),
        ),
    ])
}
