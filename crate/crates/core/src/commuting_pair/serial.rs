//! Versioned, human-readable JSON record of a pair.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chain::{CompositionChain, Step};
use super::pair::{CommutingPair, PairMeta, Period};
use crate::circle_map::{CircleMapLift, FamilyRegistry, FamilySpec, ParamValue};
use crate::error::{LabError, Result};
use crate::numerics::Scalar;

/// Format tag written into every record.
pub const PAIR_FORMAT: &str = "renorm-pair/1";

/// One lift referenced by the chains.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapRecord {
    /// Family identifier.
    pub family: String,
    /// Fixed parameters.
    pub params: BTreeMap<String, String>,
    /// Translation parameter.
    pub omega: String,
}

/// One chain step.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum StepRecord {
    /// Iterate of map `map` (index into the map table).
    Iterate {
        /// Map index.
        map: usize,
        /// Number of applications.
        count: u64,
    },
    /// Integer translation.
    Translate(i64),
    /// Affine step.
    Affine {
        /// Slope.
        alpha: String,
        /// Offset.
        beta: String,
    },
    /// Inverse affine step.
    AffineInv {
        /// Slope.
        alpha: String,
        /// Offset.
        beta: String,
    },
    /// Mirror `x ↦ −x`.
    Mirror,
}

/// Serialized pair.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairRecord {
    /// Format tag.
    pub format: String,
    /// Working precision in bits.
    pub precision: u32,
    /// Criticality index `d`.
    pub criticality: Option<u32>,
    /// Extraction level, if any.
    pub level: Option<usize>,
    /// Digit prefix of the source map.
    pub digits: Vec<u64>,
    /// Lifts referenced by the chains.
    pub maps: Vec<MapRecord>,
    /// Steps of `η`.
    pub eta: Vec<StepRecord>,
    /// Steps of `ξ`.
    pub xi: Vec<StepRecord>,
    /// Cached period, if computed.
    pub period: Option<u64>,
}

fn chain_record(chain: &CompositionChain, maps: &mut Vec<Arc<CircleMapLift>>) -> Vec<StepRecord> {
    chain
        .steps()
        .iter()
        .map(|s| match s {
            Step::Iterate { map, count } => {
                let idx = match maps.iter().position(|m| Arc::ptr_eq(m, map) || m.same_as(map)) {
                    Some(i) => i,
                    None => {
                        maps.push(map.clone());
                        maps.len() - 1
                    }
                };
                StepRecord::Iterate { map: idx, count: *count }
            }
            Step::Translate(m) => StepRecord::Translate(*m),
            Step::Affine { alpha, beta } => {
                StepRecord::Affine { alpha: alpha.to_decimal_string(), beta: beta.to_decimal_string() }
            }
            Step::AffineInv { alpha, beta } => {
                StepRecord::AffineInv { alpha: alpha.to_decimal_string(), beta: beta.to_decimal_string() }
            }
            Step::Mirror => StepRecord::Mirror,
        })
        .collect()
}

/// Builds the record of a pair.
pub fn pair_to_record(pair: &CommutingPair) -> PairRecord {
    let mut maps = Vec::new();
    let eta = chain_record(pair.eta(), &mut maps);
    let xi = chain_record(pair.xi(), &mut maps);
    let period = match pair.cached_period() {
        Some(Period::Finite(a)) => Some(a),
        _ => None,
    };
    PairRecord {
        format: PAIR_FORMAT.to_string(),
        precision: pair.prec(),
        criticality: pair.criticality(),
        level: pair.meta().level,
        digits: pair.meta().digits.clone(),
        maps: maps
            .iter()
            .map(|m| MapRecord {
                family: m.family().id().to_string(),
                params: m.family().params(),
                omega: m.omega().to_decimal_string(),
            })
            .collect(),
        eta,
        xi,
        period,
    }
}

/// Rebuilds a pair from a record, resolving families through `registry`.
pub fn pair_from_record(rec: &PairRecord, registry: &FamilyRegistry) -> Result<CommutingPair> {
    if rec.format != PAIR_FORMAT {
        return Err(LabError::Config(format!("unsupported pair format {:?}", rec.format)));
    }
    let prec = rec.precision;
    let maps: Vec<Arc<CircleMapLift>> = rec
        .maps
        .iter()
        .map(|m| {
            let spec = FamilySpec {
                id: m.family.clone(),
                params: m.params.iter().map(|(k, v)| (k.clone(), ParamValue::Text(v.clone()))).collect(),
            };
            let fam = registry.build(&spec, prec)?;
            Ok(Arc::new(CircleMapLift::new(fam, Scalar::parse(&m.omega, prec)?)))
        })
        .collect::<Result<_>>()?;
    let build = |steps: &[StepRecord]| -> Result<CompositionChain> {
        let zero = Scalar::zero(prec);
        let mut c = CompositionChain::identity(zero.clone(), zero);
        for s in steps {
            c.push(match s {
                StepRecord::Iterate { map, count } => Step::Iterate {
                    map: maps
                        .get(*map)
                        .cloned()
                        .ok_or_else(|| LabError::Config(format!("map index {map} out of range")))?,
                    count: *count,
                },
                StepRecord::Translate(m) => Step::Translate(*m),
                StepRecord::Affine { alpha, beta } => {
                    Step::Affine { alpha: Scalar::parse(alpha, prec)?, beta: Scalar::parse(beta, prec)? }
                }
                StepRecord::AffineInv { alpha, beta } => {
                    Step::AffineInv { alpha: Scalar::parse(alpha, prec)?, beta: Scalar::parse(beta, prec)? }
                }
                StepRecord::Mirror => Step::Mirror,
            });
        }
        Ok(c)
    };
    let meta = PairMeta { level: rec.level, digits: rec.digits.clone() };
    Ok(CommutingPair::from_chains(build(&rec.eta)?, build(&rec.xi)?, rec.criticality, meta))
}

/// Serializes a pair to pretty JSON.
pub fn pair_to_json(pair: &CommutingPair) -> Result<String> {
    serde_json::to_string_pretty(&pair_to_record(pair)).map_err(|e| LabError::Io(e.to_string()))
}

/// Parses a pair from JSON with the built-in families.
pub fn pair_from_json(text: &str) -> Result<CommutingPair> {
    let rec: PairRecord = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
    pair_from_record(&rec, &FamilyRegistry::with_builtins())
}
