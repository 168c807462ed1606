use serde::{Deserialize, Serialize};

use super::{BinaryFuzzyMeasure, FuzzyMeasure, MeasureError, RealFuzzyMeasure, SourceSet};

/// Either kind of measure, as loaded from or written to JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Binary(BinaryFuzzyMeasure),
    Real(RealFuzzyMeasure),
}

impl Measure {
    pub fn as_binary(&self) -> Option<&BinaryFuzzyMeasure> {
        match self {
            Measure::Binary(m) => Some(m),
            Measure::Real(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Measure::Binary(_) => "binary",
            Measure::Real(_) => "real",
        }
    }

    /// Full value table form.
    pub fn to_doc(&self) -> MeasureDoc {
        match self {
            Measure::Binary(m) => MeasureDoc::Full {
                source_count: m.source_count(),
                values: MeasureValues::Bits(m.bits().map(u8::from).collect()),
            },
            Measure::Real(m) => MeasureDoc::Full {
                source_count: m.source_count(),
                values: MeasureValues::Reals(m.values().to_vec()),
            },
        }
    }

    /// Antichain short form; `None` for real-valued measures.
    pub fn to_antichain_doc(&self) -> Option<MeasureDoc> {
        let m = self.as_binary()?;
        Some(MeasureDoc::Antichain {
            source_count: m.source_count(),
            minimal_winning: m
                .minimal_winning_coalitions()
                .iter()
                .map(SourceSet::to_vec)
                .collect(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, MeasureJsonError> {
        let doc: MeasureDoc = serde_json::from_str(s)?;
        Ok(Measure::try_from(doc)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("measure documents always serialize")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MeasureJsonError {
    #[error("malformed measure JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

impl FuzzyMeasure for Measure {
    fn source_count(&self) -> usize {
        match self {
            Measure::Binary(m) => m.source_count(),
            Measure::Real(m) => m.source_count(),
        }
    }

    fn value(&self, mask: usize) -> f64 {
        match self {
            Measure::Binary(m) => m.value(mask),
            Measure::Real(m) => m.value(mask),
        }
    }

    fn integrate_chain(&self, sorted: &[f64], chain: &[u32]) -> f64 {
        match self {
            Measure::Binary(m) => m.integrate_chain(sorted, chain),
            Measure::Real(m) => m.integrate_chain(sorted, chain),
        }
    }
}

impl From<BinaryFuzzyMeasure> for Measure {
    fn from(m: BinaryFuzzyMeasure) -> Self {
        Measure::Binary(m)
    }
}

impl From<RealFuzzyMeasure> for Measure {
    fn from(m: RealFuzzyMeasure) -> Self {
        Measure::Real(m)
    }
}

/// JSON layout of a measure.
///
/// Full form: `{"source_count": S, "values": [...]}` with one entry per mask
/// `0..2^S`. Integer 0/1 entries load as a binary measure, anything else as a
/// real one. Antichain form (binary only):
/// `{"source_count": S, "minimal_winning": [[0, 1], [0, 2]]}` with zero-based
/// source indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureDoc {
    Full {
        source_count: usize,
        values: MeasureValues,
    },
    Antichain {
        source_count: usize,
        minimal_winning: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureValues {
    Bits(Vec<u8>),
    Reals(Vec<f64>),
}

impl TryFrom<MeasureDoc> for Measure {
    type Error = MeasureError;

    fn try_from(doc: MeasureDoc) -> Result<Self, MeasureError> {
        match doc {
            MeasureDoc::Full {
                source_count,
                values: MeasureValues::Bits(bits),
            } if bits.iter().all(|&b| b <= 1) => {
                let bits: Vec<bool> = bits.iter().map(|&b| b == 1).collect();
                Ok(Measure::Binary(BinaryFuzzyMeasure::try_new(source_count, &bits)?))
            }
            MeasureDoc::Full {
                source_count,
                values: MeasureValues::Bits(bits),
            } => {
                let values = bits.into_iter().map(f64::from).collect();
                Ok(Measure::Real(RealFuzzyMeasure::try_new(source_count, values)?))
            }
            MeasureDoc::Full {
                source_count,
                values: MeasureValues::Reals(values),
            } => Ok(Measure::Real(RealFuzzyMeasure::try_new(source_count, values)?)),
            MeasureDoc::Antichain {
                source_count,
                minimal_winning,
            } => {
                let sets = minimal_winning
                    .iter()
                    .map(|c| SourceSet::from_sources(c, source_count))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Measure::Binary(BinaryFuzzyMeasure::from_minimal_winning(
                    source_count,
                    &sets,
                )?))
            }
        }
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = MeasureDoc::deserialize(deserializer)?;
        Measure::try_from(doc).map_err(serde::de::Error::custom)
    }
}
