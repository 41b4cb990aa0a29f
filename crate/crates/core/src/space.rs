//! Hyperparameter spaces and configurations.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DimensionKind {
    Continuous { low: f64, high: f64, scale: Scale },
    Integer { low: f64, high: f64, scale: Scale },
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub kind: DimensionKind,
}

impl Dimension {
    pub fn continuous(name: impl Into<String>, low: f64, high: f64, scale: Scale) -> Self {
        Dimension { name: name.into(), kind: DimensionKind::Continuous { low, high, scale } }
    }

    pub fn integer(name: impl Into<String>, low: f64, high: f64, scale: Scale) -> Self {
        Dimension { name: name.into(), kind: DimensionKind::Integer { low, high, scale } }
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, levels: impl IntoIterator<Item = S>) -> Self {
        Dimension {
            name: name.into(),
            kind: DimensionKind::Categorical { levels: levels.into_iter().map(Into::into).collect() },
        }
    }

    pub fn is_numeric(&self) -> bool {
        !matches!(self.kind, DimensionKind::Categorical { .. })
    }

    /// `(low, high, scale)` for numeric dimensions.
    pub fn numeric_range(&self) -> Option<(f64, f64, Scale)> {
        match self.kind {
            DimensionKind::Continuous { low, high, scale } | DimensionKind::Integer { low, high, scale } => {
                Some((low, high, scale))
            }
            DimensionKind::Categorical { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            DimensionKind::Continuous { low, high, scale } | DimensionKind::Integer { low, high, scale } => {
                if !low.is_finite() || !high.is_finite() {
                    return Err(Error::NonFiniteBound(self.name.clone()));
                }
                if low >= high {
                    return Err(Error::InvertedBounds(self.name.clone()));
                }
                if *scale == Scale::Log2 && *low <= 0.0 {
                    return Err(Error::NonPositiveLogBound(self.name.clone()));
                }
                if matches!(self.kind, DimensionKind::Integer { .. }) && libm::ceil(*low) > libm::floor(*high) {
                    return Err(Error::InvertedBounds(self.name.clone()));
                }
                Ok(())
            }
            DimensionKind::Categorical { levels } => {
                let distinct: BTreeSet<&str> = levels.iter().map(String::as_str).collect();
                if distinct.len() < 2 || distinct.len() != levels.len() {
                    return Err(Error::TooFewLevels(self.name.clone()));
                }
                Ok(())
            }
        }
    }

    pub fn check_value(&self, value: &Value) -> Result<()> {
        let ok = match (&self.kind, value) {
            (DimensionKind::Continuous { low, high, .. }, Value::Number(x)) => x.is_finite() && low <= x && x <= high,
            (DimensionKind::Integer { low, high, .. }, Value::Number(x)) => {
                x.is_finite() && low <= x && x <= high && libm::trunc(*x) == *x
            }
            (DimensionKind::Categorical { levels }, Value::Level(l)) => levels.iter().any(|v| v == l),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidValue { name: self.name.clone(), value: value.to_string() })
        }
    }

    /// Position of a value on the unit interval (numeric) or its level index
    /// (categorical).
    pub(crate) fn encode(&self, value: &Value) -> Coord {
        match (&self.kind, value) {
            (DimensionKind::Categorical { levels }, Value::Level(l)) => {
                Coord::Level(levels.iter().position(|v| v == l).unwrap_or(usize::MAX))
            }
            (_, Value::Number(x)) => {
                let (low, high, scale) = self.numeric_range().expect("numeric dimension");
                let unit = match scale {
                    Scale::Linear => (x - low) / (high - low),
                    Scale::Log2 => (libm::log2(*x) - libm::log2(low)) / (libm::log2(high) - libm::log2(low)),
                };
                Coord::Unit(unit)
            }
            _ => Coord::Level(usize::MAX),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Coord {
    Unit(f64),
    Level(usize),
}

/// An ordered, validated list of dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparameterSpace {
    dimensions: Vec<Dimension>,
}

impl HyperparameterSpace {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = BTreeSet::new();
        for d in &dimensions {
            if !seen.insert(d.name.as_str()) {
                return Err(Error::DuplicateDimension(d.name.clone()));
            }
            d.validate()?;
        }
        Ok(HyperparameterSpace { dimensions })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn len(&self) -> usize {
        self.dimensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.is_empty()
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub fn validate(&self, values: &[Value]) -> Result<()> {
        if values.len() != self.dimensions.len() {
            return Err(Error::ArityMismatch { expected: self.dimensions.len(), got: values.len() });
        }
        self.dimensions.iter().zip(values).try_for_each(|(d, v)| d.check_value(v))
    }

    pub(crate) fn encode(&self, values: &[Value]) -> Vec<Coord> {
        self.dimensions.iter().zip(values).map(|(d, v)| d.encode(v)).collect()
    }
}

/// A single hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Level(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Level(_) => None,
        }
    }

    /// Total-order key used for exact-equality deduplication.
    pub(crate) fn key(&self) -> ValueKey {
        match self {
            // -0.0 and 0.0 compare equal, so they share a key.
            Value::Number(x) => ValueKey::Number(if *x == 0.0 { 0 } else { x.to_bits() }),
            Value::Level(l) => ValueKey::Level(l.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum ValueKey {
    Number(u64),
    Level(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::Level(l) => f.write_str(l),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Level(s.to_string())
    }
}

/// One point of a space, identified by its column index in a matrix or pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub id: usize,
    pub values: Vec<Value>,
}

impl Configuration {
    pub fn new(id: usize, values: Vec<Value>) -> Self {
        Configuration { id, values }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| format!("{v}")).collect();
        write!(f, "#{} [{}]", self.id, parts.join(", "))
    }
}
