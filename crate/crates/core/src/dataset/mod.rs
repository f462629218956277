//! Typed columnar relations, CSV ingestion, preparation passes and the
//! synthetic taxpayer generator.

mod generator;
mod io;
mod prepare;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generator::{
    case_study_patterns, contribuyentes_schema, generate_contribuyentes, generate_contribuyentes_labeled, Condition,
    ConditionTest, PlantedPattern,
};
pub use io::{load_csv, read_schema_json, schema_to_json, write_csv};
pub use prepare::{
    append_attribute, discretize, min_max_normalize, prepare, BinMethod, Discretized, ImputePolicy, ScalerParams,
};

/// Column kind. Identifier and text columns are carried through every
/// operation but never mined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrKind {
    Continuous,
    Categorical(Vec<String>),
    Identifier,
    Text,
}

impl AttrKind {
    pub fn name(&self) -> &'static str {
        match self {
            AttrKind::Continuous => "continuous",
            AttrKind::Categorical(_) => "categorical",
            AttrKind::Identifier => "identifier",
            AttrKind::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAttribute", into = "RawAttribute")]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttrKind,
    pub nullable: bool,
}

impl AttributeSchema {
    pub fn continuous(name: impl Into<String>) -> Self {
        Self::with_kind(name, AttrKind::Continuous)
    }

    pub fn categorical<S: Into<String>>(name: impl Into<String>, levels: impl IntoIterator<Item = S>) -> Self {
        let levels = levels.into_iter().map(Into::into).collect();
        Self::with_kind(name, AttrKind::Categorical(levels))
    }

    pub fn identifier(name: impl Into<String>) -> Self {
        Self::with_kind(name, AttrKind::Identifier)
    }

    pub fn text(name: impl Into<String>) -> Self {
        Self::with_kind(name, AttrKind::Text)
    }

    fn with_kind(name: impl Into<String>, kind: AttrKind) -> Self {
        AttributeSchema {
            name: name.into(),
            kind,
            nullable: false,
        }
    }

    pub fn nullable(mut self, nullable: bool) -> Self {
        self.nullable = nullable;
        self
    }

    pub fn is_mining_relevant(&self) -> bool {
        matches!(self.kind, AttrKind::Continuous | AttrKind::Categorical(_))
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, AttrKind::Continuous)
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.kind {
            AttrKind::Categorical(levels) => Some(levels),
            _ => None,
        }
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels()?.iter().position(|l| l == label)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Schema("empty attribute name".into()));
        }
        if let AttrKind::Categorical(levels) = &self.kind {
            if levels.is_empty() {
                return Err(Error::Schema(format!("{}: empty level list", self.name)));
            }
            let mut seen = HashSet::new();
            for level in levels {
                if !seen.insert(level.as_str()) {
                    return Err(Error::Schema(format!("{}: duplicate level {level:?}", self.name)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawAttribute {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<String>>,
    #[serde(default)]
    nullable: bool,
}

impl TryFrom<RawAttribute> for AttributeSchema {
    type Error = Error;

    fn try_from(raw: RawAttribute) -> Result<Self> {
        let kind = match (raw.kind.as_str(), raw.levels) {
            ("continuous", None) => AttrKind::Continuous,
            ("categorical", Some(levels)) => AttrKind::Categorical(levels),
            ("categorical", None) => return Err(Error::Schema(format!("{}: categorical without levels", raw.name))),
            ("identifier", None) => AttrKind::Identifier,
            ("text", None) => AttrKind::Text,
            (other, Some(_)) if other != "categorical" => {
                return Err(Error::Schema(format!("{}: levels given for {other}", raw.name)))
            }
            (other, _) => return Err(Error::Schema(format!("{}: unknown kind {other:?}", raw.name))),
        };
        let attr = AttributeSchema {
            name: raw.name,
            kind,
            nullable: raw.nullable,
        };
        attr.validate()?;
        Ok(attr)
    }
}

impl From<AttributeSchema> for RawAttribute {
    fn from(attr: AttributeSchema) -> Self {
        let kind = attr.kind.name().to_string();
        let levels = match attr.kind {
            AttrKind::Categorical(levels) => Some(levels),
            _ => None,
        };
        RawAttribute {
            name: attr.name,
            kind,
            levels,
            nullable: attr.nullable,
        }
    }
}

/// A single cell. Categories are stored as indices into the column's level list.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Number(f64),
    Category(usize),
    Text(String),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_category(&self) -> Option<usize> {
        match self {
            Value::Category(c) => Some(*c),
            _ => None,
        }
    }
}

/// Immutable table: ordered schema plus ordered rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    schema: Vec<AttributeSchema>,
    records: Vec<Vec<Value>>,
}

pub(crate) fn validate_schema(schema: &[AttributeSchema]) -> Result<()> {
    let mut names = HashSet::new();
    for attr in schema {
        attr.validate()?;
        if !names.insert(attr.name.as_str()) {
            return Err(Error::Schema(format!("duplicate attribute name {}", attr.name)));
        }
    }
    Ok(())
}

fn check_cell(attr: &AttributeSchema, value: &Value, row: usize) -> Result<()> {
    let bad = |message: String| Error::Parse {
        row,
        column: attr.name.clone(),
        message,
    };
    match (value, &attr.kind) {
        (Value::Null, _) if attr.nullable => Ok(()),
        (Value::Null, _) => Err(bad("null in non-nullable column".into())),
        (Value::Number(v), AttrKind::Continuous) if v.is_finite() => Ok(()),
        (Value::Number(v), AttrKind::Continuous) => Err(bad(format!("non-finite number {v}"))),
        (Value::Category(c), AttrKind::Categorical(levels)) if *c < levels.len() => Ok(()),
        (Value::Category(c), AttrKind::Categorical(_)) => Err(bad(format!("category index {c} out of range"))),
        (Value::Text(_), AttrKind::Identifier | AttrKind::Text) => Ok(()),
        (_, kind) => Err(bad(format!("value does not conform to {} kind", kind.name()))),
    }
}

impl Relation {
    pub fn new(schema: Vec<AttributeSchema>, records: Vec<Vec<Value>>) -> Result<Self> {
        validate_schema(&schema)?;
        for (r, row) in records.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::Parse {
                    row: r + 1,
                    column: "*".into(),
                    message: format!("expected {} fields, found {}", schema.len(), row.len()),
                });
            }
            for (attr, value) in schema.iter().zip(row) {
                check_cell(attr, value, r + 1)?;
            }
        }
        Ok(Relation { schema, records })
    }

    pub fn empty(schema: Vec<AttributeSchema>) -> Result<Self> {
        Self::new(schema, Vec::new())
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn records(&self) -> &[Vec<Value>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.schema.iter().map(|a| a.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn attribute(&self, name: &str) -> Result<&AttributeSchema> {
        Ok(&self.schema[self.index_of(name)?])
    }

    /// Null-free numeric column.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.index_of(name)?;
        let attr = &self.schema[col];
        if !attr.is_continuous() {
            return Err(Error::KindMismatch {
                attr: name.to_string(),
                expected: "continuous",
                found: attr.kind.name(),
            });
        }
        self.records
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row[col].as_number().ok_or_else(|| Error::NullValue {
                    attr: name.to_string(),
                    row: r + 1,
                })
            })
            .collect()
    }

    /// Null-free category-index column.
    pub fn category_column(&self, name: &str) -> Result<Vec<usize>> {
        let col = self.index_of(name)?;
        let attr = &self.schema[col];
        if attr.levels().is_none() {
            return Err(Error::KindMismatch {
                attr: name.to_string(),
                expected: "categorical",
                found: attr.kind.name(),
            });
        }
        self.records
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row[col].as_category().ok_or_else(|| Error::NullValue {
                    attr: name.to_string(),
                    row: r + 1,
                })
            })
            .collect()
    }

    /// Text rendering of a cell as written to CSV; nulls render empty.
    pub fn render(&self, row: usize, col: usize) -> String {
        match &self.records[row][col] {
            Value::Null => String::new(),
            Value::Number(v) => crate::num::format_sig12(*v),
            Value::Category(c) => self.schema[col].levels().map_or_else(String::new, |l| l[*c].clone()),
            Value::Text(t) => t.clone(),
        }
    }

    pub(crate) fn into_parts(self) -> (Vec<AttributeSchema>, Vec<Vec<Value>>) {
        (self.schema, self.records)
    }

    pub(crate) fn from_parts_unchecked(schema: Vec<AttributeSchema>, records: Vec<Vec<Value>>) -> Self {
        debug_assert!(Relation::new(schema.clone(), records.clone()).is_ok());
        Relation { schema, records }
    }
}
