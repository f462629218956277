use std::io::{Read, Write};

use super::{validate_schema, AttrKind, AttributeSchema, Relation, Value};
use crate::error::{Error, Result};

fn is_null_token(field: &str) -> bool {
    field.is_empty() || field == "?"
}

fn parse_field(attr: &AttributeSchema, field: &str, row: usize) -> Result<Value> {
    if is_null_token(field) {
        return Ok(Value::Null);
    }
    let err = |message: String| Error::Parse {
        row,
        column: attr.name.clone(),
        message,
    };
    match &attr.kind {
        AttrKind::Continuous => {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(format!("non-numeric value {field:?}")))?;
            if !v.is_finite() {
                return Err(err(format!("non-finite value {field:?}")));
            }
            Ok(Value::Number(v))
        }
        AttrKind::Categorical(levels) => levels
            .iter()
            .position(|l| l == field)
            .map(Value::Category)
            .ok_or_else(|| err(format!("unknown label {field:?}"))),
        AttrKind::Identifier | AttrKind::Text => Ok(Value::Text(field.to_string())),
    }
}

/// Reads a comma-separated file with a mandatory header matching `schema`.
///
/// Empty fields and the literal `?` are nulls. Row numbers in errors count
/// data records from 1.
pub fn load_csv<R: Read>(source: R, schema: &[AttributeSchema]) -> Result<Relation> {
    validate_schema(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let expected: Vec<&str> = schema.iter().map(|a| a.name.as_str()).collect();
    if names != expected {
        return Err(Error::Schema(format!(
            "header {names:?} does not match schema {expected:?}"
        )));
    }
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        if rec.len() != schema.len() {
            return Err(Error::Parse {
                row,
                column: "*".into(),
                message: format!("expected {} fields, found {}", schema.len(), rec.len()),
            });
        }
        let values = schema
            .iter()
            .zip(rec.iter())
            .map(|(attr, field)| parse_field(attr, field, row))
            .collect::<Result<Vec<_>>>()?;
        records.push(values);
    }
    Relation::new(schema.to_vec(), records)
}

/// Writes `rel` as LF-terminated CSV; nulls become empty fields and numbers
/// use at most 12 significant digits.
pub fn write_csv<W: Write>(rel: &Relation, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(rel.names())?;
    for row in 0..rel.len() {
        writer.write_record((0..rel.arity()).map(|col| rel.render(row, col)))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_schema_json<R: Read>(source: R) -> Result<Vec<AttributeSchema>> {
    let schema: Vec<AttributeSchema> = serde_json::from_reader(source)?;
    validate_schema(&schema)?;
    Ok(schema)
}

pub fn schema_to_json(schema: &[AttributeSchema]) -> String {
    let value = serde_json::to_value(schema).expect("schema serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("schema serializes");
    text.push('\n');
    text
}
