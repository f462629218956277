use serde::{Deserialize, Serialize};

use super::{AttrKind, AttributeSchema, Relation, Value};
use crate::error::{Error, Result};
use crate::num::format_sig12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputePolicy {
    /// Drop every record holding a null in a mining-relevant column.
    DropRows,
    /// Mode for categorical columns, median for continuous ones.
    Impute,
}

/// Fills or removes nulls in mining-relevant columns. Identifier and text
/// columns are left untouched.
pub fn prepare(rel: &Relation, policy: ImputePolicy) -> Result<Relation> {
    let relevant: Vec<usize> = (0..rel.arity())
        .filter(|&c| rel.schema()[c].is_mining_relevant())
        .collect();
    let (schema, mut records) = rel.clone().into_parts();
    match policy {
        ImputePolicy::DropRows => {
            records.retain(|row| relevant.iter().all(|&c| !row[c].is_null()));
        }
        ImputePolicy::Impute => {
            for &c in &relevant {
                if records.iter().all(|row| !row[c].is_null()) {
                    continue;
                }
                let fill = match &schema[c].kind {
                    AttrKind::Continuous => {
                        let mut values: Vec<f64> = records.iter().filter_map(|row| row[c].as_number()).collect();
                        median(&mut values).map(Value::Number)
                    }
                    AttrKind::Categorical(levels) => {
                        let mut counts = vec![0usize; levels.len()];
                        for row in &records {
                            if let Some(k) = row[c].as_category() {
                                counts[k] += 1;
                            }
                        }
                        mode(&counts).map(Value::Category)
                    }
                    _ => unreachable!("only mining-relevant columns are imputed"),
                };
                let fill = fill.ok_or_else(|| Error::AllNull(schema[c].name.clone()))?;
                for row in records.iter_mut() {
                    if row[c].is_null() {
                        row[c] = fill.clone();
                    }
                }
            }
        }
    }
    Ok(Relation::from_parts_unchecked(schema, records))
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

// ties go to the earliest level
fn mode(counts: &[usize]) -> Option<usize> {
    let (best, &count) = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
    (count > 0).then_some(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinMethod {
    EqualWidth,
    EqualFrequency,
}

#[derive(Debug, Clone)]
pub struct Discretized {
    pub relation: Relation,
    /// Bin boundaries, lowest first; `edges.len() == labels.len() + 1`.
    pub edges: Vec<f64>,
    pub labels: Vec<String>,
}

/// Replaces a continuous attribute with interval labels. Intervals are
/// half-open except the last, which is closed.
pub fn discretize(rel: &Relation, attr: &str, k: usize, method: BinMethod) -> Result<Discretized> {
    let col = rel.index_of(attr)?;
    let schema_attr = &rel.schema()[col];
    if !schema_attr.is_continuous() {
        return Err(Error::KindMismatch {
            attr: attr.to_string(),
            expected: "continuous",
            found: schema_attr.kind.name(),
        });
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("bin count must be at least 2, got {k}")));
    }
    let mut values: Vec<f64> = rel.records().iter().filter_map(|r| r[col].as_number()).collect();
    if values.is_empty() {
        return Err(Error::AllNull(attr.to_string()));
    }
    values.sort_by(f64::total_cmp);
    let (lo, hi) = (values[0], values[values.len() - 1]);

    let mut cuts: Vec<f64> = Vec::new();
    if lo < hi {
        match method {
            BinMethod::EqualWidth => {
                let width = (hi - lo) / k as f64;
                cuts.extend((1..k).map(|i| lo + width * i as f64));
            }
            BinMethod::EqualFrequency => {
                let n = values.len();
                for i in 1..k {
                    let idx = i * n / k;
                    if idx == 0 || idx >= n || values[idx - 1] == values[idx] {
                        continue;
                    }
                    cuts.push((values[idx - 1] + values[idx]) / 2.0);
                }
            }
        }
        cuts.dedup();
    }
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts.iter().copied());
    edges.push(hi);

    let bins = edges.len() - 1;
    let labels: Vec<String> = (0..bins)
        .map(|b| {
            let close = if b + 1 == bins { ']' } else { ')' };
            format!("[{},{}{close}", format_sig12(edges[b]), format_sig12(edges[b + 1]))
        })
        .collect();

    let (mut schema, mut records) = rel.clone().into_parts();
    for row in records.iter_mut() {
        if let Some(x) = row[col].as_number() {
            let bin = cuts.iter().filter(|&&c| x >= c).count();
            row[col] = Value::Category(bin);
        }
    }
    schema[col] = AttributeSchema {
        name: schema[col].name.clone(),
        kind: AttrKind::Categorical(labels.clone()),
        nullable: schema[col].nullable,
    };
    Ok(Discretized {
        relation: Relation::new(schema, records)?,
        edges,
        labels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub attr: String,
    pub min: f64,
    pub max: f64,
}

/// Per-attribute ranges recorded by [`min_max_normalize`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub ranges: Vec<ScaleRange>,
}

impl ScalerParams {
    pub fn range(&self, attr: &str) -> Option<&ScaleRange> {
        self.ranges.iter().find(|r| r.attr == attr)
    }

    pub fn scale(&self, attr: &str, x: f64) -> Result<f64> {
        let r = self
            .range(attr)
            .ok_or_else(|| Error::UnknownAttribute(attr.to_string()))?;
        let span = r.max - r.min;
        Ok(if span > 0.0 { (x - r.min) / span } else { 0.0 })
    }

    pub fn unscale(&self, attr: &str, y: f64) -> Result<f64> {
        let r = self
            .range(attr)
            .ok_or_else(|| Error::UnknownAttribute(attr.to_string()))?;
        Ok(r.min + y * (r.max - r.min))
    }
}

/// Maps each listed attribute onto [0,1]; constant columns map to 0.
pub fn min_max_normalize(rel: &Relation, attrs: &[&str]) -> Result<(Relation, ScalerParams)> {
    let mut params = ScalerParams::default();
    let (schema, mut records) = rel.clone().into_parts();
    for &attr in attrs {
        let col = rel.index_of(attr)?;
        let values = rel.numeric_column(attr)?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (min, max) = if values.is_empty() { (0.0, 0.0) } else { (min, max) };
        let span = max - min;
        for (row, x) in records.iter_mut().zip(values) {
            row[col] = Value::Number(if span > 0.0 { (x - min) / span } else { 0.0 });
        }
        params.ranges.push(ScaleRange {
            attr: attr.to_string(),
            min,
            max,
        });
    }
    Ok((Relation::from_parts_unchecked(schema, records), params))
}

/// Appends a column at the end; existing cells are untouched.
pub fn append_attribute(rel: &Relation, attr: AttributeSchema, values: Vec<Value>) -> Result<Relation> {
    if values.len() != rel.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values supplied for {} records",
            values.len(),
            rel.len()
        )));
    }
    if rel.index_of(&attr.name).is_ok() {
        return Err(Error::Schema(format!("duplicate attribute name {}", attr.name)));
    }
    let (mut schema, mut records) = rel.clone().into_parts();
    schema.push(attr);
    for (row, v) in records.iter_mut().zip(values) {
        row.push(v);
    }
    Relation::new(schema, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: f64) -> Value {
        Value::Number(v)
    }

    fn cont_rel(values: &[Option<f64>]) -> Relation {
        let schema = vec![AttributeSchema::continuous("x").nullable(true)];
        let rows = values
            .iter()
            .map(|v| vec![v.map_or(Value::Null, Value::Number)])
            .collect();
        Relation::new(schema, rows).unwrap()
    }

    #[test]
    fn prepare_identity_without_nulls() {
        let rel = cont_rel(&[Some(1.0), Some(2.0)]);
        assert_eq!(prepare(&rel, ImputePolicy::Impute).unwrap(), rel);
        assert_eq!(prepare(&rel, ImputePolicy::DropRows).unwrap(), rel);
    }

    #[test]
    fn impute_uses_median() {
        let rel = cont_rel(&[Some(1.0), None, Some(3.0), Some(2.0)]);
        let out = prepare(&rel, ImputePolicy::Impute).unwrap();
        assert_eq!(out.records()[1][0], num(2.0));
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn impute_mode_ties_to_first_level() {
        let schema = vec![AttributeSchema::categorical("c", ["a", "b", "c"]).nullable(true)];
        let rows = vec![vec![Value::Category(2)], vec![Value::Category(1)], vec![Value::Null]];
        let out = prepare(&Relation::new(schema, rows).unwrap(), ImputePolicy::Impute).unwrap();
        assert_eq!(out.records()[2][0], Value::Category(1));
    }

    #[test]
    fn drop_rows_removes_fully_null_row() {
        let schema = vec![
            AttributeSchema::continuous("x").nullable(true),
            AttributeSchema::categorical("c", ["a", "b"]).nullable(true),
        ];
        let rows = vec![
            vec![num(1.0), Value::Category(0)],
            vec![Value::Null, Value::Null],
            vec![num(2.0), Value::Category(1)],
            vec![num(3.0), Value::Category(0)],
        ];
        let out = prepare(&Relation::new(schema, rows).unwrap(), ImputePolicy::DropRows).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out.records()[1][0], num(2.0));
    }

    #[test]
    fn all_null_column_cannot_be_imputed() {
        let rel = cont_rel(&[None, None]);
        assert!(matches!(prepare(&rel, ImputePolicy::Impute), Err(Error::AllNull(_))));
    }

    #[test]
    fn equal_width_edges() {
        let rel = cont_rel(&[Some(0.0), Some(1.0), Some(2.0), Some(3.0)]);
        let d = discretize(&rel, "x", 2, BinMethod::EqualWidth).unwrap();
        assert_eq!(d.labels, vec!["[0,1.5)", "[1.5,3]"]);
        let bins = d.relation.category_column("x").unwrap();
        assert_eq!(bins, vec![0, 0, 1, 1]);
    }

    #[test]
    fn constant_column_is_single_bin() {
        let rel = cont_rel(&[Some(5.0), Some(5.0), Some(5.0)]);
        let d = discretize(&rel, "x", 4, BinMethod::EqualWidth).unwrap();
        assert_eq!(d.labels, vec!["[5,5]"]);
        assert_eq!(d.relation.category_column("x").unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn equal_frequency_quartiles() {
        let values: Vec<Option<f64>> = (1..=8).map(|v| Some(v as f64)).collect();
        let d = discretize(&cont_rel(&values), "x", 4, BinMethod::EqualFrequency).unwrap();
        let bins = d.relation.category_column("x").unwrap();
        for b in 0..4 {
            assert_eq!(bins.iter().filter(|&&x| x == b).count(), 2);
        }
        assert_eq!(d.edges, vec![1.0, 2.5, 4.5, 6.5, 8.0]);
    }

    #[test]
    fn discretize_errors() {
        let rel = cont_rel(&[Some(1.0)]);
        assert!(discretize(&rel, "x", 1, BinMethod::EqualWidth).is_err());
        let schema = vec![AttributeSchema::categorical("c", ["a"])];
        let cat = Relation::new(schema, vec![vec![Value::Category(0)]]).unwrap();
        assert!(matches!(
            discretize(&cat, "c", 2, BinMethod::EqualWidth),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn normalize_years() {
        let rel = cont_rel(&[Some(1972.0), Some(1980.0), Some(1990.0)]);
        let (out, params) = min_max_normalize(&rel, &["x"]).unwrap();
        let col = out.numeric_column("x").unwrap();
        assert!((col[0] - 0.0).abs() < 1e-12);
        assert!((col[1] - 4.0 / 9.0).abs() < 1e-12);
        assert!((col[2] - 1.0).abs() < 1e-12);
        assert_eq!(params.range("x").unwrap().min, 1972.0);
        assert!((params.unscale("x", col[1]).unwrap() - 1980.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_degenerate_cases() {
        let (out, _) = min_max_normalize(&cont_rel(&[Some(0.0), Some(1.0), Some(1.0)]), &["x"]).unwrap();
        assert_eq!(out.numeric_column("x").unwrap(), vec![0.0, 1.0, 1.0]);
        let (out, _) = min_max_normalize(&cont_rel(&[Some(5.0); 3]), &["x"]).unwrap();
        assert_eq!(out.numeric_column("x").unwrap(), vec![0.0; 3]);
        assert!(matches!(
            min_max_normalize(&cont_rel(&[Some(1.0), None]), &["x"]),
            Err(Error::NullValue { .. })
        ));
    }

    #[test]
    fn append_checks() {
        let rel = cont_rel(&[Some(1.0), Some(2.0)]);
        let attr = AttributeSchema::categorical("CSOM", ["CSOM_11"]);
        let out = append_attribute(&rel, attr.clone(), vec![Value::Category(0); 2]).unwrap();
        assert_eq!(out.arity(), 2);
        assert_eq!(out.records()[1][0], rel.records()[1][0]);
        assert!(append_attribute(&rel, attr.clone(), vec![Value::Category(0)]).is_err());
        assert!(append_attribute(&rel, AttributeSchema::continuous("x"), vec![num(0.0); 2]).is_err());

        let empty = Relation::empty(vec![AttributeSchema::continuous("x")]).unwrap();
        let grown = append_attribute(&empty, attr, vec![]).unwrap();
        assert_eq!(grown.arity(), 2);
        assert_eq!(grown.len(), 0);
    }
}
