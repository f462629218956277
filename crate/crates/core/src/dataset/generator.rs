//! Seeded generator for synthetic "contribuyentes" (taxpayer) relations.
//!
//! Randomness comes from `ChaCha8Rng` (rand_chacha 0.3) seeded with
//! `seed_from_u64`, so a given `(seed, n, patterns)` triple yields the same
//! relation on every platform.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AttrKind, AttributeSchema, Relation, Value};
use crate::error::{Error, Result};

const BINARY: [&str; 2] = ["NO", "SI"];

/// One comparison inside a planted pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "value")]
pub enum ConditionTest {
    #[serde(rename = "<")]
    Lt(f64),
    #[serde(rename = "<=")]
    Le(f64),
    #[serde(rename = ">")]
    Gt(f64),
    #[serde(rename = ">=")]
    Ge(f64),
    #[serde(rename = "between")]
    Between(f64, f64),
    #[serde(rename = "=")]
    Eq(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attr: String,
    #[serde(flatten)]
    pub test: ConditionTest,
}

impl Condition {
    pub fn new(attr: impl Into<String>, test: ConditionTest) -> Self {
        Condition {
            attr: attr.into(),
            test,
        }
    }
}

/// A conjunction of conditions imposed on a fraction of the records.
///
/// Exactly `round(fraction * n)` records (cumulative rounding across the
/// pattern list) are drawn inside the conjunction; background records are
/// drawn outside every pattern. For each threshold condition one planted
/// record sits on the tightest admissible value, so the boundary is visible
/// in the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPattern {
    pub name: String,
    pub fraction: f64,
    pub conditions: Vec<Condition>,
}

enum Sampler {
    Uniform,
    Geometric(f64),
    Weighted(Vec<f64>),
}

struct Spec {
    schema: AttributeSchema,
    range: (i64, i64),
    sampler: Sampler,
}

fn binary(name: &str, p_si: f64) -> Spec {
    Spec {
        schema: AttributeSchema::categorical(name, BINARY).nullable(true),
        range: (0, 1),
        sampler: Sampler::Weighted(vec![1.0 - p_si, p_si]),
    }
}

fn categorical(name: &str, levels: &[&str], sampler: Sampler) -> Spec {
    Spec {
        schema: AttributeSchema::categorical(name, levels.iter().copied()).nullable(true),
        range: (0, levels.len() as i64 - 1),
        sampler,
    }
}

fn numeric(name: &str, range: (i64, i64), sampler: Sampler) -> Spec {
    Spec {
        schema: AttributeSchema::continuous(name).nullable(true),
        range,
        sampler,
    }
}

fn catalog() -> Vec<Spec> {
    vec![
        Spec {
            schema: AttributeSchema::identifier("CUIT"),
            range: (0, 0),
            sampler: Sampler::Uniform,
        },
        Spec {
            schema: AttributeSchema::text("razonsocial").nullable(true),
            range: (0, 0),
            sampler: Sampler::Uniform,
        },
        categorical(
            "perfil",
            &["Comercio", "Servicios", "Industria", "Agropecuario", "Profesional"],
            Sampler::Uniform,
        ),
        categorical(
            "tipopersona",
            &["Fisica", "Juridica"],
            Sampler::Weighted(vec![0.75, 0.25]),
        ),
        numeric("fechanac", (1940, 1995), Sampler::Uniform),
        categorical("estado", &["Activo", "Pasivo"], Sampler::Weighted(vec![0.85, 0.15])),
        categorical(
            "rellab-condicionIVA",
            &["RespInscripto", "Monotributo", "Exento", "RelDependencia"],
            Sampler::Weighted(vec![0.35, 0.35, 0.1, 0.2]),
        ),
        categorical(
            "categmonot",
            &["ninguna", "A", "B", "C", "D", "E", "F", "G", "H"],
            Sampler::Uniform,
        ),
        binary("decjurada", 0.8),
        categorical(
            "liquidez",
            &["Baja", "Media", "Alta"],
            Sampler::Weighted(vec![0.2, 0.6, 0.2]),
        ),
        numeric("asinpresdj", (0, 10), Sampler::Geometric(0.55)),
        binary("superpodom", 0.1),
        binary("supdompjur", 0.1),
        binary("supdompfis", 0.1),
        binary("blanque-morat", 0.25),
        binary("accionista", 0.2),
        binary("accmayorit", 0.05),
        binary("directivosoc", 0.1),
        binary("donayoacred", 0.05),
        numeric("nroemple", (0, 60), Sampler::Geometric(0.15)),
        numeric("nrodenuncias", (0, 6), Sampler::Geometric(0.6)),
        numeric("cantcau", (0, 5), Sampler::Geometric(0.7)),
        binary("contribsan", 0.15),
        categorical(
            "siper",
            &["A", "B", "C", "D", "E"],
            Sampler::Weighted(vec![0.3, 0.3, 0.2, 0.12, 0.08]),
        ),
    ]
}

/// The 24-column taxpayer schema in canonical column order.
pub fn contribuyentes_schema() -> Vec<AttributeSchema> {
    catalog().into_iter().map(|s| s.schema).collect()
}

fn lt(attr: &str, v: f64) -> Condition {
    Condition::new(attr, ConditionTest::Lt(v))
}

fn ge(attr: &str, v: f64) -> Condition {
    Condition::new(attr, ConditionTest::Ge(v))
}

fn between(attr: &str, lo: f64, hi: f64) -> Condition {
    Condition::new(attr, ConditionTest::Between(lo, hi))
}

fn eq(attr: &str, label: &str) -> Condition {
    Condition::new(attr, ConditionTest::Eq(label.to_string()))
}

/// Segments shaped after the case-study rule table: a birth-year split at
/// 1972.5, an employee split at 16 and a non-filing split at 2, with the
/// lawsuit and complaint counts separating the segments in feature space.
pub fn case_study_patterns() -> Vec<PlantedPattern> {
    let young = |extra: Vec<Condition>| {
        let mut c = vec![
            ge("fechanac", 1972.5),
            lt("nroemple", 16.0),
            lt("asinpresdj", 2.0),
            between("nrodenuncias", 0.0, 1.0),
            between("cantcau", 0.0, 0.0),
        ];
        c.extend(extra);
        c
    };
    vec![
        PlantedPattern {
            name: "young-no-overlap".into(),
            fraction: 0.40,
            conditions: young(vec![eq("supdompjur", "NO")]),
        },
        PlantedPattern {
            name: "young-overlap".into(),
            fraction: 0.10,
            conditions: young(vec![
                eq("supdompjur", "SI"),
                eq("liquidez", "Baja"),
                eq("blanque-morat", "NO"),
                eq("accionista", "SI"),
                eq("donayoacred", "SI"),
            ]),
        },
        PlantedPattern {
            name: "old-non-filers".into(),
            fraction: 0.14,
            conditions: vec![
                lt("fechanac", 1972.5),
                lt("nroemple", 16.0),
                ge("asinpresdj", 2.0),
                between("nrodenuncias", 4.0, 6.0),
                between("cantcau", 3.0, 5.0),
            ],
        },
        PlantedPattern {
            name: "old-litigated".into(),
            fraction: 0.28,
            conditions: vec![
                lt("fechanac", 1972.5),
                lt("nroemple", 16.0),
                lt("asinpresdj", 2.0),
                between("nrodenuncias", 0.0, 1.0),
                between("cantcau", 3.0, 5.0),
            ],
        },
        PlantedPattern {
            name: "old-employers".into(),
            fraction: 0.08,
            conditions: vec![
                lt("fechanac", 1972.5),
                ge("nroemple", 16.0),
                lt("asinpresdj", 2.0),
                between("nrodenuncias", 4.0, 6.0),
                between("cantcau", 0.0, 1.0),
            ],
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Constraint {
    Range(i64, i64),
    Label(usize),
}

struct CompiledPattern {
    constraints: BTreeMap<usize, Constraint>,
    /// (column, anchored value) per threshold condition
    anchors: Vec<(usize, i64)>,
    conditions: Vec<(usize, ConditionTest)>,
}

fn compile(pattern: &PlantedPattern, specs: &[Spec]) -> Result<CompiledPattern> {
    let perr = |msg: String| Error::Pattern(format!("{}: {msg}", pattern.name));
    if !(0.0..=1.0).contains(&pattern.fraction) {
        return Err(perr(format!("fraction {} outside [0,1]", pattern.fraction)));
    }
    let mut constraints: BTreeMap<usize, Constraint> = BTreeMap::new();
    let mut conditions = Vec::new();
    let mut thresholds = Vec::new();
    for cond in &pattern.conditions {
        let col = specs
            .iter()
            .position(|s| s.schema.name == cond.attr)
            .ok_or_else(|| perr(format!("unknown attribute {}", cond.attr)))?;
        let spec = &specs[col];
        match (&spec.schema.kind, &cond.test) {
            (AttrKind::Categorical(levels), ConditionTest::Eq(label)) => {
                let idx = levels
                    .iter()
                    .position(|l| l == label)
                    .ok_or_else(|| perr(format!("{}: unknown label {label:?}", cond.attr)))?;
                match constraints.insert(col, Constraint::Label(idx)) {
                    Some(Constraint::Label(prev)) if prev != idx => {
                        return Err(perr(format!("{}: contradictory labels", cond.attr)))
                    }
                    _ => {}
                }
            }
            (AttrKind::Continuous, test) if !matches!(test, ConditionTest::Eq(_)) => {
                let (lo, hi) = match constraints.get(&col) {
                    Some(Constraint::Range(lo, hi)) => (*lo, *hi),
                    _ => spec.range,
                };
                let (lo, hi) = match *test {
                    ConditionTest::Lt(v) => (lo, hi.min(v.ceil() as i64 - 1)),
                    ConditionTest::Le(v) => (lo, hi.min(v.floor() as i64)),
                    ConditionTest::Gt(v) => (lo.max(v.floor() as i64 + 1), hi),
                    ConditionTest::Ge(v) => (lo.max(v.ceil() as i64), hi),
                    ConditionTest::Between(a, b) => (lo.max(a.ceil() as i64), hi.min(b.floor() as i64)),
                    ConditionTest::Eq(_) => unreachable!(),
                };
                if lo > hi {
                    return Err(perr(format!("{}: impossible condition", cond.attr)));
                }
                constraints.insert(col, Constraint::Range(lo, hi));
                if !matches!(test, ConditionTest::Between(..)) {
                    thresholds.push((col, test.clone()));
                }
            }
            (kind, _) => {
                return Err(perr(format!(
                    "{}: condition {:?} not applicable to {} attribute",
                    cond.attr,
                    cond.test,
                    kind.name()
                )))
            }
        }
        conditions.push((col, cond.test.clone()));
    }
    let anchors = thresholds
        .into_iter()
        .map(|(col, test)| {
            let Some(Constraint::Range(lo, hi)) = constraints.get(&col) else {
                unreachable!()
            };
            let v = match test {
                ConditionTest::Gt(_) | ConditionTest::Ge(_) => *lo,
                _ => *hi,
            };
            (col, v)
        })
        .collect();
    Ok(CompiledPattern {
        constraints,
        anchors,
        conditions,
    })
}

fn satisfies(row: &[Value], conditions: &[(usize, ConditionTest)], specs: &[Spec]) -> bool {
    conditions.iter().all(|(col, test)| match (&row[*col], test) {
        (Value::Number(x), ConditionTest::Lt(v)) => x < v,
        (Value::Number(x), ConditionTest::Le(v)) => x <= v,
        (Value::Number(x), ConditionTest::Gt(v)) => x > v,
        (Value::Number(x), ConditionTest::Ge(v)) => x >= v,
        (Value::Number(x), ConditionTest::Between(a, b)) => a <= x && x <= b,
        (Value::Category(c), ConditionTest::Eq(label)) => specs[*col].schema.levels().is_some_and(|l| &l[*c] == label),
        _ => false,
    })
}

fn draw_index(rng: &mut ChaCha8Rng, spec: &Spec) -> i64 {
    let (lo, hi) = spec.range;
    match &spec.sampler {
        Sampler::Uniform => rng.gen_range(lo..=hi),
        Sampler::Geometric(p) => {
            let mut k = lo;
            while k < hi && !rng.gen_bool(*p) {
                k += 1;
            }
            k
        }
        Sampler::Weighted(weights) => {
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return i as i64;
                }
                u -= w;
            }
            weights.len() as i64 - 1
        }
    }
}

fn background_row(rng: &mut ChaCha8Rng, specs: &[Spec]) -> Vec<Value> {
    specs
        .iter()
        .map(|spec| match spec.schema.kind {
            AttrKind::Continuous => Value::Number(draw_index(rng, spec) as f64),
            AttrKind::Categorical(_) => Value::Category(draw_index(rng, spec) as usize),
            AttrKind::Identifier | AttrKind::Text => Value::Null,
        })
        .collect()
}

const SURNAMES: [&str; 12] = [
    "GARCIA",
    "FERNANDEZ",
    "GONZALEZ",
    "RODRIGUEZ",
    "LOPEZ",
    "MARTINEZ",
    "PEREZ",
    "GOMEZ",
    "SANCHEZ",
    "ROMERO",
    "SOSA",
    "DIAZ",
];
const GIVEN: [&str; 10] = [
    "JUAN", "MARIA", "CARLOS", "ANA", "JORGE", "LUCIA", "PABLO", "SILVIA", "DIEGO", "MARTA",
];
const FIRMS: [&str; 6] = [
    "COMERCIAL",
    "INDUSTRIAL",
    "SERVICIOS",
    "AGRO",
    "INVERSIONES",
    "LOGISTICA",
];
const SUFFIXES: [&str; 2] = ["S.A.", "S.R.L."];

fn cuit_check_digit(prefix: u32, body: u32) -> u32 {
    const WEIGHTS: [u32; 10] = [5, 4, 3, 2, 7, 6, 5, 4, 3, 2];
    let digits = format!("{prefix:02}{body:08}");
    let sum: u32 = digits.bytes().zip(WEIGHTS).map(|(d, w)| (d - b'0') as u32 * w).sum();
    match 11 - sum % 11 {
        11 => 0,
        10 => 9,
        d => d,
    }
}

/// Generates `n` taxpayer records with the given planted patterns.
pub fn generate_contribuyentes(seed: u64, n: usize, planted: &[PlantedPattern]) -> Result<Relation> {
    generate_contribuyentes_labeled(seed, n, planted).map(|(rel, _)| rel)
}

/// As [`generate_contribuyentes`], also returning each record's pattern index
/// (`None` for background records).
pub fn generate_contribuyentes_labeled(
    seed: u64,
    n: usize,
    planted: &[PlantedPattern],
) -> Result<(Relation, Vec<Option<usize>>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("record count must be positive".into()));
    }
    let specs = catalog();
    let compiled = planted.iter().map(|p| compile(p, &specs)).collect::<Result<Vec<_>>>()?;

    let mut counts = Vec::with_capacity(planted.len());
    let mut cumulative = 0.0;
    let mut assigned = 0usize;
    for p in planted {
        cumulative += p.fraction;
        if cumulative > 1.0 + 1e-9 {
            return Err(Error::Pattern("pattern fractions sum above 1".into()));
        }
        let upto = ((cumulative.min(1.0)) * n as f64).round() as usize;
        counts.push(upto - assigned);
        assigned = upto;
    }
    let mut membership: Vec<Option<usize>> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(Some(i), c))
        .collect();
    membership.resize(n, None);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    membership.shuffle(&mut rng);

    let col = |name: &str| specs.iter().position(|s| s.schema.name == name).unwrap();
    let (c_cuit, c_razon, c_tipo) = (col("CUIT"), col("razonsocial"), col("tipopersona"));
    let (c_rellab, c_monot) = (col("rellab-condicionIVA"), col("categmonot"));
    let monotributo = specs[c_rellab].schema.level_index("Monotributo").unwrap();

    let mut seen_in_pattern = vec![0usize; planted.len()];
    let mut used_cuits = HashSet::new();
    let mut records = Vec::with_capacity(n);
    for member in &membership {
        let mut row = match member {
            Some(p) => {
                let pattern = &compiled[*p];
                let mut row = background_row(&mut rng, &specs);
                for (&c, constraint) in &pattern.constraints {
                    row[c] = match *constraint {
                        Constraint::Range(lo, hi) => Value::Number(rng.gen_range(lo..=hi) as f64),
                        Constraint::Label(idx) => Value::Category(idx),
                    };
                }
                let k = seen_in_pattern[*p];
                seen_in_pattern[*p] += 1;
                for (j, &(c, v)) in pattern.anchors.iter().enumerate() {
                    if j % counts[*p] == k {
                        row[c] = Value::Number(v as f64);
                    }
                }
                row
            }
            None => {
                let mut attempts = 0;
                loop {
                    let row = background_row(&mut rng, &specs);
                    if !compiled.iter().any(|p| satisfies(&row, &p.conditions, &specs)) {
                        break row;
                    }
                    attempts += 1;
                    if attempts >= 1000 {
                        return Err(Error::Pattern(
                            "background records cannot avoid the planted patterns".into(),
                        ));
                    }
                }
            }
        };

        let constrained = |c: usize| member.is_some_and(|p| compiled[p].constraints.contains_key(&c));
        if !constrained(c_monot) {
            let letter = if row[c_rellab] == Value::Category(monotributo) {
                rng.gen_range(1..=8)
            } else {
                0
            };
            row[c_monot] = Value::Category(letter);
        }

        let juridica = row[c_tipo] == Value::Category(1);
        let prefix = if juridica {
            30
        } else if rng.gen_bool(0.5) {
            20
        } else {
            27
        };
        let body = loop {
            let b: u32 = rng.gen_range(10_000_000..=45_000_000);
            if used_cuits.insert(b) {
                break b;
            }
        };
        row[c_cuit] = Value::Text(format!("{prefix}-{body:08}-{}", cuit_check_digit(prefix, body)));
        let surname = SURNAMES[rng.gen_range(0..SURNAMES.len())];
        row[c_razon] = Value::Text(if juridica {
            let firm = FIRMS[rng.gen_range(0..FIRMS.len())];
            let suffix = SUFFIXES[rng.gen_range(0..SUFFIXES.len())];
            format!("{surname} {firm} {suffix}")
        } else {
            format!("{surname}, {}", GIVEN[rng.gen_range(0..GIVEN.len())])
        });
        records.push(row);
    }

    let schema = specs.into_iter().map(|s| s.schema).collect();
    Ok((Relation::new(schema, records)?, membership))
}
