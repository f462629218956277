use serde::{Deserialize, Serialize};

use super::strategy::{parse_strategy, StageKind, Strategy};
use crate::dataset::{AttrKind, AttributeSchema, ImputePolicy};
use crate::error::{Error, Result};
use crate::induction::{Criterion, Variant};
use crate::som::Cell;

fn default_out_attr() -> String {
    "CSOM".to_string()
}

fn default_grid() -> usize {
    2
}

fn default_iterations() -> usize {
    500
}

fn default_rate() -> f64 {
    0.1
}

fn default_min_support() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SomStage {
    pub features: Vec<String>,
    #[serde(default = "default_grid")]
    pub grid_width: usize,
    #[serde(default = "default_grid")]
    pub grid_height: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// σ₀; half the longer grid side when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_radius: Option<f64>,
    /// RM; equal to σ₀ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_radius: Option<f64>,
    #[serde(default = "default_rate")]
    pub initial_rate: f64,
    #[serde(default = "default_out_attr")]
    pub out_attr: String,
}

impl SomStage {
    pub fn new<S: Into<String>>(features: impl IntoIterator<Item = S>) -> Self {
        SomStage {
            features: features.into_iter().map(Into::into).collect(),
            grid_width: default_grid(),
            grid_height: default_grid(),
            iterations: default_iterations(),
            initial_radius: None,
            map_radius: None,
            initial_rate: default_rate(),
            out_attr: default_out_attr(),
        }
    }

    /// Labels of the derived attribute, row-major.
    pub fn labels(&self) -> Vec<String> {
        (0..self.grid_height)
            .flat_map(|row| (0..self.grid_width).map(move |col| Cell { row, col }))
            .map(|c| c.label(&self.out_attr))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdidtStage {
    pub class_attr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictors: Option<Vec<String>>,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub criterion: Criterion,
    #[serde(default = "default_min_support")]
    pub min_support: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
}

impl TdidtStage {
    pub fn new(class_attr: impl Into<String>) -> Self {
        TdidtStage {
            class_attr: class_attr.into(),
            predictors: None,
            variant: Variant::C45,
            criterion: Criterion::GainRatio,
            min_support: default_min_support(),
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbStage {
    pub pivot: String,
    pub features: Vec<String>,
    #[serde(default)]
    pub smoothing: f64,
}

impl RbStage {
    pub fn new<S: Into<String>>(pivot: impl Into<String>, features: impl IntoIterator<Item = S>) -> Self {
        RbStage {
            pivot: pivot.into(),
            features: features.into_iter().map(Into::into).collect(),
            smoothing: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StageConfig {
    #[serde(rename = "SOM")]
    Som(SomStage),
    #[serde(rename = "TDIDT")]
    Tdidt(TdidtStage),
    #[serde(rename = "RB")]
    Rb(RbStage),
}

impl StageConfig {
    pub fn kind(&self) -> StageKind {
        match self {
            StageConfig::Som(_) => StageKind::Som,
            StageConfig::Tdidt(_) => StageKind::Tdidt,
            StageConfig::Rb(_) => StageKind::Rb,
        }
    }
}

/// A strategy with one configuration per stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub strategy: String,
    pub stages: Vec<StageConfig>,
    pub seed: u64,
    /// Null handling applied before the first stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepare: Option<ImputePolicy>,
}

impl Plan {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn strategy(&self) -> Result<Strategy> {
        parse_strategy(&self.strategy)
    }

    /// The SOM > TDIDT > RB investigation over the generated taxpayer
    /// relation.
    pub fn case_study(seed: u64) -> Plan {
        let mut som = SomStage::new(["fechanac", "asinpresdj", "nroemple", "nrodenuncias", "cantcau"]);
        som.iterations = 2000;
        som.initial_rate = 0.5;
        let mut tdidt = TdidtStage::new("CSOM");
        tdidt.predictors = Some(
            [
                "perfil",
                "tipopersona",
                "fechanac",
                "estado",
                "rellab-condicionIVA",
                "categmonot",
                "decjurada",
                "liquidez",
                "asinpresdj",
                "superpodom",
                "supdompjur",
                "supdompfis",
                "blanque-morat",
                "accionista",
                "accmayorit",
                "directivosoc",
                "donayoacred",
                "nroemple",
                "nrodenuncias",
                "cantcau",
            ]
            .map(String::from)
            .to_vec(),
        );
        let rb = RbStage::new("supdompjur", ["liquidez", "blanque-morat", "accionista", "donayoacred"]);
        Plan {
            strategy: "SOM>TDIDT>RB".into(),
            stages: vec![StageConfig::Som(som), StageConfig::Tdidt(tdidt), StageConfig::Rb(rb)],
            seed,
            prepare: None,
        }
    }
}

/// Validated plan: the strategy plus the schema after every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckedPlan {
    pub strategy: Strategy,
    pub stages: Vec<StageConfig>,
    pub seed: u64,
    pub prepare: Option<ImputePolicy>,
    /// `schemas[i]` is the schema stage `i` sees; the last entry is the
    /// final schema.
    pub schemas: Vec<Vec<AttributeSchema>>,
}

fn find<'a>(schema: &'a [AttributeSchema], name: &str) -> Result<&'a AttributeSchema> {
    schema
        .iter()
        .find(|a| a.name == name)
        .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
}

fn require(attr: &AttributeSchema, continuous: bool) -> Result<()> {
    let ok = match attr.kind {
        AttrKind::Continuous => continuous,
        AttrKind::Categorical(_) => !continuous,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            attr: attr.name.clone(),
            expected: if continuous { "continuous" } else { "categorical" },
            found: attr.kind.name(),
        })
    }
}

fn check_stage(config: &StageConfig, schema: &mut Vec<AttributeSchema>) -> Result<()> {
    match config {
        StageConfig::Som(som) => {
            if som.features.is_empty() {
                return Err(Error::InvalidArgument("SOM stage lists no features".into()));
            }
            for f in &som.features {
                require(find(schema, f)?, true)?;
            }
            if schema.iter().any(|a| a.name == som.out_attr) {
                return Err(Error::Schema(format!("duplicate attribute name {}", som.out_attr)));
            }
            if som.grid_width == 0 || som.grid_height == 0 || som.iterations == 0 {
                return Err(Error::InvalidArgument(
                    "SOM grid sides and iterations must be positive".into(),
                ));
            }
            schema.push(AttributeSchema::categorical(som.out_attr.clone(), som.labels()));
        }
        StageConfig::Tdidt(t) => {
            require(find(schema, &t.class_attr)?, false)?;
            for p in t.predictors.iter().flatten() {
                if *p == t.class_attr {
                    return Err(Error::InvalidArgument(format!("predictor {p} is the class attribute")));
                }
                let attr = find(schema, p)?;
                if !attr.is_mining_relevant() {
                    return Err(Error::KindMismatch {
                        attr: p.clone(),
                        expected: "continuous or categorical",
                        found: attr.kind.name(),
                    });
                }
                if t.variant == Variant::Id3 && attr.is_continuous() {
                    require(attr, false)?;
                }
            }
        }
        StageConfig::Rb(rb) => {
            require(find(schema, &rb.pivot)?, false)?;
            if rb.features.is_empty() {
                return Err(Error::InvalidArgument("RB stage lists no features".into()));
            }
            for f in &rb.features {
                if *f == rb.pivot {
                    return Err(Error::InvalidArgument(format!("feature {f} is the pivot")));
                }
                require(find(schema, f)?, false)?;
            }
            if !(rb.smoothing >= 0.0 && rb.smoothing.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "smoothing {} must be >= 0",
                    rb.smoothing
                )));
            }
        }
    }
    Ok(())
}

/// Replays the schema changes of every stage and checks each stage's
/// attribute references at its position.
pub fn validate(
    strategy: &Strategy,
    schema: &[AttributeSchema],
    stages: &[StageConfig],
) -> Result<Vec<Vec<AttributeSchema>>> {
    if stages.len() != strategy.len() {
        return Err(Error::Strategy(format!(
            "strategy {strategy} has {} stages but {} configurations were given",
            strategy.len(),
            stages.len()
        )));
    }
    let mut current = schema.to_vec();
    let mut schemas = vec![current.clone()];
    for (i, (kind, config)) in strategy.stages.iter().zip(stages).enumerate() {
        let wrap = |e: Error| Error::Stage {
            stage: i + 1,
            kind: kind.token(),
            source: Box::new(e),
        };
        if config.kind() != *kind {
            return Err(wrap(Error::Strategy(format!(
                "configuration is for {}, strategy expects {kind}",
                config.kind()
            ))));
        }
        check_stage(config, &mut current).map_err(wrap)?;
        schemas.push(current.clone());
    }
    Ok(schemas)
}

impl Plan {
    pub fn check(&self, schema: &[AttributeSchema]) -> Result<CheckedPlan> {
        let strategy = self.strategy()?;
        let schemas = validate(&strategy, schema, &self.stages)?;
        Ok(CheckedPlan {
            strategy,
            stages: self.stages.clone(),
            seed: self.seed,
            prepare: self.prepare,
            schemas,
        })
    }
}
