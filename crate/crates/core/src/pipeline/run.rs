use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::plan::{CheckedPlan, RbStage, SomStage, StageConfig, TdidtStage};
use super::strategy::{Role, StageKind};
use crate::bayes::{fit_naive_bayes, BayesNet, NaiveBayesModel};
use crate::dataset::{min_max_normalize, prepare, schema_to_json, write_csv, Relation, ScalerParams};
use crate::error::{Error, Result};
use crate::induction::{extract_rules, induce, rules_table, DecisionTree, InduceConfig, Rule};
use crate::som::{self, SomAssignment, SomGrid, SomParams};

/// Seed of stage `index`, independent of every other stage.
pub fn stage_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum StageOutput {
    #[serde(rename = "SOM")]
    Som {
        config: SomStage,
        seed: u64,
        grid: SomGrid<f64>,
        scaler: ScalerParams,
        assignment: SomAssignment,
        quantization_error: f64,
    },
    #[serde(rename = "TDIDT")]
    Tdidt {
        config: TdidtStage,
        tree: DecisionTree<f64>,
        rules: Vec<Rule>,
    },
    #[serde(rename = "RB")]
    Rb {
        config: RbStage,
        model: NaiveBayesModel<f64>,
        #[serde(skip)]
        net: BayesNet<f64>,
    },
}

impl StageOutput {
    pub fn kind(&self) -> StageKind {
        match self {
            StageOutput::Som { .. } => StageKind::Som,
            StageOutput::Tdidt { .. } => StageKind::Tdidt,
            StageOutput::Rb { .. } => StageKind::Rb,
        }
    }

    /// Text artifact of the stage: counts table, rule table or CPT table.
    pub fn table(&self) -> String {
        match self {
            StageOutput::Som { assignment, .. } => assignment.table(),
            StageOutput::Tdidt { rules, .. } => rules_table(rules),
            StageOutput::Rb { model, .. } => model.report(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub strategy: String,
    pub canonical: bool,
    pub roles: Vec<Role>,
    pub seed: u64,
    pub records: usize,
    pub stages: Vec<StageOutput>,
    /// Wall-clock milliseconds per stage.
    pub timings_ms: Vec<f64>,
    #[serde(skip)]
    pub relation: Relation,
}

fn run_som(rel: &Relation, cfg: &SomStage, seed: u64) -> Result<(Relation, StageOutput)> {
    let features: Vec<&str> = cfg.features.iter().map(String::as_str).collect();
    let (_, scaler) = min_max_normalize(rel, &features)?;
    let data = som::feature_matrix::<f64>(rel, &features, &scaler)?;
    let mut params = SomParams::<f64>::new(cfg.grid_width, cfg.grid_height, seed);
    params.iterations = cfg.iterations;
    params.initial_rate = cfg.initial_rate;
    if let Some(r) = cfg.initial_radius {
        params.initial_radius = r;
        params.map_radius = r;
    }
    if let Some(rm) = cfg.map_radius {
        params.map_radius = rm;
    }
    let grid = som::train(&data, &params)?;
    let quantization_error = som::quantization_error(&grid, &data)?;
    let (out, assignment) = som::assign(&grid, rel, &features, &scaler, &cfg.out_attr)?;
    Ok((
        out,
        StageOutput::Som {
            config: cfg.clone(),
            seed,
            grid,
            scaler,
            assignment,
            quantization_error,
        },
    ))
}

fn run_tdidt(rel: &Relation, cfg: &TdidtStage) -> Result<StageOutput> {
    let config = InduceConfig {
        variant: cfg.variant,
        criterion: cfg.criterion,
        min_support: cfg.min_support,
        max_depth: cfg.max_depth,
        predictors: cfg.predictors.clone(),
    };
    let tree = induce::<f64>(rel, &cfg.class_attr, &config)?;
    let rules = extract_rules(&tree);
    Ok(StageOutput::Tdidt {
        config: cfg.clone(),
        tree,
        rules,
    })
}

fn run_rb(rel: &Relation, cfg: &RbStage) -> Result<StageOutput> {
    let features: Vec<&str> = cfg.features.iter().map(String::as_str).collect();
    let model = fit_naive_bayes::<f64>(rel, &cfg.pivot, &features, cfg.smoothing)?;
    let net = model.to_bayes_net()?;
    Ok(StageOutput::Rb {
        config: cfg.clone(),
        model,
        net,
    })
}

/// Executes every stage in order on `rel`.
pub fn run(plan: &CheckedPlan, rel: &Relation) -> Result<RunReport> {
    if rel.schema() != plan.schemas[0].as_slice() {
        return Err(Error::Schema("relation schema differs from the validated plan".into()));
    }
    let mut current = match plan.prepare {
        Some(policy) => prepare(rel, policy)?,
        None => rel.clone(),
    };
    let mut stages = Vec::with_capacity(plan.stages.len());
    let mut timings_ms = Vec::with_capacity(plan.stages.len());
    for (i, config) in plan.stages.iter().enumerate() {
        let started = Instant::now();
        let wrap = |e: Error| Error::Stage {
            stage: i + 1,
            kind: config.kind().token(),
            source: Box::new(e),
        };
        let output = match config {
            StageConfig::Som(cfg) => {
                let (next, out) = run_som(&current, cfg, stage_seed(plan.seed, i)).map_err(wrap)?;
                current = next;
                out
            }
            StageConfig::Tdidt(cfg) => run_tdidt(&current, cfg).map_err(wrap)?,
            StageConfig::Rb(cfg) => run_rb(&current, cfg).map_err(wrap)?,
        };
        timings_ms.push(started.elapsed().as_secs_f64() * 1e3);
        stages.push(output);
    }
    Ok(RunReport {
        strategy: plan.strategy.to_string(),
        canonical: plan.strategy.canonical,
        roles: plan.strategy.roles(),
        seed: plan.seed,
        records: current.len(),
        stages,
        timings_ms,
        relation: current,
    })
}

impl RunReport {
    /// Pretty JSON with sorted keys; timings are dropped unless requested.
    pub fn to_json(&self, timings: bool) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if !timings {
            if let Some(map) = value.as_object_mut() {
                map.remove("timings_ms");
            }
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    /// Artifact file names paired with their contents. Stage kinds that
    /// occur more than once get the one-based stage index in the name.
    pub fn artifacts(&self, timings: bool) -> Result<Vec<(String, Vec<u8>)>> {
        let mut files = vec![("report.json".to_string(), self.to_json(timings)?.into_bytes())];
        let repeated = |kind: StageKind| self.stages.iter().filter(|s| s.kind() == kind).count() > 1;
        for (i, stage) in self.stages.iter().enumerate() {
            let name = |stem: &str, ext: &str| {
                if repeated(stage.kind()) {
                    format!("{stem}_{}.{ext}", i + 1)
                } else {
                    format!("{stem}.{ext}")
                }
            };
            match stage {
                StageOutput::Som { .. } => {
                    files.push((name("csom_counts", "txt"), stage.table().into_bytes()));
                }
                StageOutput::Tdidt { tree, .. } => {
                    files.push((name("rules", "txt"), stage.table().into_bytes()));
                    files.push((name("tree", "dot"), tree.to_dot().into_bytes()));
                }
                StageOutput::Rb { net, .. } => {
                    files.push((name("cpt", "txt"), stage.table().into_bytes()));
                    files.push((name("net", "dot"), net.to_dot().into_bytes()));
                }
            }
        }
        let mut csv = Vec::new();
        write_csv(&self.relation, &mut csv)?;
        files.push(("augmented.csv".to_string(), csv));
        files.push((
            "schema.json".to_string(),
            schema_to_json(self.relation.schema()).into_bytes(),
        ));
        Ok(files)
    }

    pub fn write_dir(&self, dir: &Path, timings: bool) -> Result<Vec<String>> {
        fs::create_dir_all(dir)?;
        let files = self.artifacts(timings)?;
        let mut names = Vec::with_capacity(files.len());
        for (name, bytes) in files {
            fs::write(dir.join(&name), bytes)?;
            names.push(name);
        }
        Ok(names)
    }
}
