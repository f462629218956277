//! Chains of SOM, TDIDT and RB stages over one evolving relation.
//!
//! A SOM stage appends its cell label as a categorical attribute that later
//! stages may name; TDIDT and RB stages only report.

mod plan;
mod run;
mod strategy;

pub use plan::{validate, CheckedPlan, Plan, RbStage, SomStage, StageConfig, TdidtStage};
pub use run::{run, stage_seed, RunReport, StageOutput};
pub use strategy::{parse_strategy, Role, StageKind, Strategy, CANONICAL, MAX_STAGES};

impl Plan {
    /// Default configuration for any chain over the taxpayer schema: SOM
    /// stages cluster the case-study features, TDIDT targets the cell label
    /// when a SOM ran earlier (otherwise `supdompjur`), and RB stages pivot
    /// on `supdompjur` first and on the cell label afterwards.
    pub fn for_strategy(strategy: &Strategy, seed: u64) -> Plan {
        let case = Plan::case_study(seed);
        let (som, tdidt, rb) = match case.stages.as_slice() {
            [StageConfig::Som(s), StageConfig::Tdidt(t), StageConfig::Rb(r)] => (s.clone(), t.clone(), r.clone()),
            _ => unreachable!("case study is SOM>TDIDT>RB"),
        };
        let mut som_seen = false;
        let mut rb_seen = false;
        let stages = strategy
            .stages
            .iter()
            .map(|kind| match kind {
                StageKind::Som => {
                    som_seen = true;
                    StageConfig::Som(som.clone())
                }
                StageKind::Tdidt => {
                    let mut t = tdidt.clone();
                    if !som_seen {
                        t.class_attr = "supdompjur".into();
                        t.predictors = tdidt
                            .predictors
                            .as_ref()
                            .map(|p| p.iter().filter(|a| *a != "supdompjur").cloned().collect());
                    }
                    StageConfig::Tdidt(t)
                }
                StageKind::Rb => {
                    let mut r = rb.clone();
                    if rb_seen && som_seen {
                        r.pivot = som.out_attr.clone();
                    }
                    rb_seen = true;
                    StageConfig::Rb(r)
                }
            })
            .collect();
        Plan {
            strategy: strategy.to_string(),
            stages,
            seed,
            prepare: None,
        }
    }
}
