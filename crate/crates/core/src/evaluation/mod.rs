//! Out-of-sample evaluation and the experiment drivers built on it.

pub mod report;
pub mod studies;

pub use report::{
    comparison_rows, evaluate_plan, relative_improvement, scenario_cost, write_comparison_csv, ComparisonRow,
    EvaluationReport, ScenarioCost,
};
pub use studies::{
    interaction_study, mid_period, reweight, saa_study, sensitivity_dp, t_interval, InteractionStudy, SaaCell,
    SaaOptions, SaaStudy, SaaSummary, Sampler, SensitivityRow, SensitivityTable, EVAL_SEED_TAG, INTERACTION_LABELS,
    INTERACTION_MASKS,
};
