//! Monte Carlo drivers comparing sampled ensembles with reference predictions.

mod checks;
mod exact;
mod growth;
mod moments;
mod report;
mod stats;

pub use checks::{
    concavity_check_lemma_b2, counterexample_runs, dembo_exact_check, dembo_formula, hadamard_trials,
    lemma_b2_max_second_difference, product_factoring, truncation_stability_check, wegner_gap_probability,
    Counterexample, CONCAVITY_TOL, KERNEL_HIT_SHARE, OUTLIER_EXCESS,
};
pub use exact::{
    concavity_random_triples, decomposition_check, hadamard_check, schur_identity_check, DecompositionCheck, IDENTITY_TOL,
};
pub use growth::{
    estimate_det_growth, growth_oracle, growth_samples, reference_for, sample_log_dets, GrowthEstimates, SampleRecord,
    MIN_GROWTH_SAMPLES,
};
pub use moments::{moment_transition, MomentReport, TailClass, HEAVY_HILL, HEAVY_SHARE, MOMENT_MAX_N};
pub use report::{write_report_csv, ExperimentReport, Metadata, ReportRow, ESTIMATOR_RATIONALE};
pub use stats::{hill_index, log_mean_exp, max_share, mean_stderr};
