//! In-place QuickXsort: Quicksort rounds whose non-recursed segment is
//! sorted by a buffered secondary method (Mergesort or external Heapsort)
//! using the other segment as swap space, with exact comparison counting,
//! closed-form cost predictions and ground-truth recurrence oracles.

pub mod engine;
pub mod heap;
pub mod instrument;
pub mod merge;
pub mod oracle;
pub mod runner;
pub mod theory;

pub use engine::{
    assign_sides, insertion_sort, partition_around, quickxsort, select_pivot, Alpha,
    BufferedSorter, ContractViolation, PartitionOutcome, QuickXOptions, RunStats, SamplePolicy,
    SamplingScheme, Side,
};
pub use heap::{build_heap, external_heapsort, ExternalHeapsort, HeapArena, Polarity};
pub use instrument::{
    counting_compare, counting_le, counting_less, elements_from_keys, verify_run, Channel,
    CountedElement, Tally, Verdict, Violation,
};
pub use merge::{merge_with_buffer, sort_segment, MergeVariant, MergeX, MergeXConfig};
pub use oracle::{
    enumerated_x_avg, exhaustive_avg, insertion_sort_avg_table, merge_toll, mergesort_avg_table,
    mergesort_td_avg_f64, solve_recurrence, solve_recurrence_f64, toll_t, OracleError,
    RecurrenceTable,
};
pub use runner::{
    run_one, run_trials, trial_rng, Algorithm, AnySorter, RunnerError, TrialConfig, TrialSummary,
};
pub use theory::{
    beta, beta_binomial_pmf, beta_binomial_pmf_f64, expected_fraction_in_range,
    expected_fraction_log, h_value, harmonic, linear_coefficient, local_limit_error, penalty_q,
    predict_total, recursive_fraction, reg_incomplete_beta, shape_w, skewed_cost_coefficient,
    subproblem_size_pmf, x_model, CostModelParams, ExactRational, TheoryError, XModel,
};
