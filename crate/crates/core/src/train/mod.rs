//! Cost tables, their estimators, and the distance used by reflexive training.

pub mod choice;
pub mod distance;
pub mod estimate;
pub mod reflexive;
pub mod table;

pub use choice::{total_cost, Choice, ChoiceFamily, TraceStep};
pub use distance::{bag_f1, edit_distance, string_distance};
pub use estimate::{
    estimate_discriminative, estimate_mean_distance, estimate_normalized_distance, estimate_probabilistic,
    ChoiceCounts, DistanceAccumulator, Method,
};
pub use table::{record_choices, Backoff, CostTable, DEFAULT_COST};
pub use reflexive::{
    collect_distances, estimate_from_counts, reflexive_train, scope_name, supervised_counts, ComponentTables,
    Direction, ReflexiveOptions, ReflexiveResult, RoundTrip, Scope,
};
