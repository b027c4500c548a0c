//! Structural circuit metrics and containment-graph time profiling.

mod flow;
mod metrics;

pub use flow::{
    profile, report_dot, report_gprof, DeviceTimeTable, NodeKind, ProfileEdge, ProfileError,
    ProfileNode, ProfileReport,
};
pub use metrics::{circuit_metrics, MetricsVector};
