//! Quantum circuit toolkit: a text IR, a binary instruction stream,
//! a topology-aware Sabre transpiler, circuit metrics and flow profiling,
//! and the transmission benchmark harness.

pub mod bench;
pub mod bis;
pub mod circuit;
pub mod profiler;
pub mod sim;
pub mod text_ir;
pub mod topology;
pub mod transpiler;

pub use circuit::{Circuit, CircuitDag, CircuitError, Element, GateKind, Instruction};
