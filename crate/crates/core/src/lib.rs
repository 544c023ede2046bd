pub mod cf;
pub mod data;
pub mod eval;
pub mod ids;
pub mod llm;
pub mod protocol;
pub mod ranking;
pub mod retrieval;
pub mod synth;
