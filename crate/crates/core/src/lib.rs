pub mod blif;
pub mod equiv;
pub mod flow;
pub mod metrics;
pub mod netlist;
pub mod partition;
pub mod resynth;
pub mod sim;
pub mod truth_table;
