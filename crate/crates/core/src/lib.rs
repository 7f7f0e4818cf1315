pub mod adversary;
pub mod chromatic;
pub mod cover;
pub mod discharging;
pub mod embedding;
pub mod format;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod par;
pub mod reducer;
pub mod signed;
