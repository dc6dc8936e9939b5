//! Monte Carlo reproduction of the simulation study.

pub mod cell;
pub mod spec;
pub mod tables;

pub use cell::{
    case_direction, case_scale, case_vector, run_cell, DirectionCase, SimulationResult, TestConfig, DEFAULT_ALPHA,
};
pub use spec::{alternating, gen_dataset, gen_matrix, ErrorDist, Hypothesis, SimulationSpec};
pub use tables::{cell_seed, reproduce_table, SimTable, TableRow, DEFAULT_BOOTSTRAP_B, DEFAULT_REPS};
