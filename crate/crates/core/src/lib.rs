pub mod arena;
pub mod baseline;
pub mod cli;
pub mod pgio;
pub mod solver;
pub mod witness;
