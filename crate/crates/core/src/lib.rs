pub mod bench;
pub mod bounds;
pub mod domain;
pub mod generator;
pub mod heuristics;
pub mod models;
pub mod solver;
