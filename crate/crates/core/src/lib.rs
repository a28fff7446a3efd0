pub mod analysis;
pub mod bench;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod field;
pub mod generate;
pub mod io;
pub mod selftest;
pub mod setcover;
pub mod tensor;
pub mod tk;
pub mod tripartition;
