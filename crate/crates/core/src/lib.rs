pub mod beta;
pub mod cache;
pub mod cd;
pub mod combinat;
pub mod config;
pub mod cyclotomic;
pub mod data;
pub mod delta;
pub mod error;
pub mod poly;
pub mod qsym;
pub mod report;
pub mod tables;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
