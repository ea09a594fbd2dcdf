pub mod symexpr;
pub mod poisson;
pub mod catalog;
pub mod realize;
pub mod dynamics;
pub mod cli;
