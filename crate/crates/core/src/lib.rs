pub mod svg;
pub mod deconstruct;
pub mod actions;
pub mod interpret;
pub mod policy;
pub mod corpus;
pub mod train;
pub mod cli;
