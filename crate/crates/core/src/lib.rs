pub mod acceptance;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod library;
pub mod logic;
pub mod qbf;
pub mod structures;
