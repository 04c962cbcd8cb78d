pub mod channel;
pub mod chernoff;
pub mod error;
pub mod gaussian;
pub mod optimize;
pub mod probe;
pub mod correlations;
pub mod fock;
pub mod verify;
pub mod cli;
