pub mod lattice;
pub mod laurent;
pub mod rational;
pub mod charges;
pub mod phases;
pub mod patterns;
pub mod stability;
pub mod cli;
