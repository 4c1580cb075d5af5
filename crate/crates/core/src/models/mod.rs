pub mod coupling;
pub mod dimer;
pub mod ising;
