pub mod carpet;
pub mod coherent;
pub mod config;
pub mod conserved;
pub mod dispersion;
pub mod error;
pub mod evolver;
pub mod io;
pub mod linear;
pub mod run;
pub mod spectral;
