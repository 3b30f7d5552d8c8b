pub mod constants;
pub mod diffusion;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod gev;
pub mod homodyne;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod photon_stats;
pub mod waveguide;

pub use error::{Error, Result};
