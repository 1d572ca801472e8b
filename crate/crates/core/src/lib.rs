pub mod cc_duality;
pub mod error;
pub mod exactnum;
pub mod flows;
pub mod generate;
pub mod io;
pub mod manybody;
pub mod pq_duality;
pub mod report;
pub mod spectral_duality;
pub mod spectral_models;
pub mod suite;

pub use error::{Error, Result};
