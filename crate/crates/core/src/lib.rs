//! Exact finite-field and cyclotomic machinery for the Weil representation of `Sp(2m, F_q)`,
//! `q` odd, built from the lagrangian bundle and its connection.

pub mod bundle;
pub mod cyclo;
pub mod error;
pub mod extrep;
pub mod galois;
pub mod gauss;
pub mod lag;
pub mod linalg;
pub mod symp;
pub mod verify;
pub mod weil;

pub use error::{Error, Result};
pub use galois::{Fe, Field};
pub use lag::Lagrangian;
pub use symp::{SpElement, SympSpace};
