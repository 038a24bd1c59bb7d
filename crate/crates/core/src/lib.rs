pub mod bench;
pub mod composition;
pub mod embedded;
pub mod error;
pub mod gf2;
pub mod merit;
pub mod net;
pub mod netio;
pub mod projections;
pub mod raref;
pub mod tvalue;

pub use error::{Error, Result};
pub use net::NetDef;
