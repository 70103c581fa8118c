//! Document formats used by the `kripke` binary, exposed for integration
//! tests and embedding.

pub mod doc;
