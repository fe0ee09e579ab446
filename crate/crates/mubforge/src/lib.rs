//! File formats, parallel drivers, figure datasets and the command line for
//! `mubforge-core`.

pub mod cli;
pub mod figures;
pub mod io;
pub mod parallel;
