//! Instance files, statistics, the occurrence benchmark and the oracle
//! front end behind the `gensupport` command.

pub mod bench;
pub mod instance;
pub mod stats;
pub mod verify;
