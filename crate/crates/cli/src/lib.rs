//! Library side of the `fieldprobe` binary: system files, commands and reports.

pub mod commands;
pub mod report;
pub mod sysfile;
