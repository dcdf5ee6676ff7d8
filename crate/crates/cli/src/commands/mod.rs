pub mod cosets;
pub mod hecke;
pub mod measure;
pub mod padic;
pub mod phase;
pub mod report;
pub mod zeta;

use crate::error::{CliError, CliResult};

pub const MAX_N: usize = 8;
/// Largest listing any command will enumerate.
pub const MAX_LISTING: u64 = 200_000;

pub fn check_n(n: usize, min: usize, max: usize) -> CliResult<()> {
    if n < min || n > max {
        return Err(CliError::input(format!("n = {n} outside {min}..={max}")));
    }
    Ok(())
}
