//! `mp-bounds`: print the Wishart spectral bounds for (N, T).

use xcorr_core::spectrum::mp_bounds;

use crate::error::CliError;

pub fn run(n: usize, t: usize) -> Result<(), CliError> {
    let bounds = mp_bounds(n, t)?;
    println!("{}", serde_json::to_string(&bounds).expect("bounds serialization cannot fail"));
    Ok(())
}
