//! Helpers for driving the command line in-process.

use std::path::PathBuf;

pub use chainmeter_cli::commands::CommandError;

/// Path of a file under the shared fixtures directory.
pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

/// Runs `chainmeter <args>` and returns what it printed.
pub fn chainmeter(args: &[&str]) -> Result<String, CommandError> {
    let mut out = Vec::new();
    chainmeter_cli::invoke(
        std::iter::once("chainmeter").chain(args.iter().copied()),
        &mut out,
    )?;
    Ok(String::from_utf8(out).expect("reports are UTF-8"))
}

/// Number printed after `key` at the start of a line.
pub fn field(text: &str, key: &str) -> Option<f64> {
    text.lines().find_map(|l| {
        let mut parts = l.split_whitespace();
        if parts.next() == Some(key) {
            parts.next()?.parse().ok()
        } else {
            None
        }
    })
}
