//! Reference data compiled into the binary.
//!
//! Each bundled table is an ordinary config file (see [`crate::config`]);
//! the same text can be copied out, edited and passed back with `--config`.

use crate::config::{parse_config, BenchConfig};

/// The reproducible benchmark tables, in presentation order.
pub const BUNDLED: [&str; 4] = ["threecenter1", "threecenter2", "threecenter3", "threecenter4"];

/// Auxiliary-function values whose inner boundary is not published.
pub const NONREPRODUCIBLE: &str = "nonreproducible";

pub fn bundled(name: &str) -> Option<&'static str> {
    Some(match name {
        "threecenter1" => include_str!("../data/threecenter1.cfg"),
        "threecenter2" => include_str!("../data/threecenter2.cfg"),
        "threecenter3" => include_str!("../data/threecenter3.cfg"),
        "threecenter4" => include_str!("../data/threecenter4.cfg"),
        NONREPRODUCIBLE => include_str!("../data/nonreproducible.cfg"),
        _ => return None,
    })
}

/// Parses a bundled table. Panics if `name` is unknown; the bundled files are
/// validated by the test suite.
pub fn bundled_config(name: &str) -> BenchConfig {
    let text = bundled(name).unwrap_or_else(|| panic!("no bundled config `{name}`"));
    parse_config(text, name).expect("bundled configs are valid")
}
