//! Plain-text CSV helpers shared by the trajectory, scan and cycle exports.

use std::io::{self, Write};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// Writes `#`-prefixed header lines, one per `(key, value)` pair.
pub fn write_comment_header<W: Write>(w: &mut W, entries: &[(String, String)]) -> io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

pub fn write_csv_row<W: Write>(w: &mut W, fields: &[String]) -> io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}
