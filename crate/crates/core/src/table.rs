//! Plain CSV text with a fixed 17-significant-digit number format, so
//! identical inputs always produce byte-identical files.

use std::fmt::Write;

pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // fold -0 into 0
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

pub fn to_csv<I, R>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let row = row.as_ref();
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{}", fmt_num(*x)).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}
