//! Deterministic numeric output: every float is printed with 17
//! significant digits in scientific notation so identical runs produce
//! byte-identical files.

use std::io::{self, Write};

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv_row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        w.write_all(float(*v).as_bytes())?;
    }
    w.write_all(b"\n")
}

pub fn write_csv_header<W: Write>(w: &mut W, columns: &[&str]) -> io::Result<()> {
    w.write_all(columns.join(",").as_bytes())?;
    w.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-3.5e-12), "-3.5000000000000000e-12");
    }

    #[test]
    fn csv_rows_are_newline_terminated() {
        let mut buf = Vec::new();
        write_csv_header(&mut buf, &["a", "b"]).unwrap();
        write_csv_row(&mut buf, &[1.0, 2.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "a,b\n1.0000000000000000e0,2.0000000000000000e0\n"
        );
    }
}
