//! CSV writing and number formatting shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::Failure;

/// A CSV table on stdout or a file, with an optional trailing
/// wall-clock column.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
    timestamp: Option<String>,
}

impl Table {
    pub fn create(path: Option<&Path>, timestamp: bool, header: &[&str]) -> Result<Self, Failure> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Failure::io(p, e))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        let timestamp = timestamp.then(unix_seconds);
        let mut table = Self { writer, timestamp: None };
        let mut head: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        if timestamp.is_some() {
            head.push("timestamp".into());
        }
        table.row(head)?;
        table.timestamp = timestamp;
        Ok(table)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut record = csv::ByteRecord::new();
        for f in fields {
            record.push_field(f.as_ref());
        }
        if let Some(ts) = &self.timestamp {
            record.push_field(ts.as_bytes());
        }
        self.writer.write_byte_record(&record).map_err(Failure::csv)
    }

    pub fn finish(mut self) -> Result<(), Failure> {
        self.writer.flush().map_err(|e| Failure::usage(format!("write failed: {e}")))
    }
}

fn unix_seconds() -> String {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
        .to_string()
}

/// Format a real with at least six significant digits. The shortest
/// round-trip representation is used when it already has six; otherwise it
/// is padded. Very small or large magnitudes use exponent notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        let short = format!("{x}");
        if significant_digits(&short) >= 6 {
            return short;
        }
        let exp = a.log10().floor() as i32;
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        let short = format!("{x:e}");
        let mantissa = short.split('e').next().unwrap_or("");
        if significant_digits(mantissa) >= 6 {
            return short;
        }
        format!("{x:.5e}")
    }
}

fn significant_digits(s: &str) -> usize {
    let digits: String = s.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len()
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(num(0.5), "0.500000");
        assert_eq!(num(0.135_335_283_236_612_7), "0.1353352832366127");
        assert_eq!(num(3.0), "3.00000");
        assert_eq!(num(1000.0), "1000.00");
        assert_eq!(num(123_456_789.0), "123456789");
        assert_eq!(num(2.958_675e-5), "2.958675e-5");
        assert_eq!(num(7e-9), "7.00000e-9");
        assert_eq!(num(-0.25), "-0.250000");
        assert_eq!(num(0.0), "0.00000");
    }

    #[test]
    fn formatted_values_round_trip_to_six_digits() {
        for &x in &[0.1, 0.2285, 1.0 / 3.0, 7e-9, 4.2e20, 0.000_123] {
            let back: f64 = num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-6, "{x} -> {}", num(x));
        }
    }
}
