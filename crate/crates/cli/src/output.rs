//! Number formatting and table/record writers.

use std::io::{self, Write};

use hardy_weight::suites::Diagnostic;
use hardy_weight::VerificationReport;

/// Significant digits for every JSON number.
pub const JSON_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// C-style `%.{digits}g`: shortest of fixed and scientific notation with
/// trailing zeros removed.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_g(x, JSON_DIGITS)
    } else {
        "null".into()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// A numeric table; `None` cells print empty in csv and `null` in json.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut impl Write, format: Format, precision: usize) -> io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(
                        row.iter()
                            .map(|c| c.map(|v| format_g(v, precision)).unwrap_or_default()),
                    )?;
                }
                w.flush()
            }
            Format::Json => {
                writeln!(out, "[")?;
                for (i, row) in self.rows.iter().enumerate() {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| {
                            format!(
                                "{}:{}",
                                json_string(c),
                                v.map_or("null".into(), json_number)
                            )
                        })
                        .collect();
                    let sep = if i + 1 < self.rows.len() { "," } else { "" };
                    writeln!(out, "  {{{}}}{}", fields.join(","), sep)?;
                }
                writeln!(out, "]")
            }
        }
    }
}

fn parameters_object(params: &[(String, f64)]) -> String {
    let fields: Vec<String> = params
        .iter()
        .map(|(k, v)| format!("{}:{}", json_string(k), json_number(*v)))
        .collect();
    format!("{{{}}}", fields.join(","))
}

/// One NDJSON line for a report.
pub fn report_record(suite: &str, r: &VerificationReport) -> String {
    let note = r.note.as_deref().map_or("null".into(), json_string);
    format!(
        "{{\"suite\":{},\"claim\":{},\"parameters\":{},\"metric\":{},\"comparison\":{},\"threshold\":{},\"pass\":{},\"note\":{}}}",
        json_string(suite),
        json_string(&r.claim),
        parameters_object(&r.parameters),
        json_number(r.metric),
        json_string(r.comparison.symbol()),
        json_number(r.threshold),
        r.passed,
        note,
    )
}

/// One NDJSON line for a diagnostic; it carries no pass field.
pub fn diagnostic_record(d: &Diagnostic) -> String {
    format!(
        "{{\"diagnostic\":{},\"parameters\":{}}}",
        json_string(&d.name),
        parameters_object(&d.parameters)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_c() {
        assert_eq!(format_g(0.5857864376269049, 12), "0.585786437627");
        assert_eq!(format_g(0.25, 12), "0.25");
        assert_eq!(format_g(1.0, 12), "1");
        assert_eq!(format_g(100000.0, 12), "100000");
        assert_eq!(format_g(1e-5, 12), "1e-05");
        assert_eq!(format_g(1.5e-7, 3), "1.5e-07");
        assert_eq!(format_g(123456.0, 3), "1.23e+05");
        assert_eq!(format_g(0.0001, 6), "0.0001");
        assert_eq!(format_g(-2.5, 6), "-2.5");
        assert_eq!(format_g(9.9999999, 3), "10");
        assert_eq!(format_g(0.1, 17), "0.10000000000000001");
    }

    #[test]
    fn json_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() - 1.0, 1e-300, 6.02e23] {
            assert_eq!(json_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_number(f64::NAN), "null");
    }

    #[test]
    fn csv_table_layout() {
        let mut t = Table::new(&["x", "rho"]);
        t.push(vec![Some(0.0), Some(0.0)]);
        t.push(vec![Some(0.5), None]);
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv, 12).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,rho\n0,0\n0.5,\n");
    }

    #[test]
    fn json_table_layout() {
        let mut t = Table::new(&["x", "rho"]);
        t.push(vec![Some(0.5), Some(0.25)]);
        t.push(vec![Some(1.0), None]);
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Json, 12).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "[\n  {\"x\":0.5,\"rho\":0.25},\n  {\"x\":1,\"rho\":null}\n]\n"
        );
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed[0]["rho"], 0.25);
    }
}
