//! Flat CSV records.

use std::io::Write;

use crate::error::CliError;

/// Column names, in order. Stable across versions.
pub const HEADER: [&str; 14] = [
    "experiment",
    "law",
    "seed",
    "replicate",
    "checkpoint",
    "arg",
    "raw",
    "centering",
    "z",
    "ell",
    "aux_a",
    "aux_b",
    "aux_c",
    "pass",
];

/// One row per (replicate, checkpoint). Unused numeric fields are `None` and
/// print as empty cells; `pass` is empty when no per-row criterion applies.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub law: String,
    pub seed: u64,
    pub replicate: u64,
    pub checkpoint: u64,
    pub arg: Option<f64>,
    pub raw: Option<f64>,
    pub centering: Option<f64>,
    pub z: Option<f64>,
    pub ell: Option<f64>,
    pub aux_a: Option<f64>,
    pub aux_b: Option<f64>,
    pub aux_c: Option<f64>,
    pub pass: Option<bool>,
}

impl ReportRow {
    pub fn new(experiment: &str, law: &str, seed: u64, replicate: u64, checkpoint: u64) -> Self {
        ReportRow {
            experiment: experiment.to_string(),
            law: law.to_string(),
            seed,
            replicate,
            checkpoint,
            arg: None,
            raw: None,
            centering: None,
            z: None,
            ell: None,
            aux_a: None,
            aux_b: None,
            aux_c: None,
            pass: None,
        }
    }

    fn fields(&self) -> [String; 14] {
        [
            self.experiment.clone(),
            self.law.clone(),
            self.seed.to_string(),
            self.replicate.to_string(),
            self.checkpoint.to_string(),
            float(self.arg),
            float(self.raw),
            float(self.centering),
            float(self.z),
            float(self.ell),
            float(self.aux_a),
            float(self.aux_b),
            float(self.aux_c),
            self.pass.map(|p| if p { "1" } else { "0" }.to_string()).unwrap_or_default(),
        ]
    }
}

/// 17 significant digits in scientific notation; NaN stays `NaN`.
pub fn float(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => String::new(),
    }
}

/// Write the header and rows sorted by (replicate, checkpoint).
pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), CliError> {
    let mut sorted: Vec<&ReportRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.replicate, r.checkpoint));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in sorted {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(float(Some(0.1)), "1.0000000000000001e-1");
        assert_eq!(float(Some(-12.0)), "-1.2000000000000000e1");
        assert_eq!(float(None), "");
        let x = std::f64::consts::PI;
        assert_eq!(float(Some(x)).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rows_are_sorted_and_quoted() {
        let mut a = ReportRow::new("lil", "beta:2,3", 1, 1, 0);
        a.pass = Some(true);
        let b = ReportRow::new("lil", "beta:2,3", 1, 0, 5);
        let c = ReportRow::new("lil", "beta:2,3", 1, 0, 2);
        let mut buf = Vec::new();
        write_csv(&[a, b, c], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HEADER.join(","));
        assert!(lines[1].starts_with("lil,\"beta:2,3\",1,0,2,"));
        assert!(lines[2].starts_with("lil,\"beta:2,3\",1,0,5,"));
        assert!(lines[3].ends_with(",1"));
    }
}
