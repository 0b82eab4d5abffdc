//! Deterministic CSV tables for the CLI.
//!
//! Numbers are written with 9 significant digits in `%g` style (fixed notation for
//! decimal exponents in [-4, 9), scientific otherwise) with trailing zeros trimmed.
//! Lines end in `\n`; a table without rows is just its header.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::coverage::CoverageResult;
use crate::error::{Error, Result};
use crate::mcsim::{McEstimate, SimKind};
use crate::normalize::NormalizedNetwork;
use crate::sweep::{RangeBoundary, SweepAxis, SweepRow};

pub const DENSITY_COLUMNS: [&str; 6] = [
    "profile",
    "j",
    "segment_start_m",
    "segment_end_m",
    "density_per_m2",
    "prefactor",
];
pub const COVERAGE_COLUMNS: [&str; 6] = [
    "threshold_db",
    "p_los",
    "p_nlos_inner",
    "p_nlos_outer",
    "p_cov",
    "method",
];
pub const MC_COLUMNS: [&str; 6] = [
    "threshold_db",
    "kind",
    "mean",
    "std_error",
    "trials",
    "outage_trials",
];
pub const OPTIMUM_COLUMNS: [&str; 4] = ["threshold_db", "beamwidth_deg", "p_cov", "boundary"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// `%.9g`-style rendering without trailing zeros.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()
}

/// Writes `table` to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let io_err = |source| Error::Io {
                path: p.to_path_buf(),
                source,
            };
            let file = File::create(p).map_err(io_err)?;
            let mut buf = BufWriter::new(file);
            write_csv(table, &mut buf).map_err(io_err)?;
            buf.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            write_csv(table, stdout.lock()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

/// Segments of every normalized profile; LOS profiles first by `j`, then NLOS.
pub fn density_table(network: &NormalizedNetwork) -> Table {
    let mut t = Table::new(&DENSITY_COLUMNS);
    let mut add = |name: &str, j: Option<usize>, profile: &crate::normalize::PiecewiseDensity| {
        for (start, end, value) in profile.segments() {
            t.push(vec![
                Cell::Text(name.into()),
                j.map_or(Cell::Empty, |j| Cell::Int(j as u64)),
                Cell::Num(start),
                Cell::Num(end),
                Cell::Num(value),
                Cell::Num(profile.prefactor()),
            ]);
        }
    };
    for j in 1..=4 {
        add("los", Some(j), network.los_profile(j));
    }
    add("nlos-inner", None, &network.nlos_inner);
    add("nlos-outer", None, &network.nlos_outer);
    t
}

fn coverage_cells(r: &CoverageResult) -> [Cell; 5] {
    [
        Cell::Num(r.p_los),
        Cell::Num(r.p_nlos_inner),
        Cell::Num(r.p_nlos_outer),
        Cell::Num(r.p_cov),
        Cell::Text(r.method.to_string()),
    ]
}

pub fn coverage_table(thresholds_db: &[f64], results: &[CoverageResult]) -> Table {
    let mut t = Table::new(&COVERAGE_COLUMNS);
    for (&th, r) in thresholds_db.iter().zip(results) {
        let mut row = vec![Cell::Num(th)];
        row.extend(coverage_cells(r));
        t.push(row);
    }
    t
}

pub fn mc_table(thresholds_db: &[f64], kind: SimKind, estimates: &[McEstimate]) -> Table {
    let mut t = Table::new(&MC_COLUMNS);
    for (&th, e) in thresholds_db.iter().zip(estimates) {
        t.push(vec![
            Cell::Num(th),
            Cell::Text(kind.to_string()),
            Cell::Num(e.mean),
            Cell::Num(e.std_error),
            Cell::Int(e.trials),
            Cell::Int(e.outage_trials),
        ]);
    }
    t
}

/// Threshold sweeps use the coverage schema; other axes prepend their own column.
pub fn sweep_table(axis: SweepAxis, rows: &[SweepRow]) -> Table {
    if axis == SweepAxis::ThresholdDb {
        let ths: Vec<f64> = rows.iter().map(|r| r.threshold_db).collect();
        let res: Vec<CoverageResult> = rows.iter().map(|r| r.result).collect();
        return coverage_table(&ths, &res);
    }
    let mut cols = vec![axis.column()];
    cols.extend(COVERAGE_COLUMNS);
    let mut t = Table::new(&cols);
    for r in rows {
        let mut row = vec![Cell::Num(r.axis_value), Cell::Num(r.threshold_db)];
        row.extend(coverage_cells(&r.result));
        t.push(row);
    }
    t
}

pub fn boundary_label(b: Option<RangeBoundary>) -> &'static str {
    match b {
        None => "interior",
        Some(RangeBoundary::Lower) => "lower",
        Some(RangeBoundary::Upper) => "upper",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{Alignment, CoverageMode, Method};
    use crate::netmodel::NetworkConfig;

    #[test]
    fn number_format_matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (123456789.0, "123456789"),
            (1234567891.0, "1.23456789e+09"),
            (1e-5, "1e-05"),
            (1.5e-5, "1.5e-05"),
            (0.000123, "0.000123"),
            (9.9999999996, "10"),
            (-42.25, "-42.25"),
            (1e300, "1e+300"),
            (f64::INFINITY, "inf"),
            (f64::NEG_INFINITY, "-inf"),
            (f64::NAN, "nan"),
            (0.117, "0.117"),
        ];
        for (v, want) in cases {
            assert_eq!(format_number(v), want, "{v:e}");
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&coverage_table(&[], &[]), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "threshold_db,p_los,p_nlos_inner,p_nlos_outer,p_cov,method\n"
        );
    }

    #[test]
    fn coverage_rows_render() {
        let r = CoverageResult::from_branches(
            0.1,
            0.02,
            0.0,
            Method::Analytic(CoverageMode::PaperLiteral, Alignment::Perfect),
        );
        let mut buf = Vec::new();
        write_csv(&coverage_table(&[-2.5], &[r]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "-2.5,0.1,0.02,0,0.12,paper-literal/perfect"
        );
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn density_table_lists_all_profiles() {
        let net = NormalizedNetwork::new(&NetworkConfig::two_tier_example()).unwrap();
        let t = density_table(&net);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], DENSITY_COLUMNS.join(","));
        assert!(lines[1].starts_with("los,1,0,"));
        assert!(lines.iter().any(|l| l.starts_with("nlos-inner,,")));
        let last = lines.last().unwrap();
        assert!(
            last.starts_with("nlos-outer,,") && last.contains(",inf,"),
            "{last}"
        );
        for j in 1..=4 {
            let n = lines
                .iter()
                .filter(|l| l.starts_with(&format!("los,{j},")))
                .count();
            assert_eq!(n, net.los_profile(j).values().len());
        }
    }

    #[test]
    fn file_output_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        let net = NormalizedNetwork::new(&NetworkConfig::two_tier_example()).unwrap();
        emit_csv(&density_table(&net), Some(&a)).unwrap();
        emit_csv(&density_table(&net), Some(&b)).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        let err = emit_csv(
            &density_table(&net),
            Some(&dir.path().join("no/such/dir.csv")),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
