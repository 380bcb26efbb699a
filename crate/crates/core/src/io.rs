//! File formats: balance-sheet and edge-list CSV input, result and ranking output.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::contagion::StressResult;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::model::{BankRecord, BankingSystem, ExposureMatrix};
use crate::scalar::Scalar;
use crate::scenarios::ImpactVulnerability;

pub const BALANCE_HEADER: [&str; 8] = [
    "bank_id",
    "name",
    "equity",
    "external_assets",
    "external_liabilities",
    "interbank_assets",
    "interbank_liabilities",
    "total_assets",
];

pub const EDGE_HEADER: [&str; 3] = ["lender_id", "borrower_id", "exposure"];

pub const RANKING_HEADER: [&str; 7] = [
    "bank_id",
    "name",
    "total_assets",
    "impact",
    "vulnerability",
    "impact_rank",
    "vulnerability_rank",
];

/// Parsed inputs of a run.
#[derive(Debug, Clone)]
pub struct Inputs<T> {
    pub records: Vec<BankRecord<T>>,
    /// Present when a full exposure matrix was supplied; reconstruction is skipped then.
    pub exposures: Option<ExposureMatrix<T>>,
}

fn parse_error(line: u64, column: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: column.to_string(),
        reason: reason.into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    parse_error(line, "", e.to_string())
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(parse_error(
            1,
            "",
            format!("expected header {:?}, got {:?}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_number<T: Scalar>(raw: &str, line: u64, column: &str) -> Result<T> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| parse_error(line, column, format!("not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(line, column, format!("not finite: {raw:?}")));
    }
    T::from_f64(v).ok_or_else(|| parse_error(line, column, "out of range"))
}

/// Reads balance sheets. Every admitted bank must have positive equity.
pub fn read_balance_sheets<T: Scalar, R: Read>(reader: R) -> Result<Vec<BankRecord<T>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(rdr.headers().map_err(csv_error)?, &BALANCE_HEADER)?;
    let mut records = Vec::new();
    let mut seen = HashMap::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |k: usize| row.get(k).unwrap_or("");
        let id = field(0).to_string();
        if id.is_empty() {
            return Err(parse_error(line, "bank_id", "empty bank id"));
        }
        if let Some(prev) = seen.insert(id.clone(), line) {
            return Err(parse_error(
                line,
                "bank_id",
                format!("duplicate bank id {id:?} (first on line {prev})"),
            ));
        }
        let num = |k: usize| parse_number::<T>(field(k), line, BALANCE_HEADER[k]);
        let equity = num(2)?;
        if !equity.is_positive() {
            return Err(Error::NonPositiveEquity(id));
        }
        let total_assets = if field(7).is_empty() { None } else { Some(num(7)?) };
        records.push(BankRecord::new(
            id,
            field(1),
            equity,
            num(3)?,
            num(4)?,
            num(5)?,
            num(6)?,
            total_assets,
        )?);
    }
    if records.is_empty() {
        return Err(Error::EmptySystem);
    }
    Ok(records)
}

/// Reads a `lender_id,borrower_id,exposure` edge list against known bank ids.
pub fn read_edge_list<T: Scalar, R: Read>(reader: R, records: &[BankRecord<T>]) -> Result<ExposureMatrix<T>> {
    let index: HashMap<&str, usize> = records.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(rdr.headers().map_err(csv_error)?, &EDGE_HEADER)?;
    let mut a = DenseMatrix::zeros(records.len());
    let mut filled = vec![false; records.len() * records.len()];
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let lookup = |k: usize| {
            let id = row.get(k).unwrap_or("");
            index
                .get(id)
                .copied()
                .ok_or_else(|| parse_error(line, EDGE_HEADER[k], format!("unknown bank id {id:?}")))
        };
        let (i, j) = (lookup(0)?, lookup(1)?);
        let v: T = parse_number(row.get(2).unwrap_or(""), line, "exposure")?;
        if !v.is_positive() {
            return Err(parse_error(line, "exposure", "exposure must be strictly positive"));
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        let slot = i * records.len() + j;
        if std::mem::replace(&mut filled[slot], true) {
            return Err(parse_error(line, "borrower_id", "duplicate lender/borrower pair"));
        }
        a[(i, j)] = v;
    }
    Ok(ExposureMatrix::new(a))
}

pub fn load_inputs<T: Scalar>(balance_csv: &Path, exposures_csv: Option<&Path>) -> Result<Inputs<T>> {
    let records = read_balance_sheets(File::open(balance_csv)?)?;
    let exposures = match exposures_csv {
        Some(p) => Some(read_edge_list(File::open(p)?, &records)?),
        None => None,
    };
    Ok(Inputs { records, exposures })
}

pub fn write_balance_sheets<T: Scalar, W: Write>(writer: W, records: &[BankRecord<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(BALANCE_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.id.clone(),
            r.name.clone(),
            r.equity0.to_string(),
            r.external_assets.to_string(),
            r.external_liabilities.to_string(),
            r.interbank_assets_total.to_string(),
            r.interbank_liabilities_total.to_string(),
            r.total_assets.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the nonzero exposures, row-major.
pub fn write_edge_list<T: Scalar, W: Write>(writer: W, system: &BankingSystem<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EDGE_HEADER).map_err(csv_error)?;
    let ids = system.records();
    for (i, j, v) in system.exposures().edges() {
        w.write_record([ids[i].id.as_str(), ids[j].id.as_str(), &v.to_string()])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefaultJson {
    pub bank_id: String,
    pub step: usize,
}

/// Wire form of a [`StressResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StressResultJson<T> {
    pub h_final: Vec<T>,
    pub defaults: Vec<DefaultJson>,
    pub steps: usize,
    pub converged: bool,
    #[serde(rename = "H_series")]
    pub h_series: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> StressResultJson<T> {
    pub fn new(result: &StressResult<T>, system: &BankingSystem<T>, trace: bool) -> Self {
        Self {
            h_final: result.h_final.clone(),
            defaults: result
                .defaults
                .iter()
                .map(|d| DefaultJson {
                    bank_id: system.records()[d.bank].id.clone(),
                    step: d.step,
                })
                .collect(),
            steps: result.steps,
            converged: result.converged,
            h_series: result.aggregate_series.clone(),
            trajectory: trace.then(|| result.trajectory.clone()),
        }
    }
}

pub fn write_rankings<T: Scalar, W: Write>(writer: W, iv: &ImpactVulnerability<T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RANKING_HEADER).map_err(csv_error)?;
    for i in 0..iv.bank_ids.len() {
        w.write_record([
            iv.bank_ids[i].clone(),
            iv.names[i].clone(),
            iv.total_assets[i].to_string(),
            iv.impact[i].to_string(),
            iv.vulnerability[i].to_string(),
            iv.impact_rank[i].to_string(),
            iv.vulnerability_rank[i].to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint<T> {
    pub bank_id: String,
    /// Vulnerability rank.
    pub x: usize,
    /// Impact rank.
    pub y: usize,
    /// Total assets.
    pub size: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPayload<T> {
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub size_label: &'static str,
    pub points: Vec<ScatterPoint<T>>,
}

impl<T: Scalar> ScatterPayload<T> {
    pub fn new(iv: &ImpactVulnerability<T>) -> Self {
        Self {
            x_label: "vulnerability_rank",
            y_label: "impact_rank",
            size_label: "total_assets",
            points: (0..iv.bank_ids.len())
                .map(|i| ScatterPoint {
                    bank_id: iv.bank_ids[i].clone(),
                    x: iv.vulnerability_rank[i],
                    y: iv.impact_rank[i],
                    size: iv.total_assets[i],
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BANKS: &str =
        "bank_id,name,equity,external_assets,external_liabilities,interbank_assets,interbank_liabilities,total_assets
B1,First,10,100,95,5,4,105
B2,Second,20,50,34,4,5,
";

    #[test]
    fn reads_two_banks() {
        let recs: Vec<BankRecord<f64>> = read_balance_sheets(TWO_BANKS.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "B1");
        assert_eq!(recs[1].total_assets, 54.0);
    }

    #[test]
    fn negative_equity_names_the_bank() {
        let csv = TWO_BANKS.replace("B2,Second,20", "B2,Second,-3");
        let err = read_balance_sheets::<f64, _>(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveEquity(ref id) if id == "B2"));
        assert!(err.is_validation());
    }

    #[test]
    fn bad_number_reports_position() {
        let csv = TWO_BANKS.replace("100", "1e0x");
        match read_balance_sheets::<f64, _>(csv.as_bytes()).unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, "external_assets");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn wrong_header_rejected() {
        let csv = TWO_BANKS.replace("bank_id", "id");
        assert!(matches!(
            read_balance_sheets::<f64, _>(csv.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn edge_list_lookup() {
        let recs: Vec<BankRecord<f64>> = read_balance_sheets(TWO_BANKS.as_bytes()).unwrap();
        let edges = "lender_id,borrower_id,exposure\nB1,B2,5\nB2,B1,4\n";
        let a = read_edge_list(edges.as_bytes(), &recs).unwrap();
        assert_eq!(a.matrix().to_rows(), vec![vec![0.0, 5.0], vec![4.0, 0.0]]);

        let bad = "lender_id,borrower_id,exposure\nB1,B9,5\n";
        match read_edge_list(bad.as_bytes(), &recs).unwrap_err() {
            Error::Parse { reason, .. } => assert!(reason.contains("B9")),
            e => panic!("unexpected {e}"),
        }
        let zero = "lender_id,borrower_id,exposure\nB1,B2,0\n";
        assert!(read_edge_list(zero.as_bytes(), &recs).is_err());
        let dup = "lender_id,borrower_id,exposure\nB1,B2,1\nB1,B2,2\n";
        assert!(read_edge_list(dup.as_bytes(), &recs).is_err());
    }
}
