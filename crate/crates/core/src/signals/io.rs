use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Band, BandLimitedSignal, SignalError, ValueKind};

/// Metadata stored next to the `x, re, im` sample table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalHeader {
    pub window_radius: f64,
    pub sample_step: f64,
    pub band: [f64; 2],
    pub value_kind: ValueKind,
}

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    re: f64,
    im: f64,
}

pub fn signal_to_csv(f: &BandLimitedSignal) -> Result<(SignalHeader, String), SignalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (x, s) in f.positions().zip(f.samples()) {
        w.serialize(Row { x, re: s.re, im: s.im })
            .map_err(|e| SignalError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| SignalError::Io(e.to_string()))?;
    let header = SignalHeader {
        window_radius: f.window_radius(),
        sample_step: f.sample_step(),
        band: [f.band().lo, f.band().hi],
        value_kind: f.value_kind(),
    };
    Ok((header, String::from_utf8(bytes).map_err(|e| SignalError::Io(e.to_string()))?))
}

pub fn signal_from_csv(header: &SignalHeader, table: &str) -> Result<BandLimitedSignal, SignalError> {
    let mut r = csv::Reader::from_reader(table.as_bytes());
    let mut samples = Vec::new();
    for (j, row) in r.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| SignalError::Io(e.to_string()))?;
        let expect = -header.window_radius + j as f64 * header.sample_step;
        if (row.x - expect).abs() > 1e-9 * header.window_radius.max(1.0) {
            return Err(SignalError::Invalid(format!("row {j} at x = {}, expected {expect}", row.x)));
        }
        samples.push(Complex64::new(row.re, row.im));
    }
    BandLimitedSignal::new(
        header.window_radius,
        header.sample_step,
        samples,
        Band::new(header.band[0], header.band[1]),
        header.value_kind,
    )
}

/// Writes the sample table to `csv_path` and the header to `json_path`.
pub fn write_signal(f: &BandLimitedSignal, csv_path: &Path, json_path: &Path) -> Result<(), SignalError> {
    let (header, table) = signal_to_csv(f)?;
    let json = serde_json::to_string_pretty(&header).map_err(|e| SignalError::Io(e.to_string()))?;
    fs::write(json_path, json).map_err(|e| SignalError::Io(e.to_string()))?;
    fs::write(csv_path, table).map_err(|e| SignalError::Io(e.to_string()))
}

pub fn read_signal(csv_path: &Path, json_path: &Path) -> Result<BandLimitedSignal, SignalError> {
    let json = fs::read_to_string(json_path).map_err(|e| SignalError::Io(e.to_string()))?;
    let header: SignalHeader = serde_json::from_str(&json).map_err(|e| SignalError::Io(e.to_string()))?;
    let table = fs::read_to_string(csv_path).map_err(|e| SignalError::Io(e.to_string()))?;
    signal_from_csv(&header, &table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let f = BandLimitedSignal::tone(12.5, 0.173, Band::new(0.1, 0.3)).unwrap();
        let (header, table) = signal_to_csv(&f).unwrap();
        assert!(table.starts_with("x,re,im"));
        let g = signal_from_csv(&header, &table).unwrap();
        assert!(f.max_abs_diff(&g).unwrap() < 1e-12);
        assert_eq!(g.band(), f.band());
    }

    #[test]
    fn misplaced_row_is_rejected() {
        let f = BandLimitedSignal::tone(2.0, 0.1, Band::new(0.0, 0.5)).unwrap();
        let (header, table) = signal_to_csv(&f).unwrap();
        let broken = table.replacen("-2.0,", "-1.5,", 1);
        assert!(signal_from_csv(&header, &broken).is_err());
    }
}
