//! CSV and JSON emission. Floats are written with 17 significant digits so
//! every f64 round-trips, and files are replaced atomically.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::constraint::{ConstraintCurve, OverlayRow};
use crate::error::Result;
use crate::optomech::Spectrum;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// `offset_hz,transmission`
pub fn spectrum_csv(s: &Spectrum) -> Result<Vec<u8>> {
    csv_bytes(
        &["offset_hz", "transmission"],
        s.offsets
            .iter()
            .zip(&s.transmission)
            .map(|(x, t)| vec![fmt_f64(*x), fmt_f64(*t)]),
    )
}

/// `m_a_ev,g2_over_4pi,regime`, one block per curve.
pub fn curves_csv(curves: &[ConstraintCurve]) -> Result<Vec<u8>> {
    csv_bytes(
        &["m_a_ev", "g2_over_4pi", "regime"],
        curves.iter().flat_map(|c| {
            c.masses
                .iter()
                .zip(&c.bounds)
                .map(move |(m, b)| vec![fmt_f64(*m), fmt_f64(*b), c.regime.to_string()])
        }),
    )
}

/// `series,m_a_ev,g2_over_4pi`
pub fn overlay_csv(rows: &[OverlayRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &["series", "m_a_ev", "g2_over_4pi"],
        rows.iter()
            .map(|r| vec![r.series.clone(), fmt_f64(r.m_a_ev), fmt_f64(r.g2_over_4pi)]),
    )
}

pub fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.2832e-23, -2.5e-8, 1e300, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(
                s.trim_start_matches('-').split('e').next().unwrap().len(),
                18
            );
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("a.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(
            std::fs::read_dir(path.parent().unwrap()).unwrap().count(),
            1
        );
    }

    #[test]
    fn overlay_header() {
        let rows = [OverlayRow {
            series: "x".into(),
            m_a_ev: 1e-3,
            g2_over_4pi: 2.0,
        }];
        let text = String::from_utf8(overlay_csv(&rows).unwrap()).unwrap();
        assert!(text.starts_with("series,m_a_ev,g2_over_4pi\nx,1.0000000000000000e-3,"));
    }
}
