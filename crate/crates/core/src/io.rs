//! File formats: invariant series CSV, raw snapshots, raw carpets, carpet
//! images and shock traces.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::carpet::CarpetGrid;
use crate::coherent::{Polarity, ShockTrace};
use crate::config::fmt_f64;
use crate::conserved::InvariantSample;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

pub const INVARIANTS_HEADER: &str = "t,mass,energy,hamiltonian";

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip
/// every `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn invariants_csv(samples: &[InvariantSample]) -> String {
    let mut s = String::from(INVARIANTS_HEADER);
    s.push('\n');
    for x in samples {
        s.push_str(&format!(
            "{},{},{},{}\n",
            num(x.time),
            num(x.mass),
            num(x.energy),
            num(x.hamiltonian)
        ));
    }
    s
}

pub fn write_invariants_csv(samples: &[InvariantSample], path: &Path) -> Result<()> {
    write_file(path, invariants_csv(samples).as_bytes())
}

pub fn read_invariants_csv(path: &Path) -> Result<Vec<InvariantSample>> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| format_err(path, "not UTF-8"))?;
    let mut lines = text.lines();
    if lines.next() != Some(INVARIANTS_HEADER) {
        return Err(format_err(path, "missing invariants header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let v = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| format_err(path, format!("row {} is not numeric", i + 1)))?;
            match v[..] {
                [time, mass, energy, hamiltonian] => Ok(InvariantSample {
                    time,
                    mass,
                    energy,
                    hamiltonian,
                }),
                _ => Err(format_err(path, format!("row {} needs four fields", i + 1))),
            }
        })
        .collect()
}

fn snapshot_header(n: usize, length: f64, time: f64) -> String {
    format!("akdv-snap v1 n={n} L={} t={}\n", fmt_f64(length), fmt_f64(time))
}

/// Header line followed by the `n` real-space samples as little-endian `f64`.
pub fn snapshot_bytes(field: &SpectralField, time: f64) -> Vec<u8> {
    let grid = field.grid();
    let mut out = snapshot_header(grid.n(), grid.length(), time).into_bytes();
    for v in field.inverse() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_snapshot(field: &SpectralField, time: f64, path: &Path) -> Result<()> {
    write_file(path, &snapshot_bytes(field, time))
}

/// Raw snapshot contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub length: f64,
    pub time: f64,
    pub samples: Vec<f64>,
}

impl Snapshot {
    pub fn field(&self) -> Result<SpectralField> {
        SpectralField::forward(&Grid::new(self.samples.len(), self.length)?, &self.samples)
    }
}

fn split_header<'a>(path: &Path, bytes: &'a [u8], magic: &str) -> Result<(Vec<(&'a str, &'a str)>, &'a [u8])> {
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| format_err(path, "missing header line"))?;
    let header =
        std::str::from_utf8(&bytes[..end]).map_err(|_| format_err(path, "header is not UTF-8"))?;
    let rest = header
        .strip_prefix(magic)
        .ok_or_else(|| format_err(path, format!("expected `{magic}` header")))?;
    let fields = rest
        .split_whitespace()
        .map(|kv| kv.split_once('=').ok_or_else(|| format_err(path, format!("bad header field `{kv}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((fields, &bytes[end + 1..]))
}

fn header_value<T: std::str::FromStr>(path: &Path, fields: &[(&str, &str)], key: &str) -> Result<T> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .and_then(|(_, v)| v.parse().ok())
        .ok_or_else(|| format_err(path, format!("header lacks a valid `{key}`")))
}

fn le_f64s(path: &Path, payload: &[u8], count: usize) -> Result<Vec<f64>> {
    if payload.len() != 8 * count {
        return Err(format_err(
            path,
            format!("payload holds {} bytes, expected {}", payload.len(), 8 * count),
        ));
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = read_file(path)?;
    let (fields, payload) = split_header(path, &bytes, "akdv-snap v1")?;
    let n: usize = header_value(path, &fields, "n")?;
    let length = header_value(path, &fields, "L")?;
    let time = header_value(path, &fields, "t")?;
    Ok(Snapshot {
        length,
        time,
        samples: le_f64s(path, payload, n)?,
    })
}

/// Reads a snapshot and checks its point count.
pub fn read_snapshot_expecting(path: &Path, n: usize) -> Result<Snapshot> {
    let snap = read_snapshot(path)?;
    if snap.samples.len() != n {
        return Err(format_err(
            path,
            format!("snapshot has n = {}, expected {n}", snap.samples.len()),
        ));
    }
    Ok(snap)
}

/// Carpet as a header line, the row times and the row-major values, all
/// little-endian `f64`.
pub fn write_carpet_data(carpet: &CarpetGrid, path: &Path) -> Result<()> {
    let mut out = format!(
        "akdv-carpet v1 rows={} cols={} L={}\n",
        carpet.rows(),
        carpet.cols(),
        fmt_f64(carpet.length())
    )
    .into_bytes();
    for v in carpet.times().iter().chain(carpet.values()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    write_file(path, &out)
}

pub fn read_carpet_data(path: &Path) -> Result<CarpetGrid> {
    let bytes = read_file(path)?;
    let (fields, payload) = split_header(path, &bytes, "akdv-carpet v1")?;
    let rows: usize = header_value(path, &fields, "rows")?;
    let cols: usize = header_value(path, &fields, "cols")?;
    let length: f64 = header_value(path, &fields, "L")?;
    let data = le_f64s(path, payload, rows + rows * cols)?;
    let x = (0..cols).map(|j| j as f64 * length / cols as f64).collect();
    CarpetGrid::new(data[..rows].to_vec(), x, length, data[rows..].to_vec())
        .map_err(|e| format_err(path, e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Colormap {
    Gray,
    Diverging,
}

/// Binary PGM (`Gray`) or PPM (`Diverging`) rendering; one pixel per
/// sample, row 0 the earliest time.
pub fn carpet_image_bytes(carpet: &CarpetGrid, colormap: Colormap) -> Result<Vec<u8>> {
    let (lo, hi) = carpet
        .min_max()
        .ok_or_else(|| Error::InvalidArgument("carpet is empty".into()))?;
    let (w, h) = (carpet.cols(), carpet.rows());
    let values = carpet.values();
    match colormap {
        Colormap::Gray => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend(values.iter().map(|&v| {
                if hi == lo {
                    128
                } else {
                    (255.0 * (v - lo) / (hi - lo)).round() as u8
                }
            }));
            Ok(out)
        }
        Colormap::Diverging => {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let spread = (hi - mean).max(mean - lo);
            let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
            for &v in values {
                let s = if spread > 0.0 { ((v - mean) / spread).clamp(-1.0, 1.0) } else { 0.0 };
                // blue (−1) → white (0) → red (+1)
                let fade = |s: f64| (255.0 * (1.0 - s.abs())).round() as u8;
                let rgb = if s < 0.0 { [fade(s), fade(s), 255] } else { [255, fade(s), fade(s)] };
                out.extend_from_slice(&rgb);
            }
            Ok(out)
        }
    }
}

pub fn write_carpet_image(carpet: &CarpetGrid, path: &Path, colormap: Colormap) -> Result<()> {
    write_file(path, &carpet_image_bytes(carpet, colormap)?)
}

pub const SHOCK_TRACE_HEADER: &str = "polarity,t,position,steepness";

pub fn shock_traces_csv(traces: &[ShockTrace]) -> String {
    let mut s = String::from(SHOCK_TRACE_HEADER);
    s.push('\n');
    for tr in traces {
        let name = polarity_name(tr.polarity);
        for ((t, x), g) in tr.times.iter().zip(&tr.positions).zip(&tr.steepness) {
            s.push_str(&format!("{name},{},{},{}\n", num(*t), num(*x), num(*g)));
        }
    }
    s
}

pub fn polarity_name(p: Polarity) -> &'static str {
    match p {
        Polarity::Shock => "shock",
        Polarity::Antishock => "antishock",
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, text.as_bytes())
}

pub fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|_| format_err(path, "not UTF-8"))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn invariants_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inv.csv");
        write_invariants_csv(&[], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "t,mass,energy,hamiltonian\n");
        let s = vec![
            InvariantSample { time: 0.0, mass: PI, energy: PI, hamiltonian: -0.1234567890123456789 },
            InvariantSample { time: 1.0 / 3.0, mass: 1e-300, energy: 2.0, hamiltonian: 7.0 },
        ];
        write_invariants_csv(&s[..1], &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 2);
        write_invariants_csv(&s, &path).unwrap();
        assert_eq!(read_invariants_csv(&path).unwrap(), s);
    }

    #[test]
    fn snapshot_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.snap");
        let g = Grid::new(8, 2.0).unwrap();
        let v: Vec<f64> = (0..8).map(|j| (j as f64 * 0.37).sin()).collect();
        let f = SpectralField::forward(&g, &v).unwrap();
        write_snapshot(&f, 0.5, &path).unwrap();
        let header = snapshot_header(8, 2.0, 0.5);
        assert_eq!(header, "akdv-snap v1 n=8 L=2.0 t=0.5\n");
        assert_eq!(fs::metadata(&path).unwrap().len() as usize, header.len() + 64);
        let snap = read_snapshot(&path).unwrap();
        let written = f.inverse();
        assert!(snap.samples.iter().zip(&written).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(read_snapshot_expecting(&path, 16).is_err());
    }

    #[test]
    fn gray_images() {
        let one = CarpetGrid::new(vec![0.0], vec![0.0], 1.0, vec![0.7]).unwrap();
        let img = carpet_image_bytes(&one, Colormap::Gray).unwrap();
        assert_eq!(img, b"P5\n1 1\n255\n\x80");
        let two = CarpetGrid::new(vec![0.0], vec![0.0, 0.5], 1.0, vec![0.0, 1.0]).unwrap();
        let img = carpet_image_bytes(&two, Colormap::Gray).unwrap();
        assert_eq!(&img[img.len() - 2..], &[0, 255]);
        let rgb = carpet_image_bytes(&two, Colormap::Diverging).unwrap();
        assert!(rgb.starts_with(b"P6\n2 1\n255\n"));
        assert_eq!(&rgb[rgb.len() - 6..], &[0, 0, 255, 255, 0, 0]);
        let empty = CarpetGrid::new(vec![], vec![0.0], 1.0, vec![]).unwrap();
        assert!(carpet_image_bytes(&empty, Colormap::Gray).is_err());
    }

    #[test]
    fn carpet_data_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.bin");
        let c = CarpetGrid::new(vec![0.0, 0.5], vec![0.0, 1.0], 2.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        write_carpet_data(&c, &path).unwrap();
        assert_eq!(read_carpet_data(&path).unwrap(), c);
    }
}
