//! On-disk formats: basis cache, data grids, far-field samples, results.
//!
//! The basis cache starts with the magic line `GPSWF1`, then one line of JSON
//! metadata, then little-endian `f64` arrays. The metadata carries a SHA-256
//! digest of the binary payload. Text formats print floats with Rust's
//! shortest round-trip representation, so reading back is exact.

use crate::analysis::Check;
use crate::disk::{DiskBasis, DiskMode};
use crate::error::{Error, Result};
use crate::forward::{DataGrid, DataMeta, FarFieldSample};
use crate::geometry::Geometry;
use crate::numerics::QuadratureRule;
use crate::point::Point;
use crate::recon::ReconstructionResult;
use crate::symset::{Parity, SymSetBasis, SymSetMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const CACHE_MAGIC: &[u8] = b"GPSWF1\n";
const DATA_FORMAT: &str = "prolate-data";
const DATA_COLUMNS: &str = "px,py,weight,re,im,flag";
const FARFIELD_COLUMNS: &str = "xhat_x,xhat_y,theta_x,theta_y,k,re,im";

#[derive(Debug, Clone, PartialEq)]
pub enum CachedBasis {
    Disk(DiskBasis),
    SymSet(SymSetBasis),
}

#[derive(Serialize, Deserialize)]
struct ModeTag {
    m: usize,
    n: usize,
    ell: u8,
    usable: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CacheHeader {
    Disk {
        c: f64,
        m_max: usize,
        n_max: usize,
        truncation: usize,
        modes: Vec<ModeTag>,
        checksum: String,
    },
    Symset {
        c: f64,
        geometry: Geometry,
        count: usize,
        nodes: usize,
        half: usize,
        hs_sum: f64,
        truncated: bool,
        checksum: String,
    },
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn push(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn f64(&mut self) -> Result<f64> {
        let end = self.pos + 8;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| format_err("truncated payload"))?;
        self.pos = end;
        Ok(f64::from_le_bytes(chunk.try_into().unwrap()))
    }

    fn byte(&mut self) -> Result<u8> {
        let b = *self
            .bytes
            .get(self.pos)
            .ok_or_else(|| format_err("truncated payload"))?;
        self.pos += 1;
        Ok(b)
    }

    fn finish(&self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(format_err("trailing bytes in payload"))
        }
    }
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn write_cache<W: Write>(mut w: W, header: &CacheHeader, payload: &[u8]) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    w.write_all(payload)?;
    w.flush()?;
    Ok(())
}

pub fn write_disk_basis<W: Write>(w: W, basis: &DiskBasis) -> Result<()> {
    let mut payload = Vec::new();
    for mode in &basis.modes {
        if mode.coeffs.len() != basis.truncation {
            return Err(format_err("coefficient length differs from truncation"));
        }
        for v in [
            mode.chi,
            mode.chi_radial,
            mode.gamma,
            mode.alpha.re,
            mode.alpha.im,
        ] {
            push(&mut payload, v);
        }
        for &v in &mode.coeffs {
            push(&mut payload, v);
        }
    }
    let header = CacheHeader::Disk {
        c: basis.c,
        m_max: basis.m_max,
        n_max: basis.n_max,
        truncation: basis.truncation,
        modes: basis
            .modes
            .iter()
            .map(|m| ModeTag {
                m: m.m,
                n: m.n,
                ell: m.ell,
                usable: m.usable,
            })
            .collect(),
        checksum: digest(&payload),
    };
    write_cache(w, &header, &payload)
}

pub fn write_symset_basis<W: Write>(w: W, basis: &SymSetBasis) -> Result<()> {
    let half = basis
        .quad
        .half
        .ok_or_else(|| format_err("symmetric-set basis without a symmetric rule"))?;
    let mut payload = Vec::new();
    for p in &basis.quad.nodes {
        push(&mut payload, p.x);
        push(&mut payload, p.y);
    }
    for &w in &basis.quad.weights {
        push(&mut payload, w);
    }
    for mode in &basis.modes {
        push(&mut payload, mode.alpha.re);
        push(&mut payload, mode.alpha.im);
        for &v in &mode.values {
            push(&mut payload, v);
        }
    }
    payload.extend(basis.modes.iter().map(|m| match m.parity {
        Parity::Even => 0u8,
        Parity::Odd => 1u8,
    }));
    let header = CacheHeader::Symset {
        c: basis.c,
        geometry: basis.geometry,
        count: basis.modes.len(),
        nodes: basis.quad.len(),
        half,
        hs_sum: basis.hs_sum,
        truncated: basis.truncated,
        checksum: digest(&payload),
    };
    write_cache(w, &header, &payload)
}

pub fn write_basis<W: Write>(w: W, basis: &CachedBasis) -> Result<()> {
    match basis {
        CachedBasis::Disk(b) => write_disk_basis(w, b),
        CachedBasis::SymSet(b) => write_symset_basis(w, b),
    }
}

/// Reads a cached basis, verifying the magic line and the checksum.
pub fn read_basis<R: Read>(r: R) -> Result<CachedBasis> {
    let mut r = BufReader::new(r);
    let mut magic = vec![0u8; CACHE_MAGIC.len()];
    r.read_exact(&mut magic)
        .map_err(|_| format_err("missing cache magic"))?;
    if magic != CACHE_MAGIC {
        return Err(format_err("not a basis cache file"));
    }
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CacheHeader = serde_json::from_str(line.trim_end())
        .map_err(|e| format_err(format!("cache header: {e}")))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let checksum = match &header {
        CacheHeader::Disk { checksum, .. } | CacheHeader::Symset { checksum, .. } => checksum,
    };
    if *checksum != digest(&payload) {
        return Err(format_err("cache checksum mismatch"));
    }
    let mut cur = Cursor {
        bytes: &payload,
        pos: 0,
    };
    let basis = match header {
        CacheHeader::Disk {
            c,
            m_max,
            n_max,
            truncation,
            modes,
            ..
        } => {
            let mut out = Vec::with_capacity(modes.len());
            for tag in modes {
                let chi = cur.f64()?;
                let chi_radial = cur.f64()?;
                let gamma = cur.f64()?;
                let alpha = Complex64::new(cur.f64()?, cur.f64()?);
                let coeffs = (0..truncation)
                    .map(|_| cur.f64())
                    .collect::<Result<Vec<_>>>()?;
                out.push(DiskMode {
                    m: tag.m,
                    n: tag.n,
                    ell: tag.ell,
                    chi,
                    chi_radial,
                    gamma,
                    alpha,
                    coeffs,
                    usable: tag.usable,
                });
            }
            CachedBasis::Disk(DiskBasis {
                c,
                m_max,
                n_max,
                truncation,
                modes: out,
            })
        }
        CacheHeader::Symset {
            c,
            geometry,
            count,
            nodes,
            half,
            hs_sum,
            truncated,
            ..
        } => {
            if 2 * half != nodes {
                return Err(format_err("symmetric rule with odd node count"));
            }
            let pts = (0..nodes)
                .map(|_| Ok(Point::new(cur.f64()?, cur.f64()?)))
                .collect::<Result<Vec<_>>>()?;
            let weights = (0..nodes).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
            let mut modes = Vec::with_capacity(count);
            for _ in 0..count {
                let alpha = Complex64::new(cur.f64()?, cur.f64()?);
                let values = (0..nodes).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
                modes.push(SymSetMode {
                    parity: Parity::Even,
                    alpha,
                    values,
                });
            }
            for mode in &mut modes {
                mode.parity = match cur.byte()? {
                    0 => Parity::Even,
                    1 => Parity::Odd,
                    b => return Err(format_err(format!("bad parity byte {b}"))),
                };
            }
            let quad = QuadratureRule {
                nodes: pts,
                weights,
                half: Some(half),
            };
            CachedBasis::SymSet(SymSetBasis {
                c,
                geometry,
                quad,
                modes,
                hs_sum,
                truncated,
            })
        }
    };
    cur.finish()?;
    Ok(basis)
}

pub fn save_basis(path: &Path, basis: &CachedBasis) -> Result<()> {
    write_basis(BufWriter::new(File::create(path)?), basis)
}

pub fn load_basis(path: &Path) -> Result<CachedBasis> {
    read_basis(File::open(path)?)
}

#[derive(Serialize, Deserialize)]
struct DataHeader {
    format: String,
    #[serde(flatten)]
    meta: DataMeta,
    geometry: Option<Geometry>,
    count: usize,
    half: Option<usize>,
}

/// Writes a data grid: one JSON header line, then `px,py,weight,re,im,flag`
/// rows where `flag` is 1 for missing nodes.
pub fn write_data<W: Write>(w: W, data: &DataGrid) -> Result<()> {
    let mut w = BufWriter::new(w);
    let header = DataHeader {
        format: DATA_FORMAT.into(),
        meta: data.meta.clone(),
        geometry: data.geometry,
        count: data.rule.len(),
        half: data.rule.half,
    };
    serde_json::to_writer(&mut w, &header)?;
    writeln!(w)?;
    writeln!(w, "{DATA_COLUMNS}")?;
    for i in 0..data.rule.len() {
        let p = data.rule.nodes[i];
        let v = data.values[i];
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.x, p.y, data.rule.weights[i], v.re, v.im, data.missing[i] as u8
        )?;
    }
    w.flush()?;
    Ok(())
}

fn parse_fields(line: &str, lineno: usize, expected: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != expected {
        return Err(format_err(format!(
            "line {lineno}: expected {expected} fields, found {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| format_err(format!("line {lineno}: {e}")))
        })
        .collect()
}

fn check_columns(line: Option<std::io::Result<String>>, expected: &str) -> Result<()> {
    let line = line.ok_or_else(|| format_err("missing column header"))??;
    if line.trim() != expected {
        return Err(format_err(format!(
            "expected columns `{expected}`, found `{}`",
            line.trim()
        )));
    }
    Ok(())
}

pub fn read_data<R: Read>(r: R) -> Result<DataGrid> {
    let mut lines = BufReader::new(r).lines();
    let first = lines
        .next()
        .ok_or_else(|| format_err("empty data file"))??;
    let header: DataHeader =
        serde_json::from_str(&first).map_err(|e| format_err(format!("data header: {e}")))?;
    if header.format != DATA_FORMAT {
        return Err(format_err(format!(
            "unknown data format `{}`",
            header.format
        )));
    }
    check_columns(lines.next(), DATA_COLUMNS)?;
    let mut nodes = Vec::with_capacity(header.count);
    let mut weights = Vec::with_capacity(header.count);
    let mut values = Vec::with_capacity(header.count);
    let mut missing = Vec::with_capacity(header.count);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = parse_fields(&line, i + 3, 6)?;
        nodes.push(Point::new(f[0], f[1]));
        weights.push(f[2]);
        values.push(Complex64::new(f[3], f[4]));
        missing.push(match f[5] {
            x if x == 0.0 => false,
            x if x == 1.0 => true,
            x => {
                return Err(format_err(format!(
                    "line {}: flag must be 0 or 1, got {x}",
                    i + 3
                )))
            }
        });
    }
    if nodes.len() != header.count {
        return Err(format_err(format!(
            "header promises {} rows, found {}",
            header.count,
            nodes.len()
        )));
    }
    if let Some(h) = header.half {
        if 2 * h != nodes.len() {
            return Err(format_err("half count inconsistent with row count"));
        }
    }
    let rule = QuadratureRule {
        nodes,
        weights,
        half: header.half,
    };
    let mut data = DataGrid::new(rule, values, header.meta.kappa)?;
    data.missing = missing;
    data.meta = header.meta;
    data.geometry = header.geometry;
    Ok(data)
}

pub fn save_data(path: &Path, data: &DataGrid) -> Result<()> {
    write_data(File::create(path)?, data)
}

pub fn load_data(path: &Path) -> Result<DataGrid> {
    read_data(File::open(path)?)
}

/// Reads far-field samples with columns `xhat_x,xhat_y,theta_x,theta_y,k,re,im`.
pub fn read_farfield<R: Read>(r: R) -> Result<Vec<FarFieldSample>> {
    let mut lines = BufReader::new(r).lines();
    check_columns(lines.next(), FARFIELD_COLUMNS)?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = parse_fields(&line, i + 2, 7)?;
        out.push(FarFieldSample {
            x_hat: Point::new(f[0], f[1]),
            theta_hat: Point::new(f[2], f[3]),
            k: f[4],
            value: Complex64::new(f[5], f[6]),
        });
    }
    Ok(out)
}

pub fn write_farfield<W: Write>(w: W, samples: &[FarFieldSample]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{FARFIELD_COLUMNS}")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.x_hat.x, s.x_hat.y, s.theta_hat.x, s.theta_hat.y, s.k, s.value.re, s.value.im
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Reads points from a CSV with header `x,y`.
pub fn read_points<R: Read>(r: R) -> Result<Vec<Point>> {
    let mut lines = BufReader::new(r).lines();
    check_columns(lines.next(), "x,y")?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = parse_fields(&line, i + 2, 2)?;
        out.push(Point::new(f[0], f[1]));
    }
    Ok(out)
}

/// Writes `x,y,re,im` rows.
pub fn write_complex_field<W: Write>(w: W, points: &[Point], values: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "x,y,re,im")?;
    for (p, v) in points.iter().zip(values) {
        writeln!(w, "{},{},{},{}", p.x, p.y, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `x,y,q` rows with the real part of the field.
pub fn write_field<W: Write>(w: W, points: &[Point], values: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "x,y,q")?;
    for (p, v) in points.iter().zip(values) {
        writeln!(w, "{},{},{}", p.x, p.y, v.re)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub id: String,
    pub coeff_re: f64,
    pub coeff_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub alpha: f64,
    pub beta_alpha: Option<f64>,
    pub delta: f64,
    pub modes: Vec<ModeRecord>,
    pub residual: f64,
    pub imag_dropped: f64,
    pub realified: bool,
}

impl From<&ReconstructionResult> for ResultFile {
    fn from(r: &ReconstructionResult) -> Self {
        Self {
            alpha: r.alpha,
            beta_alpha: r.beta_alpha,
            delta: r.delta,
            modes: r
                .modes
                .iter()
                .map(|m| ModeRecord {
                    id: m.id.clone(),
                    coeff_re: m.coeff.re,
                    coeff_im: m.coeff.im,
                })
                .collect(),
            residual: r.residual,
            imag_dropped: r.imag_dropped,
            realified: r.realified,
        }
    }
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(w: W, value: &T) -> Result<()> {
    let mut w = BufWriter::new(w);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(w: W, checks: &[Check]) -> Result<()> {
    write_json(w, checks)
}
