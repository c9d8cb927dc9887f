//! The DLF1 field file format.
//!
//! Layout (all little endian): 16-byte header `b"DLF1"`, `u16` version, ten
//! zero bytes; `f64` L, `f64` Tw, `u32` Nx, `u32` Nt; `u8` representation
//! tag; then `Nt * Nx` complex values, row major, as interleaved `f64` pairs.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{Field, Representation};
use super::grid::{make_grid, GridSpec};
use crate::error::{DlabError, Result};

pub const MAGIC: &[u8; 4] = b"DLF1";
pub const VERSION: u16 = 1;

fn format_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(DlabError::Format(msg.into()))
}

pub fn write_field<W: Write>(mut w: W, field: &Field) -> Result<()> {
    let spec = field.grid().spec();
    let mut header = [0u8; 16];
    header[..4].copy_from_slice(MAGIC);
    header[4..6].copy_from_slice(&VERSION.to_le_bytes());
    w.write_all(&header)?;
    w.write_all(&spec.half_width.to_le_bytes())?;
    w.write_all(&spec.half_time.to_le_bytes())?;
    w.write_all(&(spec.nx as u32).to_le_bytes())?;
    w.write_all(&(spec.nt as u32).to_le_bytes())?;
    w.write_all(&[field.repr().tag()])?;
    let mut body = Vec::with_capacity(field.values().len() * 16);
    for v in field.values() {
        body.extend_from_slice(&v.re.to_le_bytes());
        body.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&body)?;
    w.flush()?;
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header).or_else(|_| format_err("truncated DLF1 header"))?;
    if &header[..4] != MAGIC {
        return format_err("not a DLF1 file (bad magic)");
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return format_err(format!("unsupported DLF1 version {version}"));
    }
    let mut meta = [0u8; 25];
    r.read_exact(&mut meta).or_else(|_| format_err("truncated DLF1 grid block"))?;
    let f64_at = |o: usize| f64::from_le_bytes(meta[o..o + 8].try_into().unwrap());
    let u32_at = |o: usize| u32::from_le_bytes(meta[o..o + 4].try_into().unwrap());
    let spec = GridSpec::new(f64_at(0), u32_at(16) as usize, f64_at(8), u32_at(20) as usize);
    let repr = Representation::from_tag(meta[24])
        .ok_or_else(|| DlabError::Format(format!("unknown representation tag {}", meta[24])))?;
    let grid = make_grid(spec)?;
    let n = spec.nx * spec.nt;
    let mut body = vec![0u8; n * 16];
    r.read_exact(&mut body).or_else(|_| format_err("truncated DLF1 body"))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return format_err("trailing bytes after DLF1 body");
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::from_values(&grid, repr, values)
}

pub fn save(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load(path: impl AsRef<Path>) -> Result<Field> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}
