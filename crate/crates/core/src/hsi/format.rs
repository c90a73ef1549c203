//! `HSIC` cube and `HSIL` label files.
//!
//! Both are little-endian with a 4-byte magic and a version byte:
//!
//! ```text
//! HSIC | u8 version=1 | u32 height | u32 width | u32 bands | f32 * h*w*b (band-sequential)
//! HSIL | u8 version=1 | u32 height | u32 width |             u16 * h*w   (row-major)
//! ```

use std::path::Path;

use super::{HsiCube, LabelMap};
use crate::binio::{read_file, write_atomic, ByteReader};
use crate::error::Result;

pub const CUBE_MAGIC: [u8; 4] = *b"HSIC";
pub const LABEL_MAGIC: [u8; 4] = *b"HSIL";
pub const CUBE_HEADER_LEN: usize = 17;
pub const LABEL_HEADER_LEN: usize = 13;
const VERSION: u8 = 1;

pub fn encode_cube(cube: &HsiCube) -> Vec<u8> {
    let mut out = Vec::with_capacity(CUBE_HEADER_LEN + 4 * cube.values().len());
    out.extend_from_slice(&CUBE_MAGIC);
    out.push(VERSION);
    for d in [cube.height(), cube.width(), cube.bands()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in cube.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_cube(bytes: &[u8]) -> Result<HsiCube> {
    let mut r = ByteReader::new(bytes);
    r.header(&CUBE_MAGIC, VERSION)?;
    let height = r.u32()? as usize;
    let width = r.u32()? as usize;
    let bands = r.u32()? as usize;
    let count = height * width * bands;
    r.expect_exact(count, 4)?;
    let values = r.f32s(count)?;
    HsiCube::new(height, width, bands, values)
}

pub fn load_cube(path: impl AsRef<Path>) -> Result<HsiCube> {
    decode_cube(&read_file(path.as_ref())?)
}

pub fn save_cube(cube: &HsiCube, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_cube(cube))
}

pub fn encode_labels(labels: &LabelMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(LABEL_HEADER_LEN + 2 * labels.labels().len());
    out.extend_from_slice(&LABEL_MAGIC);
    out.push(VERSION);
    for d in [labels.height(), labels.width()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in labels.labels() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelMap> {
    let mut r = ByteReader::new(bytes);
    r.header(&LABEL_MAGIC, VERSION)?;
    let height = r.u32()? as usize;
    let width = r.u32()? as usize;
    r.expect_exact(height * width, 2)?;
    let labels = r.u16s(height * width)?;
    LabelMap::new(height, width, labels)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelMap> {
    decode_labels(&read_file(path.as_ref())?)
}

pub fn save_labels(labels: &LabelMap, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &encode_labels(labels))
}
